"""Text formats for phrases and homotopy data triples.

Phrase format::

    A:a B:b C:c ; ABC|AC|B

Declarations ``LETTER:symbol`` come before the ``;``; the body lists
components separated by ``|`` and phrases separated by ``||``.  An empty
component is written ``_``; an empty body is the 0-component phrase.  In
compact mode each uppercase character is a letter; in token mode letters
are whitespace-separated identifiers (``X1 X2 | X1 X2``).

Triple format (newline- or ``;``-separated)::

    alpha: a b c d
    tau: a<->b c<->d
    S: (a,b,a) (c,d,c)        # or  S: diagonal   /  S: empty
"""

from __future__ import annotations

import re
from typing import Iterable

from .core import Nanomultiphrase, Nanophrase
from .errors import PhraseSyntaxError, UnknownSymbol
from .hdt import HomotopyDataTriple

_DECL = re.compile(r"([A-Za-z][\w.]*)\s*:\s*([\w.]+)")
_TOKEN = re.compile(r"\s+|\|\||\||[A-Za-z][\w.]*|_")
_COMPACT = re.compile(r"\s+|\|\||\||[A-Z]|_")
_SYMBOL = re.compile(r"[\w.]+$")


def _parse_decls(text: str, offset: int) -> dict:
    decls = {}
    pos = 0
    text_len = len(text)
    while pos < text_len:
        if text[pos].isspace():
            pos += 1
            continue
        m = _DECL.match(text, pos)
        if not m:
            raise PhraseSyntaxError("bad declaration, expected LETTER:symbol", offset + pos)
        letter, sym = m.groups()
        if letter in decls and decls[letter] != sym:
            raise PhraseSyntaxError(f"letter {letter} declared twice", offset + pos)
        decls[letter] = sym
        pos = m.end()
    return decls


def _tokenize_body(body: str, offset: int, tokens: bool) -> list:
    pattern = _TOKEN if tokens else _COMPACT
    out = []
    pos = 0
    while pos < len(body):
        m = pattern.match(body, pos)
        if not m:
            raise PhraseSyntaxError(f"unexpected character {body[pos]!r}", offset + pos)
        tok = m.group()
        if not tok.isspace():
            out.append((tok, offset + pos))
        pos = m.end()
    return out


def _split_body(toks: list) -> list:
    """Token list -> list of phrases, each a list of components."""
    phrases, current = [], []
    for tok in toks + [("||", None)]:
        if tok[0] == "||":
            phrases.append(current)
            current = []
        else:
            current.append(tok)
    out = []
    for ptoks in phrases:
        comps = []
        if not ptoks:
            out.append(comps)
            continue
        word = []
        for tok, pos in ptoks + [("|", None)]:
            if tok != "|":
                word.append((tok, pos))
                continue
            if not word:
                raise PhraseSyntaxError("empty component must be written _", pos)
            names = [t for t, _ in word]
            if "_" in names:
                if len(names) > 1:
                    raise PhraseSyntaxError("_ must stand alone as a component", word[0][1])
                comps.append(())
            else:
                comps.append(tuple(names))
            word = []
        out.append(comps)
    return out


def parse_phrase(text: str, *, tokens: bool | None = None, multi: bool | None = None,
                 default_symbol: str | None = None, alpha: Iterable[str] | None = None):
    """Parse phrase text into a :class:`Nanophrase` or :class:`Nanomultiphrase`.

    ``multi=None`` returns a multiphrase only when the body contains ``||``.
    ``default_symbol`` projects undeclared letters.  ``alpha``, when given,
    restricts the allowed projection targets.
    """
    if ";" in text:
        head, body = text.split(";", 1)
        body_offset = len(head) + 1
    else:
        head, body, body_offset = "", text, 0
    decls = _parse_decls(head, 0)
    if alpha is not None:
        alpha = set(alpha)
        for letter, sym in decls.items():
            if sym not in alpha:
                raise UnknownSymbol(f"symbol {sym!r} of letter {letter} is not in alpha")
        if default_symbol is not None and default_symbol not in alpha:
            raise UnknownSymbol(f"default symbol {default_symbol!r} is not in alpha")
    if tokens is None:
        tokens = any(len(x) > 1 for x in decls)
    toks = _tokenize_body(body, body_offset, tokens)
    phrases = _split_body(toks) if toks else [[]]
    if multi is None:
        multi = len(phrases) > 1
    if not multi and len(phrases) > 1:
        raise PhraseSyntaxError("'||' found while parsing a single phrase")
    if multi and not toks:
        phrases = []
    proj = dict(decls)
    if default_symbol is not None:
        for ph in phrases:
            for comp in ph:
                for x in comp:
                    proj.setdefault(x, default_symbol)
    if multi:
        return Nanomultiphrase(phrases, proj)
    return Nanophrase(phrases[0], proj)


def parse_multiphrase(text: str, **kw) -> Nanomultiphrase:
    return parse_phrase(text, multi=True, **kw)


def _compact_ok(p: Nanophrase) -> bool:
    return all(len(x) == 1 and "A" <= x <= "Z" for x in p.letters())


def _render_body(components, tokens: bool) -> str:
    sep = " " if tokens else ""
    words = [sep.join(c) if c else "_" for c in components]
    return (" | " if tokens else "|").join(words)


def _render_decls(p: Nanophrase) -> str:
    return " ".join(f"{x}:{p.projection[x]}" for x in p.letters())


def render_phrase(p: Nanophrase, *, tokens: bool | None = None) -> str:
    if tokens is None:
        tokens = not _compact_ok(p)
    decls = _render_decls(p)
    body = _render_body(p.components, tokens)
    return f"{decls} ; {body}".strip()


def render_multiphrase(m: Nanomultiphrase, *, tokens: bool | None = None) -> str:
    if tokens is None:
        tokens = not _compact_ok(m.flat)
    decls = _render_decls(m.flat)
    joiner = " || " if tokens else "||"
    body = joiner.join(_render_body(ph, tokens) for ph in m.phrases)
    return f"{decls} ; {body}".strip()


def render_body(p: Nanophrase) -> str:
    """Body only, without declarations."""
    return _render_body(p.components, not _compact_ok(p))


# -- triples -------------------------------------------------------------

_TRIPLE_ITEM = re.compile(r"\(\s*([\w.]+)\s*,\s*([\w.]+)\s*,\s*([\w.]+)\s*\)")


def parse_triple(text: str) -> HomotopyDataTriple:
    alpha = None
    tau = {}
    s_text = None
    lines = []
    for raw in text.splitlines():
        raw = raw.split("#", 1)[0]
        lines.extend(part for part in raw.split(";"))
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if ":" not in line:
            raise PhraseSyntaxError(f"expected 'key: value' in triple line {line!r}")
        key, value = (part.strip() for part in line.split(":", 1))
        key = key.lower()
        if key == "alpha":
            alpha = value.split()
            for a in alpha:
                if not _SYMBOL.match(a):
                    raise PhraseSyntaxError(f"bad symbol name {a!r}")
        elif key == "tau":
            for item in value.split():
                if "<->" in item:
                    a, b = item.split("<->", 1)
                    tau[a] = b
                    tau[b] = a
                else:
                    tau[item] = item
        elif key == "s":
            s_text = value
        else:
            raise PhraseSyntaxError(f"unknown triple key {key!r}")
    if alpha is None:
        raise PhraseSyntaxError("triple has no 'alpha:' line")
    s = []
    if s_text is not None:
        v = s_text.strip()
        if v.lower() == "diagonal":
            s = [(a, a, a) for a in alpha]
        elif v.lower() in ("", "empty"):
            s = []
        else:
            pos = 0
            while pos < len(v):
                if v[pos].isspace():
                    pos += 1
                    continue
                m = _TRIPLE_ITEM.match(v, pos)
                if not m:
                    raise PhraseSyntaxError(f"bad S element in {v!r}", pos)
                s.append(m.groups())
                pos = m.end()
    return HomotopyDataTriple(alpha, tau, s)


def render_triple(t: HomotopyDataTriple, *, inline: bool = False) -> str:
    tau = " ".join(o[0] if len(o) == 1 else f"{o[0]}<->{o[1]}" for o in t.orbits())
    if not t.s:
        s = "empty"
    elif t.is_diagonal:
        s = "diagonal"
    else:
        s = " ".join(f"({a},{b},{c})" for a, b, c in sorted(
            t.s, key=lambda tr: tuple(t.position(x) for x in tr)))
    lines = [f"alpha: {' '.join(t.alpha)}", f"tau: {tau}", f"S: {s}"]
    return "; ".join(lines) if inline else "\n".join(lines)
