"""Command-line interface: ``nanophrase <command> ...``.

Exit status: 0 for Yes or success, 1 for No, 2 for Unknown, 3 for input
errors and 4 for refused or unexpected failures.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import invariants as inv
from .core import Nanophrase, canonical_key, pretty
from .decompose import complete_invariant, psi, same_class_key
from .errors import BudgetRefused, PhraseSyntaxError, PrimeTriple
from .hdt import HomotopyDataTriple, classify_diagonal, prime_factorize
from .rewrite import Decision, SearchBudget, decide_equal, decide_reducible, normal_form_empty_S
from .textio import parse_phrase, parse_triple, render_phrase, render_triple

EXIT_ERROR = 3
EXIT_REFUSED = 4
DEFAULT_MAX_RANK = 5
INVARIANT_NAMES = ("parity", "linking", "v", "u", "so", "fingerprint")


# -- census --------------------------------------------------------------

def gauss_words(rank: int) -> Iterator[tuple]:
    """Canonical Gauss words of a rank: letters 0..rank-1 numbered by first occurrence."""
    n = 2 * rank

    def rec(word, nxt, open_letters):
        if len(word) == n:
            yield tuple(word)
            return
        remaining = n - len(word)
        if nxt < rank and remaining > len(open_letters):
            yield from rec(word + [nxt], nxt + 1, open_letters | {nxt})
        for x in sorted(open_letters):
            yield from rec(word + [x], nxt, open_letters - {x})

    yield from rec([], 0, frozenset())


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    """Cut points splitting ``total`` items into ``parts`` possibly empty runs."""
    for cuts in itertools.combinations_with_replacement(range(total + 1), parts - 1):
        yield (0, *cuts, total)


def enumerate_phrases(triple: HomotopyDataTriple, rank: int, components: int) -> Iterator[Nanophrase]:
    """Every Gauss phrase of the given shape with every projection, once each up to isomorphism."""
    names = [f"X{k + 1}" for k in range(rank)]
    for word in gauss_words(rank):
        for cut in _compositions(2 * rank, components):
            comps = [[names[x] for x in word[cut[m]:cut[m + 1]]] for m in range(components)]
            for labels in itertools.product(triple.alpha, repeat=rank):
                yield Nanophrase(comps, dict(zip(names, labels)), check=False)


@dataclass
class CensusClass:
    representative: Nanophrase
    fingerprint: str
    members: list = field(default_factory=list)
    unresolved: bool = False

    @property
    def min_rank(self) -> int:
        return min(m.rank for m in self.members)


def tabulate(triple: HomotopyDataTriple, max_rank: int, components: int = 1,
             budget: SearchBudget | None = None, *, force: bool = False) -> list[CensusClass]:
    """Enumerate phrases up to ``max_rank`` and group them into homotopy classes.

    Classes are merged only on a certified Yes; a class whose comparison with
    some same-fingerprint class came back Unknown is marked ``unresolved``.
    """
    if max_rank > DEFAULT_MAX_RANK and not force:
        raise BudgetRefused(f"max rank {max_rank} exceeds {DEFAULT_MAX_RANK}; pass force")
    if max_rank < 0 or components < 1:
        raise ValueError("max rank must be >= 0 and components >= 1")
    budget = budget or SearchBudget()
    exact_key = _exact_class_key(triple, budget)
    seen = set()
    buckets: dict[str, list[CensusClass]] = {}
    by_key: dict = {}
    for rank in range(max_rank + 1):
        for p in enumerate_phrases(triple, rank, components):
            key = canonical_key(p)
            if key in seen:
                continue
            seen.add(key)
            fp = inv.fingerprint(p, triple)
            cls = None
            if exact_key is not None:
                ck = exact_key(p)
                cls = by_key.get(ck)
                if cls is None:
                    cls = by_key[ck] = CensusClass(p, fp)
                    buckets.setdefault(fp, []).append(cls)
            else:
                undecided = False
                for cand in buckets.get(fp, []):
                    dec = decide_equal(cand.representative, p, triple, budget)
                    if dec.is_yes:
                        cls = cand
                        break
                    if dec.is_unknown:
                        undecided = True
                        cand.unresolved = True
                if cls is None:
                    cls = CensusClass(p, fp, unresolved=undecided)
                    buckets.setdefault(fp, []).append(cls)
            cls.members.append(p)
    classes = [c for group in buckets.values() for c in group]
    for c in classes:
        c.representative = min(c.members, key=lambda m: (m.rank, render_phrase(pretty(m))))
    classes.sort(key=lambda c: (c.min_rank, render_phrase(pretty(c.representative))))
    return classes


def _exact_class_key(triple: HomotopyDataTriple, budget: SearchBudget):
    if not triple.s:
        return lambda p: canonical_key(normal_form_empty_S(p, triple))
    fac = prime_factorize(triple)
    if fac.k > 1 and all(not f.s for f in fac.factors):
        def key(p):
            k = same_class_key(complete_invariant(p, triple, budget))
            return k if k is not None else ("raw", canonical_key(p))
        return key
    return None


# -- input helpers -------------------------------------------------------

def _read_arg(value: str) -> str:
    if os.path.isfile(value):
        with open(value, encoding="utf-8") as fh:
            return fh.read()
    return value


def _load_triple(args) -> HomotopyDataTriple:
    if not args.triple:
        raise PhraseSyntaxError("a triple is required (-t/--triple)")
    return parse_triple(_read_arg(args.triple))


def _load_phrases(args, triple: HomotopyDataTriple) -> list[Nanophrase]:
    if not args.phrase:
        raise PhraseSyntaxError("at least one phrase is required (-p/--phrase)")
    out = []
    for raw in args.phrase:
        if os.path.isfile(raw):
            texts = [ln.split("#", 1)[0].strip() for ln in _read_arg(raw).splitlines()]
            texts = [t for t in texts if t]
        else:
            texts = [raw]
        for text in texts:
            out.append(parse_phrase(text, tokens=args.tokens or None, multi=False,
                                    alpha=triple.alpha))
    return out


def _budget(args) -> SearchBudget:
    return SearchBudget(args.rank_delta, args.node_budget)


def _emit(args, human: Sequence[str], lines: Sequence[str]):
    for ln in (lines if args.format == "lines" else human):
        print(ln)


# -- commands ------------------------------------------------------------

def cmd_factor(args) -> int:
    triple = _load_triple(args)
    fac = prime_factorize(triple)
    human = [f"{fac.k} prime factor{'s' if fac.k != 1 else ''}"]
    lines = [f"factors\t{fac.k}"]
    for i, f in enumerate(fac.factors, 1):
        kind = classify_diagonal(f) if f.is_diagonal else None
        tag = f"  (isomorphic to alpha_{kind})" if kind else ""
        human.append(f"[{i}] {render_triple(f, inline=True)}{tag}")
        lines.append(f"factor\t{i}\t{render_triple(f, inline=True)}\t{kind or '-'}")
    _emit(args, human, lines)
    return 0


def _invariant_lines(p: Nanophrase, triple: HomotopyDataTriple, which: Sequence[str]) -> list[str]:
    out = []
    for name in which:
        if name == "parity":
            out.append("parity: " + " ".join(map(str, (len(c) % 2 for c in p.components))))
        elif name == "linking":
            out.append("linking:")
            out.extend("  " + " ".join(row) for row in inv.linking_matrix(p, triple).as_strings())
        elif name == "v":
            out.append("V:")
            out.extend("  " + r for r in inv.v_invariant(p, triple).render() or ["0"])
        elif name == "u":
            out.append("U:")
            out.extend("  " + r for r in inv.u_invariant(p, triple).render() or ["0"])
        elif name == "so":
            out.append("S_o:")
            out.extend("  " + r for r in inv.fukunaga_so(p, triple).render() or ["0"])
        elif name == "fingerprint":
            out.append("fingerprint: " + inv.fingerprint(p, triple))
    return out


def cmd_invariants(args) -> int:
    triple = _load_triple(args)
    if args.which:
        which = [w.strip().lower() for w in args.which.split(",") if w.strip()]
        bad = [w for w in which if w not in INVARIANT_NAMES]
        if bad:
            raise PhraseSyntaxError(f"unknown invariant(s) {bad}; choose from {INVARIANT_NAMES}")
    else:
        which = ["parity", "linking", "v"] + (["u"] if triple.is_diagonal else [])
    for p in _load_phrases(args, triple):
        body = _invariant_lines(p, triple, which)
        if args.format == "lines":
            print(f"phrase\t{render_phrase(p)}")
            print("\n".join(f"\t{ln.strip()}" for ln in body))
        else:
            print(render_phrase(p))
            print("\n".join("  " + ln for ln in body))
    return 0


def cmd_decompose(args) -> int:
    triple = _load_triple(args)
    fac = prime_factorize(triple)
    for p in _load_phrases(args, triple):
        d = psi(p, fac)
        th = " ".join(str(t + 1) for t in d.theta)
        body = d.render().rsplit("  theta=", 1)[0]
        _emit(args, [f"{render_phrase(p)}  ->  {body}   theta = ({th})"],
              [f"{render_phrase(p)}\t{body}\t{th}"])
    return 0


def cmd_reduce(args) -> int:
    triple = _load_triple(args)
    code = 0
    for p in _load_phrases(args, triple):
        rc = complete_invariant(p, triple, _budget(args))
        if args.format == "lines":
            print(rc.to_text())
        else:
            print(f"# {render_phrase(p)}")
            print(rc.to_text())
            if len(rc.trace) > 1:
                print("# steps:")
                for d in rc.trace:
                    print(f"#   {d.render()}")
        if not rc.certified:
            code = 2
    return code


def _report(args, dec: Decision, header: str) -> int:
    human = [f"{header}: {dec.verdict}"]
    lines = [f"verdict\t{dec.verdict}"]
    if dec.is_yes:
        for n, (site, ph) in enumerate(dec.witness, 1):
            human.append(f"  {n}. {site.describe()}  ->  {render_phrase(ph)}")
            lines.append(f"move\t{site.describe()}\t{render_phrase(ph)}")
        for sub in dec.certificate:
            if isinstance(sub, Decision):
                human.append(f"  factor: {sub.verdict} ({sub.detail})")
                lines.append(f"factor\t{sub.verdict}")
        if not dec.witness and dec.detail:
            human.append(f"  {dec.detail}")
    elif dec.is_no:
        human.append(f"  obstruction: {dec.obstruction.describe()}")
        lines.append(f"obstruction\t{dec.obstruction.invariant}\t{dec.obstruction.left}\t"
                     f"{dec.obstruction.right}")
    else:
        human.append(f"  {dec.detail}")
        lines.append(f"detail\t{dec.detail}")
    _emit(args, human, lines)
    return dec.exit_code


def cmd_decide(args) -> int:
    triple = _load_triple(args)
    phrases = _load_phrases(args, triple)
    budget = _budget(args)
    if args.component is not None:
        if len(phrases) != 1:
            raise PhraseSyntaxError("reducibility takes exactly one phrase")
        dec = decide_reducible(phrases[0], args.component - 1, triple, budget)
        return _report(args, dec, f"component {args.component} reducible")
    if len(phrases) == 1:
        phrases.append(Nanophrase([()] * phrases[0].nc, {}))
    if len(phrases) != 2:
        raise PhraseSyntaxError("decide takes two phrases (or one, compared with the trivial phrase)")
    dec = decide_equal(phrases[0], phrases[1], triple, budget, method=args.method)
    return _report(args, dec, "homotopic")


def cmd_tabulate(args) -> int:
    triple = _load_triple(args)
    max_rank = DEFAULT_MAX_RANK if args.max_rank is None else args.max_rank
    classes = tabulate(triple, max_rank, args.components, _budget(args), force=args.force)
    for n, c in enumerate(classes, 1):
        flag = "unresolved" if c.unresolved else "certified"
        rep = render_phrase(pretty(c.representative))
        if args.format == "lines":
            print(f"class\t{n}\t{rep}\t{len(c.members)}\t{c.min_rank}\t{flag}\t{c.fingerprint}")
        else:
            print(f"{n:4d}  min rank {c.min_rank}  members {len(c.members):4d}  {flag:10s}  {rep}")
    if args.format != "lines":
        print(f"{len(classes)} classes, {sum(len(c.members) for c in classes)} phrases")
    return 2 if any(c.unresolved for c in classes) else 0


# -- parser --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 3 so that 2 keeps meaning Unknown."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-t", "--triple", help="triple file or inline text")
    common.add_argument("-p", "--phrase", action="append", default=[],
                        help="phrase file (one per line) or inline phrase; repeatable")
    common.add_argument("--tokens", action="store_true",
                        help="read phrase bodies as whitespace-separated letters")
    common.add_argument("--rank-delta", type=int, default=2)
    common.add_argument("--node-budget", type=int, default=200_000)
    common.add_argument("--format", choices=("human", "lines"), default="human")

    parser = _Parser(prog="nanophrase", description="Homotopy of nanowords and nanophrases.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("factor", parents=[common], help="prime factors of a triple")
    p = sub.add_parser("invariants", parents=[common], help="compute invariants")
    p.add_argument("--which", help=f"comma list from {', '.join(INVARIANT_NAMES)}")
    sub.add_parser("decompose", parents=[common], help="split by prime factor")
    sub.add_parser("reduce", parents=[common], help="reduced class (composite triples)")
    p = sub.add_parser("decide", parents=[common], help="homotopy or reducibility")
    p.add_argument("--component", type=int, help="1-based component: decide reducibility")
    p.add_argument("--method", default="auto",
                   choices=("auto", "normal-form", "decompose", "search"))
    p = sub.add_parser("tabulate", parents=[common], help="census of small phrases")
    p.add_argument("--max-rank", type=int)
    p.add_argument("--components", type=int, default=1)
    p.add_argument("--force", action="store_true", help=f"allow max rank above {DEFAULT_MAX_RANK}")
    return parser


COMMANDS = {
    "factor": cmd_factor,
    "invariants": cmd_invariants,
    "decompose": cmd_decompose,
    "reduce": cmd_reduce,
    "decide": cmd_decide,
    "tabulate": cmd_tabulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.rank_delta < 0 or args.node_budget < 0:
            raise PhraseSyntaxError("budgets must be non-negative")
        return COMMANDS[args.command](args)
    except (BudgetRefused, PrimeTriple) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
