"""Nanophrases and nanomultiphrases over an alpha-alphabet.

A nanophrase is a sequence of words (components) in which every letter
occurs exactly twice, together with a projection sending each letter to a
symbol of alpha.  Letters are opaque strings; symbols are strings too.

All values are immutable.  Component indices are 0-based throughout the
Python API.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import IndexOutOfRange, NonGauss, UnknownSymbol

Word = tuple  # tuple[str, ...]


class Nanophrase:
    """An n-component Gauss phrase with a projection into alpha.

    ``Nanophrase([], {})`` is the 0-component phrase; ``Nanophrase([()], {})``
    has a single empty component.  The two are distinct values.
    """

    __slots__ = ("components", "projection", "_occ", "_hash")

    def __init__(self, components: Iterable[Sequence[str]],
                 projection: Mapping[str, str], *, check: bool = True):
        comps = tuple(tuple(c) for c in components)
        occ: dict[str, list] = {}
        for ci, comp in enumerate(comps):
            for k, x in enumerate(comp):
                occ.setdefault(x, []).append((ci, k))
        if check:
            bad = sorted(x for x, o in occ.items() if len(o) != 2)
            if bad:
                counts = ", ".join(f"{x} occurs {len(occ[x])}" for x in bad)
                raise NonGauss(f"not a Gauss phrase: {counts}")
            missing = sorted(x for x in occ if x not in projection)
            if missing:
                raise UnknownSymbol(f"no projection for letters {missing}")
        self.components = comps
        self.projection = {x: projection[x] for x in occ}
        self._occ = {x: tuple(o) for x, o in occ.items()}
        self._hash = None

    # -- basic accessors -------------------------------------------------

    @property
    def nc(self) -> int:
        return len(self.components)

    @property
    def rank(self) -> int:
        return len(self._occ)

    def letters(self) -> list[str]:
        """Letters in order of first occurrence."""
        return list(self._occ)

    def occurrences(self, letter: str):
        """The two positions ``(component, index)`` of ``letter``, in order."""
        return self._occ[letter]

    def empty_components(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.components) if not c)

    def symbol(self, letter: str) -> str:
        return self.projection[letter]

    def is_nanoword(self) -> bool:
        return self.nc == 1

    # -- value semantics -------------------------------------------------

    def _key(self):
        return self.components, frozenset(self.projection.items())

    def __eq__(self, other):
        if not isinstance(other, Nanophrase):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        from .textio import render_phrase
        return f"Nanophrase({render_phrase(self)!r})"


def empty_phrase() -> Nanophrase:
    """The 0-component nanophrase."""
    return Nanophrase((), {})


def nanoword(word: Sequence[str], projection: Mapping[str, str]) -> Nanophrase:
    """A nanoword, represented as a 1-component nanophrase."""
    return Nanophrase((tuple(word),), projection)


class Nanomultiphrase:
    """A sequence of phrases sharing one letter namespace and projection.

    Stored as its flattening (the phrase obtained by concatenating the
    phrases) plus the number of components in each phrase.
    """

    __slots__ = ("flat", "groups")

    def __init__(self, phrases: Iterable[Iterable[Sequence[str]]],
                 projection: Mapping[str, str], *, check: bool = True):
        phrases = [tuple(tuple(w) for w in ph) for ph in phrases]
        comps = [w for ph in phrases for w in ph]
        self.flat = Nanophrase(comps, projection, check=check)
        self.groups = tuple(len(ph) for ph in phrases)

    @classmethod
    def from_flat(cls, flat: Nanophrase, groups: Sequence[int]) -> "Nanomultiphrase":
        if sum(groups) != flat.nc or any(g < 0 for g in groups):
            raise ValueError("group sizes do not match the flattened phrase")
        m = cls.__new__(cls)
        m.flat = flat
        m.groups = tuple(groups)
        return m

    @property
    def projection(self):
        return self.flat.projection

    @property
    def phrases(self) -> tuple:
        out, start = [], 0
        for g in self.groups:
            out.append(self.flat.components[start:start + g])
            start += g
        return tuple(out)

    @property
    def nc(self) -> int:
        return self.flat.nc

    @property
    def rank(self) -> int:
        return self.flat.rank

    def phrase(self, j: int) -> Nanophrase:
        """Phrase ``j`` alone; letters shared with other phrases appear once."""
        comps = self.phrases[j]
        return Nanophrase(comps, self.projection, check=False)

    def __eq__(self, other):
        if not isinstance(other, Nanomultiphrase):
            return NotImplemented
        return self.groups == other.groups and self.flat == other.flat

    def __hash__(self):
        return hash((self.groups, self.flat))

    def __repr__(self):
        from .textio import render_multiphrase
        return f"Nanomultiphrase({render_multiphrase(self)!r})"


# -- canonical forms -----------------------------------------------------

def canonical_key(p: Nanophrase) -> tuple:
    """Hashable key identifying ``p`` up to isomorphism of alpha-alphabets.

    Letters are numbered by first occurrence; the key records the numbered
    components and the symbol of each number.
    """
    index: dict[str, int] = {}
    symbols = []
    comps = []
    for comp in p.components:
        row = []
        for x in comp:
            k = index.get(x)
            if k is None:
                k = index[x] = len(index)
                symbols.append(p.projection[x])
            row.append(k)
        comps.append(tuple(row))
    return tuple(comps), tuple(symbols)


def from_canonical_key(key: tuple) -> Nanophrase:
    comps, symbols = key
    names = [f"X{k + 1}" for k in range(len(symbols))]
    return Nanophrase(
        [[names[k] for k in row] for row in comps],
        dict(zip(names, symbols)),
        check=False,
    )


def canonicalize(p: Nanophrase) -> Nanophrase:
    """Rename letters ``X1, X2, ...`` in order of first occurrence."""
    return from_canonical_key(canonical_key(p))


def relabel(p: Nanophrase, mapping: Mapping[str, str]) -> Nanophrase:
    """Rename letters by ``mapping`` (letters not in it keep their names)."""
    comps = [[mapping.get(x, x) for x in c] for c in p.components]
    proj = {mapping.get(x, x): s for x, s in p.projection.items()}
    return Nanophrase(comps, proj)


def is_isomorphic(p: Nanophrase, q: Nanophrase) -> bool:
    return canonical_key(p) == canonical_key(q)


def pretty(p: Nanophrase) -> Nanophrase:
    """Canonical relabeling with single uppercase letters when rank <= 26."""
    if p.rank > 26:
        return canonicalize(p)
    names = {x: chr(ord("A") + k) for k, x in enumerate(p.letters())}
    return relabel(p, names)


# -- structural maps -----------------------------------------------------

def chi(m):
    """Concatenating map.

    On a nanophrase, concatenate its components into a nanoword (the
    0-component phrase goes to the empty word).  On a nanomultiphrase,
    concatenate the components of each phrase, giving one component per
    phrase.
    """
    if isinstance(m, Nanomultiphrase):
        comps = [tuple(x for w in ph for x in w) for ph in m.phrases]
        return Nanophrase(comps, m.projection, check=False)
    word = tuple(x for w in m.components for x in w)
    return Nanophrase((word,), m.projection, check=False)


def _check_indices(p: Nanophrase, indices):
    indices = frozenset(indices)
    for i in indices:
        if not 0 <= i < p.nc:
            raise IndexOutOfRange(f"component index {i} out of range for {p.nc} components")
    return indices


def delete_letters(p: Nanophrase, letters) -> Nanophrase:
    letters = set(letters)
    comps = [[x for x in c if x not in letters] for c in p.components]
    return Nanophrase(comps, p.projection, check=False)


def project_out(p: Nanophrase, indices, mode: str = "keep") -> Nanophrase:
    """Delete letters touching the given components, or drop the components.

    ``mode="keep"``: remove every letter with at least one occurrence in a
    component listed in ``indices``; the arity is unchanged.
    ``mode="drop"``: delete the listed components outright (their letters,
    wherever they occur, go with them so the result stays Gauss).
    """
    indices = _check_indices(p, indices)
    doomed = {x for i in indices for x in p.components[i]}
    if mode == "keep":
        return delete_letters(p, doomed)
    if mode == "drop":
        comps = [[x for x in c if x not in doomed]
                 for i, c in enumerate(p.components) if i not in indices]
        return Nanophrase(comps, p.projection, check=False)
    raise ValueError(f"unknown mode {mode!r}")


def subphrase(p: Nanophrase, keep) -> Nanophrase:
    """Keep only the listed components (in order), dropping the rest."""
    keep = _check_indices(p, keep)
    return project_out(p, set(range(p.nc)) - keep, "drop")


def component_word(p: Nanophrase, i: int) -> Nanophrase:
    """The nanoword made of component ``i`` with letters shared elsewhere removed."""
    return subphrase(p, {i})


def opposite(p: Nanophrase) -> Nanophrase:
    comps = [tuple(reversed(c)) for c in reversed(p.components)]
    return Nanophrase(comps, p.projection, check=False)


def inverse(p: Nanophrase, tau: Mapping[str, str]) -> Nanophrase:
    proj = {x: tau[s] for x, s in p.projection.items()}
    return Nanophrase(p.components, proj, check=False)


def opposite_inverse(p: Nanophrase, triple, which: str) -> Nanophrase:
    if which == "opposite":
        return opposite(p)
    if which == "inverse":
        return inverse(p, triple.tau)
    raise ValueError(f"unknown operation {which!r}")


def component_parities(p: Nanophrase) -> tuple:
    return tuple(len(c) % 2 for c in p.components)


def concat_phrases(*phrases: Nanophrase) -> Nanophrase:
    """Phrase concatenation ``p1|p2``; letter sets must be disjoint."""
    comps, proj = [], {}
    for q in phrases:
        comps.extend(q.components)
        proj.update(q.projection)
    return Nanophrase(comps, proj)
