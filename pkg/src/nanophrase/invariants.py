"""Homotopy invariants of nanophrases.

The group pi is the abelian group generated by alpha subject to
``a * tau(a) = 1``.  Writing each element over an orientation (the first
declared symbol of every tau-orbit) gives an exponent vector with integer
entries on free orbits and mod-2 entries on fixed orbits.

Provided here: component parities (re-exported from :mod:`core`), the
linking matrix, the V and U invariants, Fukunaga's S_o together with the
translation maps between S_o and U, the push-forward U -> V, and the
realizability test for U.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import Nanophrase, component_parities
from .errors import (MalformedSupport, MixedTriple, PhraseSyntaxError, SNotDiagonal,
                     UnknownSymbol)
from .hdt import HomotopyDataTriple

__all__ = [
    "PiGroup", "PiElement", "LinkingMatrix", "VMap", "UMap", "SoMap",
    "component_parities", "linking_matrix", "v_invariant", "u_invariant",
    "u_to_v", "u_realizability_check", "fukunaga_so", "convert_so_u",
    "h_map", "kappa_map", "fingerprint",
]


# -- the group pi --------------------------------------------------------

class PiGroup:
    """Exponent-vector model of pi for one triple."""

    __slots__ = ("reps", "fixed", "_sym")

    def __init__(self, triple: HomotopyDataTriple):
        reps, fixed, sym = [], [], {}
        for k, orbit in enumerate(triple.orbits()):
            reps.append(orbit[0])
            fixed.append(len(orbit) == 1)
            sym[orbit[0]] = (k, 1)
            if len(orbit) == 2:
                sym[orbit[1]] = (k, -1)
        self.reps = tuple(reps)
        self.fixed = tuple(fixed)
        self._sym = sym

    def __eq__(self, other):
        return isinstance(other, PiGroup) and (self.reps, self.fixed, self._sym) == (
            other.reps, other.fixed, other._sym)

    def __hash__(self):
        return hash((self.reps, self.fixed))

    def __repr__(self):
        return f"PiGroup({' '.join(self.reps)})"

    @property
    def rank(self) -> int:
        return len(self.reps)

    def orbit_of(self, symbol: str) -> tuple[int, int]:
        """(orbit index, +1 for the representative, -1 for its tau-image)."""
        return self._sym[symbol]

    def normalize(self, exps: Iterable[int]) -> tuple:
        return tuple(e % 2 if f else e for e, f in zip(exps, self.fixed))

    def element(self, exps: Iterable[int]) -> "PiElement":
        exps = tuple(exps)
        if len(exps) != len(self.reps):
            raise ValueError("wrong number of exponents")
        return PiElement(self, self.normalize(exps))

    def identity(self) -> "PiElement":
        return PiElement(self, (0,) * len(self.reps))

    def gen(self, symbol: str) -> "PiElement":
        k, sign = self._sym[symbol]
        exps = [0] * len(self.reps)
        exps[k] = sign
        return self.element(exps)

    def product(self, symbols: Iterable[str]) -> "PiElement":
        exps = [0] * len(self.reps)
        for s in symbols:
            k, sign = self._sym[s]
            exps[k] += sign
        return self.element(exps)

    def parse(self, text: str) -> "PiElement":
        """Inverse of ``str(PiElement)``: ``1`` or ``a^2*c^-1``."""
        text = text.strip()
        exps = [0] * len(self.reps)
        if text == "1":
            return self.element(exps)
        for factor in text.split("*"):
            sym, _, power = factor.strip().partition("^")
            if sym not in self._sym:
                raise PhraseSyntaxError(f"unknown group generator {sym!r}")
            k, sign = self._sym[sym]
            exps[k] += sign * (int(power) if power else 1)
        return self.element(exps)


@dataclass(frozen=True)
class PiElement:
    group: PiGroup = field(compare=False, repr=False)
    exps: tuple

    def _check(self, other: "PiElement"):
        if self.group != other.group:
            raise MixedTriple("pi elements over different triples")

    def __eq__(self, other):
        if not isinstance(other, PiElement):
            return NotImplemented
        return self.exps == other.exps and self.group == other.group

    def __hash__(self):
        return hash(self.exps)

    def __lt__(self, other: "PiElement"):
        return self.exps < other.exps

    def __mul__(self, other: "PiElement") -> "PiElement":
        self._check(other)
        return self.group.element(a + b for a, b in zip(self.exps, other.exps))

    def inverse(self) -> "PiElement":
        return self.group.element(-e for e in self.exps)

    def __pow__(self, k: int) -> "PiElement":
        return self.group.element(e * k for e in self.exps)

    @property
    def is_identity(self) -> bool:
        return not any(self.exps)

    def x(self) -> int:
        """Exponent sum mod 2."""
        return sum(self.exps) % 2

    def gamma(self, rep: str) -> int:
        return self.exps[self.group.reps.index(rep)]

    def __str__(self):
        parts = []
        for rep, e in zip(self.group.reps, self.exps):
            if e == 1:
                parts.append(rep)
            elif e:
                parts.append(f"{rep}^{e}")
        return "*".join(parts) if parts else "1"

    def __repr__(self):
        return f"PiElement({self})"


def render_vector(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


# -- linking matrix ------------------------------------------------------

@dataclass(frozen=True)
class LinkingMatrix:
    rows: tuple  # tuple of tuples of PiElement

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def is_trivial(self) -> bool:
        return all(g.is_identity for row in self.rows for g in row)

    def row_trivial(self, i: int) -> bool:
        return all(g.is_identity for g in self.rows[i])

    def as_strings(self) -> list[list[str]]:
        return [[str(g) for g in row] for row in self.rows]

    def render(self) -> str:
        return "\n".join(" ".join(r) for r in self.as_strings())


def _validate(p: Nanophrase, triple: HomotopyDataTriple):
    for x, s in p.projection.items():
        if s not in triple:
            raise UnknownSymbol(f"letter {x} projects to {s!r}, not in alpha")


def linking_matrix(p: Nanophrase, triple: HomotopyDataTriple) -> LinkingMatrix:
    _validate(p, triple)
    g = PiGroup(triple)
    n = p.nc
    syms = [[[] for _ in range(n)] for _ in range(n)]
    for x in p.letters():
        (c1, _), (c2, _) = p.occurrences(x)
        if c1 != c2:
            syms[c1][c2].append(p.projection[x])
            syms[c2][c1].append(p.projection[x])
    rows = tuple(tuple(g.identity() if i == j else g.product(syms[i][j]) for j in range(n))
                 for i in range(n))
    return LinkingMatrix(rows)


# -- V and U -------------------------------------------------------------

@dataclass(frozen=True)
class _OrbitMap:
    """Finite-support maps indexed by (component, orientation symbol).

    ``data[(i, a)]`` is a dict vector -> nonzero value; values for fixed
    orbits live in {0, 1}.  The value at ``tau(a)`` is the negation.
    """

    group: PiGroup = field(compare=False)
    n: int
    data: Mapping

    def value(self, i: int, a: str, v) -> int:
        k, sign = self.group.orbit_of(a)
        rep = self.group.reps[k]
        val = self.data.get((i, rep), {}).get(tuple(v), 0)
        if sign < 0:
            val = -val
        return val

    def support(self, i: int, a: str) -> dict:
        k, sign = self.group.orbit_of(a)
        d = self.data.get((i, self.group.reps[k]), {})
        return {v: (x if sign > 0 else -x) for v, x in d.items()}

    def is_zero(self) -> bool:
        return not self.data

    def component_zero(self, i: int) -> bool:
        return not any(key[0] == i for key in self.data)

    def items(self):
        """Entries sorted by (component, orbit position, vector rendering)."""
        out = []
        for (i, a), d in self.data.items():
            for v, val in d.items():
                out.append((i, a, v, val))
        pos = {a: k for k, a in enumerate(self.group.reps)}
        out.sort(key=lambda t: (t[0], pos[t[1]], render_vector(t[2])))
        return out

    def render(self) -> list[str]:
        name = type(self).__name__[0]
        return [f"{name}^{{{i + 1},{a}}}{render_vector(v)} = {val}"
                for i, a, v, val in self.items()]


class VMap(_OrbitMap):
    """V invariant; vectors are tuples in (Z/2)^n."""


class UMap(_OrbitMap):
    """U invariant; vectors are tuples of :class:`PiElement`."""


def _finish(group: PiGroup, counts: dict) -> dict:
    data: dict = defaultdict(dict)
    for (i, k, v), c in counts.items():
        if group.fixed[k]:
            c %= 2
        if c:
            data[(i, group.reps[k])][v] = c
    return dict(data)


def _inside(p: Nanophrase, x: str):
    """Component and interior slice of a letter with both occurrences in one component."""
    (c1, k1), (c2, k2) = p.occurrences(x)
    if c1 != c2:
        return None
    return c1, k1, k2


def v_invariant(p: Nanophrase, triple: HomotopyDataTriple) -> VMap:
    _validate(p, triple)
    g = PiGroup(triple)
    counts: dict = defaultdict(int)
    for x in p.letters():
        if _inside(p, x) is None:
            continue
        vec = lk_vector(p, x)
        if not any(vec):
            continue
        k, sign = g.orbit_of(p.projection[x])
        counts[(_inside(p, x)[0], k, vec)] += sign
    return VMap(g, p.nc, _finish(g, counts))


def _lu_vector(p: Nanophrase, g: PiGroup, x: str):
    loc = _inside(p, x)
    if loc is None:
        return None
    i, k1, k2 = loc
    exps = [[0] * g.rank for _ in range(p.nc)]
    for k in range(k1 + 1, k2):
        y = p.components[i][k]
        other = [o for o in p.occurrences(y) if o != (i, k)][0]
        c, m = other
        if c == i and k1 < m < k2:
            continue
        orb, sign = g.orbit_of(p.projection[y])
        if c == i and m < k1:
            sign = -sign
        exps[c][orb] += sign
    return i, tuple(g.element(e) for e in exps)


def lu_vector(p: Nanophrase, triple: HomotopyDataTriple, letter: str) -> tuple:
    """The pi-valued linking vector of a letter with both occurrences in one component."""
    res = _lu_vector(p, PiGroup(triple), letter)
    if res is None:
        raise ValueError(f"letter {letter} is not contained in a single component")
    return res[1]


def lk_vector(p: Nanophrase, letter: str) -> tuple:
    """The mod-2 linking vector used by V."""
    loc = _inside(p, letter)
    if loc is None:
        raise ValueError(f"letter {letter} is not contained in a single component")
    i, k1, k2 = loc
    vec = [0] * p.nc
    for k in range(k1 + 1, k2):
        y = p.components[i][k]
        c, m = [o for o in p.occurrences(y) if o != (i, k)][0]
        if c == i and k1 < m < k2:
            continue
        vec[c] ^= 1
    return tuple(vec)


def _require_diagonal(triple: HomotopyDataTriple):
    if not triple.is_diagonal:
        raise SNotDiagonal("this invariant is defined only for diagonal S")


def u_invariant(p: Nanophrase, triple: HomotopyDataTriple) -> UMap:
    _require_diagonal(triple)
    _validate(p, triple)
    g = PiGroup(triple)
    counts: dict = defaultdict(int)
    for x in p.letters():
        res = _lu_vector(p, g, x)
        if res is None:
            continue
        i, vec = res
        if all(e.is_identity for e in vec):
            continue
        k, sign = g.orbit_of(p.projection[x])
        counts[(i, k, vec)] += sign
    return UMap(g, p.nc, _finish(g, counts))


def u_to_v(u: UMap) -> VMap:
    g = u.group
    counts: dict = defaultdict(int)
    for (i, a), d in u.data.items():
        k = g.reps.index(a)
        for v, val in d.items():
            xv = tuple(e.x() for e in v)
            if any(xv):
                counts[(i, k, xv)] += val
    return VMap(g, u.n, _finish(g, counts))


def _delta(u: UMap, i: int, a: str, b: str, modulo: bool) -> int:
    total = 0
    for v, val in u.data.get((i, b), {}).items():
        total += val * v[i].gamma(a)
    return total % 2 if modulo else total


def u_realizability_check(u: UMap) -> bool:
    g = u.group
    reps = g.reps
    fixed = dict(zip(reps, g.fixed))
    for i in range(u.n):
        for a in reps:
            if _delta(u, i, a, a, fixed[a]) != 0:
                return False
            for b in reps:
                mod = fixed[a] or fixed[b]
                s = _delta(u, i, a, b, mod) + _delta(u, i, b, a, mod)
                if (s % 2 if mod else s) != 0:
                    return False
    return True


# -- Fukunaga's S_o ------------------------------------------------------

class _Lattice:
    """Block lattice K = prod K_{s,t} over orbits listed free-first.

    A column (s, t) is integral when orbit t is free and mod 2 otherwise.
    """

    def __init__(self, group: PiGroup):
        free = [k for k in range(group.rank) if not group.fixed[k]]
        fixed = [k for k in range(group.rank) if group.fixed[k]]
        self.order = free + fixed          # lattice orbit index -> group index
        self.pos = {k: s for s, k in enumerate(self.order)}
        self.nfree = len(free)
        self.size = len(self.order)
        self.group = group

    def width(self) -> int:
        return self.size * self.size

    def col(self, s: int, t: int) -> int:
        return s * self.size + t

    def normalize(self, row: list) -> tuple:
        out = list(row)
        for s in range(self.size):
            for t in range(self.nfree, self.size):
                out[self.col(s, t)] %= 2
        return tuple(out)

    def block_of(self, vec) -> int | None:
        """The unique s carrying all nonzero entries, or None (mixed or zero)."""
        found = None
        for row in vec:
            for c, val in enumerate(row):
                if val:
                    s = c // self.size
                    if found is None:
                        found = s
                    elif found != s:
                        return None
        return found

    def vector_type(self, vec) -> int:
        ss = {c // self.size for row in vec for c, val in enumerate(row) if val}
        if all(s < self.nfree for s in ss):
            return 1
        if all(s >= self.nfree for s in ss):
            return 2
        return 3


@dataclass(frozen=True)
class SoMap:
    """``data[i]`` maps nonzero K^n vectors (tuples of row tuples) to values."""

    group: PiGroup = field(compare=False)
    n: int
    data: Mapping

    def value(self, i: int, v) -> int:
        return self.data.get(i, {}).get(tuple(tuple(r) for r in v), 0)

    def is_zero(self) -> bool:
        return not any(self.data.values())

    def items(self):
        out = [(i, v, val) for i, d in self.data.items() for v, val in d.items()]
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def render(self) -> list[str]:
        return [f"B_{i + 1}({'; '.join(render_vector(r) for r in v)}) = {val}"
                for i, v, val in self.items()]


def _n_sign(a1, a2, b1, b2) -> int:
    if a1 < b1 < a2 < b2:
        return 1
    if b1 < a1 < b2 < a2:
        return -1
    return 0


def fukunaga_so(p: Nanophrase, triple: HomotopyDataTriple) -> SoMap:
    _require_diagonal(triple)
    _validate(p, triple)
    g = PiGroup(triple)
    lat = _Lattice(g)
    n = p.nc
    # global positions in the concatenated phrase
    offsets, total = [], 0
    for comp in p.components:
        offsets.append(total)
        total += len(comp)
    gpos = {x: tuple(offsets[c] + k for c, k in p.occurrences(x)) for x in p.letters()}

    def orbit(x):
        k, sign = g.orbit_of(p.projection[x])
        return lat.pos[k], sign

    counts: dict = defaultdict(int)
    for a in p.letters():
        loc = _inside(p, a)
        if loc is None:
            continue
        i = loc[0]
        s, eps = orbit(a)
        rows = [[0] * lat.width() for _ in range(n)]
        a1, a2 = gpos[a]
        for b in p.letters():
            if b == a:
                continue
            b1, b2 = gpos[b]
            nab = _n_sign(a1, a2, b1, b2)
            if not nab:
                continue
            t, bsign = orbit(b)
            (c1, _), (c2, _) = p.occurrences(b)
            # rep with n=1 at I_2, tau(rep) with n=-1 at I_1: +r; the other two: -r
            j = c2 if nab == 1 else c1
            rows[j][lat.col(s, t)] += nab * bsign
        vec = tuple(lat.normalize(r) for r in rows)
        if not any(any(r) for r in vec):
            continue
        counts[(i, vec)] += eps
    data: dict = defaultdict(dict)
    for (i, vec), c in counts.items():
        typ = lat.vector_type(vec)
        if typ == 2:
            c %= 2
        elif typ == 3:
            c = 0
        if c:
            data[i][vec] = c
    return SoMap(g, n, dict(data))


def h_map(group: PiGroup, a: str, i: int, v) -> tuple:
    """h_{a,i}: pi^n -> K^n (sign + for j >= i, - for j < i)."""
    lat = _Lattice(group)
    s = lat.pos[group.orbit_of(a)[0]]
    out = []
    for j, gj in enumerate(v):
        row = [0] * lat.width()
        sign = 1 if j >= i else -1
        for t in range(lat.size):
            row[lat.col(s, t)] = sign * gj.exps[lat.order[t]]
        out.append(lat.normalize(row))
    return tuple(out)


def kappa_map(group: PiGroup, i: int, v) -> tuple[str, tuple]:
    """kappa_i on a single-block vector; returns (a_r, vector in pi^n)."""
    lat = _Lattice(group)
    r = lat.block_of(v)
    if r is None:
        raise MalformedSupport("vector is zero or spans more than one orbit block")
    out = []
    for j, row in enumerate(v):
        exps = [0] * group.rank
        sign = 1 if j >= i else -1
        for t in range(lat.size):
            exps[lat.order[t]] = sign * row[lat.col(r, t)]
        out.append(group.element(exps))
    return group.reps[lat.order[r]], tuple(out)


def convert_so_u(direction: str, value):
    """``"u_to_so"`` maps a :class:`UMap` to a :class:`SoMap`; ``"so_to_u"`` the reverse."""
    if direction == "u_to_so":
        u: UMap = value
        data: dict = defaultdict(dict)
        for (i, a), d in u.data.items():
            for v, val in d.items():
                data[i][h_map(u.group, a, i, v)] = val
        return SoMap(u.group, u.n, dict(data))
    if direction == "so_to_u":
        so: SoMap = value
        g = so.group
        data: dict = defaultdict(dict)
        for i, d in so.data.items():
            for v, val in d.items():
                a, uv = kappa_map(g, i, v)
                data[(i, a)][uv] = val
        return UMap(g, so.n, dict(data))
    raise ValueError(f"unknown direction {direction!r}")


# -- fingerprints --------------------------------------------------------

def fingerprint(p: Nanophrase, triple: HomotopyDataTriple) -> str:
    """String key combining parities, linking matrix, V and (diagonal S) U."""
    parts = [
        "par:" + "".join(map(str, component_parities(p))),
        "lk:" + "/".join(",".join(r) for r in linking_matrix(p, triple).as_strings()),
        "V:" + ";".join(v_invariant(p, triple).render()),
    ]
    if triple.is_diagonal:
        parts.append("U:" + ";".join(u_invariant(p, triple).render()))
    return " ".join(parts)
