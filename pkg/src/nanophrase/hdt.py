"""Homotopy data triples (alpha, tau, S) and their prime factorization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyAlpha, InvalidTriple


class HomotopyDataTriple:
    """A finite set ``alpha`` (ordered by declaration), an involution ``tau``
    on it and a set ``s`` of ordered triples of symbols.
    """

    __slots__ = ("alpha", "tau", "s", "_index")

    def __init__(self, alpha: Sequence[str], tau: Mapping[str, str] | None = None,
                 s: Iterable[Sequence[str]] = ()):
        alpha = tuple(alpha)
        if len(set(alpha)) != len(alpha):
            raise InvalidTriple("alpha has repeated symbols")
        tau = dict(tau or {})
        # a pair listed once (a -> b) implies b -> a
        for a, b in list(tau.items()):
            tau.setdefault(b, a)
        for a in alpha:
            tau.setdefault(a, a)
        for a, b in tau.items():
            if a not in alpha or b not in alpha:
                raise InvalidTriple(f"tau maps outside alpha: {a} -> {b}")
            if tau[b] != a:
                raise InvalidTriple(f"tau is not an involution at {a}")
        s = frozenset(tuple(t) for t in s)
        for t in s:
            if len(t) != 3 or any(x not in tau for x in t):
                raise InvalidTriple(f"S element {t} is not a triple over alpha")
        self.alpha = alpha
        self.tau = tau
        self.s = s
        self._index = {a: k for k, a in enumerate(alpha)}

    @classmethod
    def diagonal(cls, alpha, tau=None):
        return cls(alpha, tau, [(a, a, a) for a in alpha])

    def __eq__(self, other):
        if not isinstance(other, HomotopyDataTriple):
            return NotImplemented
        return (self.alpha, self.tau, self.s) == (other.alpha, other.tau, other.s)

    def __hash__(self):
        return hash((self.alpha, frozenset(self.tau.items()), self.s))

    def __repr__(self):
        from .textio import render_triple
        return f"HomotopyDataTriple({render_triple(self, inline=True)!r})"

    def __contains__(self, symbol):
        return symbol in self._index

    def __len__(self):
        return len(self.alpha)

    def position(self, symbol: str) -> int:
        return self._index[symbol]

    @property
    def is_empty_s(self) -> bool:
        return not self.s

    @property
    def is_diagonal(self) -> bool:
        return self.s == frozenset((a, a, a) for a in self.alpha)

    def orbits(self) -> list[tuple]:
        """tau-orbits in declaration order; a free orbit is ``(rep, tau(rep))``."""
        seen, out = set(), []
        for a in self.alpha:
            if a in seen:
                continue
            b = self.tau[a]
            orbit = (a,) if a == b else (a, b)
            seen.update(orbit)
            out.append(orbit)
        return out

    def orientation(self) -> list[str]:
        return [o[0] for o in self.orbits()]

    def restrict(self, beta: Iterable[str]) -> "HomotopyDataTriple":
        beta = set(beta)
        alpha = [a for a in self.alpha if a in beta]
        tau = {a: self.tau[a] for a in alpha}
        s = [t for t in self.s if all(x in beta for x in t)]
        return HomotopyDataTriple(alpha, tau, s)

    def is_tau_invariant(self, beta) -> bool:
        beta = set(beta)
        return all(self.tau[a] in beta for a in beta)


UNIT = HomotopyDataTriple((), {}, ())

ALPHA_G = HomotopyDataTriple.diagonal(["a"])
ALPHA_F = HomotopyDataTriple.diagonal(["a", "b"], {"a": "b"})


def product(t1: HomotopyDataTriple, t2: HomotopyDataTriple) -> HomotopyDataTriple:
    """Tagged disjoint union: symbol ``x`` of factor ``i`` becomes ``"i.x"``."""
    return product_many([t1, t2])


def product_many(triples: Sequence[HomotopyDataTriple]) -> HomotopyDataTriple:
    alpha, tau, s = [], {}, []
    for i, t in enumerate(triples, 1):
        tag = {a: f"{i}.{a}" for a in t.alpha}
        alpha.extend(tag[a] for a in t.alpha)
        tau.update({tag[a]: tag[t.tau[a]] for a in t.alpha})
        s.extend(tuple(tag[x] for x in trip) for trip in t.s)
    return HomotopyDataTriple(alpha, tau, s)


def is_factor(beta: Iterable[str], triple: HomotopyDataTriple) -> bool:
    beta = set(beta)
    if not beta <= set(triple.alpha):
        raise InvalidTriple("beta is not a subset of alpha")
    if not triple.is_tau_invariant(beta):
        return False
    for t in triple.s:
        inside = sum(x in beta for x in t)
        if inside not in (0, 3):
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factors of a triple, each a restriction of the parent to a block."""

    parent: HomotopyDataTriple
    factors: tuple

    @property
    def k(self) -> int:
        return len(self.factors)

    def blocks(self) -> list[tuple]:
        return [f.alpha for f in self.factors]

    def factor_of(self, symbol: str) -> int:
        for i, f in enumerate(self.factors):
            if symbol in f:
                return i
        raise KeyError(symbol)

    def label_map(self) -> dict:
        """symbol -> factor index."""
        return {a: i for i, f in enumerate(self.factors) for a in f.alpha}


def _factor_sort_key(t: HomotopyDataTriple):
    return (len(t.alpha), sorted(t.alpha))


def prime_factorize(triple: HomotopyDataTriple) -> Factorization:
    """Finest factor partition: union-find over tau-orbits glued by S-triples."""
    if not triple.alpha:
        raise EmptyAlpha("the unit triple has no prime factors")
    parent = {a: a for a in triple.alpha}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for a in triple.alpha:
        union(a, triple.tau[a])
    for x, y, z in triple.s:
        union(x, y)
        union(x, z)
    blocks: dict[str, list] = {}
    for a in triple.alpha:
        blocks.setdefault(find(a), []).append(a)
    factors = sorted((triple.restrict(b) for b in blocks.values()), key=_factor_sort_key)
    return Factorization(triple, tuple(factors))


def is_prime(triple: HomotopyDataTriple) -> bool:
    return bool(triple.alpha) and prime_factorize(triple).k == 1


def is_composite(triple: HomotopyDataTriple) -> bool:
    return bool(triple.alpha) and prime_factorize(triple).k > 1


def _signature(t: HomotopyDataTriple, a: str):
    """Isomorphism-invariant data attached to a single symbol."""
    counts = [0, 0, 0]
    pattern = {}
    for trip in t.s:
        for k in range(3):
            if trip[k] == a:
                counts[k] += 1
        if a in trip:
            # shape of the triple relative to a: which slots hold a, tau(a)
            shape = tuple(0 if x == a else 1 if x == t.tau[a] else 2 for x in trip)
            pattern[shape] = pattern.get(shape, 0) + 1
    return (t.tau[a] == a, tuple(counts), tuple(sorted(pattern.items())))


def find_triple_isomorphism(t1: HomotopyDataTriple, t2: HomotopyDataTriple):
    """A bijection alpha1 -> alpha2 carrying tau1 to tau2 and S1 onto S2, or None."""
    if len(t1.alpha) != len(t2.alpha) or len(t1.s) != len(t2.s):
        return None
    sig1 = {a: _signature(t1, a) for a in t1.alpha}
    sig2 = {b: _signature(t2, b) for b in t2.alpha}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None
    orbits1 = t1.orbits()
    # most constrained orbits first
    orbits1.sort(key=lambda o: (-sum(sum(sig1[a][1]) for a in o), len(o)))
    orbits2 = t2.orbits()
    by_sym1 = {}
    for trip in t1.s:
        for x in set(trip):
            by_sym1.setdefault(x, []).append(trip)
    f: dict[str, str] = {}
    used = set()

    def consistent(new):
        for a in new:
            for trip in by_sym1.get(a, ()):
                if all(x in f for x in trip):
                    if tuple(f[x] for x in trip) not in t2.s:
                        return False
        return True

    def extend(k):
        if k == len(orbits1):
            return True
        o = orbits1[k]
        for o2 in orbits2:
            if len(o2) != len(o) or o2[0] in used:
                continue
            choices = [o2] if len(o) == 1 else [o2, (o2[1], o2[0])]
            for img in choices:
                if any(sig1[a] != sig2[b] for a, b in zip(o, img)):
                    continue
                f.update(zip(o, img))
                used.update(o2)
                if consistent(o) and extend(k + 1):
                    return True
                for a in o:
                    del f[a]
                used.difference_update(o2)
        return False

    return dict(f) if extend(0) else None


def triples_isomorphic(t1: HomotopyDataTriple, t2: HomotopyDataTriple) -> bool:
    return find_triple_isomorphism(t1, t2) is not None


def classify_diagonal(t: HomotopyDataTriple) -> str | None:
    """``"G"`` or ``"F"`` for triples isomorphic to alpha_G / alpha_F, else None."""
    if triples_isomorphic(t, ALPHA_G):
        return "G"
    if triples_isomorphic(t, ALPHA_F):
        return "F"
    return None
