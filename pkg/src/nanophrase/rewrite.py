"""Homotopy moves, the S = {} normal form, and three-valued deciders.

Positions are ``(component, index)`` pairs; insertion slots are
``(component, index)`` with ``0 <= index <= len(component)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

from .core import (Nanophrase, canonical_key, canonicalize, component_parities,
                   component_word, from_canonical_key)
from .errors import EmptyAlpha, IndexOutOfRange, SNotEmpty, StaleSite, UnknownSymbol
from .hdt import HomotopyDataTriple
from . import invariants as inv


@dataclass(frozen=True)
class MoveSite:
    """One move at one place.

    ``kind`` is ``H1``/``H2``/``H3``; ``direction`` is ``reduce`` or
    ``augment`` for H1/H2 and ``forward`` or ``backward`` for H3.
    Reducing sites list the matched occurrences in pattern order; H3 sites
    list all six; augmenting sites list insertion slots together with the
    fresh letters and their labels.
    """

    kind: str
    direction: str
    positions: tuple
    letters: tuple
    labels: tuple = ()

    def describe(self) -> str:
        body = ",".join(f"{c + 1}:{k}" for c, k in self.positions)
        lab = "".join(f" {x}:{s}" for x, s in zip(self.letters, self.labels))
        return f"{self.kind} {self.direction} [{body}] {' '.join(self.letters)}{lab}".rstrip()


@dataclass(frozen=True)
class SearchBudget:
    rank_delta: int = 2
    node_budget: int = 200_000

    def __post_init__(self):
        if self.rank_delta < 0 or self.node_budget < 0:
            raise ValueError("budgets must be non-negative")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class Obstruction:
    """An invariant whose values differ, rendered as text."""

    invariant: str
    left: str
    right: str
    note: str = ""

    def describe(self) -> str:
        extra = f" ({self.note})" if self.note else ""
        return f"{self.invariant}: {self.left} != {self.right}{extra}"


@dataclass(frozen=True)
class Decision:
    """Three-valued answer.

    ``witness`` (Yes) is a list of ``(site, phrase)`` steps; each site applies
    to the canonical form of the previous phrase and ``phrase`` is the
    canonical result.  ``obstruction`` (No) names the separating invariant.
    ``certificate`` holds auxiliary evidence, e.g. per-factor decisions.
    """

    verdict: str
    witness: tuple = ()
    obstruction: Obstruction | None = None
    detail: str = ""
    certificate: tuple = ()
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def is_yes(self) -> bool:
        return self.verdict == "Yes"

    @property
    def is_no(self) -> bool:
        return self.verdict == "No"

    @property
    def is_unknown(self) -> bool:
        return self.verdict == "Unknown"

    @property
    def certified(self) -> bool:
        return self.verdict != "Unknown"

    @property
    def exit_code(self) -> int:
        return {"Yes": 0, "No": 1, "Unknown": 2}[self.verdict]


def yes(witness=(), detail="", certificate=(), **stats) -> Decision:
    return Decision("Yes", tuple(witness), None, detail, tuple(certificate), stats)


def no(obstruction: Obstruction, detail="", **stats) -> Decision:
    return Decision("No", (), obstruction, detail or obstruction.describe(), (), stats)


def unknown(detail: str, **stats) -> Decision:
    return Decision("Unknown", (), None, detail, (), stats)


# -- move enumeration ----------------------------------------------------

def _fresh_letters(p: Nanophrase, k: int) -> tuple:
    used = set(p.projection)
    out = []
    for code in range(ord("A"), ord("Z") + 1):
        if chr(code) not in used:
            out.append(chr(code))
            if len(out) == k:
                return tuple(out)
    n = 1
    while len(out) < k:
        name = f"X{n}"
        if name not in used and name not in out:
            out.append(name)
        n += 1
    return tuple(out)


def _slots(p: Nanophrase):
    for c, comp in enumerate(p.components):
        for k in range(len(comp) + 1):
            yield (c, k)


def _at(p: Nanophrase, pos):
    c, k = pos
    comp = p.components[c] if 0 <= c < p.nc else ()
    return comp[k] if 0 <= k < len(comp) else None


def _reducing_sites(p: Nanophrase, tau) -> list[MoveSite]:
    out = []
    for x in p.letters():
        (c1, k1), (c2, k2) = p.occurrences(x)
        if c1 == c2 and k2 == k1 + 1:
            out.append(MoveSite("H1", "reduce", ((c1, k1), (c2, k2)), (x,)))
    for a in p.letters():
        (c1, k1), (c2, k2) = p.occurrences(a)
        b = _at(p, (c1, k1 + 1))
        if b is None or b == a or _at(p, (c2, k2 - 1)) != b:
            continue
        if (c2, k2 - 1) == (c1, k1 + 1):
            continue
        if tau[p.projection[a]] != p.projection[b]:
            continue
        out.append(MoveSite("H2", "reduce",
                            ((c1, k1), (c1, k1 + 1), (c2, k2 - 1), (c2, k2)), (a, b)))
    return out


def _h3_sites(p: Nanophrase, s) -> list[MoveSite]:
    if not s:
        return []
    out = []
    for a in p.letters():
        (ca1, ka1), (ca2, ka2) = p.occurrences(a)
        # forward: x A B y A C z B C t
        b = _at(p, (ca1, ka1 + 1))
        c = _at(p, (ca2, ka2 + 1))
        if b is not None and c is not None and len({a, b, c}) == 3:
            ob1, ob2 = p.occurrences(b)
            oc1, oc2 = p.occurrences(c)
            if (ob1 == (ca1, ka1 + 1) and oc1 == (ca2, ka2 + 1)
                    and oc2 == (ob2[0], ob2[1] + 1) and ob2 > oc1):
                trip = (p.projection[a], p.projection[b], p.projection[c])
                if trip in s:
                    out.append(MoveSite("H3", "forward",
                                        ((ca1, ka1), ob1, (ca2, ka2), oc1, ob2, oc2), (a, b, c)))
        # backward: x B A y C A z C B t
        b = _at(p, (ca1, ka1 - 1))
        c = _at(p, (ca2, ka2 - 1))
        if b is not None and c is not None and len({a, b, c}) == 3:
            ob1, ob2 = p.occurrences(b)
            oc1, oc2 = p.occurrences(c)
            if (ob1 == (ca1, ka1 - 1) and oc1 == (ca2, ka2 - 1)
                    and ob2 == (oc2[0], oc2[1] + 1) and oc2 > (ca2, ka2)):
                trip = (p.projection[a], p.projection[b], p.projection[c])
                if trip in s:
                    out.append(MoveSite("H3", "backward",
                                        (ob1, (ca1, ka1), oc1, (ca2, ka2), oc2, ob2), (a, b, c)))
    return out


def _augmenting_sites(p: Nanophrase, triple: HomotopyDataTriple, h1: bool, h2: bool):
    slots = list(_slots(p))
    if h1:
        (x,) = _fresh_letters(p, 1)
        for slot in slots:
            for sym in triple.alpha:
                yield MoveSite("H1", "augment", (slot,), (x,), (sym,))
    if h2:
        x, y = _fresh_letters(p, 2)
        for n1, s1 in enumerate(slots):
            for s2 in slots[n1:]:
                for sym in triple.alpha:
                    yield MoveSite("H2", "augment", (s1, s2), (x, y), (sym, triple.tau[sym]))


def iter_moves(p: Nanophrase, triple: HomotopyDataTriple, *, max_rank: int | None = None,
               augment: bool = True) -> Iterator[MoveSite]:
    """Reducing sites, H3 sites, then augmenting sites allowed by ``max_rank``."""
    yield from _reducing_sites(p, triple.tau)
    yield from _h3_sites(p, triple.s)
    if augment:
        bound = float("inf") if max_rank is None else max_rank
        yield from _augmenting_sites(p, triple, p.rank + 1 <= bound, p.rank + 2 <= bound)


def enumerate_moves(p: Nanophrase, triple: HomotopyDataTriple, *,
                    max_rank: int | None = None, augment: bool = True) -> list[MoveSite]:
    _check_symbols(p, triple)
    if augment and max_rank is None:
        max_rank = p.rank + 2
    return list(iter_moves(p, triple, max_rank=max_rank, augment=augment))


def reducing_moves(p: Nanophrase, triple: HomotopyDataTriple) -> list[MoveSite]:
    return _reducing_sites(p, triple.tau)


# -- applying moves ------------------------------------------------------

def _stale(site: MoveSite, why: str):
    raise StaleSite(f"{site.describe()}: {why}")


def apply_move(p: Nanophrase, site: MoveSite) -> Nanophrase:
    comps = [list(c) for c in p.components]
    proj = dict(p.projection)
    if site.direction == "reduce":
        for pos, x in zip(site.positions, _pattern_letters(site)):
            if _at(p, pos) != x:
                _stale(site, f"expected {x} at {pos}")
        for c, k in sorted(site.positions, reverse=True):
            del comps[c][k]
        for x in site.letters:
            proj.pop(x, None)
        return Nanophrase(comps, proj, check=False)
    if site.direction == "augment":
        for x in site.letters:
            if x in proj:
                _stale(site, f"letter {x} already present")
        for c, k in site.positions:
            if not (0 <= c < p.nc and 0 <= k <= len(comps[c])):
                _stale(site, f"slot {(c, k)} out of range")
        if site.kind == "H1":
            (c, k), (x,) = site.positions[0], site.letters
            comps[c][k:k] = [x, x]
        else:
            (c1, k1), (c2, k2) = site.positions
            x, y = site.letters
            if (c2, k2) < (c1, k1):
                _stale(site, "slots out of order")
            comps[c2][k2:k2] = [y, x]
            comps[c1][k1:k1] = [x, y]
        proj.update(zip(site.letters, site.labels))
        return Nanophrase(comps, proj, check=False)
    if site.kind == "H3":
        for pos, x in zip(site.positions, _pattern_letters(site)):
            if _at(p, pos) != x:
                _stale(site, f"expected {x} at {pos}")
        for n in (0, 2, 4):
            (c, k), (c2, k2) = site.positions[n], site.positions[n + 1]
            if c != c2 or k2 != k + 1:
                _stale(site, "pair not adjacent")
            comps[c][k], comps[c][k + 1] = comps[c][k + 1], comps[c][k]
        return Nanophrase(comps, proj, check=False)
    raise ValueError(f"unknown move direction {site.direction!r}")


def _pattern_letters(site: MoveSite) -> tuple:
    if site.kind == "H1":
        x = site.letters[0]
        return (x, x)
    if site.kind == "H2":
        a, b = site.letters
        return (a, b, b, a)
    a, b, c = site.letters
    if site.direction == "forward":
        return (a, b, a, c, b, c)
    return (b, a, c, a, c, b)


def inverse_site(p: Nanophrase, site: MoveSite) -> MoveSite:
    """The site on ``apply_move(p, site)`` that undoes ``site``."""
    if site.kind == "H3":
        flip = "backward" if site.direction == "forward" else "forward"
        return MoveSite("H3", flip, site.positions, site.letters)
    labels = tuple(p.projection[x] for x in site.letters) if site.direction == "reduce" else site.labels
    if site.kind == "H1":
        if site.direction == "reduce":
            return MoveSite("H1", "augment", (site.positions[0],), site.letters, labels)
        (c, k) = site.positions[0]
        return MoveSite("H1", "reduce", ((c, k), (c, k + 1)), site.letters)
    if site.direction == "reduce":
        (c1, k1), _, (c2, k2), _ = site.positions
        if c2 == c1:
            k2 -= 2
        return MoveSite("H2", "augment", ((c1, k1), (c2, k2)), site.letters, labels)
    (c1, k1), (c2, k2) = site.positions
    if c2 == c1:
        k2 += 2
    return MoveSite("H2", "reduce", ((c1, k1), (c1, k1 + 1), (c2, k2), (c2, k2 + 1)),
                    site.letters)


def canonical_map(p: Nanophrase) -> dict:
    """Letter renaming that :func:`canonicalize` applies."""
    return {x: f"X{k + 1}" for k, x in enumerate(p.letters())}


def transport_site(site: MoveSite, mapping: dict, target: Nanophrase) -> MoveSite:
    """Rename a site's letters so it applies to the relabeled phrase ``target``."""
    if site.direction == "augment":
        letters = _fresh_letters(target, len(site.letters))
    else:
        letters = tuple(mapping[x] for x in site.letters)
    return MoveSite(site.kind, site.direction, site.positions, letters, site.labels)


# -- paths and witnesses -------------------------------------------------

def _step(cur: Nanophrase, site: MoveSite):
    """Apply to a canonical phrase; return the canonical result."""
    return canonicalize(apply_move(cur, site))


def _reverse_edge(before: Nanophrase, site: MoveSite, after: Nanophrase):
    """A step leading from canonical ``after`` back to canonical ``before``."""
    raw = apply_move(before, site)
    back = transport_site(inverse_site(before, site), canonical_map(raw), after)
    return back, before


def join_paths(forward: list, backward: list) -> list:
    """Combine p -> m and q -> m edge lists into p -> q witness steps.

    Each edge is ``(before, site, after)`` over canonical phrases.
    """
    steps = [(site, after) for _, site, after in forward]
    for before, site, after in reversed(backward):
        steps.append(_reverse_edge(before, site, after))
    return steps


def replay_witness(p: Nanophrase, q: Nanophrase, steps) -> bool:
    cur = canonicalize(p)
    for site, expected in steps:
        try:
            cur = _step(cur, site)
        except StaleSite:
            return False
        if canonical_key(cur) != canonical_key(expected):
            return False
    return canonical_key(cur) == canonical_key(q)


# -- S = {} normal form --------------------------------------------------

def _check_symbols(p: Nanophrase, triple: HomotopyDataTriple):
    for x, s in p.projection.items():
        if s not in triple:
            raise UnknownSymbol(f"letter {x} projects to {s!r}, not in alpha")


def reduction_path(p: Nanophrase, triple: HomotopyDataTriple,
                   rng: random.Random | None = None) -> list:
    """Apply reducing H1/H2 moves until none remain; return the edge list."""
    cur = canonicalize(p)
    path = []
    while True:
        sites = _reducing_sites(cur, triple.tau)
        if not sites:
            return path
        site = rng.choice(sites) if rng is not None else sites[0]
        nxt = _step(cur, site)
        path.append((cur, site, nxt))
        cur = nxt


@lru_cache(maxsize=65536)
def _nf_key(key: tuple, triple: HomotopyDataTriple) -> tuple:
    path = reduction_path(from_canonical_key(key), triple)
    return canonical_key(path[-1][2]) if path else key


def normal_form_empty_S(p: Nanophrase, triple: HomotopyDataTriple, *,
                        rng: random.Random | None = None) -> Nanophrase:
    if triple.s:
        raise SNotEmpty("the normal form exists only for S = {}")
    _check_symbols(p, triple)
    if rng is not None:
        path = reduction_path(p, triple, rng)
        return path[-1][2] if path else canonicalize(p)
    return from_canonical_key(_nf_key(canonical_key(p), triple))


# -- invariant prefilter -------------------------------------------------

def invariant_obstruction(p: Nanophrase, q: Nanophrase,
                          triple: HomotopyDataTriple) -> Obstruction | None:
    """First implemented invariant whose values on p and q differ."""
    if p.nc != q.nc:
        return Obstruction("component count", str(p.nc), str(q.nc))
    a, b = component_parities(p), component_parities(q)
    if a != b:
        return Obstruction("parity", str(a), str(b))
    lp, lq = inv.linking_matrix(p, triple), inv.linking_matrix(q, triple)
    if lp != lq:
        return Obstruction("linking matrix", str(lp.as_strings()), str(lq.as_strings()))
    vp, vq = inv.v_invariant(p, triple), inv.v_invariant(q, triple)
    if vp != vq:
        return Obstruction("V", str(vp.render()), str(vq.render()))
    if triple.is_diagonal:
        up, uq = inv.u_invariant(p, triple), inv.u_invariant(q, triple)
        if up != uq:
            return Obstruction("U", str(up.render()), str(uq.render()))
    return None


def reducibility_obstruction(p: Nanophrase, i: int,
                             triple: HomotopyDataTriple) -> Obstruction | None:
    """An invariant showing component ``i`` cannot be emptied."""
    par = component_parities(p)[i]
    if par:
        return Obstruction("parity", "1", "0", f"component {i + 1}")
    lk = inv.linking_matrix(p, triple)
    if not lk.row_trivial(i):
        return Obstruction("linking matrix", str([str(g) for g in lk.row(i)]), "trivial row",
                           f"component {i + 1}")
    v = inv.v_invariant(p, triple)
    if not v.component_zero(i):
        return Obstruction("V", str([r for r in v.render() if r.startswith(f"V^{{{i + 1},")]),
                           "0", f"component {i + 1}")
    if triple.is_diagonal:
        u = inv.u_invariant(p, triple)
        if not u.component_zero(i):
            return Obstruction("U", str([r for r in u.render() if r.startswith(f"U^{{{i + 1},")]),
                               "0", f"component {i + 1}")
    return None


# -- bounded search ------------------------------------------------------

def _path_to(parents: dict, key) -> list:
    edges = []
    while parents[key] is not None:
        parent, site = parents[key]
        edges.append((from_canonical_key(parent), site, from_canonical_key(key)))
        key = parent
    edges.reverse()
    return edges


def _expand(key, triple, bound):
    ph = from_canonical_key(key)
    for site in iter_moves(ph, triple, max_rank=bound):
        yield site, canonical_key(apply_move(ph, site))


def bfs_equivalent(p: Nanophrase, q: Nanophrase, triple: HomotopyDataTriple,
                   budget: SearchBudget = DEFAULT_BUDGET, *, prefilter: bool = True) -> Decision:
    """Bidirectional breadth-first search over canonical phrases."""
    _check_symbols(p, triple)
    _check_symbols(q, triple)
    if p.nc != q.nc:
        return no(Obstruction("component count", str(p.nc), str(q.nc)))
    if prefilter:
        obs = invariant_obstruction(p, q, triple)
        if obs is not None:
            return no(obs)
    pk, qk = canonical_key(p), canonical_key(q)
    if pk == qk:
        return yes((), "isomorphic", visited=1)
    bound = max(p.rank, q.rank) + budget.rank_delta
    parents = [{pk: None}, {qk: None}]
    frontiers = [[pk], [qk]]
    visited = 2
    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = parents[side], parents[1 - side]
        nxt = []
        for key in frontiers[side]:
            for site, child in _expand(key, triple, bound):
                if child in mine:
                    continue
                mine[child] = (key, site)
                visited += 1
                if child in other:
                    fwd, bwd = _path_to(parents[0], child), _path_to(parents[1], child)
                    return yes(join_paths(fwd, bwd), "search", visited=visited)
                if visited >= budget.node_budget:
                    return unknown(f"node budget {budget.node_budget} exhausted", visited=visited)
                nxt.append(child)
        frontiers[side] = nxt
    return unknown(f"search space exhausted below rank {bound + 1} without meeting",
                   visited=visited)


def bfs_find(p: Nanophrase, triple: HomotopyDataTriple, goal: Callable[[Nanophrase], bool],
             budget: SearchBudget = DEFAULT_BUDGET):
    """Breadth-first search from p for a phrase satisfying ``goal``.

    Returns ``(edges, visited)`` with ``edges`` None when nothing was found.
    """
    pk = canonical_key(p)
    if goal(from_canonical_key(pk)):
        return [], 1
    bound = p.rank + budget.rank_delta
    parents = {pk: None}
    frontier = [pk]
    while frontier:
        nxt = []
        for key in frontier:
            for site, child in _expand(key, triple, bound):
                if child in parents:
                    continue
                parents[child] = (key, site)
                if goal(from_canonical_key(child)):
                    return _path_to(parents, child), len(parents)
                if len(parents) >= budget.node_budget:
                    return None, len(parents)
                nxt.append(child)
        frontier = nxt
    return None, len(parents)


def min_rank_search(p: Nanophrase, triple: HomotopyDataTriple,
                    budget: SearchBudget = DEFAULT_BUDGET) -> tuple[int, bool]:
    """Least rank seen in a bounded search from p; flag says the search was exhaustive."""
    best = p.rank

    def goal(ph):
        nonlocal best
        best = min(best, ph.rank)
        return best == 0

    edges, visited = bfs_find(p, triple, goal, budget)
    return best, edges is None and visited < budget.node_budget


# -- deciders ------------------------------------------------------------

def _require_homotopy(triple: HomotopyDataTriple):
    if not triple.alpha:
        raise EmptyAlpha("the unit triple does not define a homotopy")


def decide_equal(p: Nanophrase, q: Nanophrase, triple: HomotopyDataTriple,
                 budget: SearchBudget = DEFAULT_BUDGET, *, method: str = "auto") -> Decision:
    """Decide homotopy of p and q.

    ``method`` is ``auto``, ``normal-form`` (S = {} only), ``decompose``
    (composite triples) or ``search``.
    """
    _require_homotopy(triple)
    _check_symbols(p, triple)
    _check_symbols(q, triple)
    if p.nc != q.nc:
        return no(Obstruction("component count", str(p.nc), str(q.nc)))
    if method == "auto":
        if not triple.s:
            method = "normal-form"
        else:
            from .hdt import prime_factorize
            method = "decompose" if prime_factorize(triple).k > 1 else "search"
    if method == "normal-form":
        if triple.s:
            raise SNotEmpty("normal-form comparison needs S = {}")
        path_p, path_q = reduction_path(p, triple), reduction_path(q, triple)
        np_ = path_p[-1][2] if path_p else canonicalize(p)
        nq = path_q[-1][2] if path_q else canonicalize(q)
        if canonical_key(np_) == canonical_key(nq):
            return yes(join_paths(path_p, path_q), "equal normal forms")
        return no(Obstruction("normal form", repr(np_), repr(nq)))
    if method == "decompose":
        from .decompose import complete_invariant, compare_reduced
        rp = complete_invariant(p, triple, budget)
        rq = complete_invariant(q, triple, budget)
        dec = compare_reduced(rp, rq, budget)
        if not dec.is_unknown:
            return dec
        obs = invariant_obstruction(p, q, triple)
        if obs is not None:
            return no(obs)
        return bfs_equivalent(p, q, triple, budget, prefilter=False)
    if method == "search":
        return bfs_equivalent(p, q, triple, budget)
    raise ValueError(f"unknown method {method!r}")


def decide_reducible(p: Nanophrase, i: int, triple: HomotopyDataTriple,
                     budget: SearchBudget = DEFAULT_BUDGET) -> Decision:
    """Is p homotopic to a phrase whose component ``i`` (0-based) is empty?"""
    _require_homotopy(triple)
    _check_symbols(p, triple)
    if not 0 <= i < p.nc:
        raise IndexOutOfRange(f"component index {i} out of range for {p.nc} components")
    if not p.components[i]:
        return yes((), "component already empty")
    obs = reducibility_obstruction(p, i, triple)
    if obs is not None:
        return no(obs)
    if not triple.s:
        path = reduction_path(p, triple)
        nf = path[-1][2] if path else canonicalize(p)
        if not nf.components[i]:
            return yes([(site, after) for _, site, after in path], "normal form component empty")
        return no(Obstruction("normal form", repr(nf), f"component {i + 1} empty",
                              "minimizing normal form keeps the component"))
    from .hdt import prime_factorize
    if prime_factorize(triple).k > 1:
        from .decompose import complete_invariant
        rc = complete_invariant(p, triple, budget)
        if rc.groups[i] == 0:
            return yes((), "phrase of the reduced class is empty", certificate=(rc,))
        if rc.certified:
            return no(Obstruction("reduced class", rc.render_phrase(i), "empty phrase",
                                  f"component {i + 1}"))
    elif p.nc > 1:
        w = component_word(p, i)
        sub = decide_reducible(w, 0, triple, budget)
        if sub.is_no:
            return no(Obstruction("component word", repr(w), "contractible",
                                  f"component {i + 1}: {sub.detail}"))
    edges, visited = bfs_find(p, triple, lambda ph: not ph.components[i], budget)
    if edges is not None:
        return yes([(site, after) for _, site, after in edges], "search", visited=visited)
    return unknown("no empty component found within budget", visited=visited)
