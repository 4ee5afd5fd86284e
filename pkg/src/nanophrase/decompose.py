"""Splitting phrases by prime factor, reduced classes, and what they certify.

A :class:`DecomposedPhrase` stores a flat nanophrase, a factor label per
component (``theta``, 0-based) and how the components are grouped into
phrases.  A decomposed nanoword has exactly one group; the decomposition of
an n-component nanophrase has n groups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import (Nanomultiphrase, Nanophrase, canonical_key, chi, project_out)
from .errors import (ComponentNotEmpty, EmptyAlpha, FactorOutOfRange, PrimeTriple,
                     SideConditionViolated, UnitFactorization)
from .hdt import Factorization, HomotopyDataTriple, prime_factorize
from . import rewrite as rw
from .rewrite import DEFAULT_BUDGET, Decision, Obstruction, SearchBudget


@dataclass(frozen=True)
class DecomposedPhrase:
    phrase: Nanophrase
    theta: tuple
    groups: tuple
    factorization: Factorization

    def __post_init__(self):
        if len(self.theta) != self.phrase.nc or sum(self.groups) != self.phrase.nc:
            raise ValueError("theta and groups must cover every component")

    @property
    def nc(self) -> int:
        return self.phrase.nc

    @property
    def is_word(self) -> bool:
        return len(self.groups) == 1

    def group_of(self, j: int) -> tuple[int, int]:
        """(phrase index, position inside the phrase) of component ``j``."""
        start = 0
        for g, size in enumerate(self.groups):
            if j < start + size:
                return g, j - start
            start += size
        raise IndexError(j)

    def boundaries(self, j: int) -> tuple[bool, bool]:
        """Whether component ``j`` is first / last in its phrase."""
        g, pos = self.group_of(j)
        return pos == 0, pos == self.groups[g] - 1

    def is_locally_variable(self) -> bool:
        for j in range(self.nc - 1):
            if not self.boundaries(j)[1] and self.theta[j] == self.theta[j + 1]:
                return False
        return True

    def in_reduced_set(self) -> bool:
        """Every letter lies in the factor its component is labeled with."""
        labels = self.factorization.label_map()
        return all(labels[self.phrase.projection[x]] == self.theta[j]
                   for j, comp in enumerate(self.phrase.components) for x in comp)

    def as_multiphrase(self) -> Nanomultiphrase:
        return Nanomultiphrase.from_flat(self.phrase, self.groups)

    def render(self) -> str:
        from .textio import render_multiphrase, render_phrase
        body = (render_phrase(self.phrase) if self.is_word
                else render_multiphrase(self.as_multiphrase()))
        th = " ".join(str(t + 1) for t in self.theta)
        return f"{body}  theta=({th})"

    def __repr__(self):
        return f"DecomposedPhrase({self.render()!r})"


# -- psi, Gamma, Omega ---------------------------------------------------

def _runs(word, labels, proj):
    runs, theta = [], []
    for x in word:
        f = labels[proj[x]]
        if theta and theta[-1] == f:
            runs[-1].append(x)
        else:
            runs.append([x])
            theta.append(f)
    return runs, theta


def psi(w: Nanophrase, factorization: Factorization) -> DecomposedPhrase:
    """Cut each component into maximal runs of letters from one factor."""
    if factorization.k == 0:
        raise UnitFactorization("factorization has no factors")
    labels = factorization.label_map()
    comps, theta, groups = [], [], []
    for word in w.components:
        runs, th = _runs(word, labels, w.projection)
        comps.extend(runs)
        theta.extend(th)
        groups.append(len(runs))
    return DecomposedPhrase(Nanophrase(comps, w.projection, check=False),
                            tuple(theta), tuple(groups), factorization)


def omega(d: DecomposedPhrase) -> Nanophrase:
    """Forget theta, concatenating the components of each phrase."""
    return chi(d.as_multiphrase())


def gamma(p: Nanophrase, theta: Sequence[int], factorization: Factorization,
          groups: Sequence[int] | None = None) -> DecomposedPhrase:
    """Delete every letter sitting in a component labeled with another factor."""
    labels = factorization.label_map()
    groups = (p.nc,) if groups is None else tuple(groups)
    bad = {x for j, comp in enumerate(p.components) for x in comp
           if labels[p.projection[x]] != theta[j]}
    comps = [[x for x in c if x not in bad] for c in p.components]
    return DecomposedPhrase(Nanophrase(comps, p.projection, check=False),
                            tuple(theta), groups, factorization)


def split_by_factor(d: DecomposedPhrase, i: int):
    """Components labeled ``i`` only; a multiphrase when d has several phrases."""
    if not 0 <= i < d.factorization.k:
        raise FactorOutOfRange(f"factor index {i} out of range for {d.factorization.k} factors")
    keep = [j for j in range(d.nc) if d.theta[j] == i]
    flat = _keep_components(d.phrase, keep)
    if d.is_word:
        return flat
    groups = [0] * len(d.groups)
    for j in keep:
        groups[d.group_of(j)[0]] += 1
    return Nanomultiphrase.from_flat(flat, groups)


def _keep_components(p: Nanophrase, keep) -> Nanophrase:
    keep = list(keep)
    inside = {x for j in keep for x in p.components[j]}
    outside = {x for j in range(p.nc) if j not in keep for x in p.components[j]}
    doomed = inside & outside
    comps = [[x for x in p.components[j] if x not in doomed] for j in keep]
    return Nanophrase(comps, p.projection, check=False)


def _flat(x) -> Nanophrase:
    return x.flat if isinstance(x, Nanomultiphrase) else x


# -- reductions and augmentations ----------------------------------------

@dataclass(frozen=True)
class SimpleReduction:
    index: int


@dataclass(frozen=True)
class ConcatenatingReduction:
    index: int


@dataclass(frozen=True)
class SimpleAugmentation:
    """Insert an empty component labeled ``factor`` before position ``index``
    of phrase ``phrase`` (position may equal the phrase length)."""

    index: int
    factor: int
    phrase: int = 0


@dataclass(frozen=True)
class SplittingAugmentation:
    """Split component ``index`` at letter offset ``split``, inserting an empty
    component labeled ``factor`` between the halves."""

    index: int
    split: int
    factor: int


PhraseMove = SimpleReduction | ConcatenatingReduction | SimpleAugmentation | SplittingAugmentation


def reduction_for(d: DecomposedPhrase, j: int):
    """The unique reduction removing the empty component ``j``."""
    first, last = d.boundaries(j)
    if first or last or d.theta[j - 1] != d.theta[j + 1]:
        return SimpleReduction(j)
    return ConcatenatingReduction(j)


def _replace(d: DecomposedPhrase, comps, theta, groups) -> DecomposedPhrase:
    out = DecomposedPhrase(Nanophrase(comps, d.phrase.projection, check=False),
                           tuple(theta), tuple(groups), d.factorization)
    if not out.is_locally_variable():
        raise SideConditionViolated("result would not be locally variable")
    return out


def apply_phrase_move(d: DecomposedPhrase, mv) -> DecomposedPhrase:
    comps = [list(c) for c in d.phrase.components]
    theta, groups = list(d.theta), list(d.groups)
    if isinstance(mv, (SimpleReduction, ConcatenatingReduction)):
        j = mv.index
        if not 0 <= j < d.nc:
            raise SideConditionViolated(f"no component {j}")
        if comps[j]:
            raise ComponentNotEmpty(f"component {j + 1} is not empty")
        if type(reduction_for(d, j)) is not type(mv):
            raise SideConditionViolated(f"{type(mv).__name__} does not apply to component {j + 1}")
        g, _ = d.group_of(j)
        if isinstance(mv, SimpleReduction):
            del comps[j], theta[j]
            groups[g] -= 1
        else:
            comps[j - 1:j + 2] = [comps[j - 1] + comps[j + 1]]
            theta[j:j + 2] = []
            groups[g] -= 2
        return _replace(d, comps, theta, groups)
    if isinstance(mv, SimpleAugmentation):
        if not 0 <= mv.phrase < len(groups) or not 0 <= mv.index <= groups[mv.phrase]:
            raise SideConditionViolated("insertion point out of range")
        if not 0 <= mv.factor < d.factorization.k:
            raise FactorOutOfRange(f"factor {mv.factor} out of range")
        j = sum(groups[:mv.phrase]) + mv.index
        comps.insert(j, [])
        theta.insert(j, mv.factor)
        groups[mv.phrase] += 1
        return _replace(d, comps, theta, groups)
    if isinstance(mv, SplittingAugmentation):
        j = mv.index
        if not 0 <= j < d.nc or not 0 <= mv.split <= len(comps[j]):
            raise SideConditionViolated("split point out of range")
        if not 0 <= mv.factor < d.factorization.k:
            raise FactorOutOfRange(f"factor {mv.factor} out of range")
        w = comps[j]
        comps[j:j + 1] = [w[:mv.split], [], w[mv.split:]]
        theta[j:j + 1] = [theta[j], mv.factor, theta[j]]
        groups[d.group_of(j)[0]] += 2
        return _replace(d, comps, theta, groups)
    raise TypeError(f"not a phrase move: {mv!r}")


def reduce_component(d: DecomposedPhrase, j: int) -> DecomposedPhrase:
    return apply_phrase_move(d, reduction_for(d, j))


# -- reduced classes -----------------------------------------------------

def _factor_index(d: DecomposedPhrase, j: int) -> int:
    """Index of component ``j`` inside its factor's subphrase."""
    return sum(1 for m in range(j) if d.theta[m] == d.theta[j])


def component_reducible(d: DecomposedPhrase, j: int,
                        budget: SearchBudget = DEFAULT_BUDGET) -> Decision:
    """Reducibility of component ``j`` inside its own factor."""
    i = d.theta[j]
    sub = _flat(split_by_factor(d, i))
    return rw.decide_reducible(sub, _factor_index(d, j), d.factorization.factors[i], budget)


def renormalize(d: DecomposedPhrase, j: int) -> DecomposedPhrase:
    """Delete the letters of component ``j`` and re-split: psi(Omega(f_O(d)))."""
    p = project_out(d.phrase, {j}, "keep")
    stripped = DecomposedPhrase(p, d.theta, d.groups, d.factorization)
    return psi(omega(stripped), d.factorization)


@dataclass(frozen=True)
class ReducedClass:
    """The reduced element reached from a decomposed phrase.

    ``certified`` is True when every component of ``reduced`` was shown
    irreducible; otherwise the class may still admit reductions.
    """

    reduced: DecomposedPhrase
    certified: bool
    trace: tuple = field(default=(), compare=False)

    @property
    def theta(self) -> tuple:
        return self.reduced.theta

    @property
    def groups(self) -> tuple:
        return self.reduced.groups

    @property
    def c_r(self) -> int:
        return self.reduced.nc

    @property
    def factorization(self) -> Factorization:
        return self.reduced.factorization

    def factor_phrase(self, i: int):
        """P_{R,i}: a nanophrase, or a nanomultiphrase for phrase inputs."""
        return split_by_factor(self.reduced, i)

    def factor_phrases(self) -> tuple:
        return tuple(self.factor_phrase(i) for i in range(self.factorization.k))

    def render_phrase(self, g: int) -> str:
        """Phrase ``g`` of the reduced element, rendered."""
        from .textio import render_phrase
        start = sum(self.groups[:g])
        comps = self.reduced.phrase.components[start:start + self.groups[g]]
        return render_phrase(Nanophrase(comps, self.reduced.phrase.projection, check=False))

    def to_text(self) -> str:
        from .textio import render_phrase
        head = f"theta: {' '.join(str(t + 1) for t in self.theta)} ; cert: " \
               f"{'full' if self.certified else 'partial'}"
        if not self.reduced.is_word:
            head += f" ; groups: {' '.join(map(str, self.groups))}"
        lines = [" ".join(head.split())]
        for i in range(self.factorization.k):
            lines.append(render_phrase(_flat(self.factor_phrase(i))))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, triple: HomotopyDataTriple) -> "ReducedClass":
        from .textio import parse_phrase
        lines = [ln for ln in text.strip().splitlines()]
        fields = {}
        for part in lines[0].split(";"):
            key, _, value = part.partition(":")
            fields[key.strip()] = value.split()
        theta = tuple(int(t) - 1 for t in fields["theta"])
        cert = fields["cert"] == ["full"]
        groups = tuple(int(g) for g in fields["groups"]) if "groups" in fields else (len(theta),)
        fac = prime_factorize(triple)
        if len(lines) - 1 != fac.k:
            raise ValueError(f"expected {fac.k} factor lines, found {len(lines) - 1}")
        pieces = [list(parse_phrase(ln).components) for ln in lines[1:]]
        proj = {}
        for ln in lines[1:]:
            proj.update(parse_phrase(ln).projection)
        comps = [pieces[t].pop(0) for t in theta]
        d = DecomposedPhrase(Nanophrase(comps, proj), theta, groups, fac)
        return cls(d, cert)


def reduce_fully(d: DecomposedPhrase, budget: SearchBudget = DEFAULT_BUDGET, *,
                 rng: random.Random | None = None, strategy: str = "first") -> ReducedClass:
    """Reduce until no component is shown reducible.

    ``strategy`` picks among reducible components: ``first`` (lowest index),
    ``last``, or ``random`` (needs ``rng``).  Each step deletes the chosen
    component's letters and re-splits; ``trace`` records every step.
    """
    if rng is not None:
        strategy = "random"
    cur = psi(omega(d), d.factorization) if _has_empty(d) else d
    trace = [d] if cur == d else [d, cur]
    while True:
        verdicts = []
        chosen = None
        for j in range(cur.nc):
            dec = component_reducible(cur, j, budget)
            verdicts.append(dec.verdict)
            if dec.is_yes and strategy == "first":
                chosen = j
                break
        if chosen is None:
            yes_js = [j for j, v in enumerate(verdicts) if v == "Yes"]
            if yes_js:
                chosen = yes_js[-1] if strategy == "last" else (rng or random).choice(yes_js)
        if chosen is None:
            return ReducedClass(cur, all(v == "No" for v in verdicts), tuple(trace))
        cur = renormalize(cur, chosen)
        trace.append(cur)


def _has_empty(d: DecomposedPhrase) -> bool:
    return any(not c for c in d.phrase.components)


def reduce_empty_components(d: DecomposedPhrase, order: Sequence[int] | None = None,
                            ) -> DecomposedPhrase:
    """Remove empty components one reduction at a time.

    ``order`` ranks original component indices (default: left to right).
    A concatenation keeps the better-ranked id of the two merged components,
    so an empty result of merging two empties is still scheduled.
    """
    if order is None:
        order = [j for j in range(d.nc) if not d.phrase.components[j]]
    rank = {j: k for k, j in enumerate(order)}
    ids = list(range(d.nc))
    while True:
        pending = [pos for pos, j in enumerate(ids)
                   if j in rank and not d.phrase.components[pos]]
        if not pending:
            return d
        pos = min(pending, key=lambda q: rank[ids[q]])
        mv = reduction_for(d, pos)
        d = apply_phrase_move(d, mv)
        if isinstance(mv, SimpleReduction):
            del ids[pos]
        else:
            keep = min(ids[pos - 1], ids[pos + 1], key=lambda j: rank.get(j, len(rank)))
            ids[pos - 1:pos + 2] = [keep]


def _factorization(triple: HomotopyDataTriple) -> Factorization:
    if not triple.alpha:
        raise EmptyAlpha("the unit triple does not define a homotopy")
    fac = prime_factorize(triple)
    if fac.k == 1:
        raise PrimeTriple("the decomposition invariant is trivial for a prime triple")
    return fac


def complete_invariant(w: Nanophrase, triple: HomotopyDataTriple,
                       budget: SearchBudget = DEFAULT_BUDGET, *,
                       rng: random.Random | None = None, strategy: str = "first") -> ReducedClass:
    """psi followed by full reduction."""
    fac = _factorization(triple)
    rw._check_symbols(w, triple)
    return reduce_fully(psi(w, fac), budget, rng=rng, strategy=strategy)


def compare_reduced(r1: ReducedClass, r2: ReducedClass,
                    budget: SearchBudget = DEFAULT_BUDGET) -> Decision:
    """Equal theta and factorwise-equivalent P_{R,i} means homotopic."""
    both = r1.certified and r2.certified
    if (r1.theta, r1.groups) != (r2.theta, r2.groups):
        obs = Obstruction("theta_R", _theta_text(r1), _theta_text(r2))
        if both:
            return rw.no(obs)
        return rw.unknown(f"reduced classes differ but are not certified ({obs.describe()})")
    subs = []
    for i, f in enumerate(r1.factorization.factors):
        a, b = _flat(r1.factor_phrase(i)), _flat(r2.factor_phrase(i))
        dec = rw.decide_equal(a, b, f, budget)
        subs.append(dec)
        if dec.is_no:
            obs = Obstruction(f"P_R factor {i + 1}", repr(a), repr(b), dec.detail)
            if both:
                return rw.no(obs)
            return rw.unknown(f"factor {i + 1} differs but the classes are not certified")
        if dec.is_unknown:
            return rw.unknown(f"factor {i + 1}: {dec.detail}")
    return rw.yes((), "theta_R and every factor agree", certificate=tuple(subs))


def _theta_text(r: ReducedClass) -> str:
    th = "(" + ",".join(str(t + 1) for t in r.theta) + ")"
    return th if r.reduced.is_word else f"{th} groups {r.groups}"


# -- consequences --------------------------------------------------------

def _kappa_i_invariant(s) -> bool:
    return all((c, b, a) in s for a, b, c in s)


def _kappa_tau_invariant(s, tau) -> bool:
    return all((tau[a], tau[b], tau[c]) in s for a, b, c in s)


def symmetry_obstruction(w: Nanophrase, triple: HomotopyDataTriple,
                         budget: SearchBudget = DEFAULT_BUDGET) -> dict:
    """Certified No when w cannot be homotopic to its reverse
    (``symmetric``) or to its reversed inverse (``skew``)."""
    if w.nc != 1:
        raise ValueError("symmetry is defined for nanowords")
    out = {}
    ki = _kappa_i_invariant(triple.s)
    kt = _kappa_tau_invariant(triple.s, triple.tau)
    try:
        rc = complete_invariant(w, triple, budget)
    except PrimeTriple:
        rc = None
    for name, applicable in (("symmetric", ki), ("skew", ki and kt)):
        if not applicable:
            out[name] = rw.unknown("S is not invariant under the needed involutions")
        elif rc is None:
            out[name] = rw.unknown("prime triple: no decomposition to inspect")
        elif not rc.certified:
            out[name] = rw.unknown("reduced class not certified")
        else:
            th, c = rc.theta, rc.c_r
            if c > 0 and c % 2 == 0:
                out[name] = rw.no(Obstruction("c_R parity", str(c), "odd"))
            elif any(th[i] != th[c - 1 - i] for i in range(c)):
                out[name] = rw.no(Obstruction("theta_R symmetry", _theta_text(rc), "palindrome"))
            else:
                out[name] = rw.unknown("theta_R is palindromic; no obstruction")
    return out


@dataclass(frozen=True)
class HrReport:
    lower: int
    upper: int
    per_factor: tuple = ()

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _trivial_like(p: Nanophrase) -> Nanophrase:
    return Nanophrase([()] * p.nc, {})


def _bounds(p: Nanophrase, triple: HomotopyDataTriple, budget: SearchBudget) -> tuple[int, int]:
    if p.rank == 0:
        return 0, 0
    if not triple.s:
        r = rw.normal_form_empty_S(p, triple).rank
        return r, r
    lower = 1 if rw.invariant_obstruction(p, _trivial_like(p), triple) else 0
    upper, _ = rw.min_rank_search(p, triple, budget)
    return lower, max(lower, upper)


def hr_report(w: Nanophrase, triple: HomotopyDataTriple,
              budget: SearchBudget = DEFAULT_BUDGET) -> HrReport:
    """Bounds on the homotopy rank, summed over prime factors."""
    if not triple.alpha:
        raise EmptyAlpha("the unit triple does not define a homotopy")
    rw._check_symbols(w, triple)
    if prime_factorize(triple).k == 1:
        lo, hi = _bounds(w, triple, budget)
        return HrReport(lo, hi, ((lo, hi),))
    rc = complete_invariant(w, triple, budget)
    per = tuple(_bounds(_flat(rc.factor_phrase(i)), f, budget)
                for i, f in enumerate(rc.factorization.factors))
    upper = min(w.rank, sum(hi for _, hi in per))
    lower = sum(lo for lo, _ in per) if rc.certified else \
        (1 if rw.invariant_obstruction(w, _trivial_like(w), triple) else 0)
    return HrReport(min(lower, upper), upper, per)


def same_class_key(r: ReducedClass) -> tuple | None:
    """Hashable class key when every factor has S = {}; None otherwise."""
    if not r.certified or any(f.s for f in r.factorization.factors):
        return None
    keys = tuple(canonical_key(rw.normal_form_empty_S(_flat(r.factor_phrase(i)), f))
                 for i, f in enumerate(r.factorization.factors))
    return r.theta, r.groups, keys
