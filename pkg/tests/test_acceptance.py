"""Acceptance suite: one PASS/FAIL line per criterion, at the stated limits."""

import itertools
import random
import time

import pytest

from gen import random_phrase, random_prime, random_triple, random_walk
from nanophrase.core import canonical_key, component_parities
from nanophrase.decompose import (SimpleAugmentation, SplittingAugmentation, apply_phrase_move,
                                  compare_reduced, hr_report, omega, psi,
                                  reduce_empty_components, reduce_fully)
from nanophrase.hdt import (ALPHA_F, HomotopyDataTriple, classify_diagonal,
                            prime_factorize, product_many, triples_isomorphic)
from nanophrase.invariants import (PiGroup, UMap, convert_so_u, fukunaga_so, h_map, kappa_map,
                                   linking_matrix, lk_vector, lu_vector, u_invariant,
                                   u_realizability_check, u_to_v, v_invariant)
from nanophrase.rewrite import (SearchBudget, bfs_equivalent, decide_equal, decide_reducible,
                                normal_form_empty_S)
from nanophrase.textio import parse_phrase as P

T_COMPOSITE = HomotopyDataTriple("abcd", {"a": "b", "c": "d"}, [("a", "b", "a"), ("c", "d", "c")])
T_PRIME = HomotopyDataTriple("abcd", {"a": "b", "c": "d"}, [("a", "b", "c"), ("b", "c", "d")])
T_EMPTY2 = HomotopyDataTriple("abcd", {"a": "b", "c": "d"})
T_GG = HomotopyDataTriple("ab", {}, [("a", "a", "a"), ("b", "b", "b")])
T_V = HomotopyDataTriple("abc", {"a": "b"}, [("a", "b", "c"), ("c", "b", "a")])
T_U = HomotopyDataTriple.diagonal("abcd", {"a": "b", "c": "d"})
P_V = P("A:a D:a B:b F:b C:c E:c G:c ; ADBAEBFG|CDCF|EG")
P_U = P("A:a C:a E:a B:c D:d F:d ; ACDEABFB|CE|DF")
Q_U = P("A:a C:a E:a B:c D:d F:d ; CDEF|CE|DF")
ORACLE = SearchBudget(rank_delta=1, node_budget=20_000)


@pytest.fixture
def report(capsys):
    def emit(n, name, ok, detail=""):
        with capsys.disabled():
            extra = f"  ({detail})" if detail else ""
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {name}{extra}")
        assert ok, f"criterion {n} failed: {detail}"
    return emit


def best_time(fn, runs=20):
    best = float("inf")
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_01_factorization_goldens(report):
    fac = prime_factorize(T_COMPOSITE)
    ok = fac.factors == (HomotopyDataTriple("ab", {"a": "b"}, [("a", "b", "a")]),
                         HomotopyDataTriple("cd", {"c": "d"}, [("c", "d", "c")]))
    ok &= prime_factorize(T_PRIME).factors == (T_PRIME,)
    rng = random.Random(1)
    diag = [random_triple(rng, rng.randint(1, 6), "diagonal") for _ in range(30)]
    for t in diag:
        kinds = [classify_diagonal(f) for f in prime_factorize(t).factors]
        ok &= all(k in ("G", "F") for k in kinds) and len(kinds) == len(t.orbits())
    slowest = max(best_time(lambda t=t: prime_factorize(t))
                  for t in [T_COMPOSITE, T_PRIME, *diag])
    report(1, "factorization goldens", ok and slowest < 1e-3,
           f"slowest factorization {slowest * 1e3:.3f} ms")


def test_criterion_02_factorization_uniqueness(report):
    rng = random.Random(2)
    t0 = time.perf_counter()
    passed = 0
    for _ in range(200):
        count = rng.randint(2, 4)
        primes, room = [], 8
        for m in range(count):
            size_cap = max(1, min(3, room - (count - m - 1)))
            p = random_prime(rng, size_cap)
            primes.append(p)
            room -= len(p.alpha)
        fac = prime_factorize(product_many(primes))
        remaining = list(fac.factors)
        good = len(remaining) == len(primes)
        for p in primes:
            match = next((f for f in remaining if triples_isomorphic(f, p)), None)
            if match is None:
                good = False
                break
            remaining.remove(match)
        passed += good and not remaining
    elapsed = time.perf_counter() - t0
    report(2, "factorization uniqueness", passed == 200 and elapsed < 5,
           f"{passed}/200 in {elapsed:.2f} s")


def test_criterion_03_linking_golden(report):
    lk = linking_matrix(P("A:a B:b C:c ; ABC|AC|B"), HomotopyDataTriple("abc"))
    rows = lk.as_strings()
    report(3, "linking matrix golden",
           rows == [["1", "a*c", "b"], ["a*c", "1", "1"], ["b", "1", "1"]], str(rows))


def test_criterion_04_v_golden(report):
    ok = (lk_vector(P_V, "A"), lk_vector(P_V, "B"), lk_vector(P_V, "C")) == \
        ((1, 1, 0), (1, 0, 1), (1, 0, 0))
    v = v_invariant(P_V, T_V)
    ok &= v.value(0, "a", (1, 1, 0)) == 1 and v.value(0, "a", (1, 0, 1)) == -1
    ok &= v.value(0, "b", (1, 1, 0)) == -1 and v.value(0, "b", (1, 0, 1)) == 1
    ok &= v.value(1, "c", (1, 0, 0)) == 1
    ok &= linking_matrix(P_V, T_V).is_trivial()
    decs = [decide_reducible(P_V, i, T_V, ORACLE) for i in (0, 1)]
    ok &= all(d.is_no and d.obstruction.invariant == "V" for d in decs)
    report(4, "V golden and reducibility", ok, " ".join(d.verdict for d in decs))


def test_criterion_05_u_goldens(report):
    g = PiGroup(T_U)
    ok = [str(e) for e in lu_vector(P_U, T_U, "A")] == ["1", "a^2", "c^-1"]
    ok &= [str(e) for e in lu_vector(P_U, T_U, "B")] == ["1", "1", "c^-1"]
    gf = PiGroup(ALPHA_F)
    uf = u_invariant(P("A:a B:a C:a ; ABCA|BC"), ALPHA_F)
    ok &= uf.value(0, "a", (gf.identity(), gf.parse("a^2"))) == 1 and len(uf.items()) == 1
    ok &= u_invariant(P_U, T_U).value(0, "a", (g.identity(), g.parse("a^2"), g.parse("c^-1"))) == 1
    ok &= linking_matrix(P_U, T_U) == linking_matrix(Q_U, T_U)
    d = decide_equal(P_U, Q_U, T_U, ORACLE)
    report(5, "U goldens", ok and d.is_no, d.detail)


def test_criterion_06_psi_goldens(report):
    fac = prime_factorize(T_GG)
    d1 = psi(P("A:a B:a C:a D:b E:b ; ABCBDCAEDE"), fac)
    d2 = psi(P("A:a B:a C:b D:b ; ACADDBBC"), fac)
    ok = d1.phrase == P("A:a B:a C:a D:b E:b ; ABCB|D|CA|EDE") and d1.theta == (0, 1, 0, 1)
    ok &= d2.phrase == P("A:a B:a C:b D:b ; A|C|A|DD|BB|C") and d2.theta == (0, 1, 0, 1, 0, 1)
    rng = random.Random(6)
    trips = [T_GG, T_EMPTY2, T_COMPOSITE, HomotopyDataTriple("abc")]
    roundtrips = 0
    for _ in range(500):
        t = rng.choice(trips)
        w = random_phrase(rng, t, max_rank=8, nc=1)
        roundtrips += omega(psi(w, prime_factorize(t))) == w
    report(6, "psi goldens and round trip", ok and roundtrips == 500, f"{roundtrips}/500")


def test_criterion_07_invariance_battery(report):
    rng = random.Random(7)
    trips = [random_triple(rng, rng.randint(1, 4), mode)
             for mode in ("empty", "diagonal", "diagonal", "random", "random")]
    t0 = time.perf_counter()
    passed = 0
    for n in range(300):
        t = trips[n % 5]
        p = random_phrase(rng, t, max_rank=4)
        q, _ = random_walk(rng, p, t, rng.randint(1, 6))
        same = (component_parities(p) == component_parities(q)
                and linking_matrix(p, t) == linking_matrix(q, t)
                and v_invariant(p, t) == v_invariant(q, t))
        if t.is_diagonal:
            same &= u_invariant(p, t) == u_invariant(q, t) and fukunaga_so(p, t) == fukunaga_so(q, t)
        passed += same
    elapsed = time.perf_counter() - t0
    report(7, "invariance battery", passed == 300 and elapsed < 30,
           f"{passed}/300 in {elapsed:.2f} s")


def _with_empties(rng, t):
    fac = prime_factorize(t)
    d = psi(random_phrase(rng, t, max_rank=5, nc=1), fac)
    added = 0
    while added < 2 or (added < 4 and rng.random() < 0.5):
        j = rng.randrange(d.nc + 1)
        if j < d.nc and d.phrase.components[j] and rng.random() < 0.5:
            k = rng.randint(0, len(d.phrase.components[j]))
            mv = SplittingAugmentation(j, k, rng.choice([f for f in range(fac.k) if f != d.theta[j]]))
        else:
            near = {d.theta[j - 1] if j > 0 else None, d.theta[j] if j < d.nc else None}
            choices = [f for f in range(fac.k) if f not in near]
            if not choices:
                continue
            mv = SimpleAugmentation(j, rng.choice(choices))
        d = apply_phrase_move(d, mv)
        added += 1
    return d


def test_criterion_08_confluence(report):
    rng = random.Random(8)
    nf_ok = 0
    for _ in range(200):
        t = random_triple(rng, rng.randint(1, 4), "empty")
        p = random_phrase(rng, t, max_rank=7)
        forms = {canonical_key(normal_form_empty_S(p, t, rng=random.Random(rng.random())))
                 for _ in range(10)}
        nf_ok += len(forms) == 1
    trips = [T_EMPTY2, T_GG, HomotopyDataTriple("abc")]
    pr_ok = 0
    for n in range(100):
        d = _with_empties(rng, trips[n % 3])
        empties = [j for j in range(d.nc) if not d.phrase.components[j]]
        orders = list(itertools.permutations(empties))
        pr_ok += len({reduce_empty_components(d, o) for o in orders}) == 1
    report(8, "confluence", nf_ok == 200 and pr_ok == 100,
           f"normal forms {nf_ok}/200, empty-component reductions {pr_ok}/100")


def test_criterion_09_order_dependence(report):
    d = psi(P("A:a B:a C:b D:b ; ACADDBBC"), prime_factorize(T_GG))
    first, last = reduce_fully(d, strategy="first"), reduce_fully(d, strategy="last")
    ok = first.reduced.phrase == P("A:a B:a C:b ; A|C|ABB|C")
    ok &= last.reduced.phrase == P("A:a C:b D:b ; A|C|A|DDC")
    ok &= first.theta == last.theta == (0, 1, 0, 1)
    cmp = compare_reduced(first, last, ORACLE)
    report(9, "reduced word order dependence", ok and cmp.is_yes,
           f"{first.reduced.render()} vs {last.reduced.render()}: {cmp.verdict}")


def _diagonal_phrases(seed, n):
    rng = random.Random(seed)
    for _ in range(n):
        t = random_triple(rng, rng.randint(1, 4), "diagonal")
        yield t, random_phrase(rng, t, max_rank=6)


def test_criterion_10_u_so_equivalence(report):
    passed = 0
    for t, p in _diagonal_phrases(10, 100):
        u, so = u_invariant(p, t), fukunaga_so(p, t)
        g = u.group
        ok = all(so.value(i, h_map(g, a, i, v)) == val for i, a, v, val in u.items())
        ok &= all(u.value(i, *kappa_map(g, i, v)) == val for i, v, val in so.items())
        ok &= convert_so_u("u_to_so", u) == so and convert_so_u("so_to_u", so) == u
        passed += ok
    report(10, "U and S_o determine each other", passed == 100, f"{passed}/100")


def test_criterion_11_u_to_v(report):
    passed = sum(u_to_v(u_invariant(p, t)) == v_invariant(p, t)
                 for t, p in _diagonal_phrases(11, 100))
    report(11, "u_to_v agreement", passed == 100, f"{passed}/100")


def test_criterion_12_realizability(report):
    passed = sum(u_realizability_check(u_invariant(p, t)) for t, p in _diagonal_phrases(12, 100))
    g = PiGroup(ALPHA_F)
    bad = UMap(g, 1, {(0, "a"): {(g.parse("a^2"),): 1}})
    rejected = not u_realizability_check(bad)
    report(12, "realizability", passed == 100 and rejected,
           f"{passed}/100 realizable, violating map rejected: {rejected}")


def test_criterion_13_hr_additivity(report):
    rng = random.Random(13)
    passed = 0
    for _ in range(100):
        w = random_phrase(rng, T_EMPTY2, max_rank=7, nc=1)
        rep = hr_report(w, T_EMPTY2)
        per_factor = sum(lo for lo, _ in rep.per_factor)
        # the composite triple itself has S = {}, so its normal form is the fixed point
        fixed = normal_form_empty_S(w, T_EMPTY2).rank
        passed += rep.exact and per_factor == rep.upper == fixed
    report(13, "hr additivity", passed == 100, f"{passed}/100")


def test_criterion_14_decidability(report):
    rng = random.Random(14)
    certified = agree = compared = 0
    for n in range(200):
        p = random_phrase(rng, T_EMPTY2, max_rank=4, max_nc=2)
        if n % 2:
            q, _ = random_walk(rng, p, T_EMPTY2, rng.randint(1, 5))
        else:
            q = random_phrase(rng, T_EMPTY2, max_rank=4, nc=p.nc)
        auto = decide_equal(p, q, T_EMPTY2)
        via = decide_equal(p, q, T_EMPTY2, method="decompose")
        ok = auto.certified and via.certified and auto.verdict == via.verdict
        oracle = bfs_equivalent(p, q, T_EMPTY2, ORACLE)
        if oracle.certified:
            compared += 1
            agree += oracle.verdict == auto.verdict
        certified += ok
    report(14, "decidability integration", certified == 200 and agree == compared,
           f"{certified}/200 certified, {agree}/{compared} agree with search")
