import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_phrase, triple_and_phrase
from nanophrase.core import (Nanomultiphrase, Nanophrase, canonical_key, canonicalize, chi,
                             component_parities, component_word, empty_phrase, inverse,
                             is_isomorphic, opposite, opposite_inverse, project_out, relabel,
                             subphrase)
from nanophrase.errors import IndexOutOfRange, NonGauss, UnknownSymbol
from nanophrase.hdt import HomotopyDataTriple
from nanophrase.textio import parse_multiphrase, parse_phrase

T_AB = HomotopyDataTriple(["a", "b"], {"a": "b"})


def P(text):
    return parse_phrase(text)


def test_gauss_condition_enforced():
    with pytest.raises(NonGauss):
        Nanophrase([["A", "B", "A"]], {"A": "a", "B": "a"})
    with pytest.raises(UnknownSymbol):
        Nanophrase([["A", "A"]], {})


def test_empty_phrase_vs_empty_component():
    assert empty_phrase() != Nanophrase([()], {})
    assert empty_phrase().nc == 0
    assert Nanophrase([()], {}).nc == 1


def test_accessors():
    p = P("A:a B:b C:c ; ABC|AC|B")
    assert p.nc == 3 and p.rank == 3
    assert p.letters() == ["A", "B", "C"]
    assert p.occurrences("C") == ((0, 2), (1, 1))
    assert P("A:a ; AA|_").empty_components() == frozenset({1})


def test_canonicalize_identifies_renamed_letters():
    # xCyCz and xAyAz with the same symbol are isomorphic
    p = P("C:a B:b ; BCBC")
    q = P("A:a B:b ; BABA")
    assert canonicalize(p) == canonicalize(q)
    assert canonicalize(p).letters() == ["X1", "X2"]


def test_canonical_key_respects_symbols():
    assert canonical_key(P("A:a ; AA")) != canonical_key(P("A:b ; AA"))


@given(triple_and_phrase(max_rank=6))
def test_canonicalize_idempotent_and_relabel_invariant(tp):
    _, p = tp
    c = canonicalize(p)
    assert canonicalize(c) == c
    letters = p.letters()
    perm = letters[:]
    random.Random(len(letters)).shuffle(perm)
    q = relabel(p, {x: f"L{y}" for x, y in zip(letters, perm)})
    assert is_isomorphic(p, q)


def test_chi_examples():
    m = parse_multiphrase("A|B||AC||D|B|CD", default_symbol="a")
    assert chi(m) == parse_phrase("AB|AC|DBCD", default_symbol="a")
    assert chi(empty_phrase()) == Nanophrase([()], {})
    p = P("A:a ; AA")
    assert chi(p) == p


def test_multiphrase_boundaries_are_part_of_value():
    a = parse_multiphrase("A||A", default_symbol="a")
    b = parse_multiphrase("A|_|A", default_symbol="a")
    assert a != b
    assert a.groups == (1, 1) and b.groups == (3,)


def test_project_out_examples():
    p = P("A:a B:b C:c ; ABC|AC|B")
    assert project_out(p, {1}, "keep") == P("B:b ; B|_|B")
    assert project_out(p, {1}, "drop") == P("B:b ; B|B")
    assert project_out(p, set(), "keep") == p
    assert project_out(p, set(), "drop") == p
    with pytest.raises(IndexOutOfRange):
        project_out(p, {3})


def test_subphrase_and_component_word():
    p = P("A:a B:a C:a D:a E:a F:a ; ABACDECBDF|EF")
    assert component_word(p, 0) == P("A:a B:a C:a D:a ; ABACDCBD")
    assert component_word(p, 1) == Nanophrase([()], {})
    assert subphrase(p, {0, 1}) == p


def test_opposite_inverse_examples():
    p = P("A:a B:b C:a ; ABC|AC|B")
    assert opposite(p) == P("A:a B:b C:a ; B|CA|CBA")
    assert inverse(p, T_AB.tau) == P("A:b B:a C:b ; ABC|AC|B")
    assert opposite_inverse(p, T_AB, "opposite") == opposite(p)
    assert opposite_inverse(p, T_AB, "inverse") == inverse(p, T_AB.tau)


@given(st.integers(0, 10**6))
def test_opposite_inverse_commuting_involutions(seed):
    p = random_phrase(random.Random(seed), T_AB)
    assert opposite(opposite(p)) == p
    assert inverse(inverse(p, T_AB.tau), T_AB.tau) == p
    assert opposite(inverse(p, T_AB.tau)) == inverse(opposite(p), T_AB.tau)


def test_parities_examples():
    assert component_parities(P("A:a B:a C:a ; ABC|A|B|C")) == (1, 1, 1, 1)
    assert component_parities(P("; _")) == (0,)
    assert component_parities(P("A:a B:a ; AA|BB")) == (0, 0)


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_chi_of_drop_matches_manual_concatenation(seed):
    rng = random.Random(seed)
    p = random_phrase(rng, T_AB, max_nc=4)
    drop = {j for j in range(p.nc) if rng.random() < 0.4}
    q = project_out(p, drop, "drop")
    doomed = {x for j in drop for x in p.components[j]}
    manual = [x for j, c in enumerate(p.components) if j not in drop for x in c if x not in doomed]
    assert chi(q).components == (tuple(manual),)


def test_multiphrase_from_flat_roundtrip():
    m = parse_multiphrase("A:a B:a ; A|B||AB")
    assert Nanomultiphrase.from_flat(m.flat, m.groups) == m
    assert m.phrase(1).components == (("A", "B"),)
