from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grla.bfunction import (
    OUTSIDE_DISPLAY,
    BFunction,
    NotInLatticeError,
    closed_form_b,
    distinguished_characters,
    dual_exponents,
    dual_exponents_from_weights,
    expected_degree,
    negation_duality_check,
    partial_sum_conditions,
    roots_in_unit_interval,
    same_character,
    specialized_roots,
    symbolic_negation_duality,
)
from grla.exact import AffineForm
from grla.grading import Family, OutOfScopeError, build_grading, iter_specs
from grla.semi_invariants import CharacterParams, free_indices, lattice_condition

H = Fraction(1, 2)
s1, s2, s3 = (AffineForm.param(f"s{j}") for j in (1, 2, 3))


def in_display(spec):
    return not (spec.family is Family.BD and spec.q < 2)


SPECS = [s for s in iter_specs(6) if in_display(s)]
SMALL = [s for s in iter_specs(4) if in_display(s)]


def P(d):
    return CharacterParams(d)


def test_closed_form_examples():
    b = closed_form_b(build_grading("A", 3, 0, 1, 1))
    assert b.root_multiset() == Counter({AffineForm(0): 1, -s1: 2})

    b = closed_form_b(build_grading("A", 3, 0, 0, 1))
    assert b.root_multiset() == Counter({AffineForm(0): 1, -s1 / 2: 1, (1 - s1) / 2: 1})

    b = closed_form_b(build_grading("C", 4, 0, 0, 1))
    assert b.root_multiset() == Counter({AffineForm(0): 1, -s3: 1, -s2 / 2: 1, (1 - s2) / 2: 1})
    assert b.to_text() == "s*(s + 1/2*s2)*(s + 1/2*s2 - 1/2)*(s + s3)"


def test_scalars_are_stored():
    assert closed_form_b(build_grading("A", 3, 0, 1, 1)).scalar == 8
    assert closed_form_b(build_grading("A", 5, 1, 1, 1)).scalar == 32
    assert closed_form_b(build_grading("BD", 6, 0, 2, 1)).scalar == 64
    assert closed_form_b(build_grading("C", 4, 0, 0, 1)).scalar == 1


def test_bd_outside_display():
    with pytest.raises(OutOfScopeError):
        closed_form_b(build_grading("BD", 4, 0, 0, 1))
    b = closed_form_b(build_grading("BD", 4, 1, 1, 1), allow_outside=True)
    assert OUTSIDE_DISPLAY in b.flags


def test_rank_must_be_one():
    with pytest.raises(ValueError):
        closed_form_b(build_grading("A", 3, 0, 1, 2))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.short())
def test_degree_is_weyl_order(spec):
    b = closed_form_b(spec)
    assert b.degree == expected_degree(spec) == spec.order
    assert all(m >= 1 for _, m in b.roots)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.short())
def test_symbolic_duality(spec):
    assert symbolic_negation_duality(spec)


def test_interval_examples():
    a5 = build_grading("A", 5, 0, 1, 1)
    prm = P({1: -H, 2: 0})
    assert specialized_roots(a5, prm) == Counter({Fraction(0): 2, H: 3})
    assert roots_in_unit_interval(a5, prm)
    assert roots_in_unit_interval(a5, P({}))

    a3 = build_grading("A", 3, 0, 1, 1)
    assert not roots_in_unit_interval(a3, P({1: H}))
    with pytest.raises(NotInLatticeError):
        roots_in_unit_interval(a5, P({2: H}))


def test_partial_sum_examples():
    c6 = build_grading("C", 6, 1, 1, 1)
    for t3 in (0, -H):
        for total in (-H, -1):
            prm = P({1: -H, 3: t3, 4: total - t3})
            assert partial_sum_conditions(c6, prm)
            assert roots_in_unit_interval(c6, prm)
    assert not partial_sum_conditions(c6, P({1: -H, 3: 0, 4: 0}))

    assert partial_sum_conditions(build_grading("C", 4, 0, 0, 1), P({}))

    a5 = build_grading("A", 5, 0, 2, 1)
    assert partial_sum_conditions(a5, P({1: -H, 2: 0}))
    assert not partial_sum_conditions(a5, P({1: -H, 2: H}))


lattice_values = st.sampled_from([Fraction(n, d) for d in (1, 2) for n in range(-3, 4)])


@settings(max_examples=300)
@given(st.sampled_from(SMALL), st.data())
def test_interval_classification_agrees(spec, data):
    prm = P({j: data.draw(lattice_values) for j in free_indices(spec)})
    if not lattice_condition(spec, prm):
        with pytest.raises(NotInLatticeError):
            roots_in_unit_interval(spec, prm)
        return
    assert roots_in_unit_interval(spec, prm) == partial_sum_conditions(spec, prm)


@settings(max_examples=300)
@given(st.sampled_from(SMALL), st.data())
def test_duality_properties(spec, data):
    prm = P({j: data.draw(lattice_values) for j in free_indices(spec)})
    assert negation_duality_check(spec, prm)
    assert same_character(spec, dual_exponents(spec, prm), dual_exponents_from_weights(spec, prm))
    # applying the dual map twice returns the original character
    back = dual_exponents(spec, dual_exponents(spec, prm))
    assert back.s == {j: prm.get(j) for j in free_indices(spec)}


def test_dual_exponent_examples():
    a = build_grading("A", 5, 0, 1, 1)
    d = dual_exponents(a, P({1: -H, 2: 0}))
    assert d.get(1) == H  # s_q* = -s_q
    assert d.get(2) == 1  # middle index: 1 - s_j
    c = build_grading("C", 4, 0, 0, 1)
    assert dual_exponents(c, P({3: 0})).get(3) == 0
    assert dual_exponents(c, P({2: 0})).get(2) == 1


def test_dual_from_weights_examples():
    a = build_grading("A", 3, 0, 1, 1)
    for v in (0, -H, H, 2):
        assert dual_exponents_from_weights(a, P({1: v})).get(1) == -v
    c = build_grading("C", 4, 0, 0, 1)
    prm = P({2: Fraction(1, 3), 3: Fraction(-2, 5)})
    got = dual_exponents_from_weights(c, prm)
    want = dual_exponents(c, prm)
    diff = {j: got.get(j) - want.get(j) for j in (2, 3)}
    # the difference is a multiple of n = (1, 2, 1) restricted to the free indices
    assert diff[2] == 2 * diff[3]
    assert same_character(c, got, want)


def test_same_character_rejects_non_relations():
    c = build_grading("C", 4, 0, 0, 1)
    assert not same_character(c, P({2: 1}), P({2: 0}))


def test_negation_examples():
    a3 = build_grading("A", 3, 0, 1, 1)
    assert specialized_roots(a3, P({1: -H})) == Counter({Fraction(0): 1, H: 2})
    assert specialized_roots(a3, P({1: H})) == Counter({Fraction(0): 1, -H: 2})
    assert negation_duality_check(a3, P({1: -H}))

    c4 = build_grading("C", 4, 0, 0, 1)
    zero = P({})
    assert specialized_roots(c4, zero) == Counter({Fraction(0): 3, H: 1})
    dual = dual_exponents(c4, zero)
    assert specialized_roots(c4, dual) == Counter({Fraction(0): 3, -H: 1})


def test_distinguished_examples():
    a = build_grading("A", 5, 1, 1, 1)
    first = distinguished_characters(a)[0]
    assert first.params.get(1) == 0
    assert first.b.specialize({}) == Counter({Fraction(0): 5})
    assert first.sign == -1

    c = build_grading("C", 4, 0, 0, 1)
    dcs = distinguished_characters(c)
    assert [d.params.get(3) for d in dcs] == [0, -H]
    assert [dict(d.display) for d in dcs] == [{0: 3, H: 1}, {0: 2, H: 2}]
    assert [d.sign for d in dcs] == [1, -1]

    bd = build_grading("BD", 6, 0, 2, 1)
    (only,) = distinguished_characters(bd)
    assert only.params.s == {1: -H}
    assert only.display == Counter({Fraction(0): 5, H: 1})
    assert only.sign is None


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.short())
def test_distinguished_agree_with_display(spec):
    dcs = distinguished_characters(spec)
    assert len(dcs) in (1, 2)
    for dc in dcs:
        assert dc.b.specialize({}) == dc.display
        assert roots_in_unit_interval(spec, dc.params)


def test_distinguished_outside_display_has_no_closed_form():
    for dc in distinguished_characters(build_grading("BD", 4, 1, 1, 1)):
        assert dc.b is None and OUTSIDE_DISPLAY in dc.flags


def test_bfunction_merges_repeated_roots():
    b = BFunction([(AffineForm(0), 1), (AffineForm(0), 2), (s1, 1)])
    assert b.degree == 4 and dict(b.roots)[AffineForm(0)] == 3
    with pytest.raises(ValueError):
        BFunction([(s1, 0)])
    assert b.negated().negated().root_multiset() == b.root_multiset()
    js = b.to_json()
    assert js["degree"] == 4 and js["roots"][0]["mult"] in (1, 3)
