import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grla.exact import SymbolicPoly
from grla.grading import build_grading, iter_specs, little_weyl
from grla.semi_invariants import (
    BOTH,
    FACTOR,
    FREE,
    SENTINEL,
    CharacterParams,
    WeightVector,
    build_invariant,
    build_symbolic,
    det_weight,
    det_weight_from_pieces,
    free_indices,
    invariant_factorization,
    lattice_condition,
    semi_invariant_table,
    table_by_index,
    table_json,
    verify_semi_invariance,
)

H = Fraction(1, 2)
RANK_ONE = list(iter_specs(6))
SMALL = [s for s in iter_specs(3) if s.dims and max(s.dims) <= 3]


def w(spec, **exps):
    out = WeightVector.zero(spec)
    for key, e in exps.items():
        out += WeightVector.unit(spec, int(key[1:]), e)
    return out


def test_type_a_table_example():
    spec = build_grading("A", 3, 0, 1, 1)
    t = table_by_index(spec)
    assert t[1].degree == 2 and t[1].weight == w(spec, g1=-2)
    assert t[2].degree == 1 and t[2].weight == w(spec, g1=2)
    assert semi_invariant_table(spec)[0].role == SENTINEL


def test_type_c_table_example():
    spec = build_grading("C", 4, 0, 0, 1)
    t = table_by_index(spec)
    assert [t[i].degree for i in (1, 2, 3)] == [1, 1, 1]
    assert t[1].weight == w(spec, g1=-2)
    assert t[2].weight == w(spec, g1=1, g2=-1)
    assert t[3].weight == w(spec, g2=2)


def test_type_bd_table_example():
    spec = build_grading("BD", 4, 1, 1, 1)
    t = table_by_index(spec)
    assert t[1].weight == w(spec, g1=-2)
    assert t[2].weight == w(spec, g1=2)
    # both end pieces are reducible in this case
    assert t[1].reducible and t[2].reducible
    roles = [row.role for row in semi_invariant_table(spec)]
    assert roles[0] == roles[-1] == SENTINEL


@pytest.mark.parametrize(
    "args, exps",
    [
        (("A", 3, 0, 0, 1), {1: 2, 2: 1}),
        (("C", 4, 0, 0, 1), {1: 1, 2: 2, 3: 1}),
        (("A", 3, 0, 1, 1), {1: 1, 2: 1}),
    ],
)
def test_factorization_examples(args, exps):
    spec = build_grading(*args)
    fact = invariant_factorization(spec)
    assert fact.exponents == exps
    assert fact.degree(semi_invariant_table(spec)) == args[1]


@pytest.mark.parametrize("spec", RANK_ONE, ids=lambda s: s.short())
def test_factorization_invariants(spec):
    table = semi_invariant_table(spec)
    fact = invariant_factorization(spec)
    total = WeightVector.zero(spec)
    by_index = table_by_index(spec)
    for i, n in fact.exponents.items():
        total += by_index[i].weight * n
    assert total.is_zero()
    if not (spec.family.value == "BD" and spec.p == spec.q == 0):
        assert fact.degree(table) == little_weyl(spec).order
    # every row is free, a factor, or both
    free = set(free_indices(spec))
    for row in table:
        if row.role == SENTINEL:
            continue
        assert (row.index in free) == (row.role in (FREE, BOTH))
        assert (row.index in fact.exponents) == (row.role in (FACTOR, BOTH))


@pytest.mark.parametrize("spec", RANK_ONE, ids=lambda s: s.short())
def test_det_weight_matches_summand_count(spec):
    assert det_weight(spec) == det_weight_from_pieces(spec)


def test_det_weight_examples():
    c = build_grading("C", 4, 0, 0, 1)
    assert det_weight(c) == w(c, g1=-1, g2=1)
    # the two Det contributions cancel for this grading: one from Hom(M1,M0), two from Sym2(M1)
    a = build_grading("A", 3, 0, 1, 1)
    assert det_weight(a).is_zero()
    # in rank two the summand computation still applies
    bd = build_grading("BD", 4, 0, 0, 2)
    assert det_weight_from_pieces(bd).is_zero()
    with pytest.raises(ValueError):
        det_weight(bd)


def test_free_index_sets():
    assert free_indices(build_grading("A", 7, 1, 1, 1)) == [1, 2, 4]
    assert free_indices(build_grading("C", 8, 1, 1, 1)) == [1, 3, 4, 5]
    assert free_indices(build_grading("BD", 8, 1, 2, 1)) == [1, 3, 4]


def test_symbolic_examples():
    c = build_grading("C", 4, 0, 0, 1)
    f1 = build_symbolic(c, 1)
    assert f1.total_degree() == 1 and len(f1.terms) == 1

    a = build_grading("A", 3, 0, 1, 1)
    f1 = build_symbolic(a, 1)
    x = lambda n: SymbolicPoly.var(f1.variables, n)  # noqa: E731
    assert f1 == x("x1_1_1") ** 2 + x("x1_2_1") ** 2

    a0 = build_grading("A", 3, 0, 0, 1)
    f = build_invariant(a0)
    x = lambda n: SymbolicPoly.var(f.variables, n)  # noqa: E731
    assert f == x("x1_1_1") ** 2 * x("x2_1_1")


def test_symbolic_budget():
    spec = build_grading("A", 7, 0, 3, 1)
    with pytest.raises(OverflowError):
        build_symbolic(spec, 1, max_det_size=2)
    with pytest.raises(KeyError):
        build_symbolic(spec, 99)


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.short())
def test_declared_degrees_and_semi_invariance(spec):
    for row in semi_invariant_table(spec):
        f = build_symbolic(spec, row.index)
        assert f.is_homogeneous() and f.total_degree() == row.degree
        if row.role != SENTINEL:
            assert f.terms, "semi-invariant must be nonzero"
            assert verify_semi_invariance(spec, row.index, trials=3, seed=1).passed


def test_torus_example_and_identity():
    spec = build_grading("C", 4, 0, 0, 1)
    torus = {1: [Fraction(2)], 2: [Fraction(1)], 3: [Fraction(1)], 4: [Fraction(1)]}
    rep = verify_semi_invariance(spec, 1, tori=[torus])
    assert rep.passed
    f1 = build_symbolic(spec, 1)
    from grla.semi_invariants import act_on_poly, torus_scalings

    assert act_on_poly(f1, torus_scalings(spec, torus)) == f1 * Fraction(1, 4)
    ident = {i: [Fraction(1)] * spec.dim_M(i) for i in spec.indices}
    for row in table_by_index(spec).values():
        assert verify_semi_invariance(spec, row.index, tori=[ident]).passed


def test_wrong_character_is_detected():
    spec = build_grading("C", 4, 0, 0, 1)
    f1 = build_symbolic(spec, 1)
    from grla.semi_invariants import act_on_poly, torus_scalings

    torus = {1: [Fraction(3)], 2: [Fraction(5)], 3: [Fraction(1)], 4: [Fraction(1)]}
    assert act_on_poly(f1, torus_scalings(spec, torus)) != f1 * Fraction(1, 3)


def test_lattice_examples():
    spec = build_grading("A", 5, 0, 1, 1)
    assert free_indices(spec) == [1, 2]
    assert lattice_condition(spec, CharacterParams({1: -H, 2: 0}))
    assert not lattice_condition(spec, CharacterParams({2: H}))
    assert lattice_condition(spec, CharacterParams({}))
    with pytest.raises(ValueError):
        lattice_condition(spec, CharacterParams({3: 0}))


@settings(max_examples=60)
@given(st.sampled_from(RANK_ONE), st.data())
def test_lattice_condition_is_a_group(spec, data):
    free = free_indices(spec)
    vals = st.fractions(min_value=-3, max_value=3, max_denominator=2)
    a = CharacterParams({j: data.draw(vals) for j in free})
    b = CharacterParams({j: data.draw(vals) for j in free})
    if lattice_condition(spec, a) and lattice_condition(spec, b):
        assert lattice_condition(spec, CharacterParams({j: a.get(j) - b.get(j) for j in free}))
    # doubling lands every exponent in the integers
    assert lattice_condition(spec, CharacterParams({j: 2 * a.get(j) for j in free})) or any(
        (2 * a.get(j)).denominator != 1 for j in free
    )


def test_table_json_shape():
    rows = table_json(build_grading("A", 3, 0, 1, 1))
    assert rows[1] == {"index": 1, "degree": 2, "weight": {"g1": -2}, "role": BOTH, "reducible": True}


def test_random_torus_is_deterministic():
    spec = build_grading("BD", 6, 1, 1, 1)
    from grla.semi_invariants import random_torus

    assert random_torus(spec, random.Random(4)) == random_torus(spec, random.Random(4))
