import itertools

import pytest

from grla.grading import Family, OutOfScopeError, build_grading, little_weyl
from grla.orbits import (
    EtaVector,
    character_of_eta,
    chi_k,
    component_group,
    eta_of,
    expected_k_range,
    expected_rank,
    is_quotient_case,
    orbit_table_json,
    same_orbit,
    weyl_orbits,
    zero_hat_characters,
)


def orbit_grid(max_r=4, max_pq=2):
    out = []
    for fam, orders in ((Family.A, (3, 5, 7)), (Family.C, (2, 4, 6, 8)), (Family.BD, (2, 4, 6))):
        for order in orders:
            for p, q in itertools.product(range(max_pq + 1), repeat=2):
                if fam is Family.BD and p == q == 0:
                    continue
                for r in range(1, max_r + 1):
                    try:
                        out.append(build_grading(fam, order, p, q, r))
                    except ValueError:
                        pass
    return out


GRID = orbit_grid()


def test_component_group_examples():
    a = component_group(build_grading("A", 5, 1, 1, 2))
    assert a.rank == 3 == expected_rank(build_grading("A", 5, 1, 1, 2))
    assert a.gamma_r_present
    c = component_group(build_grading("C", 4, 0, 0, 2))
    assert c.rank == 2 and c.gamma_r_present
    bd = component_group(build_grading("BD", 4, 0, 0, 3))
    assert bd.rank == 2 and not bd.gamma_r_present
    assert bd.generators() == ["gamma1", "gamma2"]
    with pytest.raises(OutOfScopeError):
        component_group(build_grading("C", 4, 0, 0, 0))


@pytest.mark.parametrize("spec", GRID + [build_grading("BD", 4, 0, 0, r) for r in (1, 2, 3)], ids=lambda s: s.short())
def test_rank_formula(spec):
    g = component_group(spec)
    assert g.rank == expected_rank(spec)
    assert g.rs_rank == (spec.r if g.gamma_r_present else spec.r - 1)
    assert len(zero_hat_characters(spec)) == 2 ** g.gamma_count


def test_zero_hat_examples():
    spec = build_grading("C", 6, 1, 1, 1)
    chars = zero_hat_characters(spec)
    assert len(chars) == 2
    for ch in chars:
        assert ch["alpha1"] == -1 and ch["beta1"] == -1
    assert len(zero_hat_characters(build_grading("BD", 4, 0, 0, 2))) == 2
    assert len(zero_hat_characters(build_grading("A", 3, 0, 0, 2))) == 2


def test_forced_values_alternate():
    spec = build_grading("A", 11, 2, 3, 1)
    ch = zero_hat_characters(spec)[0]
    assert [ch[f"alpha{i}"] for i in (1, 2)] == [-1, 1]
    assert [ch[f"beta{i}"] for i in (1, 2)] == [-1, 1]


def test_chi_k_eta_examples():
    spec = build_grading("C", 4, 0, 0, 3)
    group = component_group(spec)
    assert eta_of(group, chi_k(spec, 0)).signs == (1, 1, 1)
    assert eta_of(group, chi_k(spec, 3)).signs == (-1, -1, -1)
    spec2 = build_grading("C", 4, 0, 0, 2)
    assert eta_of(component_group(spec2), chi_k(spec2, 1)).signs == (-1, 1)
    with pytest.raises(ValueError):
        chi_k(spec, 4)


@pytest.mark.parametrize("spec", GRID, ids=lambda s: s.short())
def test_eta_round_trip(spec):
    group = component_group(spec)
    for ch in zero_hat_characters(spec):
        eta = eta_of(group, ch)
        assert character_of_eta(group, eta) == ch
        assert eta.canonical() == eta


def test_canonical_flip():
    assert EtaVector((1, -1), True).canonical().signs == (-1, 1)
    assert EtaVector((1, -1), False).canonical().signs == (1, -1)


def test_orbit_examples():
    a = weyl_orbits(build_grading("A", 3, 0, 0, 2))
    assert [(d.k, d.orbit_size, d.extra_z2) for d in a] == [(0, 1, False), (1, 1, True)]
    assert orbit_table_json(build_grading("A", 3, 0, 0, 2))[1] == {
        "k": 1,
        "orbit_size": 1,
        "stab0": ["G(3,1,1)", "G(3,1,1)"],
        "extra_z2": True,
    }
    for p, q in ((0, 0), (0, 1), (1, 0)):
        c = weyl_orbits(build_grading("C", 4, p, q, 2))
        assert [d.k for d in c] == [0, 1, 2]
    bd = weyl_orbits(build_grading("BD", 4, 1, 1, 2))
    assert [d.k for d in bd] == [0, 1, 2]
    assert [d.orbit_size for d in bd] == [1, 2, 1]


@pytest.mark.parametrize("spec", GRID, ids=lambda s: s.short())
def test_orbit_model(spec):
    orbits = weyl_orbits(spec)
    w = little_weyl(spec).order
    assert [d.k for d in orbits] == expected_k_range(spec)
    for d in orbits:
        assert d.orbit_size * d.stabilizer_order == w
        assert d.extra_z2 == (is_quotient_case(spec) and 2 * d.k == spec.r)
    group = component_group(spec)
    assert sum(d.orbit_size for d in orbits) == 2 ** group.rs_rank


def test_quotient_cases_by_family():
    assert is_quotient_case(build_grading("A", 5, 1, 0, 2))
    assert not is_quotient_case(build_grading("A", 5, 0, 1, 2))
    assert not is_quotient_case(build_grading("C", 4, 0, 0, 2))
    assert is_quotient_case(build_grading("BD", 6, 2, 0, 2))
    assert not is_quotient_case(build_grading("BD", 6, 1, 1, 2))


@pytest.mark.parametrize("spec", [s for s in GRID if s.r >= 2], ids=lambda s: s.short())
def test_complementary_orbits(spec):
    for k in range(spec.r + 1):
        if k == spec.r - k:
            continue
        assert same_orbit(spec, k, spec.r - k) == is_quotient_case(spec)


def test_bd_without_ends_is_out_of_range():
    with pytest.raises(OutOfScopeError):
        weyl_orbits(build_grading("BD", 4, 0, 0, 2))
