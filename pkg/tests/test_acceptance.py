"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line which the terminal summary prints at
the end of the run. All comparisons are exact; nothing here uses floats.
"""

import itertools
import time
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial

from conftest import ACCEPTANCE_LINES
from grla.bfunction import (
    character_weight,
    closed_form_b,
    distinguished_characters,
    dual_exponents,
    dual_exponents_from_weights,
    expected_degree,
    negation_duality_check,
    params_assignment,
    partial_sum_conditions,
    roots_in_unit_interval,
    same_character,
)
from grla.exact import AffineForm, rotation_of
from grla.grading import Family, ReflectionGroupDesc, build_grading, iter_specs, little_weyl
from grla.oracle import Budget, compute_b_oracle, crosscheck, in_budget_specs, laplacian_b
from grla.orbits import component_group, expected_k_range, is_quotient_case, weyl_orbits
from grla.semi_invariants import CharacterParams, free_indices, lattice_condition
from grla.sheaves import (
    all_monodromy,
    enumerate_sheaves,
    expected_count,
    irrep_dimension,
    monodromy_polynomial,
    multipartitions,
    rank_check,
)

H = Fraction(1, 2)
GRID_VALUES = sorted({Fraction(n, d) for d in (1, 2) for n in range(-3, 4)})


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES[n] = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    assert ok, detail


def has_display(spec) -> bool:
    # the BD product formula is stated for q >= 2 only
    return not (spec.family is Family.BD and spec.q < 2)


@lru_cache(maxsize=None)
def oracle_b(spec):
    return compute_b_oracle(spec)


def lattice_grid(spec):
    free = free_indices(spec)
    for combo in itertools.product(GRID_VALUES, repeat=len(free)):
        prm = CharacterParams(dict(zip(free, combo)))
        if lattice_condition(spec, prm):
            yield prm


def test_c1_laplacian():
    start = time.perf_counter()
    bad = []
    for n in range(2, 7):
        b = laplacian_b(n)
        want = Counter([AffineForm(0), AffineForm(1 - Fraction(n, 2))])
        if b.scalar != 4 or b.root_multiset() != want:
            bad.append(n)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1
    record(1, ok, f"Laplacian b = 4s(s-1+n/2) for n=2..6, mismatches {bad}, {elapsed:.2f}s")


def test_c2_oracle_matches_closed_form():
    specs = in_budget_specs()
    matched, oracle_only, bad = 0, 0, []
    for spec in specs:
        rep = crosscheck(spec)
        if has_display(spec):
            if rep.match is True:
                matched += 1
            else:
                bad.append(spec.short())
        else:
            # no closed form to compare; the degree is still checked in criterion 3
            oracle_only += 1
            if rep.match is not None:
                bad.append(spec.short())
    ok = not bad and matched > 0
    record(
        2,
        ok,
        f"{matched} in-budget specs match the closed form exactly, "
        f"{oracle_only} BD q<2 specs oracle-only, mismatches {bad}",
    )


def test_c3_degree_identity():
    closed, bad = 0, []
    for spec in iter_specs(6):
        if not has_display(spec):
            continue
        closed += 1
        if closed_form_b(spec).degree != little_weyl(spec).order or expected_degree(spec) != spec.order:
            bad.append(spec.short())
    budget = Budget()
    outside = [s for s in iter_specs(6) if not has_display(s)]
    checked = [s for s in outside if budget.admits(s)]
    halved = []
    for spec in checked:
        deg = oracle_b(spec).b.degree
        if deg != spec.order:
            bad.append(spec.short())
        if spec.p == spec.q == 0:
            # W_a = G(m,2,1) here; f is the square of the degree m/2 generator
            if 2 * little_weyl(spec).order != deg:
                bad.append(spec.short())
            halved.append(spec.short())
        elif deg != expected_degree(spec):
            bad.append(spec.short())
    # the closed forms above cover every non-BD-q<2 spec, so the two families of checks
    # together leave only the over-budget BD q<2 specs unexamined
    ok = not bad
    record(
        3,
        ok,
        f"deg b = |W_a| for {closed} closed-form specs (l<=6); oracle degree = m for "
        f"{len(checked)}/{len(outside)} BD q<2 specs within budget, where BD p=q=0 "
        f"({len(halved)} specs) has m = 2|W_a|; mismatches {bad}",
    )


def test_c4_interval_classification():
    points, bad = 0, []
    for spec in iter_specs(4):
        if not has_display(spec):
            continue
        for prm in lattice_grid(spec):
            points += 1
            if roots_in_unit_interval(spec, prm) != partial_sum_conditions(spec, prm):
                bad.append((spec.short(), prm.s))
    record(4, not bad, f"interval test agrees with partial-sum conditions at {points} lattice points, {len(bad)} mismatches")


def test_c5_duality():
    points, bad = 0, []
    for spec in iter_specs(4):
        if not has_display(spec):
            continue
        for prm in lattice_grid(spec):
            points += 1
            star = dual_exponents(spec, prm)
            if not same_character(spec, star, dual_exponents_from_weights(spec, prm)):
                bad.append((spec.short(), prm.s, "s*"))
            elif not negation_duality_check(spec, prm):
                bad.append((spec.short(), prm.s, "roots"))
    record(5, not bad, f"dual exponents and root negation agree at {points} lattice points, {len(bad)} mismatches")


def gamma1_sign(spec, params) -> int:
    """chi(gamma_1) computed from the weight of chi.

    In rank one gamma_1 negates exactly one line inside every GL factor of K, so
    det(gamma_1 | M_j) = -1 there and chi(gamma_1) = (-1)^(sum of det exponents).
    """
    total = sum(character_weight(spec, params))
    assert total.denominator == 1
    return -1 if total.numerator % 2 else 1


def test_c6_distinguished_characters():
    displays, signs, oracle_displays, bad = 0, 0, 0, []
    budget = Budget()
    for spec in iter_specs(6):
        gamma_defined = component_group(spec).gamma_r_present
        for dc in distinguished_characters(spec):
            if dc.b is not None:
                displays += 1
                if dc.b.specialize({}) != dc.display:
                    bad.append((spec.short(), "display"))
            elif budget.admits(spec):
                oracle_displays += 1
                if oracle_b(spec).b.specialize(params_assignment(spec, dc.params)) != dc.display:
                    bad.append((spec.short(), "oracle display"))
            if (dc.sign is not None) != gamma_defined:
                bad.append((spec.short(), "sign domain"))
            elif dc.sign is not None:
                signs += 1
                if dc.sign != gamma1_sign(spec, dc.params):
                    bad.append((spec.short(), "sign"))
    ok = not bad
    record(
        6,
        ok,
        f"{displays} closed-form and {oracle_displays} oracle specializations equal the displays, "
        f"{signs} gamma_1 signs agree with the weight computation; mismatches {bad}",
    )


def orbit_specs():
    for spec in iter_specs(6, r_values=range(1, 7)):
        if spec.p > 3 or spec.q > 3:
            continue
        if spec.family is Family.BD and spec.p == spec.q == 0:
            continue
        yield spec


def test_c7_orbit_model():
    start = time.perf_counter()
    count, bad = 0, []
    for spec in orbit_specs():
        count += 1
        orbits = weyl_orbits(spec)
        w = little_weyl(spec).order
        m0 = spec.order
        r = spec.r
        want_k = list(range(r // 2 + 1)) if is_quotient_case(spec) else list(range(r + 1))
        if [d.k for d in orbits] != want_k or want_k != expected_k_range(spec):
            bad.append((spec.short(), "representatives"))
        for d in orbits:
            extra = is_quotient_case(spec) and 2 * d.k == r
            stab = ReflectionGroupDesc(m0, 1, d.k).order * ReflectionGroupDesc(m0, 1, r - d.k).order
            if extra:
                stab *= 2
            if d.extra_z2 != extra or d.stabilizer_order != stab or d.orbit_size * stab != w:
                bad.append((spec.short(), d.k))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record(7, ok, f"orbit model holds for {count} specs (r<=6, p,q<=3), mismatches {bad[:5]}, {elapsed:.2f}s")


def test_c8_representation_sums():
    bad = []
    for m0 in range(1, 7):
        for k in range(6):
            g = ReflectionGroupDesc(m0, 1, k)
            total = sum(irrep_dimension(g, lam) ** 2 for lam in multipartitions(m0, k))
            if total != m0 ** k * factorial(k):
                bad.append((m0, k))
    ranks = 0
    for spec in orbit_specs():
        w = little_weyl(spec).order
        for k in expected_k_range(spec):
            ranks += 1
            if rank_check(spec, k) != w:
                bad.append((spec.short(), k))
    record(8, not bad, f"sum dim^2 = m0^k k! for m0<=6, k<=5 and {ranks} rank checks = |W_a|, mismatches {bad[:5]}")


def test_c9_monodromy():
    count, bad = 0, []
    for spec in iter_specs(6):
        if spec.family is Family.BD and spec.p == spec.q == 0:
            continue
        w = little_weyl(spec).order
        for dc, R in all_monodromy(spec):
            count += 1
            want = Counter()
            for a, mult in dc.display.items():
                alpha = -a
                if not (-1 < alpha <= 0):
                    bad.append((spec.short(), "dual root outside (-1,0]"))
                want[rotation_of(alpha)] += mult
            if R.degree != w or R.eigenvalues() != want:
                bad.append(spec.short())
    c4 = build_grading("C", 4, 0, 0, 1)
    dc = next(d for d in distinguished_characters(c4) if d.params.get(3) == 0)
    fixture = monodromy_polynomial(c4, dc).integer_coefficients()
    if fixture != [1, -2, 0, 2, -1]:  # (x-1)^3 (x+1)
        bad.append(("C4 fixture", fixture))
    record(9, not bad, f"{count} monodromy polynomials have degree |W_a| and the dual-root eigenvalues; C4 fixture (x-1)^3(x+1); mismatches {bad}")


def independent_count(spec) -> int:
    """Count from multipartitions alone, applying the delta-split rule by hand."""
    m0, r = spec.order, spec.r
    total = 0
    for k in expected_k_range(spec):
        a, b = len(multipartitions(m0, k)), len(multipartitions(m0, r - k))
        if is_quotient_case(spec) and 2 * k == r:
            # unordered distinct pairs, plus two labels per diagonal pair
            total += a * (a - 1) // 2 + 2 * a
        else:
            total += a * b
    return total


def test_c10_counts():
    cases = [(("A", 3, 0, 0, 2), 18), (("A", 3, 0, 1, 1), 6), (("C", 4, 0, 0, 1), 8)]
    bad = []
    for args, want in cases:
        spec = build_grading(*args)
        got = len(enumerate_sheaves(spec))
        if not got == want == expected_count(spec) == independent_count(spec):
            bad.append((args, got))
    record(10, not bad, f"sheaf counts 18, 6, 8 reproduced and recomputed from multipartitions, mismatches {bad}")
