"""Closed-form b-functions of the rank-one gradings, their roots and Fourier duals.

A b-function is stored as a multiset of roots: affine forms alpha in the
exponents s1, s2, ... standing for the factor (s - alpha). The scalar in front
is kept alongside but plays no role in any root computation.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable

from .exact import AffineForm, affine_specialize, rational_text
from .grading import Family, GradingSpec, OutOfScopeError, little_weyl
from .semi_invariants import (
    CharacterParams,
    WeightVector,
    check_params,
    det_weight,
    free_indices,
    invariant_factorization,
    lattice_condition,
    table_by_index,
)

HALF = Fraction(1, 2)
OUTSIDE_DISPLAY = "outside_displayed_regime"


class NotInLatticeError(ValueError):
    """The exponents do not define a character of K."""


@dataclass
class BFunction:
    roots: list[tuple[AffineForm, int]]
    scalar: Fraction = Fraction(1)
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        merged: dict[AffineForm, int] = {}
        for form, mult in self.roots:
            if not isinstance(form, AffineForm):
                form = AffineForm(form)
            if mult < 1:
                raise ValueError("multiplicities must be positive")
            merged[form] = merged.get(form, 0) + mult
        self.roots = sorted(merged.items(), key=lambda t: t[0].sort_key())

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def root_multiset(self) -> Counter:
        return Counter({form: m for form, m in self.roots})

    def specialize(self, values: dict[str, Fraction]) -> Counter:
        """Rational roots (with multiplicity) once every s_j is given a value."""
        out: Counter = Counter()
        for form, m in self.roots:
            out[affine_specialize(form, values)] += m
        return out

    def substitute(self, assignment) -> "BFunction":
        return BFunction([(f.substitute(assignment), m) for f, m in self.roots], self.scalar, self.flags)

    def negated(self) -> "BFunction":
        return BFunction([(-f, m) for f, m in self.roots], self.scalar, self.flags)

    def factor_text(self, form: AffineForm) -> str:
        neg = -form
        if neg.is_constant() and neg.constant == 0:
            return "s"
        return "s + " + neg.to_text() if not neg.to_text().startswith("-") else "s - " + neg.to_text()[1:]

    def to_text(self) -> str:
        parts = []
        for form, m in self.roots:
            f = self.factor_text(form)
            base = f if f == "s" else f"({f})"
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {
            "roots": [
                {"form": self.factor_text(form), "root": form.to_text(), "mult": m} for form, m in self.roots
            ],
            "scalar": rational_text(self.scalar),
            "degree": self.degree,
            "flags": sorted(self.flags),
        }


def _s(j: int) -> AffineForm:
    return AffineForm.param(f"s{j}")


def _sum(indices: Iterable[int]) -> AffineForm:
    out = AffineForm()
    for j in indices:
        out = out + _s(j)
    return out


def params_assignment(spec: GradingSpec, params: CharacterParams) -> dict[str, Fraction]:
    check_params(spec, params)
    return {f"s{j}": params.get(j) for j in free_indices(spec)}


def closed_form_b(spec: GradingSpec, params: CharacterParams | None = None, allow_outside: bool = False) -> BFunction:
    """b_{f,chi} from the per-family product formulas.

    With `params=None` the roots stay symbolic in s1, s2, .... In type BD the
    formula is only stated for q >= 2; other BD cases raise unless
    `allow_outside`, in which case the result carries a flag.
    """
    b = _closed_form(spec, allow_outside)
    if params is not None:
        b = b.substitute(params_assignment(spec, params))
    return b


@lru_cache(maxsize=None)
def _closed_form(spec: GradingSpec, allow_outside: bool) -> BFunction:
    spec.require_rank(1)
    l, p, q = spec.l, spec.p, spec.q
    factors: list[tuple[AffineForm, int]] = []  # (c, mult) meaning (s + c)^mult

    def middle(lo, hi):
        for j in range(lo, hi + 1):
            factors.append((_s(j) * HALF, 1))
            factors.append(((_s(j) - 1) * HALF, 1))

    flags = set()
    if spec.family is Family.A:
        for j in range(1, q + 1):
            factors.append((_sum(range(j, q + 1)) + Fraction(q - j, 2), 2))
        if p == 0:
            factors.append((AffineForm(), 1))
        else:
            base = l - p + 1
            factors.append((AffineForm(), 2))
            factors.append((_sum(base + a for a in range(1, p + 1)) + Fraction(p, 2), 1))
            for j in range(1, p):
                factors.append((_sum(base + a for a in range(1, j + 1)) + Fraction(j, 2), 2))
        middle(q + 1, l - p)
        scalar = Fraction(2) ** spec.order
    elif spec.family is Family.C:
        if q == 0:
            factors.append((AffineForm(), 1))
        else:
            factors.append((AffineForm(), 2))
            factors.append((_sum(range(1, q + 1)) + Fraction(q, 2), 1))
            for j in range(2, q + 1):
                factors.append((_sum(range(j, q + 1)) + Fraction(q - j + 1, 2), 2))
        base = l - p + 1
        if p == 0:
            factors.append((_s(l + 1), 1))
        else:
            factors.append((_s(base), 2))
            factors.append((_sum(base + a for a in range(0, p + 1)) + Fraction(p, 2), 1))
            for j in range(1, p):
                factors.append((_sum(base + a for a in range(0, j + 1)) + Fraction(j, 2), 2))
        middle(q + 2, l - p)
        scalar = Fraction(1)
    else:
        if q < 2:
            if not allow_outside:
                raise OutOfScopeError(
                    f"{spec.short()}: the BD product formula is stated for q >= 2; use the oracle"
                )
            flags.add(OUTSIDE_DISPLAY)
        factors.append((AffineForm(), 2))
        for j in range(1, q):
            factors.append((_sum(range(j, q)) + Fraction(q - j, 2), 2))
        base = l - p + 1
        for j in range(0, p):
            factors.append((_sum(base + a for a in range(0, j + 1)) + Fraction(j, 2), 2))
        middle(q + 1, l - p)
        scalar = Fraction(2) ** spec.order
    return BFunction([(-c, m) for c, m in factors], scalar, frozenset(flags))


def expected_degree(spec: GradingSpec) -> int:
    """|W_a| in rank one, i.e. d in type A and m in types C and BD (outside BD p=q=0)."""
    return little_weyl(spec).order


def _require_lattice(spec: GradingSpec, params: CharacterParams):
    if not lattice_condition(spec, params):
        raise NotInLatticeError(f"{spec.short()}: {params.to_json()} is not a character of K")


def specialized_roots(spec: GradingSpec, params: CharacterParams) -> Counter:
    b = closed_form_b(spec)
    return b.specialize(params_assignment(spec, params))


def roots_in_unit_interval(spec: GradingSpec, params: CharacterParams) -> bool:
    """Every root of b_{f,chi} lies in [0, 1)."""
    _require_lattice(spec, params)
    return all(0 <= a < 1 for a in specialized_roots(spec, params))


def roots_in_dual_interval(roots: Iterable[Fraction]) -> bool:
    """Every root lies in (-1, 0]."""
    return all(-1 < a <= 0 for a in roots)


def partial_sum_conditions(spec: GradingSpec, params: CharacterParams) -> bool:
    """The listed partial-sum conditions for the roots to lie in [0, 1), evaluated directly."""
    spec.require_rank(1)
    check_params(spec, params)
    l, p, q = spec.l, spec.p, spec.q
    s = params.get

    def in_pair(value, j, shift=0):
        return value in (Fraction(-(j + shift), 2), Fraction(-(j + shift + 1), 2))

    base = l - p + 1
    if spec.family is Family.A:
        if any(s(j) != 0 for j in range(q + 1, l - p + 1)):
            return False
        for j in range(1, p + 1):
            if not in_pair(sum(s(base + i) for i in range(1, j + 1)), j):
                return False
        for j in range(0, q):
            if not in_pair(sum(s(q - i) for i in range(0, j + 1)), j):
                return False
        return True
    if spec.family is Family.C:
        for j in range(0, q):
            if not in_pair(sum(s(q - i) for i in range(0, j + 1)), j, shift=1):
                return False
        if any(s(j) != 0 for j in range(q + 2, l - p + 1)):
            return False
        for j in range(0, p + 1):
            if not in_pair(sum(s(base + i) for i in range(0, j + 1)), j):
                return False
        return True
    for j in range(1, q):
        if not in_pair(sum(s(q - i) for i in range(1, j + 1)), j):
            return False
    if any(s(j) != 0 for j in range(q + 1, l - p + 1)):
        return False
    for j in range(0, p):
        if not in_pair(sum(s(base + i) for i in range(0, j + 1)), j):
            return False
    return True


@lru_cache(maxsize=None)
def _dual_rules(spec: GradingSpec) -> dict[int, tuple[int, int]]:
    """Per free index j, (sign, shift) with s*_j = sign * s_j + shift."""
    l, p, q = spec.l, spec.p, spec.q
    rules = {}
    if spec.family is Family.A:
        for j in list(range(1, q)) + list(range(l - p + 2, l + 2)):
            rules[j] = (-1, -1)
        if q >= 1:
            rules[q] = (-1, 0)
        for j in range(q + 1, l - p + 1):
            rules[j] = (-1, 1)
    elif spec.family is Family.C:
        for j in list(range(1, q + 1)) + list(range(l - p + 2, l + 2)):
            rules[j] = (-1, -1)
        for j in range(q + 2, l - p + 1):
            rules[j] = (-1, 1)
        rules[l - p + 1] = (-1, 0)
    else:
        for j in list(range(1, q)) + list(range(l - p + 2, l + 1)):
            rules[j] = (-1, -1)
        for j in range(q + 1, l - p + 1):
            rules[j] = (-1, 1)
        if p >= 1:
            rules[l - p + 1] = (-1, 0)
    if sorted(rules) != free_indices(spec):
        raise AssertionError(f"{spec.short()}: dual rules cover {sorted(rules)}, free set {free_indices(spec)}")
    return rules


def dual_exponents(spec: GradingSpec, params: CharacterParams) -> CharacterParams:
    spec.require_rank(1)
    check_params(spec, params)
    return CharacterParams({j: sign * params.get(j) + shift for j, (sign, shift) in _dual_rules(spec).items()})


def dual_substitution(spec: GradingSpec) -> dict[str, AffineForm]:
    """The explicit dual map as affine forms, for symbolic comparisons."""
    return {f"s{j}": _s(j) * sign + shift for j, (sign, shift) in _dual_rules(spec).items()}


def _solve(columns: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One exact solution of sum_k x_k columns[k] = rhs (free unknowns set to 0), or None."""
    nrows = len(rhs)
    ncols = len(columns)
    aug = [[Fraction(columns[c][r]) for c in range(ncols)] + [Fraction(rhs[r])] for r in range(nrows)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if aug[r][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        lead = aug[row][col]
        aug[row] = [v / lead for v in aug[row]]
        for r in range(nrows):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, nrows):
        if aug[r][-1]:
            return None
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = aug[r][-1]
    return x


def dual_exponents_from_weights(spec: GradingSpec, params: CharacterParams) -> CharacterParams:
    """Dual exponents from sum_i (s*_i + s_i) w(chi_i) = -w(Det) over the free indices.

    The solution is unique up to relations among the free characters; compare
    with :func:`same_character`.
    """
    spec.require_rank(1)
    check_params(spec, params)
    shift = _weight_shift(spec)
    return CharacterParams({j: xj - params.get(j) for j, xj in shift.items()})


@lru_cache(maxsize=None)
def _weight_shift(spec: GradingSpec) -> dict[int, Fraction]:
    # one solution x of sum_j x_j w(chi_j) = -w(Det)
    table = table_by_index(spec)
    free = free_indices(spec)
    cols = [list(table[j].weight.exponents) for j in free]
    rhs = [-e for e in det_weight(spec).exponents]
    x = _solve(cols, rhs)
    if x is None:
        raise ArithmeticError(f"{spec.short()}: -Det is not in the span of the free characters")
    return dict(zip(free, x))


@lru_cache(maxsize=None)
def _weight_columns(spec: GradingSpec) -> tuple:
    # sparse (position, exponent) lists per free index
    table = table_by_index(spec)
    return tuple(
        (j, tuple((k, e) for k, e in enumerate(table[j].weight.exponents) if e)) for j in free_indices(spec)
    )


def character_weight(spec: GradingSpec, params: CharacterParams) -> list[Fraction]:
    """sum_j s_j w(chi_j) as a rational vector over the GL factors."""
    out = [Fraction(0)] * len(WeightVector.zero(spec).exponents)
    for j, entries in _weight_columns(spec):
        v = params.get(j)
        if v:
            for k, e in entries:
                out[k] += v * e
    return out


def same_character(spec: GradingSpec, a: CharacterParams, b: CharacterParams) -> bool:
    """Whether two exponent tuples give the same character (difference is a relation)."""
    if character_weight(spec, a) != character_weight(spec, b):
        return False
    diff = {j: a.get(j) - b.get(j) for j in free_indices(spec)}
    if not any(diff.values()):
        return True
    # a nonzero difference must be a multiple of the factorization vector
    n = invariant_factorization(spec).exponents
    if any(j not in n for j, v in diff.items() if v):
        return False
    ratios = {diff.get(j, Fraction(0)) / k for j, k in n.items()}
    return len(ratios) == 1


def negation_duality_check(spec: GradingSpec, params: CharacterParams) -> bool:
    spec.require_rank(1)
    roots = specialized_roots(spec, params)
    dual = specialized_roots(spec, dual_exponents(spec, params))
    return dual == Counter({-a: m for a, m in roots.items()})


def symbolic_negation_duality(spec: GradingSpec) -> bool:
    """Same check with the exponents left symbolic."""
    b = closed_form_b(spec)
    dual = b.substitute(dual_substitution(spec))
    return dual.root_multiset() == b.negated().root_multiset()


@dataclass
class DistinguishedCharacter:
    params: CharacterParams
    b: BFunction  # closed form specialized at params (None when the closed form is not stated)
    display: Counter  # roots of the specialized product display
    sign: int | None  # value on gamma_1, None when not defined
    flags: frozenset = frozenset()

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "b": self.b.to_json() if self.b is not None else None,
            "display_roots": [
                {"root": rational_text(a), "mult": m} for a, m in sorted(self.display.items())
            ],
            "sign_gamma1": self.sign,
            "flags": sorted(self.flags),
        }


def _display_roots(spec: GradingSpec, t: Fraction) -> Counter:
    l, p, q = spec.l, spec.p, spec.q
    c: Counter = Counter()
    if spec.family is Family.A:
        pieces = [(Fraction(0), l + p - q + 1), (HALF, l - p - q), (-t, 2 * q)]
    elif spec.family is Family.C:
        pieces = [(Fraction(0), l - p + q), (HALF, l - p - q - 1), (-t, 2 * p + 1)]
    else:
        pieces = [(Fraction(0), l - p + q), (HALF, l - p - q), (-t, 2 * p)]
    for a, m in pieces:
        if m < 0:
            raise AssertionError("negative multiplicity in display")
        if m:
            c[a] += m
    return c


def _parity_sign(exponent: Fraction) -> int:
    if exponent.denominator != 1:
        raise ValueError(f"sign exponent {exponent} is not an integer")
    return -1 if exponent.numerator % 2 else 1


def distinguished_characters(spec: GradingSpec) -> list[DistinguishedCharacter]:
    """The characters whose restriction to I lies in the alternating set, with b and sign."""
    spec.require_rank(1)
    l, p, q = spec.l, spec.p, spec.q
    fam = spec.family
    if fam is Family.A:
        halves = list(range(1, q)) + list(range(l - p + 2, l + 2))
        pivot = q if q >= 1 else None
    elif fam is Family.C:
        halves = list(range(1, q + 1)) + list(range(l - p + 2, l + 2))
        pivot = l - p + 1
    else:
        halves = list(range(1, q))
        if p >= 1:
            halves += list(range(l - p + 2, l + 1))
            pivot = l - p + 1
        else:
            pivot = None
    flags = frozenset({OUTSIDE_DISPLAY}) if fam is Family.BD and q < 2 else frozenset()
    out = []
    for t in ([Fraction(0), -HALF] if pivot is not None else [Fraction(0)]):
        s = {j: -HALF for j in halves}
        if pivot is not None:
            s[pivot] = t
        params = CharacterParams(s)
        b = None if flags else closed_form_b(spec, params)
        if fam is Family.A:
            sign = _parity_sign(p + q + 1 + 2 * t) if q >= 1 else None
        elif fam is Family.C:
            sign = _parity_sign(p + q + 2 * t)
        else:
            # gamma_1 only exists when both ends are present
            sign = _parity_sign(p + q + 2 * t) if min(p, q) >= 1 else None
        out.append(DistinguishedCharacter(params, b, _display_roots(spec, t), sign, flags))
    return out


def constant_roots(b: BFunction) -> Counter:
    """Roots of a fully specialized b-function as rationals."""
    out: Counter = Counter()
    for form, m in b.roots:
        if not form.is_constant():
            raise ValueError(f"root {form.to_text()} is not specialized")
        out[form.constant] += m
    return out
