"""Fundamental semi-invariants of (K, g_1) in rank one.

Each f_i comes with its degree, its character (as exponents of det(g_j) over
the GL factors of K) and, on request, its expansion as a polynomial in the
coordinates of g_1. Forms on M_0 and M_l are the identity matrix.
"""
from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .exact import SymbolicPoly, as_rational, det, matmul, rational_text, transpose
from .grading import Family, GradingSpec, g1_pieces, gl_indices

DEFAULT_MAX_DET_SIZE = 6

FREE = "FreeParameter"
FACTOR = "InvariantFactor"
BOTH = "Both"
SENTINEL = "Sentinel"


@dataclass(frozen=True)
class WeightVector:
    """Exponents of det(g_j) for the GL factors of K, keyed by j."""

    indices: tuple[int, ...]
    exponents: tuple[int, ...]

    @classmethod
    def zero(cls, spec: GradingSpec) -> "WeightVector":
        idx = tuple(gl_indices(spec))
        return cls(idx, (0,) * len(idx))

    @classmethod
    def unit(cls, spec: GradingSpec, j: int, power: int = 1) -> "WeightVector":
        idx = tuple(gl_indices(spec))
        # SO factors (and M_0 in types A, BD) have trivial determinant
        return cls(idx, tuple(power if i == j else 0 for i in idx))

    def __add__(self, other: "WeightVector") -> "WeightVector":
        if self.indices != other.indices:
            raise ValueError("weights for different groups")
        return WeightVector(self.indices, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __neg__(self):
        return WeightVector(self.indices, tuple(-a for a in self.exponents))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return WeightVector(self.indices, tuple(a * k for a in self.exponents))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.exponents)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.indices, self.exponents))

    def to_json(self) -> dict:
        return {f"g{i}": e for i, e in zip(self.indices, self.exponents) if e}

    def to_text(self) -> str:
        parts = [f"det(g{i})^{e}" if e != 1 else f"det(g{i})" for i, e in zip(self.indices, self.exponents) if e]
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class SemiInvariant:
    index: int
    degree: int
    weight: WeightVector
    role: str
    kind: str  # which formula of the table produced it
    reducible: bool = False


@dataclass(frozen=True)
class InvariantFactorization:
    exponents: dict[int, int]

    def degree(self, table: list[SemiInvariant]) -> int:
        by_index = {si.index: si for si in table}
        return sum(n * by_index[i].degree for i, n in self.exponents.items())


@dataclass
class CharacterParams:
    """Exponents s_j of u = prod f_j^{s_j} over the free indices; absent entries are zero."""

    s: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.s = {int(k): as_rational(v) for k, v in self.s.items()}

    def get(self, j: int) -> Fraction:
        return self.s.get(j, Fraction(0))

    def as_names(self) -> dict[str, Fraction]:
        return {f"s{j}": v for j, v in self.s.items()}

    def to_json(self) -> dict:
        return {f"s{j}": rational_text(v) for j, v in sorted(self.s.items())}


def _require_rank_one(spec: GradingSpec):
    spec.require_rank(1)


def free_indices(spec: GradingSpec) -> list[int]:
    """Indices j carrying a free exponent s_j in u."""
    return list(_free_indices(spec))


@lru_cache(maxsize=None)
def _free_indices(spec: GradingSpec) -> tuple[int, ...]:
    l, p, q = spec.l, spec.p, spec.q
    if spec.family is Family.A:
        return tuple(range(1, l - p + 1)) + tuple(range(l - p + 2, l + 2))
    if spec.family is Family.C:
        return tuple(range(1, q + 1)) + tuple(range(q + 2, l + 2))
    return tuple(range(1, q)) + tuple(range(q + 1, l + 1))


def check_params(spec: GradingSpec, params: CharacterParams) -> None:
    free = _free_indices(spec)
    bad = sorted(j for j in params.s if j not in free)
    if bad:
        raise ValueError(f"{spec.short()}: indices {bad} are outside the free set {sorted(free)}")


def semi_invariant_table(spec: GradingSpec, include_sentinels: bool = True) -> list[SemiInvariant]:
    return list(_table(spec, include_sentinels))


@lru_cache(maxsize=None)
def _table(spec: GradingSpec, include_sentinels: bool) -> tuple[SemiInvariant, ...]:
    _require_rank_one(spec)
    l, p, q = spec.l, spec.p, spec.q
    fam = spec.family
    e = lambda j, k=1: WeightVector.unit(spec, j, k)  # noqa: E731
    rows: list[tuple[int, int, WeightVector, str, bool]] = []
    if fam is Family.C:
        rows.append((1, q + 1, e(1, -2), "det", False))
        for i in range(2, q + 2):
            rows.append((i, (2 * i - 1) * (q - i + 2), e(i, -2), "gram_sym", False))
        middle = range(q + 2, l - p + 1)
    else:
        for i in range(1, q + 1):
            rows.append((i, 2 * i * (q - i + 1), e(i, -2), "gram", q == 1 and i == 1))
        middle = range(q + 1, l - p + 1)
    for i in middle:
        rows.append((i, 1, e(i - 1) - e(i), "coordinate", False))
    for i in range(l - p + 1, l + 1):
        if fam is Family.BD:
            deg = 2 * (l - i + 1) * (i - l + p)
            rows.append((i, deg, e(i - 1, 2), "outer", p == 1 and i == l))
        else:
            deg = (2 * (l - i + 1) + 1) * (i - l + p)
            rows.append((i, deg, e(i - 1, 2), "outer_sym", False))
    if fam is not Family.BD:
        rows.append((l + 1, p + 1, e(l, 2), "det", False))

    free = set(free_indices(spec))
    fact = invariant_factorization(spec).exponents
    table = []
    if include_sentinels and fam is not Family.C:
        table.append(SemiInvariant(0, 0, WeightVector.zero(spec), SENTINEL, "one"))
    for i, deg, w, kind, red in rows:
        in_f = fact.get(i, 0) > 0
        role = BOTH if (i in free and in_f) else FACTOR if in_f else FREE
        if i not in free and not in_f:
            raise AssertionError(f"f_{i} is neither free nor a factor")
        table.append(SemiInvariant(i, deg, w, role, kind, red))
    if include_sentinels and fam is Family.BD:
        table.append(SemiInvariant(l + 1, 0, WeightVector.zero(spec), SENTINEL, "one"))
    return tuple(table)


def table_by_index(spec: GradingSpec) -> dict[int, SemiInvariant]:
    return {si.index: si for si in semi_invariant_table(spec, include_sentinels=False)}


def invariant_factorization(spec: GradingSpec) -> InvariantFactorization:
    """Exponents n_i with f = prod f_i^{n_i}; sentinel indices (f = 1) are dropped."""
    return InvariantFactorization(dict(_factorization(spec)))


@lru_cache(maxsize=None)
def _factorization(spec: GradingSpec) -> tuple[tuple[int, int], ...]:
    _require_rank_one(spec)
    l, p, q = spec.l, spec.p, spec.q
    if spec.family is Family.C:
        lo = q + 1
    else:
        lo = q
    n: dict[int, int] = {}
    if lo >= 1:
        n[lo] = 1
    for i in range(lo + 1, l - p + 1):
        n[i] = 2
    top = l - p + 1
    if not (spec.family is Family.BD and top == l + 1):
        n[top] = n.get(top, 0) + 1
    return tuple(n.items())


def det_weight(spec: GradingSpec) -> WeightVector:
    """Character of K acting on the top exterior power of g_1, from the closed formula."""
    _require_rank_one(spec)
    l, p, q = spec.l, spec.p, spec.q
    e = lambda j, k=1: WeightVector.unit(spec, j, k)  # noqa: E731
    w = WeightVector.zero(spec)
    if spec.family is Family.C:
        for j in range(1, q + 1):
            w += e(j, -2)
        w += e(q + 1, -1)
        top = l
    else:
        for j in range(1, q):
            w += e(j, -2)
        w += e(q, -1)
        top = l if spec.family is Family.A else l - 1
    w += e(l - p)
    for j in range(l - p + 1, top + 1):
        w += e(j, 2)
    return w


def det_weight_from_pieces(spec: GradingSpec) -> WeightVector:
    """Same character, summed summand by summand from the torus action on g_1."""
    w = WeightVector.zero(spec)
    for pc in g1_pieces(spec):
        if pc.kind == "Hom":
            # x -> g_t x g_s^{-1}
            w += WeightVector.unit(spec, pc.target, pc.source_dim)
            w += WeightVector.unit(spec, pc.source, -pc.target_dim)
        elif pc.kind == "Sym2":
            w += WeightVector.unit(spec, pc.source, pc.source_dim + 1)
        else:
            w += WeightVector.unit(spec, pc.source, -(pc.source_dim + 1))
    return w


# symbolic expansion


def coordinate_names(spec: GradingSpec) -> list[str]:
    names = []
    for pc in g1_pieces(spec):
        names.extend(_piece_names(pc))
    return names


def _piece_names(pc) -> list[str]:
    a = pc.arrow
    if pc.kind == "Hom":
        return [f"x{a}_{i}_{j}" for i in range(1, pc.target_dim + 1) for j in range(1, pc.source_dim + 1)]
    n = pc.source_dim
    return [f"x{a}_{i}_{j}" for i in range(1, n + 1) for j in range(i, n + 1)]


def symmetric_coordinates(spec: GradingSpec) -> dict[str, bool]:
    """Map each coordinate to True when it is an off-diagonal entry of a Sym2 block."""
    out = {}
    for pc in g1_pieces(spec):
        for name in _piece_names(pc):
            _, i, j = name.split("_")
            out[name] = pc.kind != "Hom" and i != j
    return out


def coordinate_matrices(spec: GradingSpec, variables=None) -> dict[int, list[list[SymbolicPoly]]]:
    """Generic matrices x_a (keyed by arrow label) with coordinate entries."""
    variables = tuple(variables or coordinate_names(spec))
    mats = {}
    for pc in g1_pieces(spec):
        a = pc.arrow
        if pc.kind == "Hom":
            mats[a] = [
                [SymbolicPoly.var(variables, f"x{a}_{i}_{j}") for j in range(1, pc.source_dim + 1)]
                for i in range(1, pc.target_dim + 1)
            ]
        else:
            n = pc.source_dim
            mats[a] = [
                [SymbolicPoly.var(variables, f"x{a}_{min(i, j)}_{max(i, j)}") for j in range(1, n + 1)]
                for i in range(1, n + 1)
            ]
    return mats


def _chain(mats, lo, hi):
    out = mats[lo]
    for a in range(lo + 1, hi + 1):
        out = matmul(out, mats[a])
    return out


def build_symbolic(spec: GradingSpec, i: int, max_det_size: int = DEFAULT_MAX_DET_SIZE, variables=None) -> SymbolicPoly:
    _require_rank_one(spec)
    variables = tuple(variables or coordinate_names(spec))
    table = {si.index: si for si in semi_invariant_table(spec)}
    if i not in table:
        raise KeyError(f"{spec.short()}: no semi-invariant f_{i}")
    si = table[i]
    if si.role == SENTINEL:
        return SymbolicPoly.constant(variables, 1)
    mats = coordinate_matrices(spec, variables)
    l = spec.l
    kind = si.kind
    if kind == "coordinate":
        return mats[i][0][0]
    if kind == "det":
        m = mats[i]
    elif kind == "gram":
        y = _chain(mats, 1, i)
        m = matmul(transpose(y), y)
    elif kind == "gram_sym":
        y = _chain(mats, 2, i)
        m = matmul(matmul(transpose(y), mats[1]), y)
    elif kind == "outer_sym":
        z = _chain(mats, i, l)
        m = matmul(matmul(z, mats[l + 1]), transpose(z))
    elif kind == "outer":
        z = _chain(mats, i, l)
        m = matmul(z, transpose(z))
    else:
        raise AssertionError(kind)
    if len(m) > max_det_size:
        raise OverflowError(
            f"{spec.short()}: f_{i} needs a {len(m)}x{len(m)} determinant, budget is {max_det_size}"
        )
    return det(m)


def build_invariant(spec: GradingSpec, variables=None) -> SymbolicPoly:
    variables = tuple(variables or coordinate_names(spec))
    out = SymbolicPoly.constant(variables, 1)
    for i, n in invariant_factorization(spec).exponents.items():
        out = out * build_symbolic(spec, i, variables=variables) ** n
    return out


@dataclass
class SemiInvarianceReport:
    index: int
    trials: list[tuple[dict, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.trials)


def torus_scalings(spec: GradingSpec, torus: Mapping[int, list[Fraction]]) -> dict[str, Fraction]:
    """How each coordinate of g_1 is scaled by a diagonal element of K.

    `torus[j]` lists the diagonal entries of g_j acting on M_j.
    """
    out = {}
    for pc in g1_pieces(spec):
        a = pc.arrow
        for name in _piece_names(pc):
            _, r, c = name.split("_")
            r, c = int(r) - 1, int(c) - 1
            if pc.kind == "Hom":
                out[name] = torus[pc.target][r] / torus[pc.source][c]
            elif pc.kind == "Sym2":
                out[name] = torus[pc.source][r] * torus[pc.source][c]
            else:
                out[name] = 1 / (torus[pc.source][r] * torus[pc.source][c])
    return out


def character_value(spec: GradingSpec, weight: WeightVector, torus: Mapping[int, list[Fraction]]) -> Fraction:
    val = Fraction(1)
    for j, e in zip(weight.indices, weight.exponents):
        d = Fraction(1)
        for t in torus[j]:
            d *= t
        val *= d ** e
    return val


def random_torus(spec: GradingSpec, rng: random.Random) -> dict[int, list[Fraction]]:
    gl = set(gl_indices(spec))
    torus = {}
    for i in spec.indices:
        n = spec.dim_M(i)
        if i in gl:
            torus[i] = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 4)) for _ in range(n)]
        else:
            # diagonal of SO(n) with the identity form: signs with product 1
            signs = [rng.choice([-1, 1]) for _ in range(n)]
            if n and signs.count(-1) % 2:
                signs[0] = -signs[0]
            torus[i] = [Fraction(s) for s in signs]
    return torus


def act_on_poly(poly: SymbolicPoly, scalings: Mapping[str, Fraction]) -> SymbolicPoly:
    """Return x -> poly(g.x) for a diagonal g given by coordinate scalings."""
    idx = [(poly.index(v), c) for v, c in scalings.items() if v in poly.variables]
    terms = {}
    for exps, coeff in poly.terms.items():
        c = coeff
        for i, s in idx:
            if exps[i]:
                c *= s ** exps[i]
        terms[exps] = c
    return SymbolicPoly(poly.variables, terms)


def verify_semi_invariance(spec: GradingSpec, i: int, trials: int = 5, seed: int = 0, tori=None) -> SemiInvarianceReport:
    table = {si.index: si for si in semi_invariant_table(spec)}
    f = build_symbolic(spec, i)
    rng = random.Random(seed)
    samples = list(tori) if tori is not None else [random_torus(spec, rng) for _ in range(trials)]
    results = []
    for torus in samples:
        lhs = act_on_poly(f, torus_scalings(spec, torus))
        rhs = f * character_value(spec, table[i].weight, torus)
        results.append((torus, lhs == rhs))
    return SemiInvarianceReport(i, results)


def lattice_condition(spec: GradingSpec, params: CharacterParams) -> bool:
    """Whether u_chi defines a character of K (half-integral or integral exponents)."""
    _require_rank_one(spec)
    check_params(spec, params)
    l, p, q = spec.l, spec.p, spec.q
    if spec.family is Family.A:
        integral = range(q + 1, l - p + 1)
    elif spec.family is Family.C:
        integral = range(q + 2, l - p + 1)
    else:
        integral = range(q + 1, l - p + 1)
    for j in free_indices(spec):
        v = params.get(j)
        if j in integral:
            if v.denominator != 1:
                return False
        elif (2 * v).denominator != 1:
            return False
    return True


def table_json(spec: GradingSpec) -> list[dict]:
    return [
        {
            "index": si.index,
            "degree": si.degree,
            "weight": si.weight.to_json(),
            "role": si.role,
            "reducible": si.reducible,
        }
        for si in semi_invariant_table(spec)
    ]
