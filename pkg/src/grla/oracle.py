"""Brute-force Bernstein-Sato check by applying the dual operator to f^s u.

A term numerator * prod_i f_i^(e_i - a_i) is stored as shift vector a -> numerator,
where e_i is the exponent of the fundamental factor f_i in f^s u (an affine
expression in s and the s_j). The numerator is a polynomial in the g_1
coordinates and in the parameters together. Internally coefficients are
integers: the operator is scaled to integer coefficients and the scale is
divided out at the end.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from .bfunction import BFunction, closed_form_b
from .exact import AffineForm, SymbolicPoly, rational_text
from .grading import Family, GradingSpec, OutOfScopeError, dim_g1
from .semi_invariants import (
    build_symbolic,
    coordinate_names,
    free_indices,
    invariant_factorization,
    symmetric_coordinates,
)

PLAIN = "PlainPartial"
APOLARITY = "ApolaritySym2"
CONVENTIONS = (PLAIN, APOLARITY)

DEFAULT_DIM_BUDGET = 10
DEFAULT_DEGREE_BUDGET = 6


class BudgetExceeded(RuntimeError):
    pass


class ProportionalityError(ArithmeticError):
    """D f^s u is not a multiple of f^(s-1) u: the operator or the table is wrong."""


@dataclass(frozen=True)
class Budget:
    max_dim: int = DEFAULT_DIM_BUDGET
    max_degree: int = DEFAULT_DEGREE_BUDGET

    @classmethod
    def from_env(cls, override: int | None = None) -> "Budget":
        """GRLA_BUDGET is either "dim" or "dim,degree"; an explicit override wins for dim."""
        dim, deg = DEFAULT_DIM_BUDGET, DEFAULT_DEGREE_BUDGET
        raw = os.environ.get("GRLA_BUDGET", "").strip()
        if raw:
            parts = [int(x) for x in raw.split(",")]
            dim = parts[0]
            if len(parts) > 1:
                deg = parts[1]
        if override is not None:
            dim = override
        return cls(dim, deg)

    def admits(self, spec: GradingSpec) -> bool:
        return spec.r == 1 and dim_g1(spec) <= self.max_dim and spec.order <= self.max_degree

    def check(self, spec: GradingSpec) -> None:
        spec.require_rank(1)
        if dim_g1(spec) > self.max_dim:
            raise BudgetExceeded(f"{spec.short()}: dim g1 = {dim_g1(spec)} exceeds budget {self.max_dim}")
        if spec.order > self.max_degree:
            raise BudgetExceeded(f"{spec.short()}: deg f = {spec.order} exceeds budget {self.max_degree}")


@dataclass(frozen=True)
class DualOperator:
    """f with every coordinate x replaced by a derivative symbol.

    `polynomial` lives in the coordinate ring; read each variable as d/dx.
    """

    polynomial: SymbolicPoly
    pairing_convention: str

    @property
    def order(self) -> int:
        return self.polynomial.total_degree()


def dualize(poly: SymbolicPoly, half: Iterable[str] = (), convention: str = PLAIN) -> DualOperator:
    """Dual operator of `poly`; under ApolaritySym2 each variable in `half` becomes d/(2 dx)."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown pairing convention {convention!r}")
    if convention == PLAIN:
        return DualOperator(poly, convention)
    idx = [poly.index(v) for v in half]
    terms = {}
    for exps, c in poly.terms.items():
        k = sum(exps[i] for i in idx)
        terms[exps] = c / (2 ** k)
    return DualOperator(SymbolicPoly(poly.variables, terms), convention)


def dual_operator(spec: GradingSpec, convention: str = APOLARITY) -> DualOperator:
    spec.require_rank(1)
    names = coordinate_names(spec)
    f = _build_f(spec, names)
    offdiag = [v for v, flag in symmetric_coordinates(spec).items() if flag]
    return dualize(f, offdiag, convention)


def _build_f(spec, names):
    try:
        out = SymbolicPoly.constant(names, 1)
        for i, n in invariant_factorization(spec).exponents.items():
            out = out * build_symbolic(spec, i, variables=names) ** n
        return out
    except OverflowError as exc:
        raise BudgetExceeded(str(exc)) from exc


# term arithmetic on plain dicts: exponent tuple over (coords + params) -> int


def _to_int_terms(poly: SymbolicPoly, ncoords: int, nparams: int, offset: int) -> dict:
    """Embed a polynomial into the combined ring; offset 0 for coordinates, ncoords for params."""
    out = {}
    width = ncoords + nparams
    n = len(poly.variables)
    for exps, c in poly.terms.items():
        if c.denominator != 1:
            raise ValueError("internal polynomials must have integer coefficients")
        key = [0] * width
        key[offset:offset + n] = exps
        out[tuple(key)] = int(c)
    return out


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = tuple(x + y for x, y in zip(e1, e2))
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _add_into(acc: dict, p: dict, scale: int = 1) -> None:
    for e, c in p.items():
        v = acc.get(e, 0) + scale * c
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def _derive(p: dict, k: int) -> dict:
    out = {}
    for e, c in p.items():
        if e[k]:
            out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
    return out


@dataclass(frozen=True)
class LogDerivTerm:
    """numerator * prod_i f_i^(e_i - shifts_i)."""

    numerator: SymbolicPoly
    shifts: tuple[int, ...]


@dataclass
class OracleProblem:
    """D applied to prod_i factors[i]^exponents[i], expected to equal b * prod_i factors[i]^(exponents[i] - target[i])."""

    coordinates: tuple[str, ...]
    parameters: tuple[str, ...]
    factors: list[SymbolicPoly]  # in the coordinate ring
    exponents: list[SymbolicPoly]  # in the parameter ring
    target: tuple[int, ...]
    operator: DualOperator

    def __post_init__(self):
        self.coordinates = tuple(self.coordinates)
        self.parameters = tuple(self.parameters)
        nc, np_ = len(self.coordinates), len(self.parameters)
        self._nc, self._np = nc, np_
        self._f = [_to_int_terms(f.in_ring(self.coordinates), nc, np_, 0) for f in self.factors]
        self._e = [_to_int_terms(e.in_ring(self.parameters), nc, np_, nc) for e in self.exponents]
        # d_k f_i and e_i * d_k f_i, precomputed per coordinate
        self._df = [[_derive(f, k) for k in range(nc)] for f in self._f]
        self._edf = [[_mul(e, df) if df else {} for df in dfs] for e, dfs in zip(self._e, self._df)]

    def unit(self) -> dict:
        return {(0,) * len(self.factors): {(0,) * (self._nc + self._np): 1}}

    def apply_partial(self, state: dict, k: int) -> dict:
        """d/dx_k of a sum of terms, merging equal shift vectors."""
        out: dict = {}
        for shift, num in state.items():
            d = _derive(num, k)
            if d:
                _add_into(out.setdefault(shift, {}), d)
            for i, a in enumerate(shift):
                df = self._df[i][k]
                if not df:
                    continue
                # (e_i - a) * num * d_k f_i, shift a_i -> a_i + 1
                new = shift[:i] + (a + 1,) + shift[i + 1:]
                acc = out.setdefault(new, {})
                _add_into(acc, _mul(num, self._edf[i][k]))
                if a:
                    _add_into(acc, _mul(num, df), -a)
        return {s: p for s, p in out.items() if p}

    def apply_operator(self) -> dict:
        """Apply D with integer-scaled coefficients; returns (state, scale)."""
        op = self.operator.polynomial.in_ring(self.coordinates)
        scale = lcm(*(c.denominator for c in op.terms.values())) if op.terms else 1
        memo: dict = {(0,) * self._nc: self.unit()}

        def state_for(alpha):
            if alpha in memo:
                return memo[alpha]
            k = max(i for i, a in enumerate(alpha) if a)
            prev = alpha[:k] + (alpha[k] - 1,) + alpha[k + 1:]
            res = self.apply_partial(state_for(prev), k)
            memo[alpha] = res
            return res

        total: dict = {}
        for alpha, c in sorted(op.terms.items()):
            st = state_for(alpha)
            ci = int(c * scale)
            for shift, num in st.items():
                _add_into(total.setdefault(shift, {}), num, ci)
        return {s: p for s, p in total.items() if p}, scale

    def solve(self) -> SymbolicPoly:
        """The polynomial b in the parameter ring with D F = b * F / prod f_i^target_i."""
        state, scale = self.apply_operator()
        n = len(self.factors)
        top = [max([self.target[i]] + [s[i] for s in state]) for i in range(n)]
        lhs: dict = {}
        for shift, num in state.items():
            p = num
            for i in range(n):
                p = _mul(p, _pow(self._f[i], top[i] - shift[i], self._nc + self._np))
            _add_into(lhs, p)
        rhs = {(0,) * (self._nc + self._np): 1}
        for i in range(n):
            rhs = _mul(rhs, _pow(self._f[i], top[i] - self.target[i], self._nc + self._np))
        b = _quotient(lhs, rhs, self._nc)
        if b is None:
            raise ProportionalityError("D f^s u is not proportional to f^(s-1) u")
        coeff_scale = Fraction(1, scale)
        terms = {e[self._nc:]: Fraction(c) * coeff_scale for e, c in b.items()}
        return SymbolicPoly(self.parameters, terms)


def _pow(p: dict, n: int, width: int) -> dict:
    out = {(0,) * width: 1}
    for _ in range(n):
        out = _mul(out, p)
    return out


def _quotient(lhs: dict, rhs: dict, nc: int) -> dict | None:
    """Exact b (free of coordinates, rational coefficients as Fractions) with lhs = b * rhs, else None."""
    if not rhs:
        return None
    lead = max(rhs)
    c0 = rhs[lead]
    cpart = lead[:nc]
    b = {}
    for e, c in lhs.items():
        if e[:nc] == cpart:
            b[(0,) * nc + e[nc:]] = Fraction(c, c0)
    check = {}
    for e1, c1 in b.items():
        for e2, c2 in rhs.items():
            key = tuple(x + y for x, y in zip(e1, e2))
            check[key] = check.get(key, 0) + c1 * c2
    check = {k: v for k, v in check.items() if v}
    if check != {k: Fraction(v) for k, v in lhs.items()}:
        return None
    return b


# b-function factorization


def factor_in_s(b: SymbolicPoly, s: str = "s") -> tuple[Fraction, list[tuple[AffineForm, int]]]:
    """Split b into scalar * prod (s - alpha)^m with alpha affine in the other parameters."""
    import sympy

    syms = {v: sympy.Symbol(v) for v in b.variables}
    expr = sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[syms[v] ** e for v, e in zip(b.variables, exps)])
         for exps, c in b.terms.items()),
        sympy.Integer(0),
    )
    const, facs = sympy.factor_list(sympy.expand(expr), *syms.values())
    scalar = Fraction(int(sympy.numer(const)), int(sympy.denom(const)))
    roots = []
    for fac, mult in facs:
        poly = sympy.Poly(fac, *syms.values())
        if poly.total_degree() != 1:
            raise ArithmeticError(f"non-linear factor {fac} in b")
        coeffs = {str(g): Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
                  for g, c in zip(syms.values(), [poly.coeff_monomial(g) for g in syms.values()])}
        c_s = coeffs.pop(s, Fraction(0))
        const_term = poly.coeff_monomial(1)
        c0 = Fraction(int(sympy.numer(const_term)), int(sympy.denom(const_term)))
        if c_s == 0:
            raise ArithmeticError(f"factor {fac} of b does not involve {s}")
        scalar *= c_s ** mult
        alpha = AffineForm(-c0 / c_s, {k: -v / c_s for k, v in coeffs.items() if v})
        roots.append((alpha, mult))
    return scalar, roots


def bernstein_sato(problem: OracleProblem, s: str = "s") -> BFunction:
    b = problem.solve()
    scalar, roots = factor_in_s(b, s)
    return BFunction(roots, scalar, frozenset({"oracle", problem.operator.pairing_convention}))


def laplacian_b(n: int) -> BFunction:
    """b-function of sum x_i^2 with D the Laplacian."""
    xs = tuple(f"x{i}" for i in range(1, n + 1))
    f = SymbolicPoly(xs, {tuple(2 if j == i else 0 for j in range(n)): 1 for i in range(n)})
    prob = OracleProblem(xs, ("s",), [f], [SymbolicPoly.var(("s",), "s")], (1,), dualize(f))
    return bernstein_sato(prob)


# graded specs


def spec_problem(spec: GradingSpec, convention: str = APOLARITY, values: Mapping[str, Fraction] | None = None) -> OracleProblem:
    """f^s u with every fundamental factor kept separate.

    With `values` the parameters s, s_j are fixed to rationals (used by the precheck);
    the exponents are then constants and the problem has no parameters.
    """
    spec.require_rank(1)
    names = tuple(coordinate_names(spec))
    fact = invariant_factorization(spec).exponents
    free = free_indices(spec)
    params = ("s",) + tuple(f"s{j}" for j in free)
    indices = sorted(set(fact) | set(free))
    factors, exponents = [], []
    for i in indices:
        try:
            factors.append(build_symbolic(spec, i, variables=names))
        except OverflowError as exc:
            raise BudgetExceeded(str(exc)) from exc
        e = SymbolicPoly.var(params, "s") * fact.get(i, 0)
        if i in free:
            e = e + SymbolicPoly.var(params, f"s{i}")
        exponents.append(e)
    target = tuple(fact.get(i, 0) for i in indices)
    op = dual_operator(spec, convention)
    if values is not None:
        exponents = [SymbolicPoly.constant((), e.evaluate(values)) for e in exponents]
        params = ()
    return OracleProblem(names, params, factors, exponents, target, op)


def precheck(spec: GradingSpec, convention: str = APOLARITY, seed: int = 0) -> Fraction:
    """Fast proportionality test at random integer parameters; returns b at that point."""
    rng = random.Random(seed)
    free = free_indices(spec)
    values = {"s": Fraction(rng.randint(3, 40))}
    values.update({f"s{j}": Fraction(rng.randint(-20, 20)) for j in free})
    b = spec_problem(spec, convention, values).solve()
    return b.evaluate({})


@dataclass
class OracleResult:
    spec: GradingSpec
    b: BFunction
    raw: SymbolicPoly
    convention: str

    @property
    def scalar(self) -> Fraction:
        return self.b.scalar


def compute_b_oracle(
    spec: GradingSpec,
    convention: str = APOLARITY,
    budget: Budget | None = None,
    run_precheck: bool = True,
) -> OracleResult:
    budget = budget or Budget.from_env()
    budget.check(spec)
    if run_precheck:
        precheck(spec, convention)
    prob = spec_problem(spec, convention)
    raw = prob.solve()
    if raw.total_degree() < 0:
        raise ProportionalityError(f"{spec.short()}: D f^s u vanishes identically")
    return OracleResult(spec, bernstein_sato(prob), raw, convention)


@dataclass
class CrosscheckReport:
    spec: GradingSpec
    oracle_roots: list[tuple[AffineForm, int]]
    closed_form_roots: list[tuple[AffineForm, int]] | None
    oracle_scalar: Fraction
    closed_form_scalar: Fraction | None
    convention: str
    notes: list[str] = field(default_factory=list)

    @property
    def match(self) -> bool | None:
        if self.closed_form_roots is None:
            return None
        return sorted(self.oracle_roots, key=_root_key) == sorted(self.closed_form_roots, key=_root_key)

    @property
    def scalar_ratio(self) -> Fraction | None:
        if self.closed_form_scalar is None:
            return None
        return self.oracle_scalar / self.closed_form_scalar

    def to_json(self) -> dict:
        def roots(rs):
            return None if rs is None else [
                {"root": a.to_text(), "mult": m} for a, m in sorted(rs, key=_root_key)
            ]

        ratio = self.scalar_ratio
        return {
            "spec": self.spec.to_json(),
            "convention": self.convention,
            "oracle_roots": roots(self.oracle_roots),
            "closed_form_roots": roots(self.closed_form_roots),
            "match": self.match,
            "oracle_scalar": rational_text(self.oracle_scalar),
            "scalar_ratio": None if ratio is None else rational_text(ratio),
            "notes": list(self.notes),
        }


def _root_key(rm):
    return (rm[0].sort_key(), rm[1])


def crosscheck(spec: GradingSpec, convention: str = APOLARITY, budget: Budget | None = None) -> CrosscheckReport:
    res = compute_b_oracle(spec, convention, budget)
    notes = []
    try:
        cf = closed_form_b(spec)
        cf_roots, cf_scalar = list(cf.roots), cf.scalar
    except OutOfScopeError as exc:
        cf_roots = cf_scalar = None
        notes.append(f"closed form unavailable: {exc}")
    return CrosscheckReport(spec, list(res.b.roots), cf_roots, res.scalar, cf_scalar, convention, notes)


def in_budget_specs(budget: Budget | None = None, families=(Family.A, Family.C, Family.BD)) -> list[GradingSpec]:
    from .grading import iter_specs

    budget = budget or Budget()
    max_l = budget.max_degree // 2 + 1
    return [s for s in iter_specs(max_l, families) if budget.admits(s)]
