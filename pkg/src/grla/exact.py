"""Exact arithmetic: rationals, multivariate polynomials, affine forms, rotation numbers.

Everything here is immutable and exact. Rationals are :class:`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]

Exponents = tuple[int, ...]


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def rational_text(value: Fraction) -> str:
    value = as_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class SymbolicPoly:
    """Polynomial over the rationals in a fixed, ordered tuple of variables.

    Terms map exponent tuples to nonzero Fraction coefficients. Two polynomials
    must share the same variable tuple to be combined; use :meth:`in_ring` to
    embed one into a larger ring.
    """

    __slots__ = ("variables", "terms", "_index")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponents, Scalar] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = as_rational(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._index = None

    # construction helpers
    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponents, Fraction]) -> "SymbolicPoly":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj._index = None
        return obj

    @classmethod
    def constant(cls, variables: Iterable[str], value: Scalar) -> "SymbolicPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, variables: Iterable[str], name: str) -> "SymbolicPoly":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise KeyError(f"unknown variable {name!r}")
        return cls(variables, {exps: 1})

    def index(self, name: str) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.variables)}
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}; declared {self.variables}") from None

    def in_ring(self, variables: Iterable[str]) -> "SymbolicPoly":
        """Re-express in a ring whose variables include all of ours."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        missing = [v for v in self.variables if v not in pos]
        used = {v for exps in self.terms for v, e in zip(self.variables, exps) if e}
        if any(v in used for v in missing):
            raise ValueError(f"variables {missing} are used but absent from target ring")
        terms = {}
        for exps, c in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, exps):
                if e:
                    new[pos[v]] = e
            terms[tuple(new)] = c
        return SymbolicPoly._raw(variables, terms)

    # arithmetic
    def _coerce(self, other) -> "SymbolicPoly":
        if isinstance(other, SymbolicPoly):
            if other.variables != self.variables:
                raise ValueError("polynomials live in different rings")
            return other
        return SymbolicPoly.constant(self.variables, as_rational(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            v = terms.get(exps, 0) + c
            if v:
                terms[exps] = v
            else:
                terms.pop(exps, None)
        return SymbolicPoly._raw(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SymbolicPoly):
            c = as_rational(other)
            if not c:
                return SymbolicPoly._raw(self.variables, {})
            return SymbolicPoly._raw(self.variables, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return SymbolicPoly._raw(self.variables, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = SymbolicPoly.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SymbolicPoly):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # calculus and evaluation
    def derive(self, name: str) -> "SymbolicPoly":
        i = self.index(name)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e:
                new = exps[:i] + (e - 1,) + exps[i + 1:]
                out[new] = c * e
        return SymbolicPoly._raw(self.variables, out)

    def evaluate(self, assignment: Mapping[str, Scalar]) -> Fraction:
        missing = [v for v in self.used_variables() if v not in assignment]
        if missing:
            raise KeyError(f"no value for {missing}")
        vals = [as_rational(assignment[v]) if v in assignment else Fraction(0) for v in self.variables]
        total = Fraction(0)
        for exps, c in self.terms.items():
            t = c
            for v, e in zip(vals, exps):
                if e:
                    t *= v ** e
            total += t
        return total

    def substitute(self, assignment: Mapping[str, Scalar]) -> "SymbolicPoly":
        """Plug rational values into some variables; the ring is unchanged."""
        idx = [(self.index(v), as_rational(x)) for v, x in assignment.items()]
        out: dict[Exponents, Fraction] = {}
        for exps, c in self.terms.items():
            new = list(exps)
            for i, x in idx:
                if new[i]:
                    c = c * x ** new[i]
                    new[i] = 0
            if c:
                key = tuple(new)
                out[key] = out.get(key, 0) + c
        return SymbolicPoly._raw(self.variables, {e: c for e, c in out.items() if c})

    def used_variables(self) -> list[str]:
        used = set()
        for exps in self.terms:
            used.update(i for i, e in enumerate(exps) if e)
        return [self.variables[i] for i in sorted(used)]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.index(name)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in graded-lex order, largest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def coefficients_in(self, names: Iterable[str]) -> dict[Exponents, "SymbolicPoly"]:
        """Split as a polynomial in `names` with coefficients in the remaining variables.

        Coefficients stay in the full ring (with the split variables set to zero).
        """
        idx = [self.index(n) for n in names]
        out: dict[Exponents, dict[Exponents, Fraction]] = {}
        for exps, c in self.terms.items():
            key = tuple(exps[i] for i in idx)
            rest = list(exps)
            for i in idx:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: SymbolicPoly._raw(self.variables, v) for k, v in out.items()}

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exps) if e
            )
            if not mono:
                parts.append(rational_text(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{rational_text(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [[list(e), rational_text(c)] for e, c in self.sorted_terms()],
        }

    def __repr__(self):
        return f"SymbolicPoly({self.to_text()})"


class AffineForm:
    """constant + sum(coefficient * parameter), with canonical (zero-free) storage."""

    __slots__ = ("constant", "coefficients")

    def __init__(self, constant: Scalar = 0, coefficients: Mapping[str, Scalar] | None = None):
        self.constant = as_rational(constant)
        self.coefficients = {
            k: as_rational(v) for k, v in sorted((coefficients or {}).items()) if as_rational(v)
        }

    @classmethod
    def param(cls, name: str, coeff: Scalar = 1) -> "AffineForm":
        return cls(0, {name: coeff})

    def __add__(self, other):
        if not isinstance(other, AffineForm):
            return AffineForm(self.constant + as_rational(other), self.coefficients)
        coeffs = dict(self.coefficients)
        for k, v in other.coefficients.items():
            coeffs[k] = coeffs.get(k, 0) + v
        return AffineForm(self.constant + other.constant, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(-self.constant, {k: -v for k, v in self.coefficients.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        c = as_rational(scalar)
        return AffineForm(self.constant * c, {k: v * c for k, v in self.coefficients.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / as_rational(scalar))

    def _key(self):
        return (self.constant, tuple(self.coefficients.items()))

    def __eq__(self, other):
        if isinstance(other, AffineForm):
            return self._key() == other._key()
        if isinstance(other, (int, Fraction)):
            return not self.coefficients and self.constant == other
        return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (tuple((k, v) for k, v in self.coefficients.items()), self.constant)

    def parameters(self) -> list[str]:
        return list(self.coefficients)

    def is_constant(self) -> bool:
        return not self.coefficients

    def substitute(self, assignment: Mapping[str, "AffineForm | Scalar"]) -> "AffineForm":
        """Replace some parameters by rationals or other affine forms."""
        out = AffineForm(self.constant)
        for k, v in self.coefficients.items():
            if k in assignment:
                repl = assignment[k]
                if not isinstance(repl, AffineForm):
                    repl = AffineForm(repl)
                out = out + repl * v
            else:
                out = out + AffineForm.param(k, v)
        return out

    def to_text(self) -> str:
        parts = []
        for k, v in self.coefficients.items():
            if v == 1:
                parts.append(k)
            elif v == -1:
                parts.append(f"-{k}")
            else:
                parts.append(f"{rational_text(v)}*{k}")
        if self.constant or not parts:
            parts.append(rational_text(self.constant))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"AffineForm({self.to_text()})"


def affine_specialize(form: AffineForm, assignment: Mapping[str, Scalar]) -> Fraction:
    missing = [k for k in form.coefficients if k not in assignment]
    if missing:
        raise KeyError(f"no value for parameters {missing}")
    total = form.constant
    for k, v in form.coefficients.items():
        total += v * as_rational(assignment[k])
    return total


class RotationNumber:
    """An element of Q/Z in [0, 1), standing for the root of unity exp(2*pi*i*value)."""

    __slots__ = ("value",)

    def __init__(self, value: Scalar):
        v = as_rational(value)
        self.value = v - (v.numerator // v.denominator)

    def __eq__(self, other):
        return isinstance(other, RotationNumber) and self.value == other.value

    def __hash__(self):
        return hash(("rot", self.value))

    def __lt__(self, other):
        return self.value < other.value

    def order(self) -> int:
        return self.value.denominator

    def to_text(self) -> str:
        if self.value == 0:
            return "1"
        if self.value == Fraction(1, 2):
            return "-1"
        return f"exp(2*pi*i*{rational_text(self.value)})"

    def __repr__(self):
        return f"RotationNumber({rational_text(self.value)})"


def rotation_of(alpha: Scalar) -> RotationNumber:
    return RotationNumber(alpha)


def poly_derive(p: SymbolicPoly, var: str) -> SymbolicPoly:
    return p.derive(var)


def det(matrix: list[list[SymbolicPoly]]) -> SymbolicPoly:
    """Determinant by cofactor expansion along the first row.

    Expansion is exponential in the size; callers enforce a size budget.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    return _det(matrix, tuple(range(n)), 0, {})


def _det(matrix, cols, row, cache):
    key = (row, cols)
    if key in cache:
        return cache[key]
    if len(cols) == 1:
        return matrix[row][cols[0]]
    total = None
    for pos, c in enumerate(cols):
        entry = matrix[row][c]
        if not entry:
            continue
        minor = _det(matrix, cols[:pos] + cols[pos + 1:], row + 1, cache)
        term = entry * minor
        if pos % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        total = matrix[row][cols[0]] * 0
    cache[key] = total
    return total


def matmul(a: list[list[SymbolicPoly]], b: list[list[SymbolicPoly]]) -> list[list[SymbolicPoly]]:
    if not a or not b or len(a[0]) != len(b):
        raise ValueError("incompatible matrix shapes")
    zero = a[0][0] * 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), zero) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def transpose(a: list[list]) -> list[list]:
    return [list(col) for col in zip(*a)]
