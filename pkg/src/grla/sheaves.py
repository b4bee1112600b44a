"""Labels, dimensions and monodromy for the character sheaves built from nearby cycles.

Irreducible modules of the Hecke algebras H^{a,b}(G(m,1,k)) are labeled by
m-multipartitions of k, with the dimensions of the group case. This is the
generic-parameter labeling; every table produced here carries that marker.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, lcm, prod

from .bfunction import DistinguishedCharacter, constant_roots, distinguished_characters
from .exact import RotationNumber, rational_text, rotation_of
from .grading import Family, GradingSpec, OutOfScopeError, ReflectionGroupDesc, little_weyl
from .orbits import _require_orbit_range, is_quotient_case

GENERIC_LABELING = "generic-parameter labeling"

Partition = tuple[int, ...]


@dataclass(frozen=True)
class HeckeDesc:
    group: ReflectionGroupDesc
    params: tuple[int, int]

    def label(self) -> str:
        a, b = self.params
        return f"H^{{{a},{b}}}({self.group.label()})"

    def to_json(self) -> dict:
        return {"group": self.group.label(), "params": list(self.params)}


@dataclass(frozen=True, order=True)
class MultiPartition:
    components: tuple[Partition, ...]

    def __post_init__(self):
        for part in self.components:
            if any(a < b for a, b in zip(part, part[1:])) or any(x <= 0 for x in part):
                raise ValueError(f"{part} is not a partition")

    @property
    def total(self) -> int:
        return sum(sum(c) for c in self.components)

    def to_json(self) -> list[list[int]]:
        return [list(c) for c in self.components]

    def to_text(self) -> str:
        return "(" + ";".join(",".join(map(str, c)) for c in self.components) + ")"


@dataclass(frozen=True)
class SheafLabel:
    k: int
    rho1: MultiPartition
    rho2: MultiPartition
    delta: str | None = None  # "I" or "II" on the split labels

    def to_json(self, dim: int | None = None) -> dict:
        out = {"k": self.k, "rho1": self.rho1.to_json(), "rho2": self.rho2.to_json(), "delta": self.delta}
        if dim is not None:
            out["dim"] = dim
        return out


def hecke_descriptors(spec: GradingSpec, k: int) -> tuple[HeckeDesc, HeckeDesc]:
    """Hecke algebras attached to chi_k: one on G(m0,1,k), one on G(m0,1,r-k)."""
    r, l, p, q = spec.r, spec.l, spec.p, spec.q
    if not 0 <= k <= r:
        raise ValueError(f"k={k} is outside [0, {r}]")
    fam = spec.family
    if fam is Family.A:
        first, second = (l + p + q + 1, l - p - q), (l + 1 + p - q, l + q - p)
    elif fam is Family.C:
        first, second = (l - p + q, l + p - q), (l + p + q + 1, l - p - q - 1)
    else:
        if p == 0 and q == 0:
            raise OutOfScopeError(f"{spec.short()}: no Hecke data when p = q = 0 in type BD")
        a, b = max(p, q), min(p, q)
        first, second = (l - b + a, l + b - a), (l + b + a, l - b - a)
    if (p + q) % 2:
        first, second = second, first
    m0 = spec.m0
    return (
        HeckeDesc(ReflectionGroupDesc(m0, 1, k), first),
        HeckeDesc(ReflectionGroupDesc(m0, 1, r - k), second),
    )


@lru_cache(maxsize=None)
def partitions(n: int, largest: int | None = None) -> tuple[Partition, ...]:
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def multipartitions(m: int, k: int) -> tuple[MultiPartition, ...]:
    def rec(slots, n):
        if slots == 1:
            return [(pt,) for pt in partitions(n)]
        out = []
        for head in range(n, -1, -1):
            for pt in partitions(head):
                for tail in rec(slots - 1, n - head):
                    out.append((pt,) + tail)
        return out

    return tuple(MultiPartition(c) for c in rec(m, k))


def irr_labels(h: HeckeDesc) -> list[MultiPartition]:
    return list(multipartitions(h.group.m, h.group.rank))


def standard_tableaux(part: Partition) -> int:
    """Hook length formula."""
    n = sum(part)
    if n == 0:
        return 1
    conj = [sum(1 for x in part if x > j) for j in range(part[0])] if part else []
    hooks = 1
    for i, row in enumerate(part):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return factorial(n) // hooks


def irrep_dimension(group: ReflectionGroupDesc, lam: MultiPartition) -> int:
    if group.p != 1:
        raise ValueError("dimensions are implemented for G(m,1,k) only")
    if len(lam.components) != group.m or lam.total != group.rank:
        raise ValueError(f"{lam.to_text()} does not label an irreducible of {group.label()}")
    sizes = [sum(c) for c in lam.components]
    multinomial = factorial(group.rank) // prod(factorial(s) for s in sizes)
    return multinomial * prod(standard_tableaux(c) for c in lam.components)


def enumerate_sheaves(spec: GradingSpec) -> list[SheafLabel]:
    _require_orbit_range(spec)
    r = spec.r
    quotient = is_quotient_case(spec)
    out: list[SheafLabel] = []
    ks = range(0, r // 2 + 1) if quotient else range(0, r + 1)
    for k in ks:
        h1, h2 = hecke_descriptors(spec, k)
        irr1, irr2 = irr_labels(h1), irr_labels(h2)
        if quotient and 2 * k == r:
            # both factors are the same algebra; pairs are unordered and the diagonal splits
            for i, a in enumerate(irr1):
                for b in irr2[i + 1:]:
                    out.append(SheafLabel(k, a, b))
                out.append(SheafLabel(k, a, a, "I"))
                out.append(SheafLabel(k, a, a, "II"))
        else:
            out.extend(SheafLabel(k, a, b) for a in irr1 for b in irr2)
    return out


def expected_count(spec: GradingSpec) -> int:
    """Closed count from multipartition numbers."""
    r, m0 = spec.r, spec.m0

    def P(k):
        return len(multipartitions(m0, k))

    if not is_quotient_case(spec):
        return sum(P(k) * P(r - k) for k in range(r + 1))
    total = sum(P(k) * P(r - k) for k in range(0, (r + 1) // 2))
    if r % 2 == 0:
        n = P(r // 2)
        total += comb(n, 2) + 2 * n
    return total


def stabilizer_index(spec: GradingSpec, k: int) -> int:
    """[W_a : W0_{a,chi_k}]."""
    m0, r = spec.m0, spec.r
    w0 = ReflectionGroupDesc(m0, 1, k).order * ReflectionGroupDesc(m0, 1, r - k).order
    w = little_weyl(spec).order
    if w % w0:
        raise ArithmeticError("stabilizer order does not divide |W_a|")
    return w // w0


def induced_dimension(spec: GradingSpec, label: SheafLabel) -> int:
    h1, h2 = hecke_descriptors(spec, label.k)
    total = stabilizer_index(spec, label.k) * irrep_dimension(h1.group, label.rho1) * irrep_dimension(h2.group, label.rho2)
    if label.delta is None:
        return total
    if total % 2:
        raise ArithmeticError(f"odd dimension {total} at a split label")
    return total // 2


def label_multiplicity(spec: GradingSpec, label: SheafLabel) -> int:
    """Multiplicity of V_label in the rank |W_a| module attached to chi_k."""
    h1, h2 = hecke_descriptors(spec, label.k)
    d = irrep_dimension(h1.group, label.rho1) * irrep_dimension(h2.group, label.rho2)
    if is_quotient_case(spec) and 2 * label.k == spec.r and label.delta is None:
        return 2 * d  # (rho1, rho2) and (rho2, rho1) induce the same module
    return d


def _dimension_classes(group: ReflectionGroupDesc) -> Counter:
    """How many irreducibles of G(m,1,k) have each dimension."""
    return _dimension_classes_cached(group.m, group.rank)


@lru_cache(maxsize=None)
def _dimension_classes_cached(m: int, k: int) -> Counter:
    g = ReflectionGroupDesc(m, 1, k)
    return Counter(irrep_dimension(g, lam) for lam in multipartitions(m, k))


def rank_check(spec: GradingSpec, k: int) -> int:
    """sum over labels at chi_k of multiplicity * dimension; should equal |W_a|.

    Labels are grouped by the dimensions of rho1 and rho2, so the sum runs over
    dimension classes rather than individual multipartitions. The result agrees
    with summing label_multiplicity * induced_dimension over enumerate_sheaves.
    """
    _require_orbit_range(spec)
    if k not in (range(0, spec.r // 2 + 1) if is_quotient_case(spec) else range(0, spec.r + 1)):
        raise ValueError(f"k={k} is not an orbit representative for {spec.short()}")
    h1, h2 = hecke_descriptors(spec, k)
    index = stabilizer_index(spec, k)
    c1, c2 = _dimension_classes(h1.group), _dimension_classes(h2.group)
    if not (is_quotient_case(spec) and 2 * k == spec.r):
        return sum(n1 * n2 * (d1 * d2) * (index * d1 * d2) for d1, n1 in c1.items() for d2, n2 in c2.items())
    # unordered pairs rho1 != rho2 count twice; each diagonal pair splits in two halves
    total = 0
    dims = sorted(c1)
    for i, d1 in enumerate(dims):
        n = c1[d1]
        for d2 in dims[i + 1:]:
            total += n * c1[d2] * 2 * (d1 * d2) * (index * d1 * d2)
        total += comb(n, 2) * 2 * d1 * d1 * (index * d1 * d1)
        total += n * 2 * (d1 * d1) * (index * d1 * d1 // 2)
    return total


def sheaf_table_json(spec: GradingSpec) -> dict:
    labels = enumerate_sheaves(spec)
    return {
        "spec": spec.to_json(),
        "marker": GENERIC_LABELING,
        "count": len(labels),
        "labels": [lab.to_json(induced_dimension(spec, lab)) for lab in labels],
    }


def sheaf_table_markdown(spec: GradingSpec) -> str:
    labels = enumerate_sheaves(spec)
    per_k = Counter(lab.k for lab in labels)
    lines = [f"# Sheaf labels for {spec.short()} ({GENERIC_LABELING})", "", "| k | Hecke algebras | labels |", "|---|---|---|"]
    for k in sorted(per_k):
        h1, h2 = hecke_descriptors(spec, k)
        lines.append(f"| {k} | {h1.label()} x {h2.label()} | {per_k[k]} |")
    lines.append(f"| total | | {len(labels)} |")
    return "\n".join(lines) + "\n"


# monodromy


class IntervalError(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyPolynomial:
    factors: tuple[tuple[RotationNumber, int], ...]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def eigenvalues(self) -> Counter:
        return Counter({rot: m for rot, m in self.factors})

    def integer_coefficients(self) -> list[int] | None:
        """Coefficients (highest degree first) when R has rational coefficients."""
        import sympy

        if not self.factors:
            return [1]
        n = lcm(*(rot.value.denominator for rot, _ in self.factors))
        x, z = sympy.symbols("x z")
        phi = sympy.cyclotomic_poly(n, z)
        poly = sympy.Poly(1, x, z)
        for rot, mult in self.factors:
            zeta = z ** ((rot.value * n).numerator % n)
            poly = poly * sympy.Poly(x - zeta, x, z) ** mult
        coeffs = []
        px = sympy.Poly(poly.as_expr(), x)
        for c in px.all_coeffs():
            red = sympy.rem(sympy.expand(c), phi, z)
            red = sympy.nsimplify(red)
            if red.free_symbols:
                return None
            if not red.is_integer:
                return None
            coeffs.append(int(red))
        return coeffs

    def to_text(self) -> str:
        parts = []
        for rot, mult in self.factors:
            base = f"(x - exp(2*pi*i*{rational_text(rot.value)}))"
            if rot.value == 0:
                base = "(x - 1)"
            elif rot.value == Fraction(1, 2):
                base = "(x + 1)"
            parts.append(base if mult == 1 else f"{base}^{mult}")
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {
            "factors": [{"rotation": rational_text(r.value), "mult": m} for r, m in self.factors],
            "degree": self.degree,
            "coefficients": self.integer_coefficients(),
        }


def monodromy_from_roots(roots: Counter) -> MonodromyPolynomial:
    """R(x) from the roots of b: the dual roots are the negatives and must lie in (-1, 0]."""
    if any(not (0 <= a < 1) for a in roots):
        raise IntervalError(f"roots {sorted(roots)} are not in [0, 1)")
    dual = Counter({-a: m for a, m in roots.items()})
    if any(not (-1 < a <= 0) for a in dual):
        raise IntervalError("dual roots are not in (-1, 0]")
    eig: Counter = Counter()
    for a, m in dual.items():
        eig[rotation_of(a)] += m
    return MonodromyPolynomial(tuple(sorted(eig.items(), key=lambda t: t[0].value)))


def distinguished_roots(dc: DistinguishedCharacter) -> Counter:
    """Roots of the specialized b; from the display when the closed form is not stated."""
    if dc.b is None:
        return Counter(dc.display)
    return constant_roots(dc.b)


def monodromy_polynomial(spec: GradingSpec, dc: DistinguishedCharacter) -> MonodromyPolynomial:
    spec.require_rank(1)
    R = monodromy_from_roots(distinguished_roots(dc))
    if R.degree != little_weyl(spec).order:
        raise ArithmeticError(f"{spec.short()}: deg R = {R.degree} != |W_a| = {little_weyl(spec).order}")
    return R


def all_monodromy(spec: GradingSpec) -> list[tuple[DistinguishedCharacter, MonodromyPolynomial]]:
    return [(dc, monodromy_polynomial(spec, dc)) for dc in distinguished_characters(spec)]
