"""Type I gradings of sl_N, sp_2n and so_N as cyclic quiver data.

A grading is fixed by (family, order, p, q, r). From it we derive the
dimensions of the eigenspaces M_i, the factors of K, the summands of g_1 and
the little Weyl group G(m, p, r).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from math import factorial


class Family(str, Enum):
    A = "A"
    C = "C"
    BD = "BD"


class GradingError(ValueError):
    """Raised when grading parameters violate a family constraint."""


class OutOfScopeError(ValueError):
    """Raised when a computation is asked for outside the range where it is defined."""


@dataclass(frozen=True)
class KFactor:
    kind: str  # "SO", "GL" or "Sp"
    size: int
    index: int

    @property
    def dim(self) -> int:
        n = self.size
        if self.kind == "SO":
            return n * (n - 1) // 2
        if self.kind == "GL":
            return n * n
        if self.kind == "Sp":
            h = n // 2
            return h * (2 * h + 1)
        raise ValueError(self.kind)

    def label(self) -> str:
        return f"{self.kind}(M{self.index})"


@dataclass(frozen=True)
class G1Piece:
    """One summand of g_1: Hom(M_source, M_target), Sym2(M_source) or Sym2(M_source^*)."""

    kind: str  # "Hom", "Sym2", "Sym2Dual"
    source: int
    target: int
    source_dim: int
    target_dim: int
    arrow: int  # index i of the quiver arrow x_i carried by this summand

    @property
    def dim(self) -> int:
        if self.kind == "Hom":
            return self.source_dim * self.target_dim
        n = self.source_dim
        return n * (n + 1) // 2

    def label(self) -> str:
        if self.kind == "Hom":
            return f"Hom(M{self.source},M{self.target})"
        if self.kind == "Sym2":
            return f"Sym2(M{self.source})"
        return f"Sym2(M{self.source}*)"


@dataclass(frozen=True)
class ReflectionGroupDesc:
    m: int
    p: int
    rank: int

    def __post_init__(self):
        if self.m < 1 or self.p < 1 or self.m % self.p or self.rank < 0:
            raise ValueError(f"invalid G({self.m},{self.p},{self.rank})")

    @property
    def order(self) -> int:
        if self.rank == 0:
            return 1
        return self.m ** self.rank * factorial(self.rank) // self.p

    def label(self) -> str:
        return f"G({self.m},{self.p},{self.rank})"


@dataclass(frozen=True)
class GradingSpec:
    family: Family
    order: int
    p: int
    q: int
    r: int
    l: int = field(init=False)
    dims: tuple[int, ...] = field(init=False)
    first_index: int = field(init=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        order, p, q, r = self.order, self.p, self.q, self.r
        for name in ("order", "p", "q", "r"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise GradingError(f"{name} must be an integer, got {v!r}")
        if p < 0 or q < 0 or r < 0:
            raise GradingError("p, q, r must be non-negative")
        if fam is Family.A:
            if order < 1 or order % 2 == 0:
                raise GradingError(f"type A needs d odd and positive, got d={order}")
            l = (order - 1) // 2
            if p + q > l:
                raise GradingError(f"type A needs p+q <= l: {p}+{q} > {l}")
        else:
            if order < 2 or order % 2:
                raise GradingError(f"type {fam.value} needs m even, got m={order}")
            l = order // 2
            bound = l - 1 if fam is Family.C else l
            if p + q > bound:
                raise GradingError(
                    f"type {fam.value} needs p+q <= {'l-1' if fam is Family.C else 'l'}: "
                    f"{p}+{q} > {bound}"
                )
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "first_index", 1 if fam is Family.C else 0)
        object.__setattr__(self, "dims", tuple(_dim_vector(fam, order, l, p, q, r)))

    # index helpers
    @property
    def m0(self) -> int:
        """Size of the cyclic factor of the little Weyl group (d in type A, m otherwise)."""
        return self.order

    @property
    def indices(self) -> range:
        return range(self.first_index, self.first_index + len(self.dims))

    def dim_M(self, i: int) -> int:
        if i not in self.indices:
            raise IndexError(f"M_{i} is not defined in type {self.family.value}")
        return self.dims[i - self.first_index]

    def mirror(self, i: int) -> int:
        if self.family is Family.A:
            return (-i) % self.order
        if self.family is Family.C:
            j = (1 - i) % self.order
            return j if j else self.order
        return (-i) % self.order

    @property
    def ambient_dim(self) -> int:
        d, p, q, r = self.order, self.p, self.q, self.r
        if self.family is Family.A:
            return d * r + p * (p + 1) + q * q
        if self.family is Family.C:
            return d * r + p * (p + 1) + q * (q + 1)
        return d * r + p * p + q * q

    def to_json(self) -> dict:
        key = "d" if self.family is Family.A else "m"
        return {"family": self.family.value, key: self.order, "p": self.p, "q": self.q, "r": self.r}

    @classmethod
    def from_json(cls, data: dict | str) -> "GradingSpec":
        if isinstance(data, str):
            data = json.loads(data)
        order = data.get("d", data.get("m", data.get("order")))
        return build_grading(data["family"], order, data["p"], data["q"], data["r"])

    def short(self) -> str:
        key = "d" if self.family is Family.A else "m"
        return f"{self.family.value}[{key}={self.order},p={self.p},q={self.q},r={self.r}]"

    def require_rank(self, r: int | None = None):
        if r is None:
            if self.r < 1:
                raise OutOfScopeError(f"{self.short()}: needs r >= 1")
        elif self.r != r:
            raise OutOfScopeError(f"{self.short()}: needs r = {r}")


def _half_dim(fam: Family, l: int, p: int, q: int, r: int, i: int) -> int:
    # dimension of M_i for i in the half range (0..l in A/BD, 1..l in C)
    if fam is Family.C:
        if 1 <= i <= q:
            return q - i + r + 1
    elif 0 <= i <= q - 1:
        return q - i + r
    if i <= l - p:
        return r
    return r + i - l + p


def _dim_vector(fam: Family, order: int, l: int, p: int, q: int, r: int) -> list[int]:
    if fam is Family.A:
        half = [_half_dim(fam, l, p, q, r, i) for i in range(l + 1)]
        return half + [half[order - i] for i in range(l + 1, order)]
    if fam is Family.C:
        half = [_half_dim(fam, l, p, q, r, i) for i in range(1, l + 1)]
        # M_i pairs with M_{m+1-i}
        return half + [half[order + 1 - i - 1] for i in range(l + 1, order + 1)]
    half = [_half_dim(fam, l, p, q, r, i) for i in range(l + 1)]
    return half + [half[order - i] for i in range(l + 1, order)]


def build_grading(family, order: int, p: int, q: int, r: int) -> GradingSpec:
    return GradingSpec(Family(family), order, p, q, r)


def k_factors(spec: GradingSpec) -> list[KFactor]:
    l = spec.l
    if spec.family is Family.A:
        return [KFactor("SO", spec.dim_M(0), 0)] + [
            KFactor("GL", spec.dim_M(i), i) for i in range(1, l + 1)
        ]
    if spec.family is Family.C:
        return [KFactor("GL", spec.dim_M(i), i) for i in range(1, l + 1)]
    return (
        [KFactor("SO", spec.dim_M(0), 0)]
        + [KFactor("GL", spec.dim_M(i), i) for i in range(1, l)]
        + [KFactor("SO", spec.dim_M(l), l)]
    )


def dim_K(spec: GradingSpec) -> int:
    return sum(f.dim for f in k_factors(spec))


def gl_indices(spec: GradingSpec) -> list[int]:
    """Indices i for which K has a GL(M_i) factor, in order."""
    return [f.index for f in k_factors(spec) if f.kind == "GL"]


def g1_pieces(spec: GradingSpec) -> list[G1Piece]:
    l = spec.l
    dm = spec.dim_M

    def hom(i):
        return G1Piece("Hom", i, i - 1, dm(i), dm(i - 1), i)

    if spec.family is Family.A:
        pieces = [hom(i) for i in range(1, l + 1)]
        pieces.append(G1Piece("Sym2", l, l, dm(l), dm(l), l + 1))
    elif spec.family is Family.C:
        pieces = [G1Piece("Sym2Dual", 1, 1, dm(1), dm(1), 1)]
        pieces += [hom(i) for i in range(2, l + 1)]
        pieces.append(G1Piece("Sym2", l, l, dm(l), dm(l), l + 1))
    else:
        pieces = [hom(i) for i in range(1, l + 1)]
    total = sum(pc.dim for pc in pieces)
    if total != dim_K(spec) + spec.r:
        raise AssertionError(f"{spec.short()}: dim g1 = {total} != dim K + r = {dim_K(spec) + spec.r}")
    return pieces


def dim_g1(spec: GradingSpec) -> int:
    return sum(pc.dim for pc in g1_pieces(spec))


def little_weyl(spec: GradingSpec) -> ReflectionGroupDesc:
    if spec.family is Family.BD and spec.dim_M(0) == spec.r and spec.dim_M(spec.l) == spec.r:
        return ReflectionGroupDesc(spec.order, 2, spec.r)
    return ReflectionGroupDesc(spec.order, 1, spec.r)


def iter_specs(max_l: int, families=(Family.A, Family.C, Family.BD), r_values=(1,)):
    """All valid specs with 1 <= l <= max_l over the given ranks, in canonical order."""
    for fam in families:
        fam = Family(fam)
        for l in range(1, max_l + 1):
            order = 2 * l + 1 if fam is Family.A else 2 * l
            bound = l - 1 if fam is Family.C else l
            for r in r_values:
                for p in range(bound + 1):
                    for q in range(bound - p + 1):
                        yield GradingSpec(fam, order, p, q, r)
