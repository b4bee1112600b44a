"""The component group I = Z_K(x) of a regular element and W_a-orbits on its characters.

I is an elementary abelian 2-group with generators gamma_i, alpha_i, beta_i.
Characters in the alternating set have forced values on alpha and beta, so
they are determined by their values on the gammas, equivalently by a sign
vector eta with chi(gamma_i) = eta_i eta_{i+1} and chi(gamma_r) = eta_r.
When gamma_r does not exist eta is only defined up to a global flip.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

from .grading import Family, GradingSpec, OutOfScopeError, ReflectionGroupDesc, little_weyl


class OrbitModelError(AssertionError):
    """The modeled action disagrees with the expected orbit table."""


@dataclass(frozen=True)
class ComponentGroup:
    r: int
    gamma_count: int
    alpha_count: int
    beta_count: int
    gamma_r_present: bool

    @property
    def rank(self) -> int:
        return self.gamma_count + self.alpha_count + self.beta_count

    @property
    def rs_rank(self) -> int:
        return self.gamma_count

    @property
    def identity_rank(self) -> int:
        return self.alpha_count + self.beta_count

    def generators(self) -> list[str]:
        return (
            [f"gamma{i}" for i in range(1, self.gamma_count + 1)]
            + [f"alpha{i}" for i in range(1, self.alpha_count + 1)]
            + [f"beta{i}" for i in range(1, self.beta_count + 1)]
        )

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "rs_rank": self.rs_rank,
            "gamma_count": self.gamma_count,
            "alpha_count": self.alpha_count,
            "beta_count": self.beta_count,
            "gamma_r_present": self.gamma_r_present,
        }


def component_group(spec: GradingSpec) -> ComponentGroup:
    r, p, q = spec.r, spec.p, spec.q
    if r < 1:
        raise OutOfScopeError(f"{spec.short()}: the component group needs r >= 1")
    fam = spec.family
    if fam is Family.A:
        present = q >= 1
        alpha = max(q - 1, 0)
        beta = p
    elif fam is Family.C:
        present = True
        alpha = q
        beta = p
    else:
        present = p >= 1 and q >= 1
        alpha = max(q - 1, 0)
        beta = max(p - 1, 0)
    gammas = r - 1 + (1 if present else 0)
    return ComponentGroup(r, gammas, alpha, beta, present)


def expected_rank(spec: GradingSpec) -> int:
    """Rank of I from the closed list, used to check the generator model."""
    r, p, q = spec.r, spec.p, spec.q
    if spec.family is Family.A:
        return r + p + q - 1
    if spec.family is Family.C:
        return r + p + q
    return r + p + q - 2 if p + q >= 1 else r - 1


@dataclass(frozen=True)
class SignCharacter:
    values: tuple[tuple[str, int], ...]  # (generator, +-1) in generator order

    def __getitem__(self, gen: str) -> int:
        return dict(self.values)[gen]

    def as_dict(self) -> dict[str, int]:
        return dict(self.values)

    def to_json(self) -> dict:
        return dict(self.values)


@dataclass(frozen=True)
class EtaVector:
    signs: tuple[int, ...]
    quotient_flag: bool

    def canonical(self) -> "EtaVector":
        # in the quotient case pick the representative with last entry +1
        if self.quotient_flag and self.signs and self.signs[-1] == -1:
            return EtaVector(tuple(-e for e in self.signs), True)
        return self

    def minus_count(self) -> int:
        return sum(1 for e in self.signs if e == -1)


def _forced(group: ComponentGroup) -> list[tuple[str, int]]:
    vals = [(f"alpha{i}", (-1) ** i) for i in range(1, group.alpha_count + 1)]
    vals += [(f"beta{i}", (-1) ** i) for i in range(1, group.beta_count + 1)]
    return vals


def character_from_gammas(group: ComponentGroup, gamma_values: tuple[int, ...]) -> SignCharacter:
    if len(gamma_values) != group.gamma_count or any(v not in (1, -1) for v in gamma_values):
        raise ValueError("need one sign per gamma generator")
    vals = [(f"gamma{i}", v) for i, v in enumerate(gamma_values, start=1)]
    return SignCharacter(tuple(vals + _forced(group)))


def zero_hat_characters(spec: GradingSpec) -> list[SignCharacter]:
    group = component_group(spec)
    return [
        character_from_gammas(group, vals)
        for vals in itertools.product((1, -1), repeat=group.gamma_count)
    ]


def gamma_values(group: ComponentGroup, chi: SignCharacter) -> tuple[int, ...]:
    return tuple(chi[f"gamma{i}"] for i in range(1, group.gamma_count + 1))


def eta_of(group: ComponentGroup, chi: SignCharacter) -> EtaVector:
    """Solve chi(gamma_i) = eta_i eta_{i+1}, chi(gamma_r) = eta_r from the top down."""
    r = group.r
    g = gamma_values(group, chi)
    eta = [0] * r
    eta[r - 1] = g[r - 1] if group.gamma_r_present else 1
    for i in range(r - 2, -1, -1):
        eta[i] = g[i] * eta[i + 1]
    return EtaVector(tuple(eta), not group.gamma_r_present)


def character_of_eta(group: ComponentGroup, eta: EtaVector) -> SignCharacter:
    e = eta.signs
    vals = [e[i] * e[i + 1] for i in range(group.r - 1)]
    if group.gamma_r_present:
        vals.append(e[-1])
    return character_from_gammas(group, tuple(vals))


def chi_k(spec: GradingSpec, k: int) -> SignCharacter:
    group = component_group(spec)
    if not 0 <= k <= group.gamma_count:
        raise ValueError(f"k={k} is outside [0, {group.gamma_count}]")
    vals = tuple(-1 if i == k else 1 for i in range(1, group.gamma_count + 1))
    return character_from_gammas(group, vals)


def is_quotient_case(spec: GradingSpec) -> bool:
    """gamma_r is absent: eta vectors are taken up to a global flip."""
    return not component_group(spec).gamma_r_present


def _require_orbit_range(spec: GradingSpec):
    if spec.family is Family.BD and spec.p == 0 and spec.q == 0:
        raise OutOfScopeError(f"{spec.short()}: the orbit table is stated only for max(p, q) > 0 in type BD")
    if spec.r < 1:
        raise OutOfScopeError(f"{spec.short()}: needs r >= 1")


@dataclass(frozen=True)
class OrbitDatum:
    representative: SignCharacter
    k: int
    orbit_size: int
    stabilizer0: tuple[ReflectionGroupDesc, ReflectionGroupDesc]
    extra_z2: bool

    @property
    def stabilizer_order(self) -> int:
        a, b = self.stabilizer0
        return a.order * b.order * (2 if self.extra_z2 else 1)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "orbit_size": self.orbit_size,
            "stab0": [g.label() for g in self.stabilizer0],
            "extra_z2": self.extra_z2,
        }


def expected_k_range(spec: GradingSpec) -> list[int]:
    r = spec.r
    return list(range(0, r // 2 + 1)) if is_quotient_case(spec) else list(range(0, r + 1))


def weyl_orbits(spec: GradingSpec) -> list[OrbitDatum]:
    """Orbits of W_a on the alternating characters, by brute force over S_r.

    The cyclic diagonal part of W_a acts trivially on sign characters; S_r permutes
    eta. Results are checked against the expected table and raise OrbitModelError
    on any disagreement.
    """
    _require_orbit_range(spec)
    group = component_group(spec)
    r, m0 = spec.r, spec.m0
    chars = zero_hat_characters(spec)
    points = {eta_of(group, c).canonical().signs for c in chars}
    if len(points) != len(chars):
        raise OrbitModelError("eta map is not injective on characters")
    quotient = not group.gamma_r_present
    perms = list(itertools.permutations(range(r)))

    def act(perm, eta):
        return EtaVector(tuple(eta[perm[i]] for i in range(r)), quotient).canonical().signs

    seen: set = set()
    orbits = []
    for start in sorted(points, reverse=True):
        if start in seen:
            continue
        orbit = {act(pm, start) for pm in perms}
        seen |= orbit
        # stabilizer inside S_r, then lift by the trivially acting diagonal part
        stab_perms = sum(1 for pm in perms if act(pm, start) == start)
        w_order = little_weyl(spec).order
        stab_order = stab_perms * m0 ** r
        k = min(EtaVector(e, quotient).minus_count() for e in orbit)
        rep_eta = EtaVector(tuple(-1 if i < k else 1 for i in range(r)), quotient).canonical()
        if rep_eta.signs not in orbit:
            raise OrbitModelError(f"chi_{k} is not in the orbit it should represent")
        extra = quotient and 2 * k == r
        datum = OrbitDatum(
            chi_k(spec, k),
            k,
            len(orbit),
            (ReflectionGroupDesc(m0, 1, k), ReflectionGroupDesc(m0, 1, r - k)),
            extra,
        )
        if datum.stabilizer_order != stab_order:
            raise OrbitModelError(f"{spec.short()} k={k}: stabilizer {stab_order} != {datum.stabilizer_order}")
        if len(orbit) * stab_order != w_order:
            raise OrbitModelError(f"{spec.short()} k={k}: orbit-stabilizer gives {len(orbit) * stab_order} != {w_order}")
        expected_size = comb(r, k) // (2 if extra else 1)
        if len(orbit) != expected_size:
            raise OrbitModelError(f"{spec.short()} k={k}: orbit size {len(orbit)} != {expected_size}")
        if character_of_eta(group, rep_eta) != datum.representative:
            raise OrbitModelError(f"{spec.short()} k={k}: chi_k does not match its eta vector")
        orbits.append(datum)
    orbits.sort(key=lambda d: d.k)
    if [d.k for d in orbits] != expected_k_range(spec):
        raise OrbitModelError(f"{spec.short()}: representatives {[d.k for d in orbits]} != {expected_k_range(spec)}")
    return orbits


def same_orbit(spec: GradingSpec, k1: int, k2: int) -> bool:
    group = component_group(spec)
    quotient = not group.gamma_r_present
    r = spec.r

    def eta(k):
        return EtaVector(tuple(-1 if i < k else 1 for i in range(r)), quotient).canonical()

    a, b = eta(k1), eta(k2)
    return any(
        EtaVector(tuple(a.signs[pm[i]] for i in range(r)), quotient).canonical() == b
        for pm in itertools.permutations(range(r))
    )


def orbit_table_json(spec: GradingSpec) -> list[dict]:
    return [d.to_json() for d in weyl_orbits(spec)]
