"""Command line front end.

Every subcommand takes a grading through --family/--order/--p/--q/--r and
prints JSON or markdown. Exit codes: 0 success, 2 invalid input or out of
scope, 3 a verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from fractions import Fraction
from typing import Callable

from .bfunction import (
    NotInLatticeError,
    closed_form_b,
    distinguished_characters,
    dual_exponents,
    dual_exponents_from_weights,
    dual_substitution,
    expected_degree,
    negation_duality_check,
    partial_sum_conditions,
    roots_in_unit_interval,
    same_character,
    specialized_roots,
    symbolic_negation_duality,
)
from .exact import rational_text
from .grading import (
    Family,
    GradingError,
    GradingSpec,
    OutOfScopeError,
    build_grading,
    dim_g1,
    dim_K,
    g1_pieces,
    iter_specs,
    k_factors,
    little_weyl,
)
from .oracle import APOLARITY, CONVENTIONS, Budget, BudgetExceeded, ProportionalityError, crosscheck, in_budget_specs
from .orbits import OrbitModelError, component_group, expected_rank, weyl_orbits
from .semi_invariants import (
    CharacterParams,
    det_weight,
    det_weight_from_pieces,
    free_indices,
    invariant_factorization,
    lattice_condition,
    semi_invariant_table,
    table_json,
)
from .sheaves import (
    IntervalError,
    all_monodromy,
    enumerate_sheaves,
    expected_count,
    rank_check,
    sheaf_table_json,
    sheaf_table_markdown,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_MISMATCH = 3

SUITES = ("grading", "semiinv", "degree", "interval", "duality", "distinguished", "orbits", "sheaves", "monodromy", "oracle")


class Mismatch(Exception):
    """A verification failed; carries the payload to print before exiting with 3."""

    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


def parse_params(text: str | None) -> CharacterParams:
    """'s1=1/2,s3=0' -> CharacterParams({1: 1/2, 3: 0})."""
    if not text:
        return CharacterParams({})
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if not name.startswith("s") or not name[1:].isdigit() or not value:
            raise ValueError(f"cannot parse parameter {item!r}; expected s<j>=<rational>")
        out[int(name[1:])] = Fraction(value.strip())
    return CharacterParams(out)


def _spec_from(args) -> GradingSpec:
    return build_grading(args.family, args.order, args.p, args.q, args.r)


# payload builders: each returns (json payload, markdown text)


def cmd_describe(args):
    spec = _spec_from(args)
    payload = {
        **spec.to_json(),
        "l": spec.l,
        "dims": list(spec.dims),
        "first_index": spec.first_index,
        "K": [{"kind": f.kind, "index": f.index, "size": f.size} for f in k_factors(spec)],
        "dim_K": dim_K(spec),
        "g1": [{"piece": pc.label(), "arrow": pc.arrow, "dim": pc.dim} for pc in g1_pieces(spec)],
        "dim_g1": dim_g1(spec),
        "little_weyl": little_weyl(spec).label(),
        "little_weyl_order": little_weyl(spec).order,
    }
    idx = list(spec.indices)
    md = [
        f"# {spec.short()}",
        "",
        f"l = {spec.l}, ambient dimension {spec.ambient_dim}",
        "",
        "| i | " + " | ".join(map(str, idx)) + " |",
        "|---|" + "---|" * len(idx),
        "| dim M_i | " + " | ".join(str(spec.dim_M(i)) for i in idx) + " |",
        "",
        "K = " + " x ".join(f.label() for f in k_factors(spec)) + f" (dim {dim_K(spec)})",
        "g1 = " + " + ".join(pc.label() for pc in g1_pieces(spec)) + f" (dim {dim_g1(spec)})",
        f"W_a = {little_weyl(spec).label()}, order {little_weyl(spec).order}",
    ]
    return payload, "\n".join(md) + "\n"


def cmd_semiinv(args):
    spec = _spec_from(args)
    fact = invariant_factorization(spec).exponents
    dw = det_weight(spec)
    if dw != det_weight_from_pieces(spec):
        raise Mismatch(f"{spec.short()}: Det formula disagrees with the trace computation")
    payload = {
        "spec": spec.to_json(),
        "table": table_json(spec),
        "factorization": {f"f{i}": n for i, n in sorted(fact.items())},
        "free_indices": free_indices(spec),
        "det_weight": dw.to_json(),
    }
    md = [f"# Semi-invariants of {spec.short()}", "", "| i | degree | character | role |", "|---|---|---|---|"]
    for si in semi_invariant_table(spec):
        md.append(f"| {si.index} | {si.degree} | {si.weight.to_text()} | {si.role} |")
    md += [
        "",
        "f = " + " * ".join(f"f{i}" + (f"^{n}" if n > 1 else "") for i, n in sorted(fact.items())),
        f"Det = {dw.to_text()}",
        f"free indices: {free_indices(spec)}",
    ]
    return payload, "\n".join(md) + "\n"


def cmd_bfun(args):
    spec = _spec_from(args)
    b = closed_form_b(spec, allow_outside=args.allow_outside)
    payload = {"spec": spec.to_json(), "b": b.to_json(), "expected_degree": expected_degree(spec)}
    md = [f"# b-function of {spec.short()}", "", f"b(s) = {b.to_text()}", f"scalar {rational_text(b.scalar)}, degree {b.degree}"]
    if args.s is not None:
        params = parse_params(args.s)
        roots = specialized_roots(spec, params)
        in_unit = roots_in_unit_interval(spec, params)
        payload["params"] = params.to_json()
        payload["specialized_roots"] = [{"root": rational_text(a), "mult": m} for a, m in sorted(roots.items())]
        payload["roots_in_unit_interval"] = in_unit
        payload["partial_sum_conditions"] = partial_sum_conditions(spec, params)
        if in_unit != payload["partial_sum_conditions"]:
            raise Mismatch("interval classification disagrees with the partial-sum conditions", payload)
        md += [
            "",
            "at " + ", ".join(f"{k}={v}" for k, v in params.to_json().items()),
            "roots: " + ", ".join(f"{rational_text(a)} x{m}" for a, m in sorted(roots.items())),
            f"all roots in [0,1): {in_unit}",
        ]
    return payload, "\n".join(md) + "\n"


def cmd_oracle(args):
    spec = _spec_from(args)
    report = crosscheck(spec, args.convention, Budget.from_env(args.budget))
    payload = report.to_json()
    md = [
        f"# Oracle for {spec.short()} ({args.convention})",
        "",
        "oracle roots: " + ", ".join(f"{r['root']} x{r['mult']}" for r in payload["oracle_roots"]),
        f"oracle scalar: {payload['oracle_scalar']}",
    ]
    if payload["closed_form_roots"] is not None:
        md.append(f"match with closed form: {payload['match']}, scalar ratio {payload['scalar_ratio']}")
    md += [f"note: {n}" for n in payload["notes"]]
    if report.match is False:
        raise Mismatch(f"{spec.short()}: oracle roots differ from the closed form", payload)
    return payload, "\n".join(md) + "\n"


def cmd_duality(args):
    spec = _spec_from(args)
    payload = {"spec": spec.to_json()}
    md = [f"# Duality for {spec.short()}", ""]
    if args.s is None:
        sub = dual_substitution(spec)
        ok = symbolic_negation_duality(spec)
        payload["dual_substitution"] = {k: v.to_text() for k, v in sorted(sub.items())}
        payload["negation_duality"] = ok
        md += [f"{k}* = {v.to_text()}" for k, v in sorted(sub.items())]
        md.append(f"roots at s* are the negatives: {ok}")
    else:
        params = parse_params(args.s)
        if not lattice_condition(spec, params):
            raise NotInLatticeError(f"{spec.short()}: {params.to_json()} is not a character of K")
        explicit = dual_exponents(spec, params)
        solved = dual_exponents_from_weights(spec, params)
        agree = same_character(spec, explicit, solved)
        ok = negation_duality_check(spec, params)
        payload.update({
            "params": params.to_json(),
            "dual_explicit": explicit.to_json(),
            "dual_from_weights": solved.to_json(),
            "same_character": agree,
            "negation_duality": ok,
        })
        md += [
            f"s* (explicit rules): {explicit.to_json()}",
            f"s* (from weights): {solved.to_json()}",
            f"same character: {agree}",
            f"roots at s* are the negatives: {ok}",
        ]
    if not payload.get("negation_duality", True) or payload.get("same_character") is False:
        raise Mismatch(f"{spec.short()}: duality check failed", payload)
    return payload, "\n".join(md) + "\n"


def cmd_orbits(args):
    spec = _spec_from(args)
    group = component_group(spec)
    if group.rank != expected_rank(spec):
        raise Mismatch(f"{spec.short()}: component group rank {group.rank} != {expected_rank(spec)}")
    orbits = weyl_orbits(spec)
    payload = {"spec": spec.to_json(), "component_group": group.to_json(), "orbits": [d.to_json() for d in orbits]}
    md = [
        f"# Orbits for {spec.short()}",
        "",
        f"I = (Z/2)^{group.rank}, gamma_r present: {group.gamma_r_present}",
        "",
        "| k | orbit size | W0 stabilizer | extra Z/2 |",
        "|---|---|---|---|",
    ]
    for d in orbits:
        md.append(f"| {d.k} | {d.orbit_size} | {' x '.join(g.label() for g in d.stabilizer0)} | {d.extra_z2} |")
    return payload, "\n".join(md) + "\n"


def cmd_sheaves(args):
    spec = _spec_from(args)
    payload = sheaf_table_json(spec)
    if payload["count"] != expected_count(spec):
        raise Mismatch(f"{spec.short()}: {payload['count']} labels, expected {expected_count(spec)}", payload)
    return payload, sheaf_table_markdown(spec)


def cmd_monodromy(args):
    spec = _spec_from(args)
    rows = []
    md = [f"# Monodromy for {spec.short()}", ""]
    for dc, R in all_monodromy(spec):
        rows.append({"character": dc.to_json(), "monodromy": R.to_json()})
        md.append(f"{dc.params.to_json()}: R(x) = {R.to_text()}")
    return {"spec": spec.to_json(), "characters": rows}, "\n".join(md) + "\n"


# verify-all


def _suite_specs(max_l: int):
    return list(iter_specs(max_l))


def _grid_values(max_num=3):
    return sorted({Fraction(n, d) for n in range(-max_num, max_num + 1) for d in (1, 2)})


def suite_grading(max_l, budget):
    n = 0
    for spec in iter_specs(max_l, r_values=(0, 1, 2, 3)):
        g1_pieces(spec)  # asserts dim g1 = dim K + r
        if sum(spec.dims) != spec.ambient_dim:
            raise Mismatch(f"{spec.short()}: dimensions do not add up")
        for i in spec.indices:
            if spec.dim_M(i) != spec.dim_M(spec.mirror(i)):
                raise Mismatch(f"{spec.short()}: M_{i} and its mirror differ")
        n += 1
    return n


def suite_semiinv(max_l, budget):
    n = 0
    for spec in _suite_specs(max_l):
        table = semi_invariant_table(spec, include_sentinels=False)
        fact = invariant_factorization(spec)
        if fact.degree(table) != spec.order:
            raise Mismatch(f"{spec.short()}: deg f = {fact.degree(table)} != {spec.order}")
        total = None
        by = {si.index: si for si in table}
        for i, k in fact.exponents.items():
            w = by[i].weight * k
            total = w if total is None else total + w
        if total is not None and not total.is_zero():
            raise Mismatch(f"{spec.short()}: f is not invariant")
        if det_weight(spec) != det_weight_from_pieces(spec):
            raise Mismatch(f"{spec.short()}: Det formula disagrees with the trace computation")
        n += 1
    return n


def suite_degree(max_l, budget):
    n = 0
    for spec in _suite_specs(max_l):
        if spec.family is Family.BD and spec.q < 2:
            continue
        if closed_form_b(spec).degree != expected_degree(spec):
            raise Mismatch(f"{spec.short()}: deg b != |W_a|")
        n += 1
    return n


def _lattice_points(spec, values):
    import itertools

    free = free_indices(spec)
    for vals in itertools.product(values, repeat=len(free)):
        params = CharacterParams(dict(zip(free, vals)))
        if lattice_condition(spec, params):
            yield params


def suite_interval(max_l, budget):
    n = 0
    for spec in _suite_specs(min(max_l, 4)):
        if spec.family is Family.BD and spec.q < 2:
            continue
        for params in _lattice_points(spec, _grid_values()):
            if roots_in_unit_interval(spec, params) != partial_sum_conditions(spec, params):
                raise Mismatch(f"{spec.short()} at {params.to_json()}: interval classification mismatch")
            n += 1
    return n


def suite_duality(max_l, budget):
    n = 0
    for spec in _suite_specs(min(max_l, 4)):
        if spec.family is Family.BD and spec.q < 2:
            continue
        if not symbolic_negation_duality(spec):
            raise Mismatch(f"{spec.short()}: symbolic duality fails")
        for params in _lattice_points(spec, _grid_values()):
            if not negation_duality_check(spec, params):
                raise Mismatch(f"{spec.short()} at {params.to_json()}: roots at s* are not the negatives")
            if not same_character(spec, dual_exponents(spec, params), dual_exponents_from_weights(spec, params)):
                raise Mismatch(f"{spec.short()} at {params.to_json()}: dual exponents disagree")
            n += 1
    return n


def suite_distinguished(max_l, budget):
    n = 0
    for spec in _suite_specs(max_l):
        for dc in distinguished_characters(spec):
            if dc.b is not None:
                got = Counter()
                for form, m in dc.b.roots:
                    got[form.constant] += m
                if got != dc.display:
                    raise Mismatch(f"{spec.short()} at {dc.params.to_json()}: b differs from the display")
            n += 1
    return n


def suite_orbits(max_l, budget):
    n = 0
    for spec in iter_specs(max_l, r_values=range(1, 7)):
        if spec.family is Family.BD and spec.p == 0 and spec.q == 0:
            continue
        for d in weyl_orbits(spec):
            if d.orbit_size * d.stabilizer_order != little_weyl(spec).order:
                raise Mismatch(f"{spec.short()}: orbit-stabilizer fails at k={d.k}")
        n += 1
    return n


def suite_sheaves(max_l, budget):
    n = 0
    for spec in iter_specs(max_l, r_values=range(1, 4)):
        if spec.family is Family.BD and spec.p == 0 and spec.q == 0:
            continue
        labels = enumerate_sheaves(spec)
        if len(labels) != expected_count(spec):
            raise Mismatch(f"{spec.short()}: label count mismatch")
        w = little_weyl(spec).order
        for k in sorted({lab.k for lab in labels}):
            if rank_check(spec, k) != w:
                raise Mismatch(f"{spec.short()}: rank check fails at k={k}")
        n += 1
    return n


def suite_monodromy(max_l, budget):
    n = 0
    for spec in _suite_specs(max_l):
        if spec.family is Family.BD and spec.p == 0 and spec.q == 0:
            continue
        for dc, R in all_monodromy(spec):
            if R.degree != little_weyl(spec).order:
                raise Mismatch(f"{spec.short()}: deg R != |W_a|")
            n += 1
    return n


def suite_oracle(max_l, budget):
    n = 0
    for spec in in_budget_specs(budget):
        if spec.l > max_l:
            continue
        report = crosscheck(spec, APOLARITY, budget)
        if report.match is False:
            raise Mismatch(f"{spec.short()}: oracle roots differ from the closed form", report.to_json())
        n += 1
    return n


SUITE_FUNCS: dict[str, Callable[[int, Budget], int]] = {
    "grading": suite_grading,
    "semiinv": suite_semiinv,
    "degree": suite_degree,
    "interval": suite_interval,
    "duality": suite_duality,
    "distinguished": suite_distinguished,
    "orbits": suite_orbits,
    "sheaves": suite_sheaves,
    "monodromy": suite_monodromy,
    "oracle": suite_oracle,
}


def cmd_verify_all(args):
    budget = Budget.from_env(args.budget)
    chosen = args.suite or list(SUITES)
    results = []
    failed = None
    for name in chosen:
        try:
            count = SUITE_FUNCS[name](args.max_l, budget)
            results.append({"suite": name, "passed": True, "checked": count, "message": None})
        except (Mismatch, OrbitModelError, ProportionalityError, AssertionError) as exc:
            results.append({"suite": name, "passed": False, "checked": None, "message": str(exc)})
            failed = failed or exc
    payload = {"max_l": args.max_l, "budget": {"dim": budget.max_dim, "degree": budget.max_degree}, "suites": results}
    md = ["# verify-all", "", "| suite | result | checked |", "|---|---|---|"]
    for r in results:
        md.append(f"| {r['suite']} | {'pass' if r['passed'] else 'FAIL: ' + r['message']} | {r['checked'] if r['checked'] is not None else '-'} |")
    text = "\n".join(md) + "\n"
    if failed is not None:
        raise Mismatch(str(failed), (payload, text))
    return payload, text


COMMANDS = {
    "describe": cmd_describe,
    "semiinv": cmd_semiinv,
    "bfun": cmd_bfun,
    "oracle": cmd_oracle,
    "duality": cmd_duality,
    "orbits": cmd_orbits,
    "sheaves": cmd_sheaves,
    "monodromy": cmd_monodromy,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grla", description="Computations for rank-one and higher-rank type I gradings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_args(p):
        p.add_argument("--family", required=True, choices=[f.value for f in Family])
        p.add_argument("--order", required=True, type=int, help="d in type A, m otherwise")
        p.add_argument("--p", type=int, default=0)
        p.add_argument("--q", type=int, default=0)
        p.add_argument("--r", type=int, default=1)

    def fmt(p):
        p.add_argument("--format", choices=("json", "markdown"), default="markdown")

    for name in ("describe", "semiinv", "orbits", "sheaves", "monodromy"):
        p = sub.add_parser(name)
        spec_args(p)
        fmt(p)
    p = sub.add_parser("bfun")
    spec_args(p)
    fmt(p)
    p.add_argument("--s", help="character exponents, e.g. s1=1/2,s3=0")
    p.add_argument("--allow-outside", action="store_true", help="evaluate the BD product formula for q < 2 as well")
    p = sub.add_parser("duality")
    spec_args(p)
    fmt(p)
    p.add_argument("--s", help="character exponents, e.g. s1=1/2,s3=0")
    p = sub.add_parser("oracle")
    spec_args(p)
    fmt(p)
    p.add_argument("--convention", choices=CONVENTIONS, default=APOLARITY)
    p.add_argument("--budget", type=int, help="maximal dim g1 (default from GRLA_BUDGET or 10)")
    p = sub.add_parser("verify-all")
    fmt(p)
    p.add_argument("--max-l", type=int, default=3)
    p.add_argument("--budget", type=int, help="maximal dim g1 for the oracle suite")
    p.add_argument("--suite", action="append", choices=SUITES, help="run only these suites (repeatable)")
    return parser


def schema_for(command: str) -> dict:
    """The JSON schema shipped for a subcommand's --format json output."""
    from importlib import resources

    text = resources.files("grla").joinpath("schemas", f"{command}.schema.json").read_text()
    return json.loads(text)


def _emit(payload, text, fmt, stream):
    if fmt == "json":
        stream.write(json.dumps(payload, indent=2) + "\n")
    else:
        stream.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    fmt = getattr(args, "format", "markdown")
    try:
        payload, text = COMMANDS[args.command](args)
    except Mismatch as exc:
        if isinstance(exc.payload, tuple):
            _emit(*exc.payload, fmt, stdout)
        elif exc.payload is not None:
            _emit(exc.payload, json.dumps(exc.payload, indent=2) + "\n", fmt, stdout)
        stderr.write(f"verification failed: {exc}\n")
        return EXIT_MISMATCH
    except (OrbitModelError, ProportionalityError) as exc:
        stderr.write(f"verification failed: {exc}\n")
        return EXIT_MISMATCH
    except (GradingError, OutOfScopeError, BudgetExceeded, IntervalError, ValueError, KeyError, ZeroDivisionError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    _emit(payload, text, fmt, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
