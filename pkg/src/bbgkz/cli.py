"""Batch front end: problem files in, deterministic JSON reports out.

A problem file describes the group, the degree-one vectors, beta, the base
point policy, and a task list.  The runner validates the data, executes the
requested analyses, and writes a report whose cross-check booleans drive the
exit code: 0 when everything passes, 2 for invalid input, 3 for a failing
cross-check.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from fractions import Fraction
from importlib import resources

import jsonschema

from .abelian import AbelianGroup, NoDegreeFunctional, NotSpanning
from .linalg import GaussianRational
from .polyhedral import GradedSemigroup, build_semigroup, k_prim, normalized_volume
from .ring import (FVector, NondegeneracyRetriesExhausted, dual_kernel_dims,
                   hat_quotient_dims, hat_restriction_rank, is_nondegenerate,
                   jacobian_dims, r1_dims, random_rational_x)
from .solver import (check_residuals, filtration_dims, restricted_solution_rank,
                     solve_recursion)
from .torsion import (LogModulusBox, ResidualTooLarge, build_quotient,
                      find_common_basepoint, independence_count, lift_and_verify,
                      p_rho)

SCHEMA_VERSION = 1
ALL_TASKS = ("analyze", "solve", "restrict", "lift", "residuals")


class ProblemError(ValueError):
    """Problem file is invalid: schema, group data, or base point."""


def _load_schema(name):
    ref = resources.files("bbgkz.schemas").joinpath(name)
    return json.loads(ref.read_text(encoding="utf-8"))


RATIONAL_RE = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


def parse_rational(s) -> Fraction:
    if not isinstance(s, str) or not RATIONAL_RE.match(s):
        raise ProblemError(f"bad rational {s!r}: expected 'p' or 'p/q'")
    try:
        return Fraction(s)
    except ZeroDivisionError as e:
        raise ProblemError(f"bad rational {s!r}: {e}")


def parse_scalar(v) -> GaussianRational:
    """Scalar from JSON: 'p/q' string or {'re': 'p/q', 'im': 'p/q'}."""
    if isinstance(v, dict):
        re = parse_rational(v.get("re", "0"))
        im = parse_rational(v.get("im", "0"))
        return GaussianRational.from_fractions(re, im)
    return GaussianRational.from_fractions(parse_rational(v))


def format_scalar(v):
    if isinstance(v, GaussianRational):
        if v.is_real():
            return str(Fraction(v.a, v.d))
        return {"re": str(v.real), "im": str(v.imag)}
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return {"re_float": repr(v.real), "im_float": repr(v.imag)}
    return repr(float(v))


def format_element(c):
    out = {"free": list(c.free)}
    if c.torsion:
        out["torsion"] = list(c.torsion)
    return out


def format_dims(report):
    return {"per_degree": list(report.per_degree), "total": report.total}


class ProblemSpec:
    def __init__(self, data):
        g = data["group"]
        try:
            self.group = AbelianGroup(g["rank"], tuple(g.get("torsion_invariants", ())))
        except ValueError as e:
            raise ProblemError(str(e))
        self.vectors = tuple(
            self.group.element(v["free"], v.get("torsion", ()))
            for v in data["vectors"])
        self.beta = tuple(parse_scalar(b) for b in data["beta"])
        if len(self.beta) != self.group.rank:
            raise ProblemError("beta length must equal the free rank")
        self.x_policy = data["x_policy"]
        self.truncation = data.get("truncation")
        self.tasks = tuple(data.get("tasks", ALL_TASKS))
        self.name = data.get("name", "")
        self.raw = data

    def resolve_x(self, S, seed_override=None):
        """The base point plus its nondegeneracy certificate."""
        pol = self.x_policy
        if pol["mode"] == "explicit":
            if len(pol["values"]) != len(self.vectors):
                raise ProblemError("explicit x has wrong length")
            f = FVector(tuple(parse_scalar(v) for v in pol["values"]))
            ok, cert = is_nondegenerate(f, S)
            if not ok:
                raise ProblemError(
                    f"explicit x is degenerate: total {cert.total}, "
                    f"expected {cert.expected_total}, "
                    f"tail zero {cert.tail_degrees_zero}")
            return f, cert
        seed = seed_override if seed_override is not None else pol.get("seed", 0)
        bound = pol.get("denominator_bound", 4)
        return random_rational_x(S, seed=seed, denominator_bound=bound)


def load_problem(path) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ProblemError(f"cannot read problem file: {e}")
    schema = _load_schema("problem.schema.json")
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        raise ProblemError(f"schema violation: {e.message}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ProblemError(f"unsupported schema_version {data['schema_version']}")
    return ProblemSpec(data)


def _check(checks, name, passed, **details):
    entry = {"name": name, "passed": bool(passed)}
    entry.update(details)
    checks.append(entry)
    return passed


def _task_analyze(spec, S, f, D, report, checks):
    r = S.rank
    vol = normalized_volume(S.A)
    tors = S.group.torsion_order
    report["volume"] = vol
    report["torsion_order"] = tors
    report["k_prim"] = [format_element(c) for c in k_prim(S)]
    jac = jacobian_dims(f, S, r + 1)
    jac_int = jacobian_dims(f, S, r + 1, region="interior")
    dual = dual_kernel_dims(f, S, r + 1)
    hat = hat_quotient_dims(f, spec.beta, S, filtration_bound=min(D, r + 3))
    hat0 = hat_quotient_dims(f, (0,) * r, S, filtration_bound=min(D, r + 3))
    r1 = r1_dims(f, S)
    report["dims"] = {
        "jacobian_full": format_dims(jac),
        "jacobian_interior": format_dims(jac_int),
        "dual_kernel": format_dims(dual),
        "hat_quotient": format_dims(hat),
        "hat_quotient_beta0": format_dims(hat0),
        "r1": format_dims(r1),
    }
    _check(checks, "dimension_theorem", jac.total == vol * tors,
           total=jac.total, expected=vol * tors)
    _check(checks, "dual_kernel_matches_jacobian",
           dual.per_degree == jac.per_degree)
    _check(checks, "dual_kernel_vanishing",
           all(d == 0 for d in dual.per_degree[r + 1:]))
    _check(checks, "hat_total_matches_jacobian",
           hat.total == jac.total and hat0.total == jac.total,
           hat_total=hat.total, hat_beta0_total=hat0.total)
    _check(checks, "hat_graded_matches_jacobian",
           hat.per_degree[:r + 2] == jac.per_degree
           and all(d == 0 for d in hat.per_degree[r + 2:]))
    return jac


def _task_solve(spec, S, f, D, report, checks, jac):
    basis = solve_recursion(f, spec.beta, S, truncation=D)
    filt = filtration_dims(basis)
    vol = report.get("volume", normalized_volume(S.A))
    tors = S.group.torsion_order
    tables = []
    for t in basis.tables:
        lead = [[format_element(c), format_scalar(v)]
                for c, v in sorted(t.entries.items(), key=lambda kv: kv[0].sort_key())
                if t.degree(c) == t.leading_degree]
        tables.append({"leading_degree": t.leading_degree, "leading_entries": lead})
    report["solution_basis"] = {
        "dimension": len(basis),
        "filtration": format_dims(filt),
        "tables": tables,
    }
    _check(checks, "solution_dimension", len(basis) == vol * tors,
           dimension=len(basis), expected=vol * tors)
    if jac is not None:
        _check(checks, "filtration_matches_jacobian",
               filt.per_degree[:len(jac.per_degree)] == jac.per_degree
               and all(d == 0 for d in filt.per_degree[len(jac.per_degree):]))
    return basis


def _task_restrict(spec, S, f, D, report, checks):
    r = S.rank
    beta0 = (GaussianRational(0),) * r
    basis0 = solve_recursion(f, beta0, S, truncation=max(D, r + 1))
    sol_rank = restricted_solution_rank(basis0)
    hat_rank = hat_restriction_rank(f, S, filtration_bound=min(D, r + 3))
    r1_total = r1_dims(f, S).total
    report["restriction_ranks"] = {
        "solution_side": sol_rank,
        "hat_side": hat_rank,
        "r1_total": r1_total,
    }
    _check(checks, "restriction_rank_three_way",
           sol_rank == hat_rank == r1_total,
           solution=sol_rank, hat=hat_rank, r1=r1_total)


def _task_lift(spec, S, f, D, report, checks):
    tors = S.group.torsion_order
    vol = report.get("volume", normalized_volume(S.A))
    if tors == 1:
        report["torsion_lift"] = {"skipped": "torsion order 1"}
        return
    Q = build_quotient(S.group, S.A)
    exact_lane = all(d in (2, 4) for d in S.group.torsion_invariants)
    lifted = []
    worst = 0.0
    if exact_lane:
        x = tuple(f.x)
        for rho in S.group.characters():
            z = p_rho(rho, x, Q)
            if not all(z):
                exact_lane = False
                break
            fz = FVector(z)
            ok, _ = is_nondegenerate(fz, Q.semigroup)
            if not ok:
                exact_lane = False
                break
            qbasis = solve_recursion(fz, spec.beta, Q.semigroup, truncation=D)
            for psi in qbasis.tables:
                table, resid = lift_and_verify(psi, rho, x, S)
                worst = max(worst, resid)
                lifted.append(table)
    if not exact_lane:
        lifted = []
        worst = 0.0
        m = len(Q.images)
        region = LogModulusBox((math.log(0.5),) * m, (math.log(2.0),) * m)
        x = find_common_basepoint(Q, region)
        beta_f = tuple(complex(b) for b in spec.beta)
        for rho in S.group.characters():
            z = p_rho(rho, x, Q)
            qbasis = solve_recursion(z, beta_f, Q.semigroup, truncation=D,
                                     backend="float")
            for psi in qbasis.tables:
                table, resid = lift_and_verify(psi, rho, x, S)
                worst = max(worst, resid)
                lifted.append(table)
    rank = independence_count(lifted)
    report["torsion_lift"] = {
        "mode": "exact" if exact_lane else "float",
        "lifted_tables": len(lifted),
        "rank": rank,
        "expected": vol * tors,
        "max_residual": worst,
    }
    _check(checks, "torsion_lift_rank", rank == vol * tors,
           rank=rank, expected=vol * tors)
    _check(checks, "torsion_lift_residual", worst <= 1e-9, max_residual=worst)


def _task_residuals(spec, S, f, D, report, checks, basis):
    if basis is None:
        basis = solve_recursion(f, spec.beta, S, truncation=D)
    rr = check_residuals(basis)
    failing = [c for c in rr.checks if not c.passed]
    report["residuals"] = {
        "recursion_identity_exact": rr.shift_identity_exact,
        "numeric_checks": len(rr.checks),
        "numeric_failures": len(failing),
    }
    _check(checks, "residuals", rr.all_passed,
           exact=rr.shift_identity_exact, failures=len(failing))


def run(problem_path, tasks=None, seed=None, truncation=None,
        timings=True, out_path=None):
    """Execute the requested tasks and return (report dict, exit code)."""
    try:
        spec = load_problem(problem_path)
        S = build_semigroup(spec.group, spec.vectors)
    except (ProblemError, NoDegreeFunctional, NotSpanning, ValueError) as e:
        return {"error": f"{type(e).__name__}: {e}"}, 2
    task_list = tuple(tasks) if tasks else spec.tasks
    bad = [t for t in task_list if t not in ALL_TASKS]
    if bad:
        return {"error": f"unknown tasks: {bad}"}, 2
    D = truncation if truncation is not None else (
        spec.truncation if spec.truncation is not None else S.rank + 3)
    if D < S.rank + 1:
        return {"error": f"truncation {D} below rank + 1"}, 2
    try:
        f, cert = spec.resolve_x(S, seed_override=seed)
    except (ProblemError, NondegeneracyRetriesExhausted) as e:
        return {"error": f"{type(e).__name__}: {e}"}, 2

    report = {
        "schema_version": SCHEMA_VERSION,
        "problem": spec.raw,
        "tasks_run": list(task_list),
        "truncation": D,
        "base_point": [format_scalar(v) for v in f.x],
        "nondegeneracy": {
            "total": cert.total,
            "expected_total": cert.expected_total,
            "per_degree": list(cert.per_degree),
        },
    }
    checks = []
    times = {}
    jac = None
    basis = None
    try:
        for task in ALL_TASKS:
            if task not in task_list:
                continue
            t0 = time.monotonic()
            if task == "analyze":
                jac = _task_analyze(spec, S, f, D, report, checks)
            elif task == "solve":
                basis = _task_solve(spec, S, f, D, report, checks, jac)
            elif task == "restrict":
                _task_restrict(spec, S, f, D, report, checks)
            elif task == "lift":
                _task_lift(spec, S, f, D, report, checks)
            elif task == "residuals":
                _task_residuals(spec, S, f, D, report, checks, basis)
            times[task] = round(time.monotonic() - t0, 4)
    except ResidualTooLarge as e:
        _check(checks, "torsion_lift_residual", False, error=str(e))
    report["checks"] = checks
    report["all_passed"] = all(c["passed"] for c in checks)
    if timings:
        report["timings_seconds"] = times
    code = 0 if report["all_passed"] else 3
    if out_path:
        write_report(report, out_path)
    return report, code


def write_report(report, path):
    """Serialize atomically so a crash cannot leave a partial report."""
    schema = _load_schema("report.schema.json")
    jsonschema.validate(report, schema)
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def fixture_path(name):
    """Filesystem path of a bundled problem fixture by bare name."""
    return str(resources.files("bbgkz.fixtures").joinpath(f"{name}.json"))


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bbgkz",
        description="Analyze a hypergeometric problem file and emit a JSON report.")
    parser.add_argument("problem", help="path to a problem JSON file")
    parser.add_argument("--tasks", default=None,
                        help="comma list from: " + ",".join(ALL_TASKS))
    parser.add_argument("--seed", type=int, default=None,
                        help="override the base point seed")
    parser.add_argument("--truncation", type=int, default=None,
                        help="override the series truncation degree")
    parser.add_argument("--no-timings", action="store_true",
                        help="omit the timings block (byte-stable output)")
    parser.add_argument("--out", default=None,
                        help="report path (default: print to stdout)")
    args = parser.parse_args(argv)
    tasks = args.tasks.split(",") if args.tasks else None
    report, code = run(args.problem, tasks=tasks, seed=args.seed,
                       truncation=args.truncation, timings=not args.no_timings,
                       out_path=args.out)
    if "error" in report:
        print(report["error"], file=sys.stderr)
    elif not args.out:
        print(json.dumps(report, indent=2, sort_keys=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
