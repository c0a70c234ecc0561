"""Command line front end.

Subcommands: solve (run one of the four algorithms on an instance file),
verify (check a solution file against an instance at a given radius), gap
(emit a member of the unbounded-integrality-gap family), and bench (random
instances, one JSON line per run).

Exit codes: 0 success, 1 bad input, 2 a negative verdict (certified
infeasibility or failed verification).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .conservative import solve_conservative_general, solve_conservative_uniform
from .instance import (
    ContractViolation,
    InstanceError,
    MetricInstance,
    Radius,
    SizeLimitError,
    canonical_json,
    decimal_str,
    load_instance,
    parse_exact_json,
    save_instance,
)
from .oracle import (
    exact_opt_conservative,
    exact_opt_ft,
    gap_instance,
    random_point_instance,
    verify_conservative,
    verify_ft,
)
from .solvers import DEFAULT_ALPHA_BOUND, solve_ft_general, solve_ft_uniform

ALGORITHMS = ("ft-general", "ft-0l", "cons-0l", "cons-general")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are input errors, not verdicts
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _run_algorithm(inst: MetricInstance, alg: str, alpha_bound: int, residual: str):
    if alg == "ft-general":
        return solve_ft_general(inst, alpha_bound=alpha_bound)
    if alg == "ft-0l":
        return solve_ft_uniform(inst)
    if alg == "cons-0l":
        return solve_conservative_uniform(inst)
    if alg == "cons-general":
        return solve_conservative_general(inst, residual=residual)
    raise InstanceError(f"unknown algorithm {alg!r}")


def _verify_result(inst: MetricInstance, res) -> bool:
    r = res.radius()
    if inst.variant == "conservative":
        return verify_conservative(inst, res.centers, res.assignment, r).ok
    return verify_ft(inst, res.centers, r).ok


def build_report(inst: MetricInstance, res, with_oracle: bool = False) -> dict:
    """JSON-ready report; numbers appear as exact decimal strings with the
    squared values alongside, since radii are usually irrational."""
    report = {
        "algorithm": res.algorithm,
        "instance": inst.name,
        "n": inst.n,
        "k": inst.k,
        "alpha": inst.alpha,
        "variant": inst.variant,
        "feasible": res.feasible,
    }
    if not res.feasible:
        tau2, reason = res.outcome.reasons[-1]
        report["infeasible_at"] = Radius(1, tau2).display()
        report["infeasible_at_sq"] = decimal_str(Fraction(tau2))
        report["reason"] = reason
        return report
    tau2 = res.tau2_star
    report["tau_star"] = Radius(1, tau2).display()
    report["tau_star_sq"] = decimal_str(Fraction(tau2))
    report["stretch"] = res.stretch
    report["radius_bound"] = res.radius().display()
    report["radius_bound_sq"] = decimal_str(res.radius().value_sq())
    report["centers"] = list(res.centers)
    report["initial_assignment"] = {str(u): res.assignment[u] for u in sorted(res.assignment)}
    report["verified"] = _verify_result(inst, res)
    if with_oracle:
        try:
            if inst.variant == "conservative":
                opt2, _ = exact_opt_conservative(inst)
            else:
                opt2, _ = exact_opt_ft(inst)
        except SizeLimitError as exc:
            report["oracle_skipped"] = str(exc)
        else:
            if opt2 is None:
                report["oracle_opt"] = None
            else:
                report["oracle_opt"] = Radius(1, opt2).display()
                report["oracle_opt_sq"] = decimal_str(Fraction(opt2))
                ratio2 = res.radius().value_sq() / Fraction(opt2)
                try:
                    report["ratio_sq"] = decimal_str(ratio2)
                except InstanceError:
                    report["ratio_sq"] = f"{ratio2.numerator}/{ratio2.denominator}"
    return report


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_solve(args) -> int:
    inst = load_instance(args.input)
    res = _run_algorithm(inst, args.alg, args.alpha_bound, args.residual)
    report = build_report(inst, res, with_oracle=args.with_oracle)
    _emit(canonical_json(report), args.output)
    if not res.feasible:
        return 2
    return 0 if report["verified"] else 2


def _cmd_verify(args) -> int:
    inst = load_instance(args.input)
    with open(args.solution, "r", encoding="utf-8") as fh:
        sol = parse_exact_json(fh.read())
    if not isinstance(sol, dict) or "centers" not in sol:
        raise InstanceError("solution file needs a 'centers' list")
    centers = sol["centers"]
    radius = Radius.exact(Fraction(args.radius))
    if inst.variant == "conservative":
        phi_raw = sol.get("initial_assignment")
        if phi_raw is None:
            raise InstanceError("conservative verification needs 'initial_assignment'")
        phi0 = {int(u): c for u, c in phi_raw.items()}
        rep = verify_conservative(inst, centers, phi0, radius)
    else:
        rep = verify_ft(inst, centers, radius)
    _emit(canonical_json({"ok": rep.ok, "detail": rep.detail}), args.output)
    return 0 if rep.ok else 2


def _cmd_gap(args) -> int:
    inst = gap_instance(args.s)
    if args.output:
        save_instance(inst, args.output)
    else:
        sys.stdout.write(inst.to_json())
    return 0


def _cmd_bench(args) -> int:
    import random

    rng = random.Random(args.seed)
    lines = []
    for i in range(args.count):
        inst = random_point_instance(
            rng,
            args.n,
            args.k,
            args.alpha,
            variant=args.variant,
            caps_mode=args.caps,
            name=f"bench-{i}",
        )
        t0 = time.perf_counter()
        res = _run_algorithm(inst, args.alg, args.alpha_bound, args.residual)
        elapsed = time.perf_counter() - t0
        report = build_report(inst, res, with_oracle=args.with_oracle)
        report["seconds"] = round(elapsed, 6)
        lines.append(json.dumps(report))  # reports are JSON-native by now
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _add_common_solve_flags(p):
    p.add_argument("--alg", required=True, choices=ALGORITHMS)
    p.add_argument(
        "--alpha-bound",
        type=int,
        default=DEFAULT_ALPHA_BOUND,
        help="refuse general-capacity fault-tolerant runs above this alpha "
        "(scenario enumeration grows exponentially)",
    )
    p.add_argument(
        "--residual",
        choices=("lp", "exact"),
        default="lp",
        help="residual solver for cons-general: lp (stretch 9+6a) or exact "
        "exhaustive (stretch 1+6a, tiny inputs only)",
    )
    p.add_argument("--with-oracle", action="store_true",
                   help="add the exhaustive optimum and the squared ratio when small enough")
    p.add_argument("--output", default=None, help="write JSON here instead of stdout")


def main(argv=None) -> int:
    parser = _Parser(prog="ftkc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run an algorithm on an instance file")
    p.add_argument("--input", required=True)
    _add_common_solve_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a solution file at a given radius")
    p.add_argument("--input", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--radius", required=True,
                   help="decimal radius, compared exactly against distances")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gap", help="emit an instance whose LP relaxation lies")
    p.add_argument("--s", type=int, default=4, help="even parameter; n = s*s, gap s/2")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("bench", help="random instances, one JSON line each")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--variant", choices=("ft", "conservative"), default="ft")
    p.add_argument("--caps", choices=("general", "uniform", "unit"), default="general")
    p.add_argument("--seed", type=int, default=0)
    _add_common_solve_flags(p)
    p.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, SizeLimitError, FileNotFoundError, ValueError) as exc:
        print(f"ftkc: {exc}", file=sys.stderr)
        return 1
    except ContractViolation as exc:
        print(f"ftkc: internal guarantee violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
