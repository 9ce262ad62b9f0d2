"""Command line front end.

::

    switchfrac ml-eval 1.8 1 -4.35
    switchfrac forward --config run.json --out result/
    switchfrac inverse1 --config run.json --modes 32 --out result/
    switchfrac inverse2 --config run.json --skip-bad-modes --out result/
    switchfrac table1
    switchfrac figure-data --out figures/
    switchfrac accept --suite all --out verdict/

Exit status is 0 on success, 1 when a comparison or acceptance verdict
fails and 2 for invalid input or solver errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Any, Sequence

import numpy as np

from switchfrac import harness
from switchfrac.diagnostics import truncation_report
from switchfrac.forward import continuity_residuals, solve_direct, velocity_residuals
from switchfrac.inverse import (
    InverseInput,
    NearZeroDenominator,
    solve_problem1,
    solve_problem2,
)
from switchfrac.io import (
    RunConfig,
    RunConfigError,
    config_header,
    ensure_dir,
    load_config,
    to_jsonable,
    write_json,
    write_profile_csv,
    write_surface_csv,
    write_surface_json,
)
from switchfrac.mittag_leffler import DEFAULT_TOL, ml_eval

logger = logging.getLogger("switchfrac")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--alpha", type=float, help="wave-side order in (1, 2)")
    p.add_argument("--beta", type=float, help="diffusion-side order in (0, 1)")
    p.add_argument("--a", type=float, help="switch time")
    p.add_argument("--b", type=float, help="final time")
    p.add_argument("--xi", type=float, help="snapshot time in (a, b)")
    p.add_argument("--modes", type=int, help="number of sine modes K")
    p.add_argument("--tol", type=float, help="Mittag-Leffler tolerance")
    p.add_argument(
        "--skip-bad-modes",
        action="store_true",
        default=None,
        help="drop modes whose denominators fail the guard instead of stopping",
    )
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchfrac",
        description="Direct and interface-recovery solvers for the time-switched "
        "fractional wave/diffusion equation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml-eval", help="evaluate E_{a,b}(z) for z <= 0")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    p.add_argument("z", type=float)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("forward", help="solve the direct problem from phi, B")
    _add_problem_flags(p)

    p = sub.add_parser("inverse1", help="recover the velocity mismatch h")
    _add_problem_flags(p)

    p = sub.add_parser("inverse2", help="recover the position jump hbar")
    _add_problem_flags(p)

    p = sub.add_parser("table1", help="recompute the reference table")
    p.add_argument("--ml-perturbation", type=float, default=0.0, help=argparse.SUPPRESS)
    p.add_argument("--out", help="also write report.json here")

    p = sub.add_parser("figure-data", help="write surface/trace/profile CSV files")
    p.add_argument("--out", default="figure-data", help="output directory")

    p = sub.add_parser("accept", help="run acceptance suites")
    p.add_argument("--suite", default="all", choices=["all", *harness.SUITES])
    p.add_argument(
        "--ml-perturbation",
        type=float,
        default=0.0,
        help="relative error injected into every Mittag-Leffler value (table1 suite)",
    )
    p.add_argument("--out", help="also write report.json here")

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "alpha": args.alpha,
        "beta": args.beta,
        "a": args.a,
        "b": args.b,
        "xi": args.xi,
        "modes": args.modes,
        "tol": args.tol,
        "skip_bad_modes": args.skip_bad_modes,
    }
    return load_config(args.config, overrides)


def _write_solution(run: RunConfig, out, solution) -> None:
    cfg = run.problem
    ts = cfg.time_grid(run.time_nodes)
    xs = np.linspace(0.0, 1.0, run.space_nodes)
    u = solution.evaluate(ts, xs)
    write_surface_csv(out / "u.csv", ts, xs, u)
    write_surface_json(out / "u.json", cfg, ts, xs, u)


def _report(run: RunConfig, start: float, **extra: Any) -> dict[str, Any]:
    return {
        "config": {**config_header(run.problem), "tol": run.ml_tol, "quad_tol": run.quad_tol},
        "input": {k: v for k, v in run.source.items() if k not in config_header(run.problem)},
        **extra,
        "wall_time": time.perf_counter() - start,
    }


def _mode_vector(K: int, values: dict[int, float]) -> list[float]:
    # excluded modes are reported as zero
    return [float(values.get(k, 0.0)) for k in range(1, K + 1)]


def cmd_forward(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    run = _run_config(args)
    cfg = run.problem
    direct = solve_direct(
        cfg,
        run.series("phi"),
        run.series("B"),
        run.forcing,
        jump=run.series("jump"),
        ml_tol=run.ml_tol,
        quad_tol=run.quad_tol,
    )

    out = ensure_dir(args.out)
    _write_solution(run, out, direct.solution)
    write_profile_csv(out / "h.csv", direct.induced_h, "h")
    write_profile_csv(out / "psi.csv", direct.psi, "psi")

    sol = direct.solution
    cont = continuity_residuals(sol)
    vel = velocity_residuals(sol, run.forcing)
    report = _report(
        run,
        start,
        guards=[
            {"k": c.k, "E_alpha1": c.guard_E_alpha1, "E_alpha2": c.guard_E_alpha2}
            for c in sol.coefficients
        ],
        residuals={
            "continuity_max": float(np.max(cont)),
            "velocity_max": float(np.max(vel)),
            "continuity": cont,
            "velocity": vel,
        },
        truncation=truncation_report(cfg, direct.psi.coeffs, run.forcing).to_dict(),
        psi=direct.psi,
        induced_h=direct.induced_h,
    )
    write_json(out / "report.json", report)
    return EXIT_OK


def _cmd_inverse(args: argparse.Namespace, problem: int) -> int:
    start = time.perf_counter()
    run = _run_config(args)
    if "psi" not in run.data:
        raise RunConfigError("an inverse solve needs snapshot data 'psi'")

    inp = InverseInput(
        run.problem,
        run.series("phi"),
        run.series("psi"),
        run.forcing,
        ml_tol=run.ml_tol,
        quad_tol=run.quad_tol,
    )
    solve = solve_problem1 if problem == 1 else solve_problem2
    res = solve(inp, skip_bad_modes=run.skip_bad_modes)

    out = ensure_dir(args.out)
    _write_solution(run, out, res.solution)
    name = "h" if problem == 1 else "hbar"
    write_profile_csv(out / f"{name}.csv", res.interface, name)

    report = _report(
        run,
        start,
        **{k: v for k, v in res.report.items() if k not in ("config", "wall_time")},
        interface=res.interface,
        B=_mode_vector(run.problem.K, {c.k: c.B_k for c in res.solution.coefficients}),
    )
    write_json(out / "report.json", report)
    if res.excluded_modes:
        logger.warning("excluded modes: %s", ", ".join(map(str, res.excluded_modes)))
    return EXIT_OK


def cmd_table1(args: argparse.Namespace) -> int:
    cmp = harness.run_table1(args.ml_perturbation)
    print(cmp.format())
    if args.out:
        write_json(ensure_dir(args.out) / "report.json", cmp.to_dict())
    return EXIT_OK if cmp.passed else EXIT_FAIL


def cmd_figure_data(args: argparse.Namespace) -> int:
    checks = harness.run_figure_data(args.out)
    for tag, c in checks.items():
        print(
            f"{tag}: u(0,0.5)={c['u_t0']:.15g} u(xi,0.5)={c['u_xi']:.15g} "
            f"switch jump={c['switch_jump']:.3e}"
        )
    return EXIT_OK


def cmd_accept(args: argparse.Namespace) -> int:
    verdict = harness.run_accept(args.suite, ml_perturbation=args.ml_perturbation)
    for name, r in verdict["suites"].items():
        print(f"{name}: {'PASS' if r['passed'] else 'FAIL'} ({r['wall_time']:.2f} s)")
    if args.out:
        write_json(ensure_dir(args.out) / "report.json", verdict)
    else:
        print(json.dumps(to_jsonable(verdict), indent=2, sort_keys=True))
    return EXIT_OK if verdict["passed"] else EXIT_FAIL


def cmd_ml_eval(args: argparse.Namespace) -> int:
    r = ml_eval(args.a, args.b, args.z, args.tol)
    print(f"value {r.value:.15g}")
    print(f"abs_error_estimate {r.abs_error_estimate:.15g}")
    print(f"method {r.method_used}")
    return EXIT_OK


COMMANDS = {
    "ml-eval": cmd_ml_eval,
    "forward": cmd_forward,
    "inverse1": lambda args: _cmd_inverse(args, 1),
    "inverse2": lambda args: _cmd_inverse(args, 2),
    "table1": cmd_table1,
    "figure-data": cmd_figure_data,
    "accept": cmd_accept,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (RunConfigError, NearZeroDenominator, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
