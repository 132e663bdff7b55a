"""Command-line entry point: ``ringqaoa <command> [options]``.

Every command writes its tables as CSV into ``--out`` together with a JSON
run manifest. Execution is always single-threaded, so ``--serial`` is
accepted for compatibility but changes nothing.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import dynamics, io, optimize, schedules, verify
from .pseudospin import AngleSchedule, DomainError, residual_bound

log = logging.getLogger("ringqaoa")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--tol-bound", type=float, default=1e-7, help="halt within this gap of the bound")
    p.add_argument("--tol-iter", type=float, default=1e-5, help="bound gap used by the iteration-cost scan")
    p.add_argument("--serial", action="store_true", help="no-op: runs are always serial")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringqaoa", description="QAOA on the ring of disagrees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimise the angles at one depth")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--mode", choices=("random", "regular"), default="random")
    p.add_argument("--starts", type=int, default=10)

    p = sub.add_parser("regular", help="iterative construction of the regular solution")
    _common(p)
    p.add_argument("--n", type=int, default=1024, help="ring size; 0 selects N = 2P at every level")
    p.add_argument("--p-max", type=int, required=True)

    p = sub.add_parser("minima", help="count degenerate minima from random starts")
    _common(p)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--starts", type=int, default=10_000)
    p.add_argument("--cluster-tol", type=float, default=1e-4)

    p = sub.add_parser("scaling", help="residual energy against annealing time")
    _common(p)
    p.add_argument("--n", type=int, default=1024, help="ring size; 0 selects the infinite chain (digitized only)")
    p.add_argument("--family", choices=schedules.FAMILIES + ("regular",), default="linear")
    p.add_argument("--mode", choices=("digitized", "continuous"), default="digitized")
    p.add_argument("--taus", type=_float_list, default=[32, 64, 128, 256, 512, 1024])
    p.add_argument("--c", type=float, default=None, help="fixed schedule parameter; omit to optimise per tau")
    p.add_argument("--p-max", type=int, default=128, help="deepest level for --family regular")

    p = sub.add_parser("entropy", help="Shannon adiabaticity of several schedules")
    _common(p)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--p", type=_int_list, default=[16, 32, 64, 128])
    p.add_argument("--kinds", default="regular,linear,random")
    p.add_argument("--max-iterations", type=int, default=200_000)

    p = sub.add_parser("collapse", help="scaling collapse of regular s-profiles")
    _common(p)
    p.add_argument("--n", type=int, default=1024, help="ring size; 0 selects N = 2P")
    p.add_argument("--p", type=_int_list, default=[32, 64, 128])
    p.add_argument("--alphas", type=_float_list, default=list(np.round(np.arange(0.25, 3.0001, 0.05), 4)))
    p.add_argument("--window", type=_float_list, default=[0.25, 0.75])

    p = sub.add_parser("verify", help="self-check suites")
    _common(p)
    p.add_argument("--suite", choices=tuple(verify.SUITES) + tuple(verify.SUITE_ALIASES), default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--controllable", action="store_true", help="check that --schedule reaches zero on --n sites")
    p.add_argument("--schedule", type=Path, default=None)
    p.add_argument("--n", type=int, default=None)

    p = sub.add_parser("cost", help="BFGS iteration counts against depth")
    _common(p)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--mode", choices=("random", "iterative"), default="random")
    p.add_argument("--p", type=_int_list, default=[2, 4, 8, 16, 32, 64])
    p.add_argument("--starts", type=int, default=5)
    return parser


class _Run:
    """Collects outputs and writes the manifest at the end of a command."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.out = args.out
        self.out.mkdir(parents=True, exist_ok=True)
        config = {k: v for k, v in vars(args).items() if k not in ("out",)}
        self.manifest = io.RunManifest(argv, config, args.seed)
        self.command = args.command

    def csv(self, name, columns, rows, meta=None):
        path = io.write_csv(self.out / name, columns, rows, meta)
        self.manifest.record(path)
        print(path)
        return path

    def schedule(self, name, sched):
        path = io.write_schedule(self.out / name, sched)
        self.manifest.record(path)
        return path

    def close(self):
        self.manifest.write(self.out / f"{self.command}_manifest.json")


def _cfg(args, **kw) -> optimize.OptimizerConfig:
    return optimize.OptimizerConfig(bound_gap_tolerance=args.tol_bound, rng_seed=args.seed, **kw)


def cmd_optimize(args, run: _Run) -> int:
    cfg = _cfg(args)
    bound = residual_bound(args.n, args.p)
    if args.mode == "random":
        best, results = optimize.optimize_random(args.n, args.p, args.starts, cfg)
    else:
        levels = optimize.optimize_regular(args.n, args.p, cfg)
        best, results = levels[-1], levels
    rows = [(i, r.schedule.P, r.residual, bound, r.residual - bound, r.iterations, int(r.converged), r.total_time_tau)
            for i, r in enumerate(results)]
    run.csv("optimize.csv", ["run", "P", "epsilon", "eps_bound = 1/(2P+2) or 0", "gap", "iterations",
                             "converged", "tau = sum(gamma+beta)"], rows,
            {"N": args.n, "P": args.p, "mode": args.mode, "best_epsilon": repr(best.residual)})
    run.schedule("optimize_best.json", best.schedule)
    print(f"best epsilon {best.residual:.12f} (bound {bound:.12f})")
    return 0


def cmd_regular(args, run: _Run) -> int:
    N = None if args.n == 0 else args.n
    levels = optimize.optimize_regular(N, args.p_max, _cfg(args), return_all=True)
    rows, prof = [], []
    for r in levels:
        P = r.schedule.P
        n_sites = 2 * P if N is None else N
        dual = float(np.max(np.abs(r.schedule.beta[::-1] - r.schedule.gamma)))
        rows.append((P, n_sites, r.residual, residual_bound(n_sites, P), r.total_time_tau, r.iterations, dual))
        tau, t, s = schedules.s_profile(r.schedule, "mid")
        for m, (tm, sm, g, b) in enumerate(zip(t, s, r.schedule.gamma, r.schedule.beta), start=1):
            prof.append((P, m, tm, sm, g, b, tau))
    run.csv("regular_levels.csv", ["P", "N", "epsilon", "eps_bound = 1/(2P+2)", "tau = sum(gamma+beta)",
                                   "iterations", "duality_gap = max|beta_rev - gamma|"], rows)
    run.csv("regular_profiles.csv", ["P", "m", "t_m", "s_m = gamma/(gamma+beta)", "gamma", "beta", "tau"], prof)
    run.schedule(f"regular_P{levels[-1].schedule.P}.json", levels[-1].schedule)
    return 0


def cmd_minima(args, run: _Run) -> int:
    rep = optimize.enumerate_minima(args.n, args.p, args.starts, args.cluster_tol, _cfg(args))
    rows = [(i, rep.residuals[i], *r.as_vector()) for i, r in enumerate(rep.representatives)]
    cols = ["cluster", "epsilon"] + [f"gamma_{m}" for m in range(1, args.p + 1)] + [f"beta_{m}" for m in range(1, args.p + 1)]
    run.csv("minima.csv", cols, rows, {"N": args.n, "P": args.p, "count": rep.count,
                                       "count_modulo_duality": rep.count_modulo_duality,
                                       "expected = 2^P": 2**args.p, "starts": rep.n_starts,
                                       "at_bound": rep.n_at_bound})
    print(f"{rep.count} clusters ({rep.count_modulo_duality} modulo duality)")
    return 0


def cmd_scaling(args, run: _Run) -> int:
    N = None if args.n == 0 else args.n
    if args.family == "regular":
        levels = optimize.optimize_regular(N or 1024, args.p_max, _cfg(args), return_all=True)
        table = dynamics.ScalingTable("regular", np.array([r.total_time_tau for r in levels]),
                                      np.array([r.residual for r in levels]))
    elif args.family == "linear" or args.c is not None:
        table = dynamics.defect_scaling_run(N, args.family, args.taus, args.mode, args.c if args.c is not None else 1.0)
    else:
        def evaluator(tau):
            def ev(sched):
                if args.mode == "digitized":
                    return dynamics.digitized_residual(N, schedules.digitize(sched, int(round(tau)), dt=1.0).angles)
                return dynamics.continuous_residual(N, sched)
            return schedules.optimize_family_parameter(args.family, tau, ev).C
        table = dynamics.defect_scaling_run(N, args.family, args.taus, args.mode, evaluator)
    meta = {"N": "infinite" if N is None else N, "family": args.family, "mode": args.mode}
    try:
        fit = dynamics.fit_power_law(table.tau, table.epsilon, (32, 1024))
        meta.update(exponent=fit.exponent, prefactor=fit.prefactor, r_squared=fit.r_squared)
        print(f"fitted exponent {fit.exponent:.4f} (r^2 {fit.r_squared:.5f})")
    except ValueError:
        pass
    cs = table.parameter_C if table.parameter_C is not None else np.full(table.tau.size, np.nan)
    run.csv(f"scaling_{args.family}_{args.mode}.csv", ["tau", "epsilon", "C"],
            list(zip(table.tau, table.epsilon, cs)), meta)
    return 0


def cmd_entropy(args, run: _Run) -> int:
    kinds = args.kinds.split(",")
    P_max = max(args.p)
    regular = {}
    if "regular" in kinds:
        regular = {r.schedule.P: r.schedule for r in optimize.optimize_regular(args.n, P_max, _cfg(args),
                                                                                 return_all=True)}
    rows = []
    for P in args.p:
        for kind in kinds:
            if kind == "regular":
                sched = regular[P]
            elif kind == "linear":
                sched = optimize.linear_dqa_schedule(P)
            elif kind == "random":
                cfg = _cfg(args, max_iterations=args.max_iterations)
                sched = optimize.optimize_random(args.n, P, 1, cfg)[0].schedule
            else:
                raise DomainError(f"unknown schedule kind {kind!r}")
            rep = dynamics.shannon_adiabaticity(args.n, sched)
            rows.append((P, kind, rep.entropy, rep.normalized, int(rep.degenerate.sum())))
    run.csv("entropy.csv", ["P", "kind", "S", "4S/N", "degenerate_steps"], rows, {"N": args.n, "log": "natural"})
    return 0


def cmd_collapse(args, run: _Run) -> int:
    N = None if args.n == 0 else args.n
    levels = {r.schedule.P: r.schedule for r in optimize.optimize_regular(N, max(args.p), _cfg(args),
                                                                             return_all=True)}
    missing = [P for P in args.p if P not in levels]
    if missing:
        raise DomainError(f"depths {missing} are not levels of the regular construction")
    runs = [schedules.s_profile(levels[P], "mid") for P in args.p]
    window = tuple(args.window)
    rows = [(a, schedules.scaling_collapse(runs, a, window).distance) for a in args.alphas]
    best = min(rows, key=lambda r: r[1])
    run.csv("collapse.csv", ["alpha", "distance"], rows,
            {"N": "2P" if N is None else N, "P": args.p, "window": window, "argmin_alpha": best[0]})
    print(f"best alpha {best[0]} (distance {best[1]:.4f})")
    return 0


def cmd_verify(args, run: _Run) -> int:
    reports = []
    if args.controllable:
        if args.schedule is None or args.n is None:
            raise DomainError("--controllable needs --schedule FILE and --n")
        sched = io.read_schedule(args.schedule)
        if not isinstance(sched, AngleSchedule):
            raise DomainError("--controllable needs an angle schedule")
        reports.append(verify.controllable_check(args.n, sched))
    suite = verify.SUITE_ALIASES.get(args.suite, args.suite)
    suites = [suite] if suite else ([] if args.controllable else list(verify.SUITES))
    for name in suites:
        kw = {"seed": args.seed}
        if args.samples is not None:
            kw["samples"] = args.samples
        reports.append(verify.SUITES[name](**kw))
    rows = [(r.suite, int(r.passed), r.checks, r.worst, r.tolerance) for r in reports]
    run.csv("verify.csv", ["suite", "passed", "checks", "worst", "tolerance"], rows)
    for r in reports:
        print(r.line())
    return 0 if all(r.passed for r in reports) else 1


def cmd_cost(args, run: _Run) -> int:
    cfg = optimize.OptimizerConfig(bound_gap_tolerance=args.tol_iter, rng_seed=args.seed)
    scan = optimize.iteration_cost_scan(args.p, args.mode, cfg, N=args.n, n_starts=args.starts)
    meta = {"N": args.n, "mode": args.mode, "tolerance": args.tol_iter,
            "slope": scan.slope if scan.slope is not None else "n/a"}
    run.csv(f"cost_{args.mode}.csv", ["P", "n_iter"], scan.rows, meta)
    if scan.slope is not None:
        print(f"log-log slope {scan.slope:.3f}")
    return 0


COMMANDS = {
    "optimize": cmd_optimize,
    "regular": cmd_regular,
    "minima": cmd_minima,
    "scaling": cmd_scaling,
    "entropy": cmd_entropy,
    "collapse": cmd_collapse,
    "verify": cmd_verify,
    "cost": cmd_cost,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    run = _Run(args, argv)
    try:
        code = COMMANDS[args.command](args, run)
    except (DomainError, io.ScheduleFormatError, optimize.RegularConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 1 if args.command == "verify" else 2
    run.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
