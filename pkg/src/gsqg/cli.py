"""Command-line toolkit.

Subcommands: find-config (construct and check one triple), sweep (the
alpha admissibility sweep behind the x_-/x_+ curves), simulate (integrate
a triple and export the trajectory), burst (seeded burst runs from a
scenario file).  Every command writes a RunManifest JSON next to its
outputs; outputs are deterministic for identical manifests.

Exit codes: 0 success, 1 usage error, 2 negative scientific result
(failed stability check or empty admissible interval).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .burstsim import BurstScenario, convergence_study, run_burst
from .integrator import IntegratorConfig, Status, integrate, integrate_collapse
from .kernel import ALPHA_GUARD, DomainError, VortexState
from .selfsimilar import Classification, TripleConfig, center, classify
from .search import oriented_config, sweep, sweep_csv, x_interval
from .stability import hypothesis_a_check

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse default exits 2; keep 2 for science
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _manifest(command: str, params: dict, outputs: list[Path], t0: float) -> None:
    base = outputs[0] if outputs else Path(f"{command}.out")
    man = {
        "command": command,
        "parameters": params,
        "tool_version": __version__,
        "wall_time_s": round(time.monotonic() - t0, 3),
        "outputs": [str(p) for p in outputs],
    }
    _write(base.with_suffix(base.suffix + ".manifest.json"), json.dumps(man, indent=2))


def cmd_find_config(args) -> int:
    t_start = time.monotonic()
    out = Path(args.out)
    if args.x is None and not args.auto:
        print("find-config: provide --x or --auto", file=sys.stderr)
        return EXIT_USAGE
    if args.auto:
        rec = x_interval(args.alpha, coarse=args.x_coarse, refine_tol=args.refine_tol)
        if rec.empty:
            print(f"find-config: no admissible x at alpha={args.alpha}", file=sys.stderr)
            return EXIT_NEGATIVE
        x = 0.5 * (rec.x_minus + rec.x_plus)
    else:
        x = args.x
    try:
        cfg = oriented_config(args.alpha, x)
    except DomainError as e:
        print(f"find-config: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    report = hypothesis_a_check(cfg)
    outputs = [
        _write(out, cfg.to_json()),
        _write(out.with_suffix(".report.json"), report.to_json()),
    ]
    _manifest("find-config", {"alpha": args.alpha, "x": x, "auto": args.auto},
              outputs, t_start)
    print(f"x = {x:.12g}: hypothesis {'PASS' if report.passed else 'FAIL'}"
          f" ({report.details})")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_sweep(args) -> int:
    t_start = time.monotonic()
    lo, hi, g = args.alpha_min, args.alpha_max, ALPHA_GUARD
    straddles = lo < 2.0 - g and hi > 2.0 + g
    in_band = abs(lo - 2.0) <= g or abs(hi - 2.0) <= g
    if in_band:
        print("sweep: range endpoint inside the alpha=2 guard band", file=sys.stderr)
        return EXIT_USAGE
    if straddles and not args.split_at_2:
        print("sweep: range straddles alpha=2; pass --split-at-2", file=sys.stderr)
        return EXIT_USAGE
    res = sweep(lo, hi, alpha_step=args.alpha_step, coarse=args.x_coarse,
                refine_tol=args.refine_tol, jobs=args.jobs)
    out = Path(args.out)
    outputs = [
        _write(out, sweep_csv(res)),
        _write(out.with_suffix(".endpoints.json"),
               json.dumps({"alpha_minus": res.alpha_minus,
                           "alpha_plus": res.alpha_plus}, indent=2)),
    ]
    _manifest("sweep", {
        "alpha_min": lo, "alpha_max": hi, "alpha_step": args.alpha_step,
        "x_coarse": args.x_coarse, "refine_tol": args.refine_tol,
        "jobs": args.jobs,
    }, outputs, t_start)
    print(f"alpha_minus = {res.alpha_minus}, alpha_plus = {res.alpha_plus}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    t_start = time.monotonic()
    cfg = TripleConfig.from_json(Path(args.config).read_text())
    cen = center(cfg)
    state0 = VortexState(t=args.t0, z=cen.a, xi=cen.xi, alpha=cen.alpha)
    icfg = IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.rel_tol * 1e-3)
    kind = classify(cen)
    t_star = None
    if kind is Classification.COLLAPSE:
        traj, t_star = integrate_collapse(state0, icfg, horizon=args.t1)
        print(f"collapse detected; fitted t* = {t_star:.12g}")
    else:
        traj = integrate(state0, args.t1, icfg)
    out = Path(args.out)
    outputs = [_write(out, traj.to_csv())]
    _manifest("simulate", {
        "config": str(args.config), "t0": args.t0, "t1": args.t1,
        "rel_tol": args.rel_tol, "classification": kind.value,
        "t_star": t_star, "status": traj.status.value,
    }, outputs, t_start)
    print(f"status = {traj.status.value}, samples = {len(traj.times)}")
    return EXIT_OK if traj.status is not Status.STEP_FAILURE else EXIT_NEGATIVE


def cmd_burst(args) -> int:
    t_start = time.monotonic()
    scenario = BurstScenario.from_json(Path(args.scenario).read_text())
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    icfg = IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.rel_tol * 1e-3)
    outputs = []
    for t_ini in scenario.t_ini_sequence:
        traj, _ = run_burst(scenario, t_ini, icfg)
        outputs.append(_write(out_dir / f"trajectory_tini_{t_ini:.6g}.csv",
                              traj.to_csv()))
    diag = convergence_study(scenario, icfg)
    outputs.append(_write(out_dir / "diagnostics.json", json.dumps({
        "exponent_fit": diag.exponent_fit,
        "cauchy_gaps": list(diag.cauchy_gaps),
        "background_drift": diag.background_drift,
        "merged_intensity": scenario.merged_intensity,
    }, indent=2)))
    _manifest("burst", {"scenario": str(args.scenario), "rel_tol": args.rel_tol},
              outputs, t_start)
    print(f"exponent_fit = {diag.exponent_fit:.6g}, "
          f"cauchy_gaps = {[f'{g:.3e}' for g in diag.cauchy_gaps]}")
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="gsqg", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    default_jobs = int(os.environ.get("GSQG_JOBS", "1"))

    fc = sub.add_parser("find-config", help="construct and check one triple")
    fc.add_argument("--alpha", type=float, required=True)
    fc.add_argument("--x", type=float, default=None)
    fc.add_argument("--auto", action="store_true",
                    help="pick the midpoint of the admissible interval")
    fc.add_argument("--x-coarse", type=float, default=1e-4)
    fc.add_argument("--refine-tol", type=float, default=1e-7)
    fc.add_argument("--out", type=str, required=True)
    fc.set_defaults(func=cmd_find_config)

    sw = sub.add_parser("sweep", help="admissibility sweep over alpha")
    sw.add_argument("--alpha-min", type=float, required=True)
    sw.add_argument("--alpha-max", type=float, required=True)
    sw.add_argument("--alpha-step", type=float, default=1e-3)
    sw.add_argument("--x-coarse", type=float, default=1e-4)
    sw.add_argument("--refine-tol", type=float, default=1e-7)
    sw.add_argument("--jobs", type=int, default=default_jobs)
    sw.add_argument("--split-at-2", action="store_true",
                    help="allow ranges straddling the alpha=2 guard band")
    sw.add_argument("--out", type=str, required=True)
    sw.set_defaults(func=cmd_sweep)

    sim = sub.add_parser("simulate", help="integrate a triple configuration")
    sim.add_argument("--config", type=str, required=True)
    sim.add_argument("--t0", type=float, required=True)
    sim.add_argument("--t1", type=float, required=True)
    sim.add_argument("--rel-tol", type=float, default=1e-10)
    sim.add_argument("--out", type=str, required=True)
    sim.set_defaults(func=cmd_simulate)

    bu = sub.add_parser("burst", help="seeded burst runs from a scenario file")
    bu.add_argument("--scenario", type=str, required=True)
    bu.add_argument("--rel-tol", type=float, default=1e-10)
    bu.add_argument("--out", type=str, required=True)
    bu.set_defaults(func=cmd_burst)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as e:
        print(f"gsqg {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
