"""``stvsi`` command line."""
from __future__ import annotations

import argparse
import csv
import glob
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import export
from .calibration import CalibrationResult, analysis_window, tune_gamma1
from .config import AssessConfig
from .divergence import GompertzReference, empirical_distribution, oscillation_samples
from .emd import EmdConfig, oscillatory_component
from .errors import InputError, NoFaultDetected, NoFeasibleGamma, StvsiError
from .lyapunov import le_series
from .pipeline import StreamAssessor, assess, assess_batch, assess_decomposition
from .scenarios import KINDS, BoundaryPair, ScenarioSpec, gen
from .trajectory import differentiate, load_csv, write_csv

EXIT_OK, EXIT_INPUT, EXIT_NO_FAULT, EXIT_INFEASIBLE = 0, 2, 3, 4


def _add_analysis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=float, default=3.0, help="window duration in s")
    p.add_argument("--gamma1", type=float, default=None, help="overrides the calibration file")
    p.add_argument("--gamma2", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--dip-threshold", type=float, default=0.7)
    p.add_argument("--clear-slope", type=float, default=0.01)
    p.add_argument("--depth-tol", type=float, default=0.1,
                   help="dip bottom tolerance as a fraction of (dip threshold - minimum)")
    p.add_argument("--deriv", choices=["local-polynomial", "central-difference"],
                   default="local-polynomial")
    p.add_argument("--bins", type=int, default=AssessConfig.bin_count)
    p.add_argument("--per-imf", action="store_true", help="also report each IMF's oscillation index")


def _config(args, calibration: Optional[str] = None) -> AssessConfig:
    cfg = AssessConfig(
        window_duration=args.window,
        gamma2=args.gamma2,
        dip_threshold=args.dip_threshold,
        clear_slope=args.clear_slope,
        depth_tol=args.depth_tol,
        deriv_method=args.deriv,
        bin_count=args.bins,
        per_imf=args.per_imf,
        t0=getattr(args, "t0", None),
    )
    if calibration:
        cfg = cfg.with_calibration(CalibrationResult.load(calibration))
    if args.gamma1 is not None:
        cfg = cfg.replace(gamma1=args.gamma1)
    if args.epsilon is not None:
        cfg = cfg.replace(epsilon=args.epsilon)
    return cfg


def _write_exports(traj, cfg: AssessConfig, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    window, d = analysis_window(traj, cfg)
    with open(directory / "decomposition.csv", "w", newline="") as fh:
        export.write_decomposition(window, d, fh)
    series = le_series(differentiate(d.residual, window.dt, cfg.deriv_method), window.dt)
    with open(directory / "le_residual.csv", "w", newline="") as fh:
        export.write_le_series(series, fh, t0=window.t0)
    dist = empirical_distribution(np.exp(series.lambdas), cfg.bin_count)
    with open(directory / "dist_residual.csv", "w", newline="") as fh:
        export.write_distribution(dist, GompertzReference(cfg.gamma1, cfg.residual_shift), fh)
    osc = oscillatory_component(d)
    if np.any(osc):
        s = oscillation_samples(osc, window.dt, cfg.deriv_method, cfg.magnitude)
        dist = empirical_distribution(s, cfg.bin_count)
        with open(directory / "dist_oscillatory.csv", "w", newline="") as fh:
            export.write_distribution(dist, GompertzReference(cfg.gamma2, cfg.oscillation_shift), fh)


def cmd_assess(args) -> int:
    cfg = _config(args, args.calibration)
    traj = load_csv(args.input)
    report = assess(traj, cfg)
    if args.format == "json":
        print(report.to_json(indent=2))
    else:
        row = report.flat()
        w = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
    if args.export_dir:
        _write_exports(traj, cfg, Path(args.export_dir))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _config(args)
    pair = BoundaryPair(load_csv(args.s1), load_csv(args.s2), args.t0_s1, args.t0_s2)
    epsilon = 0.02 if args.epsilon is None else args.epsilon
    result = tune_gamma1(pair, epsilon, (args.gamma_min, args.gamma_max), args.grid, cfg)
    text = result.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    print(
        f"gamma1={result.gamma1:.6g} d_critical_r={result.d_critical_r:.6g} "
        f"(d_s1={result.d_s1:.6g}, d_s2={result.d_s2:.6g})",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_batch(args) -> int:
    cfg = _config(args, args.calibration)
    paths = sorted(glob.glob(args.glob))
    items = assess_batch(paths, cfg, workers=args.workers)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for item in items:
            out.write(json.dumps(item.to_dict()) + "\n")
    finally:
        if args.out:
            out.close()
    n_ok = sum(item.ok for item in items)
    print(f"{n_ok}/{len(items)} assessed", file=sys.stderr)
    return EXIT_OK


def cmd_stream(args) -> int:
    cfg = _config(args, args.calibration)
    assessor = StreamAssessor(cfg, heartbeat_every=args.heartbeat)
    for lineno, line in enumerate(sys.stdin, 1):
        line = line.strip()
        if not line or line.lower().replace(" ", "") == "t,v":
            continue
        try:
            t, v = (float(x) for x in line.split(","))
        except ValueError:
            print(json.dumps({"event": "error", "line": lineno, "detail": f"bad record {line!r}"}),
                  flush=True)
            continue
        for event in assessor.push(t, v):
            print(json.dumps(event.to_dict()), flush=True)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = ScenarioSpec(
        kind=args.kind,
        alpha=args.alpha,
        amp=args.amp,
        omega=2 * np.pi * args.freq,
        beta=args.beta,
        alpha_osc=args.alpha_osc,
        r0=args.r0,
        t_fault=args.t_fault,
        t_clear=args.t_clear,
        noise_sigma=args.noise,
        dt=args.dt,
        duration=args.duration,
        seed=args.seed,
    )
    traj = gen(spec)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(traj, fh)
    else:
        write_csv(traj, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stvsi", description="Short-term voltage stability indices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="score one trajectory")
    p.add_argument("--input", required=True)
    p.add_argument("--t0", type=float, default=None, help="window start; skips fault detection")
    p.add_argument("--calibration", default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--export-dir", default=None, help="write decomposition/LE/distribution CSVs")
    _add_analysis_args(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("calibrate", help="tune gamma1 from a critical boundary pair")
    p.add_argument("--s1", required=True, help="slowest critical recovery")
    p.add_argument("--s2", required=True, help="fastest critical recovery")
    p.add_argument("--t0-s1", type=float, default=None)
    p.add_argument("--t0-s2", type=float, default=None)
    p.add_argument("--gamma-min", type=float, default=0.01)
    p.add_argument("--gamma-max", type=float, default=10.0)
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--out", default=None)
    _add_analysis_args(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("batch", help="score many CSV files")
    p.add_argument("--glob", required=True)
    p.add_argument("--calibration", default=None)
    p.add_argument("--out", default=None, help="JSONL output (stdout if omitted)")
    p.add_argument("--workers", type=int, default=None)
    _add_analysis_args(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("stream", help="score a live t,v feed from stdin")
    p.add_argument("--stdin", action="store_true", default=True)
    p.add_argument("--calibration", default=None)
    p.add_argument("--heartbeat", type=int, default=1000, help="samples between heartbeats")
    _add_analysis_args(p)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("gen", help="generate a synthetic scenario CSV")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--amp", type=float, default=0.1)
    p.add_argument("--freq", type=float, default=1.0, help="oscillation frequency in Hz")
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--alpha-osc", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=0.7)
    p.add_argument("--t-fault", type=float, default=0.5)
    p.add_argument("--t-clear", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--duration", type=float, default=3.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoFaultDetected as exc:
        print(f"stvsi: no fault detected: {exc}", file=sys.stderr)
        return EXIT_NO_FAULT
    except NoFeasibleGamma as exc:
        print(f"stvsi: calibration infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, OSError, ValueError) as exc:
        print(f"stvsi: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
