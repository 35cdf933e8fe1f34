"""Command line interface: experiment runner and data emitter.

Subcommands:
    volume       forward/inverse ball volume and threshold utilities
    simulate     run replications, write records.jsonl + summaries.csv
    intensity    empirical vs exact mean exceedance counts over a u grid
    gumbel       empirical max-height CDF vs the Gumbel limit, KS report
    lemma-check  volume-bound verification grids

Exit codes: 0 ok, 1 statistical/hard failure, 2 usage error. Every run
writes manifest.json listing the resolved configuration and output files;
re-running with the same configuration reproduces identical data files.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytics, exceedance, geometry, lemma_verify
from .backend import backend_name
from .geometry import ThresholdSpec


def _write_manifest(out_dir, command, config_dict, outputs, t0):
    manifest = {
        "tool": "hypnn",
        "version": __version__,
        "backend": backend_name(),
        "command": command,
        "config": config_dict,
        "outputs": sorted(str(p.name) for p in outputs),
        "wall_clock_seconds": round(time.monotonic() - t0, 3),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _add_experiment_flags(p, reps_default=100):
    p.add_argument("--d", type=int, required=True, help="dimension (>= 2)")
    p.add_argument("--k", type=int, default=1, help="neighbour order")
    p.add_argument("--R", type=float, required=True, help="observation radius")
    p.add_argument("--c", type=float, default=0.0, help="restriction level")
    p.add_argument("--u-cap", type=float, default=exceedance.DEFAULT_U_CAP,
                   help="height cap (heights above are censored)")
    p.add_argument("--threshold", choices=("standard", "logvolume"),
                   default="standard")
    p.add_argument("--reps", type=int, default=reps_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: HYPNN_THREADS or CPU count)")
    p.add_argument("--out-dir", type=Path, default=Path("."))


def _config_from_args(args):
    return exceedance.ExperimentConfig(
        d=args.d, k=args.k, R=args.R, c=args.c, u_cap=args.u_cap,
        threshold_kind=args.threshold, seed=args.seed,
        replications=args.reps)


def _config_dict(config):
    return {
        "d": config.d, "k": config.k, "R": config.R, "c": config.c,
        "u_cap": config.u_cap, "threshold": config.threshold_kind,
        "seed": config.seed, "replications": config.replications,
    }


def _write_run_outputs(out_dir, summaries):
    out_dir.mkdir(parents=True, exist_ok=True)
    rec_path = out_dir / "records.jsonl"
    with rec_path.open("w") as f:
        for s in summaries:
            for rec in s.records:
                radial = float(np.arccosh(max(rec.position[0], 1.0)))
                f.write(json.dumps({
                    "replication_id": s.replication_id,
                    "height": rec.height,
                    "censored": rec.censored,
                    "radial": radial,
                }) + "\n")
    sum_path = out_dir / "summaries.csv"
    with sum_path.open("w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["replication_id", "n_points_in_BR", "n_records",
                     "max_height", "n_censored"])
        for s in summaries:
            wr.writerow([s.replication_id, s.n_points_in_BR, len(s.records),
                         "" if s.max_height is None else repr(s.max_height),
                         s.n_censored])
    return [rec_path, sum_path]


def cmd_volume(args):
    if args.R is not None:
        spec = ThresholdSpec(args.threshold, args.k)
        print(repr(geometry.threshold(spec, args.d, args.R)))
        return 0
    if args.V is not None:
        print(repr(geometry.inverse_ball_volume(args.d, args.V)))
        return 0
    if args.r is not None:
        print(repr(geometry.ball_volume(args.d, args.r)))
        return 0
    print("error: give one of --r, --V or --R", file=sys.stderr)
    return 2


def cmd_simulate(args):
    t0 = time.monotonic()
    config = _config_from_args(args)
    summaries = exceedance.run_experiment(config, threads=args.threads)
    outputs = _write_run_outputs(args.out_dir, summaries)
    outputs.append(_write_manifest(args.out_dir, "simulate",
                                   _config_dict(config), outputs, t0))
    return 0


def cmd_intensity(args):
    t0 = time.monotonic()
    config = _config_from_args(args)
    u_grid = np.array([float(t) for t in args.u_grid.split(",")])
    if np.any(u_grid < config.c) or np.any(u_grid >= config.u_cap):
        print("error: u grid must lie inside [c, u_cap)", file=sys.stderr)
        return 2
    summaries = exceedance.run_experiment(config, threads=args.threads)
    curve = analytics.build_intensity_curve(summaries, config, u_grid,
                                            confidence=args.confidence)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / "intensity.csv"
    gof_path = args.out_dir / "intensity_gof.csv"
    all_pass = True
    with path.open("w", newline="") as f, gof_path.open("w", newline="") as g:
        wr = csv.writer(f)
        wr.writerow(["u", "exact", "empirical_mean", "ci_halfwidth", "pass"])
        gw = csv.writer(g)
        gw.writerow(["name", "value", "n", "threshold", "pass"])
        for i, u in enumerate(curve.grid):
            dev = abs(curve.empirical_mean[i] - curve.exact[i])
            ok = dev <= curve.empirical_ci_halfwidth[i]
            all_pass &= ok
            wr.writerow([repr(float(u)), repr(float(curve.exact[i])),
                         repr(float(curve.empirical_mean[i])),
                         repr(float(curve.empirical_ci_halfwidth[i])), ok])
            gw.writerow([f"intensity-u{u}", repr(dev), config.replications,
                         repr(float(curve.empirical_ci_halfwidth[i])), ok])
    outputs = [path, gof_path]
    outputs.append(_write_manifest(args.out_dir, "intensity",
                                   dict(_config_dict(config),
                                        u_grid=args.u_grid), outputs, t0))
    return 0 if all_pass else 1


def cmd_gumbel(args):
    t0 = time.monotonic()
    if args.reps < 100:
        print("error: gumbel comparison needs --reps >= 100", file=sys.stderr)
        return 2
    config = _config_from_args(args)
    summaries = exceedance.run_experiment(config, threads=args.threads)
    # a replication with no record has max height somewhere below c; it
    # still counts as "max <= level" for every level on the grid
    sample = np.array([-np.inf if s.max_height is None else s.max_height
                       for s in summaries])
    below = int(np.sum(~np.isfinite(sample)))
    levels = np.array([float(t) for t in args.levels.split(",")])
    ks = analytics.ks_statistic(sample, analytics.gumbel_cdf)
    threshold = args.ks_threshold
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / "gumbel.csv"
    with path.open("w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["c", "empirical_cdf", "gumbel_cdf", "abs_diff"])
        for lvl in levels:
            emp = float(np.mean(sample <= lvl))
            g = analytics.gumbel_cdf(lvl)
            wr.writerow([repr(float(lvl)), repr(emp), repr(g),
                         repr(abs(emp - g))])
    gof_path = args.out_dir / "gumbel_gof.csv"
    with gof_path.open("w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["name", "value", "n", "threshold", "pass"])
        wr.writerow(["ks-max-height", repr(ks), sample.size,
                     repr(threshold), ks <= threshold])
        wr.writerow(["below-threshold-replications", below,
                     config.replications, "", True])
    outputs = [path, gof_path]
    outputs.append(_write_manifest(args.out_dir, "gumbel",
                                   dict(_config_dict(config),
                                        levels=args.levels), outputs, t0))
    return 0 if ks <= threshold else 1


def cmd_lemma_check(args):
    t0 = time.monotonic()
    d_values = [int(t) for t in args.d_range.split(",")]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / "lemmas.csv"
    hard_fail = False
    with path.open("w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["lemma", "d", "r", "s", "value", "lower", "upper",
                     "status"])
        r_grid = np.arange(2.0, args.r_max + 1e-9, args.r_step)
        s_grid = np.arange(0.5, args.s_max + 1e-9, args.s_step)
        for d in d_values:
            rep = lemma_verify.check_growth_bounds(d, r_grid)
            hard_fail |= not rep.passed
            gamma, Gamma = lemma_verify.growth_constants(d)
            wr.writerow(["growth", d, f"[2,{args.r_max}]", "", repr(rep.value),
                         repr(gamma), repr(Gamma),
                         "pass" if rep.passed else "fail"])
            if d == 3:
                wr.writerow(["volbou-lower", d, "", f"[0.5,{args.s_max}]",
                             "", "", "", "not-applicable"])
                rep = lemma_verify.check_volbou(d, s_grid)
            else:
                rep = lemma_verify.check_volbou(d, s_grid)
            hard_fail |= not rep.passed
            wr.writerow(["volbou", d, "", f"[0.5,{args.s_max}]",
                         repr(rep.value), "", "",
                         "pass" if rep.passed else "fail"])
            for r in (4.0, 5.0):
                for s in (0.5, 1.0, 2.0):
                    spec = lemma_verify.BallPairSpec(d=d, r=r, s=s)
                    if r - s / 2.0 < 2.0 or s > r:
                        wr.writerow(["difference", d, r, s, "", "", "",
                                     "skipped"])
                        continue
                    rep = lemma_verify.check_difference_bounds(spec)
                    a1, a2 = lemma_verify.difference_constants(d)
                    lo = a1 * s * np.exp((d - 1) * (r - s / 2.0))
                    hi = a2 * s * np.exp((d - 1) * r)
                    hard_fail |= not rep.passed
                    wr.writerow(["difference", d, r, s, repr(rep.value),
                                 repr(float(lo)), repr(float(hi)),
                                 "pass" if rep.passed else "fail"])
    outputs = [path]
    outputs.append(_write_manifest(args.out_dir, "lemma-check",
                                   {"d_range": args.d_range,
                                    "r_max": args.r_max, "s_max": args.s_max},
                                   outputs, t0))
    return 1 if hard_fail else 0


def build_parser():
    p = argparse.ArgumentParser(prog="hypnn", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("volume", help="ball volume / inverse / threshold")
    pv.add_argument("--d", type=int, required=True)
    pv.add_argument("--r", type=float, default=None)
    pv.add_argument("--V", type=float, default=None)
    pv.add_argument("--k", type=int, default=1)
    pv.add_argument("--R", type=float, default=None)
    pv.add_argument("--threshold", choices=("standard", "logvolume"),
                    default="standard",
                    help="threshold variant printed when --R is given")
    pv.set_defaults(func=cmd_volume)

    ps = sub.add_parser("simulate", help="run replications, write records")
    _add_experiment_flags(ps)
    ps.set_defaults(func=cmd_simulate)

    pi = sub.add_parser("intensity", help="empirical vs exact mean counts")
    _add_experiment_flags(pi)
    pi.add_argument("--u-grid", type=str, default="0,1,2")
    pi.add_argument("--confidence", type=float, default=0.999)
    pi.set_defaults(func=cmd_intensity)

    pg = sub.add_parser("gumbel", help="max-height CDF vs the Gumbel limit")
    _add_experiment_flags(pg, reps_default=1000)
    pg.add_argument("--levels", type=str,
                    default=",".join(str(x) for x in np.round(
                        np.linspace(-2.0, 6.0, 33), 3)))
    pg.add_argument("--ks-threshold", type=float, default=0.08)
    # maxima below the record threshold are only known as "<= c", which
    # distorts the empirical CDF unless c sits far below the Gumbel bulk
    pg.set_defaults(func=cmd_gumbel, c=-4.0)

    pl = sub.add_parser("lemma-check", help="volume bound verification")
    pl.add_argument("--d-range", type=str, default="2,3,4,5,6,7,8")
    pl.add_argument("--r-max", type=float, default=20.0)
    pl.add_argument("--r-step", type=float, default=0.25)
    pl.add_argument("--s-max", type=float, default=15.0)
    pl.add_argument("--s-step", type=float, default=0.25)
    pl.add_argument("--out-dir", type=Path, default=Path("."))
    pl.set_defaults(func=cmd_lemma_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = 2
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        code = 1
    return code


if __name__ == "__main__":
    sys.exit(main())
