"""Command line: ``epifuzz simulate | compare | sweep``."""
import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import io
from .config import SWEEPABLE, ConfigError, load_config, override
from .engine import run
from .metrics import compare, summarize


class UsageError(Exception):
    pass


def parse_seeds(text):
    """``"1..20"``, ``"3,5,8"`` or a mix such as ``"1..3,10"``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(p) for p in part.split(".."))
                if hi < lo:
                    raise ValueError
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise UsageError(f"bad seed list element {part!r}") from None
    if not seeds:
        raise UsageError("empty seed list")
    return seeds


def parse_values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad value list {text!r}") from None
    if not vals:
        raise UsageError("empty value list")
    return vals


def _print_summary(summary, seed, stream=None):
    stream = stream or sys.stdout
    print(f"seed               {seed}", file=stream)
    print(f"attack_rate        {summary.attack_rate:.4f}", file=stream)
    print(f"cfr                {summary.cfr:.4f}", file=stream)
    print(f"peak_day           {summary.peak_day}", file=stream)
    print(f"peak_active        {summary.peak_active}", file=stream)
    print(f"peak_new           {summary.peak_new}", file=stream)
    print(f"icu_overflow_days  {summary.icu_overflow_days}", file=stream)


def cmd_simulate(config, seed=None, out=".", svg=False, workers=1):
    cfg, opts = load_config(config)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    series = run(cfg, workers=workers)
    summary = summarize(series)
    io.write_timeseries(out / "timeseries.csv", series)
    io.write_summary(out / "summary.csv", summary, cfg.seed)
    if svg or opts.svg:
        io.write_svg(out / "chart.svg", series, title=f"seed {cfg.seed}")
    _print_summary(summary, cfg.seed)
    return 0


def cmd_compare(sim, obs, truncate=None, out="comparison.csv"):
    sim_start, sim_counts = io.read_daily_series(sim)
    obs_start, obs_counts = io.read_daily_series(obs)
    start = max(sim_start, obs_start)
    sim_counts = sim_counts[start - sim_start:]
    obs_counts = obs_counts[start - obs_start:]
    if truncate is not None and truncate > start + min(len(sim_counts), len(obs_counts)):
        raise UsageError(f"--truncate {truncate} lies beyond the overlapping days")
    if not sim_counts or not obs_counts:
        raise UsageError("the two series share no days")
    report = compare(sim_counts, obs_counts, truncate_at=truncate, start_day=start)
    io.write_comparison(out, report)
    print(f"rmse             {report.rmse:.6g}")
    print(f"mae              {report.mae:.6g}")
    print(f"peak_day_offset  {report.peak_day_offset}")
    print(f"truncation_day   {'' if report.truncation_day is None else report.truncation_day}")
    print(f"days_compared    {report.n_days}")
    return 0


def _sweep_one(job):
    cfg, param, value, seed, path = job
    series = run(replace(override(cfg, param, value), seed=seed))
    io.write_timeseries(path, series)
    return summarize(series)


def cmd_sweep(config, param, values, seeds, out, workers=1):
    cfg, _ = load_config(config)
    if param not in SWEEPABLE:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEPABLE)}")
    for v in values:
        override(cfg, param, v)  # validate every value before running anything
    out = Path(out)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    jobs = [
        (cfg, param, v, s, out / "runs" / f"{param}={v!r}_seed={s}.csv")
        for v in values
        for s in seeds
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            summaries = list(ex.map(_sweep_one, jobs))
    else:
        summaries = [_sweep_one(j) for j in jobs]
    rows = [
        [param, v, s] + [getattr(sm, f) for f in io.SUMMARY_FIELDS]
        for (_, _, v, s, _), sm in zip(jobs, summaries)
    ]
    io.write_csv(out / "sweep_summary.csv", ("param", "value", "seed") + io.SUMMARY_FIELDS, rows)
    print(f"{len(rows)} runs written to {out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="epifuzz", description="Fuzzy agent-based epidemic simulator")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", default=".")
    s.add_argument("--svg", action="store_true", help="also write chart.svg")
    s.add_argument("--workers", type=int, default=1)

    c = sub.add_parser("compare", help="compare simulated and observed daily new cases")
    c.add_argument("--sim", required=True)
    c.add_argument("--obs", required=True)
    c.add_argument("--truncate", type=int, help="compare only days before this one")
    c.add_argument("--out", default="comparison.csv")

    w = sub.add_parser("sweep", help="run a parameter x seed grid")
    w.add_argument("--config", required=True)
    w.add_argument("--param", required=True)
    w.add_argument("--values", required=True)
    w.add_argument("--seeds", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            if args.seed is not None and not 0 <= args.seed < 2**64:
                raise UsageError("--seed must be an unsigned 64-bit integer")
            return cmd_simulate(args.config, args.seed, args.out, args.svg, args.workers)
        if args.command == "compare":
            return cmd_compare(args.sim, args.obs, args.truncate, args.out)
        return cmd_sweep(
            args.config, args.param, parse_values(args.values), parse_seeds(args.seeds), args.out, args.workers
        )
    except (ConfigError, io.SeriesParseError, UsageError) as exc:
        print(f"epifuzz {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"epifuzz {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
