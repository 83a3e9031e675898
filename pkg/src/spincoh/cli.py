"""Command line interface: ``spincoh sweep`` and ``spincoh detect``."""

from __future__ import annotations

import argparse
import sys

from .dmrg import DmrgConfig
from .sweep import (SweepConfig, Thresholds, emit_plot, read_csv,
                    report_from_table, run_sweep)


def parse_range(text: str):
    """``start:stop:step`` triple of floats."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    return start, stop, step


def load_config_file(path: str) -> dict:
    """Flat key=value file with the same keys as the command line flags."""
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincoh",
        description="Spin-1 chain ground-state sweeps: correlations, "
                    "coherence, and transition-point detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    sw.add_argument("--config", help="key=value file; flags override it")
    sw.add_argument("--model", choices=["xxz", "blbq"])
    sw.add_argument("--delta", type=parse_range,
                    help="anisotropy grid start:stop:step (xxz)")
    sw.add_argument("--theta", type=parse_range,
                    help="coupling-angle grid in units of pi (blbq)")
    sw.add_argument("--backend", choices=["dmrg", "ed"], default=None)
    sw.add_argument("--m", type=int, default=None, help="DMRG kept states")
    sw.add_argument("--sites", type=int, default=None, help="ED chain length")
    sw.add_argument("--max-iterations", type=int, default=None)
    sw.add_argument("--measures", default=None,
                    help="comma list, e.g. discord,mutual_info,c_re,"
                         "c_l1,skew:sx:local,skew1:sx")
    sw.add_argument("--restarts", type=int, default=None,
                    help="discord optimizer restarts")
    sw.add_argument("--out", default=None, help="CSV output path")
    sw.add_argument("--plot", default=None, help="SVG output path")
    sw.add_argument("--markers", default=None,
                    help="comma list of vertical marker positions")
    sw.add_argument("--workers", type=int, default=None)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--quiet", action="store_true")

    det = sub.add_parser("detect", help="detect features in a sweep CSV")
    det.add_argument("--in", dest="infile", required=True)
    det.add_argument("--series", required=True,
                     help="comma list of CSV columns to scan")
    det.add_argument("--report", default=None,
                     help="write the JSON feature report here (default stdout)")
    det.add_argument("--jump-factor", type=float, default=None)
    det.add_argument("--jump-floor", type=float, default=None)
    det.add_argument("--kink-factor", type=float, default=None)
    det.add_argument("--kink-floor", type=float, default=None)
    det.add_argument("--zero-threshold", type=float, default=None)
    det.add_argument("--basis-threshold", type=float, default=None)
    return parser


def _merged_sweep_options(args) -> dict:
    opts = {}
    if args.config:
        opts.update(load_config_file(args.config))
    for key in ("model", "backend", "measures", "out", "plot", "markers"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    for key in ("m", "sites", "workers", "seed", "restarts", "max_iterations"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = str(val)
    if args.delta is not None:
        opts["delta"] = "%g:%g:%g" % args.delta
    if args.theta is not None:
        opts["theta"] = "%g:%g:%g" % args.theta
    return opts


def sweep_command(args) -> int:
    opts = _merged_sweep_options(args)
    model = opts.get("model")
    if model not in ("xxz", "blbq"):
        print("error: --model xxz|blbq is required", file=sys.stderr)
        return 2
    grid_key = "delta" if model == "xxz" else "theta"
    if grid_key not in opts:
        print(f"error: --{grid_key} start:stop:step is required for {model}",
              file=sys.stderr)
        return 2
    start, stop, step = (parse_range(opts[grid_key])
                         if isinstance(opts[grid_key], str) else opts[grid_key])

    dmrg_kwargs = {}
    if "m" in opts:
        dmrg_kwargs["m"] = int(opts["m"])
    if "max_iterations" in opts:
        dmrg_kwargs["max_iterations"] = int(opts["max_iterations"])
    measures = tuple(opts.get("measures", "mutual_info,discord").split(","))
    cfg = SweepConfig(
        kind=model, start=start, stop=stop, step=step,
        backend=opts.get("backend", "dmrg"),
        measures=measures,
        dmrg=DmrgConfig(**dmrg_kwargs),
        ed_sites=int(opts.get("sites", 12)),
        discord_restarts=int(opts.get("restarts", 50)),
        out_path=opts.get("out"),
        workers=int(opts.get("workers", 1)),
        seed=int(opts.get("seed", 0)),
    )

    def progress(rec):
        if not args.quiet:
            flag = "" if rec.converged else "  [not converged]"
            print(f"{cfg.parameter_name}={rec.parameter:.6g}  "
                  f"e/site={rec.energy_per_site:.10g}  "
                  f"({rec.wall_time:.1f}s){flag}", flush=True)

    records = run_sweep(cfg, progress=progress)
    if opts.get("plot"):
        markers = ([float(v) for v in str(opts["markers"]).split(",")]
                   if opts.get("markers") else None)
        series = [c for c in ("mutual_info", "discord") if c in measures]
        if not series:
            from .sweep import measure_columns
            series = measure_columns(measures)[:2]
        emit_plot(records, series, opts["plot"], markers=markers,
                  parameter_name=cfg.parameter_name)
    if not args.quiet and cfg.out_path:
        print(f"wrote {cfg.out_path}")
    return 0


def detect_command(args) -> int:
    table = read_csv(args.infile)
    parameter_name = "delta" if "delta" in table else "theta_over_pi"
    kwargs = {}
    for key in ("jump_factor", "jump_floor", "kink_factor", "kink_floor",
                "zero_threshold", "basis_threshold"):
        val = getattr(args, key)
        if val is not None:
            kwargs[key] = val
    report = report_from_table(table, args.series.split(","),
                               parameter_name, Thresholds(**kwargs))
    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep":
        return sweep_command(args)
    return detect_command(args)


if __name__ == "__main__":
    raise SystemExit(main())
