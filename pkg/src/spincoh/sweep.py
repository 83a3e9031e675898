"""Parameter sweeps with feature detection.

A sweep runs the chosen backend (DMRG or 12-ish-site exact diagonalization)
over a parameter grid, evaluates the requested measures on the central
two-site and one-site reduced states, writes records to CSV (incrementally,
so partial sweeps are recoverable) and optionally to an SVG plot.  The
feature detector flags local extrema, inflections, jumps, kinks, curve
crossings, zero touches and sudden changes of the optimizing measurement
basis, which is how transition and symmetry points are located.

Grid values for the bilinear-biquadratic model are in units of pi
throughout (configuration, CSV and reports).

Measure tokens: ``mutual_info``, ``discord`` (also records the classical
correlation and the optimal-basis fingerprint), ``c_re``, ``c_l1``,
``skew:<sx|sy|sz>:<local|a|b>`` (two-site skew information of the embedded
single-site observable; ``local`` means acting on the second site) and
``skew1:<sx|sy|sz>`` (single-site skew information).
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dmrg import DmrgConfig, dmrg_ground_state
from .measures import (DiscordConfig, l1_coherence, local_observable,
                       mutual_information, quantum_discord,
                       rel_entropy_coherence, skew_information,
                       spin_observable)
from .models import ModelSpec
from .oracle import ed_point

FINGERPRINT_COLUMNS = [f"basis_t{i}{j}" for i in range(3) for j in range(3)]


@dataclass(frozen=True)
class SweepConfig:
    kind: str
    start: float
    stop: float
    step: float
    backend: str = "dmrg"
    measures: tuple = ("mutual_info", "discord")
    dmrg: DmrgConfig = field(default_factory=DmrgConfig)
    ed_sites: int = 12
    discord_restarts: int = 50
    discord_polish_max_iter: int = 1200
    out_path: str | None = None
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("xxz", "blbq"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.backend not in ("dmrg", "ed"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.step <= 0 or self.stop <= self.start:
            raise ValueError("need step > 0 and stop > start")

    @property
    def parameter_name(self) -> str:
        return "delta" if self.kind == "xxz" else "theta_over_pi"

    def grid(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@dataclass
class SweepRecord:
    parameter: float
    values: dict
    energy_per_site: float
    trunc_error: float
    converged: bool
    iterations: int
    fingerprint: np.ndarray | None = None
    wall_time: float = 0.0

    def row(self, measure_columns, with_fingerprint: bool) -> list:
        row = [self.parameter, self.energy_per_site, self.trunc_error,
               int(self.converged), self.iterations]
        row += [self.values.get(c, float("nan")) for c in measure_columns]
        if with_fingerprint:
            fp = (self.fingerprint if self.fingerprint is not None
                  else np.full((3, 3), np.nan))
            row += list(np.asarray(fp).ravel())
        return row


def measure_columns(tokens) -> list[str]:
    cols = []
    for tok in tokens:
        if tok == "discord":
            cols += ["discord", "classical_corr"]
        else:
            cols.append(tok.replace(":", "_"))
    return cols


def _model_at(kind: str, value: float) -> ModelSpec:
    if kind == "xxz":
        return ModelSpec(kind="xxz", delta=float(value))
    return ModelSpec(kind="blbq", theta=float(value) * np.pi)


def evaluate_measures(tokens, rho2, rho1, discord_cfg: DiscordConfig):
    """All requested measures on the two-site and one-site states."""
    values: dict[str, float] = {}
    fingerprint = None
    for tok in tokens:
        if tok == "mutual_info":
            values["mutual_info"] = mutual_information(rho2)
        elif tok == "discord":
            res = quantum_discord(rho2, (3, 3), discord_cfg)
            values["discord"] = res.discord
            values["classical_corr"] = res.classical_correlation
            fingerprint = res.optimal_basis.fingerprint()
        elif tok == "c_re":
            values["c_re"] = rel_entropy_coherence(rho2)
        elif tok == "c_l1":
            values["c_l1"] = l1_coherence(rho2)
        elif tok.startswith("skew1:"):
            name = tok.split(":")[1]
            values[f"skew1_{name}"] = skew_information(rho1, spin_observable(name))
        elif tok.startswith("skew:"):
            _, name, side = tok.split(":")
            sel = {"local": "B", "b": "B", "a": "A"}[side.lower()]
            obs = local_observable(spin_observable(name), side=sel)
            values[f"skew_{name}_{side}"] = skew_information(rho2, obs)
        else:
            raise ValueError(f"unknown measure token {tok!r}")
    return values, fingerprint


def _point_seeds(root_seed: int, index: int):
    ss = np.random.SeedSequence([root_seed, index])
    backend_seed, discord_seed = [int(c.generate_state(1)[0]) for c in ss.spawn(2)]
    return backend_seed, discord_seed


def run_point(cfg: SweepConfig, index: int, value: float) -> SweepRecord:
    t0 = time.perf_counter()
    spec = _model_at(cfg.kind, value)
    backend_seed, discord_seed = _point_seeds(cfg.seed, index)
    discord_cfg = DiscordConfig(restarts=cfg.discord_restarts,
                                polish_max_iter=cfg.discord_polish_max_iter,
                                seed=discord_seed)
    try:
        if cfg.backend == "dmrg":
            res = dmrg_ground_state(spec, replace(cfg.dmrg, seed=backend_seed))
            rho2, rho1 = res.rho_two_site, res.rho_one_site
            energy, trunc = res.energy_per_site, res.truncation_errors[-1]
            converged, iters = res.converged, res.iterations_used
        else:
            ed, rho2, rho1 = ed_point(spec, cfg.ed_sites, 0.0, seed=backend_seed)
            energy = ed.energy / cfg.ed_sites
            trunc, converged, iters = 0.0, True, 1
        values, fingerprint = evaluate_measures(cfg.measures, rho2, rho1,
                                                discord_cfg)
    except (RuntimeError, ValueError):
        values = {c: float("nan") for c in measure_columns(cfg.measures)}
        energy, trunc, converged, iters, fingerprint = (float("nan"), float("nan"),
                                                        False, 0, None)
    return SweepRecord(parameter=float(value), values=values,
                       energy_per_site=float(energy), trunc_error=float(trunc),
                       converged=converged, iterations=iters,
                       fingerprint=fingerprint,
                       wall_time=time.perf_counter() - t0)


def _point_task(args):
    cfg, index, value = args
    return index, run_point(cfg, index, value)


def _worker_init():
    # One BLAS thread per worker: the pool already saturates the cores, and
    # oversubscribed BLAS pools slow the whole sweep down.
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=1)
    except Exception:
        pass


def run_sweep(cfg: SweepConfig, progress=None) -> list[SweepRecord]:
    """Run every grid point, optionally in parallel worker processes.

    Records come back sorted by parameter.  Per-point seeds derive from the
    root seed and the grid index, so values do not depend on the worker
    count.  With an output path the CSV grows row by row in grid order as
    points complete.
    """
    grid = cfg.grid()
    tasks = [(cfg, i, v) for i, v in enumerate(grid)]
    records: list[SweepRecord | None] = [None] * len(grid)

    writer = _IncrementalCsv(cfg) if cfg.out_path else None
    try:
        if cfg.workers <= 1:
            for t in tasks:
                i, rec = _point_task(t)
                records[i] = rec
                if writer:
                    writer.feed(i, rec)
                if progress:
                    progress(rec)
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers,
                                     initializer=_worker_init) as pool:
                for i, rec in pool.map(_point_task, tasks):
                    records[i] = rec
                    if writer:
                        writer.feed(i, rec)
                    if progress:
                        progress(rec)
    finally:
        if writer:
            writer.close()
    return list(records)


# --- CSV -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.12g}"


def csv_header(cfg: SweepConfig) -> list[str]:
    cols = [cfg.parameter_name, "energy_per_site", "trunc_error",
            "converged", "iterations"]
    cols += measure_columns(cfg.measures)
    if "discord" in cfg.measures:
        cols += FINGERPRINT_COLUMNS
    return cols


class _IncrementalCsv:
    """Writes completed rows in grid order; a partial file is a clean prefix."""

    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.mcols = measure_columns(cfg.measures)
        self.with_fp = "discord" in cfg.measures
        self.pending: dict[int, SweepRecord] = {}
        self.next_index = 0
        self.fh = open(cfg.out_path, "w", newline="")
        self.fh.write(",".join(csv_header(cfg)) + "\n")
        self.fh.flush()

    def feed(self, index: int, rec: SweepRecord) -> None:
        self.pending[index] = rec
        while self.next_index in self.pending:
            rec = self.pending.pop(self.next_index)
            row = rec.row(self.mcols, self.with_fp)
            self.fh.write(",".join(_fmt(x) for x in row) + "\n")
            self.fh.flush()
            self.next_index += 1

    def close(self) -> None:
        self.fh.close()


def emit_csv(records: list[SweepRecord], cfg: SweepConfig, path: str) -> None:
    """Write a full record list at once (same format as the incremental writer)."""
    if not records:
        raise ValueError("no records to write")
    cfg = replace(cfg, out_path=path)
    writer = _IncrementalCsv(cfg)
    try:
        for i, rec in enumerate(sorted(records, key=lambda r: r.parameter)):
            writer.feed(i, rec)
    finally:
        writer.close()


def read_csv(path: str) -> dict:
    """Read an emitted CSV back into column arrays keyed by header name."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"empty CSV {path!r}")
    header = rows[0]
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


# --- feature detection ------------------------------------------------------

FEATURE_KINDS = ("local_min", "local_max", "inflection", "jump", "kink",
                 "crossing", "sudden_basis_change", "zero_touch",
                 "curvature_max")


@dataclass(frozen=True)
class Thresholds:
    """Detector thresholds.

    Ratio thresholds compare an increment against the median increment in a
    window around it; floors are relative to the series range, which keeps
    the detected feature set invariant under rescaling a series.
    """
    jump_factor: float = 10.0
    jump_floor: float = 0.02
    kink_factor: float = 8.0
    kink_floor: float = 0.005
    zero_threshold: float = 1e-3
    basis_threshold: float = 0.25
    min_prominence: float = 1e-9
    window: int = 11


@dataclass(frozen=True)
class Feature:
    kind: str
    location: float
    series: str
    strength: float


@dataclass
class FeatureReport:
    series: list
    thresholds: Thresholds
    features: list

    def of_kind(self, kind: str, series: str | None = None) -> list[Feature]:
        return [f for f in self.features
                if f.kind == kind and (series is None or f.series == series)]

    def to_json(self) -> str:
        payload = {
            "series": list(self.series),
            "thresholds": {k: getattr(self.thresholds, k)
                           for k in ("jump_factor", "jump_floor", "kink_factor",
                                     "kink_floor", "zero_threshold",
                                     "basis_threshold", "min_prominence",
                                     "window")},
            "features": [{"kind": f.kind, "location": f.location,
                          "series": f.series, "strength": f.strength}
                         for f in self.features],
        }
        return json.dumps(payload, indent=2)


def _local_median(absvals: np.ndarray, i: int, window: int) -> float:
    half = window // 2
    lo = max(0, i - half)
    hi = min(len(absvals), i + half + 1)
    return float(np.median(absvals[lo:hi]))


def _series_features(x: np.ndarray, y: np.ndarray, name: str,
                     th: Thresholds) -> list[Feature]:
    feats: list[Feature] = []
    n = len(y)
    rng = float(np.max(y) - np.min(y))
    scale = rng if rng > 0 else 1.0

    # Local extrema (strict neighbors, small prominence filter).
    for i in range(1, n - 1):
        left, right = y[i] - y[i - 1], y[i] - y[i + 1]
        prom = min(abs(left), abs(right))
        if prom < th.min_prominence * scale:
            continue
        if left > 0 and right > 0:
            feats.append(Feature("local_max", float(x[i]), name, prom / scale))
        elif left < 0 and right < 0:
            feats.append(Feature("local_min", float(x[i]), name, prom / scale))

    # Inflections: extrema of the centered first difference.
    d = np.empty(n - 2)
    for i in range(1, n - 1):
        d[i - 1] = (y[i + 1] - y[i - 1]) / 2.0
    for j in range(1, len(d) - 1):
        left, right = d[j] - d[j - 1], d[j] - d[j + 1]
        prom = min(abs(left), abs(right))
        if prom < th.min_prominence * scale:
            continue
        if (left > 0 and right > 0) or (left < 0 and right < 0):
            feats.append(Feature("inflection", float(x[j + 1]), name,
                                 prom / scale))

    # Jumps: forward increment large against its neighborhood and the range.
    inc = np.abs(np.diff(y))
    for i in range(len(inc)):
        med = _local_median(inc, i, th.window)
        if inc[i] > th.jump_factor * med and inc[i] > th.jump_floor * scale:
            feats.append(Feature("jump", float(0.5 * (x[i] + x[i + 1])), name,
                                 inc[i] / scale))

    # Kinks and curvature peaks from the second central difference.
    if n >= 5:
        sec = np.abs(y[2:] - 2.0 * y[1:-1] + y[:-2])
        for j in range(len(sec)):
            med = _local_median(sec, j, th.window)
            if sec[j] > th.kink_factor * med and sec[j] > th.kink_floor * scale:
                feats.append(Feature("kink", float(x[j + 1]), name,
                                     sec[j] / scale))
        for j in range(1, len(sec) - 1):
            if sec[j] > sec[j - 1] and sec[j] > sec[j + 1]:
                feats.append(Feature("curvature_max", float(x[j + 1]), name,
                                     sec[j] / scale))

    # Zero touches: a local minimum below the absolute zero threshold.
    for i in range(1, n - 1):
        if (y[i] < th.zero_threshold and y[i - 1] > y[i] and y[i + 1] > y[i]):
            feats.append(Feature("zero_touch", float(x[i]), name,
                                 float(th.zero_threshold - y[i])))
    return feats


def _crossing_features(x, ya, yb, name_a, name_b) -> list[Feature]:
    feats = []
    diff = ya - yb
    for i in range(len(diff) - 1):
        if diff[i] == 0.0 and (i == 0 or diff[i - 1] != 0.0):
            feats.append(Feature("crossing", float(x[i]),
                                 f"{name_a}-{name_b}", 0.0))
        elif diff[i] * diff[i + 1] < 0:
            frac = diff[i] / (diff[i] - diff[i + 1])
            loc = x[i] + frac * (x[i + 1] - x[i])
            feats.append(Feature("crossing", float(loc),
                                 f"{name_a}-{name_b}",
                                 float(abs(diff[i]) + abs(diff[i + 1]))))
    return feats


def _basis_change_features(x, fps, th: Thresholds) -> list[Feature]:
    from .measures import basis_distance
    feats = []
    for i in range(len(fps) - 1):
        if fps[i] is None or fps[i + 1] is None:
            continue
        dist = basis_distance(np.asarray(fps[i]), np.asarray(fps[i + 1]))
        if dist > th.basis_threshold:
            feats.append(Feature("sudden_basis_change",
                                 float(0.5 * (x[i] + x[i + 1])),
                                 "discord", float(dist)))
    return feats


def detect_features(records: list[SweepRecord], series,
                    thresholds: Thresholds | None = None) -> FeatureReport:
    """Scan one or more measure series of a sweep for its characteristic
    features.  ``series`` is a column name or a list of them; listing
    several also reports their pairwise curve crossings.  Requires at
    least five records."""
    if len(records) < 5:
        raise ValueError("need at least 5 records for feature detection")
    th = thresholds or Thresholds()
    names = [series] if isinstance(series, str) else list(series)
    recs = sorted(records, key=lambda r: r.parameter)
    x = np.array([r.parameter for r in recs])

    feats: list[Feature] = []
    arrays = {}
    for name in names:
        y = np.array([r.values.get(name, np.nan) for r in recs])
        if np.any(np.isnan(y)):
            good = ~np.isnan(y)
            feats_name = _series_features(x[good], y[good], name, th)
        else:
            feats_name = _series_features(x, y, name, th)
        arrays[name] = y
        feats += feats_name
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            feats += _crossing_features(x, arrays[names[i]], arrays[names[j]],
                                        names[i], names[j])
    if "discord" in names:
        fps = [r.fingerprint for r in recs]
        feats += _basis_change_features(x, fps, th)
    feats.sort(key=lambda f: (f.location, f.kind, f.series))
    return FeatureReport(series=names, thresholds=th, features=feats)


def report_from_table(table: dict, series, parameter_name: str,
                      thresholds: Thresholds | None = None) -> FeatureReport:
    """Feature detection on CSV column arrays (see :func:`read_csv`)."""
    params = table[parameter_name]
    records = []
    for i in range(len(params)):
        values = {k: float(v[i]) for k, v in table.items()}
        fp = None
        if all(c in table for c in FINGERPRINT_COLUMNS):
            fp = np.array([table[c][i] for c in FINGERPRINT_COLUMNS]).reshape(3, 3)
            if np.any(np.isnan(fp)):
                fp = None
        records.append(SweepRecord(parameter=float(params[i]), values=values,
                                   energy_per_site=0.0, trunc_error=0.0,
                                   converged=True, iterations=0,
                                   fingerprint=fp))
    return detect_features(records, series, thresholds)


# --- SVG plot ---------------------------------------------------------------

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f"]


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if mag * mult >= raw:
            step = mag * mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * abs(hi):
        ticks.append(round(t, 12))
        t += step
    return ticks


def emit_plot(records: list[SweepRecord], series, path: str,
              markers=None, parameter_name: str = "parameter",
              width: int = 760, height: int = 480) -> None:
    """Standalone SVG with the selected series against the sweep parameter,
    optional vertical reference markers, and a legend."""
    if not records:
        raise ValueError("no records to plot")
    names = [series] if isinstance(series, str) else list(series)
    recs = sorted(records, key=lambda r: r.parameter)
    x = np.array([r.parameter for r in recs])
    ys = {n: np.array([r.values.get(n, np.nan) for r in recs]) for n in names}

    margin_l, margin_r, margin_t, margin_b = 64, 16, 16, 44
    pw = width - margin_l - margin_r
    ph = height - margin_t - margin_b
    x_lo, x_hi = float(np.min(x)), float(np.max(x))
    finite = np.concatenate([y[np.isfinite(y)] for y in ys.values()]) if ys else np.array([0.0])
    y_lo, y_hi = float(np.min(finite)), float(np.max(finite))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def sx(v):
        return margin_l + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return margin_t + (y_hi - v) / (y_hi - y_lo) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    # axes
    parts.append(f'<line x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
                 f'y2="{margin_t + ph}" stroke="black"/>')
    parts.append(f'<line x1="{margin_l}" y1="{margin_t + ph}" '
                 f'x2="{margin_l + pw}" y2="{margin_t + ph}" stroke="black"/>')
    for t in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(t):.2f}" y1="{margin_t + ph}" '
                     f'x2="{sx(t):.2f}" y2="{margin_t + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(t):.2f}" y="{margin_t + ph + 18}" '
                     f'font-size="11" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{margin_l - 5}" y1="{sy(t):.2f}" '
                     f'x2="{margin_l}" y2="{sy(t):.2f}" stroke="black"/>')
        parts.append(f'<text x="{margin_l - 8}" y="{sy(t):.2f}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{t:.4g}</text>')
    parts.append(f'<text x="{margin_l + pw / 2:.2f}" y="{height - 8}" '
                 f'font-size="12" text-anchor="middle">{parameter_name}</text>')

    for mk in (markers or []):
        parts.append(f'<line x1="{sx(mk):.2f}" y1="{margin_t}" x2="{sx(mk):.2f}" '
                     f'y2="{margin_t + ph}" stroke="#999999" '
                     f'stroke-dasharray="4,3"/>')

    for idx, name in enumerate(names):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = [f"{sx(xx):.2f},{sy(yy):.2f}" for xx, yy in zip(x, ys[name])
               if np.isfinite(yy)]
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        ly = margin_t + 14 + 16 * idx
        lx = margin_l + pw - 150
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}" font-size="11">{name}</text>')

    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
