"""End-to-end acceptance suite.

Each test prints one `[PASS] criterion N` line (visible with ``pytest -s``)
after all of its sub-checks assert.  The parameter sweeps are computed once
per session and reused across criteria.  Budget on two cores: the whole
module is a few hours, dominated by the two DMRG sweeps.
"""

import time
from itertools import product

import numpy as np
import pytest

from spincoh import cue, dmrg, linalg, measures, oracle
from spincoh import sweep as sw
from spincoh.models import ModelSpec

pytestmark = pytest.mark.acceptance

MEASURES_ALL = ("mutual_info", "discord", "c_re", "c_l1",
                "skew:sx:local", "skew:sz:local", "skew1:sx")


def ok(line: str) -> None:
    print(f"\n[PASS] {line}", flush=True)


def grid_step_of(records) -> float:
    xs = [r.parameter for r in records]
    return float(np.median(np.diff(xs)))


# --- session sweeps ---------------------------------------------------------

# Every point runs the same number of growth steps (chain length 322 and
# 262 sites): a common length keeps the residual finite-size bias a smooth
# function of the sweep parameter, which is what feature detection needs.
XXZ_DMRG = dmrg.DmrgConfig(m=100, min_iterations=160, max_iterations=160,
                           energy_convergence_tol=1e-8, consecutive_hits=3)
BLBQ_DMRG = dmrg.DmrgConfig(m=100, min_iterations=130, max_iterations=130,
                            energy_convergence_tol=1e-8, consecutive_hits=3)


@pytest.fixture(scope="session")
def xxz_records():
    cfg = sw.SweepConfig(kind="xxz", start=-0.3, stop=1.5, step=0.025,
                         backend="dmrg", measures=MEASURES_ALL,
                         dmrg=XXZ_DMRG, discord_restarts=50,
                         workers=2, seed=0)
    t0 = time.time()
    records = sw.run_sweep(cfg)
    print(f"\n[sweep] XXZ DMRG {len(records)} points in {time.time() - t0:.0f}s")
    return records


BLBQ_WINDOWS = [(0.05, 0.35), (0.40, 0.60), (1.15, 1.35),
                (1.40, 1.60), (1.65, 1.95)]


@pytest.fixture(scope="session")
def blbq_dmrg_records():
    t0 = time.time()
    by_window = {}
    for start, stop in BLBQ_WINDOWS:
        cfg = sw.SweepConfig(kind="blbq", start=start, stop=stop, step=0.01,
                             backend="dmrg", measures=("mutual_info", "discord"),
                             dmrg=BLBQ_DMRG, discord_restarts=50,
                             workers=2, seed=0)
        by_window[(start, stop)] = sw.run_sweep(cfg)
    n = sum(len(v) for v in by_window.values())
    print(f"\n[sweep] BLBQ DMRG {n} points in {time.time() - t0:.0f}s")
    return by_window


ED_WINDOWS = [(0.45, 0.55), (1.15, 1.35), (1.70, 1.80)]


@pytest.fixture(scope="session")
def blbq_ed_records():
    t0 = time.time()
    by_window = {}
    for start, stop in ED_WINDOWS:
        cfg = sw.SweepConfig(kind="blbq", start=start, stop=stop, step=0.01,
                             backend="ed", ed_sites=12,
                             measures=("mutual_info", "discord"),
                             discord_restarts=50, workers=2, seed=0)
        by_window[(start, stop)] = sw.run_sweep(cfg)
    n = sum(len(v) for v in by_window.values())
    print(f"\n[sweep] BLBQ ED-12 {n} points in {time.time() - t0:.0f}s")
    return by_window


# --- criterion 1: DMRG vs ED at 12 sites ------------------------------------

CRITERION1_POINTS = ([ModelSpec(kind="xxz", delta=d)
                      for d in (0.5, 1.0, 1.185, 1.5)]
                     + [ModelSpec(kind="blbq", theta=t * np.pi)
                        for t in (0.0, 0.1024, 1.9)])


def test_criterion_1_dmrg_matches_ed_without_truncation():
    t0 = time.time()
    for spec in CRITERION1_POINTS:
        cfg = dmrg.DmrgConfig(m=243, max_iterations=5, seed=0,
                              lanczos_tol=1e-12,
                              energy_convergence_tol=1e-13)
        res = dmrg.dmrg_ground_state(spec, cfg)
        assert res.chain_length == 12
        assert all(e == 0.0 for e in res.truncation_errors)
        ed, rho2_ed, _ = oracle.ed_point(spec, 12, 0.0, lanczos_tol=1e-12)
        de = abs(res.energy_total - ed.energy)
        td = linalg.trace_distance(res.rho_two_site, rho2_ed)
        assert de < 1e-8, f"{spec.label()}: energy mismatch {de:.2e}"
        assert td < 1e-6, f"{spec.label()}: trace distance {td:.2e}"
    ok(f"criterion 1: DMRG(m=243) = ED at N=12, 7 points, energies to 1e-8, "
       f"rho2 trace distance < 1e-6 ({time.time() - t0:.0f}s)")


# --- criterion 2: optimizer vs brute force ----------------------------------

def test_criterion_2_optimizer_vs_brute_force():
    t0 = time.time()
    worst = 0.0
    rng = np.random.default_rng(2024)
    states = [linalg.random_density_matrix(9, rng) for _ in range(25)]
    dmrg_points = ([("xxz", d) for d in (0.3, 0.7, 1.0, 1.1, 1.3)]
                   + [("blbq", t) for t in (0.05, 0.3, 0.45, 1.45, 1.85)])
    for kind, val in dmrg_points:
        spec = (ModelSpec(kind="xxz", delta=val) if kind == "xxz"
                else ModelSpec(kind="blbq", theta=val * np.pi))
        cfg = dmrg.DmrgConfig(m=60, min_iterations=60, max_iterations=80,
                              energy_convergence_tol=1e-8, consecutive_hits=3,
                              seed=0)
        states.append(dmrg.dmrg_ground_state(spec, cfg).rho_two_site)
    for i, rho in enumerate(states):
        opt = measures.quantum_discord(
            rho, (3, 3), measures.DiscordConfig(restarts=50, seed=100 + i))
        bf = oracle.brute_force_discord(rho, samples=10000, polish_iters=400,
                                        seed=200 + i)
        diff = abs(opt.discord - bf)
        worst = max(worst, diff)
        assert diff <= 1e-3, f"state {i}: |D_opt - D_brute| = {diff:.2e}"
    ok(f"criterion 2: optimizer vs brute force on 35 states, "
       f"worst |dD| = {worst:.1e} <= 1e-3 ({time.time() - t0:.0f}s)")


# --- criterion 3: analytic identities ---------------------------------------

def test_criterion_3_analytic_identities():
    t0 = time.time()
    rng = np.random.default_rng(33)
    # pure states: discord equals the entanglement entropy
    for i in range(50):
        psi = linalg.random_pure_state(9, rng)
        rho = np.outer(psi, psi.conj())
        s_a = linalg.von_neumann_entropy(linalg.partial_trace(rho, (3, 3), "B"))
        res = measures.quantum_discord(
            rho, (3, 3), measures.DiscordConfig(restarts=12, seed=300 + i))
        assert abs(res.discord - s_a) <= 1e-3
        assert abs(res.discord + res.classical_correlation
                   - res.mutual_information) <= 1e-9
    # classical-quantum states: zero discord
    eye = np.eye(3)
    for i in range(10):
        probs = rng.dirichlet(np.ones(3))
        rho = sum(p * np.kron(linalg.random_density_matrix(3, rng),
                              np.outer(eye[k], eye[k]))
                  for k, p in enumerate(probs))
        res = measures.quantum_discord(
            rho, (3, 3), measures.DiscordConfig(restarts=16, seed=400 + i))
        assert res.discord <= 1e-6
        assert abs(res.discord + res.classical_correlation
                   - res.mutual_information) <= 1e-9
    # skew information: equals the variance on pure states, bounded by it
    # on mixed ones
    ops_k = [measures.spin_observable(n) for n in ("sx", "sy", "sz")]
    for i in range(100):
        k = ops_k[i % 3]
        psi = linalg.random_pure_state(3, rng)
        pure = np.outer(psi, psi.conj())
        assert abs(measures.skew_information(pure, k)
                   - measures.variance(pure, k)) <= 1e-10
        mixed = linalg.random_density_matrix(3, rng)
        si = measures.skew_information(mixed, k)
        assert -1e-12 <= si <= measures.variance(mixed, k) + 1e-10
    ok(f"criterion 3: pure-state discord = S(rho_A) (50 states), "
       f"classical-quantum discord = 0, I = C + D, skew-vs-variance "
       f"({time.time() - t0:.0f}s)")


# --- criterion 4: Naimark contract ------------------------------------------

def test_criterion_4_naimark_statistics():
    t0 = time.time()
    rng = np.random.default_rng(44)
    worst = 0.0
    for trial in range(100):
        outcomes = 3 + trial % 3
        parts = []
        for _ in range(outcomes):
            g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            parts.append(g @ g.conj().T)
        total = sum(parts)
        w, v = np.linalg.eigh(total)
        inv_root = (v / np.sqrt(w)) @ v.conj().T
        povm = cue.Povm(dim=3, elements=[inv_root @ p @ inv_root for p in parts])
        dil = cue.naimark_dilation(povm, completion_seed=trial)
        for _ in range(100):
            rho = linalg.random_density_matrix(3, rng)
            ext = dil.extended_state(rho)
            for p_el, q in zip(povm.elements, dil.projectors_q):
                diff = abs(np.trace(p_el @ rho).real - np.trace(q @ ext).real)
                worst = max(worst, diff)
                assert diff <= 1e-12
    ok(f"criterion 4: Naimark statistics on 100 POVMs x 100 states, "
       f"worst discrepancy {worst:.1e} <= 1e-12 ({time.time() - t0:.0f}s)")


# --- criterion 5: Haar statistics -------------------------------------------

def test_criterion_5_cue_haar_statistics():
    t0 = time.time()
    count = 10000
    for n, seed in ((3, 5), (9, 13)):
        rng = np.random.default_rng(seed)
        acc = np.zeros((n, n))
        acc2 = np.zeros((n, n))
        angles = np.empty((count, n))
        for i in range(count):
            u = cue.sample_cue(n, rng)
            p = np.abs(u) ** 2
            acc += p
            acc2 += p * p
            angles[i] = np.angle(np.linalg.eigvals(u))
        mean = acc / count
        se = np.sqrt((acc2 / count - mean ** 2) / count)
        dev = np.abs(mean - 1.0 / n) / se
        assert np.all(dev < 3.0), f"n={n}: worst deviation {dev.max():.2f} SE"
        pooled = np.sort(((angles.ravel() + 2 * np.pi) % (2 * np.pi)) / (2 * np.pi))
        m = pooled.size
        ks = np.max(np.abs(pooled - np.arange(1, m + 1) / m))
        crit = 1.628 / np.sqrt(m)  # 1% asymptotic critical value
        assert ks < crit, f"n={n}: KS {ks:.5f} >= {crit:.5f}"
    ok(f"criterion 5: Haar statistics at n=3 and n=9, 1e4 samples each: "
       f"|U_ij|^2 within 3 SE, eigenangle KS below the 1% level "
       f"({time.time() - t0:.0f}s)")


# --- criterion 6: XXZ feature reproduction ----------------------------------

def window(report_or_feats, kind, series, lo, hi):
    feats = (report_or_feats.of_kind(kind, series)
             if hasattr(report_or_feats, "of_kind") else report_or_feats)
    return [f for f in feats if lo <= f.location <= hi]


def test_criterion_6_xxz_features(xxz_records):
    records = xxz_records
    step = grid_step_of(records)
    assert abs(step - 0.025) < 1e-12
    series = ["mutual_info", "discord", "c_re", "c_l1",
              "skew_sx_local", "skew_sz_local", "skew1_sx"]
    rep = sw.detect_features(records, series)

    # (a) discord maximum and optimizing-basis change at the SU(2) point
    assert window(rep, "local_max", "discord", 1.0 - step, 1.0 + step), \
        "no discord maximum at 1.0"
    assert window(rep, "sudden_basis_change", "discord",
                  1.0 - step, 1.0 + step), "no basis change at 1.0"

    # (b) mutual-information minimum at the Ising transition
    assert window(rep, "local_min", "mutual_info", 1.185 - 0.05, 1.185 + 0.05)

    # (c) the two local skew-information curves cross at the SU(2) point
    crossings = [f for f in rep.of_kind("crossing")
                 if set(f.series.split("-")) == {"skew_sx_local",
                                                 "skew_sz_local"}]
    assert any(abs(f.location - 1.0) <= step for f in crossings), \
        f"crossings at {[round(f.location, 4) for f in crossings]}"

    # (d) single-site coherence vanishes only at the SU(2) point
    zt = rep.of_kind("zero_touch", "skew1_sx")
    assert any(abs(f.location - 1.0) <= step for f in zt)
    vals = {round(r.parameter, 6): r.values["skew1_sx"] for r in records}
    assert vals[0.5] > 1e-2 and vals[1.4] > 1e-2

    # (e) inflection inside the transition window for all four coherence
    #     series and the discord
    for name in ("c_re", "c_l1", "skew_sx_local", "skew_sz_local", "discord"):
        assert window(rep, "inflection", name, 1.13, 1.24), \
            f"no inflection for {name} in [1.13, 1.24]"

    # (f) nothing jumps or kinks near the infinite-order transition point
    for name in series:
        bad = (window(rep, "jump", name, -0.15, 0.15)
               + window(rep, "kink", name, -0.15, 0.15))
        assert not bad, f"spurious {name} feature near 0: {bad}"

    ok("criterion 6: XXZ features (discord max + basis change at 1.0, "
       "MI min at 1.185, skew crossing at 1.0, single-site zero touch, "
       "inflections in [1.13,1.24], nothing near 0)")


# --- criterion 7: BLBQ feature reproduction ----------------------------------

def test_criterion_7_blbq_features(blbq_dmrg_records, blbq_ed_records):
    step = 0.01

    # (a) first-order jumps on both backends
    for backend, table in (("dmrg", blbq_dmrg_records), ("ed", blbq_ed_records)):
        for center, key in ((0.50, (0.40, 0.60) if backend == "dmrg" else (0.45, 0.55)),
                            (1.25, (1.15, 1.35))):
            recs = table[key]
            rep = sw.detect_features(recs, ["mutual_info", "discord"])
            for name in ("mutual_info", "discord"):
                hits = window(rep, "jump", name, center - step, center + step)
                assert hits, f"{backend}: no {name} jump at {center}"

    # (b) MI minimum and discord basis change at the KT/SU(3) point
    recs = blbq_dmrg_records[(0.05, 0.35)]
    rep = sw.detect_features(recs, ["mutual_info", "discord"])
    assert window(rep, "local_min", "mutual_info", 0.25 - step, 0.25 + step)
    assert window(rep, "sudden_basis_change", "discord",
                  0.25 - step, 0.25 + step)

    # (c) bulk kink at 1.78 pi and curvature peak inside [1.73, 1.77] pi
    recs = blbq_dmrg_records[(1.65, 1.95)]
    rep = sw.detect_features(recs, ["mutual_info", "discord"])
    kinks = (window(rep, "kink", "mutual_info", 1.78 - step, 1.78 + step)
             + window(rep, "kink", "discord", 1.78 - step, 1.78 + step))
    assert kinks, "no bulk kink at 1.78 pi"
    cmax = (window(rep, "curvature_max", "mutual_info", 1.73, 1.77)
            + window(rep, "curvature_max", "discord", 1.73, 1.77))
    assert cmax, "no second-difference maximum in [1.73, 1.77] pi"

    # (d) the 12-site chain shows no kink around the second-order point
    recs = blbq_ed_records[(1.70, 1.80)]
    rep = sw.detect_features(recs, ["mutual_info", "discord"])
    assert not (window(rep, "kink", "mutual_info", 1.70, 1.80)
                + window(rep, "kink", "discord", 1.70, 1.80))

    # (e) extrema at the valence-bond point and the Bethe point
    recs = blbq_dmrg_records[(0.05, 0.35)]
    rep = sw.detect_features(recs, "mutual_info")
    extrema = (rep.of_kind("local_min", "mutual_info")
               + rep.of_kind("local_max", "mutual_info"))
    assert any(abs(f.location - 0.1024) <= 0.03 for f in extrema), \
        f"MI extrema at {[round(f.location, 3) for f in extrema]}"
    recs = blbq_dmrg_records[(1.40, 1.60)]
    rep = sw.detect_features(recs, "discord")
    extrema = (rep.of_kind("local_min", "discord")
               + rep.of_kind("local_max", "discord"))
    assert any(abs(f.location - 1.5) <= 0.02 for f in extrema), \
        f"discord extrema at {[round(f.location, 3) for f in extrema]}"

    ok("criterion 7: BLBQ features (jumps at 0.50/1.25 pi on both backends, "
       "MI min + basis change at 0.25 pi, bulk kink at 1.78 pi with "
       "curvature peak in [1.73,1.77] pi, no 12-site kink, extrema near "
       "0.1024 pi and 1.5 pi)")


# --- criterion 8: determinism and robustness ---------------------------------

def test_criterion_8_determinism(tmp_path):
    t0 = time.time()
    base = dict(kind="blbq", start=0.46, stop=0.54, step=0.01, backend="ed",
                ed_sites=6, measures=("mutual_info", "discord"),
                discord_restarts=8, seed=11)
    out1 = str(tmp_path / "a.csv")
    out2 = str(tmp_path / "b.csv")
    sw.run_sweep(sw.SweepConfig(out_path=out1, **base))
    sw.run_sweep(sw.SweepConfig(out_path=out2, **base))
    with open(out1, "rb") as f1, open(out2, "rb") as f2:
        assert f1.read() == f2.read(), "single-worker reruns differ"

    out3 = str(tmp_path / "c.csv")
    sw.run_sweep(sw.SweepConfig(out_path=out3, workers=2, **base))
    t1 = sw.read_csv(out1)
    t3 = sw.read_csv(out3)
    for col in t1:
        assert np.max(np.abs(t1[col] - t3[col])) < 1e-10, f"{col} differs"

    # no spurious jump/kink detections on smooth synthetic data
    x = np.linspace(0.0, 3.0, 101)
    for y in (np.sin(2.0 * x), np.exp(-x) * np.cos(3 * x), (x - 1.2) ** 3):
        recs = [sw.SweepRecord(parameter=float(xi), values={"y": float(yi)},
                               energy_per_site=0.0, trunc_error=0.0,
                               converged=True, iterations=1)
                for xi, yi in zip(x, y)]
        rep = sw.detect_features(recs, "y")
        assert not rep.of_kind("jump") and not rep.of_kind("kink")

    ok(f"criterion 8: byte-identical CSV, worker-count independence to "
       f"1e-10, zero false jumps/kinks on smooth fixtures "
       f"({time.time() - t0:.0f}s)")
