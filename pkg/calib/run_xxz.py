"""Calibration: full XXZ sweep at acceptance settings."""
import time
import numpy as np
from spincoh import sweep as sw
from spincoh.dmrg import DmrgConfig

cfg = sw.SweepConfig(
    kind="xxz", start=-0.3, stop=1.5, step=0.025, backend="dmrg",
    measures=("mutual_info", "discord", "c_re", "c_l1",
              "skew:sx:local", "skew:sz:local", "skew1:sx"),
    dmrg=DmrgConfig(m=100, min_iterations=150, max_iterations=175,
                    energy_convergence_tol=1e-8, consecutive_hits=3),
    discord_restarts=50,
    out_path="/root/pkg/calib/xxz.csv",
    workers=2, seed=0)

t0 = time.time()
def progress(rec):
    print(f"delta={rec.parameter:+.3f} e={rec.energy_per_site:.8f} "
          f"D={rec.values.get('discord', float('nan')):.5f} "
          f"conv={int(rec.converged)} {rec.wall_time:.0f}s", flush=True)
recs = sw.run_sweep(cfg, progress=progress)
print(f"TOTAL {time.time()-t0:.0f}s for {len(recs)} points")
