import time
import numpy as np
from spincoh import sweep as sw
from spincoh.dmrg import DmrgConfig

BLBQ_DMRG = DmrgConfig(m=100, min_iterations=130, max_iterations=130,
                       energy_convergence_tol=1e-8, consecutive_hits=3)
windows = [(0.05, 0.35), (0.40, 0.60), (1.15, 1.35), (1.40, 1.60), (1.65, 1.95)]
t0 = time.time()
for start, stop in windows:
    cfg = sw.SweepConfig(kind="blbq", start=start, stop=stop, step=0.01,
                         backend="dmrg", measures=("mutual_info", "discord"),
                         dmrg=BLBQ_DMRG, discord_restarts=50,
                         out_path=f"/root/pkg/calib/blbq_{start:.2f}.csv",
                         workers=2, seed=0)
    tw = time.time()
    recs = sw.run_sweep(cfg)
    print(f"window [{start},{stop}]: {len(recs)} pts in {time.time()-tw:.0f}s", flush=True)
print(f"TOTAL {time.time()-t0:.0f}s")
