import time
from spincoh import sweep as sw

windows = [(0.45, 0.55), (1.20, 1.30), (1.70, 1.80)]
t0 = time.time()
for start, stop in windows:
    cfg = sw.SweepConfig(kind="blbq", start=start, stop=stop, step=0.01,
                         backend="ed", ed_sites=12,
                         measures=("mutual_info", "discord"),
                         discord_restarts=50,
                         out_path=f"/root/pkg/calib/blbq_ed_{start:.2f}.csv",
                         workers=2, seed=0)
    tw = time.time()
    recs = sw.run_sweep(cfg)
    print(f"ED window [{start},{stop}]: {len(recs)} pts in {time.time()-tw:.0f}s", flush=True)
print(f"TOTAL {time.time()-t0:.0f}s")
