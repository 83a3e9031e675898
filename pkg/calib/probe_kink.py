import numpy as np, time
from spincoh import dmrg, measures, models

def run(theta_over_pi, its, auto):
    cfg = dmrg.DmrgConfig(m=100, min_iterations=its, max_iterations=its,
                          energy_convergence_tol=1e-8, consecutive_hits=3, seed=0,
                          auto_m=auto, auto_m_max=200, auto_m_trunc_tol=1e-6)
    res = dmrg.dmrg_ground_state(models.ModelSpec(kind='blbq', theta=theta_over_pi*np.pi), cfg)
    mi = measures.mutual_information(res.rho_two_site)
    return mi, res.truncation_errors[-1]

for label, its, auto in (("N=262 m100", 130, False),
                         ("N=262 auto", 130, True),
                         ("N=402 auto", 200, True)):
    t0 = time.time()
    vals = {}
    for th in (1.74, 1.75, 1.76, 1.77, 1.78, 1.79, 1.80, 1.81):
        vals[th], te = run(th, its, auto)
    mis = [vals[t] for t in sorted(vals)]
    sec = [abs(mis[i+1]-2*mis[i]+mis[i-1]) for i in range(1,7)]
    print(f"{label}: t={time.time()-t0:.0f}s trunc_last={te:.1e}")
    print("  MI:", " ".join("%.5f" % v for v in mis))
    print("  sec(1.75..1.80):", " ".join("%.5f" % v for v in sec), flush=True)
