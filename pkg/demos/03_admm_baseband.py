"""Baseband step: least squares on a sphere, solved by scaled ADMM.

Because the RF matrix has orthonormal columns the problem has a closed-form
optimum, which serves as an oracle. The penalty rho matters: with rho = 1 the
iteration may have no stable fixed point, while rho > 2 always converges.
"""

import numpy as np

from dpa_hybrid.admm import admm_solve, build_real_system, sphere_ls_oracle
from dpa_hybrid.rf import RfPhases
from dpa_hybrid.rng import complex_normal, substream

rng = substream(3)
phases = RfPhases(rng.uniform(0, 2 * np.pi, (4, 8)))
F_opt = complex_normal(rng, (32, 2))
F_opt *= np.sqrt(2.0) / np.linalg.norm(F_opt)
system = build_real_system(phases, F_opt, power=2.0)
oracle = sphere_ls_oracle(system)
print(f"oracle objective {oracle.objective:.6f}")

# r = ||A^H b|| / sqrt(c) decides stability at rho = 1 (needs r > 0.6).
r = np.linalg.norm(system.rhs()) / np.sqrt(system.c)
print(f"alignment ratio r = {r:.3f}")

cold = np.zeros(system.dim)
cold[0] = np.sqrt(system.c)
for rho in (1.0, 2.5, 3.0, 5.0):
    rep = admm_solve(system, rho=rho, y0=cold)
    gap = rep.objective - oracle.objective
    print(f"rho={rho}: converged={rep.converged} after {rep.iterations} iterations, objective gap {gap:.2e}")

# The default start is the oracle direction, so even a capped run returns the optimum.
rep = admm_solve(system)
print(f"default start, rho=1: converged={rep.converged}, objective gap {rep.objective - oracle.objective:.2e}")
