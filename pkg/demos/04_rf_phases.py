"""Analog step: per-element phases in closed form, then B-bit quantization."""

import numpy as np

from dpa_hybrid.altmin import objective
from dpa_hybrid.rf import assemble_rf, optimal_phases, quantize, quantize_phase
from dpa_hybrid.rng import complex_normal, substream

print("quantize pi/3 with 1 bit ->", quantize_phase(np.pi / 3, 1))
print("quantize pi/3 with 2 bits ->", quantize_phase(np.pi / 3, 2))

rng = substream(4)
F_opt = complex_normal(rng, (16, 24, 2))
F_BB = complex_normal(rng, (16, 3, 2))
cont = optimal_phases(F_opt, F_BB, n_subarrays=3)
base = objective(F_opt, assemble_rf(cont), F_BB)
print(f"continuous phases: objective {base:.3f}")
for bits in (1, 2, 3, 4):
    q = quantize(cont, bits)
    print(f"B={bits}: objective {objective(F_opt, assemble_rf(q), F_BB):.3f}")

F_RF = assemble_rf(cont)
print("F_RF^H F_RF = I:", np.allclose(F_RF.conj().T @ F_RF, np.eye(3), atol=1e-12))
