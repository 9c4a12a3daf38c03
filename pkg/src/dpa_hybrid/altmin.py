"""Alternating minimization of ``sum_k ||F_opt[k] - F_RF F_BB[k]||_F^2``.

Each outer iteration updates the RF phases in closed form for the current
baseband matrices, quantizes them, and re-solves every subcarrier's baseband
matrix by ADMM against the new RF matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from .admm import solve_baseband
from .rf import RfPhases, assemble_rf, optimal_phases, quantize
from .target import PrecoderTarget


@dataclass
class HybridPrecoder:
    """RF phases, the RF matrix they define, and per-subcarrier baseband matrices.

    ``trace[0]`` is the objective after the first baseband solve; ``trace[n]``
    follows the ``n``-th RF update and its baseband re-solve.
    """

    phases: RfPhases
    F_RF: np.ndarray
    F_BB: np.ndarray
    trace: list = field(default_factory=list)
    converged: bool = False
    outer_iterations: int = 0
    inner_iterations: list = field(default_factory=list)
    admm_solves: int = 0
    admm_nonconverged: int = 0

    @property
    def F(self):
        """Effective precoders ``F_RF @ F_BB[k]``, shape ``(K, N_t_tot, N_s)``."""
        return np.einsum("im,kms->kis", self.F_RF, self.F_BB)

    def _record(self, bb):
        self.inner_iterations.append(float(bb.iterations.mean()))
        self.admm_solves += bb.converged.size
        self.admm_nonconverged += int(np.count_nonzero(~bb.converged))

    @property
    def inner_iterations_mean(self):
        return float(np.mean(self.inner_iterations)) if self.inner_iterations else 0.0


def _f_opt(target):
    return target.F_opt if isinstance(target, PrecoderTarget) else np.asarray(target)


def objective(target, F_RF, F_BB=None):
    """Sum over subcarriers of ``||F_opt[k] - F_RF F_BB[k]||_F^2``.

    ``F_RF`` may also be a :class:`HybridPrecoder`, in which case ``F_BB`` is
    taken from it.
    """
    if isinstance(F_RF, HybridPrecoder):
        F_RF, F_BB = F_RF.F_RF, F_RF.F_BB
    diff = _f_opt(target) - np.einsum("im,kms->kis", F_RF, F_BB)
    return float(np.sum(diff.real ** 2 + diff.imag ** 2))


def hybrid_precode(target, *, bits=None, rho=1.0, eps_p=1e-6, eps_d=1e-6, admm_max_iters=10_000,
                   outer_tol=1e-4, outer_max_iters=50, quantize_in_loop=True,
                   variant="derived", warm_start=False, initial_phases=None):
    """Design a hybrid precoder approximating ``target``.

    Args:
        target: :class:`PrecoderTarget`.
        bits: phase-shifter resolution, ``None`` for continuous phases.
        rho, eps_p, eps_d, admm_max_iters, variant: forwarded to the ADMM
            baseband solver.
        outer_tol: stop once the relative objective decrease of one outer
            iteration falls below this value.
        outer_max_iters: cap on RF updates; reaching it leaves
            ``converged=False``.
        quantize_in_loop: quantize at every RF update (default) or only once
            after the continuous-phase loop has stopped.
        warm_start: start each ADMM solve from the previous ``(y, nu)`` instead of
            the oracle direction with a zero dual.
        initial_phases: starting RF phases, all zero by default.
    """
    F_opt = target.F_opt
    P = target.power
    M_t, n_sub = target.n_subarrays, target.n_tx_sub
    loop_bits = bits if quantize_in_loop else None
    admm_kw = dict(rho=rho, eps_p=eps_p, eps_d=eps_d, max_iters=admm_max_iters, variant=variant)

    phases = initial_phases if initial_phases is not None else RfPhases.zeros(M_t, n_sub, loop_bits)
    F_RF = assemble_rf(phases)
    bb = solve_baseband(F_RF, F_opt, P, **admm_kw)
    out = HybridPrecoder(phases, F_RF, bb.F_BB, [objective(F_opt, F_RF, bb.F_BB)])
    out._record(bb)

    for _ in range(outer_max_iters):
        phases = quantize(optimal_phases(F_opt, bb.F_BB, M_t), loop_bits)
        F_RF = assemble_rf(phases)
        warm = dict(y0=bb.y, nu0=bb.nu) if warm_start else {}
        bb = solve_baseband(F_RF, F_opt, P, **admm_kw, **warm)
        prev = out.trace[-1]
        cur = objective(F_opt, F_RF, bb.F_BB)
        out.phases, out.F_RF, out.F_BB = phases, F_RF, bb.F_BB
        out.trace.append(cur)
        out._record(bb)
        out.outer_iterations += 1
        if prev <= 0.0 or (prev - cur) / prev < outer_tol:
            out.converged = True
            break

    if bits is not None and not quantize_in_loop:
        phases = quantize(out.phases, bits)
        F_RF = assemble_rf(phases)
        bb = solve_baseband(F_RF, F_opt, P, **admm_kw)
        out.phases, out.F_RF, out.F_BB = phases, F_RF, bb.F_BB
        out.trace.append(objective(F_opt, F_RF, bb.F_BB))
        out._record(bb)
    return out
