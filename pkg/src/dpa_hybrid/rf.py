"""Analog (RF) precoder: closed-form phases, B-bit quantization, block-diagonal assembly."""

import logging
from dataclasses import dataclass

import numpy as np

from .channel import TWO_PI, wrap_angle
from .errors import DomainError, InvalidDimensionError, StructureError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RfPhases:
    """Phase-shifter settings, one row of ``N_t_sub`` phases per subarray.

    ``bits=None`` means infinite resolution. ``degenerate`` marks elements
    whose optimal phase was undefined (zero accumulated correlation) and was
    set to 0.
    """

    phases: np.ndarray
    bits: int | None = None
    degenerate: np.ndarray | None = None

    def __post_init__(self):
        ph = np.array(self.phases, dtype=float)
        if ph.ndim != 2:
            raise InvalidDimensionError(f"phases must be (M_t, N_t_sub), got shape {ph.shape}")
        if np.any(ph < 0) or np.any(ph >= TWO_PI):
            raise DomainError("phases must lie in [0, 2*pi)")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def n_subarrays(self):
        return self.phases.shape[0]

    @property
    def n_tx_sub(self):
        return self.phases.shape[1]

    @classmethod
    def zeros(cls, n_subarrays, n_tx_sub, bits=None):
        return cls(np.zeros((n_subarrays, n_tx_sub)), bits)

    def matrix(self):
        return assemble_rf(self)


def row_to_subarray(n_subarrays, n_tx_sub):
    """Column index ``l`` of the nonzero entry in each row of F_RF."""
    return np.repeat(np.arange(n_subarrays), n_tx_sub)


def optimal_phases(F_opt, F_BB, n_subarrays):
    """Closed-form phases minimizing ``sum_k ||F_opt[k] - F_RF F_BB[k]||_F^2`` for fixed F_BB.

    Element ``i`` of subarray ``l`` gets the angle of
    ``sum_k F_opt[k][i, :] @ F_BB[k][l, :]^H``.

    Args:
        F_opt: ``(K, N_t_tot, N_s)``.
        F_BB: ``(K, M_t, N_s)``.
        n_subarrays: ``M_t``.

    Returns:
        Continuous-resolution :class:`RfPhases`.
    """
    F_opt = np.asarray(F_opt)
    F_BB = np.asarray(F_BB)
    if F_opt.ndim == 2:
        F_opt, F_BB = F_opt[None], F_BB[None]
    K, n_tx, n_s = F_opt.shape
    if F_BB.shape != (K, n_subarrays, n_s) or n_tx % n_subarrays:
        raise InvalidDimensionError(
            f"F_opt {F_opt.shape} and F_BB {F_BB.shape} are inconsistent with M_t={n_subarrays}"
        )
    n_sub = n_tx // n_subarrays
    rows = F_BB[:, row_to_subarray(n_subarrays, n_sub), :]
    corr = np.einsum("kis,kis->i", F_opt, rows.conj())
    zero = corr == 0
    if np.any(zero):
        log.warning("%d RF elements have zero correlation; phase set to 0", int(zero.sum()))
    phases = np.where(zero, 0.0, wrap_angle(np.angle(corr)))
    return RfPhases(phases.reshape(n_subarrays, n_sub), None, zero.reshape(n_subarrays, n_sub))


def quantize_phase(theta, bits):
    """Nearest point of the grid ``{2*pi*q / 2**bits}`` in circular distance.

    ``bits=None`` (or ``inf``) returns the wrapped phase unchanged. An exact
    tie resolves to the smaller grid index.
    """
    theta = wrap_angle(np.asarray(theta, dtype=float))
    if bits is None or bits == np.inf:
        return theta
    if int(bits) != bits or bits < 1:
        raise DomainError(f"bits must be a positive integer or None, got {bits!r}")
    levels = 2 ** int(bits)
    step = TWO_PI / levels
    x = theta / step
    lo = np.floor(x)
    frac = x - lo
    lo = lo.astype(np.int64) % levels
    hi = (lo + 1) % levels
    q = np.where(frac > 0.5, hi, lo)
    q = np.where(frac == 0.5, np.minimum(lo, hi), q)
    return q * step


def quantize(phases, bits):
    """Apply :func:`quantize_phase` to every element of an :class:`RfPhases`."""
    return RfPhases(quantize_phase(phases.phases, bits), bits, phases.degenerate)


def assemble_rf(phases):
    """Block-diagonal ``(N_t_tot, M_t)`` matrix with entries ``exp(1j*phase) / sqrt(N_t_sub)``."""
    ph = phases.phases if isinstance(phases, RfPhases) else np.asarray(phases, dtype=float)
    n_sub_arrays, n_sub = ph.shape
    F = np.zeros((n_sub_arrays * n_sub, n_sub_arrays), dtype=complex)
    F[np.arange(n_sub_arrays * n_sub), row_to_subarray(n_sub_arrays, n_sub)] = (
        np.exp(1j * ph.ravel()) / np.sqrt(n_sub)
    )
    return F


def validate_rf_matrix(F_RF, atol=1e-10):
    """Raise :class:`StructureError` unless F_RF is block-diagonal with modulus ``1/sqrt(N_t_sub)``.

    Returns the recovered phases on success.
    """
    F_RF = np.asarray(F_RF)
    if F_RF.ndim != 2 or F_RF.shape[1] < 1 or F_RF.shape[0] % F_RF.shape[1]:
        raise StructureError(f"F_RF shape {F_RF.shape} is not (M_t * N_t_sub, M_t)")
    n_subarrays = F_RF.shape[1]
    n_sub = F_RF.shape[0] // n_subarrays
    mask = np.zeros(F_RF.shape, dtype=bool)
    mask[np.arange(F_RF.shape[0]), row_to_subarray(n_subarrays, n_sub)] = True
    if np.any(np.abs(F_RF[~mask]) > atol):
        raise StructureError("F_RF has nonzero entries off the block diagonal")
    on = F_RF[mask]
    if np.any(np.abs(np.abs(on) - 1.0 / np.sqrt(n_sub)) > atol):
        raise StructureError("F_RF block entries do not have modulus 1/sqrt(N_t_sub)")
    return RfPhases(wrap_angle(np.angle(on)).reshape(n_subarrays, n_sub))
