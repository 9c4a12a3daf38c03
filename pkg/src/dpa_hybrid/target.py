"""Optimal fully-digital precoders: dominant right singular vectors plus water-filling."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DomainError, InvalidDimensionError


def svd_basis(H, n_streams):
    """Right singular vectors of the ``n_streams`` largest singular values.

    Returns:
        ``(V, s)`` with ``V`` of shape ``(N_t, n_streams)`` (orthonormal
        columns) and ``s`` the matching singular values in descending order.
        A stacked input ``(K, N_r, N_t)`` gives stacked outputs.
    """
    H = np.asarray(H)
    if H.ndim < 2:
        raise InvalidDimensionError("H must be at least 2-D")
    if not 1 <= n_streams <= min(H.shape[-2:]):
        raise InvalidDimensionError(
            f"n_streams={n_streams} must lie in [1, min(N_r, N_t)={min(H.shape[-2:])}]"
        )
    _, s, Vh = np.linalg.svd(H, full_matrices=False)
    V = np.swapaxes(Vh[..., :n_streams, :], -1, -2).conj()
    return V, s[..., :n_streams]


def _usable_floors(s, budget, noise_scale):
    """Indices of streams with a finite noise floor ``noise_scale / s^2``, sorted by floor."""
    if np.any(s < 0):
        raise DomainError("singular values must be non-negative")
    if not budget > 0 or not noise_scale > 0:
        raise DomainError("budget and noise_scale must be positive")
    with np.errstate(divide="ignore", over="ignore"):
        floors = noise_scale / s**2
    # gains whose square underflows carry no usable power and count as zero
    idx = np.flatnonzero(np.isfinite(floors))
    if idx.size == 0:
        raise DegenerateChannelError("degenerate channel: all singular values are zero or underflow")
    order = np.argsort(floors[idx], kind="stable")
    return idx[order], floors[idx][order]


def water_level(singular_values, budget, noise_scale):
    """Water level ``mu`` and the number of active streams.

    Enumerates the active-set sizes exactly: streams are taken in order of
    decreasing gain and the largest set whose weakest member still receives
    non-negative power wins.
    """
    s = np.asarray(singular_values, dtype=float)
    _, floors = _usable_floors(s, budget, noise_scale)
    csum = np.cumsum(floors)
    for n in range(floors.size, 0, -1):
        mu = (budget + csum[n - 1]) / n
        if mu >= floors[n - 1]:
            return mu, n
    raise AssertionError("unreachable: one active stream is always feasible")


def water_filling(singular_values, budget, noise_scale):
    """Powers maximizing ``sum log2(1 + p_i s_i^2 / noise_scale)`` with ``sum p_i = budget``."""
    s = np.asarray(singular_values, dtype=float)
    _, n_active = water_level(s, budget, noise_scale)
    idx, floors = _usable_floors(s, budget, noise_scale)
    f = floors[:n_active]
    p = np.zeros_like(s)
    # (budget + sum_j (f_j - f_i)) / n equals mu - f_i without cancelling two large terms
    p[idx[:n_active]] = np.maximum(0.0, (budget + (f.sum() - n_active * f)) / n_active)
    return p


@dataclass(frozen=True)
class PrecoderTarget:
    """Stacked optimal precoders, one per subcarrier.

    Attributes:
        F_opt: ``(K, N_t_tot, N_s)`` complex.
        V: ``(K, N_t_tot, N_s)`` dominant right singular vectors.
        singular_values: ``(K, N_s)`` descending.
        powers: ``(K, N_s)`` water-filled stream powers, each row sums to ``power``.
    """

    F_opt: np.ndarray
    V: np.ndarray
    singular_values: np.ndarray
    powers: np.ndarray
    power: float
    n_subarrays: int

    @property
    def n_subcarriers(self):
        return self.F_opt.shape[0]

    @property
    def n_tx(self):
        return self.F_opt.shape[1]

    @property
    def n_streams(self):
        return self.F_opt.shape[2]

    @property
    def n_tx_sub(self):
        return self.n_tx // self.n_subarrays


def waterfill_noise_scale(noise_var, n_streams, power, mode="scaled"):
    """Noise term of the water-filling objective.

    ``"scaled"`` uses ``noise_var * N_s / P`` so allocated powers match the
    per-stream SNR when ``E[s s^H] = (P / N_s) I``; ``"raw"`` uses
    ``noise_var`` alone.
    """
    if mode == "scaled":
        return noise_var * n_streams / power
    if mode == "raw":
        return noise_var
    raise DomainError(f"unknown water-filling noise mode {mode!r}")


def build_target(channels, n_streams, power, noise_var, waterfill="scaled"):
    """Compute ``F_opt[k] = V[k] diag(sqrt(p[k]))`` for every subcarrier."""
    V, s = svd_basis(channels.H, n_streams)
    scale = waterfill_noise_scale(noise_var, n_streams, power, waterfill)
    p = np.stack([water_filling(sk, power, scale) for sk in s])
    F_opt = V * np.sqrt(p)[:, None, :]
    return PrecoderTarget(F_opt, V, s, p, float(power), channels.n_subarrays)
