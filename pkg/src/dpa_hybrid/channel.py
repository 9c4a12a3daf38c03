"""Wideband geometric cluster-ray channels for distributed subarrays.

Every TX subarray sees its own independent set of clusters. For subarray ``m``
and subcarrier ``k`` the channel is

    H_m[k] = gamma * sum_i sum_l alpha_il a_r(aoa_il) a_t(aod_il)^H exp(-2j pi i k / K)

with ``gamma = sqrt(N_t_sub * N_r / (N_cl * N_ray))`` and the cluster index
``i`` running from 1. The full channel stacks the subarray blocks side by
side along the TX dimension.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidDimensionError
from .rng import CSI_ERROR, SUBARRAY, complex_normal, substream

TWO_PI = 2.0 * np.pi


def wrap_angle(angle):
    """Map angles into [0, 2*pi)."""
    out = np.mod(angle, TWO_PI)
    # np.mod can round tiny negatives up to exactly 2*pi
    return np.where(out >= TWO_PI, 0.0, out)


def array_response(n_antennas, spacing_over_wavelength, angle):
    """Unit-norm ULA response vector.

    Entry ``n`` is ``exp(2j*pi*d*n*sin(angle)) / sqrt(N)``.

    Args:
        n_antennas: number of elements ``N``.
        spacing_over_wavelength: element spacing ``d_e / lambda``.
        angle: steering angle in radians. An array of angles gives a stack of
            responses with the element axis last.

    Returns:
        Complex array of shape ``np.shape(angle) + (n_antennas,)``.
    """
    if int(n_antennas) != n_antennas or n_antennas < 1:
        raise InvalidDimensionError(f"n_antennas must be a positive integer, got {n_antennas!r}")
    n = np.arange(int(n_antennas))
    phase = TWO_PI * spacing_over_wavelength * np.multiply.outer(np.sin(angle), n)
    return np.exp(1j * phase) / np.sqrt(n_antennas)


@dataclass(frozen=True)
class ClusterRayParams:
    """Small-scale parameters of one subarray's channel.

    All ray arrays have shape ``(n_clusters, n_rays)``; the cluster means have
    shape ``(n_clusters,)``. Angles are in radians, wrapped to [0, 2*pi).
    """

    gains: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray
    aod_mean: np.ndarray
    aoa_mean: np.ndarray
    angular_spread: float

    @property
    def n_clusters(self):
        return self.gains.shape[0]

    @property
    def n_rays(self):
        return self.gains.shape[1]


def _laplacian_offsets(rng, scale, shape):
    # inverse CDF of Laplace(0, scale) applied to U(-1/2, 1/2)
    r = rng.random(shape)
    r = np.where(r == 0.0, np.nextafter(0.0, 1.0), r)
    u = r - 0.5
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def sample_cluster_params(rng, n_clusters, n_rays, angular_spread):
    """Draw gains and angles for one subarray.

    Cluster mean AoD/AoA are uniform on [0, 2*pi); ray offsets around each
    mean are Laplacian with scale ``angular_spread`` (radians); gains are
    CN(0, 1).
    """
    if n_clusters < 1 or n_rays < 1:
        raise InvalidDimensionError("n_clusters and n_rays must be >= 1")
    if not angular_spread > 0:
        raise DomainError(f"angular_spread must be positive, got {angular_spread!r}")
    shape = (n_clusters, n_rays)
    aod_mean = rng.uniform(0.0, TWO_PI, n_clusters)
    aoa_mean = rng.uniform(0.0, TWO_PI, n_clusters)
    aod = wrap_angle(aod_mean[:, None] + _laplacian_offsets(rng, angular_spread, shape))
    aoa = wrap_angle(aoa_mean[:, None] + _laplacian_offsets(rng, angular_spread, shape))
    gains = complex_normal(rng, shape)
    return ClusterRayParams(gains, aod, aoa, aod_mean, aoa_mean, float(angular_spread))


def _cluster_matrices(params, n_tx, n_rx, spacing):
    # gamma * sum_l alpha_il a_r a_t^H for every cluster i -> (n_cl, n_rx, n_tx)
    gamma = np.sqrt(n_tx * n_rx / (params.n_clusters * params.n_rays))
    a_r = array_response(n_rx, spacing, params.aoa)
    a_t = array_response(n_tx, spacing, params.aod)
    return gamma * np.einsum("cl,clr,clt->crt", params.gains, a_r, a_t.conj())


def _delay_phases(n_clusters, subcarriers, n_subcarriers):
    i = np.arange(1, n_clusters + 1)
    return np.exp(-1j * TWO_PI * np.multiply.outer(subcarriers, i) / n_subcarriers)


def subarray_channel(params, n_tx, n_rx, k, n_subcarriers, spacing=0.5):
    """Channel matrix ``(n_rx, n_tx)`` of one subarray on subcarrier ``k``."""
    if not 0 <= k < n_subcarriers:
        raise IndexError(f"subcarrier {k} out of range for K={n_subcarriers}")
    clusters = _cluster_matrices(params, n_tx, n_rx, spacing)
    phases = _delay_phases(params.n_clusters, k, n_subcarriers)
    return np.tensordot(phases, clusters, axes=1)


def subarray_channels(params, n_tx, n_rx, n_subcarriers, spacing=0.5):
    """All subcarriers of one subarray at once, shape ``(K, n_rx, n_tx)``."""
    clusters = _cluster_matrices(params, n_tx, n_rx, spacing)
    phases = _delay_phases(params.n_clusters, np.arange(n_subcarriers), n_subcarriers)
    return np.tensordot(phases, clusters, axes=1)


@dataclass(frozen=True)
class ChannelSet:
    """Per-subcarrier channels ``H`` with shape ``(K, N_r, N_t_tot)``.

    Columns ``[m*N_t_sub, (m+1)*N_t_sub)`` belong to subarray ``m``. The array
    is made read-only on construction.
    """

    H: np.ndarray
    n_subarrays: int
    seed: int | None = None
    config_hash: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        H = np.array(self.H, dtype=complex)
        if H.ndim != 3:
            raise InvalidDimensionError(f"H must be (K, N_r, N_t_tot), got shape {H.shape}")
        if H.shape[2] % self.n_subarrays:
            raise InvalidDimensionError(
                f"{H.shape[2]} TX columns do not split into {self.n_subarrays} subarrays"
            )
        if not np.all(np.isfinite(H)):
            raise ValueError("channel contains non-finite entries")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def n_subcarriers(self):
        return self.H.shape[0]

    @property
    def n_rx(self):
        return self.H.shape[1]

    @property
    def n_tx(self):
        return self.H.shape[2]

    @property
    def n_tx_sub(self):
        return self.n_tx // self.n_subarrays

    def subarray(self, m):
        n = self.n_tx_sub
        return self.H[:, :, m * n:(m + 1) * n]


def assemble_channel(blocks, n_subcarriers, seed=None, config_hash=None):
    """Concatenate per-subarray channels ``(K, N_r, N_t_sub)`` along the TX axis."""
    blocks = [np.asarray(b) for b in blocks]
    if not blocks:
        raise InvalidDimensionError("need at least one subarray")
    ref = blocks[0].shape
    if len(ref) != 3 or ref[0] != n_subcarriers:
        raise InvalidDimensionError(f"subarray block has shape {ref}, expected (K={n_subcarriers}, N_r, N_t_sub)")
    for m, b in enumerate(blocks):
        if b.shape != ref:
            raise InvalidDimensionError(f"subarray {m} has shape {b.shape}, expected {ref}")
    return ChannelSet(np.concatenate(blocks, axis=2), len(blocks), seed, config_hash)


def generate_channels(n_subarrays, n_tx_sub, n_rx, n_subcarriers, *, seed, trial=0,
                      n_clusters=5, n_rays=10, angular_spread=np.deg2rad(10.0),
                      spacing=0.5, config_hash=None):
    """Draw one wideband channel realization for every subarray.

    Subarray ``m`` of trial ``t`` uses substream ``(t, SUBARRAY, m)`` so its
    cluster parameters do not depend on the antenna counts or on other
    subarrays.
    """
    blocks = []
    for m in range(n_subarrays):
        params = sample_cluster_params(substream(seed, trial, SUBARRAY, m), n_clusters, n_rays, angular_spread)
        blocks.append(subarray_channels(params, n_tx_sub, n_rx, n_subcarriers, spacing))
    return assemble_channel(blocks, n_subcarriers, seed=seed, config_hash=config_hash)


def corrupt_csi(channels, xi, rng):
    """Imperfect CSI: ``xi * H[k] + sqrt(1 - xi^2) * E[k]`` with fresh CN(0, 1) errors."""
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"CSI accuracy xi must lie in [0, 1], got {xi!r}")
    E = complex_normal(rng, channels.H.shape)
    H_hat = xi * channels.H + np.sqrt(1.0 - xi * xi) * E
    return ChannelSet(H_hat, channels.n_subarrays, channels.seed, channels.config_hash,
                      meta={**channels.meta, "xi": float(xi)})


def csi_stream(seed, trial):
    return substream(seed, trial, CSI_ERROR, 0)


def dump_channels(channels, path):
    """Write a ChannelSet as text: one ``[m=.. k=..]`` block per subarray and subcarrier.

    Each block has ``N_r`` rows of ``N_t_sub`` space-separated ``re,im`` pairs.
    Floats are written with ``repr`` so :func:`load_channels` round-trips exactly.
    """
    K, n_rx, _ = channels.H.shape
    lines = [
        "# dpa-hybrid channel dump v1",
        f"# seed={channels.seed}",
        f"# config_hash={channels.config_hash}",
        f"# M_t={channels.n_subarrays} N_t_sub={channels.n_tx_sub} N_r={n_rx} K={K}",
    ]
    for m in range(channels.n_subarrays):
        block = channels.subarray(m)
        for k in range(K):
            lines.append(f"[m={m} k={k}]")
            for row in block[k]:
                lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_channels(path):
    header = {}
    blocks = {}
    current = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        key, val = tok.split("=", 1)
                        header[key] = val
            elif line.startswith("["):
                m, k = (int(t.split("=")[1]) for t in line.strip("[]").split())
                current = blocks.setdefault((m, k), [])
            else:
                current.append([complex(float(re), float(im))
                                for re, im in (p.split(",") for p in line.split())])
    n_sub, K = int(header["M_t"]), int(header["K"])
    per_sub = [np.array([blocks[(m, k)] for k in range(K)]) for m in range(n_sub)]
    seed = None if header.get("seed") in (None, "None") else int(header["seed"])
    chash = None if header.get("config_hash") in (None, "None") else header["config_hash"]
    return assemble_channel(per_sub, K, seed=seed, config_hash=chash)
