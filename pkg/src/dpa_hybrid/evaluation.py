"""Spectral efficiency and Monte Carlo experiments over SNR, phase resolution and CSI quality."""

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .admm import admm_solve, build_real_system
from .altmin import hybrid_precode
from .channel import corrupt_csi, csi_stream, generate_channels
from .config import SCENARIOS
from .errors import ConfigError, ContractError
from .rf import RfPhases
from .rng import TEST_INSTANCE, complex_normal, substream
from .target import build_target

CSV_FIELDS = ("method", "snr_db", "trial", "bits", "xi", "se_bits_per_hz", "objective",
              "outer_iters", "inner_iters_mean")


def rate_per_subcarrier(H, F, power, n_streams, noise_var):
    """``log2 det(I + P/(N_s sigma^2) H F F^H H^H)`` for every subcarrier.

    ``H`` is ``(K, N_r, N_t)`` and ``F`` is ``(K, N_t, N_s)``. This is the
    mutual information with an unconstrained receiver, so no combiner is
    formed explicitly.
    """
    HF = H @ F
    n_r = H.shape[-2]
    M = np.eye(n_r) + (power / (n_streams * noise_var)) * (HF @ np.swapaxes(HF, -1, -2).conj())
    sign, logdet = np.linalg.slogdet(M)
    return logdet / math.log(2.0)


def spectral_efficiency(channels, F_RF, F_BB, power, n_streams, noise_var, tol=1e-6):
    """Average rate over subcarriers (bits/s/Hz) of the precoders ``F_RF @ F_BB[k]``.

    Raises:
        ContractError: some ``||F_RF F_BB[k]||_F^2`` differs from ``power`` by more than ``tol``.
    """
    F = np.einsum("im,kms->kis", F_RF, F_BB)
    energy = np.sum(np.abs(F) ** 2, axis=(1, 2))
    worst = float(np.max(np.abs(energy - power)))
    if worst > tol:
        raise ContractError(f"precoder power deviates from P={power} by {worst:.3g}")
    H = channels.H if hasattr(channels, "H") else np.asarray(channels)
    return float(np.mean(rate_per_subcarrier(H, F, power, n_streams, noise_var)))


def fully_digital_se(channels, target, noise_var):
    """Spectral efficiency of the unconstrained optimal precoders in ``target``."""
    identity = np.eye(target.n_tx)
    return spectral_efficiency(channels, identity, target.F_opt, target.power, target.n_streams, noise_var)


@dataclass(frozen=True)
class Record:
    method: str
    snr_db: float
    trial: int
    bits: int | None
    xi: float
    se_bits_per_hz: float
    objective: float = 0.0
    outer_iters: int = 0
    inner_iters_mean: float = 0.0

    def row(self):
        return [self.method, repr(float(self.snr_db)), str(self.trial),
                "inf" if self.bits is None else str(self.bits), repr(float(self.xi)),
                repr(float(self.se_bits_per_hz)), repr(float(self.objective)), str(int(self.outer_iters)),
                repr(float(self.inner_iters_mean))]


@dataclass
class ExperimentResult:
    scenario: str
    records: list = field(default_factory=list)
    admm_solves: int = 0
    admm_nonconverged: int = 0

    def to_csv(self, path=None):
        """Write (or, with no path, return) the records as CSV text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in self.records:
            writer.writerow(r.row())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def curves(self):
        """Group records by ``(method, bits, xi)`` into per-SNR mean and standard error.

        Returns:
            ``{(method, bits, xi): (snr_db, mean, stderr)}`` with array values
            ordered by SNR.
        """
        groups = {}
        for r in self.records:
            groups.setdefault((r.method, r.bits, r.xi), {}).setdefault(r.snr_db, []).append(r.se_bits_per_hz)
        out = {}
        for key, by_snr in groups.items():
            snrs = sorted(by_snr)
            vals = [np.asarray(by_snr[s]) for s in snrs]
            mean = np.array([v.mean() for v in vals])
            err = np.array([v.std(ddof=1) / np.sqrt(v.size) if v.size > 1 else 0.0 for v in vals])
            out[key] = (np.array(snrs), mean, err)
        return out

    def select(self, method=None, bits="any", xi=None, snr_db=None):
        return [r for r in self.records
                if (method is None or r.method == method)
                and (bits == "any" or r.bits == bits)
                and (xi is None or r.xi == xi)
                and (snr_db is None or r.snr_db == snr_db)]


def _scenario_grid(cfg, scenario):
    """``(antenna configs, xi values, bit resolutions)`` explored by a scenario."""
    antennas = [(cfg.N_t_sub, cfg.N_r)]
    if scenario == "snr_sweep":
        return antennas, [1.0], [cfg.bits[0]]
    if scenario == "bits_sweep":
        return antennas, [1.0], list(cfg.bits)
    if scenario == "csi_sweep":
        return list(cfg.antenna_grid) or antennas, list(cfg.xi), [cfg.bits[0]]
    raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")


def run_experiment(cfg, scenario, progress=None, dump=None):
    """Monte Carlo run of one scenario.

    For every trial a channel is drawn (optionally corrupted with accuracy
    ``xi``), optimal precoders are computed on the channel the transmitter
    sees, the hybrid precoder is designed from them, and spectral efficiency
    is measured on the true channel. The fully-digital optimum of the true
    channel is recorded as ``fully_digital``; under ``csi_sweep`` the
    fully-digital precoder designed on the estimate is also recorded as
    ``fully_digital_csi``.

    ``snr_sweep`` uses perfect CSI and ``bits[0]``; ``bits_sweep`` uses every
    entry of ``bits``; ``csi_sweep`` crosses ``antenna_grid`` with ``xi``.
    Channels depend only on ``(seed, trial)``, so all grid points of a trial
    share one realization.

    Args:
        progress: optional callable receiving the trial index as each one starts.
        dump: optional callable ``dump(trial, tag, channels)`` receiving every
            true channel realization.
    """
    antennas, xis, bit_list = _scenario_grid(cfg, scenario)
    chash = cfg.digest()
    opts = cfg.altmin_options()
    result = ExperimentResult(scenario)
    keyed = []
    for trial in range(cfg.trials):
        if progress is not None:
            progress(trial)
        for a_idx, (n_sub, n_r) in enumerate(antennas):
            tag = f"@{n_sub}x{n_r}" if scenario == "csi_sweep" else ""
            H = generate_channels(cfg.M_t, n_sub, n_r, cfg.K, seed=cfg.seed, trial=trial,
                                  n_clusters=cfg.N_cl, n_rays=cfg.N_ray, angular_spread=cfg.angular_spread,
                                  spacing=cfg.d_e_over_lambda, config_hash=chash)
            if dump is not None:
                dump(trial, tag, H)
            if scenario == "csi_sweep":
                estimates = [(xi, corrupt_csi(H, xi, csi_stream(cfg.seed, trial))) for xi in xis]
            else:
                estimates = [(1.0, H)]
            for s_idx, snr_db in enumerate(cfg.snr_grid_db):
                noise_var = cfg.P / 10.0 ** (snr_db / 10.0)
                true_target = build_target(H, cfg.N_s, cfg.P, noise_var, cfg.waterfill_noise)
                v = 0
                keyed.append(((a_idx, v, s_idx, trial), Record(
                    "fully_digital" + tag, snr_db, trial, None, 1.0, fully_digital_se(H, true_target, noise_var))))
                for x_idx, (xi, H_hat) in enumerate(estimates):
                    target = true_target if H_hat is H else build_target(H_hat, cfg.N_s, cfg.P, noise_var,
                                                                         cfg.waterfill_noise)
                    if scenario == "csi_sweep":
                        v += 1
                        keyed.append(((a_idx, v, s_idx, trial), Record(
                            "fully_digital_csi" + tag, snr_db, trial, None, xi,
                            fully_digital_se(H, target, noise_var))))
                    for bits in bit_list:
                        v += 1
                        hp = hybrid_precode(target, bits=bits, **opts)
                        se = spectral_efficiency(H, hp.F_RF, hp.F_BB, cfg.P, cfg.N_s, noise_var)
                        keyed.append(((a_idx, v, s_idx, trial), Record(
                            "admm_altmin" + tag, snr_db, trial, bits, xi, se, hp.trace[-1],
                            hp.outer_iterations, hp.inner_iterations_mean)))
                        result.admm_solves += hp.admm_solves
                        result.admm_nonconverged += hp.admm_nonconverged
    keyed.sort(key=lambda kv: kv[0])
    result.records = [r for _, r in keyed]
    return result


def expected_record_count(cfg, scenario):
    antennas, xis, bit_list = _scenario_grid(cfg, scenario)
    per_antenna = 1 + len(xis) * len(bit_list) + (len(xis) if scenario == "csi_sweep" else 0)
    return len(cfg.snr_grid_db) * cfg.trials * len(antennas) * per_antenna


@dataclass(frozen=True)
class ProbeRow:
    M_t: int
    N_s: int
    seconds_per_iter: float
    cv: float


def complexity_probe(grid, n_tx_sub=128, iters=200, repeats=7, seed=0):
    """Time one ADMM iteration of :func:`admm_solve` for each ``(M_t, N_s)`` in ``grid``.

    Each configuration runs ``repeats`` solves of exactly ``iters``
    iterations (tolerances set to zero) on a random instance; the reported
    time is the median per-iteration time and ``cv`` the coefficient of
    variation across repeats.
    """
    rows = []
    for M_t, N_s in grid:
        rng = substream(seed, 0, TEST_INSTANCE, 1000 * M_t + N_s)
        phases = RfPhases(rng.uniform(0.0, 2.0 * np.pi, (M_t, n_tx_sub)))
        F_opt = complex_normal(rng, (M_t * n_tx_sub, N_s))
        F_opt *= np.sqrt(N_s) / np.linalg.norm(F_opt)
        system = build_real_system(phases, F_opt, float(N_s))
        admm_solve(system, eps_p=0.0, eps_d=0.0, max_iters=5)
        samples = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            admm_solve(system, eps_p=0.0, eps_d=0.0, max_iters=iters)
            samples.append((time.perf_counter() - t0) / iters)
        samples = np.asarray(samples)
        rows.append(ProbeRow(M_t, N_s, float(np.median(samples)), float(samples.std() / samples.mean())))
    return rows


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
