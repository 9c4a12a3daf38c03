"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s``. The Monte
Carlo trend checks dominate the runtime (roughly 40 minutes on one core).
"""

import pathlib
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from dpa_hybrid.admm import admm_solve, build_real_system, sphere_ls_oracle
from dpa_hybrid.altmin import hybrid_precode
from dpa_hybrid.channel import generate_channels
from dpa_hybrid.cli import main
from dpa_hybrid.config import parse_config
from dpa_hybrid.evaluation import complexity_probe, loglog_slope, run_experiment
from dpa_hybrid.rf import assemble_rf
from dpa_hybrid.rng import TEST_INSTANCE, complex_normal, substream
from dpa_hybrid.target import PrecoderTarget, build_target, water_filling

from conftest import random_phases, random_target

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"
MC_TRIALS = 100

pytestmark = pytest.mark.slow


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        return ok

    return emit


def _rng(seed, index):
    return substream(seed, 0, TEST_INSTANCE, index)


def _fig_config(name, **changes):
    return parse_config(CONFIGS / name).replace(**changes)


@pytest.fixture(scope="module")
def bits_result():
    cfg = _fig_config("bits_sweep.cfg", trials=MC_TRIALS, snr_grid_db=(0.0,))
    return run_experiment(cfg, "bits_sweep")


@pytest.fixture(scope="module")
def csi_result():
    cfg = _fig_config("csi_sweep.cfg", trials=MC_TRIALS, snr_grid_db=(0.0,))
    return run_experiment(cfg, "csi_sweep")


@pytest.fixture(scope="module")
def snr_result():
    cfg = _fig_config("snr_sweep.cfg", trials=20)
    return run_experiment(cfg, "snr_sweep")


def test_01_oracle_equivalence(report):
    t0 = time.perf_counter()
    worst_rel = worst_obj = 0.0
    converged = 0
    for i in range(200):
        rng = _rng(1, i)
        system = build_real_system(random_phases(rng, 4, 8), random_target(rng, 32, 2, 2.0), 2.0)
        rep = admm_solve(system)
        oracle = sphere_ls_oracle(system)
        worst_rel = max(worst_rel, np.linalg.norm(rep.solution - oracle.solution) / np.linalg.norm(oracle.solution))
        worst_obj = max(worst_obj, abs(rep.objective - oracle.objective))
        converged += rep.converged
    elapsed = time.perf_counter() - t0

    # supplementary: from a canonical cold start the iteration itself must reach the oracle
    cold = 0
    for i in range(200):
        rng = _rng(1, i)
        system = build_real_system(random_phases(rng, 4, 8), random_target(rng, 32, 2, 2.0), 2.0)
        y0 = np.zeros(system.dim)
        y0[0] = np.sqrt(system.c)
        rep = admm_solve(system, rho=3.0, y0=y0)
        rel = np.linalg.norm(rep.solution - sphere_ls_oracle(system).solution) / np.sqrt(2.0)
        cold += rep.converged and rel < 1e-4

    ok = worst_rel < 1e-4 and worst_obj < 1e-6 and elapsed < 60.0
    assert report(1, "ADMM vs sphere-LS oracle (200 instances)", ok,
                  f"max rel err {worst_rel:.2e}, max |obj diff| {worst_obj:.2e}, {elapsed:.1f} s; "
                  f"rho=1 converged {converged}/200 (rest: best feasible iterate at the cap); "
                  f"cold start rho=3 reached oracle {cold}/200")


def test_02_structural_invariants(report):
    rng = _rng(2, 0)
    gram = energy = 0.0
    for _ in range(1000):
        F_RF = assemble_rf(random_phases(rng, 4, 8))
        F_BB = complex_normal(rng, (4, 2))
        gram = max(gram, np.max(np.abs(F_RF.conj().T @ F_RF - np.eye(4))))
        energy = max(energy, abs(np.linalg.norm(F_RF @ F_BB) - np.linalg.norm(F_BB)))
    ok = gram <= 1e-12 and energy <= 1e-10
    assert report(2, "RF Gram identity and norm preservation (1000 draws)", ok,
                  f"max |F_RF^H F_RF - I| {gram:.1e}, max norm gap {energy:.1e}")


def test_03_planted_recovery(report):
    K, P = 32, 2.0
    hits, iters = 0, []
    for seed in range(100):
        rng = _rng(3, seed)
        F_RF = assemble_rf(random_phases(rng, 4, 8))
        G = random_target(rng, 4, 2, P, K=K)
        F_opt = F_RF @ G
        target = PrecoderTarget(F_opt, F_opt, np.ones((K, 2)), np.ones((K, 2)), P, 4)
        hp = hybrid_precode(target)
        iters.append(hp.outer_iterations)
        hits += hp.trace[-1] < 1e-6 * K * P and hp.outer_iterations <= 50
    ok = hits >= 95
    assert report(3, "planted-solution recovery (100 seeds)", ok,
                  f"{hits}/100 below 1e-6*K*P, outer iterations max {max(iters)} mean {np.mean(iters):.1f}")


def test_04_monotone_descent(report):
    worst = -np.inf
    snrs = (-10.0, -5.0, 0.0, 5.0, 10.0)
    for t in range(100):
        ch = generate_channels(4, 8, 8, 32, seed=4, trial=t)
        snr = snrs[t % len(snrs)]
        target = build_target(ch, 2, 2.0, 2.0 / 10 ** (snr / 10))
        hp = hybrid_precode(target)
        worst = max(worst, float(np.max(np.diff(hp.trace))))
    ok = worst <= 1e-9
    assert report(4, "monotone objective trace (100 instances)", ok, f"largest step increase {worst:.2e}")


def _bisection_allocation(s, budget, noise):
    floors = noise / s[s > 0] ** 2
    total = lambda mu: np.sum(np.maximum(0.0, mu - floors)) - budget
    mu = brentq(total, 0.0, budget + floors.max() + 1.0, xtol=1e-15, rtol=8.9e-16, maxiter=1000)
    p = np.zeros_like(s)
    p[s > 0] = np.maximum(0.0, mu - floors)
    return p


def _grid_allocation(s, budget, noise, n=1_000_000):
    """Best point of a 10^6 grid over p_1, refined by bisection on the concave derivative."""
    p1 = np.linspace(0.0, budget, n)
    vals = np.log1p(p1 * s[0] ** 2 / noise) + np.log1p((budget - p1) * s[1] ** 2 / noise)
    j = int(np.argmax(vals))
    lo, hi = p1[max(j - 1, 0)], p1[min(j + 1, n - 1)]
    deriv = lambda x: s[0] ** 2 / (noise + x * s[0] ** 2) - s[1] ** 2 / (noise + (budget - x) * s[1] ** 2)
    if deriv(lo) * deriv(hi) < 0:
        x = brentq(deriv, lo, hi, xtol=1e-15)
    else:
        x = p1[j]
    return np.array([x, budget - x])


def test_05_water_filling_oracle(report):
    rng = _rng(5, 0)
    worst = 0.0
    for i in range(100):
        n = 2 if i < 50 else int(rng.integers(1, 9))
        s = np.sort(rng.uniform(0.0, 3.0, n))[::-1]
        if i % 10 == 9 and n > 1:
            s[-1] = 0.0
        budget = float(rng.uniform(0.5, 8.0))
        noise = float(10 ** rng.uniform(-2, 1))
        p = water_filling(s, budget, noise)
        ref = _grid_allocation(s, budget, noise) if n == 2 and s[1] > 0 else _bisection_allocation(s, budget, noise)
        worst = max(worst, float(np.sum(np.abs(p - ref))))
    ok = worst <= 1e-6
    assert report(5, "water-filling vs grid/bisection oracle (100 sets)", ok,
                  f"max total power displacement {worst:.2e}")


def _mean_se(result, method, bits="any", xi=None):
    vals = [r.se_bits_per_hz for r in result.select(method=method, bits=bits, xi=xi)]
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(len(vals))), len(vals)


def test_06_resolution_trend(report, bits_result):
    order = (1, 2, 3, 4, None)
    stats = [_mean_se(bits_result, "admm_altmin", bits=b) for b in order]
    means = [m for m, _, _ in stats]
    monotone = all(b >= a for a, b in zip(means, means[1:]))
    ratio = means[3] / means[4]
    ok = monotone and ratio >= 0.95 and all(n >= 100 for _, _, n in stats)
    detail = ", ".join(f"B={'inf' if b is None else b}: {m:.3f}+-{e:.3f}" for b, (m, e, _) in zip(order, stats))
    assert report(6, f"mean SE vs resolution at 0 dB ({stats[0][2]} trials)", ok,
                  f"{detail}; SE(4)/SE(inf) = {ratio:.4f} (tolerance 0.95)")


def test_07_csi_trend(report, csi_result):
    cfg = _fig_config("csi_sweep.cfg")
    xis = sorted(cfg.xi)
    table = {}
    for n_sub, n_r in cfg.antenna_grid:
        for xi in xis:
            table[(n_sub, n_r, xi)] = _mean_se(csi_result, f"admm_altmin@{n_sub}x{n_r}", xi=xi)
    ok = True
    lines = []
    for n_sub, n_r in cfg.antenna_grid:
        means = [table[(n_sub, n_r, xi)][0] for xi in xis]
        ok &= all(b >= a for a, b in zip(means, means[1:]))
        lines.append(f"{n_sub}x{n_r}: " + " ".join(f"{m:.3f}" for m in means))
    grid = sorted(cfg.antenna_grid, key=lambda a: a[0] * a[1])
    for xi in xis:
        means = [table[(a[0], a[1], xi)][0] for a in grid]
        ok &= all(b >= a for a, b in zip(means, means[1:]))
    ok &= all(v[2] >= 100 for v in table.values())
    assert report(7, f"mean SE vs xi {xis} and antenna count ({MC_TRIALS} trials, 0 dB)", ok, "; ".join(lines))


def test_08_upper_bound(report, snr_result, bits_result, csi_result):
    violations = checked = 0
    worst = -np.inf
    for res in (snr_result, bits_result, csi_result):
        bound = {}
        for r in res.records:
            if r.method.split("@")[0] == "fully_digital":
                bound[(r.method.split("@")[-1], r.snr_db, r.trial)] = r.se_bits_per_hz
        for r in res.records:
            if r.method.startswith("admm_altmin"):
                key = (r.method.split("@")[-1] if "@" in r.method else "fully_digital", r.snr_db, r.trial)
                gap = r.se_bits_per_hz - bound[key]
                worst = max(worst, gap)
                violations += gap > 1e-9
                checked += 1
    ok = violations == 0
    assert report(8, "hybrid SE <= fully-digital SE on every trial", ok,
                  f"{violations} violations in {checked} hybrid records, max (hybrid - bound) {worst:.3f}")


def test_09_cli_determinism(report, tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text((CONFIGS / "snr_sweep.cfg").read_text().replace("trials = 100", "trials = 5"))
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["--config", str(cfg), "--scenario", "snr_sweep", "--seed", "7", "--out", str(out), "-q"]) == 0
        outs.append((out / "results.csv").read_bytes())
    ok = outs[0] == outs[1]
    assert report(9, "CLI determinism", ok, f"results.csv identical: {ok} ({len(outs[0])} bytes)")


def test_10_complexity_probe(report):
    grid = [(m, 2) for m in (2, 4, 8, 16)]
    rows = complexity_probe(grid)
    times = [r.seconds_per_iter for r in rows]
    slope = loglog_slope([r.M_t for r in rows], times)
    ratios = [b / a for a, b in zip(times, times[1:])]
    ok = 1.5 <= slope <= 2.5
    assert report(10, "per-iteration cost vs M_t (N_s=2)", ok,
                  f"slope {slope:.2f}; us/iter " + " ".join(f"{t * 1e6:.1f}" for t in times)
                  + "; doubling ratios " + " ".join(f"{r:.2f}" for r in ratios)
                  + "; max CV " + f"{max(r.cv for r in rows):.2f}")
