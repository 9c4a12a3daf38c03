"""Monte Carlo sweeps as the CLI runs them, shrunk to a few trials.

The full runs use the files in configs/, for example:

    dpa-hybrid --config configs/bits_sweep.cfg --scenario bits_sweep --plot
"""

import pathlib
import tempfile

from dpa_hybrid.cli import plot_curves
from dpa_hybrid.config import parse_config
from dpa_hybrid.evaluation import run_experiment

configs = pathlib.Path(__file__).resolve().parent.parent / "configs"
out = pathlib.Path(tempfile.mkdtemp(prefix="dpa_demo_"))

for scenario in ("snr_sweep", "bits_sweep", "csi_sweep"):
    cfg = parse_config(configs / f"{scenario}.cfg").replace(trials=3, snr_grid_db=(-10.0, 0.0, 10.0))
    result = run_experiment(cfg, scenario)
    print(f"\n{scenario}: {len(result.records)} records")
    for (method, bits, xi), (snr, mean, _) in sorted(result.curves().items(), key=str):
        label = f"{method} B={'inf' if bits is None else bits} xi={xi}"
        print(f"  {label:<38}" + "  ".join(f"{m:6.2f}" for m in mean))
    try:
        n = plot_curves(result, out / f"{scenario}.svg")
        print(f"  plot with {n} curves in {out / (scenario + '.svg')}")
    except ImportError:
        print("  matplotlib not installed, skipping plot")
