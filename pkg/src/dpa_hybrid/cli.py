"""Command-line driver: ``dpa-hybrid --config FILE --scenario NAME``.

Writes ``results.csv`` and ``config_resolved.cfg`` into the output directory
and, with ``--plot``, an SVG of spectral efficiency against SNR.
"""

import argparse
import logging
import os
import pathlib
import sys

from .channel import dump_channels
from .config import SCENARIOS, format_config, parse_config
from .errors import ConfigError, DpaError
from .evaluation import run_experiment

log = logging.getLogger("dpa_hybrid")


def build_parser():
    p = argparse.ArgumentParser(prog="dpa-hybrid",
                                description="Monte Carlo evaluation of ADMM alternating-minimization hybrid precoding.")
    p.add_argument("--config", required=True, metavar="PATH", help="key = value configuration file")
    p.add_argument("--scenario", choices=SCENARIOS, default="snr_sweep")
    p.add_argument("--seed", type=_u64, default=None, metavar="U64", help="overrides the config seed")
    p.add_argument("--out", metavar="DIR", default=None, help="output directory (default: config out_dir)")
    p.add_argument("--plot", action="store_true", help="also write <scenario>.svg")
    p.add_argument("--dump-channels", action="store_true",
                   help="write every channel realization under <out>/channels/")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _label(key, scenario):
    method, bits, xi = key
    if method.startswith("fully_digital"):
        name = "fully digital" + (" (estimated CSI)" if method.startswith("fully_digital_csi") else "")
    else:
        name = "ADMM-AltMin"
    if "@" in method:
        name += f" {method.split('@')[1]}"
    if method.startswith("admm_altmin") and scenario != "csi_sweep":
        name += ", B=" + ("inf" if bits is None else str(bits))
    if scenario == "csi_sweep" and method.split("@")[0] != "fully_digital":
        name += f", xi={xi:g}"
    return name


def plot_curves(result, path):
    """Render SE against SNR, one curve per method, resolution and CSI accuracy.

    ``bits_sweep`` shows only the hybrid curves, one per resolution. Returns
    the number of curves drawn.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves = result.curves()
    if result.scenario == "bits_sweep":
        curves = {k: v for k, v in curves.items() if k[0].startswith("admm_altmin")}
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key in sorted(curves, key=lambda k: (k[0], -1 if k[1] is None else k[1], k[2])):
        snr, mean, err = curves[key]
        style = "--" if key[0].startswith("fully_digital") else "-"
        ax.errorbar(snr, mean, yerr=err, linestyle=style, marker="o", markersize=3, capsize=2,
                    label=_label(key, result.scenario))
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("Spectral efficiency (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return len(curves)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")

    try:
        cfg = parse_config(pathlib.Path(args.config))
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        out_dir = args.out if args.out is not None else cfg.out_dir
        if args.out is not None:
            cfg = cfg.replace(out_dir=out_dir)
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "config_resolved.cfg"), "w") as fh:
            fh.write(format_config(cfg))

        dump = None
        if args.dump_channels:
            chan_dir = os.path.join(out_dir, "channels")
            os.makedirs(chan_dir, exist_ok=True)

            def dump(trial, tag, channels):
                name = f"trial{trial:05d}{tag.replace('@', '_')}.txt"
                dump_channels(channels, os.path.join(chan_dir, name))

        def progress(trial):
            if trial % 10 == 0:
                log.info("%s: trial %d/%d", args.scenario, trial, cfg.trials)

        result = run_experiment(cfg, args.scenario, progress=progress, dump=dump)
        csv_path = os.path.join(out_dir, "results.csv")
        result.to_csv(csv_path)
        log.info("wrote %s (%d rows)", csv_path, len(result.records))
        if result.admm_nonconverged:
            log.info("%d of %d ADMM solves hit the iteration cap (best feasible iterate kept)",
                     result.admm_nonconverged, result.admm_solves)
    except ConfigError as exc:
        print(f"dpa-hybrid: config error: {exc}", file=sys.stderr)
        return 1
    except (DpaError, ArithmeticError, OSError, ValueError) as exc:
        print(f"dpa-hybrid: error: {exc}", file=sys.stderr)
        return 1

    if args.plot:
        svg = os.path.join(out_dir, f"{args.scenario}.svg")
        try:
            n = plot_curves(result, svg)
            log.info("wrote %s (%d curves)", svg, n)
        except Exception as exc:  # plotting never changes the exit status
            log.warning("plot skipped: %s", exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
