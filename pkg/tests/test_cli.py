import subprocess
import sys

import pytest

from dpa_hybrid.cli import main
from dpa_hybrid.config import parse_config
from dpa_hybrid.evaluation import expected_record_count

CFG = """M_t = 2
N_t_sub = 4
N_r = 4
K = 4
N_s = 2
trials = 2
snr_grid_db = -5, 5
bits = 1, 2, 3, 4, inf
xi = 0.5, 1.0
"""


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(CFG)
    return p


def _run(args):
    return main([str(a) for a in args] + ["-q"])


def test_writes_outputs(cfg_path, tmp_path):
    out = tmp_path / "out"
    assert _run(["--config", cfg_path, "--scenario", "snr_sweep", "--out", out, "--seed", 7]) == 0
    lines = (out / "results.csv").read_text().splitlines()
    cfg = parse_config(cfg_path).replace(seed=7, out_dir=str(out))
    assert len(lines) - 1 == expected_record_count(cfg, "snr_sweep")
    assert parse_config(str(out / "config_resolved.cfg")) == cfg


def test_byte_identical(cfg_path, tmp_path):
    for name in ("a", "b"):
        assert _run(["--config", cfg_path, "--scenario", "csi_sweep", "--seed", 7, "--out", tmp_path / name]) == 0
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_seed_changes_output(cfg_path, tmp_path):
    _run(["--config", cfg_path, "--seed", 1, "--out", tmp_path / "a"])
    _run(["--config", cfg_path, "--seed", 2, "--out", tmp_path / "b"])
    assert (tmp_path / "a" / "results.csv").read_bytes() != (tmp_path / "b" / "results.csv").read_bytes()


def test_bits_sweep_plot_has_five_curves(cfg_path, tmp_path):
    pytest.importorskip("matplotlib")
    from dpa_hybrid.cli import plot_curves
    from dpa_hybrid.evaluation import run_experiment

    res = run_experiment(parse_config(cfg_path), "bits_sweep")
    assert plot_curves(res, tmp_path / "p.svg") == 5
    assert (tmp_path / "p.svg").read_text().lstrip().startswith("<?xml")
    assert _run(["--config", cfg_path, "--scenario", "bits_sweep", "--out", tmp_path / "o", "--plot"]) == 0
    assert (tmp_path / "o" / "bits_sweep.svg").exists()


def test_dump_channels(cfg_path, tmp_path):
    assert _run(["--config", cfg_path, "--out", tmp_path, "--dump-channels"]) == 0
    assert sorted(p.name for p in (tmp_path / "channels").iterdir()) == ["trial00000.txt", "trial00001.txt"]


def test_missing_config_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_bad_flag(cfg_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--config", str(cfg_path), "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_bad_scenario(cfg_path):
    with pytest.raises(SystemExit) as exc:
        main(["--config", str(cfg_path), "--scenario", "other"])
    assert exc.value.code == 2


def test_invalid_config_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text(CFG.replace("N_s = 2", "N_s = 3"))
    assert _run(["--config", p, "--out", tmp_path]) == 1
    assert "streams exceed RF chains" in capsys.readouterr().err


def test_missing_file_exit_1(tmp_path, capsys):
    assert _run(["--config", tmp_path / "none.cfg", "--out", tmp_path]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_module_entry_point(cfg_path, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dpa_hybrid", "--config", str(cfg_path), "--out", str(tmp_path),
                           "--scenario", "snr_sweep", "-q"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "results.csv").exists()
