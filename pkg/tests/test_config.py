import pytest

from dpa_hybrid.config import SystemConfig, format_config, parse_config
from dpa_hybrid.errors import ConfigError

BASE = "M_t = 4\nN_t_sub = 8\nN_r = 8\nK = 32\nN_s = 2\n"


def test_minimal_defaults():
    cfg = parse_config(BASE)
    assert (cfg.M_t, cfg.N_t_sub, cfg.N_r, cfg.K, cfg.N_s) == (4, 8, 8, 32, 2)
    assert cfg.N_cl == 5 and cfg.N_ray == 10 and cfg.angular_spread_deg == 10.0
    assert cfg.rho == 1.0 and cfg.eps_p == cfg.eps_d == 1e-6
    assert cfg.P == 2.0 and cfg.d_e_over_lambda == 0.5
    assert cfg.admm_max_iters == 10_000 and cfg.N_t_tot == 32


def test_file(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\n" + BASE + "bits = 1, 2, inf  # trailing\nantenna_grid = 8x8, 16X16\n")
    cfg = parse_config(str(p))
    assert cfg.bits == (1, 2, None)
    assert cfg.antenna_grid == ((8, 8), (16, 16))


def test_streams_exceed_rf_chains():
    with pytest.raises(ConfigError, match="streams exceed RF chains"):
        parse_config("M_t = 2\nN_t_sub = 8\nN_r = 8\nK = 4\nN_s = 3\n")


def test_duplicate_key_line_number():
    with pytest.raises(ConfigError, match=r"line 4: duplicate key 'K'"):
        parse_config("M_t = 2\nN_t_sub = 8\nK = 4\nK = 5\nN_r = 8\nN_s = 1\n")


@pytest.mark.parametrize("extra, match", [
    ("foo = 1\n", "unknown key"),
    ("xi = 1.5\n", "xi"),
    ("bits = 0\n", "bits"),
    ("rho = -1\n", "rho"),
    ("eps_p = 0\n", "eps_p"),
    ("trials = 0\n", "trials"),
    ("K = x\n", "K: cannot parse"),
    ("admm_variant = odd\n", "admm_variant"),
    ("[section]\nM_t = 1\n", "sections"),
])
def test_rejections(extra, match):
    text = BASE.replace("K = 32\n", "") + ("K = 32\n" if not extra.startswith("K ") else "") + extra
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_missing_required():
    with pytest.raises(ConfigError, match="missing required keys: K"):
        parse_config("M_t = 4\nN_t_sub = 8\nN_r = 8\nN_s = 2\n")


def test_streams_exceed_receive():
    with pytest.raises(ConfigError, match="N_s"):
        SystemConfig(M_t=4, N_t_sub=2, N_r=1, N_s=2, K=1)


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config("/nonexistent/file.cfg")


def test_round_trip():
    cfg = parse_config(BASE + "bits = 1, inf\nxi = 0.5, 1.0\nantenna_grid = 4x4\nseed = 99\nwarm_start = true\n")
    assert parse_config(format_config(cfg)) == cfg
    plain = parse_config(BASE)
    assert parse_config(format_config(plain)) == plain


def test_digest_ignores_out_dir():
    a = parse_config(BASE)
    assert a.digest() == a.replace(out_dir="elsewhere").digest()
    assert a.digest() != a.replace(seed=1).digest()


def test_altmin_options():
    opts = parse_config(BASE + "rho = 2.5\nadmm_variant = verbatim\n").altmin_options()
    assert opts["rho"] == 2.5 and opts["variant"] == "verbatim" and "bits" not in opts
