"""System configuration: flat ``key = value`` files.

Example::

    # four subarrays, 32 subcarriers
    M_t = 4
    N_t_sub = 8
    N_r = 8
    K = 32
    N_s = 2
    snr_grid_db = -10, -5, 0, 5, 10
    bits = 1, 2, 3, 4, inf

Lists are comma-separated, ``inf`` means continuous phase shifters, ``#``
starts a comment, and ``antenna_grid`` entries are written ``N_t_sub x N_r``.
Unknown or repeated keys are errors.
"""

import configparser
import dataclasses
import hashlib
import math
import os
from dataclasses import dataclass

from .errors import ConfigError

REQUIRED = ("M_t", "N_t_sub", "N_r", "N_s", "K")
SCENARIOS = ("snr_sweep", "bits_sweep", "csi_sweep")


@dataclass(frozen=True)
class SystemConfig:
    M_t: int
    N_t_sub: int
    N_r: int
    N_s: int
    K: int
    N_cl: int = 5
    N_ray: int = 10
    angular_spread_deg: float = 10.0
    d_e_over_lambda: float = 0.5
    P: float | None = None
    snr_grid_db: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0)
    trials: int = 100
    bits: tuple = (None,)
    xi: tuple = (1.0,)
    antenna_grid: tuple = ()
    rho: float = 1.0
    eps_p: float = 1e-6
    eps_d: float = 1e-6
    admm_max_iters: int = 10_000
    admm_variant: str = "derived"
    warm_start: bool = False
    outer_tol: float = 1e-4
    outer_max_iters: int = 50
    quantize_in_loop: bool = True
    waterfill_noise: str = "scaled"
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        if self.P is None:
            object.__setattr__(self, "P", float(self.N_s))
        for name in ("snr_grid_db", "bits", "xi", "antenna_grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        validate(self)

    @property
    def N_t_tot(self):
        return self.M_t * self.N_t_sub

    @property
    def angular_spread(self):
        return math.radians(self.angular_spread_deg)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def altmin_options(self):
        """Keyword arguments for :func:`dpa_hybrid.altmin.hybrid_precode` (minus ``bits``)."""
        return dict(rho=self.rho, eps_p=self.eps_p, eps_d=self.eps_d,
                    admm_max_iters=self.admm_max_iters, outer_tol=self.outer_tol,
                    outer_max_iters=self.outer_max_iters, quantize_in_loop=self.quantize_in_loop,
                    variant=self.admm_variant, warm_start=self.warm_start)

    def digest(self):
        """Short hash of everything that affects numerical output."""
        text = format_config(self.replace(out_dir=""))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _fail(name, msg):
    raise ConfigError(f"{name}: {msg}")


def validate(cfg):
    for name in ("M_t", "N_t_sub", "N_r", "N_s", "K", "N_cl", "N_ray", "trials",
                 "admm_max_iters", "outer_max_iters"):
        v = getattr(cfg, name)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            _fail(name, f"must be a positive integer, got {v!r}")
    if cfg.N_s > cfg.M_t:
        _fail("N_s", f"streams exceed RF chains (N_s={cfg.N_s} > M_t={cfg.M_t})")
    if cfg.N_s > cfg.N_r:
        _fail("N_s", f"streams exceed receive antennas (N_s={cfg.N_s} > N_r={cfg.N_r})")
    for name in ("angular_spread_deg", "d_e_over_lambda", "P", "rho", "eps_p", "eps_d", "outer_tol"):
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
            _fail(name, f"must be a positive finite number, got {v!r}")
    if not cfg.snr_grid_db:
        _fail("snr_grid_db", "must not be empty")
    if not cfg.bits:
        _fail("bits", "must not be empty")
    for b in cfg.bits:
        if b is not None and (not isinstance(b, int) or b < 1):
            _fail("bits", f"entries must be positive integers or inf, got {b!r}")
    if not cfg.xi:
        _fail("xi", "must not be empty")
    for x in cfg.xi:
        if not 0.0 <= x <= 1.0:
            _fail("xi", f"CSI accuracy must lie in [0, 1], got {x!r}")
    for n_sub, n_r in cfg.antenna_grid:
        if n_sub < 1 or n_r < cfg.N_s:
            _fail("antenna_grid", f"entry {n_sub}x{n_r} is invalid for N_s={cfg.N_s}")
    if cfg.admm_variant not in ("derived", "verbatim"):
        _fail("admm_variant", "must be 'derived' or 'verbatim'")
    if cfg.waterfill_noise not in ("scaled", "raw"):
        _fail("waterfill_noise", "must be 'scaled' or 'raw'")
    if not 0 <= cfg.seed < 2**64:
        _fail("seed", "must be an unsigned 64-bit integer")


def _parse_bool(s):
    low = s.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_bits(s):
    s = s.strip().lower()
    return None if s in ("inf", "infinite", "none") else int(s)


def _parse_antenna(s):
    n_sub, n_r = s.lower().split("x")
    return int(n_sub), int(n_r)


def _split(s):
    return [t.strip() for t in s.split(",") if t.strip()]


def _parse_int(s):
    return int(s, 0)


PARSERS = {
    "snr_grid_db": lambda s: tuple(float(t) for t in _split(s)),
    "bits": lambda s: tuple(_parse_bits(t) for t in _split(s)),
    "xi": lambda s: tuple(float(t) for t in _split(s)),
    "antenna_grid": lambda s: tuple(_parse_antenna(t) for t in _split(s)),
    "warm_start": _parse_bool,
    "quantize_in_loop": _parse_bool,
    "admm_variant": str.strip,
    "waterfill_noise": str.strip,
    "out_dir": str.strip,
}
for _name in ("M_t", "N_t_sub", "N_r", "N_s", "K", "N_cl", "N_ray", "trials", "admm_max_iters",
              "outer_max_iters", "seed"):
    PARSERS[_name] = _parse_int
for _name in ("angular_spread_deg", "d_e_over_lambda", "P", "rho", "eps_p", "eps_d", "outer_tol"):
    PARSERS[_name] = float

_SECTION = "config"


def parse_config(source):
    """Parse a config file path, or the config text itself, into a :class:`SystemConfig`.

    A string containing ``=`` or a newline is treated as config text.
    """
    if isinstance(source, os.PathLike) or ("=" not in source and "\n" not in source):
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    else:
        text = source

    cp = configparser.ConfigParser(strict=True, interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                   default_section="__defaults__")
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n" + text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"line {exc.lineno - 1}: duplicate key {exc.option!r}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if cp.sections() != [_SECTION]:
        raise ConfigError("config must be flat key = value pairs without [sections]")

    values = {}
    for key, raw in cp.items(_SECTION):
        if key not in PARSERS:
            raise ConfigError(f"unknown key {key!r}")
        try:
            values[key] = PARSERS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from exc
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return SystemConfig(**values)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "inf"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{a}x{b}" for a, b in value)
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def format_config(cfg):
    """Render every field so that ``parse_config(format_config(cfg)) == cfg``."""
    lines = []
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "antenna_grid" and not value:
            lines.append("# antenna_grid =  (empty: use N_t_sub x N_r)")
            continue
        lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
