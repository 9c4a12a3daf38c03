"""Hybrid precoding for wideband distributed phased arrays.

Alternating minimization between closed-form RF phase updates and a
per-subcarrier ADMM baseband solver on the power sphere.
"""

from .admm import (AdmmReport, RealLiftedSystem, admm_solve, build_real_system, closed_form_baseband,
                   solve_baseband, sphere_ls_oracle)
from .altmin import HybridPrecoder, hybrid_precode, objective
from .channel import (ChannelSet, array_response, corrupt_csi, dump_channels, generate_channels,
                      load_channels, subarray_channel)
from .config import SystemConfig, format_config, parse_config
from .errors import (ConfigError, ContractError, DegenerateChannelError, DegenerateProjectionError, DomainError,
                     DpaError, InvalidDimensionError, StructureError)
from .evaluation import ExperimentResult, complexity_probe, run_experiment, spectral_efficiency
from .rf import RfPhases, assemble_rf, optimal_phases, quantize, quantize_phase
from .target import PrecoderTarget, build_target, water_filling

__version__ = "0.1.0"

__all__ = [
    "AdmmReport", "ChannelSet", "ConfigError", "ContractError", "DegenerateChannelError",
    "DegenerateProjectionError", "DomainError", "DpaError", "ExperimentResult", "HybridPrecoder",
    "InvalidDimensionError", "PrecoderTarget", "RealLiftedSystem", "RfPhases", "StructureError",
    "SystemConfig", "admm_solve", "array_response", "assemble_rf", "build_real_system", "build_target",
    "closed_form_baseband", "complexity_probe", "corrupt_csi", "dump_channels", "format_config",
    "generate_channels", "hybrid_precode", "load_channels", "objective", "optimal_phases", "parse_config",
    "quantize", "quantize_phase", "run_experiment", "solve_baseband", "spectral_efficiency",
    "sphere_ls_oracle", "subarray_channel", "water_filling",
]
