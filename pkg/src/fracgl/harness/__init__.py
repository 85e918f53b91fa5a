from .config import (
    ExperimentConfig,
    BENCHMARK_PAIRS,
    dump_config,
    load_config,
    parse_config,
    preset_config,
)
from .diagnostics import dump_diagnostics, run_config, single_run
from .plots import emit_plots
from .sweep import TableArtifact, run_sweep, solve

__all__ = [
    "ExperimentConfig",
    "BENCHMARK_PAIRS",
    "TableArtifact",
    "dump_config",
    "dump_diagnostics",
    "emit_plots",
    "load_config",
    "parse_config",
    "preset_config",
    "run_config",
    "run_sweep",
    "single_run",
    "solve",
]
