"""Experiment configuration: YAML schema, presets and validation.

Example (all keys optional except ``preset``)::

    schema_version: 1
    preset: example1          # example1 | example2 | custom
    mode: temporal            # temporal | spatial | single
    pairs: [[1.5, 1.5], [1.2, 1.9]]
    m_values: [16, 64, 256]
    n_values: [128]
    ranks: [1, 3, 5, full]
    reference: {n_ref: 128, m_ref: 4096}
    seed: 0
    out: results
    params: {gamma: 0.5}      # overrides of the preset coefficients
    initial: {kind: rank_r, rank: 5}   # custom preset only
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from ..exceptions import ConfigError, ParameterDomainError
from ..fracgrid import FglParams, InitialCondition
from ..problems import PRESETS

SCHEMA_VERSION = 1
BENCHMARK_PAIRS = [(1.2, 1.9), (1.5, 1.5), (1.7, 1.3), (1.9, 1.2)]
MODES = ("temporal", "spatial", "single")
FULL = "full"

_PRESET_DEFAULTS = {
    ("example1", "temporal"): dict(
        n_values=[128], m_values=[16, 64, 256], ranks=[1, 2, 3, 4, 5], n_ref=128, m_ref=4096
    ),
    ("example1", "spatial"): dict(
        n_values=[16, 32, 64, 128], m_values=[2048], ranks=[1, 2, 3, 4, 5], n_ref=256, m_ref=2048
    ),
    ("example1", "single"): dict(n_values=[128], m_values=[256], ranks=[5], n_ref=None, m_ref=None),
    ("example2", "temporal"): dict(
        n_values=[128], m_values=[16, 64, 256], ranks=[1, 2, 4, 6, 8], n_ref=128, m_ref=4096
    ),
    ("example2", "spatial"): dict(
        n_values=[16, 32, 64, 128], m_values=[2048], ranks=[1, 2, 4, 6, 8], n_ref=256, m_ref=2048
    ),
    ("example2", "single"): dict(n_values=[128], m_values=[256], ranks=[8], n_ref=None, m_ref=None),
}
_PARAM_KEYS = ("nu", "eta", "kappa", "xi", "gamma", "domain", "t_final")
_TOP_KEYS = {
    "schema_version", "preset", "mode", "pairs", "m_values", "n_values", "ranks",
    "reference", "seed", "out", "params", "initial", "threads", "backend", "rk4_substeps",
}


@dataclass
class ExperimentConfig:
    preset: str = "example1"
    mode: str = "temporal"
    pairs: list = field(default_factory=lambda: list(BENCHMARK_PAIRS))
    m_values: list = field(default_factory=list)
    n_values: list = field(default_factory=list)
    ranks: list = field(default_factory=list)
    n_ref: int | None = None
    m_ref: int | None = None
    seed: int = 0
    out: str = "results"
    params: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    threads: int = 1
    backend: str = "auto"
    rk4_substeps: int = 1
    schema_version: int = SCHEMA_VERSION

    def model_params(self, alpha, beta):
        """FglParams for one ``(alpha, beta)`` pair."""
        overrides = {k: v for k, v in self.params.items() if k in _PARAM_KEYS}
        if "domain" in overrides:
            overrides["domain"] = tuple(overrides["domain"])
        if self.preset == "custom":
            ic = dict(self.initial)
            kind = ic.pop("kind", "rank_r")
            ic.setdefault("seed", self.seed)
            return FglParams(
                alpha=alpha, beta=beta, initial_condition=InitialCondition(kind, **ic),
                **overrides,
            )
        return PRESETS[self.preset](alpha, beta, **overrides)

    def to_dict(self):
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        d["reference"] = {"n_ref": d.pop("n_ref"), "m_ref": d.pop("m_ref")}
        return d


def preset_config(preset="example1", mode="temporal", **overrides):
    """Config filled with the desk-scale defaults of ``preset``/``mode``."""
    cfg = ExperimentConfig(preset=preset, mode=mode)
    defaults = _PRESET_DEFAULTS.get((preset if preset != "custom" else "example1", mode))
    if defaults is None:
        raise ConfigError(f"no defaults for preset {preset!r} in mode {mode!r}")
    for key, value in defaults.items():
        setattr(cfg, key, list(value) if isinstance(value, list) else value)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    validate(cfg)
    return cfg


def _key_lines(text):
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def _rank_value(r, where):
    if r == FULL:
        return FULL
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise ConfigError(f"{where}: ranks must be positive integers or 'full', got {r!r}")
    return r


def _sorted_positive(values, name):
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise ConfigError(f"{name} must hold positive integers, got {v!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} must be sorted strictly ascending, got {values}")


def validate(cfg, lines=None):
    """Raise ConfigError (with the offending line when known) on invalid input."""
    lines = lines or {}

    def fail(key, msg):
        raise ConfigError(msg, line=lines.get(key))

    if cfg.schema_version != SCHEMA_VERSION:
        fail("schema_version", f"unsupported schema_version {cfg.schema_version}")
    if cfg.preset not in (*PRESETS, "custom"):
        fail("preset", f"unknown preset {cfg.preset!r}")
    if cfg.mode not in MODES:
        fail("mode", f"mode must be one of {MODES}, got {cfg.mode!r}")
    for key in ("m_values", "n_values"):
        try:
            _sorted_positive(getattr(cfg, key), key)
        except ConfigError as exc:
            fail(key, str(exc))
    if not isinstance(cfg.ranks, list) or not cfg.ranks:
        fail("ranks", "ranks must be a non-empty list")
    try:
        cfg.ranks = [_rank_value(r, "ranks") for r in cfg.ranks]
    except ConfigError as exc:
        fail("ranks", str(exc))
    numeric = [r for r in cfg.ranks if r != FULL]
    if numeric != sorted(set(numeric)):
        fail("ranks", f"ranks must be sorted ascending without repeats, got {cfg.ranks}")
    if min(cfg.n_values) < 4:
        fail("n_values", "grids need at least 4 intervals")
    if numeric and max(numeric) > min(cfg.n_values) - 1:
        fail("ranks", f"rank {max(numeric)} exceeds matrix size {min(cfg.n_values) - 1}")
    if not isinstance(cfg.pairs, list) or not cfg.pairs:
        fail("pairs", "pairs must be a non-empty list of [alpha, beta]")
    pairs = []
    for p in cfg.pairs:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            fail("pairs", f"each pair must be [alpha, beta], got {p!r}")
        pairs.append((float(p[0]), float(p[1])))
    cfg.pairs = pairs
    if isinstance(cfg.threads, bool) or not isinstance(cfg.threads, int) or cfg.threads < 1:
        fail("threads", "threads must be a positive integer")
    if cfg.mode == "temporal":
        if len(cfg.n_values) != 1:
            fail("n_values", "temporal sweeps fix a single N")
        if cfg.n_ref is None or cfg.m_ref is None:
            fail("reference", "temporal sweeps need reference n_ref and m_ref")
        if cfg.n_ref % cfg.n_values[0]:
            fail("reference", "n_ref must be a multiple of N")
        if cfg.m_ref < 16 * max(cfg.m_values):
            fail("reference", "m_ref must be at least 16 times the largest M")
    elif cfg.mode == "spatial":
        if len(cfg.m_values) != 1:
            fail("m_values", "spatial sweeps fix a single M")
        if cfg.n_ref is None or cfg.m_ref is None:
            fail("reference", "spatial sweeps need reference n_ref and m_ref")
        if any(cfg.n_ref % n for n in cfg.n_values) or cfg.n_ref <= max(cfg.n_values):
            fail("reference", "n_ref must be a strict multiple of every N")
    try:
        for a, b in cfg.pairs:
            cfg.model_params(a, b)
    except (ParameterDomainError, TypeError, ValueError) as exc:
        fail("pairs" if "alpha" in str(exc) or "beta" in str(exc) else "params", str(exc))
    return cfg


def parse_config(text, *, preset=None, seed=None, out=None, threads=None):
    """Parse YAML text into a validated ExperimentConfig.

    Keyword arguments override values from the text (CLI flags).
    """
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML parse error: {exc}", line=mark.line + 1 if mark else None)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    lines = _key_lines(text)
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", line=lines.get(key))
    chosen = preset or raw.get("preset", "example1")
    mode = raw.get("mode", "temporal")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}", line=lines.get("mode"))
    base = "example1" if chosen == "custom" else chosen
    defaults = _PRESET_DEFAULTS.get((base, mode))
    if defaults is None:
        raise ConfigError(f"unknown preset {chosen!r}", line=lines.get("preset"))
    cfg = ExperimentConfig(preset=chosen, mode=mode)
    for key, value in defaults.items():
        setattr(cfg, key, list(value) if isinstance(value, list) else value)
    for key in ("pairs", "m_values", "n_values", "ranks", "seed", "out", "params",
                "initial", "threads", "backend", "rk4_substeps", "schema_version"):
        if key in raw:
            setattr(cfg, key, raw[key])
    ref = raw.get("reference")
    if ref is not None:
        if not isinstance(ref, dict) or set(ref) - {"n_ref", "m_ref"}:
            raise ConfigError("reference must be {n_ref, m_ref}", line=lines.get("reference"))
        cfg.n_ref = ref.get("n_ref", cfg.n_ref)
        cfg.m_ref = ref.get("m_ref", cfg.m_ref)
    for key, value in (("seed", seed), ("out", out), ("threads", threads)):
        if value is not None:
            setattr(cfg, key, value)
    return validate(cfg, lines)


def load_config(path, **overrides):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, **overrides)


def dump_config(cfg):
    """YAML text that parses back to an equal config."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)
