"""Experiment configuration: strict TOML ingestion, environment overrides,
and a canonical hash for reproducibility tracking.

Config files have four sections -- [problem], [numerics], [analysis],
[output] -- plus an optional top-level integer key `seed`.  Unknown keys
are errors, not warnings: a silently ignored typo in a sweep config wastes
hours of compute.  Every key can be overridden from the environment as
DECAYLAB_<SECTION>__<KEY> (DECAYLAB_SEED for the root seed); values are
parsed as TOML literals, with a bare-string fallback so that
DECAYLAB_PROBLEM__DATUM=sine works without quoting.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field, fields, replace
from typing import Optional

try:
    import tomllib
except ImportError:
    import tomli as tomllib

__all__ = [
    "ConfigError",
    "ProblemConfig",
    "NumericsConfig",
    "AnalysisConfig",
    "OutputConfig",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "canonical_text",
    "config_hash",
]

_ENV_PREFIX = "DECAYLAB_"
_BOUND_KINDS = (
    "nondeg-master",
    "l2-remark",
    "exp-regime",
    "subexp-regime",
    "poly-critical",
    "cauchy-kernel",
    "degenerate-master",
)
_DATUM_RE = re.compile(r"^(sine|bump|eigen:[1-9][0-9]*|file:.+)$")


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


@dataclass(frozen=True)
class ProblemConfig:
    alpha: float = 0.0
    a: float = 1.0
    L0: float = 1.0
    k: float = 1.0
    gamma: float = 0.5
    datum: str = "sine"


@dataclass(frozen=True)
class NumericsConfig:
    N: int = 256
    grading: Optional[float] = None
    theta: float = 0.5
    time_grid: str = "auto"
    t_max: float = 100.0
    steps: int = 2000
    drift: str = "upwind"
    stop_floor: float = 0.0
    max_snapshots: int = 200


@dataclass(frozen=True)
class AnalysisConfig:
    bounds: tuple = ()
    rho: Optional[float] = None
    epsilon: Optional[float] = None
    bound_t0: Optional[float] = None
    slack: float = 0.05
    classify: bool = True
    window_decades: float = 2.0
    eigen_count: int = 3
    sweep_alphas: tuple = (0.0, 0.25, 0.5)
    sweep_gammas: tuple = (-1.0, 0.25, 0.9)
    min_agree_fraction: float = 0.85


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs"
    formats: tuple = ("csv",)


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 20260401

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=int(seed))


_SECTIONS = {
    "problem": ProblemConfig,
    "numerics": NumericsConfig,
    "analysis": AnalysisConfig,
    "output": OutputConfig,
}

# (accepted input types, conversion) per leaf type; tuples arrive as lists
_FLOAT_OK = (int, float)


def _coerce(section: str, key: str, value, target_type) -> object:
    name = f"{section}.{key}" if section else key
    if target_type is float or target_type == Optional[float]:
        if value is None and target_type == Optional[float]:
            return None
        if isinstance(value, bool) or not isinstance(value, _FLOAT_OK):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return int(value)
    if target_type is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be a boolean, got {value!r}")
        return value
    if target_type is str:
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    if target_type is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{name} must be an array, got {value!r}")
        return tuple(value)
    raise ConfigError(f"{name}: unsupported config field type {target_type}")


def _build_section(section: str, cls, data: dict):
    spec_fields = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(spec_fields)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {section}.{key}")
    kwargs = {}
    for key, value in data.items():
        fld = spec_fields[key]
        target = fld.type
        if isinstance(target, str):
            target = {"float": float, "int": int, "bool": bool, "str": str,
                      "tuple": tuple, "Optional[float]": Optional[float]}[target]
        kwargs[key] = _coerce(section, key, value, target)
    return cls(**kwargs)


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    p, n, a = cfg.problem, cfg.numerics, cfg.analysis
    if not (0.0 <= p.alpha < 1.0):
        raise ConfigError(f"problem.alpha must lie in [0, 1), got {p.alpha}")
    for key in ("a", "L0", "k"):
        if not getattr(p, key) > 0:
            raise ConfigError(f"problem.{key} must be positive")
    if not _DATUM_RE.match(p.datum):
        raise ConfigError(
            f"problem.datum must be sine, bump, eigen:<n>, or file:<path>, "
            f"got {p.datum!r}")
    if n.N < 4:
        raise ConfigError("numerics.N must be at least 4")
    if n.grading is not None and n.grading < 1.0:
        raise ConfigError("numerics.grading must be >= 1")
    if not 0.0 <= n.theta <= 1.0:
        raise ConfigError("numerics.theta must lie in [0, 1]")
    if n.time_grid not in ("uniform", "geometric", "auto", "sclock"):
        raise ConfigError(f"numerics.time_grid must be uniform, geometric, "
                          f"auto, or sclock, got {n.time_grid!r}")
    if not n.t_max > 0:
        raise ConfigError("numerics.t_max must be positive")
    if n.steps < 1:
        raise ConfigError("numerics.steps must be positive")
    if n.drift not in ("upwind", "centered"):
        raise ConfigError(f"numerics.drift must be upwind or centered, "
                          f"got {n.drift!r}")
    if n.stop_floor < 0:
        raise ConfigError("numerics.stop_floor must be nonnegative")
    if n.max_snapshots < 2:
        raise ConfigError("numerics.max_snapshots must be at least 2")
    for kind in a.bounds:
        if kind not in _BOUND_KINDS:
            raise ConfigError(
                f"analysis.bounds entry {kind!r} is not one of "
                f"{', '.join(_BOUND_KINDS)}")
    if a.rho is not None and not a.rho > 0:
        raise ConfigError("analysis.rho must be positive")
    if a.epsilon is not None and not a.epsilon > 0:
        raise ConfigError("analysis.epsilon must be positive")
    if a.bound_t0 is not None and a.bound_t0 < 0:
        raise ConfigError("analysis.bound_t0 must be nonnegative")
    if a.slack < 0:
        raise ConfigError("analysis.slack must be nonnegative")
    if not a.window_decades > 0:
        raise ConfigError("analysis.window_decades must be positive")
    if a.eigen_count < 1:
        raise ConfigError("analysis.eigen_count must be positive")
    if not 0.0 <= a.min_agree_fraction <= 1.0:
        raise ConfigError("analysis.min_agree_fraction must lie in [0, 1]")
    for g in a.sweep_gammas:
        if isinstance(g, str):
            txt = g.strip()
            if txt != "crit" and not txt.endswith("*crit"):
                raise ConfigError(
                    f"analysis.sweep_gammas entry {g!r} must be a number, "
                    f"'crit', or '<factor>*crit'")
            if txt.endswith("*crit") and txt != "crit":
                try:
                    float(txt[:-5])
                except ValueError:
                    raise ConfigError(
                        f"analysis.sweep_gammas entry {g!r} has a malformed "
                        f"factor") from None
        elif isinstance(g, bool) or not isinstance(g, _FLOAT_OK):
            raise ConfigError(
                f"analysis.sweep_gammas entry {g!r} must be a number or "
                f"a crit expression")
    for al in a.sweep_alphas:
        if isinstance(al, bool) or not isinstance(al, _FLOAT_OK):
            raise ConfigError(f"analysis.sweep_alphas entry {al!r} must be "
                              f"a number")
        if not (0.0 <= al < 1.0):
            raise ConfigError(f"analysis.sweep_alphas entry {al} must lie "
                              f"in [0, 1)")
    for fmt in cfg.output.formats:
        if fmt not in ("csv", "svg"):
            raise ConfigError(f"output.formats entry {fmt!r} must be csv or svg")
    if "csv" not in cfg.output.formats:
        raise ConfigError("output.formats must include csv")
    return cfg


def _env_overrides(environ=None) -> dict:
    """Nested {section: {key: value}} dict from DECAYLAB_* variables."""
    environ = os.environ if environ is None else environ
    out: dict = {}
    for name, raw in environ.items():
        if not name.startswith(_ENV_PREFIX):
            continue
        rest = name[len(_ENV_PREFIX):].lower()
        try:
            parsed = tomllib.loads(f"v = {raw}")["v"]
        except tomllib.TOMLDecodeError:
            parsed = raw
        if rest == "seed":
            out["seed"] = parsed
            continue
        if "__" not in rest:
            raise ConfigError(
                f"environment override {name} must look like "
                f"{_ENV_PREFIX}<SECTION>__<KEY>")
        section, key = rest.split("__", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"environment override {name}: unknown section "
                              f"{section!r}")
        out.setdefault(section, {})[key] = parsed
    return out


def parse_config(text: str, environ=None, apply_env: bool = True) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    if apply_env:
        for section, over in _env_overrides(environ).items():
            if section == "seed":
                data["seed"] = over
            else:
                data.setdefault(section, {}).update(over)
    unknown = set(data) - set(_SECTIONS) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown section [{sorted(unknown)[0]}]")
    sections = {}
    for name, cls in _SECTIONS.items():
        block = data.get(name, {})
        if not isinstance(block, dict):
            raise ConfigError(f"[{name}] must be a table")
        sections[name] = _build_section(name, cls, block)
    seed = data.get("seed", ExperimentConfig.seed)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    return _validate(ExperimentConfig(seed=seed, **sections))


def load_config(path, environ=None, apply_env: bool = True) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, environ=environ, apply_env=apply_env)


def _toml_literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, tuple):
        return "[" + ", ".join(_toml_literal(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def canonical_text(cfg: ExperimentConfig) -> str:
    """Deterministic TOML rendering of the fully resolved config.  Two
    configs hash equal iff every resolved field matches."""
    lines = [f"seed = {cfg.seed}"]
    for section in sorted(_SECTIONS):
        lines.append("")
        lines.append(f"[{section}]")
        obj = getattr(cfg, section)
        for f in sorted(fields(obj), key=lambda f: f.name):
            value = getattr(obj, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_toml_literal(value)}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_text(cfg).encode("utf-8")).hexdigest()[:16]
