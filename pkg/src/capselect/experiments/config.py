"""Experiment configuration, presets and the flat ``key = value`` file format."""
from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..quadrature import format_number, required_bandwidth


def log_grid(lo_exp: float, hi_exp: float, count: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.logspace(lo_exp, hi_exp, count))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run.

    ``cap_exactness`` and ``sphere_bandwidth`` default (when ``None``) to the
    smallest values that keep every quadrature exact for the kernel degree
    plus the truth degree.
    """

    scenario: str = "custom"
    truth_source: str = "random"
    truth_path: str | None = None
    truth_degree: int = 30
    decay_exponent: float = 2.0
    truth_seed: int = 0
    r: float = 6371.0
    R: float = 12371.0
    rho: float = 1.0
    deg_sat: int = 40
    deg_ground: int = 40
    cap_exactness: int | None = None
    sphere_bandwidth: int | None = None
    sphere_style: str = "equiangular"
    eps1: float = 0.001
    eps2: float = 0.001
    noise_seed: int = 0
    alpha_grid: tuple[float, ...] = log_grid(1, 8, 3)
    alpha_tilde_grid: tuple[float, ...] = log_grid(1, 8, 3)
    beta_grid: tuple[float, ...] = log_grid(-2, 3, 3)
    selection_tol: float = 1e-12
    n_jobs: int = 1
    output_dir: str | None = None

    def __post_init__(self):
        for name in ("alpha_grid", "alpha_tilde_grid", "beta_grid"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        if self.truth_source not in ("random", "egm2008"):
            raise ConfigError(f"unknown truth_source {self.truth_source!r}")
        if self.truth_source == "egm2008" and not self.truth_path:
            raise ConfigError("truth_source = egm2008 requires truth_path")
        if not (self.alpha_grid and self.alpha_tilde_grid and self.beta_grid):
            raise ConfigError("parameter grids must be non-empty")
        if min(self.alpha_grid + self.alpha_tilde_grid) <= 0 or min(self.beta_grid) < 0:
            raise ConfigError("need alpha, alpha_tilde > 0 and beta >= 0")
        if not 0 < self.r < self.R:
            raise ConfigError("need 0 < r < R")
        if not 0 < self.rho < 2:
            raise ConfigError("rho must lie in (0, 2)")
        if not 0 <= self.deg_sat <= self.deg_ground:
            raise ConfigError("need 0 <= deg_sat <= deg_ground")
        if self.truth_degree < 0 or self.eps1 < 0 or self.eps2 < 0:
            raise ConfigError("truth_degree and noise levels must be non-negative")
        if self.sphere_style not in ("equiangular", "gauss_legendre"):
            raise ConfigError(f"unknown sphere_style {self.sphere_style!r}")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be >= 1")

    @property
    def n_candidates(self) -> int:
        return len(self.alpha_grid) * len(self.alpha_tilde_grid) * len(self.beta_grid)

    @property
    def required_cap_exactness(self) -> int:
        return self.deg_ground + self.truth_degree

    @property
    def cap_degree(self) -> int:
        return self.required_cap_exactness if self.cap_exactness is None else self.cap_exactness

    @property
    def bandwidth(self) -> int:
        if self.sphere_bandwidth is not None:
            return self.sphere_bandwidth
        return required_bandwidth(self.deg_sat + self.truth_degree)

    @property
    def certified(self) -> bool:
        return self.cap_degree >= self.required_cap_exactness

    def parameter_triples(self) -> list[tuple[float, float, float]]:
        """Grid in fixed order: alpha outermost, beta innermost."""
        return [(a, at, b) for a in self.alpha_grid for at in self.alpha_tilde_grid
                for b in self.beta_grid]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        try:
            return replace(self, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    # ------------------------------------------------------------------
    # flat text form
    # ------------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                text = "none"
            elif isinstance(v, tuple):
                text = ", ".join(format_number(x) for x in v)
            elif isinstance(v, str):
                text = v
            else:
                text = format_number(v)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_LOGSPACE = re.compile(r"logspace\(\s*([-+.\deE]+)\s*,\s*([-+.\deE]+)\s*,\s*(\d+)\s*\)$")


def parse_value(key: str, text: str):
    """Convert the textual value of ``key`` to its field type."""
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _FIELD_TYPES[key]
    text = text.strip()
    try:
        if text.lower() == "none" and "None" in kind:
            return None
        if kind.startswith("tuple"):
            m = _LOGSPACE.match(text)
            if m:
                return log_grid(float(m.group(1)), float(m.group(2)), int(m.group(3)))
            return tuple(float(x) for x in text.split(",") if x.strip())
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = parse_value(key, value)
    return values


PRESETS: dict[str, ExperimentConfig] = {
    # low-degree setting: R = 12371 km, rho = 1, truth degree 30, N_k = M_k = 80
    "case1": ExperimentConfig(
        scenario="case1", truth_degree=30, decay_exponent=2.0, R=12371.0, rho=1.0,
        deg_sat=80, deg_ground=80, cap_exactness=110,
        alpha_grid=log_grid(1, 8, 5), alpha_tilde_grid=log_grid(1, 8, 5),
        beta_grid=log_grid(-2, 3, 4)),
    "case1-small": ExperimentConfig(
        scenario="case1-small", truth_degree=30, decay_exponent=2.0, R=12371.0, rho=1.0,
        deg_sat=40, deg_ground=40, cap_exactness=70,
        alpha_grid=log_grid(1, 8, 3), alpha_tilde_grid=log_grid(1, 8, 3),
        beta_grid=log_grid(-2, 3, 3)),
    # flat random spectrum on a cap rule exact only to degree 90 (110 required)
    "case1-degraded": ExperimentConfig(
        scenario="case1-degraded", truth_degree=30, decay_exponent=0.0, R=12371.0, rho=1.0,
        deg_sat=80, deg_ground=80, cap_exactness=90,
        alpha_grid=log_grid(1, 8, 5), alpha_tilde_grid=log_grid(1, 8, 5),
        beta_grid=log_grid(-2, 3, 4)),
    # high-degree setting: R = 7071 km, rho = 0.3, truth degree 130, N_k = M_k = 150
    "case2": ExperimentConfig(
        scenario="case2", truth_degree=130, decay_exponent=2.0, R=7071.0, rho=0.3,
        deg_sat=150, deg_ground=150, cap_exactness=280,
        alpha_grid=log_grid(1, 8, 5), alpha_tilde_grid=log_grid(1, 8, 5),
        beta_grid=log_grid(-2, 3, 4)),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name].with_overrides(**overrides)


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a config file; a ``scenario`` naming a preset supplies defaults."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    values.update(overrides)
    base = PRESETS.get(values.get("scenario", "custom"), ExperimentConfig())
    return base.with_overrides(**values)


__all__ = ["ExperimentConfig", "PRESETS", "preset", "load_config", "parse_config_text",
           "parse_value", "log_grid"]
