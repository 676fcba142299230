"""Discretization operator, discrete fields and noise injection."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, RuleMismatchError
from .quadrature import QuadratureRule, discrete_inner, write_csv
from .sphharm import SphCoeffs, grid_analysis, grid_synthesis, radial_factors


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """Samples of a function at the nodes of a quadrature rule."""

    rule: QuadratureRule
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.rule.size,):
            raise RuleMismatchError(f"expected {self.rule.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("discrete field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _check(self, other: "DiscreteField") -> None:
        if other.rule.key != self.rule.key:
            raise RuleMismatchError("fields live on different quadrature rules")

    def __add__(self, other: "DiscreteField") -> "DiscreteField":
        self._check(other)
        return DiscreteField(self.rule, self.values + other.values)

    def __sub__(self, other: "DiscreteField") -> "DiscreteField":
        self._check(other)
        return DiscreteField(self.rule, self.values - other.values)

    def __mul__(self, scalar: float) -> "DiscreteField":
        return DiscreteField(self.rule, float(scalar) * self.values)

    __rmul__ = __mul__

    def inner(self, other: "DiscreteField") -> float:
        self._check(other)
        return discrete_inner(self.rule, self, other)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self), 0.0)))

    def to_csv(self, path) -> None:
        idx = np.arange(self.rule.size)
        write_csv(path, ["node", "value"], zip(idx, self.values))

    @classmethod
    def from_csv(cls, rule: QuadratureRule, path) -> "DiscreteField":
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from exc
        if data.shape[0] != rule.size or not np.array_equal(data[:, 0], np.arange(rule.size)):
            raise DataError(f"{path}: node indices do not match the rule")
        return cls(rule, data[:, 1])


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian white noise rescaled to an exact relative level."""

    epsilon_rel: float
    seed: int = 0
    distribution: str = "gaussian-iid"

    def __post_init__(self):
        if self.epsilon_rel < 0:
            raise ValueError("epsilon_rel must be non-negative")
        if self.distribution != "gaussian-iid":
            raise ValueError(f"unsupported noise distribution {self.distribution!r}")


def sample_coefficients(C: np.ndarray, S: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Evaluate unit-sphere amplitudes ``C, S [n, m]`` at all rule nodes."""
    L = C.shape[0] - 1
    cos_m, sin_m = rule.trig(L)
    return grid_synthesis(C, S, rule.legendre(L), cos_m, sin_m).ravel()


def sample(c: SphCoeffs, rule: QuadratureRule) -> DiscreteField:
    """The discretization operator: values of ``c`` at the rule's nodes.

    The field is evaluated on the sphere the rule lives on, i.e. harmonically
    continued outward when the rule radius exceeds the anchor radius.
    """
    fac = radial_factors(c.degree_max, c.anchor_radius, rule.radius)
    C, S = c.to_nm()
    return DiscreteField(rule, sample_coefficients(C * fac[:, None], S * fac[:, None], rule))


def moments(f: DiscreteField, degree_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Weighted moments ``sum_i w_i (1/rho) Y[n, m](x_i) f_i`` for ``n <= degree_max``.

    On a full-sphere rule exact to ``degree_max + deg(f)`` these are the
    coefficients of ``f`` in the orthonormal basis on that sphere.
    """
    rule = f.rule
    cos_m, sin_m = rule.trig(degree_max)
    values = f.values.reshape(rule.n_rings, rule.n_lon)
    C, S = grid_analysis(values, rule.ring_weights, rule.legendre(degree_max), cos_m, sin_m)
    return C / rule.radius, S / rule.radius


def add_noise(f: DiscreteField, spec: NoiseSpec, stream: int = 0) -> DiscreteField:
    """Add white Gaussian noise whose weighted norm is ``epsilon_rel * ||f||``.

    The generator is PCG64 seeded from ``(spec.seed, stream)``; independent
    data sets in one experiment use distinct ``stream`` values.
    """
    if spec.epsilon_rel == 0:
        return f
    fnorm = f.norm()
    if fnorm == 0:
        raise DataError("cannot scale relative noise on a zero field")
    rng = np.random.Generator(np.random.PCG64([int(spec.seed), int(stream)]))
    xi = rng.standard_normal(f.rule.size)
    xi_norm = np.sqrt(np.dot(f.rule.weights * xi, xi))
    xi *= spec.epsilon_rel * fnorm / xi_norm
    return DiscreteField(f.rule, f.values + xi)


def relative_error(approx: DiscreteField, truth: DiscreteField) -> float:
    """``||approx - truth|| / ||truth||`` in the rule's weighted norm."""
    tnorm = truth.norm()
    if tnorm == 0:
        raise DataError("relative error against a zero field")
    return (approx - truth).norm() / tnorm


def load_field(rule: QuadratureRule, path) -> DiscreteField:
    return DiscreteField.from_csv(rule, Path(path))
