"""Product quadrature rules on the sphere and on polar spherical caps.

Every rule is a product grid: rings of constant colatitude, each carrying
``n_lon`` equispaced longitudes ``phi_k = 2 pi k / n_lon`` and one common
node weight. Nodes are ordered colatitude-major (north to south), longitude
minor, so flattened sample vectors line up across runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import sphharm
from .errors import RuleMismatchError


@dataclass(frozen=True)
class CapGeometry:
    """The cap ``{x on the sphere of radius r : 1 - cos(theta) < rho}``.

    ``rho = 2`` is accepted as the degenerate "whole sphere" cap; it is used
    to switch off the localization penalty of the kernel functional.
    """

    radius: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho <= 2.0:
            raise ValueError(f"cap parameter rho={self.rho} outside (0, 2]")
        if self.radius <= 0:
            raise ValueError("cap radius must be positive")

    @property
    def t_min(self) -> float:
        return 1.0 - self.rho

    @property
    def area(self) -> float:
        return 2.0 * np.pi * self.radius ** 2 * self.rho

    @property
    def half_angle(self) -> float:
        return float(np.arccos(self.t_min))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Positive-weight product rule with declared polynomial exactness.

    Attributes
    ----------
    domain : {"sphere", "cap"}
    radius : float
        Radius of the sphere the nodes live on (km).
    t_rings : ndarray
        Cosine of the ring colatitudes, in decreasing order.
    ring_weights : ndarray
        Weight of each node on the corresponding ring (includes ``radius**2``).
    n_lon : int
        Longitudes per ring.
    exactness_degree : int
    cap : CapGeometry or None
    style : str
        Construction family, used to build oracle rules.
    """

    domain: str
    radius: float
    t_rings: np.ndarray
    ring_weights: np.ndarray
    n_lon: int
    exactness_degree: int
    cap: CapGeometry | None = None
    style: str = "gauss_legendre"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def key(self) -> tuple:
        """Identity used to decide whether two sample vectors are compatible."""
        rho = None if self.cap is None else self.cap.rho
        return (self.domain, self.style, float(self.radius), rho,
                int(self.exactness_degree), len(self.t_rings), int(self.n_lon))

    @property
    def n_rings(self) -> int:
        return len(self.t_rings)

    @property
    def size(self) -> int:
        return self.n_rings * self.n_lon

    @property
    def area(self) -> float:
        if self.domain == "cap":
            return self.cap.area
        return 4.0 * np.pi * self.radius ** 2

    @property
    def theta(self) -> np.ndarray:
        return np.repeat(np.arccos(self.t_rings), self.n_lon)

    @property
    def phi(self) -> np.ndarray:
        return np.tile(2.0 * np.pi * np.arange(self.n_lon) / self.n_lon, self.n_rings)

    @property
    def nodes(self) -> np.ndarray:
        """``(M, 2)`` array of (colatitude, longitude)."""
        return np.column_stack([self.theta, self.phi])

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(self.ring_weights, self.n_lon)

    def legendre(self, degree_max: int) -> np.ndarray:
        """Cached ``assoc_legendre(degree_max, t_rings)``."""
        key = ("pbar", degree_max)
        if key not in self._cache:
            self._cache[key] = sphharm.assoc_legendre(degree_max, self.t_rings)
        return self._cache[key]

    def trig(self, degree_max: int) -> tuple[np.ndarray, np.ndarray]:
        key = ("trig", degree_max)
        if key not in self._cache:
            self._cache[key] = sphharm.trig_matrices(degree_max, self.n_lon)
        return self._cache[key]

    def to_csv(self, path) -> None:
        """Write ``theta,phi,weight`` rows with 17 significant digits."""
        rows = np.column_stack([self.theta, self.phi, self.weights])
        write_csv(path, ["theta", "phi", "weight"], rows)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def format_number(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _fejer_weights(thetas: np.ndarray, n: int) -> np.ndarray:
    """Driscoll-Healy sine-sum weights for the offset equiangular colatitudes.

    Integrates ``int_{-1}^{1} p(t) dt`` exactly for polynomials of degree
    ``< n`` sampled at ``t = cos(thetas)``, ``thetas = pi (2j+1) / (2n)``.
    """
    half = n // 2
    l = np.arange(half)
    odd = 2 * l + 1
    return (4.0 / n) * np.sin(thetas) * (np.sin(np.outer(thetas, odd)) / odd).sum(axis=1)


def full_sphere_rule(bandwidth: int, radius: float, style: str = "equiangular") -> QuadratureRule:
    """Rule on the sphere of radius ``radius`` exact to degree ``2B - 1``.

    ``style="equiangular"`` uses ``2B`` colatitudes ``pi (2j+1) / (4B)`` with
    closed-form Driscoll-Healy weights; ``style="gauss_legendre"`` uses ``B``
    Gauss-Legendre nodes in ``cos(theta)``. Both use ``2B`` longitudes.
    """
    B = int(bandwidth)
    if B < 1:
        raise ValueError("bandwidth must be >= 1")
    n_lon = 2 * B
    if style == "equiangular":
        n = 2 * B
        thetas = np.pi * (2 * np.arange(n) + 1) / (2 * n)
        t = np.cos(thetas)
        wt = _fejer_weights(thetas, n)
    elif style == "gauss_legendre":
        x, wt = np.polynomial.legendre.leggauss(B)
        t, wt = x[::-1], wt[::-1]
    else:
        raise ValueError(f"unknown sphere rule style {style!r}")
    ring_w = wt * (2.0 * np.pi / n_lon) * radius ** 2
    return QuadratureRule("sphere", float(radius), t, ring_w, n_lon, 2 * B - 1, None, style)


def cap_rule(cap: CapGeometry, exactness: int) -> QuadratureRule:
    """Gauss-Legendre x equispaced-longitude rule on a polar cap.

    ``ceil((d+1)/2)`` Gauss nodes in ``t`` on ``[t_min, 1]`` times ``d+1``
    longitudes; integrates every spherical polynomial of degree ``<= d``
    over the cap exactly, and in particular every product
    ``Y[n, j] * Y[m, i]`` with ``n + m <= d``.
    """
    d = int(exactness)
    if d < 0:
        raise ValueError("exactness must be >= 0")
    n_t = d // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n_t)
    half = 0.5 * (1.0 - cap.t_min)
    t = half * x + 0.5 * (1.0 + cap.t_min)
    n_lon = d + 1
    ring_w = (w * half) * (2.0 * np.pi / n_lon) * cap.radius ** 2
    return QuadratureRule("cap", float(cap.radius), t[::-1].copy(), ring_w[::-1].copy(),
                          n_lon, d, cap, "gauss_legendre")


def required_bandwidth(exactness: int) -> int:
    """Smallest full-sphere bandwidth whose rule is exact to ``exactness``."""
    return max(1, math.ceil((exactness + 1) / 2))


def _values(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def discrete_inner(rule: QuadratureRule, v, w) -> float:
    """Weighted inner product ``sum_i w_i v_i w_i`` on ``rule``'s nodes."""
    for f in (v, w):
        frule = getattr(f, "rule", None)
        if frule is not None and frule.key != rule.key:
            raise RuleMismatchError("field sampled on a different rule")
    a, b = _values(v), _values(w)
    if a.shape != (rule.size,) or b.shape != (rule.size,):
        raise RuleMismatchError(f"expected {rule.size} samples, got {a.shape} and {b.shape}")
    return float(np.dot(rule.weights * a, b))


def harmonic_gram(rule: QuadratureRule, degree_max: int) -> np.ndarray:
    """Discrete Gram matrix of the orthonormal basis ``(1/radius) Y[n, j]``.

    Exploits the ring structure: the longitude sums factor out of the
    colatitude sums, so only ``(L+1)**2`` ring-weighted products are formed.
    """
    L = degree_max
    P = rule.legendre(L)
    ns, ms, kinds = sphharm.layout(L)
    rows = P[ns, ms]
    T = (rows * rule.ring_weights) @ rows.T
    cos_m, sin_m = rule.trig(L)
    trig = np.stack([cos_m, sin_m])
    lon = np.einsum("akm,bkn->abmn", trig, trig)
    G = T * lon[kinds[:, None], kinds[None, :], ms[:, None], ms[None, :]]
    return G / rule.radius ** 2


def oracle_rule(rule: QuadratureRule, degree_max: int) -> QuadratureRule:
    """Same-family reference rule with exactness ``4 * degree_max``."""
    d = max(4 * degree_max, 2 * rule.exactness_degree, 1)
    if rule.domain == "cap":
        return cap_rule(rule.cap, d)
    return full_sphere_rule(required_bandwidth(d), rule.radius, "gauss_legendre")


def _gram_rows(rule: QuadratureRule, degree_max: int, m: int, cache: dict) -> np.ndarray:
    """Gram rows of every basis function of order ``m`` (cos then sin block)."""
    L = degree_max
    if "flat" not in cache:
        P = rule.legendre(L)
        ns, ms, kinds = sphharm.layout(L)
        cos_m, sin_m = rule.trig(L)
        trig = np.stack([cos_m, sin_m])
        cache["P"] = P
        cache["flat"] = P[ns, ms] * rule.ring_weights
        cache["lon"] = np.einsum("akm,bkn->abmn", trig, trig)
        cache["layout"] = (ms, kinds)
    P, flat, lon = cache["P"], cache["flat"], cache["lon"]
    ms, kinds = cache["layout"]
    T = P[m:, m] @ flat.T
    out = [T * lon[0, kinds, m, ms]]
    if m > 0:
        out.append(T * lon[1, kinds, m, ms])
    return np.concatenate(out) / rule.radius ** 2


def check_exactness(rule: QuadratureRule, degree: int) -> float:
    """Largest Gram-matrix defect of ``rule`` on ``V_degree`` vs an oracle rule.

    Zero (to rounding) certifies that the discrete inner product agrees with
    the ``L2`` inner product on spherical polynomials of degree ``<= degree``.
    The Gram matrices are compared one order ``m`` at a time to bound memory.
    """
    ref = oracle_rule(rule, degree)
    cache, cache_ref = {}, {}
    defect = 0.0
    for m in range(degree + 1):
        D = _gram_rows(rule, degree, m, cache) - _gram_rows(ref, degree, m, cache_ref)
        defect = max(defect, float(np.max(np.abs(D))))
    return defect
