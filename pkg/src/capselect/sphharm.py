"""Real orthonormal spherical harmonics and exterior harmonic expansions.

Layout
------
Coefficients of degree ``n`` are indexed by ``j = 1, ..., 2n+1``:

* ``j = 1``      -> order ``m = 0``
* ``j = 2m``     -> ``cos(m phi)`` part of order ``m``
* ``j = 2m + 1`` -> ``sin(m phi)`` part of order ``m``

and stored flat at position ``n**2 + j - 1``. No Condon-Shortley phase is
used. The unit-sphere functions ``Y[n, j]`` are orthonormal on the unit
sphere, so ``(1/s) * Y[n, j]`` is an orthonormal basis of ``L2`` on the
sphere of radius ``s``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

FOUR_PI = 4.0 * np.pi
_DOMAIN_SLACK = 1e-12


# --------------------------------------------------------------------------
# indexing
# --------------------------------------------------------------------------

def n_coeffs(degree_max: int) -> int:
    """Number of real coefficients up to and including ``degree_max``."""
    return (degree_max + 1) ** 2


def flat_index(n: int, j: int) -> int:
    if n < 0 or not 1 <= j <= 2 * n + 1:
        raise IndexError(f"order index j={j} out of range for degree n={n}")
    return n * n + j - 1


def order_of(j: int) -> tuple[int, int]:
    """Return ``(m, kind)`` for order index ``j``; kind 0 is cosine, 1 sine."""
    if j == 1:
        return 0, 0
    return j // 2, j % 2


def layout(degree_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Degree, order and kind (0 cos / 1 sin) for every flat position."""
    ns, ms, kinds = [], [], []
    for n in range(degree_max + 1):
        for j in range(1, 2 * n + 2):
            m, kind = order_of(j)
            ns.append(n)
            ms.append(m)
            kinds.append(kind)
    return np.array(ns), np.array(ms), np.array(kinds)


# --------------------------------------------------------------------------
# directions
# --------------------------------------------------------------------------

class UnitDirection(NamedTuple):
    """A point on the unit sphere as (colatitude, longitude) in radians."""

    theta: float
    phi: float

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "UnitDirection":
        x, y, z = (float(c) for c in v)
        norm = np.sqrt(x * x + y * y + z * z)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction vector has norm {norm}, expected 1")
        theta = float(np.arccos(np.clip(z / norm, -1.0, 1.0)))
        phi = float(np.arctan2(y, x)) % (2.0 * np.pi)
        return cls(theta, phi)

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi),
                         np.cos(self.theta)])


def _angles(dirs) -> tuple[np.ndarray, np.ndarray]:
    """Accept a list of UnitDirection, an (P, 2) angle array or (theta, phi)."""
    if isinstance(dirs, tuple) and len(dirs) == 2 and not isinstance(dirs, UnitDirection):
        theta, phi = dirs
        return np.atleast_1d(np.asarray(theta, float)), np.atleast_1d(np.asarray(phi, float))
    arr = np.asarray(dirs, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def to_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


# --------------------------------------------------------------------------
# Legendre functions
# --------------------------------------------------------------------------

def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + _DOMAIN_SLACK):
        raise ValueError("Legendre argument outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def legendre_series(degree_max: int, t) -> np.ndarray:
    """Legendre polynomials ``P_0 .. P_L`` at ``t``; shape ``(L+1,) + t.shape``."""
    t = _check_t(t)
    out = np.empty((degree_max + 1,) + t.shape)
    out[0] = 1.0
    if degree_max >= 1:
        out[1] = t
    for n in range(2, degree_max + 1):
        out[n] = ((2 * n - 1) * t * out[n - 1] - (n - 1) * out[n - 2]) / n
    return out


def legendre_P(n: int, t):
    """Legendre polynomial ``P_n(t)`` with ``P_n(1) = 1``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    values = legendre_series(n, t)[n]
    return float(values) if values.ndim == 0 else values


def assoc_legendre(degree_max: int, t) -> np.ndarray:
    """Normalized associated Legendre functions ``Pbar[n, m, ...]``.

    The normalization makes ``Pbar[n, m](cos theta) * cos(m phi)`` (and the
    sine counterpart for ``m >= 1``) orthonormal on the unit sphere. Entries
    with ``m > n`` are zero.

    Uses the standard forward-column recurrence seeded by the sectoral terms,
    carried out in the 4-pi geodetic normalization and rescaled at the end.
    Near the poles high sectoral terms underflow to zero, which is harmless
    since their true magnitude is below double precision range.
    """
    t = _check_t(t)
    u = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    L = degree_max
    P = np.zeros((L + 1, L + 1) + t.shape)
    P[0, 0] = 1.0
    if L >= 1:
        P[1, 1] = np.sqrt(3.0) * u
    for m in range(2, L + 1):
        P[m, m] = u * np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * P[m - 1, m - 1]
    if L >= 1:
        ms = np.arange(L + 1)
        for n in range(1, L + 1):
            m = ms[:n]
            a = np.sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0) / ((n - m) * (n + m)))
            a = a.reshape((-1,) + (1,) * t.ndim)
            if n >= 2:
                b = np.zeros(n)
                mm = m[: n - 1]
                b[: n - 1] = np.sqrt((2.0 * n + 1.0) * (n + mm - 1.0) * (n - mm - 1.0)
                                     / ((n - mm) * (n + mm) * (2.0 * n - 3.0)))
                b = b.reshape((-1,) + (1,) * t.ndim)
                P[n, :n] = a * t * P[n - 1, :n] - b * P[n - 2, :n]
            else:
                P[n, :n] = a * t * P[n - 1, :n]
    P /= np.sqrt(FOUR_PI)
    return P


def eval_Y(n: int, j: int, direction) -> float:
    """Real fully normalized spherical harmonic ``Y[n, j]`` at one direction."""
    flat_index(n, j)
    if not isinstance(direction, UnitDirection):
        direction = (UnitDirection.from_vector(direction) if len(direction) == 3
                     else UnitDirection(*direction))
    m, kind = order_of(j)
    pbar = assoc_legendre(n, np.cos(direction.theta))[n, m]
    trig = np.sin(m * direction.phi) if kind else np.cos(m * direction.phi)
    return float(pbar * trig)


def sph_harm_matrix(degree_max: int, dirs) -> np.ndarray:
    """All ``Y[n, j]`` at the given directions; shape ``((L+1)**2, P)``."""
    theta, phi = _angles(dirs)
    P = assoc_legendre(degree_max, np.cos(theta))
    ns, ms, kinds = layout(degree_max)
    trig = np.where(kinds[:, None] == 1, np.sin(ms[:, None] * phi), np.cos(ms[:, None] * phi))
    return P[ns, ms] * trig


# --------------------------------------------------------------------------
# coefficient containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SphCoeffs:
    """Coefficients of an exterior harmonic function.

    ``coeffs`` is the flat vector w.r.t. the orthonormal basis
    ``(1/s) Y[n, j]`` on the sphere of radius ``s = anchor_radius``; the
    ``L2`` norm on that sphere therefore equals ``numpy.linalg.norm(coeffs)``.
    """

    degree_max: int
    anchor_radius: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (n_coeffs(self.degree_max),):
            raise ValueError(f"expected {n_coeffs(self.degree_max)} coefficients, got {c.shape}")
        if self.anchor_radius <= 0:
            raise ValueError("anchor radius must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, degree_max: int, anchor_radius: float) -> "SphCoeffs":
        return cls(degree_max, anchor_radius, np.zeros(n_coeffs(degree_max)))

    @classmethod
    def from_nm(cls, C: np.ndarray, S: np.ndarray, anchor_radius: float) -> "SphCoeffs":
        """Build from square cosine/sine arrays indexed ``[n, m]``."""
        L = C.shape[0] - 1
        ns, ms, kinds = layout(L)
        flat = np.where(kinds == 1, S[ns, ms], C[ns, ms])
        return cls(L, anchor_radius, flat)

    def to_nm(self) -> tuple[np.ndarray, np.ndarray]:
        L = self.degree_max
        C = np.zeros((L + 1, L + 1))
        S = np.zeros((L + 1, L + 1))
        ns, ms, kinds = layout(L)
        cos_mask = kinds == 0
        C[ns[cos_mask], ms[cos_mask]] = self.coeffs[cos_mask]
        S[ns[~cos_mask], ms[~cos_mask]] = self.coeffs[~cos_mask]
        return C, S

    def get(self, n: int, j: int) -> float:
        return float(self.coeffs[flat_index(n, j)])

    def degrees(self) -> np.ndarray:
        return layout(self.degree_max)[0]

    def truncate(self, degree_max: int) -> "SphCoeffs":
        if degree_max > self.degree_max:
            padded = np.zeros(n_coeffs(degree_max))
            padded[: self.coeffs.size] = self.coeffs
            return SphCoeffs(degree_max, self.anchor_radius, padded)
        return SphCoeffs(degree_max, self.anchor_radius, self.coeffs[: n_coeffs(degree_max)])

    def __add__(self, other: "SphCoeffs") -> "SphCoeffs":
        if other.anchor_radius != self.anchor_radius:
            raise ValueError("anchor radii differ")
        L = max(self.degree_max, other.degree_max)
        return SphCoeffs(L, self.anchor_radius, self.truncate(L).coeffs + other.truncate(L).coeffs)

    def __mul__(self, scalar: float) -> "SphCoeffs":
        return SphCoeffs(self.degree_max, self.anchor_radius, float(scalar) * self.coeffs)

    __rmul__ = __mul__


def radial_factors(degree_max: int, anchor_radius: float, eval_radius: float) -> np.ndarray:
    """Per-degree factor ``(s/rho)**(n+1) / s`` turning coefficients into
    unit-sphere harmonic amplitudes at radius ``rho``."""
    if eval_radius < anchor_radius:
        raise ValueError(
            f"evaluation radius {eval_radius} is below the anchor radius {anchor_radius}")
    n = np.arange(degree_max + 1)
    return (anchor_radius / eval_radius) ** (n + 1) / anchor_radius


def synthesize(c: SphCoeffs, dirs, eval_radius: float | None = None) -> np.ndarray:
    """Evaluate the exterior harmonic function ``c`` at ``eval_radius * x``.

    ``value = sum c[n, j] (s/rho)**(n+1) (1/s) Y[n, j](x)`` where ``s`` is the
    anchor radius and ``rho`` the evaluation radius (defaults to ``s``).
    """
    rho = c.anchor_radius if eval_radius is None else eval_radius
    fac = radial_factors(c.degree_max, c.anchor_radius, rho)
    Y = sph_harm_matrix(c.degree_max, dirs)
    return (c.coeffs * fac[c.degrees()]) @ Y


def upward_continue(c: SphCoeffs, target_radius: float) -> SphCoeffs:
    """Re-anchor ``c`` at a larger radius ``R``: ``c'[n, j] = c[n, j] (r/R)**n``."""
    r = c.anchor_radius
    if target_radius < r:
        raise ValueError(f"target radius {target_radius} is below anchor radius {r}")
    damp = (r / target_radius) ** np.arange(c.degree_max + 1)
    return SphCoeffs(c.degree_max, float(target_radius), c.coeffs * damp[c.degrees()])


# --------------------------------------------------------------------------
# ring-structured (product grid) transforms
# --------------------------------------------------------------------------

def trig_matrices(degree_max: int, n_lon: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos(m phi_k)`` and ``sin(m phi_k)`` for ``phi_k = 2 pi k / n_lon``."""
    phi = 2.0 * np.pi * np.arange(n_lon) / n_lon
    arg = np.outer(phi, np.arange(degree_max + 1))
    return np.cos(arg), np.sin(arg)


def grid_synthesis(C: np.ndarray, S: np.ndarray, pbar: np.ndarray,
                   cos_m: np.ndarray, sin_m: np.ndarray) -> np.ndarray:
    """Evaluate unit-sphere amplitudes ``C, S [n, m]`` on a ring grid.

    ``pbar`` is ``assoc_legendre(L, t_rings)`` and the trig matrices come
    from :func:`trig_matrices`. Returns ``(n_rings, n_lon)`` values.
    """
    A = np.einsum("nm,nmr->rm", C, pbar)
    B = np.einsum("nm,nmr->rm", S, pbar)
    return A @ cos_m.T + B @ sin_m.T


def grid_analysis(values: np.ndarray, ring_weights: np.ndarray, pbar: np.ndarray,
                  cos_m: np.ndarray, sin_m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weighted moments ``sum_i w_i Y[n, m](x_i) f_i`` on a ring grid.

    ``values`` has shape ``(n_rings, n_lon)``; every node on ring ``r`` has
    weight ``ring_weights[r]``. Returns cosine and sine arrays ``[n, m]``.
    """
    Fc = values @ cos_m
    Fs = values @ sin_m
    C = np.einsum("nmr,r,rm->nm", pbar, ring_weights, Fc)
    S = np.einsum("nmr,r,rm->nm", pbar, ring_weights, Fs)
    S[:, 0] = 0.0
    return C, S
