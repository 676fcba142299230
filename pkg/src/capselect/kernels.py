"""Zonal reconstruction kernels combining satellite-shell and ground-cap data.

A candidate reconstruction on the cap is

    u(x) = int_{Omega_R} Phi(x, y) f2(y) dy + int_{Gamma_r} Psi(x, y) f1(y) dy

with zonal kernels given by their degree symbols ``phi[n]`` and
``psi[n] = phi_tilde[n] - phi[n] (r/R)**n``. The symbols minimize

    F = a~ sum (1 - phi~[n])**2 + a sum (1 - phi[n] s[n])**2
        + b sum phi[n]**2 + ||Psi(x_c, .)||**2 over the sphere minus the cap

where ``s[n] = (r/R)**n`` and ``x_c`` is the cap centre.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .errors import NumericalError, RuleMismatchError
from .field import DiscreteField, moments, sample
from .quadrature import CapGeometry, QuadratureRule, write_csv
from .sphharm import SphCoeffs, legendre_series, to_vectors


class QuadratureExactnessWarning(UserWarning):
    """A data rule is not exact enough for the requested kernel degree."""


@dataclass(frozen=True)
class CandidateParams:
    alpha: float
    alpha_tilde: float
    beta: float
    deg_sat: int
    deg_ground: int
    r: float
    R: float
    cap: CapGeometry

    def __post_init__(self):
        if not (self.alpha > 0 and self.alpha_tilde > 0 and self.beta >= 0):
            raise ValueError("need alpha > 0, alpha_tilde > 0, beta >= 0")
        if not 0 <= self.deg_sat <= self.deg_ground:
            raise ValueError("need 0 <= deg_sat <= deg_ground")
        if not 0 < self.r < self.R:
            raise ValueError("need 0 < r < R")
        if self.cap.radius != self.r:
            raise ValueError("cap radius must equal r")

    @property
    def damping(self) -> np.ndarray:
        """Upward-continuation symbol ``(r/R)**n`` for ``n <= deg_sat``."""
        return (self.r / self.R) ** np.arange(self.deg_sat + 1)


@dataclass(frozen=True)
class KernelSymbols:
    phi: np.ndarray
    phi_tilde: np.ndarray
    r: float
    R: float

    @property
    def deg_sat(self) -> int:
        return len(self.phi) - 1

    @property
    def deg_ground(self) -> int:
        return len(self.phi_tilde) - 1

    @property
    def psi_tilde(self) -> np.ndarray:
        psi = np.array(self.phi_tilde, dtype=float)
        n = np.arange(self.deg_sat + 1)
        psi[: n.size] -= self.phi * (self.r / self.R) ** n
        return psi

    def to_csv(self, path) -> None:
        phi = np.zeros(self.deg_ground + 1)
        phi[: self.deg_sat + 1] = self.phi
        rows = zip(range(self.deg_ground + 1), phi, self.phi_tilde, self.psi_tilde)
        write_csv(path, ["n", "phi", "phi_tilde", "psi_tilde"], rows)


def localization_gram(deg: int, cap: CapGeometry) -> np.ndarray:
    """Gram matrix of the off-cap energy of a zonal kernel centred at the pole.

    ``G[n, m] = (2n+1)(2m+1) / (8 pi r**2) * int_{-1}^{t_min} P_n P_m dt``,
    integrated exactly by a Gauss-Legendre rule with ``deg + 1`` nodes.
    """
    if cap.t_min <= -1.0:
        return np.zeros((deg + 1, deg + 1))
    x, w = np.polynomial.legendre.leggauss(deg + 1)
    half = 0.5 * (cap.t_min + 1.0)
    t = half * (x + 1.0) - 1.0
    P = legendre_series(deg, t)
    integrals = (P * (w * half)) @ P.T
    integrals = 0.5 * (integrals + integrals.T)
    scale = 2.0 * np.arange(deg + 1) + 1.0
    return np.outer(scale, scale) * integrals / (8.0 * np.pi * cap.radius ** 2)


def _normal_equations(p: CandidateParams, G: np.ndarray):
    """Hessian/2 and right-hand side in the variables ``[phi*s, phi_tilde]``.

    Substituting ``q[n] = phi[n] s[n]`` keeps every unknown of order one even
    when ``s[n]`` is far below machine precision.
    """
    Ns, Ng = p.deg_sat + 1, p.deg_ground + 1
    s = p.damping
    E = np.zeros((Ng, Ns + Ng))
    E[:Ns, :Ns] = -np.eye(Ns)
    E[:, Ns:] = np.eye(Ng)
    with np.errstate(over="ignore"):
        diag_q = p.alpha + p.beta / s ** 2
    H = E.T @ G @ E
    H[np.arange(Ns), np.arange(Ns)] += diag_q
    H[np.arange(Ns, Ns + Ng), np.arange(Ns, Ns + Ng)] += p.alpha_tilde
    rhs = np.concatenate([np.full(Ns, p.alpha), np.full(Ng, p.alpha_tilde)])
    return H, rhs


def solve_symbols(p: CandidateParams, G: np.ndarray | None = None) -> KernelSymbols:
    """Unique minimizer of the kernel functional for the given parameters.

    One symmetric positive-definite solve of size ``deg_sat + deg_ground + 2``
    (Jacobi-scaled Cholesky). ``G`` may be passed to reuse a precomputed
    :func:`localization_gram`.
    """
    if G is None:
        G = localization_gram(p.deg_ground, p.cap)
    H, rhs = _normal_equations(p, G)
    d = np.diag(H)
    if not np.all(np.isfinite(d)):
        # beta / s**2 overflowed: those q are zero to double precision
        keep = np.isfinite(d)
    else:
        keep = np.ones(d.size, bool)
    z = np.zeros(d.size)
    Hk = H[np.ix_(keep, keep)]
    dk = 1.0 / np.sqrt(np.diag(Hk))
    try:
        factor = linalg.cho_factor(Hk * np.outer(dk, dk), lower=True)
        z[keep] = dk * linalg.cho_solve(factor, dk * rhs[keep])
    except linalg.LinAlgError as exc:
        raise NumericalError(f"kernel system not positive definite for {p}") from exc
    if not np.all(np.isfinite(z)):
        raise NumericalError(f"non-finite kernel symbols for {p}")
    Ns = p.deg_sat + 1
    phi = np.zeros(Ns)
    live = keep[:Ns]
    phi[live] = z[:Ns][live] / p.damping[live]
    if not np.all(np.isfinite(phi)):
        raise NumericalError(f"non-finite satellite symbols for {p}")
    return KernelSymbols(phi, z[Ns:], p.r, p.R)


def functional(p: CandidateParams, phi: np.ndarray, phi_tilde: np.ndarray,
               G: np.ndarray | None = None) -> float:
    """Value of the kernel functional at the given symbols."""
    if G is None:
        G = localization_gram(p.deg_ground, p.cap)
    s = p.damping
    psi = np.array(phi_tilde, dtype=float)
    psi[: s.size] -= phi * s
    return float(p.alpha_tilde * np.sum((1.0 - phi_tilde) ** 2)
                 + p.alpha * np.sum((1.0 - phi * s) ** 2)
                 + p.beta * np.sum(phi ** 2)
                 + psi @ G @ psi)


# --------------------------------------------------------------------------
# applying a candidate to data
# --------------------------------------------------------------------------

class DataMoments(NamedTuple):
    """Weighted harmonic moments of the two data sets, shared by all candidates."""

    sat_C: np.ndarray
    sat_S: np.ndarray
    cap_C: np.ndarray
    cap_S: np.ndarray
    r: float


def _check_rules(f2: DiscreteField, f1: DiscreteField, eval_rule: QuadratureRule | None):
    if f2.rule.domain != "sphere":
        raise RuleMismatchError("satellite data must live on a full-sphere rule")
    if f1.rule.domain != "cap":
        raise RuleMismatchError("ground data must live on a cap rule")
    if eval_rule is not None and eval_rule.radius != f1.rule.radius:
        raise RuleMismatchError("evaluation rule must lie on the ground sphere")


def data_moments(f2: DiscreteField, f1: DiscreteField, deg_sat: int, deg_ground: int,
                 data_degree: int | None = None) -> DataMoments:
    """Moments of ``f2`` up to ``deg_sat`` and of ``f1`` up to ``deg_ground``.

    When ``data_degree`` is given, rules that are not exact to
    ``kernel degree + data_degree`` trigger a :class:`QuadratureExactnessWarning`.
    """
    _check_rules(f2, f1, None)
    if data_degree is not None:
        for f, deg, name in ((f2, deg_sat, "satellite"), (f1, deg_ground, "ground")):
            need = deg + data_degree
            if f.rule.exactness_degree < need:
                warnings.warn(f"{name} rule exact to {f.rule.exactness_degree} < {need}",
                              QuadratureExactnessWarning, stacklevel=2)
    sC, sS = moments(f2, deg_sat)
    cC, cS = moments(f1, deg_ground)
    return DataMoments(sC, sS, cC, cS, f1.rule.radius)


def candidate_coeffs(sym: KernelSymbols, mom: DataMoments) -> SphCoeffs:
    """Coefficients of the candidate in the orthonormal basis on the ground sphere."""
    Ns, Ng = sym.deg_sat + 1, sym.deg_ground + 1
    psi = sym.psi_tilde[:, None]
    C = psi * mom.cap_C[:Ng, :Ng]
    S = psi * mom.cap_S[:Ng, :Ng]
    C[:Ns, :Ns] += sym.phi[:, None] * mom.sat_C[:Ns, :Ns]
    S[:Ns, :Ns] += sym.phi[:, None] * mom.sat_S[:Ns, :Ns]
    return SphCoeffs.from_nm(C, S, mom.r)


def apply_candidate(sym: KernelSymbols, f2: DiscreteField, f1: DiscreteField,
                    eval_rule: QuadratureRule, mom: DataMoments | None = None) -> DiscreteField:
    """Evaluate the candidate reconstruction at the nodes of ``eval_rule``.

    By the addition theorem the kernel integrals factor into data moments
    times symbols; the moments can be passed in to share them across
    candidates.
    """
    _check_rules(f2, f1, eval_rule)
    if mom is None:
        mom = data_moments(f2, f1, sym.deg_sat, sym.deg_ground)
    return sample(candidate_coeffs(sym, mom), eval_rule)


def kernel_matrix(symbol: np.ndarray, eval_rule: QuadratureRule,
                  data_rule: QuadratureRule) -> np.ndarray:
    """Weighted zonal kernel matrix ``K[e, i] = w_i K(x_e, y_i)``.

    ``K(x, y) = sum_n symbol[n] (2n+1) / (4 pi r rho) P_n(x.y)`` with ``r``
    the evaluation radius and ``rho`` the data radius.
    """
    xe = to_vectors(eval_rule.theta, eval_rule.phi)
    yd = to_vectors(data_rule.theta, data_rule.phi)
    cosang = np.clip(xe @ yd.T, -1.0, 1.0)
    deg = len(symbol) - 1
    coef = np.asarray(symbol) * (2.0 * np.arange(deg + 1) + 1.0) / (
        4.0 * np.pi * eval_rule.radius * data_rule.radius)
    K = np.polynomial.legendre.legval(cosang, coef)
    return K * data_rule.weights


def apply_candidate_direct(sym: KernelSymbols, f2: DiscreteField, f1: DiscreteField,
                           eval_rule: QuadratureRule) -> DiscreteField:
    """Same as :func:`apply_candidate` but through explicit kernel matrices.

    Memory is ``O(M_eval * (M_sat + M_cap))``; intended for checks on small rules.
    """
    _check_rules(f2, f1, eval_rule)
    u = kernel_matrix(sym.phi, eval_rule, f2.rule) @ f2.values
    u += kernel_matrix(sym.psi_tilde, eval_rule, f1.rule) @ f1.values
    return DiscreteField(eval_rule, u)
