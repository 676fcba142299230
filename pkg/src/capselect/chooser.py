"""Choosing one candidate among many using noisy samples on the cap.

For normalized pairwise differences ``a = (u_k - u_l) / ||u_k - u_l||`` the
score of candidate ``k`` is

    H_k = max_a | <u_k, a> - <f, a> |

with ``f`` the noisy reference samples; the chosen index minimizes ``H_k``.
With ``k_opt`` the best candidate and ``eps`` the noise norm,

    ||u_k* - u_kopt|| <= H_k* + H_kopt <= 2 H_kopt <= 2 (eps + ||u - u_kopt||)

All inner products are the weighted discrete ones of the sampling rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import RuleMismatchError
from .field import DiscreteField
from .quadrature import QuadratureRule, discrete_inner, write_csv

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class DirectionSet:
    pairs: list[tuple[int, int]]
    directions: list[DiscreteField]
    norm_tolerance: float

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SelectionReport:
    """Scores, chosen index and (when the truth is known) error metrics.

    Indices are zero-based.
    """

    H: np.ndarray
    k_star: int
    n_directions: int
    chosen: DiscreteField | None = field(default=None, repr=False)
    k_opt: int | None = None
    err_k: np.ndarray | None = None
    err_star: float | None = None
    err_opt: float | None = None
    err_max: float | None = None
    err_av: float | None = None
    bound_lhs: float | None = None
    bound_rhs: float | None = None
    bound_holds: bool | None = None
    epsilon_used: float | None = None

    def with_errors(self, err_k) -> "SelectionReport":
        """Attach per-candidate errors and the derived order statistics."""
        err = np.asarray(err_k, dtype=float)
        if err.shape != self.H.shape:
            raise ValueError("one error per candidate required")
        k_opt = int(np.argmin(err))
        return replace(self, err_k=err, k_opt=k_opt, err_star=float(err[self.k_star]),
                       err_opt=float(err[k_opt]), err_max=float(err.max()),
                       err_av=float(err.mean()))

    def to_csv(self, rows_path, summary_path) -> None:
        n = len(self.H)
        err = self.err_k if self.err_k is not None else np.full(n, np.nan)
        rows = [(k, self.H[k], err[k], k == self.k_star, k == self.k_opt) for k in range(n)]
        write_csv(rows_path, ["k", "H_k", "err_k", "is_star", "is_opt"], rows)
        summary = [self.err_star, self.err_opt, self.err_max, self.err_av,
                   self.bound_lhs, self.bound_rhs]
        write_csv(summary_path,
                  ["err_star", "err_opt", "err_max", "err_av", "bound_lhs", "bound_rhs"],
                  [[np.nan if v is None else v for v in summary]])


def _stack(candidates, f_noisy: DiscreteField | None = None) -> tuple[QuadratureRule, np.ndarray]:
    if len(candidates) == 0:
        raise ValueError("no candidates given")
    rule = candidates[0].rule
    fields = list(candidates) + ([] if f_noisy is None else [f_noisy])
    for c in fields:
        if c.rule.key != rule.key:
            raise RuleMismatchError("all fields must share one quadrature rule")
    return rule, np.stack([c.values for c in candidates])


def _pair_blocks(U: np.ndarray, w: np.ndarray, tol: float):
    """Yield ``(k, ls, A)``: unit directions ``A[i] = a_{k, ls[i]}`` for ``l > k``."""
    norms = np.sqrt(np.einsum("km,m,km->k", U, w, U))
    threshold = tol * norms.max()
    for k in range(U.shape[0] - 1):
        D = U[k + 1:] - U[k]
        dn = np.sqrt(np.einsum("lm,m,lm->l", D, w, D))
        keep = dn > threshold
        if np.any(keep):
            yield k, np.nonzero(keep)[0] + k + 1, D[keep] / dn[keep, None]


def build_directions(candidates, tol: float = DEFAULT_TOL) -> DirectionSet:
    """Unit differences of every unordered candidate pair above the tolerance."""
    rule, U = _stack(candidates)
    pairs, dirs = [], []
    for k, ls, A in _pair_blocks(U, rule.weights, tol):
        for l, a in zip(ls, A):
            pairs.append((k, int(l)))
            dirs.append(DiscreteField(rule, a))
    return DirectionSet(pairs, dirs, tol)


def surrogate_h(u_k: DiscreteField, a: DiscreteField, f_noisy: DiscreteField) -> float:
    """``<u_k, a> - <f, a>`` in the discrete inner product."""
    rule = u_k.rule
    return discrete_inner(rule, u_k, a) - discrete_inner(rule, f_noisy, a)


def select(candidates, f_noisy: DiscreteField, tol: float = DEFAULT_TOL) -> SelectionReport:
    """Score every candidate and return the minimizer of ``H`` (first on ties).

    Runs in ``O(N**2 M)``: each block of directions sharing a first index is
    tested against all residuals with one matrix product.
    """
    rule, U = _stack(candidates, f_noisy)
    w = rule.weights
    Rw = (U - f_noisy.values) * w
    H = np.zeros(U.shape[0])
    count = 0
    for _, _, A in _pair_blocks(U, w, tol):
        H = np.maximum(H, np.abs(Rw @ A.T).max(axis=1))
        count += A.shape[0]
    k_star = int(np.argmin(H))
    return SelectionReport(H=H, k_star=k_star, n_directions=count,
                           chosen=candidates[k_star])


def verify_theorem(report: SelectionReport, truth: DiscreteField,
                   k_opt_field: DiscreteField, epsilon: float,
                   rtol: float = 1e-9) -> tuple[float, float, bool]:
    """Check ``||u - u_k*|| <= ||u - u_kopt|| + 2 ||u - u_kopt|| + 2 eps``.

    Norms are the discrete ones of the sampling rule. Returns
    ``(lhs, rhs, holds)`` where ``holds`` allows ``rtol`` times the field scale.
    """
    if report.chosen is None:
        raise ValueError("report carries no chosen field")
    lhs = (truth - report.chosen).norm()
    d_opt = (truth - k_opt_field).norm()
    rhs = d_opt + 2.0 * d_opt + 2.0 * epsilon
    scale = max(truth.norm(), report.chosen.norm(), k_opt_field.norm(), epsilon)
    return lhs, rhs, bool(lhs <= rhs + rtol * scale)


def attach_truth(report: SelectionReport, candidates, truth: DiscreteField,
                 epsilon: float) -> SelectionReport:
    """Errors in the sampling rule's norm plus the bound check."""
    tnorm = truth.norm()
    err = np.array([(c - truth).norm() / tnorm for c in candidates])
    rep = report.with_errors(err)
    lhs, rhs, holds = verify_theorem(rep, truth, candidates[rep.k_opt], epsilon)
    return replace(rep, bound_lhs=lhs, bound_rhs=rhs, bound_holds=holds,
                   epsilon_used=float(epsilon))
