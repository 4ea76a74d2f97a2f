"""Linear-algebra kernels for the alternating updates.

All solvers retry once with a small ridge when the system is singular, since
multiplicative updates can transiently produce rank-deficient factors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, SolverError
from .norms import ThetaDiag

log = logging.getLogger(__name__)

RIDGE = 1e-10
# above this many unknowns the dense Kronecker system is replaced by Bartels-Stewart
KRON_MAX_UNKNOWNS = 4000


@dataclass(frozen=True)
class SylvesterProblem:
    """``U M + N U = C`` with ``M`` (c x c) and ``N`` (d x d) symmetric PSD."""

    M: np.ndarray
    N: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        M, N, C = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (self.M, self.N, self.C))
        d, c = C.shape
        if M.shape != (c, c) or N.shape != (d, d):
            raise DimensionError(f"Sylvester shapes: M {M.shape}, N {N.shape}, C {C.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "C", C)

    def residual(self, U: np.ndarray) -> float:
        return float(np.linalg.norm(U @ self.M + self.N @ U - self.C))


def _ridge_scale(K: np.ndarray) -> float:
    return RIDGE * max(1.0, float(np.max(np.abs(np.diag(K)), initial=0.0)))


def _dense_solve(K: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    try:
        x = np.linalg.solve(K, rhs)
        if np.all(np.isfinite(x)):
            return x
    except np.linalg.LinAlgError:
        pass
    log.debug("%s: singular system, retrying with ridge", what)
    try:
        x = np.linalg.solve(K + _ridge_scale(K) * np.eye(K.shape[0]), rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"{what}: system singular after ridge retry") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError(f"{what}: non-finite solution after ridge retry")
    return x


def solve_sylvester(p: SylvesterProblem) -> np.ndarray:
    """Solve ``U M + N U = C`` through ``(M^T kron I + I kron N) vec(U) = vec(C)``.

    ``vec`` stacks columns.  Systems with more than ``KRON_MAX_UNKNOWNS``
    unknowns go through scipy's Bartels-Stewart routine instead.
    """
    d, c = p.C.shape
    if d * c > KRON_MAX_UNKNOWNS:
        U = sla.solve_sylvester(p.N, p.M, p.C)
        if np.all(np.isfinite(U)):
            return U
        U = sla.solve_sylvester(p.N + _ridge_scale(p.N) * np.eye(d), p.M, p.C)
        if not np.all(np.isfinite(U)):
            raise SolverError("Sylvester system singular after ridge retry")
        return U
    K = np.kron(p.M.T, np.eye(d)) + np.kron(np.eye(c), p.N)
    u = _dense_solve(K, p.C.reshape(-1, order="F"), "Sylvester")
    return u.reshape((d, c), order="F")


def solve_spd(K, Y) -> np.ndarray:
    """Solve ``K Z = Y`` for symmetric positive definite ``K`` by Cholesky."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    Y = np.asarray(Y, dtype=float)
    if K.shape[0] != K.shape[1] or K.shape[0] != Y.shape[0]:
        raise DimensionError(f"solve_spd shapes: K {K.shape}, Y {Y.shape}")
    for ridge in (0.0, _ridge_scale(K)):
        try:
            cf = sla.cho_factor(K + ridge * np.eye(K.shape[0]), check_finite=False)
            Z = sla.cho_solve(cf, Y, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            continue
        if np.all(np.isfinite(Z)):
            if ridge:
                log.debug("solve_spd: used ridge %.3g", ridge)
            return Z
    raise SolverError("matrix is not positive definite even after ridge retry")


def _diag_of(D) -> np.ndarray:
    d = D.diag if isinstance(D, ThetaDiag) else np.asarray(D, dtype=float)
    if np.any(d <= 0):
        raise ValueError("diagonal weights must be positive")
    return d


def _check_ab(alpha: float, beta: float) -> None:
    if alpha < 0 or beta < 0 or (alpha == 0 and beta == 0):
        raise ValueError("alpha and beta must be nonnegative and not both zero")


def solve_A_direct(U, D_A, alpha: float, beta: float) -> np.ndarray:
    """``A = alpha (alpha U U^T + beta diag(D_A))^{-1} U`` via a d x d solve."""
    _check_ab(alpha, beta)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    d = _diag_of(D_A)
    if alpha == 0:
        return np.zeros_like(U)
    K = alpha * (U @ U.T) + beta * np.diag(d)
    return solve_spd(K, alpha * U)


def solve_A_woodbury(U, D_A, alpha: float, beta: float) -> np.ndarray:
    """Same result as :func:`solve_A_direct` with only a c x c inner solve.

    Uses ``(alpha U U^T + beta D)^{-1} = (1/beta)[D^-1 - D^-1 U (U^T D^-1 U
    + (beta/alpha) I)^-1 U^T D^-1]``.  Multiplying through by ``alpha U``
    collapses the bracket to ``D^-1 U (U^T D^-1 U + (beta/alpha) I)^-1``,
    which is what is evaluated (no subtractive cancellation).
    """
    _check_ab(alpha, beta)
    if alpha == 0 or beta == 0:
        return solve_A_direct(U, D_A, alpha, beta)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    P = U / _diag_of(D_A)[:, None]
    inner = U.T @ P + (beta / alpha) * np.eye(U.shape[1])
    return solve_spd(inner, P.T).T
