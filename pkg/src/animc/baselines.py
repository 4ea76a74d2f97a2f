"""Single-view factorization baselines and the unweighted incomplete extension.

* RMF: ``||X - U V^T||^2 + alpha (||U||^2 + ||V||^2)`` with closed-form
  alternating updates.
* semi-NMF: ``||X - U V^T||^2`` with ``V >= 0``; least-squares U step and
  square-root multiplicative V step.
* semi-RNMF: semi-NMF plus the RMF regularizer.
* naive incomplete: masked semi-RNMF summed over views with every view
  weight fixed at 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import masked_u_solve, multiplicative_v_step
from .data import MultiViewDataset, validate_dataset
from .errors import ValidationError
from .solvers import solve_spd


@dataclass(frozen=True)
class IterControls:
    max_iter: int = 100
    rel_tol: float = 1e-6
    epsilon_floor: float = 1e-12
    seed: int = 0


@dataclass
class FactorizationResult:
    U: object  # one basis matrix, or a list of them for multi-view fits
    V: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    iterations_run: int = 0


def _init_V(n: int, c: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.1, 1.0, size=(n, c))


def _stop(trace: list[float], rel_tol: float) -> bool:
    prev, cur = trace[-2], trace[-1]
    return abs(prev - cur) <= rel_tol * max(abs(prev), np.finfo(float).tiny)


def _check_rank(X: np.ndarray, c: int) -> None:
    if not 1 <= c <= min(X.shape):
        raise ValidationError(f"c={c} must satisfy 1 <= c <= min{X.shape}")


def _ls_factor(X: np.ndarray, F: np.ndarray, alpha: float) -> np.ndarray:
    """``X F (alpha I + F^T F)^{-1}``."""
    K = F.T @ F + alpha * np.eye(F.shape[1])
    return solve_spd(K, (X @ F).T).T


def rmf_objective(X, U, V, alpha) -> float:
    return float(np.sum((X - U @ V.T) ** 2) + alpha * (np.sum(U**2) + np.sum(V**2)))


def rmf_fit(X, c: int, alpha: float, ctrl: IterControls = IterControls(),
            V0: Optional[np.ndarray] = None) -> FactorizationResult:
    X = np.asarray(X, dtype=float)
    _check_rank(X, c)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    V = _init_V(X.shape[1], c, ctrl.seed) if V0 is None else np.array(V0, dtype=float)
    U = _ls_factor(X, V, alpha)
    res = FactorizationResult(U, V, [rmf_objective(X, U, V, alpha)])
    for it in range(1, ctrl.max_iter + 1):
        V = _ls_factor(X.T, U, alpha)
        U = _ls_factor(X, V, alpha)
        res.objective_trace.append(rmf_objective(X, U, V, alpha))
        res.iterations_run = it
        if _stop(res.objective_trace, ctrl.rel_tol):
            break
    res.U, res.V = U, V
    return res


def semi_rnmf_fit(X, c: int, alpha: float, ctrl: IterControls = IterControls(),
                  V0: Optional[np.ndarray] = None) -> FactorizationResult:
    X = np.asarray(X, dtype=float)
    _check_rank(X, c)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    V = _init_V(X.shape[1], c, ctrl.seed) if V0 is None else np.array(V0, dtype=float)
    if np.any(V < 0):
        raise ValueError("initial V must be nonnegative")
    ones = np.ones(X.shape[1])
    U = _ls_factor(X, V, alpha)
    res = FactorizationResult(U, V, [rmf_objective(X, U, V, alpha)])
    for it in range(1, ctrl.max_iter + 1):
        V = multiplicative_v_step([X], [ones], [U], V, [1.0], alpha, ctrl.epsilon_floor)
        U = _ls_factor(X, V, alpha)
        res.objective_trace.append(rmf_objective(X, U, V, alpha))
        res.iterations_run = it
        if _stop(res.objective_trace, ctrl.rel_tol):
            break
    res.U, res.V = U, V
    return res


def semi_nmf_fit(X, c: int, ctrl: IterControls = IterControls(),
                 V0: Optional[np.ndarray] = None) -> FactorizationResult:
    return semi_rnmf_fit(X, c, 0.0, ctrl, V0)


def naive_objective(ds: MultiViewDataset, Us, V, alpha: float) -> float:
    vsq = float(np.sum(V**2))
    total = 0.0
    for X, g, U in zip(ds.Xs, ds.gs, Us):
        total += np.sum(((X - U @ V.T) * g[None, :]) ** 2) + alpha * (np.sum(U**2) + vsq)
    return float(total)


def naive_r_objective(ds: MultiViewDataset, Us, V, alpha: float, r: float) -> float:
    vsq = float(np.sum(V**2))
    total = 0.0
    for X, g, U in zip(ds.Xs, ds.gs, Us):
        total += np.linalg.norm((X - U @ V.T) * g[None, :]) ** r
        total += alpha * (np.sum(U**2) + vsq)
    return float(total)


def naive_incomplete_fit(ds: MultiViewDataset, alpha: float, r: float = 2.0,
                         ctrl: IterControls = IterControls()) -> FactorizationResult:
    """Masked multi-view semi-RNMF with all view weights fixed at 1.

    Uses the same masked U solve and multiplicative V kernel as the
    adaptive-weight optimizer.  With unit weights the power ``r`` does not
    change the update; the trace records the squared (r = 2) objective,
    and :func:`naive_r_objective` evaluates the power-r form.
    """
    if not 0 < r <= 2:
        raise ValueError(f"r must lie in (0, 2], got {r}")
    validate_dataset(ds)
    V = _init_V(ds.n, ds.c, ctrl.seed)
    w = np.ones(ds.m)

    def u_step(V):
        c = V.shape[1]
        return [masked_u_solve(X, g, V, 1.0, alpha * np.eye(X.shape[0]), np.zeros((X.shape[0], c)))
                for X, g in zip(ds.Xs, ds.gs)]

    Us = u_step(V)
    res = FactorizationResult(Us, V, [naive_objective(ds, Us, V, alpha)])
    for it in range(1, ctrl.max_iter + 1):
        V = multiplicative_v_step(ds.Xs, ds.gs, Us, V, w, ds.m * alpha, ctrl.epsilon_floor)
        Us = u_step(V)
        res.objective_trace.append(naive_objective(ds, Us, V, alpha))
        res.iterations_run = it
        if _stop(res.objective_trace, ctrl.rel_tol):
            break
    res.U, res.V = Us, V
    return res
