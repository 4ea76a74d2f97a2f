"""Alternating optimizer with adaptive view weights for multi-view data with missing instances.

The minimized objective is

    L = sum_v [ w_v ||G_v * (X_v - U_v V^T)||_F^2
                + alpha ||A_v^T U_v - I||_F^2 + beta ||A_v||_theta_A ]
        + alpha ||V||_theta_V,          V >= 0,

and each outer iteration runs U -> A -> V (+ column normalization) -> w.
The A and V steps are iteratively reweighted: the theta-norm is replaced by
its quadratic majorizer at the current iterate, whose curvature is half the
gradient diagonal returned by :func:`animc.norms.theta_diag`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .data import Hyperparams, ModelState, MultiViewDataset, validate_dataset
from .errors import NumericError, SolverError
from .metrics import kmeans
from .norms import theta_diag, theta_norm
from .solvers import SylvesterProblem, solve_A_woodbury, solve_sylvester

log = logging.getLogger(__name__)

LabelMode = Literal["kmeans", "argmax"]


@dataclass(frozen=True)
class AnimcConfig:
    hp: Hyperparams = field(default_factory=Hyperparams)
    enable_soft_boundary: bool = True
    freeze_weights: bool = False
    label_mode: LabelMode = "kmeans"
    seed: int = 0
    # multiplies the boundary branch of the weight rule; 0.5 gives the variant
    # where the cap is half the inverse square-root residual
    boundary_scale: float = 1.0
    normalize: bool = True

    def __post_init__(self):
        if self.label_mode not in ("kmeans", "argmax"):
            raise ValueError(f"unknown label_mode {self.label_mode!r}")
        if self.boundary_scale <= 0:
            raise ValueError("boundary_scale must be positive")


@dataclass
class IterationTrace:
    iteration: list[int] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    r_objective: list[float] = field(default_factory=list)
    weights: list[np.ndarray] = field(default_factory=list)
    residual_norms: list[np.ndarray] = field(default_factory=list)
    rel_tol: float = 1e-6

    def record(self, it: int, obj: float, robj: float, w, res) -> None:
        if not np.isfinite(obj):
            raise NumericError(f"objective became non-finite at iteration {it}")
        self.iteration.append(it)
        self.objective.append(float(obj))
        self.r_objective.append(float(robj))
        self.weights.append(np.array(w, dtype=float))
        self.residual_norms.append(np.array(res, dtype=float))

    def __len__(self) -> int:
        return len(self.objective)

    def relative_changes(self) -> np.ndarray:
        obj = np.asarray(self.objective)
        if obj.size < 2:
            return np.empty(0)
        return np.abs(np.diff(obj)) / np.maximum(np.abs(obj[:-1]), np.finfo(float).tiny)

    @property
    def converged(self) -> bool:
        return False if len(self) < 2 else bool(self.relative_changes()[-1] < self.rel_tol)


# ---------------------------------------------------------------- kernels


def pos_part(B: np.ndarray) -> np.ndarray:
    return (np.abs(B) + B) / 2


def neg_part(B: np.ndarray) -> np.ndarray:
    return (np.abs(B) - B) / 2


def masked_u_solve(X: np.ndarray, g: np.ndarray, V: np.ndarray, w: float,
                   N: np.ndarray, C_extra) -> np.ndarray:
    """Minimize ``w ||(X - U V^T) T||^2 + <penalty>`` over U.

    The penalty enters through its normal-equation pieces: ``N U`` on the
    left-hand side and ``C_extra`` on the right, giving the Sylvester system
    ``U (w V^T T V) + N U = w X T V + C_extra``.
    """
    Vg = V * g[:, None]
    M = w * (Vg.T @ V)
    C = w * ((X * g[None, :]) @ V) + C_extra
    return solve_sylvester(SylvesterProblem(M, N, C))


def multiplicative_v_step(Xs: Sequence[np.ndarray], gs: Sequence[np.ndarray],
                          Us: Sequence[np.ndarray], V: np.ndarray, w,
                          row_penalty, floor: float) -> np.ndarray:
    """One nonnegativity-preserving update of V.

    Decreases ``sum_v w_v ||(X_v - U_v V^T) T_v||^2 + sum_i p_i ||V_i||^2``
    where ``p = row_penalty`` (scalar or length-n).  The quadratic form is
    split through the positive and negative parts of each ``U_v^T U_v`` so
    that the square-root rule keeps its auxiliary-function guarantee.
    """
    p = np.broadcast_to(np.asarray(row_penalty, dtype=float), (V.shape[0],))
    Z1 = np.zeros_like(V)
    Zpos = p[:, None] * V
    Zneg = np.zeros_like(V)
    for X, g, U, wv in zip(Xs, gs, Us, w):
        UtU = U.T @ U
        Z1 += wv * ((X * g[None, :]).T @ U)
        gv = wv * g[:, None]
        Zpos += gv * (V @ pos_part(UtU))
        Zneg += gv * (V @ neg_part(UtU))
    numer = pos_part(Z1) + Zneg
    denom = np.maximum(neg_part(Z1) + Zpos, floor)
    return V * np.sqrt(numer / denom)


# ------------------------------------------------------------- objective


def _sq(B: np.ndarray) -> float:
    return float(np.sum(np.square(B)))


def _masked_sq(X, g, U, V) -> float:
    return _sq((X - U @ V.T) * g[None, :])


def objective_terms(ds: MultiViewDataset, state: ModelState, hp: Hyperparams) -> dict:
    """Per-term breakdown of the objective; raises on the first non-finite term."""
    c = state.V.shape[1]
    I = np.eye(c)
    terms = {"fit": 0.0, "regression": 0.0, "A_penalty": 0.0}
    for v, (X, g) in enumerate(zip(ds.Xs, ds.gs)):
        U, A = state.U[v], state.A[v]
        parts = {
            "fit": state.w[v] * _masked_sq(X, g, U, state.V),
            "regression": hp.alpha * _sq(A.T @ U - I),
            "A_penalty": hp.beta * theta_norm(A, hp.theta_A),
        }
        for key, val in parts.items():
            if not np.isfinite(val):
                raise NumericError(f"non-finite {key} term in view {v}")
            terms[key] += val
    terms["V_penalty"] = hp.alpha * theta_norm(state.V, hp.theta_V)
    if not np.isfinite(terms["V_penalty"]):
        raise NumericError("non-finite V_penalty term")
    return terms


def objective(ds: MultiViewDataset, state: ModelState, hp: Hyperparams) -> float:
    return float(sum(objective_terms(ds, state, hp).values()))


def r_objective(ds: MultiViewDataset, state: ModelState, hp: Hyperparams) -> float:
    """Unweighted power-r diagnostic with Frobenius regularizers, summed over views."""
    total = 0.0
    vsq = _sq(state.V)
    for v, (X, g) in enumerate(zip(ds.Xs, ds.gs)):
        total += np.sqrt(_masked_sq(X, g, state.U[v], state.V)) ** hp.r
        total += hp.alpha * (_sq(state.U[v]) + vsq)
    return float(total)


def u_subobjective(ds, state, hp, v: int) -> float:
    X, g = ds.Xs[v], ds.gs[v]
    U, A = state.U[v], state.A[v]
    return state.w[v] * _masked_sq(X, g, U, state.V) + hp.alpha * _sq(A.T @ U - np.eye(U.shape[1]))


def a_subobjective(state, hp, v: int) -> float:
    U, A = state.U[v], state.A[v]
    return hp.alpha * _sq(A.T @ U - np.eye(U.shape[1])) + hp.beta * theta_norm(A, hp.theta_A)


def v_subobjective(ds, state, hp) -> float:
    fit = sum(state.w[v] * _masked_sq(X, g, state.U[v], state.V)
              for v, (X, g) in enumerate(zip(ds.Xs, ds.gs)))
    return float(fit + hp.alpha * theta_norm(state.V, hp.theta_V))


# ----------------------------------------------------------------- steps


def residual_norms(ds: MultiViewDataset, state: ModelState) -> tuple[np.ndarray, np.ndarray]:
    """Return (masked, unmasked) Frobenius norms of ``X_v - U_v V^T`` per view."""
    masked, full = [], []
    for v, (X, g) in enumerate(zip(ds.Xs, ds.gs)):
        E = X - state.U[v] @ state.V.T
        full.append(np.linalg.norm(E))
        masked.append(np.linalg.norm(E * g[None, :]))
    return np.array(masked), np.array(full)


def weight_branches(ds, state, r: float, floor: float = 1e-12,
                    boundary_scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """The two candidates of the weight rule: unbounded and boundary branch."""
    masked, full = residual_norms(ds, state)
    unbounded = 0.5 * r * np.maximum(masked, floor) ** (0.5 * r - 1.0)
    boundary = boundary_scale * np.maximum(full, floor) ** -0.5
    return unbounded, boundary


def update_weights(ds, state, r: float, soft_boundary: bool = True,
                   floor: float = 1e-12, boundary_scale: float = 1.0) -> np.ndarray:
    if not 0 < r <= 2:
        raise ValueError(f"r must lie in (0, 2], got {r}")
    unbounded, boundary = weight_branches(ds, state, r, floor, boundary_scale)
    return np.minimum(unbounded, boundary) if soft_boundary else unbounded


def update_U(ds: MultiViewDataset, state: ModelState, hp: Hyperparams) -> list[np.ndarray]:
    out = []
    for v, (X, g) in enumerate(zip(ds.Xs, ds.gs)):
        A = state.A[v]
        try:
            out.append(masked_u_solve(X, g, state.V, state.w[v],
                                      hp.alpha * (A @ A.T), hp.alpha * A))
        except SolverError as exc:
            raise SolverError(f"U step, view {v}: {exc}") from exc
    return out


def update_A(state: ModelState, hp: Hyperparams) -> list[np.ndarray]:
    if hp.alpha == 0:
        # no regression term: the penalty alone drives A to zero
        return [np.zeros_like(A) for A in state.A]
    out = []
    for v, (U, A) in enumerate(zip(state.U, state.A)):
        curvature = theta_diag(A, hp.theta_A, hp.epsilon_floor).diag / 2
        try:
            out.append(solve_A_woodbury(U, curvature, hp.alpha, hp.beta))
        except SolverError as exc:
            raise SolverError(f"A step, view {v}: {exc}") from exc
    return out


def update_V(ds: MultiViewDataset, state: ModelState, hp: Hyperparams) -> np.ndarray:
    curvature = hp.alpha * theta_diag(state.V, hp.theta_V, hp.epsilon_floor).diag / 2
    return multiplicative_v_step(ds.Xs, ds.gs, state.U, state.V, state.w,
                                 curvature, hp.epsilon_floor)


def normalize(state: ModelState, floor: float = 1e-12) -> ModelState:
    """Rescale so V has unit column sums: ``U <- U Q``, ``V <- V Q^-1``."""
    q = np.maximum(state.V.sum(axis=0), floor)
    return state.evolve(U=tuple(U * q[None, :] for U in state.U), V=state.V / q[None, :])


# ------------------------------------------------------------------ fit


def initial_state(ds: MultiViewDataset, cfg: AnimcConfig) -> ModelState:
    """Seeded start: V ~ U(0.1, 1), w = 1/m, U and A from one step each."""
    hp = cfg.hp
    rng = np.random.default_rng(cfg.seed)
    V = rng.uniform(0.1, 1.0, size=(ds.n, ds.c))
    A0 = tuple(rng.uniform(0.0, 0.01, size=(d, ds.c)) for d in ds.dims)
    w = np.full(ds.m, 1.0 / ds.m)
    state = ModelState(U=tuple(np.zeros((d, ds.c)) for d in ds.dims), A=A0, V=V, w=w)
    if cfg.normalize:
        state = state.evolve(V=V / V.sum(axis=0, keepdims=True))
    state = state.evolve(U=tuple(update_U(ds, state, hp)))
    return state.evolve(A=tuple(update_A(state, hp)))


def _record(trace: IterationTrace, it: int, ds, state, hp) -> None:
    masked, _ = residual_norms(ds, state)
    trace.record(it, objective(ds, state, hp), r_objective(ds, state, hp), state.w, masked)


def fit(ds: MultiViewDataset, cfg: AnimcConfig = AnimcConfig(),
        state: Optional[ModelState] = None) -> tuple[ModelState, IterationTrace]:
    """Run the four-step alternating optimization until ``rel_tol`` or ``max_iter``."""
    validate_dataset(ds)
    if ds.c < 2:
        raise ValueError("fit needs at least two clusters")
    hp = cfg.hp
    state = initial_state(ds, cfg) if state is None else state
    trace = IterationTrace(rel_tol=hp.rel_tol)
    _record(trace, 0, ds, state, hp)
    for it in range(1, hp.max_iter + 1):
        try:
            state = state.evolve(U=tuple(update_U(ds, state, hp)))
            state = state.evolve(A=tuple(update_A(state, hp)))
            state = state.evolve(V=update_V(ds, state, hp))
            if cfg.normalize:
                state = normalize(state, hp.epsilon_floor)
            if not cfg.freeze_weights:
                state = state.evolve(w=update_weights(
                    ds, state, hp.r, cfg.enable_soft_boundary,
                    hp.epsilon_floor, cfg.boundary_scale))
            _record(trace, it, ds, state, hp)
        except (SolverError, NumericError) as exc:
            raise type(exc)(f"iteration {it}: {exc}") from exc
        if trace.converged:
            log.debug("converged after %d iterations", it)
            break
    return state, trace


def predict_labels(state_or_V, c: int, label_mode: LabelMode = "kmeans",
                   seed: int = 0, restarts: int = 10) -> np.ndarray:
    V = state_or_V.V if isinstance(state_or_V, ModelState) else np.asarray(state_or_V)
    if label_mode == "argmax":
        return np.argmax(V, axis=1)
    if label_mode == "kmeans":
        return kmeans(V, c, restarts=restarts, seed=seed)
    raise ValueError(f"unknown label_mode {label_mode!r}")
