"""Core value types for incomplete multi-view data and model state.

Views are stored as ``d_v x n`` matrices (features by instances).  The
presence of instance ``i`` in view ``v`` is a 0/1 entry ``g[i]``.  Masking
with the column-constant indicator matrix ``G`` is the same as right
multiplying by ``T = diag(g)``, so the library only ever scales columns and
never materializes ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, ValidationError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ViewMatrix:
    data: np.ndarray
    name: str = "view"

    def __post_init__(self):
        X = np.asarray(self.data, dtype=float)
        if X.ndim != 2:
            raise DimensionError(f"view {self.name!r} must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValidationError(f"view {self.name!r} contains non-finite entries")
        object.__setattr__(self, "data", _frozen(X))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class PresenceMask:
    """Presence vector ``g`` of one view with its derived matrix forms."""

    g: np.ndarray
    d_v: int = 1

    def __post_init__(self):
        g = np.asarray(self.g)
        if g.ndim != 1:
            raise DimensionError(f"presence vector must be 1-D, got shape {g.shape}")
        if g.size and not np.all((g == 0) | (g == 1)):
            raise ValidationError("presence vector entries must be 0 or 1")
        if int(self.d_v) < 1:
            raise ValidationError("d_v must be a positive integer")
        object.__setattr__(self, "g", _frozen(g.astype(float)))
        object.__setattr__(self, "d_v", int(self.d_v))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def G(self) -> np.ndarray:
        """Indicator matrix with column ``i`` equal to ``g[i]`` (d_v x n)."""
        return np.tile(self.g, (self.d_v, 1))

    @property
    def T(self) -> np.ndarray:
        return np.diag(self.g)

    @property
    def present(self) -> np.ndarray:
        return self.g.astype(bool)

    @property
    def missing_rate(self) -> float:
        return float(1.0 - self.g.mean()) if self.n else 0.0


def build_presence(g, d_v: int) -> PresenceMask:
    return PresenceMask(np.asarray(g), d_v)


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple[tuple[ViewMatrix, PresenceMask], ...]
    c: int
    labels: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "views", tuple((x, mk) for x, mk in self.views))
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen(np.asarray(self.labels, dtype=int)))
        object.__setattr__(self, "c", int(self.c))

    @classmethod
    def from_arrays(cls, Xs: Sequence[np.ndarray], c: int, gs=None, labels=None,
                    names=None, name: str = "dataset") -> "MultiViewDataset":
        """Build a dataset from raw ``d_v x n`` arrays; absent columns are zeroed."""
        views = []
        for v, X in enumerate(Xs):
            X = np.asarray(X, dtype=float)
            g = np.ones(X.shape[1]) if gs is None else np.asarray(gs[v], dtype=float)
            vname = names[v] if names is not None else f"view{v}"
            views.append((ViewMatrix(X * g, vname), PresenceMask(g, X.shape[0])))
        return cls(tuple(views), c, labels, name)

    @property
    def m(self) -> int:
        return len(self.views)

    @property
    def n(self) -> int:
        return self.views[0][0].n if self.views else 0

    @property
    def Xs(self) -> list[np.ndarray]:
        return [x.data for x, _ in self.views]

    @property
    def gs(self) -> list[np.ndarray]:
        return [mk.g for _, mk in self.views]

    @property
    def dims(self) -> list[int]:
        return [x.d for x, _ in self.views]

    def with_views(self, Xs=None, gs=None) -> "MultiViewDataset":
        """Copy with replaced view data and/or presence vectors."""
        Xs = self.Xs if Xs is None else Xs
        gs = self.gs if gs is None else gs
        views = tuple(
            (ViewMatrix(X, x.name), PresenceMask(g, np.shape(X)[0]))
            for X, g, (x, _) in zip(Xs, gs, self.views)
        )
        return replace(self, views=views)


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.1
    beta: float = 10.0
    r: float = 0.2
    theta_V: float = 0.01
    theta_A: float = 100.0
    max_iter: int = 40
    rel_tol: float = 1e-6
    epsilon_floor: float = 1e-12

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("alpha and beta must be nonnegative")
        if not 0 < self.r <= 2:
            raise ValidationError(f"r must lie in (0, 2], got {self.r}")
        if self.theta_V <= 0 or self.theta_A <= 0:
            raise ValidationError("theta_V and theta_A must be positive")
        if int(self.max_iter) < 1:
            raise ValidationError("max_iter must be a positive integer")
        if self.rel_tol <= 0 or self.epsilon_floor <= 0:
            raise ValidationError("rel_tol and epsilon_floor must be positive")


@dataclass(frozen=True)
class ModelState:
    U: tuple[np.ndarray, ...]
    A: tuple[np.ndarray, ...]
    V: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "U", tuple(_frozen(u) for u in self.U))
        object.__setattr__(self, "A", tuple(_frozen(a) for a in self.A))
        object.__setattr__(self, "V", _frozen(self.V))
        object.__setattr__(self, "w", _frozen(np.asarray(self.w, dtype=float)))
        if np.any(self.V < 0):
            raise ValidationError("latent matrix V must be entrywise nonnegative")
        if not (np.all(np.isfinite(self.w)) and np.all(self.w > 0)):
            raise ValidationError("view weights must be positive and finite")
        if not len(self.U) == len(self.A) == self.w.shape[0]:
            raise DimensionError("U, A and w must have one entry per view")

    def evolve(self, **changes) -> "ModelState":
        return replace(self, **changes)


def _check_conform(X: np.ndarray, g: np.ndarray, U: np.ndarray, V: np.ndarray) -> None:
    d, n = X.shape
    if g.shape != (n,) or U.ndim != 2 or V.ndim != 2 or U.shape[0] != d \
            or V.shape[0] != n or U.shape[1] != V.shape[1]:
        raise DimensionError(
            f"shapes do not conform: X {X.shape}, g {g.shape}, U {U.shape}, V {V.shape}")


def masked_residual(X, mask: PresenceMask, U, V) -> np.ndarray:
    """Return ``G * (X - U V^T)``; columns of absent instances are exactly zero."""
    X = X.data if isinstance(X, ViewMatrix) else np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    _check_conform(X, mask.g, U, V)
    E = X - U @ V.T
    return np.where(mask.present[None, :], E, 0.0)


def residual_times_T(E, mask: PresenceMask) -> np.ndarray:
    """Right-multiply ``E`` by ``T = diag(g)`` (column scaling by 0/1)."""
    E = np.asarray(E, dtype=float)
    if E.ndim != 2 or E.shape[1] != mask.n:
        raise DimensionError(f"E has shape {E.shape}, expected (*, {mask.n})")
    return E * mask.g[None, :]


@dataclass(frozen=True)
class ValidationReport:
    n: int
    m: int
    c: int
    dims: list[int]
    missing_rates: list[float]
    has_labels: bool
    warnings: list[str] = field(default_factory=list)


def validate_dataset(ds: MultiViewDataset) -> ValidationReport:
    """Check cross-view consistency and coverage; raise ``ValidationError`` on failure."""
    if ds.m == 0:
        raise ValidationError("dataset has no views")
    ns = [x.n for x, _ in ds.views]
    if len(set(ns)) != 1:
        raise ValidationError(f"inconsistent instance counts across views: {ns}")
    n = ns[0]
    for v, (x, mk) in enumerate(ds.views):
        if mk.n != n:
            raise ValidationError(f"view {v}: presence vector length {mk.n} != n={n}")
        if mk.d_v != x.d:
            raise ValidationError(f"view {v}: mask d_v={mk.d_v} != feature dim {x.d}")
    coverage = np.sum([mk.g for _, mk in ds.views], axis=0)
    absent = np.flatnonzero(coverage == 0)
    if absent.size:
        raise ValidationError(
            f"{absent.size} instance(s) absent from every view, first index {absent[0]}")
    if ds.c < 1:
        raise ValidationError("cluster count c must be positive")
    warnings = []
    if ds.labels is not None:
        if ds.labels.shape != (n,):
            raise ValidationError(f"labels have shape {ds.labels.shape}, expected ({n},)")
        if ds.labels.min() < 0 or ds.labels.max() >= ds.c:
            raise ValidationError(f"labels must lie in [0, {ds.c})")
        if np.unique(ds.labels).size < ds.c:
            warnings.append("some clusters have no labelled instance")
    return ValidationReport(
        n=n, m=ds.m, c=ds.c, dims=ds.dims,
        missing_rates=[mk.missing_rate for _, mk in ds.views],
        has_labels=ds.labels is not None, warnings=warnings,
    )
