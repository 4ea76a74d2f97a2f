"""Synthetic multi-view data, missing-instance masking and Gaussian noise."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .data import MultiViewDataset
from .errors import ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerturbSpec:
    per: float = 0.0
    noise_rate: float = 0.0
    noise_variance: float = 0.0
    normalize_first: bool = False
    noise_mode: Literal["entry", "instance"] = "entry"
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.per <= 0.9:
            raise ValueError(f"per must lie in [0, 0.9], got {self.per}")
        if not 0 <= self.noise_rate <= 1:
            raise ValueError(f"noise_rate must lie in [0, 1], got {self.noise_rate}")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")
        if self.noise_mode not in ("entry", "instance"):
            raise ValueError(f"unknown noise_mode {self.noise_mode!r}")


def _child_rngs(seed: int, k: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


def cluster_sizes(n: int, c: int) -> np.ndarray:
    """``floor(n/c)`` per cluster with the remainder spread over the first ones."""
    sizes = np.full(c, n // c)
    sizes[: n % c] += 1
    return sizes


def synth_generate(n: int = 200, m: int = 2, c: int = 4, dims: Optional[Sequence[int]] = None,
                   separation: float = 5.0, seed: int = 0, name: str = "synthetic",
                   feature_noise: float = 1.0, offset: Optional[float] = None) -> MultiViewDataset:
    """Gaussian clusters sharing one label assignment across m views.

    View v has c centroids ``(separation / sqrt(2)) * Q_v[:, k]`` where
    ``Q_v`` has random orthonormal columns, so any two centroids of a view
    lie exactly ``separation`` apart (when ``d_v >= c``).  All centroids of
    a view are shifted by a constant positive vector of norm ``offset``
    (default ``separation``), which keeps the clusters away from the origin
    the way nonnegative real-world features are.  Each instance is its
    cluster's centroid plus ``N(0, feature_noise^2 I)``, drawn independently
    per view.

    Parameters
    ----------
    n, m, c : int
        Instances, views and clusters.  Cluster sizes differ by at most one.
    dims : sequence of int, optional
        Feature dimension per view; defaults to ``max(2c, 10)`` for each.
    separation : float
        Pairwise centroid distance in units of the per-feature noise scale.
    offset : float, optional
        Distance of the view mean from the origin.  Without it, clusters
        surround the origin and nonnegative factorizations need very wide
        cones, which makes the latent coefficients poorly conditioned.
    seed : int
        Seeds the label shuffle and every view independently.
    """
    dims = [max(2 * c, 10)] * m if dims is None else list(dims)
    if len(dims) != m:
        raise ValidationError(f"dims has {len(dims)} entries but m={m}")
    if n < c or c < 1 or m < 1 or min(dims) < 1:
        raise ValidationError("need n >= c >= 1, m >= 1 and positive dims")
    offset = separation if offset is None else offset
    if separation < 0 or feature_noise < 0 or offset < 0:
        raise ValidationError("separation, offset and feature_noise must be nonnegative")
    rng_labels, *view_rngs = _child_rngs(seed, m + 1)
    labels = rng_labels.permutation(np.repeat(np.arange(c), cluster_sizes(n, c)))
    Xs = []
    for d, rng in zip(dims, view_rngs):
        Q = rng.standard_normal((d, c))
        if d >= c:
            Q, _ = np.linalg.qr(Q)
        else:
            Q /= np.linalg.norm(Q, axis=0, keepdims=True)
        centroids = (separation / np.sqrt(2.0)) * Q + offset / np.sqrt(d)
        Xs.append(centroids[:, labels] + feature_noise * rng.standard_normal((d, n)))
    return MultiViewDataset.from_arrays(Xs, c, labels=labels, name=name,
                                        names=[f"view{v}" for v in range(m)])


def missing_masks(gs: Sequence[np.ndarray], per: float,
                  rng: np.random.Generator) -> tuple[list[np.ndarray], int]:
    """Drop ``floor(per*n)`` instances per view, then repair full absences.

    Each view draws its removals independently and uniformly.  An instance
    left absent from every view is restored in one randomly chosen view from
    which this call removed it.  Returns the new presence vectors and the
    number of repairs.
    """
    m, n = len(gs), gs[0].shape[0]
    k = int(np.floor(per * n))
    if k and m * (n - k) < n:
        raise ValidationError(
            f"per={per} leaves {m * (n - k)} presence slots for {n} instances; "
            "full coverage is impossible")
    old = np.array(gs, dtype=bool)
    new = old.copy()
    removed = np.zeros_like(old)
    for v in range(m):
        drop = rng.choice(n, size=k, replace=False)
        removed[v, drop] = old[v, drop]
        new[v, drop] = False
    orphans = np.flatnonzero(~new.any(axis=0))
    for i in orphans:
        candidates = np.flatnonzero(removed[:, i])
        if candidates.size == 0:
            raise ValidationError(f"instance {i} was already absent from every view")
        new[rng.choice(candidates), i] = True
    return [row.astype(float) for row in new], int(orphans.size)


def apply_missing(ds: MultiViewDataset, per: float, seed: int = 0) -> MultiViewDataset:
    if not 0 <= per <= 0.9:
        raise ValueError(f"per must lie in [0, 0.9], got {per}")
    if per == 0:
        return ds
    gs, repairs = missing_masks(ds.gs, per, np.random.default_rng(seed))
    if repairs:
        log.info("apply_missing: restored %d instance(s) that were absent from all views",
                 repairs)
    return ds.with_views(Xs=[X * g[None, :] for X, g in zip(ds.Xs, gs)], gs=gs)


def add_gaussian_noise(ds: MultiViewDataset, noise_rate: float, variance: float,
                       normalize_first: bool = False, seed: int = 0,
                       mode: Literal["entry", "instance"] = "entry") -> MultiViewDataset:
    """Add ``N(0, variance)`` to a random ``noise_rate`` share of the present data.

    ``mode="entry"`` samples individual entries among present columns;
    ``mode="instance"`` samples present instances and perturbs all their
    features.  With ``normalize_first`` every view is first scaled to unit
    maximum absolute entry.  Absent columns stay exactly zero.
    """
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if not 0 <= noise_rate <= 1:
        raise ValueError("noise_rate must lie in [0, 1]")
    if mode not in ("entry", "instance"):
        raise ValueError(f"unknown noise mode {mode!r}")
    sd = float(np.sqrt(variance))
    out = []
    for X, g, rng in zip(ds.Xs, ds.gs, _child_rngs(seed, ds.m)):
        X = np.array(X, dtype=float)
        if normalize_first:
            scale = np.max(np.abs(X), initial=0.0)
            if scale > 0:
                X /= scale
        if sd > 0 and noise_rate > 0:
            cols = np.flatnonzero(g)
            if mode == "entry":
                cells = X.shape[0] * cols.size
                pick = rng.choice(cells, size=int(round(noise_rate * cells)), replace=False)
                rows, ci = np.unravel_index(pick, (X.shape[0], cols.size))
                X[rows, cols[ci]] += sd * rng.standard_normal(pick.size)
            else:
                chosen = rng.choice(cols, size=int(round(noise_rate * cols.size)), replace=False)
                X[:, chosen] += sd * rng.standard_normal((X.shape[0], chosen.size))
        out.append(X)
    return ds.with_views(Xs=out)


def perturb(ds: MultiViewDataset, spec: PerturbSpec) -> MultiViewDataset:
    """Masking followed by noise, with independent seeds for the two stages."""
    s_mask, s_noise = np.random.SeedSequence(spec.seed).generate_state(2)
    ds = apply_missing(ds, spec.per, int(s_mask))
    if spec.normalize_first or (spec.noise_variance > 0 and spec.noise_rate > 0):
        ds = add_gaussian_noise(ds, spec.noise_rate, spec.noise_variance,
                                spec.normalize_first, int(s_noise), spec.noise_mode)
    return ds
