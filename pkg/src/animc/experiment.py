"""Fit dispatch and the repeated-trial sweep used by the command line."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baselines import (IterControls, naive_incomplete_fit, rmf_fit, semi_nmf_fit,
                        semi_rnmf_fit)
from .core import AnimcConfig, fit, predict_labels
from .data import Hyperparams, MultiViewDataset
from .errors import AnimcError
from .metrics import MetricBundle, evaluate
from .perturb import PerturbSpec, perturb

ALGOS = ("animc", "rmf", "semi-nmf", "semi-rnmf", "naive")
# algorithms that run on the vertically stacked (zero-filled) views
CONCAT_ALGOS = ("rmf", "semi-nmf", "semi-rnmf")

SWEEP_HEADER = ["algo", "per", "noise_rate", "alpha", "beta", "r", "repeat", "seed",
                "acc", "nmi", "purity", "iters", "seconds", "status"]


@dataclass(frozen=True)
class FitParams:
    alpha: float = 0.1
    beta: float = 10.0
    r: float = 0.2
    theta_v: float = 0.01
    theta_a: float = 100.0
    max_iter: int = 40
    tol: float = 1e-6
    label_mode: str = "kmeans"
    soft_boundary: bool = True
    freeze_weights: bool = False

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(alpha=self.alpha, beta=self.beta, r=self.r, theta_V=self.theta_v,
                           theta_A=self.theta_a, max_iter=self.max_iter, rel_tol=self.tol)


@dataclass
class FitOutcome:
    algo: str
    V: np.ndarray
    U: list
    A: Optional[list] = None
    w: Optional[np.ndarray] = None
    iterations: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    r_objective: Optional[list] = None
    weights: Optional[list] = None

    @property
    def iterations_run(self) -> int:
        return self.iterations[-1] if self.iterations else 0


def stack_views(ds: MultiViewDataset) -> np.ndarray:
    return np.vstack(ds.Xs)


def run_fit(ds: MultiViewDataset, algo: str, params: FitParams = FitParams(),
            seed: int = 0) -> FitOutcome:
    if algo not in ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
    if algo == "animc":
        cfg = AnimcConfig(hp=params.hyperparams(), enable_soft_boundary=params.soft_boundary,
                          freeze_weights=params.freeze_weights, label_mode=params.label_mode,
                          seed=seed)
        state, tr = fit(ds, cfg)
        return FitOutcome(algo, state.V, list(state.U), list(state.A), state.w,
                          tr.iteration, tr.objective, tr.r_objective, tr.weights)
    ctrl = IterControls(max_iter=params.max_iter, rel_tol=params.tol, seed=seed)
    if algo == "naive":
        res = naive_incomplete_fit(ds, params.alpha, params.r, ctrl)
        U = list(res.U)
    else:
        X = stack_views(ds)
        if algo == "rmf":
            res = rmf_fit(X, ds.c, params.alpha, ctrl)
        elif algo == "semi-rnmf":
            res = semi_rnmf_fit(X, ds.c, params.alpha, ctrl)
        else:
            res = semi_nmf_fit(X, ds.c, ctrl)
        U = [res.U]
    its = list(range(len(res.objective_trace)))
    return FitOutcome(algo, res.V, U, iterations=its, objective=list(res.objective_trace))


def labels_for(outcome_or_V, c: int, label_mode: str = "kmeans", seed: int = 0) -> np.ndarray:
    V = outcome_or_V.V if isinstance(outcome_or_V, FitOutcome) else outcome_or_V
    return predict_labels(np.asarray(V), c, label_mode, seed)


def score(ds: MultiViewDataset, V, label_mode: str = "kmeans", seed: int = 0) -> MetricBundle:
    if ds.labels is None:
        raise AnimcError("dataset has no ground-truth labels")
    return evaluate(labels_for(V, ds.c, label_mode, seed), ds.labels)


# ------------------------------------------------------------------ sweep


@dataclass(frozen=True)
class SweepGrid:
    pers: Sequence[float]
    algos: Sequence[str]
    alphas: Sequence[float] = (0.1,)
    betas: Sequence[float] = (10.0,)
    rs: Sequence[float] = (0.2,)
    noise_rates: Sequence[float] = (0.0,)
    noise_variance: float = 0.0
    normalize: bool = False
    repeats: int = 10

    def __post_init__(self):
        for name in ("pers", "algos", "alphas", "betas", "rs", "noise_rates"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep grid has no values for {name}")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        for a in self.algos:
            if a not in ALGOS:
                raise ValueError(f"unknown algorithm {a!r}")

    def settings(self):
        """(algo, alpha, beta, r) combinations; beta and r only vary for animc."""
        for algo in self.algos:
            if algo == "animc":
                for a, b, r in itertools.product(self.alphas, self.betas, self.rs):
                    yield algo, a, b, r
            else:
                for a in self.alphas:
                    yield algo, a, None, None


def repeat_seed(root: int, i_per: int, i_noise: int, repeat: int) -> int:
    return int(np.random.SeedSequence([root, i_per, i_noise, repeat]).generate_state(1)[0])


def _sweep_cell(ds: MultiViewDataset, grid: SweepGrid, base: FitParams, per: float,
                noise_rate: float, repeat: int, seed: int, timing: bool) -> list[list]:
    """All algorithm rows for one perturbed copy of the dataset."""
    s_perturb, s_fit = (int(s) for s in np.random.SeedSequence(seed).generate_state(2))
    rows = []
    try:
        data = perturb(ds, PerturbSpec(per=per, noise_rate=noise_rate,
                                       noise_variance=grid.noise_variance,
                                       normalize_first=grid.normalize, seed=s_perturb))
    except (AnimcError, ValueError) as exc:
        data, fail = None, f"error: {exc}"
    for algo, a, b, r in grid.settings():
        row = [algo, per, noise_rate, a, b, r, repeat, seed]
        if data is None:
            rows.append(row + [None] * 5 + [fail])
            continue
        params = FitParams(**{**base.__dict__, "alpha": a,
                              "beta": base.beta if b is None else b,
                              "r": base.r if r is None else r})
        t0 = time.perf_counter()
        try:
            out = run_fit(data, algo, params, s_fit)
            mb = score(data, out.V, params.label_mode, s_fit)
        except (AnimcError, ValueError, ArithmeticError) as exc:
            rows.append(row + [None] * 5 + [f"error: {exc}"])
            continue
        secs = time.perf_counter() - t0 if timing else None
        rows.append(row + [mb.acc, mb.nmi, mb.purity, out.iterations_run, secs, "ok"])
    return rows


def _summary_rows(rows: list[list], timing: bool) -> list[list]:
    groups: dict = {}
    for row in rows:
        if row[-1] == "ok":
            groups.setdefault(tuple(row[:6]), []).append(row)
    out = []
    for key, members in groups.items():
        vals = np.array([[r[8], r[9], r[10], r[11]] for r in members], dtype=float)
        secs = np.array([r[12] for r in members], dtype=float) if timing else None
        for tag, f in (("mean", np.mean), ("std", np.std)):
            stats = f(vals, axis=0)
            out.append(list(key) + [tag, None] + list(stats)
                       + [None if secs is None else float(f(secs)), f"n={len(members)}"])
    return out


def run_sweep(ds: MultiViewDataset, grid: SweepGrid, base: FitParams = FitParams(),
              seed: int = 0, timing: bool = False, jobs: int = 1) -> list[list]:
    """Rows of the results table followed by per-setting mean and std rows.

    Every (per, noise rate, repeat) cell gets its own seed, derived from
    ``seed`` and the cell's grid indices, so results do not depend on
    ``jobs``.  All algorithms in a cell see the same perturbed data.
    """
    cells = [(per, nr, rep, repeat_seed(seed, i, j, rep))
             for i, per in enumerate(grid.pers)
             for j, nr in enumerate(grid.noise_rates)
             for rep in range(grid.repeats)]
    args = [(ds, grid, base, per, nr, rep, s, timing) for per, nr, rep, s in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_cell, *zip(*args)))
    else:
        chunks = [_sweep_cell(*a) for a in args]
    rows = [row for chunk in chunks for row in chunk]
    return rows + _summary_rows(rows, timing)
