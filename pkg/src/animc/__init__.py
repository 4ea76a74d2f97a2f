"""Multi-view clustering with per-view adaptive weights for data with missing instances and noise."""

from .baselines import naive_incomplete_fit, rmf_fit, semi_nmf_fit, semi_rnmf_fit
from .core import AnimcConfig, IterationTrace, fit, objective, predict_labels
from .data import (
    Hyperparams,
    ModelState,
    MultiViewDataset,
    PresenceMask,
    ViewMatrix,
    build_presence,
    validate_dataset,
)
from .metrics import MetricBundle, accuracy, evaluate, nmi, purity
from .perturb import PerturbSpec, apply_missing, add_gaussian_noise, perturb, synth_generate

__all__ = [
    "AnimcConfig",
    "Hyperparams",
    "IterationTrace",
    "MetricBundle",
    "ModelState",
    "MultiViewDataset",
    "PerturbSpec",
    "PresenceMask",
    "ViewMatrix",
    "accuracy",
    "add_gaussian_noise",
    "apply_missing",
    "build_presence",
    "evaluate",
    "fit",
    "naive_incomplete_fit",
    "nmi",
    "objective",
    "perturb",
    "predict_labels",
    "purity",
    "rmf_fit",
    "semi_nmf_fit",
    "semi_rnmf_fit",
    "synth_generate",
    "validate_dataset",
]

__version__ = "0.1.0"
