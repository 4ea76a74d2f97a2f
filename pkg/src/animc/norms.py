"""Matrix norms, including the row-wise theta-norm and its gradient operator.

For a row norm ``s_i = ||B_i||_2`` the theta-norm is

    ||B||_theta = sum_i (1 + theta) s_i^2 / (1 + theta s_i)

which tends to ``||B||_F^2`` as theta -> 0 and to ``||B||_{2,1}`` as
theta -> inf.  Its gradient is ``diag(D) B`` with

    D_i = (1 + theta)(2 + theta s_i) / (1 + theta s_i)^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_FLOOR = 1e-12


@dataclass(frozen=True)
class ThetaDiag:
    diag: np.ndarray
    theta: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.diag, dtype=dtype)

    def apply(self, B: np.ndarray) -> np.ndarray:
        """Left-multiply ``B`` by ``diag(self.diag)``."""
        return self.diag[:, None] * B


def _check_theta(theta: float) -> None:
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")


def row_norms(B: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.atleast_2d(np.asarray(B, dtype=float)), axis=1)


def frobenius_norm(B) -> float:
    return float(np.sqrt(np.sum(np.square(np.asarray(B, dtype=float)))))


def l21_norm(B) -> float:
    return float(np.sum(row_norms(B)))


def theta_norm(B, theta: float) -> float:
    _check_theta(theta)
    s = row_norms(B)
    return float(np.sum((1.0 + theta) * s**2 / (1.0 + theta * s)))


def theta_diag(B, theta: float, floor: float = DEFAULT_FLOOR) -> ThetaDiag:
    """Diagonal of the gradient operator; row norms below ``floor`` are floored."""
    _check_theta(theta)
    s = np.maximum(row_norms(B), floor)
    ts = theta * s
    return ThetaDiag((1.0 + theta) * (2.0 + ts) / (1.0 + ts) ** 2, float(theta))


def theta_norm_gradient(B, theta: float, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    return theta_diag(B, theta, floor).apply(B)
