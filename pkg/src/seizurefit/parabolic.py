"""Weighted linear least squares for the quadratic linear-parabolic curve.

The model y = a sin(x - pi) + b (x - 10)^2 + c is linear in (a, b, c), so the
fit is a weighted linear least-squares solve. It is applied to the quadratic
couple (x, x^2) built from a filtered signal. The solve goes through an
orthogonal decomposition (numpy lstsq/SVD), not the normal equations; the
normal equations survive only as an independent test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateDof, RankDeficient, TooFewPoints

N_COEFFS = 3


@dataclass
class QuadraticPairs:
    """The couple (x, x^2) with per-point weights (1/variance)."""

    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        n = self.x.shape[0]
        if self.y.shape[0] != n or self.weights.shape[0] != n:
            raise ValueError("x, y, weights must have equal lengths")
        if n < N_COEFFS:
            raise TooFewPoints(f"need at least {N_COEFFS} points, got {n}")
        if not (np.all(np.isfinite(self.weights)) and np.all(self.weights > 0)):
            raise ValueError("weights must be positive and finite")

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass
class FitResult:
    """Fitted coefficients with covariance and 95% confidence bounds.

    cb95 is ((a_lo, a_hi), (b_lo, b_hi), (c_lo, c_hi)); covariance is the
    3x3 matrix s^2 (A^T W A)^-1 with s^2 the residual variance.
    """

    a: float
    b: float
    c: float
    covariance: np.ndarray
    dof: int
    cb95: tuple[tuple[float, float], ...]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])


def quadratic_pairs(filtered, variance_weights: bool = False) -> QuadraticPairs:
    """Form (x, x^2) from a filtered signal.

    Weights default to 1 (plain SSE). With variance_weights=True every point
    of this signal gets weight 1/var(filtered), the channel-uniform reading of
    the inverse-variance weighting.
    """
    x = np.asarray(filtered, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("filtered signal must be 1-D")
    if x.shape[0] < N_COEFFS:
        raise TooFewPoints(f"need at least {N_COEFFS} points, got {x.shape[0]}")
    if variance_weights:
        var = float(np.var(x))
        w = np.full_like(x, 1.0 / var if var > 0 else 1.0)
    else:
        w = np.ones_like(x)
    return QuadraticPairs(x=x, y=x * x, weights=w)


def design_row(x: float) -> tuple[float, float, float]:
    """Basis evaluation (sin(x - pi), (x - 10)^2, 1)."""
    return (np.sin(x - np.pi), (x - 10.0) ** 2, 1.0)


def design_matrix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.column_stack([np.sin(x - np.pi), (x - 10.0) ** 2,
                            np.ones_like(x)])


def fit_model(pairs: QuadraticPairs) -> FitResult:
    """Minimize sum w_i (y_i - yhat_i)^2 over (a, b, c).

    Raises RankDeficient when the design matrix loses rank (e.g. all x equal)
    and DegenerateDof when there are no residual degrees of freedom for the
    confidence bounds (n <= 3).
    """
    n = len(pairs)
    dof = n - N_COEFFS
    if dof < 1:
        raise DegenerateDof(f"{n} points leave no residual degrees of freedom")

    A = design_matrix(pairs.x)
    sw = np.sqrt(pairs.weights)
    coef, _, rank, _ = np.linalg.lstsq(A * sw[:, None], pairs.y * sw, rcond=None)
    if rank < N_COEFFS:
        raise RankDeficient(f"design matrix rank {rank} < {N_COEFFS}")

    resid = pairs.y - A @ coef
    sse = float(np.sum(pairs.weights * resid * resid))
    s2 = sse / dof

    ata = (A * pairs.weights[:, None]).T @ A
    try:
        cov = s2 * np.linalg.inv(ata)
    except np.linalg.LinAlgError:
        raise RankDeficient("weighted normal matrix is singular") from None

    tq = float(stats.t.ppf(0.975, dof))
    half = tq * np.sqrt(np.maximum(np.diag(cov), 0.0))
    cb95 = tuple((float(coef[i] - half[i]), float(coef[i] + half[i]))
                 for i in range(N_COEFFS))
    return FitResult(a=float(coef[0]), b=float(coef[1]), c=float(coef[2]),
                     covariance=cov, dof=dof, cb95=cb95)


def predict(fit: FitResult, x) -> np.ndarray:
    """Evaluate a sin(x - pi) + b (x - 10)^2 + c."""
    return design_matrix(np.atleast_1d(x)) @ fit.coefficients
