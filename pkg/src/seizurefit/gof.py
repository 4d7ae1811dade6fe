"""Goodness-of-fit statistics and their [0,1] normalization.

Four statistics assess each fit and form the classifier's feature vector:

  zeta       weighted sum of squared residuals, sum w (y - yhat)^2
  phi        R-square, 1 - zeta / sum w (y - ybar)^2 (ratio of sums)
  sigma_adj  adjusted R-square, 1 - (1 - phi)(n - 1)/(n - m - 1)
  psi        root mean squared error, sqrt(zeta / (n - m))

phi uses the standard ratio-of-sums form; the per-point-ratio variant (which
diverges whenever some y_i equals the mean) is kept behind
`pointwise_r_square` for comparison only. ybar is the weighted mean, so phi
is invariant under uniform weight rescaling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyTrainingSet, LengthMismatch, TooFewPoints, ZeroTotalVariation

FEATURE_NAMES = ("zeta", "phi", "sigma_adj", "psi")


@dataclass
class FeatureVector:
    """The four statistics for one fit, with provenance and optional label."""

    zeta: float
    phi: float
    sigma_adj: float
    psi: float
    epoch: int = -1
    channel: str = ""
    segment: int = -1
    label: int | None = None

    def as_array(self) -> np.ndarray:
        return np.array([self.zeta, self.phi, self.sigma_adj, self.psi])

    def replace_values(self, values) -> "FeatureVector":
        z, p, s, r = (float(v) for v in values)
        return FeatureVector(zeta=z, phi=p, sigma_adj=s, psi=r,
                             epoch=self.epoch, channel=self.channel,
                             segment=self.segment, label=self.label)


def gof(y, yhat, weights=None, m: int = 3, *, epoch: int = -1,
        channel: str = "", segment: int = -1,
        label: int | None = None) -> FeatureVector:
    """Compute (zeta, phi, sigma_adj, psi) for observed y vs predicted yhat.

    m is the number of fitted coefficients (3 for the parabolic model). The
    adjusted R-square needs n >= m + 2; all-equal responses raise
    ZeroTotalVariation since R-square is undefined there.
    """
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise LengthMismatch(f"y has {y.shape}, yhat has {yhat.shape}")
    n = y.shape[0]
    if weights is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape[0] != n:
            raise LengthMismatch("weights length differs from y")
    if n < m + 2:
        raise TooFewPoints(f"need n >= m + 2 = {m + 2} points, got {n}")

    resid = y - yhat
    zeta = float(np.sum(weights * resid * resid))
    ybar = float(np.sum(weights * y) / np.sum(weights))
    dev = y - ybar
    sst = float(np.sum(weights * dev * dev))
    if sst == 0.0:
        raise ZeroTotalVariation("all responses equal; R-square undefined")
    phi = 1.0 - zeta / sst
    sigma_adj = 1.0 - (1.0 - phi) * (n - 1) / (n - m - 1)
    psi = float(np.sqrt(zeta / (n - m)))
    return FeatureVector(zeta=zeta, phi=phi, sigma_adj=sigma_adj, psi=psi,
                         epoch=epoch, channel=channel, segment=segment,
                         label=label)


def pointwise_r_square(y, yhat) -> float:
    """Literal per-point-ratio R-square, 1 - sum((y-yhat)^2/(y-ybar)^2).

    Diagnostic only: diverges when any y_i equals the mean. Exposed behind
    the CLI --pointwise-r2 debug flag for comparison against phi.
    """
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    dev = y - y.mean()
    if np.any(dev == 0.0):
        raise ZeroTotalVariation("some y_i equals the mean; pointwise ratio diverges")
    return float(1.0 - np.sum((y - yhat) ** 2 / dev ** 2))


@dataclass
class FeatureScaler:
    """Per-feature min/max learned from training vectors only."""

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def from_array(cls, X) -> "FeatureScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.size == 0:
            raise EmptyTrainingSet("cannot fit a scaler on no rows")
        return cls(mins=X.min(axis=0), maxs=X.max(axis=0))

    def transform_array(self, X) -> np.ndarray:
        """Map to [0,1]; constant features go to 0, test values clamp."""
        X = np.asarray(X, dtype=np.float64)
        span = self.maxs - self.mins
        out = np.zeros_like(X)
        nz = span > 0
        out[:, nz] = (X[:, nz] - self.mins[nz]) / span[nz]
        return np.clip(out, 0.0, 1.0)

    def to_dict(self) -> dict:
        return {name: [float(self.mins[i]), float(self.maxs[i])]
                for i, name in enumerate(FEATURE_NAMES)}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureScaler":
        mins = np.array([d[name][0] for name in FEATURE_NAMES])
        maxs = np.array([d[name][1] for name in FEATURE_NAMES])
        return cls(mins=mins, maxs=maxs)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              newline="\n")

    @classmethod
    def load(cls, path) -> "FeatureScaler":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_scaler(train: list[FeatureVector]) -> FeatureScaler:
    """Learn per-feature min/max from training vectors."""
    if not train:
        raise EmptyTrainingSet("cannot fit a scaler on an empty training set")
    return FeatureScaler.from_array(np.array([v.as_array() for v in train]))


def apply_scaler(scaler: FeatureScaler, v: FeatureVector) -> FeatureVector:
    """Normalize one vector into [0,1] (clamped), keeping provenance."""
    values = scaler.transform_array(v.as_array()[None, :])[0]
    return v.replace_values(values)
