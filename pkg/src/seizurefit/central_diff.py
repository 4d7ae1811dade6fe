"""Two-point central-difference FIR differentiator.

The kernel has exactly two nonzero taps of opposite sign spaced L samples
apart (b[-L] = 1/(2 L Ts), b[+L] = -1/(2 L Ts)), so convolution reduces to a
shifted subtraction: interior samples come out as
(x[n+L] - x[n-L]) / (2 L Ts). Boundaries are zero padded and the output keeps
the input length, which keeps 1-second segments aligned.

The closed-form frequency response is H(f) = j sin(L*Omega) / (L Ts) with
Omega = 2 pi f / Fs: zero at DC, first peak at f = Fs/(4L), first null at
f = Fs/(2L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrequencyOutOfRange, InvalidInterval, InvalidSkip


@dataclass(frozen=True)
class FirKernel:
    """Antisymmetric differentiator taps, indexed k in [-L, L]."""

    skip_factor: int
    sample_interval_s: float
    coefficients: np.ndarray

    @property
    def gain(self) -> float:
        return 1.0 / (2.0 * self.skip_factor * self.sample_interval_s)


def skip_factor(sampling_rate_hz: float) -> int:
    """L = Fs/5 rounded half away from zero, clamped to at least 1."""
    if sampling_rate_hz <= 0:
        raise InvalidSkip("sampling rate must be positive")
    return max(1, math.floor(sampling_rate_hz / 5.0 + 0.5))


def make_kernel(L: int, Ts: float) -> FirKernel:
    """Build the 2L+1 coefficient vector for skip factor L and sample
    interval Ts."""
    if L < 1:
        raise InvalidSkip(f"skip factor must be >= 1, got {L}")
    if Ts <= 0:
        raise InvalidInterval(f"sample interval must be positive, got {Ts}")
    coeff = np.zeros(2 * L + 1)
    g = 1.0 / (2.0 * L * Ts)
    coeff[0] = g    # k = -L
    coeff[-1] = -g  # k = +L
    return FirKernel(skip_factor=L, sample_interval_s=Ts, coefficients=coeff)


def kernel_for_rate(sampling_rate_hz: float, L: int | None = None) -> FirKernel:
    """Kernel for a sampling rate, optionally overriding the skip factor."""
    if L is None:
        L = skip_factor(sampling_rate_hz)
    return make_kernel(L, 1.0 / sampling_rate_hz)


def apply_filter(x: np.ndarray, kernel: FirKernel) -> np.ndarray:
    """Convolve with the time-reversed kernel, (x*b)[n] = sum_k b[k] x[n-k].

    Same-length output with zero-padded boundaries. The subtraction happens
    before the 1/(2 L Ts) scaling so interior samples match the direct
    two-point difference expression.

    Accepts a 1-D vector or a 2-D (time x channels) matrix filtered along
    axis 0.
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    if x.shape[0] < 1:
        raise ValueError("input must have at least one sample")
    L = kernel.skip_factor
    n = x.shape[0]
    forward = np.zeros_like(x)
    backward = np.zeros_like(x)
    if L < n:
        forward[:n - L] = x[L:]
        backward[L:] = x[:n - L]
    out = (forward - backward) / (2.0 * L * kernel.sample_interval_s)
    return out[:, 0] if squeeze else out


def frequency_response(kernel: FirKernel, freqs_hz, fs: float) -> np.ndarray:
    """Closed-form response j sin(L*Omega)/(L Ts) at the given frequencies.

    Frequencies must lie in [0, Fs/2]; the result is purely imaginary.
    """
    freqs = np.asarray(freqs_hz, dtype=np.float64)
    if np.any(freqs < 0) or np.any(freqs > fs / 2.0):
        raise FrequencyOutOfRange(f"frequencies must lie in [0, {fs / 2.0}]")
    omega = 2.0 * np.pi * freqs / fs
    L = kernel.skip_factor
    return 1j * np.sin(L * omega) / (L * kernel.sample_interval_s)
