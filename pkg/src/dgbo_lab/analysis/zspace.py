"""Discrete dissipation-normalized Bourgain norms.

Time transforms use the phase ``exp(+i tau t)`` so that the free wave
``exp(-i L_k t)`` sits at ``tau = L_k``.  Each mode is stored through its
demodulated envelope ``a_k(t) = exp(i L_k t) u_k(t)``; the transform of the
envelope at ``sigma`` is the transform of ``u_k`` at ``tau = L_k + sigma``,
so ``sigma`` is the modulation ``tau - L_k`` directly.

With ``A_k(sigma_j) = dt * sum_m a_k(t_m) exp(i sigma_j t_m)`` on the
zero-padded dual grid, the discrete norm is

    ||u||_b^2 = sum_k sum_j W_k(sigma_j)^2 |A_k(sigma_j)|^2 dsigma ,

which for ``b = 0`` equals ``2 pi sum_k sum_m |u_k(t_m)|^2 dt`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import special

from ..spectral import TWO_PI, TorusGrid, dispersion_relation, inverse_transform


def bracket(x):
    """``<x> = sqrt(1 + x^2)``."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


@dataclass(frozen=True)
class ZbParams:
    """Exponents of a Z^b norm.  ``alpha`` enters through ``L_k = k |k|^alpha``."""

    b: float
    beta: float
    alpha: float


def zb_weight(k, sigma, b: float, beta: float) -> np.ndarray:
    """Weight ``W_k(sigma)`` of the Z^b norm.

    ``|b| < 1/2``:  ``<k>^(b beta) <sigma / <k>^beta>^b``
    otherwise:      ``<k>^(sgn(b) beta / 2) <sigma / <k>^beta>^b``
    (``|b| = 1/2`` uses the second form).
    """
    k = np.asarray(k, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    wk = bracket(k) ** beta
    mod = bracket(sigma / wk) ** b
    if abs(b) < 0.5:
        return wk**b * mod
    return bracket(k) ** (math.copysign(1.0, b) * beta / 2.0) * mod


# -- smooth cutoffs ----------------------------------------------------------------

def _psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def cutoff_eta(t):
    """Smooth cutoff equal to 1 on [-1, 1] and vanishing outside [-2, 2]."""
    a = np.abs(np.asarray(t, dtype=float))
    num = _psi(2.0 - a)
    return num / (num + _psi(a - 1.0))


WINDOWS: dict[str, Callable[[np.ndarray, float, float], np.ndarray]] = {
    "none": lambda t, t0, t1: np.ones_like(t),
    # plateau on the middle half of [t0, t1]
    "smooth": lambda t, t0, t1: cutoff_eta(4.0 * (t - 0.5 * (t0 + t1)) / (t1 - t0)),
}


# -- space-time fields -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Samples of a real mean-zero field on a uniform time grid.

    Attributes
    ----------
    envelopes : ndarray, shape (M, 2K+1)
        Demodulated samples ``a_k(t_m)`` after windowing.
    window : str
        Name of the time window applied before transforming.
    pad : int
        Zero-padding factor of the time transform.
    """

    grid: TorusGrid
    alpha: float
    times: np.ndarray = field(repr=False)
    envelopes: np.ndarray = field(repr=False)
    window: str = "none"
    pad: int = 4

    @classmethod
    def from_envelopes(cls, grid: TorusGrid, alpha: float, times, envelopes, window: str = "none",
                       pad: int = 4) -> "SpaceTimeField":
        times = np.asarray(times, dtype=float)
        env = np.array(envelopes, dtype=complex)
        if env.shape != (times.size, grid.size):
            raise ValueError(f"envelopes must have shape {(times.size, grid.size)}, got {env.shape}")
        if times.size > 1:
            h = np.diff(times)
            if not np.allclose(h, h[0], rtol=1e-9, atol=0):
                raise ValueError("times must be uniformly spaced")
        if window not in WINDOWS:
            raise ValueError(f"unknown window {window!r}; choose from {sorted(WINDOWS)}")
        env = env * WINDOWS[window](times, times[0], times[-1])[:, None]
        env[:, grid.K] = 0.0
        env.setflags(write=False)
        return cls(grid, float(alpha), times, env, window, int(pad))

    @classmethod
    def from_coefficients(cls, grid: TorusGrid, alpha: float, times, coeffs, window: str = "none",
                          pad: int = 4) -> "SpaceTimeField":
        """From samples ``u_k(t_m)`` (shape ``(M, 2K+1)``)."""
        times = np.asarray(times, dtype=float)
        L = dispersion_relation(grid.wavenumbers, alpha)
        env = np.asarray(coeffs, dtype=complex) * np.exp(1j * np.outer(times, L))
        return cls.from_envelopes(grid, alpha, times, env, window, pad)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 1.0

    @cached_property
    def coefficients(self) -> np.ndarray:
        """Windowed samples ``u_k(t_m)``."""
        L = dispersion_relation(self.grid.wavenumbers, self.alpha)
        return self.envelopes * np.exp(-1j * np.outer(self.times, L))

    def values(self) -> np.ndarray:
        """Physical samples, shape ``(M, N)``."""
        return np.stack([inverse_transform(row, self.grid) for row in self.coefficients])

    @cached_property
    def sigma(self) -> np.ndarray:
        n = self.times.size * self.pad
        return TWO_PI * np.fft.fftfreq(n, self.dt)

    @cached_property
    def transform(self) -> np.ndarray:
        """``A_k(sigma_j)``, shape ``(M * pad, 2K+1)``."""
        n = self.times.size * self.pad
        A = np.fft.ifft(self.envelopes, n=n, axis=0) * n * self.dt
        return A * np.exp(1j * self.sigma * self.times[0])[:, None]

    @property
    def dsigma(self) -> float:
        return TWO_PI / (self.times.size * self.pad * self.dt)

    def reality_defect(self) -> float:
        """``max |A_{-k}(-sigma) - conj(A_k(sigma))|``."""
        A = self.transform
        n = A.shape[0]
        neg = (-np.arange(n)) % n
        return float(np.max(np.abs(A[neg][:, ::-1] - np.conj(A))))

    def l2_norm(self) -> float:
        """Discrete ``L^2_{t,x}`` norm ``sqrt(2 pi sum |u_k(t_m)|^2 dt)``."""
        return float(np.sqrt(TWO_PI * self.dt * np.sum(np.abs(self.envelopes) ** 2)))

    def max_time_l2(self) -> float:
        """``max_m ||u(t_m)||_{L^2_x}``."""
        return float(np.sqrt(TWO_PI * np.max(np.sum(np.abs(self.envelopes) ** 2, axis=1))))

    def hs_time_l2(self, s: float) -> float:
        """Discrete ``L^2_t H^s_x`` norm with weight ``<k>^s``."""
        w = bracket(self.grid.wavenumbers) ** (2 * s)
        return float(np.sqrt(TWO_PI * self.dt * np.sum(w * np.abs(self.envelopes) ** 2)))

    def scaled(self, multiplier: np.ndarray) -> "SpaceTimeField":
        """Apply a time-independent Fourier multiplier (array over ``k``)."""
        env = np.array(self.envelopes) * np.asarray(multiplier)[None, :]
        env[:, self.grid.K] = 0.0
        env.setflags(write=False)
        return SpaceTimeField(self.grid, self.alpha, self.times, env, self.window, self.pad)


def znorm(u: SpaceTimeField, zb: ZbParams) -> float:
    """Discrete Z^b norm of a sampled field (trapezoid rule in ``sigma``)."""
    if not math.isclose(zb.alpha, u.alpha):
        raise ValueError(f"norm alpha {zb.alpha} differs from field alpha {u.alpha}")
    k = u.grid.wavenumbers
    W = zb_weight(k[None, :], u.sigma[:, None], zb.b, zb.beta)
    W[:, u.grid.K] = 0.0
    return float(np.sqrt(np.sum(W**2 * np.abs(u.transform) ** 2) * u.dsigma))


def smoothing_multiplier(grid: TorusGrid, s: float) -> np.ndarray:
    """``|k|^s`` with the zero mode sent to 0 (used for ``D^{-beta(b-1/2)}``)."""
    k = np.abs(grid.wavenumbers).astype(float)
    m = np.zeros(grid.size)
    m[k > 0] = k[k > 0] ** s
    return m


# -- embedding constants ---------------------------------------------------------------

def embedding_integral(b: float) -> float:
    """``int <sigma>^(-2b) dsigma = sqrt(pi) Gamma(b - 1/2) / Gamma(b)`` for ``b > 1/2``."""
    if not b > 0.5:
        raise ValueError("the integral diverges for b <= 1/2")
    return float(math.sqrt(math.pi) * special.gamma(b - 0.5) / special.gamma(b))


def embedding_constant(b: float) -> float:
    """``C(b)`` with ``sup_t ||u(t)||_{L^2} <= C(b) ||u||_{Z^b}`` for ``b > 1/2``."""
    return math.sqrt(embedding_integral(b) / TWO_PI)


def discrete_embedding_constant(u: SpaceTimeField, zb: ZbParams) -> float:
    """Exact discrete counterpart of :func:`embedding_constant` on ``u``'s lattice.

    By Cauchy-Schwarz on the inverse DFT,
    ``|a_k(t_m)|^2 <= (dsigma / 2pi)^2 sum_j W^-2 * sum_j W^2 |A|^2``.
    """
    k = u.grid.wavenumbers
    W = zb_weight(k[None, :], u.sigma[:, None], zb.b, zb.beta)
    Id = np.sum(W[:, k != 0] ** -2.0, axis=0) * u.dsigma
    return float(math.sqrt(Id.max() / TWO_PI))
