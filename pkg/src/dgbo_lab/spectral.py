"""Fourier grids, transforms and multipliers on the torus [-pi, pi].

Coefficients follow the convention

    f_hat[k] = (1 / 2pi) * integral_T f(x) exp(-i k x) dx,
    f(x)     = sum_k f_hat[k] exp(i k x),

so that products convolve without stray factors of 2pi.  A coefficient
array for a grid with maximum frequency ``K`` has length ``2K + 1`` and is
indexed by ``k + K`` for ``k = -K..K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import GridMismatchError, InvariantError

TWO_PI = 2.0 * np.pi

#: Absolute tolerance (relative to the field scale) for reality / mean checks.
REALITY_TOL = 1e-12


def _default_points(K: int) -> int:
    """Smallest power of two admitting dealiased quadratic products."""
    n = 1
    while n < 3 * K + 1:
        n *= 2
    return n


@dataclass(frozen=True)
class TorusGrid:
    """Uniform collocation grid ``x_j = -pi + 2 pi j / N`` with band limit ``K``.

    Parameters
    ----------
    K : int
        Largest retained frequency.  ``K = 0`` is rejected: a mean-zero field
        on such a grid is identically zero.
    N : int, optional
        Number of physical points.  Defaults to the smallest power of two
        with ``N >= 3K + 1`` (2/3-rule headroom).
    """

    K: int
    N: int = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        K = int(self.K)
        if K < 1:
            raise ValueError(f"TorusGrid needs K >= 1, got {self.K}")
        N = _default_points(K) if self.N is None else int(self.N)
        if N < 2 * K + 1:
            raise ValueError(f"N={N} cannot resolve K={K}; need N >= 2K+1")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "N", N)

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def points(self) -> np.ndarray:
        return -np.pi + TWO_PI * np.arange(self.N) / self.N

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @property
    def size(self) -> int:
        """Length of a coefficient array, ``2K + 1``."""
        return 2 * self.K + 1

    @property
    def dealiased(self) -> bool:
        return self.N >= 3 * self.K + 1

    def require_dealiased(self):
        if not self.dealiased:
            raise GridMismatchError(
                f"quadratic products need N >= 3K+1 (K={self.K}, N={self.N})"
            )

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size, dtype=complex)


def reality_defect(coeffs: np.ndarray) -> float:
    """``max_k |c[-k] - conj(c[k])|``."""
    coeffs = np.asarray(coeffs)
    return float(np.max(np.abs(coeffs[::-1] - np.conj(coeffs)), initial=0.0))


def symmetrize(coeffs: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto reality-symmetric coefficient arrays."""
    coeffs = np.asarray(coeffs, dtype=complex)
    return 0.5 * (coeffs + np.conj(coeffs[::-1]))


def _scale(coeffs: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(coeffs), initial=0.0)))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real, mean-zero function on the torus.

    The coefficient array is copied and made read-only.  Construction checks
    reality ``v[-k] == conj(v[k])``, ``v[0] == 0`` and finiteness up to
    :data:`REALITY_TOL` times the field scale.
    """

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.size,):
            raise GridMismatchError(
                f"expected {self.grid.size} coefficients for K={self.grid.K}, "
                f"got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise InvariantError("field has non-finite coefficients")
        tol = REALITY_TOL * _scale(c)
        if reality_defect(c) > tol:
            raise InvariantError(
                f"reality violated: defect {reality_defect(c):.3e} > {tol:.1e}"
            )
        if abs(c[self.grid.K]) > tol:
            raise InvariantError(f"mean mode is {c[self.grid.K]!r}, expected 0")
        c = symmetrize(c)
        c[self.grid.K] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction helpers -------------------------------------------------
    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, grid.zeros())

    @classmethod
    def from_samples(cls, samples, grid: TorusGrid) -> "SpectralField":
        """Transform physical samples, dropping their mean."""
        c = forward_transform(samples, grid)
        c[grid.K] = 0.0
        return cls(grid, c)

    @classmethod
    def project(cls, coeffs, grid: TorusGrid) -> "SpectralField":
        """Project an arbitrary coefficient array onto real mean-zero fields."""
        c = symmetrize(coeffs)
        c[grid.K] = 0.0
        return cls(grid, c)

    # views ----------------------------------------------------------------
    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.grid.K:
            return 0j
        return complex(self.coeffs[k + self.grid.K])

    def to_samples(self) -> np.ndarray:
        return inverse_transform(self.coeffs, self.grid)

    def norm(self) -> float:
        """L2(T) norm, ``sqrt(2 pi sum |v_k|^2)``."""
        return float(np.sqrt(TWO_PI * np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "SpectralField") -> complex:
        """L2(T) inner product ``integral u conj(w) dx``."""
        _same_grid(self, other)
        return complex(TWO_PI * np.vdot(other.coeffs, self.coeffs))

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            raise TypeError("fields may only be scaled by real numbers")
        return SpectralField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)


def _same_grid(u, v):
    gu = getattr(u, "grid", None)
    gv = getattr(v, "grid", None)
    if gu != gv:
        raise GridMismatchError(f"grid mismatch: {gu} vs {gv}")


def _coeffs_of(v, grid: TorusGrid | None = None) -> np.ndarray:
    c = v.coeffs if isinstance(v, SpectralField) else np.asarray(v, dtype=complex)
    if grid is not None and c.shape != (grid.size,):
        raise GridMismatchError(
            f"expected {grid.size} coefficients for K={grid.K}, got {c.shape}"
        )
    return c


def forward_transform(samples, grid: TorusGrid) -> np.ndarray:
    """Coefficients ``f_hat[-K..K]`` of real samples at the collocation points.

    The integral is evaluated with the trapezoid (DFT) rule, exact for
    trigonometric polynomials of degree below ``N - K``.
    """
    f = np.asarray(samples)
    if f.ndim != 1 or f.shape[0] != grid.N:
        raise GridMismatchError(f"expected {grid.N} samples, got shape {f.shape}")
    if np.iscomplexobj(f):
        if np.max(np.abs(f.imag), initial=0.0) > REALITY_TOL * _scale(f.real):
            raise InvariantError("samples must be real")
        f = f.real
    F = np.fft.fft(f) / grid.N
    k = grid.wavenumbers
    # x_0 = -pi contributes the phase exp(i k pi) = (-1)^k
    return F[k % grid.N] * np.where(k % 2 == 0, 1.0, -1.0)


def inverse_transform(coeffs, grid: TorusGrid) -> np.ndarray:
    """Real samples ``f(x_j) = sum_k f_hat[k] exp(i k x_j)``."""
    c = _coeffs_of(coeffs, grid)
    k = grid.wavenumbers
    buf = np.zeros(grid.N, dtype=complex)
    buf[k % grid.N] = c * np.where(k % 2 == 0, 1.0, -1.0)
    f = np.fft.ifft(buf) * grid.N
    residue = float(np.max(np.abs(f.imag), initial=0.0))
    if residue > REALITY_TOL * _scale(f.real):
        raise InvariantError(
            f"coefficients are not reality-symmetric (imaginary residue {residue:.3e})"
        )
    return f.real.copy()


def dispersion_symbol(k, alpha: float) -> np.ndarray:
    """Symbol ``i k |k|^alpha`` of ``D^alpha d/dx``."""
    k = np.asarray(k, dtype=float)
    return 1j * k * np.abs(k) ** alpha


def dispersion_relation(k, alpha: float) -> np.ndarray:
    """Linear frequencies ``L_k = k |k|^alpha``."""
    k = np.asarray(k, dtype=float)
    return k * np.abs(k) ** alpha


def fractional_symbol(k, s: float) -> np.ndarray:
    """Symbol ``|k|^s`` of ``D^s``; the zero mode maps to 0 unless ``s == 0``."""
    k = np.abs(np.asarray(k, dtype=float))
    if s == 0:
        return np.ones_like(k)
    out = np.zeros_like(k)
    nz = k != 0
    out[nz] = k[nz] ** s
    return out


def apply_dispersion(v: SpectralField, alpha: float) -> SpectralField:
    """Apply ``D^alpha d/dx``."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return SpectralField(v.grid, v.coeffs * dispersion_symbol(v.grid.wavenumbers, alpha))


def apply_fractional(v: SpectralField, s: float) -> SpectralField:
    """Apply ``D^s`` (multiplication of ``v_k`` by ``|k|^s``)."""
    return SpectralField(v.grid, v.coeffs * fractional_symbol(v.grid.wavenumbers, s))


def derivative(v: SpectralField) -> SpectralField:
    return SpectralField(v.grid, 1j * v.grid.wavenumbers * v.coeffs)


def product_coeffs(a: np.ndarray, b: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Dealiased product of two real band-limited fields, zero mode included.

    ``a`` and ``b`` are coefficient arrays on ``grid``; the result is the
    exact projection of ``a*b`` onto ``|k| <= K`` provided ``N >= 3K + 1``.
    """
    K, N = grid.K, grid.N
    half_a = np.zeros(N // 2 + 1, dtype=complex)
    half_b = np.zeros(N // 2 + 1, dtype=complex)
    half_a[: K + 1] = a[K:]
    half_b[: K + 1] = b[K:]
    # collocation phases are irrelevant for a product; use x_0 = 0 internally
    fa = np.fft.irfft(half_a, n=N) * N
    fb = np.fft.irfft(half_b, n=N) * N
    h = np.fft.rfft(fa * fb)[: K + 1] / N
    out = np.empty(2 * K + 1, dtype=complex)
    out[K:] = h
    out[:K] = np.conj(h[1:][::-1])
    return out


class Product(NamedTuple):
    """A product split into its mean-zero part and its mean ``(uv)_hat[0]``."""

    field: SpectralField
    mean: float


def multiply(u: SpectralField, v: SpectralField, project: bool = False):
    """Dealiased product ``u v`` truncated to ``|k| <= K``.

    Returns a :class:`Product` holding the mean-zero part and the zero mode,
    or only the mean-zero field when ``project`` is true.
    """
    _same_grid(u, v)
    u.grid.require_dealiased()
    c = product_coeffs(u.coeffs, v.coeffs, u.grid)
    mean = float(c[u.grid.K].real)
    c[u.grid.K] = 0.0
    f = SpectralField(u.grid, c)
    return f if project else Product(f, mean)
