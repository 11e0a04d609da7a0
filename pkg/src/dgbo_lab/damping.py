"""Localized damping ``G h = g (h - integral(g h))`` and the splitting of
``G D^beta G`` into a diagonal part, an off-diagonal part and a rank-one part.

Every operator here acts on the band-limited profile ``g_J`` whose Fourier
coefficients are kept for ``|j| <= J`` (the decay horizon).  Intermediate
products are carried on the band ``|m| <= K + J`` so that the truncated
operators are exact restrictions of the operators built from ``g_J``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from .errors import GridMismatchError, PrecisionError, ProfileError
from .spectral import TWO_PI, SpectralField, TorusGrid, fractional_symbol

#: Relative tail tolerance used to pick the decay horizon ``J``.
TAIL_TOL = 1e-10
#: Minimum number of quadrature points for profile coefficients.
MIN_QUAD_POINTS = 2**17


class ProfileKind(str, enum.Enum):
    CONSTANT = "constant"
    RAISED_COSINE = "raised_cosine"
    SMOOTH_BUMP = "smooth_bump"


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s, dtype=float)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


_BUMP_MASS = integrate.quad(lambda s: np.exp(-1.0 / (1.0 - s * s)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def profile_values(kind: ProfileKind | str, support: tuple[float, float], x) -> np.ndarray:
    """Evaluate the defining (un-truncated) profile ``g`` at points ``x`` in [-pi, pi]."""
    kind = ProfileKind(kind)
    x = np.asarray(x, dtype=float)
    if kind is ProfileKind.CONSTANT:
        return np.full_like(x, 1.0 / TWO_PI)
    a, b = support
    width = b - a
    mid = 0.5 * (a + b)
    inside = (x >= a) & (x <= b)
    if kind is ProfileKind.RAISED_COSINE:
        vals = (1.0 + np.cos(TWO_PI * (x - mid) / width)) / width
        return np.where(inside, vals, 0.0)
    s = (x - mid) / (0.5 * width)
    return _bump(s) / (_BUMP_MASS * 0.5 * width)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


@dataclass(frozen=True, eq=False)
class DampingProfile:
    """Fourier description of a nonnegative profile ``g`` with ``integral g = 1``.

    Attributes
    ----------
    grid : TorusGrid
        Grid of the fields the profile acts on.
    kind, support :
        Profile family and its support interval.
    ghat_full : ndarray
        Coefficients ``g_hat[j]`` for ``|j| <= horizon_max``, indexed ``j + horizon_max``.
    min_band_limited : float
        Minimum over a fine grid of the profile reconstructed from the
        retained coefficients (diagnostic; truncation may undershoot zero).
    """

    grid: TorusGrid
    kind: ProfileKind
    support: tuple[float, float]
    ghat_full: np.ndarray = field(repr=False)
    quad_points: int = 0

    @property
    def horizon_max(self) -> int:
        return (self.ghat_full.size - 1) // 2

    def ghat_at(self, j) -> np.ndarray:
        """``g_hat[j]`` for integer array ``j``; zero beyond the stored band."""
        j = np.asarray(j, dtype=int)
        H = self.horizon_max
        out = np.zeros(j.shape, dtype=complex)
        ok = np.abs(j) <= H
        out[ok] = self.ghat_full[j[ok] + H]
        return out

    @property
    def ghat(self) -> np.ndarray:
        """Coefficients on the field grid, ``k = -K..K``."""
        return self.ghat_at(self.grid.wavenumbers)

    def band(self, J: int) -> np.ndarray:
        """Coefficients ``g_hat[-J..J]``."""
        return self.ghat_at(np.arange(-J, J + 1))

    def values(self, x) -> np.ndarray:
        return profile_values(self.kind, self.support, x)

    def horizon(self, beta: float, tol: float = TAIL_TOL) -> int:
        """Smallest ``J`` whose discarded coefficients perturb every ``c_k`` by
        less than ``tol`` relative.

        Uses ``|k + j|^beta <= 2^beta (|k|^beta + |j|^beta)`` and
        ``c_k >= |k|^beta |g_hat[0]|^2``.
        """
        H = self.horizon_max
        j = np.arange(0, H + 1)
        p = np.abs(self.ghat_full[H:]) ** 2 + np.abs(self.ghat_full[H::-1]) ** 2
        p[0] *= 0.5
        w = p * (1.0 + j.astype(float) ** beta)
        # tail[J] = sum over |j| > J
        tail = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]])
        bound = 2.0**beta * tail / abs(self.ghat_full[H]) ** 2
        ok = np.nonzero(bound <= tol)[0]
        if ok.size == 0 or (self.quad_points and ok[0] >= H):
            raise PrecisionError(
                f"{self.kind.value} profile coefficients decay too slowly for beta={beta} "
                f"(tail bound {bound[-2]:.2e} at |j|={H - 1})"
            )
        return int(ok[0])

    @cached_property
    def min_band_limited(self) -> float:
        J = min(self.horizon(0.0), self.horizon_max)
        n = _next_pow2(8 * J + 8)
        grid = TorusGrid(max(J, 1), n)
        c = self.ghat_at(grid.wavenumbers)
        from .spectral import inverse_transform

        return float(inverse_transform(c, grid).min())


def build_profile(kind: ProfileKind | str, support: tuple[float, float] = (-np.pi, np.pi),
                  grid: TorusGrid | None = None, K: int | None = None) -> DampingProfile:
    """Construct a damping profile and its Fourier coefficients.

    Coefficients come from the trapezoid rule on ``max(2**17, 8K)`` points and
    are rescaled so that ``g_hat[0] = 1 / (2 pi)`` exactly.
    """
    kind = ProfileKind(kind)
    if grid is None:
        grid = TorusGrid(K if K is not None else 16)
    a, b = (float(support[0]), float(support[1]))
    if kind is not ProfileKind.CONSTANT:
        if not b > a:
            raise ProfileError(f"empty support interval [{a}, {b}]")
        if a < -np.pi - 1e-12 or b > np.pi + 1e-12:
            raise ProfileError(f"support [{a}, {b}] leaves [-pi, pi]")
    nq = max(MIN_QUAD_POINTS, _next_pow2(8 * grid.K))
    x = -np.pi + TWO_PI * np.arange(nq) / nq
    g = profile_values(kind, (a, b), x)
    if not np.all(np.isfinite(g)) or g.min() < -1e-12:
        raise ProfileError(f"profile has negative values (min {g.min():.3e})")
    H = nq // 4
    F = np.fft.fft(g) / nq
    j = np.arange(-H, H + 1)
    ghat = F[j % nq] * np.where(j % 2 == 0, 1.0, -1.0)
    ghat = 0.5 * (ghat + np.conj(ghat[::-1]))
    if kind is ProfileKind.CONSTANT:
        ghat = np.zeros_like(ghat)
        ghat[H] = 1.0 / TWO_PI
    else:
        mass = TWO_PI * ghat[H].real
        if not abs(mass - 1.0) < 1e-6:
            raise ProfileError(f"profile quadrature mass {mass} is not 1")
        ghat = ghat / mass
    ghat.setflags(write=False)
    return DampingProfile(grid, kind, (a, b), ghat, nq)


def profile_from_coefficients(ghat, grid: TorusGrid, kind: ProfileKind | str = ProfileKind.RAISED_COSINE,
                              support=(-np.pi, np.pi)) -> DampingProfile:
    """Wrap explicit coefficients ``g_hat[-J..J]`` (used for trigonometric profiles)."""
    ghat = np.array(ghat, dtype=complex)
    H = (ghat.size - 1) // 2
    if abs(ghat[H] - 1.0 / TWO_PI) > 1e-14:
        raise ProfileError("profile must satisfy g_hat[0] = 1/(2 pi)")
    ghat.setflags(write=False)
    return DampingProfile(grid, ProfileKind(kind), tuple(support), ghat, 0)


def _convolve(ghat_band: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Coefficients of ``g h`` for band-limited ``g`` and ``h``; length grows by ``2J``."""
    return np.convolve(ghat_band, h)


def apply_G(profile: DampingProfile, h, mean: float = 0.0, out_band: int | None = None,
            J: int | None = None) -> np.ndarray | SpectralField:
    """``G h = g (h - integral(g h))``.

    ``h`` is a :class:`SpectralField` (with optional zero-mode scalar ``mean``)
    or a raw coefficient array ``h[-Kin..Kin]``.  The result is exact on the
    band ``out_band`` (default: the input band).  A :class:`SpectralField`
    is returned when the input is one and ``out_band`` is not given.
    """
    is_field = isinstance(h, SpectralField)
    c = np.array(h.coeffs if is_field else h, dtype=complex)
    Kin = (c.size - 1) // 2
    if is_field and h.grid != profile.grid:
        raise GridMismatchError("field and profile live on different grids")
    c[Kin] += mean
    if J is None:
        J = profile.horizon(0.0)
    gb = profile.band(J)
    gh = _convolve(gb, c)  # band Kin + J
    Kg = Kin + J
    s = _int_gh(gb, c)  # integral(g h)
    gh[Kg - J: Kg + J + 1] -= gb * s
    Kout = Kin if out_band is None else out_band
    out = _resize(gh, Kout)
    if is_field and out_band is None:
        return SpectralField(profile.grid, out)
    return out


def _int_gh(gb: np.ndarray, c: np.ndarray) -> complex:
    J = (gb.size - 1) // 2
    K = (c.size - 1) // 2
    n = np.arange(-K, K + 1)
    ok = np.abs(n) <= J
    return TWO_PI * np.sum(gb[J - n[ok]] * c[ok])


def _resize(c: np.ndarray, K: int) -> np.ndarray:
    """Pad or truncate a centered coefficient array to band ``K``."""
    Kc = (c.size - 1) // 2
    out = np.zeros(2 * K + 1, dtype=complex)
    m = min(K, Kc)
    out[K - m: K + m + 1] = c[Kc - m: Kc + m + 1]
    return out


@dataclass(frozen=True, eq=False)
class DampingDecomposition:
    """Diagonal coefficients ``c_k`` and the splitting
    ``G D^beta G = diag(c) + N1 + R`` on the grid band.

    ``N1 v = G[D^beta(g v)] - c v`` collects the off-diagonal coupling and
    ``R v = -(integral g v) G[D^beta g]`` is the rank-one remainder coming from
    the volume correction inside ``G v``.  ``c`` is stored for ``k = -K..K``
    with the unused zero mode set to 0.
    """

    profile: DampingProfile
    beta: float
    J: int
    c: np.ndarray = field(repr=False)

    @property
    def grid(self) -> TorusGrid:
        return self.profile.grid

    @property
    def M(self) -> int:
        """Intermediate band ``K + J``."""
        return self.grid.K + self.J

    def c_at(self, k) -> np.ndarray:
        """``c_k = sum_j |k + j|^beta |g_hat[j]|^2`` for any integers ``k``."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        j = np.arange(-self.J, self.J + 1, dtype=float)
        w = np.abs(self.profile.band(self.J)) ** 2
        out = np.empty(k.shape, dtype=float)
        # chunk to bound memory for long k ranges
        step = max(1, 2**22 // j.size)
        flat = k.ravel()
        res = out.ravel()
        for i in range(0, flat.size, step):
            kk = flat[i:i + step, None]
            res[i:i + step] = (fractional_symbol(kk + j[None, :], self.beta) * w).sum(axis=1)
        return res.reshape(k.shape)

    def upper_constant(self) -> float:
        """``C(g)`` with ``c_k <= C(g) (1 + |k|^beta)``.

        ``C(g) = 2^beta max(sum |j|^beta |g_j|^2, sum |g_j|^2)``, i.e. the
        homogeneous H^beta and L2 norms of ``g`` divided by ``2 pi``.
        """
        j = np.arange(-self.J, self.J + 1)
        w = np.abs(self.profile.band(self.J)) ** 2
        hb = float(np.sum(fractional_symbol(j, self.beta) * w))
        l2 = float(np.sum(w))
        return 2.0**self.beta * max(hb, l2)

    def lower_bound(self, k) -> np.ndarray:
        return fractional_symbol(k, self.beta) / (4.0 * np.pi**2)

    # dense matrices on the full band k = -K..K (zero mode row/column included)
    @cached_property
    def G_matrix(self) -> np.ndarray:
        """``G`` from band ``K`` to band ``M``: ``g_hat[m-n] - 2 pi g_hat[m] g_hat[-n]``."""
        K, M = self.grid.K, self.M
        m = np.arange(-M, M + 1)[:, None]
        n = np.arange(-K, K + 1)[None, :]
        g = self.profile.ghat_at
        J = self.J
        gm = np.where(np.abs(m) <= J, g(m), 0)
        gn = np.where(np.abs(n) <= J, g(-n), 0)
        gmn = np.where(np.abs(m - n) <= J, g(m - n), 0)
        return gmn - TWO_PI * gm * gn

    @cached_property
    def g_matrix(self) -> np.ndarray:
        """Multiplication by ``g`` from band ``K`` to band ``M``."""
        K, M = self.grid.K, self.M
        d = np.arange(-M, M + 1)[:, None] - np.arange(-K, K + 1)[None, :]
        return np.where(np.abs(d) <= self.J, self.profile.ghat_at(d), 0)

    @cached_property
    def gdg_matrix(self) -> np.ndarray:
        """``G D^beta G`` restricted to band ``K``; Hermitian positive semidefinite."""
        Gm = self.G_matrix
        d = fractional_symbol(np.arange(-self.M, self.M + 1), self.beta)
        Q = Gm.conj().T @ (d[:, None] * Gm)
        return 0.5 * (Q + Q.conj().T)

    @cached_property
    def main_matrix(self) -> np.ndarray:
        """``G D^beta g`` restricted to band ``K``."""
        d = fractional_symbol(np.arange(-self.M, self.M + 1), self.beta)
        return self.G_matrix.conj().T @ (d[:, None] * self.g_matrix)

    @cached_property
    def n1_matrix(self) -> np.ndarray:
        A = self.main_matrix.copy()
        A[np.diag_indices_from(A)] -= self.c
        return A

    @cached_property
    def r_matrix(self) -> np.ndarray:
        """Rank one: ``-(G D^beta g) (2 pi g_hat[-n])^T``."""
        K, J = self.grid.K, self.J
        n = np.arange(-K, K + 1)
        row = TWO_PI * np.where(np.abs(n) <= J, self.profile.ghat_at(-n), 0)
        col = self.G_matrix.conj().T @ (fractional_symbol(np.arange(-self.M, self.M + 1), self.beta)
                                       * _resize(self.profile.band(J), self.M))
        return -np.outer(col, row)


def compute_ck(profile: DampingProfile, beta: float, tol: float = TAIL_TOL) -> DampingDecomposition:
    """Diagonal coefficients ``c_k`` of ``v -> g D^beta (g v)`` on the profile grid."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    J = profile.horizon(beta, tol)
    dec = DampingDecomposition(profile, float(beta), J, np.zeros(profile.grid.size))
    c = dec.c_at(profile.grid.wavenumbers)
    c[profile.grid.K] = 0.0
    c.setflags(write=False)
    object.__setattr__(dec, "c", c)
    return dec


def _check(dec: DampingDecomposition, v: SpectralField):
    if v.grid != dec.grid:
        raise GridMismatchError(f"field grid {v.grid} differs from damping grid {dec.grid}")


def apply_GDbetaG(dec: DampingDecomposition, v: SpectralField) -> SpectralField:
    """``G D^beta G v`` evaluated as ``G(D^beta(G v))`` through the band ``K + J``."""
    _check(dec, v)
    K, M = dec.grid.K, dec.M
    w = apply_G(dec.profile, v.coeffs, out_band=M, J=dec.J)
    w = w * fractional_symbol(np.arange(-M, M + 1), dec.beta)
    out = apply_G(dec.profile, w, out_band=K, J=dec.J)
    return SpectralField(dec.grid, out)


def _g_times(dec: DampingDecomposition, c: np.ndarray, out_band: int) -> np.ndarray:
    return _resize(_convolve(dec.profile.band(dec.J), c), out_band)


def apply_N1(dec: DampingDecomposition, v: SpectralField) -> SpectralField:
    """Off-diagonal part ``G[D^beta(g v)] - c v``."""
    _check(dec, v)
    K, M = dec.grid.K, dec.M
    w = _g_times(dec, v.coeffs, M) * fractional_symbol(np.arange(-M, M + 1), dec.beta)
    out = apply_G(dec.profile, w, out_band=K, J=dec.J) - dec.c * v.coeffs
    out[K] = 0.0
    return SpectralField(dec.grid, out)


def apply_R(dec: DampingDecomposition, v: SpectralField) -> SpectralField:
    """Rank-one remainder ``-(integral g v) G[D^beta g]``."""
    _check(dec, v)
    K, M = dec.grid.K, dec.M
    s = _int_gh(dec.profile.band(dec.J), v.coeffs)
    dg = _resize(dec.profile.band(dec.J), M) * fractional_symbol(np.arange(-M, M + 1), dec.beta)
    out = -s * apply_G(dec.profile, dg, out_band=K, J=dec.J)
    out[K] = 0.0
    return SpectralField(dec.grid, out)


def apply_diagonal(dec: DampingDecomposition, v: SpectralField) -> SpectralField:
    _check(dec, v)
    return SpectralField(dec.grid, dec.c * v.coeffs)
