"""Linear damped flow: the diagonal semigroup ``S(t)``, the full semigroup
``W(t) = exp(A t)`` with ``A = -(D^alpha d/dx + G D^beta G)``, spectra,
observability Gramians, and exponential-sum (Ingham / unique continuation)
diagnostics.

Matrices act on the mean-zero modes ``k = -K..-1, 1..K`` in that order.
Vectors are raw coefficient arrays; the L2 norm is ``sqrt(2 pi sum |v_k|^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import expm_multiply

from .damping import DampingDecomposition, apply_GDbetaG, build_profile, compute_ck
from .errors import ConditioningError, PrecisionError
from .params import ModelParams
from .spectral import (
    TWO_PI,
    SpectralField,
    TorusGrid,
    apply_dispersion,
    dispersion_relation,
)

#: Largest band for which ``apply_W`` uses a dense matrix exponential.
DENSE_EXPM_MAX_K = 64


def nonzero_modes(K: int) -> np.ndarray:
    k = np.arange(-K, K + 1)
    return k[k != 0]


def restrict(coeffs: np.ndarray) -> np.ndarray:
    """Drop the zero mode from a centered coefficient array."""
    K = (len(coeffs) - 1) // 2
    return np.delete(np.asarray(coeffs), K)


def extend(vec: np.ndarray, grid: TorusGrid) -> SpectralField:
    """Inverse of :func:`restrict`: reinsert a zero mean mode."""
    return SpectralField.project(np.insert(np.asarray(vec, dtype=complex), grid.K, 0.0), grid)


# -- diagonal semigroup --------------------------------------------------------

def semigroup_symbol(k, c, alpha: float, t: float) -> np.ndarray:
    """``exp(-i L_k t - c_k |t|)``."""
    return np.exp(-1j * dispersion_relation(k, alpha) * t - np.asarray(c) * abs(t))


def apply_S(params: ModelParams, decomp: DampingDecomposition, f: SpectralField, t: float) -> SpectralField:
    """Diagonal dissipative semigroup ``F[S(t) f]_k = exp(-i L_k t - c_k |t|) f_k``.

    The absolute value makes the factor decay in both time directions.
    """
    m = semigroup_symbol(f.grid.wavenumbers, decomp.c, params.alpha, t)
    return SpectralField(f.grid, f.coeffs * m)


def phi_k(c: float, tau):
    """Time transform of ``exp(-c|t|)/2`` per unit: ``c / (c^2 + tau^2)``."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    tau = np.asarray(tau, dtype=float)
    return c / (c * c + tau * tau)


def phi_k_a(c: float, tau):
    """Companion transform for ``sgn(t) exp(-c|t|)``: ``tau / (c^2 + tau^2)``."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    tau = np.asarray(tau, dtype=float)
    return tau / (c * c + tau * tau)


# -- full linear generator -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearOperatorMatrix:
    """Dense generator ``A = -(D^alpha d/dx + G D^beta G)`` on mean-zero modes.

    ``Q`` holds the damping block ``G D^beta G`` (Hermitian, PSD) so that the
    Hermitian part of ``A`` is ``-Q``.
    """

    grid: TorusGrid
    alpha: float
    beta: float
    decomp: DampingDecomposition
    A: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)

    @property
    def modes(self) -> np.ndarray:
        return nonzero_modes(self.grid.K)

    @property
    def dim(self) -> int:
        return 2 * self.grid.K


def _columns(op, grid: TorusGrid) -> np.ndarray:
    """Matrix of a complex-linear operator on real fields, via real basis pairs."""
    K = grid.K
    cols = np.zeros((grid.size, grid.size), dtype=complex)
    for k in range(1, K + 1):
        e = grid.zeros()
        e[K + k] = 1.0
        e[K - k] = 1.0
        cos_img = op(SpectralField(grid, e)).coeffs
        e[K + k] = 1j
        e[K - k] = -1j
        sin_img = op(SpectralField(grid, e)).coeffs
        # e_k = (c - i s) / 2 and e_{-k} = (c + i s) / 2
        cols[:, K + k] = 0.5 * (cos_img - 1j * sin_img)
        cols[:, K - k] = 0.5 * (cos_img + 1j * sin_img)
    return cols


def build_linear_matrix(params: ModelParams, K: int | None = None,
                        decomp: DampingDecomposition | None = None) -> LinearOperatorMatrix:
    """Assemble ``A`` column by column from the operator applications."""
    if decomp is None:
        prof = params.damping
        if prof is None:
            raise ValueError("params carry no damping profile")
        if K is not None and prof.grid.K != K:
            prof = build_profile(prof.kind, prof.support, TorusGrid(K))
        decomp = compute_ck(prof, params.beta)
    grid = decomp.grid
    disp = _columns(lambda v: apply_dispersion(v, params.alpha), grid)
    damp = _columns(lambda v: apply_GDbetaG(decomp, v), grid)
    keep = np.arange(grid.size) != grid.K
    Q = damp[np.ix_(keep, keep)]
    Q = 0.5 * (Q + Q.conj().T)
    A = -(disp[np.ix_(keep, keep)] + Q)
    return LinearOperatorMatrix(grid, float(params.alpha), float(params.beta), decomp, A, Q)


def l2_norm(vec: np.ndarray) -> float:
    return float(np.sqrt(TWO_PI * np.sum(np.abs(vec) ** 2)))


def apply_W(matrix: LinearOperatorMatrix, v0, t: float, method: str = "auto"):
    """``W(t) v0``.

    ``method`` is ``"expm"`` (dense scaling and squaring), ``"krylov"``
    (truncated-Taylor action of the exponential, no dense exponential formed)
    or ``"auto"``, which picks the dense route for ``K <= 64``.  Accepts a
    :class:`SpectralField` or a restricted vector and returns the same kind.
    """
    if t < 0:
        raise ValueError(f"W(t) is only defined for t >= 0, got {t}")
    is_field = isinstance(v0, SpectralField)
    vec = restrict(v0.coeffs) if is_field else np.asarray(v0, dtype=complex)
    if method == "auto":
        method = "expm" if matrix.grid.K <= DENSE_EXPM_MAX_K else "krylov"
    if t == 0:
        out = vec.copy()
    elif method == "expm":
        out = linalg.expm(matrix.A * t) @ vec
    elif method == "krylov":
        out = expm_multiply(matrix.A * t, vec)
    else:
        raise ValueError(f"unknown method {method!r}")
    return extend(out, matrix.grid) if is_field else out


def norm_history(matrix: LinearOperatorMatrix, v0: np.ndarray, horizon: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    """``(t_i, ||W(t_i) v0||)`` on a uniform grid, by repeated exact steps."""
    times = np.linspace(0.0, horizon, samples + 1)
    E = linalg.expm(matrix.A * (horizon / samples))
    v = np.asarray(v0, dtype=complex)
    norms = [l2_norm(v)]
    for _ in range(samples):
        v = E @ v
        norms.append(l2_norm(v))
    return times, np.array(norms)


# -- spectra -------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray = field(repr=False)
    spectral_abscissa: float
    alpha: float
    beta: float
    K: int

    @property
    def decay_rate(self) -> float:
        return -self.spectral_abscissa


def spectral_abscissa(matrix: LinearOperatorMatrix) -> SpectrumReport:
    try:
        ev = linalg.eigvals(matrix.A)
    except linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError(f"eigenvalue solver failed for K={matrix.grid.K}: {exc}") from exc
    ev = ev[np.argsort(-ev.real)]
    return SpectrumReport(ev, float(ev.real.max()), matrix.alpha, matrix.beta, matrix.grid.K)


def fit_log_slope(times: np.ndarray, norms: np.ndarray, window_fraction: float = 1 / 3) -> tuple[float, float]:
    """Least-squares decay rate of ``log(norms)`` over the trailing window.

    Returns ``(rate, rms_residual)`` with ``norms ~ exp(-rate * t)``.
    """
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    start = times[-1] - window_fraction * (times[-1] - times[0])
    sel = (times >= start) & (norms > 0)
    if sel.sum() < 2:
        raise ValueError("not enough positive samples in the fitting window")
    t, y = times[sel], np.log(norms[sel])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    return float(-slope), float(np.sqrt(np.mean(resid**2)))


def fitted_decay_rate(matrix: LinearOperatorMatrix, v0: np.ndarray | None = None, horizon: float | None = None,
                      samples: int = 600, seed: int = 0) -> float:
    """Decay rate of ``||W(t) v0||`` fitted over the final third of the horizon.

    The default horizon is ``40 / |abscissa|``, long enough for the slowest
    mode to dominate transient non-normal growth.
    """
    if v0 is None:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(matrix.dim) + 1j * rng.standard_normal(matrix.dim)
        v0 = restrict(SpectralField.project(np.insert(v0, matrix.grid.K, 0), matrix.grid).coeffs)
    if horizon is None:
        horizon = 40.0 / abs(spectral_abscissa(matrix).spectral_abscissa)
    times, norms = norm_history(matrix, v0, horizon, samples)
    return fit_log_slope(times, norms)[0]


# -- observability -------------------------------------------------------------

@dataclass(frozen=True)
class GramianReport:
    T: float
    min_eigenvalue: float
    energy_residual: float
    order: int
    gramian: np.ndarray = field(repr=False)


def _composite_gramian(matrix: LinearOperatorMatrix, T: float, panels: int, order: int) -> np.ndarray:
    """Composite Gauss-Legendre rule with ``panels`` equal panels of ``order`` nodes."""
    h = T / panels
    x, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * h * (x + 1.0)
    w = 0.5 * h * w
    # Q = L L^H, so W^H Q W = (L^H W)^H (L^H W)
    ev, U = linalg.eigh(matrix.Q)
    Lh = np.sqrt(np.clip(ev, 0.0, None))[:, None] * U.conj().T
    Y0 = np.concatenate([np.sqrt(wi) * (Lh @ linalg.expm(matrix.A * si)) for si, wi in zip(s, w)])
    step = linalg.expm(matrix.A * h)
    W0 = np.eye(matrix.dim, dtype=complex)
    M = np.zeros_like(matrix.A)
    for _ in range(panels):
        Y = Y0 @ W0
        M += Y.conj().T @ Y
        W0 = step @ W0
    return 0.5 * (M + M.conj().T)


def gramian_identity_residual(matrix: LinearOperatorMatrix, M: np.ndarray, T: float,
                              trials: int = 8, seed: int = 0) -> float:
    """``max |2 <M v, v> - (||v||^2 - ||W(T) v||^2)|`` over seeded unit vectors."""
    rng = np.random.default_rng(seed)
    WT = linalg.expm(matrix.A * T)
    worst = 0.0
    for _ in range(trials):
        v = rng.standard_normal(matrix.dim) + 1j * rng.standard_normal(matrix.dim)
        v /= l2_norm(v)
        lhs = 2.0 * TWO_PI * np.vdot(v, M @ v).real
        rhs = 1.0 - l2_norm(WT @ v) ** 2
        worst = max(worst, abs(lhs - rhs))
    return worst


def observability_gramian(matrix: LinearOperatorMatrix, T: float, order: int = 16,
                          tol: float = 1e-8, max_panels: int = 2**16) -> GramianReport:
    """``M(T) = int_0^T W(t)^* (G D^beta G) W(t) dt`` by composite Gauss-Legendre.

    The integrand oscillates at the largest dispersive frequency, so [0, T]
    is cut into panels of ``order`` nodes each, starting from about eight
    radians of phase per panel.  The panel count doubles until successive
    Gramians agree and the energy identity
    ``2 <M v, v> = ||v||^2 - ||W(T) v||^2`` holds to ``tol``.
    ``GramianReport.order`` is the total node count.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    rho = float(np.abs(np.diag(matrix.A)).max() + np.linalg.norm(matrix.Q, 2))
    panels = max(1, math.ceil(T * rho / 8.0))
    prev = _composite_gramian(matrix, T, panels, order)
    while True:
        panels *= 2
        nxt = _composite_gramian(matrix, T, panels, order)
        change = float(np.max(np.abs(nxt - prev)))
        resid = gramian_identity_residual(matrix, nxt, T)
        if change < tol and resid < tol:
            break
        if panels >= max_panels:
            raise PrecisionError(f"Gramian quadrature did not converge (residual {resid:.2e} with {panels} panels)")
        prev = nxt
    ev = linalg.eigvalsh(nxt)
    return GramianReport(float(T), float(ev[0]), resid, panels * order, nxt)


def decay_chain(matrix: LinearOperatorMatrix, T: float, mu: float, v0: np.ndarray, n_max: int = 5):
    """Pairs ``(||W(nT) v0||^2, (1 - mu)^n ||v0||^2)`` for ``n = 0..n_max``."""
    WT = linalg.expm(matrix.A * T)
    v = np.asarray(v0, dtype=complex)
    n0 = l2_norm(v) ** 2
    rows = []
    for n in range(n_max + 1):
        rows.append((l2_norm(v) ** 2, (1.0 - mu) ** n * n0))
        v = WT @ v
    return rows


# -- exponential sums ----------------------------------------------------------

@dataclass(frozen=True)
class InghamReport:
    lambda_seq: np.ndarray = field(repr=False)
    gaps: np.ndarray = field(repr=False)
    gamma: float
    gamma_inf: float
    N: int
    biorth_residual: float | None = None


def ingham_gaps(alpha: float, K: int, N: int = 0) -> InghamReport:
    """Gaps of ``lambda_k = k |k|^alpha`` for ``|k| <= K``.

    ``gamma`` is the smallest consecutive gap; ``gamma_inf`` the smallest gap
    between consecutive frequencies ``n, n+1`` with both ``|n|, |n+1| > N``
    (``inf`` when no such pair exists).
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    k = np.arange(-K, K + 1)
    lam = dispersion_relation(k, alpha)  # already increasing in k
    gaps = np.diff(lam)
    left, right = k[:-1], k[1:]
    far = (np.abs(left) > N) & (np.abs(right) > N)
    g_inf = float(gaps[far].min()) if far.any() else math.inf
    return InghamReport(lam, gaps, float(gaps.min()), g_inf, int(N))


def exponential_gram(lam: np.ndarray, T: float) -> np.ndarray:
    """``Gamma_jk = int_0^T exp(i (lambda_j - lambda_k) t) dt`` in closed form."""
    d = lam[:, None] - lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        G = (np.exp(1j * d * T) - 1.0) / (1j * d)
    G[d == 0] = T
    return G


def biorthogonal_residual(alpha: float, K: int, T: float, N: int = 0, cond_max: float = 1e12) -> float:
    """Residual of the biorthogonal family to ``{exp(i lambda_k t)}`` on [0, T].

    ``q_j = sum_l B_jl exp(i lambda_l t)`` with ``B = Gamma^{-1}`` gives
    ``<q_j, e_k> = (B Gamma)_jk``; the residual is its distance from identity
    (max off-diagonal modulus plus max diagonal deviation).
    """
    rep = ingham_gaps(alpha, K, N)
    if not T > math.pi / rep.gamma_inf:
        raise ValueError(f"T={T} does not exceed pi/gamma_inf = {math.pi / rep.gamma_inf:.4g}")
    G = exponential_gram(rep.lambda_seq, T)
    cond = float(np.linalg.cond(G))
    if not cond < cond_max:
        raise ConditioningError(f"Gram matrix condition number {cond:.3e} exceeds {cond_max:.0e}", cond)
    B = np.linalg.solve(G.T, np.eye(len(G))).T
    P = B @ G
    off = P - np.diag(np.diag(P))
    return float(np.abs(off).max(initial=0.0) + np.abs(np.diag(P) - 1.0).max())


def ucp_gramian(alpha: float, K: int, T: float, window: tuple[float, float], return_matrix: bool = False):
    """Smallest eigenvalue of the strip Gramian
    ``Q_jk = int_0^T int_a^b exp(i((lambda_j - lambda_k) t + (j - k) x)) dx dt``
    over modes ``|j|, |k| <= K``.
    """
    a, b = window
    if not b > a or b - a > TWO_PI + 1e-12:
        raise ValueError(f"degenerate window [{a}, {b}]")
    if not T > 0 or not alpha > 0:
        raise ValueError("need T > 0 and alpha > 0")
    k = np.arange(-K, K + 1)
    lam = dispersion_relation(k, alpha)
    Gt = exponential_gram(lam, T)
    d = (k[:, None] - k[None, :]).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        S = (np.exp(1j * d * b) - np.exp(1j * d * a)) / (1j * d)
    S[d == 0] = b - a
    Q = Gt * S
    Q = 0.5 * (Q + Q.conj().T)
    mu = float(linalg.eigvalsh(Q)[0])
    return (mu, Q) if return_matrix else mu
