"""Empirical ratio tests for the linear and bilinear Z^b estimates.

Every harness returns a :class:`RatioStats`; bounded maxima that stay put
under refinement are the evidence sought, not a proof.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate, signal

from ..damping import DampingDecomposition
from ..errors import PrecisionError
from ..spectral import TWO_PI, TorusGrid, dispersion_relation
from .arithmetic import admissible_b_interval, n1_b_window
from .packets import PacketSet, matrix_packets, packet_znorm, product_packets
from .zspace import (SpaceTimeField, ZbParams, bracket, cutoff_eta, smoothing_multiplier, zb_weight,
                     znorm)

DECAY_TARGET = 1e-8


class RatioStats(NamedTuple):
    max: float
    mean: float
    values: np.ndarray
    witness: dict | None = None


def _stats(values, witness=None) -> RatioStats:
    v = np.asarray(values, dtype=float)
    return RatioStats(float(v.max()), float(v.mean()), v, witness)


def random_coefficients(grid: TorusGrid, rng: np.random.Generator) -> np.ndarray:
    """Real mean-zero coefficients with ``|f_k| ~ <k>^-1`` gaussian."""
    K = grid.K
    pos = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / bracket(np.arange(1, K + 1))
    c = np.zeros(grid.size, dtype=complex)
    c[K + 1:] = pos
    c[:K] = np.conj(pos[::-1])
    return c


def _l2(c: np.ndarray) -> float:
    return math.sqrt(TWO_PI * float(np.sum(np.abs(c) ** 2)))


def _decay_window(c: np.ndarray) -> float:
    cmin = float(np.min(c[c > 0]))
    return math.log(1.0 / DECAY_TARGET) / cmin


# -- free solutions ----------------------------------------------------------------

def free_mode_integral(ck: float, k: float, b: float, beta: float) -> float:
    """``int W_k(sigma)^2 |2c / (c^2 + sigma^2)|^2 dsigma`` (even integrand)."""
    f = lambda x: zb_weight(k, x, b, beta) ** 2 * (2 * ck / (ck * ck + x * x)) ** 2  # noqa: E731
    brk = [0.0, ck, 10 * ck + 1.0]
    val = sum(integrate.quad(f, a, e, limit=200, epsabs=0, epsrel=1e-11)[0] for a, e in zip(brk, brk[1:]))
    val += integrate.quad(f, brk[-1], np.inf, limit=400, epsabs=0, epsrel=1e-11)[0]
    return 2.0 * val


def free_field(decomp: DampingDecomposition, alpha: float, f: np.ndarray, times) -> SpaceTimeField:
    """Samples of ``S(t) f`` with ``S(t)_k = exp(-i L_k t - c_k |t|)`` (no cutoff)."""
    grid = decomp.grid
    t = np.asarray(times, dtype=float)
    env = np.exp(-np.outer(np.abs(t), decomp.c)) * f[None, :]
    return SpaceTimeField.from_envelopes(grid, alpha, t, env)


def free_solution_ratio(zb: ZbParams, decomp: DampingDecomposition, trials: int = 100, seed: int = 0,
                        method: str = "exact", samples: int = 2**15, window: float | None = None) -> RatioStats:
    """Statistics of ``||S(.) f||_{Z^b} / ||f||_{L^2}`` over random ``f``.

    ``method="exact"`` transforms ``exp(-c|t|)`` in closed form and integrates
    the weight by quadrature; ``"sampled"`` evaluates the free solution on
    ``[-T_w, T_w]`` and uses :func:`znorm`.
    """
    if zb.b >= 1.5:
        raise ValueError(f"the free-solution bound needs b < 3/2, got {zb.b}")
    grid = decomp.grid
    c = decomp.c
    rng = np.random.default_rng(seed)
    nz = grid.wavenumbers != 0
    if method == "exact":
        I = np.zeros(grid.size)
        for i in np.flatnonzero(nz):
            I[i] = free_mode_integral(float(c[i]), float(grid.wavenumbers[i]), zb.b, zb.beta)
        vals = []
        for _ in range(trials):
            f = random_coefficients(grid, rng)
            vals.append(math.sqrt(np.sum(I * np.abs(f) ** 2)) / _l2(f))
        return _stats(vals, {"per_mode_max": float(math.sqrt(I.max() / TWO_PI))})
    if method != "sampled":
        raise ValueError(f"unknown method {method!r}")
    need = _decay_window(c[nz])
    Tw = need if window is None else float(window)
    if Tw < need * (1 - 1e-12):
        raise PrecisionError(f"window {Tw:.4g} too short: exp(-c_min T_w) < {DECAY_TARGET} needs T_w >= {need:.4g}")
    t = np.linspace(-Tw, Tw, samples, endpoint=False)
    vals = []
    for _ in range(trials):
        f = random_coefficients(grid, rng)
        vals.append(znorm(free_field(decomp, zb.alpha, f, t), zb) / _l2(f))
    return _stats(vals)


# -- time cutoff ---------------------------------------------------------------------

ModeSource = Callable[[np.ndarray], np.ndarray]


def free_source(decomp: DampingDecomposition, alpha: float, f: np.ndarray) -> ModeSource:
    L = dispersion_relation(decomp.grid.wavenumbers, alpha)
    lam = -1j * L

    def source(t):
        t = np.asarray(t, dtype=float)
        return np.exp(np.outer(t, lam) - np.outer(np.abs(t), decomp.c)) * f[None, :]
    return source


def constant_source(grid: TorusGrid, coeffs: np.ndarray) -> ModeSource:
    def source(t):
        return np.repeat(np.asarray(coeffs, dtype=complex)[None, :], np.size(t), axis=0)
    return source


class CutoffFit(NamedTuple):
    slope: float
    T: np.ndarray
    ratios: np.ndarray


def cutoff_ratio(grid: TorusGrid, alpha: float, source: ModeSource, b: float, b_prime: float, beta: float,
                 T: float, samples: int = 4096) -> float:
    """``||eta(t/T) u||_{Z^b'} / ||eta(t/2T) u||_{Z^b}``."""
    def norm(scale, bb):
        t = np.linspace(-2 * scale, 2 * scale, samples, endpoint=False)
        coeffs = source(t) * cutoff_eta(t / scale)[:, None]
        fld = SpaceTimeField.from_coefficients(grid, alpha, t, coeffs)
        return znorm(fld, ZbParams(bb, beta, alpha))
    den = norm(2 * T, b)
    if den == 0:
        raise ValueError("degenerate field: zero norm")
    return norm(T, b_prime) / den


def cutoff_scaling(grid: TorusGrid, alpha: float, beta: float, source: ModeSource, b: float, b_prime: float,
                   T_grid=None, samples: int = 4096) -> CutoffFit:
    """Fit the log-log slope of :func:`cutoff_ratio` over a geometric grid of ``T``."""
    if not -0.5 < b_prime <= b < 0.5:
        raise ValueError(f"need -1/2 < b' <= b < 1/2, got b={b}, b'={b_prime}")
    T_grid = np.geomspace(1e-4, 1e-2, 7) if T_grid is None else np.asarray(T_grid, dtype=float)
    r = np.array([cutoff_ratio(grid, alpha, source, b, b_prime, beta, T, samples) for T in T_grid])
    slope = float(np.polyfit(np.log(T_grid), np.log(r), 1)[0])
    return CutoffFit(slope, T_grid, r)


# -- Duhamel term ----------------------------------------------------------------------

def _phi12(z: np.ndarray):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-2
    zs = np.where(small, 1.0, z)
    e = np.expm1(zs)
    p1 = np.where(small, 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120, e / zs)
    p2 = np.where(small, 0.5 + z / 6 + z**2 / 24 + z**3 / 120 + z**4 / 720, (e - zs) / zs**2)
    return p1, p2


def duhamel_samples(decomp: DampingDecomposition, alpha: float, times, forcing: np.ndarray) -> np.ndarray:
    """``w(t_m) = int_0^t_m S(t_m - s) f(s) ds`` for forcing samples on ``times``
    (``times[0] = 0``), exact for piecewise-linear forcing."""
    t = np.asarray(times, dtype=float)
    if abs(t[0]) > 0:
        raise ValueError("time grid must start at 0")
    h = t[1] - t[0]
    grid = decomp.grid
    lam = -1j * dispersion_relation(grid.wavenumbers, alpha) - decomp.c
    z = lam * h
    decay = np.exp(z)
    p1, p2 = _phi12(z)
    f = np.asarray(forcing, dtype=complex)
    x = h * (p1[None, :] * f[:-1] + p2[None, :] * (f[1:] - f[:-1]))
    out = np.zeros_like(f)
    for i in np.flatnonzero(grid.wavenumbers != 0):
        out[1:, i] = signal.lfilter([1.0], [1.0, -decay[i]], x[:, i])
    return out


def gaussian_forcing(grid: TorusGrid, times, amp: np.ndarray, t0: float, width: float) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    return np.exp(-0.5 * ((t - t0) / width) ** 2)[:, None] * amp[None, :]


def _erfc_term(z, log_pref):
    """``exp(log_pref) * erfc(z)`` without overflow, using ``erfc(z) = exp(-z^2) w(iz)``."""
    from scipy.special import wofz
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    pos = z.real >= 0
    out[pos] = np.exp(log_pref[pos] - z[pos] ** 2) * wofz(1j * z[pos])
    neg = ~pos
    out[neg] = 2 * np.exp(log_pref[neg]) - np.exp(log_pref[neg] - z[neg] ** 2) * wofz(-1j * z[neg])
    return out


def gaussian_duhamel_exact(lam: complex, t, t0: float, width: float) -> np.ndarray:
    """Closed form of ``int_0^t exp(lam (t - s)) exp(-(s - t0)^2 / 2 w^2) ds``."""
    t = np.asarray(t, dtype=float)
    w2 = width * width
    m = t0 - lam * w2
    r = math.sqrt(2.0) * width
    log_pref = lam * (t - t0) + 0.5 * lam * lam * w2
    z0 = np.full(t.shape, -m / r, dtype=complex)
    zt = (t - m) / r
    lp = np.asarray(log_pref, dtype=complex)
    return width * math.sqrt(math.pi / 2) * (_erfc_term(z0, lp) - _erfc_term(zt, lp))


def duhamel_smoothing_ratio(zb: ZbParams, decomp: DampingDecomposition, trials: int = 50, seed: int = 0,
                            dt: float = 0.02, centre_range=(6.0, 12.0), width_range=(0.5, 1.5),
                            shift: float = 0.0, window: float | None = None) -> RatioStats:
    """Statistics of ``||int_0^t S(t-s) f(s) ds||_{Z^b} / ||D^{-beta(b-1/2)} f||_{Z^{b-1}}``
    over Gaussian-in-time forcings with ``<k>^-1`` spatial spectra.

    ``shift`` translates every forcing in time (translation check).
    """
    if not 0.5 < zb.b < 1.5:
        raise ValueError(f"need 1/2 < b < 3/2, got {zb.b}")
    grid = decomp.grid
    nz = grid.wavenumbers != 0
    rng = np.random.default_rng(seed)
    t_end = centre_range[1] + shift + 8 * width_range[1]
    need = t_end + _decay_window(decomp.c[nz])
    Tw = need if window is None else float(window)
    if Tw < need * (1 - 1e-12):
        raise PrecisionError(f"window {Tw:.4g} too short; need T_w >= {need:.4g}")
    n = int(math.ceil(Tw / dt))
    t = np.arange(n + 1) * dt
    smooth = smoothing_multiplier(grid, -zb.beta * (zb.b - 0.5))
    rhs_norm = ZbParams(zb.b - 1.0, zb.beta, zb.alpha)
    vals = []
    for _ in range(trials):
        amp = random_coefficients(grid, rng)
        t0 = rng.uniform(*centre_range) + shift
        width = rng.uniform(*width_range)
        f = gaussian_forcing(grid, t, amp, t0, width)
        w = duhamel_samples(decomp, zb.alpha, t, f)
        lhs = znorm(SpaceTimeField.from_coefficients(grid, zb.alpha, t, w), zb)
        rhs = znorm(SpaceTimeField.from_coefficients(grid, zb.alpha, t, f).scaled(smooth), rhs_norm)
        vals.append(lhs / rhs)
    return _stats(vals)


# -- bilinear and N1 ratios -------------------------------------------------------------

def check_bilinear_b(zb: ZbParams):
    lo, hi, bounds = admissible_b_interval(zb.alpha, zb.beta)
    if not lo < zb.b:
        raise ValueError(f"b = {zb.b} must exceed 1/2")
    for name, val in bounds.items():
        if not zb.b < val:
            raise ValueError(f"b = {zb.b} violates the bound {name} = {val:.6g}")


def random_packets(K: int, beta: float, rng: np.random.Generator) -> PacketSet:
    """One packet per positive mode (plus mirrors): amplitudes ``<k>^-1`` gaussian,
    centres and widths on the modulation scale ``<k>^beta``."""
    k = np.arange(1, K + 1)
    scale = bracket(k) ** beta
    amp = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / bracket(k)
    mu = scale * rng.standard_normal(K)
    s = scale * rng.uniform(0.25, 1.0, K)
    return PacketSet.make(k, mu, s, amp).real_closure()


def _derivative_smoothing(beta_eff: float, b: float):
    p = -beta_eff * (b - 0.5)

    def factor(k):
        ka = np.abs(k).astype(float)
        out = np.zeros(k.shape, dtype=complex)
        nz = ka > 0
        out[nz] = 1j * k[nz] * ka[nz] ** p
        return out
    return factor


def bilinear_pair_ratio(u: PacketSet, v: PacketSet, alpha: float, beta: float, b: float) -> float:
    """``||D^{-beta(b-1/2)} d/dx (u v)||_{Z^{b-1}} / (||u||_{Z^b} ||v||_{Z^b})``."""
    nu, nv = packet_znorm(u, b, beta), packet_znorm(v, b, beta)
    if nu == 0 or nv == 0:
        return 0.0
    w = product_packets(u, v, alpha).scaled(_derivative_smoothing(beta, b))
    return packet_znorm(w, b - 1.0, beta) / (nu * nv)


def adversarial_pairs(K: int, alpha: float, beta: float, widths=(0.1, 1.0)):
    """Single-packet pairs on near-resonant dyadic triples.

    Two placements per triple: inputs on their characteristics (the output
    carries the whole resonance as modulation) and modulations equalized
    relative to the weights ``<k_j>^beta``.
    """
    L = lambda q: float(dispersion_relation(np.array([q]), alpha)[0])  # noqa: E731
    w = lambda q: float(bracket(q) ** beta)  # noqa: E731
    triples = set()
    N = 1
    while N <= K:
        for k1, k2 in ((N, 1), (N, -N + 1), (N, N), (N, -1), (N, N // 2 or 1)):
            if 0 < abs(k1) <= K and 0 < abs(k2) <= K and k1 + k2 != 0:
                triples.add((k1, k2))
        N *= 2
    for k1, k2 in sorted(triples):
        k = k1 + k2
        omega = L(k) - L(k1) - L(k2)
        tot = w(k1) + w(k2) + w(k)
        for place, (mu1, mu2) in (("on-shell", (0.0, 0.0)),
                                  ("equalized", (omega * w(k1) / tot, omega * w(k2) / tot))):
            for eps in widths:
                u = PacketSet.make([k1], [mu1], [eps * w(k1)], [1.0]).real_closure()
                v = PacketSet.make([k2], [mu2], [eps * w(k2)], [1.0]).real_closure()
                yield (k1, k2, place, eps), u, v


def bilinear_ratio(zb: ZbParams, K: int, trials: int = 100, seed: int = 0, dissipative: bool = True,
                   adversarial: bool = True) -> RatioStats:
    """Max of the bilinear ratio over random packet fields and adversarial pairs.

    ``dissipative=False`` sets the dissipation exponent in the norm weights and
    the smoothing factor to 0 (admissibility is still checked on ``zb``).
    """
    check_bilinear_b(zb)
    beta = zb.beta if dissipative else 0.0
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(trials):
        u = random_packets(K, beta, rng)
        v = random_packets(K, beta, rng)
        vals.append(bilinear_pair_ratio(u, v, zb.alpha, beta, zb.b))
    witness = None
    if adversarial:
        best = -1.0
        for key, u, v in adversarial_pairs(K, zb.alpha, beta):
            r = bilinear_pair_ratio(u, v, zb.alpha, beta, zb.b)
            vals.append(r)
            if r > best:
                best, witness = r, {"k1": key[0], "k2": key[1], "placement": key[2], "width": key[3],
                                    "ratio": r}
    return _stats(vals, witness)


def n1_pair_ratio(v: PacketSet, decomp: DampingDecomposition, alpha: float, b: float) -> float:
    beta = decomp.beta
    nv = packet_znorm(v, b, beta)
    if nv == 0:
        return 0.0
    p = -beta * (b - 0.5)
    out = matrix_packets(v, decomp.n1_matrix, decomp.grid, alpha)
    out = out.scaled(lambda k: np.abs(k).astype(float) ** p)
    return packet_znorm(out, b - 1.0, beta) / nv


def n1_bound_ratio(zb: ZbParams, decomp: DampingDecomposition, trials: int = 50, seed: int = 0) -> RatioStats:
    """Statistics of ``||D^{-beta(b-1/2)} N1 v||_{Z^{b-1}} / ||v||_{Z^b}`` over random packet fields."""
    lo, hi = n1_b_window(zb.alpha, zb.beta)
    if not lo < zb.b < hi:
        raise ValueError(f"b = {zb.b} outside the window ({lo}, {hi:.6g}) of the N1 estimate")
    if not math.isclose(zb.beta, decomp.beta):
        raise ValueError("norm beta differs from the decomposition beta")
    rng = np.random.default_rng(seed)
    vals = [n1_pair_ratio(random_packets(decomp.grid.K, zb.beta, rng), decomp, zb.alpha, zb.b)
            for _ in range(trials)]
    return _stats(vals)
