"""Integer arithmetic of the resonance function and modulation lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..spectral import dispersion_relation


def _bracket(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


@dataclass(frozen=True)
class FrequencyTriple:
    """Nonzero integers with ``k1 + k2 + k3 = 0``."""

    k1: int
    k2: int
    k3: int

    def __post_init__(self):
        ks = (self.k1, self.k2, self.k3)
        if any(int(k) != k for k in ks):
            raise ValueError(f"triple entries must be integers, got {ks}")
        if any(k == 0 for k in ks):
            raise ValueError(f"triple entries must be nonzero, got {ks}")
        if sum(ks) != 0:
            raise ValueError(f"triple must sum to zero, got {ks}")

    @classmethod
    def of(cls, triple) -> "FrequencyTriple":
        if isinstance(triple, FrequencyTriple):
            return triple
        return cls(*(int(k) for k in triple))

    def as_array(self) -> np.ndarray:
        return np.array([self.k1, self.k2, self.k3])

    @property
    def n_max(self) -> int:
        return int(np.abs(self.as_array()).max())

    @property
    def n_min(self) -> int:
        return int(np.abs(self.as_array()).min())


def resonance(triple, alpha: float) -> float:
    """``Omega = sum_j k_j |k_j|^alpha``."""
    t = FrequencyTriple.of(triple)
    return float(np.sum(dispersion_relation(t.as_array(), alpha)))


class ScanResult(NamedTuple):
    min_ratio: float
    argmin: tuple[int, int, int]
    count: int


def _all_triples(K_max: int):
    """Every valid triple with ``max |k_j| <= K_max`` as three int arrays."""
    r = np.arange(-K_max, K_max + 1)
    k1, k2 = np.meshgrid(r, r, indexing="ij")
    k1, k2 = k1.ravel(), k2.ravel()
    k3 = -k1 - k2
    ok = (k1 != 0) & (k2 != 0) & (k3 != 0) & (np.abs(k3) <= K_max)
    return k1[ok], k2[ok], k3[ok]


def resonance_constant_scan(alpha: float, K_max: int) -> ScanResult:
    """Infimum of ``|Omega| / (N_max^alpha N_min)`` over all valid triples with
    ``max |k_j| <= K_max``."""
    if K_max < 2:
        raise ValueError("K_max must be at least 2")
    k1, k2, k3 = _all_triples(K_max)
    L = lambda k: dispersion_relation(k, alpha)  # noqa: E731
    omega = np.abs(L(k1) + L(k2) + L(k3))
    a = np.abs(np.stack([k1, k2, k3])).astype(float)
    ratio = omega / (a.max(axis=0) ** alpha * a.min(axis=0))
    i = int(np.argmin(ratio))
    return ScanResult(float(ratio[i]), (int(k1[i]), int(k2[i]), int(k3[i])), int(k1.size))


def cubic_ratio(triple) -> float:
    """``3 |k1 k2 k3| / (N_max^2 N_min)``: the ``alpha = 2`` ratio via the cubic identity."""
    t = FrequencyTriple.of(triple)
    return 3.0 * abs(t.k1 * t.k2 * t.k3) / (t.n_max**2 * t.n_min)


# -- modulation ------------------------------------------------------------------------

def minmax_modulation(triple, alpha: float, beta: float) -> float:
    """``min`` over ``tau1 + tau2 + tau3 = 0`` of ``max_j |tau_j - L_kj| / <k_j>^beta``.

    Equal weighted distances are optimal, giving ``|Omega| / sum_j <k_j>^beta``.
    """
    t = FrequencyTriple.of(triple)
    w = _bracket(t.as_array()) ** beta
    return abs(resonance(t, alpha)) / float(w.sum())


def minmax_modulation_low(triple, alpha: float, beta: float) -> float:
    """Min-max as above restricted to configurations whose largest unweighted
    modulation ``|tau_j - L_kj|`` sits at the smallest frequency.

    Then ``|Omega| <= 3 |sigma_j0|`` and the optimum is ``|Omega| / (3 <k_min>^beta)``.
    """
    t = FrequencyTriple.of(triple)
    return abs(resonance(t, alpha)) / (3.0 * float(_bracket(t.n_min) ** beta))


def minmax_modulation_grid(triple, alpha: float, beta: float, points: int = 201, rounds: int = 40,
                           low_frequency: bool = False) -> float:
    """Zooming grid search for the min-max over the constraint plane.

    Modulations ``sigma_j = tau_j - L_kj`` satisfy ``sum sigma_j = -Omega``;
    the search runs over ``(sigma_1, sigma_2)``.  ``low_frequency=True``
    discards points whose largest ``|sigma_j|`` is not at the smallest ``|k_j|``.
    """
    t = FrequencyTriple.of(triple)
    ks = t.as_array()
    w = _bracket(ks) ** beta
    om = resonance(t, alpha)
    j0 = int(np.argmin(np.abs(ks)))
    ties = np.flatnonzero(np.abs(ks) == np.abs(ks[j0]))

    def objective(s1, s2):
        s3 = -om - s1 - s2
        sig = np.stack([s1, s2, s3])
        val = np.max(np.abs(sig) / w[:, None, None], axis=0)
        if low_frequency:
            a = np.abs(sig)
            ok = np.max(a[ties], axis=0) >= a.max(axis=0)
            val = np.where(ok, val, np.inf)
        return val

    c = np.array([-om * w[0] / w.sum(), -om * w[1] / w.sum()])
    half = np.array([abs(om) + 1.0, abs(om) + 1.0])
    best = math.inf
    for _ in range(rounds):
        g1 = np.linspace(c[0] - half[0], c[0] + half[0], points)
        g2 = np.linspace(c[1] - half[1], c[1] + half[1], points)
        S1, S2 = np.meshgrid(g1, g2, indexing="ij")
        val = objective(S1, S2)
        i = np.unravel_index(np.argmin(val), val.shape)
        if val[i] < best:
            best = float(val[i])
            c = np.array([S1[i], S2[i]])
        half = half * 4.0 / (points - 1)
    return best


class ModulationScan(NamedTuple):
    general: float
    general_witness: tuple[int, int, int]
    low: float
    low_witness: tuple[int, int, int]
    min_value: float


def modulation_scan(alpha: float, beta: float, K_max: int) -> ModulationScan:
    """Normalized lower-bound constants over every triple with ``max |k_j| <= K_max``:
    ``minmax / (N_max^(alpha-beta) N_min)`` and the low-frequency variant
    ``/(N_max^alpha N_min^(1-beta))``."""
    k1, k2, k3 = _all_triples(K_max)
    ks = np.stack([k1, k2, k3])
    a = np.abs(ks).astype(float)
    om = np.abs(dispersion_relation(ks, alpha).sum(axis=0))
    w = _bracket(ks) ** beta
    nmax, nmin = a.max(axis=0), a.min(axis=0)
    mm = om / w.sum(axis=0)
    gen = mm / (nmax ** (alpha - beta) * nmin)
    low = om / (3 * _bracket(nmin) ** beta) / (nmax**alpha * nmin ** (1 - beta))
    i, j = int(np.argmin(gen)), int(np.argmin(low))
    trip = lambda n: (int(k1[n]), int(k2[n]), int(k3[n]))  # noqa: E731
    return ModulationScan(float(gen[i]), trip(i), float(low[j]), trip(j), float(mm.min()))


class GapResult(NamedTuple):
    normalized: float
    distance: float


def offdiag_modulation_gap(k: int, n: int, alpha: float, beta: float) -> GapResult:
    """Min over ``tau`` of ``max(<(tau - L_k)/<k>^beta>, <(tau - L_n)/<n>^beta>)``
    divided by ``max(<n>, <k>)^(alpha - beta)``.

    The unbracketed min-max ``d = |L_n - L_k| / (<k>^beta + <n>^beta)`` is
    attained at the weighted midpoint and returned as ``distance``.
    """
    if k == n:
        raise ValueError("the gap is defined off the diagonal only (k != n)")
    if k == 0 or n == 0:
        raise ValueError("k and n must be nonzero")
    d = _gap_distance(np.array([k]), np.array([n]), alpha, beta)[0]
    norm = max(_bracket(n), _bracket(k)) ** (alpha - beta)
    return GapResult(float(_bracket(d) / norm), float(d))


def _gap_distance(k, n, alpha, beta):
    L = lambda q: dispersion_relation(q, alpha)  # noqa: E731
    return np.abs(L(n) - L(k)) / (_bracket(k) ** beta + _bracket(n) ** beta)


def offdiag_gap_grid(k: int, n: int, alpha: float, beta: float, points: int = 2001, rounds: int = 30) -> float:
    """Zooming grid search of the unbracketed two-point min-max over ``tau``."""
    L = dispersion_relation(np.array([k, n]), alpha)
    w = _bracket(np.array([k, n])) ** beta
    lo, hi = float(L.min()) - 1.0, float(L.max()) + 1.0
    best, centre, half = math.inf, 0.5 * (lo + hi), 0.5 * (hi - lo)
    for _ in range(rounds):
        tau = np.linspace(centre - half, centre + half, points)
        val = np.maximum(np.abs(tau - L[0]) / w[0], np.abs(tau - L[1]) / w[1])
        i = int(np.argmin(val))
        if val[i] < best:
            best, centre = float(val[i]), float(tau[i])
        half *= 4.0 / (points - 1)
    return best


def offdiag_gap_scan(alpha: float, beta: float, K_max: int) -> tuple[float, tuple[int, int]]:
    """Uniform lower bound of the normalized gap over ``0 < |k|, |n| <= K_max``, ``k != n``."""
    r = np.concatenate([np.arange(-K_max, 0), np.arange(1, K_max + 1)])
    k, n = np.meshgrid(r, r, indexing="ij")
    k, n = k.ravel(), n.ravel()
    ok = k != n
    k, n = k[ok], n[ok]
    d = _gap_distance(k, n, alpha, beta)
    val = _bracket(d) / np.maximum(_bracket(n), _bracket(k)) ** (alpha - beta)
    i = int(np.argmin(val))
    return float(val[i]), (int(k[i]), int(n[i]))


# -- exponent numerology --------------------------------------------------------------

class BInterval(NamedTuple):
    lower: float
    upper: float
    bounds: dict

    @property
    def empty(self) -> bool:
        return not self.upper > self.lower


def admissible_b_interval(alpha: float, beta: float) -> BInterval:
    """Open interval ``(1/2, min of the four upper bounds)`` of the bilinear estimate."""
    if not alpha > beta > 0:
        raise ValueError(f"need alpha > beta > 0, got alpha={alpha}, beta={beta}")
    bounds = {
        "(alpha-1)/(alpha-beta)": (alpha - 1) / (alpha - beta),
        "(alpha-1/2)/(alpha-beta+1)": (alpha - 0.5) / (alpha - beta + 1),
        "1-(1-beta/2)/alpha": 1 - (1 - beta / 2) / alpha,
        "1-(3/2-beta)/(alpha-beta+1)": 1 - (1.5 - beta) / (alpha - beta + 1),
    }
    return BInterval(0.5, min(bounds.values()), bounds)


def n1_b_window(alpha: float, beta: float) -> tuple[float, float]:
    """``(1/2, alpha / (alpha + beta))``: range of ``b`` for the off-diagonal estimate."""
    return 0.5, alpha / (alpha + beta)


def solver_b_interval(alpha: float, beta: float) -> tuple[float, float]:
    """Intersection of the bilinear interval and the off-diagonal window."""
    iv = admissible_b_interval(alpha, beta)
    return 0.5, min(iv.upper, n1_b_window(alpha, beta)[1])


def numerology_grid(n: int = 50, band: float = 1e-9):
    """Check ``nonempty <=> alpha + beta > 2`` on an ``n x n`` grid of
    ``1 < alpha <= 2``, ``0 < beta < alpha``; returns ``(violations, checked)``."""
    violations, checked = [], 0
    for a in np.linspace(1.0, 2.0, n + 1)[1:]:
        for b in np.linspace(0.0, a, n + 2)[1:-1]:
            if abs(a + b - 2) < band:
                continue
            checked += 1
            if (not admissible_b_interval(a, b).empty) != (a + b > 2):
                violations.append((float(a), float(b)))
    return violations, checked
