"""Space-time fields built from Gaussian packets in the modulation variable.

A packet ``(k, mu, s, A)`` is the mode-``k`` field whose envelope transform is
``A exp(-(sigma - mu)^2 / (2 s^2))``.  Products and time-independent matrices
map packets to packets in closed form, so Z^b norms of ``d/dx (u v)`` or of
``N v`` reduce to Gaussian-weighted integrals of the norm weight, done here
by Gauss-Hermite quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..spectral import TorusGrid, dispersion_relation
from .zspace import SpaceTimeField, zb_weight

GH_NODES = 64
_GH_X, _GH_W = np.polynomial.hermite.hermgauss(GH_NODES)
_PAIR_CHUNK = 1 << 18
# same-mode pairs whose Gaussian overlap is below this are skipped
OVERLAP_CUTOFF = 1e-40


@dataclass(frozen=True)
class PacketSet:
    k: np.ndarray
    mu: np.ndarray
    s: np.ndarray
    amp: np.ndarray

    def __post_init__(self):
        n = len(self.k)
        for name in ("mu", "s", "amp"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if np.any(np.asarray(self.s) <= 0):
            raise ValueError("packet widths must be positive")

    @classmethod
    def make(cls, k, mu, s, amp) -> "PacketSet":
        return cls(np.asarray(k, dtype=np.int64), np.asarray(mu, dtype=float),
                   np.asarray(s, dtype=float), np.asarray(amp, dtype=complex))

    @classmethod
    def empty(cls) -> "PacketSet":
        return cls.make([], [], [], [])

    def __len__(self) -> int:
        return len(self.k)

    def real_closure(self) -> "PacketSet":
        """Append the mirror packets ``(-k, -mu, s, conj A)`` of a real field."""
        return PacketSet.make(np.concatenate([self.k, -self.k]), np.concatenate([self.mu, -self.mu]),
                              np.concatenate([self.s, self.s]), np.concatenate([self.amp, np.conj(self.amp)]))

    def scaled(self, factor) -> "PacketSet":
        """Multiply amplitudes by ``factor(k)`` (a callable on integer arrays)."""
        return PacketSet(self.k, self.mu, self.s, self.amp * factor(self.k))

    def drop_zero(self) -> "PacketSet":
        keep = (self.k != 0) & (self.amp != 0)
        return PacketSet(self.k[keep], self.mu[keep], self.s[keep], self.amp[keep])

    def envelopes(self, grid: TorusGrid, times) -> np.ndarray:
        """Time-domain envelopes ``a_k(t)``; packets with ``|k| > K`` are dropped."""
        t = np.asarray(times, dtype=float)
        out = np.zeros((t.size, grid.size), dtype=complex)
        for k, mu, s, a in zip(self.k, self.mu, self.s, self.amp):
            if abs(k) <= grid.K:
                out[:, k + grid.K] += a * s / math.sqrt(2 * math.pi) * np.exp(-1j * mu * t - 0.5 * (s * t) ** 2)
        return out

    def to_field(self, grid: TorusGrid, alpha: float, times, pad: int = 4) -> SpaceTimeField:
        return SpaceTimeField.from_envelopes(grid, alpha, times, self.envelopes(grid, times), pad=pad)


def packet_znorm(p: PacketSet, b: float, beta: float) -> float:
    """Z^b norm of a packet field, integrated exactly in time and by
    Gauss-Hermite quadrature in the modulation variable."""
    p = p.drop_zero()
    if len(p) == 0:
        return 0.0
    order = np.argsort(p.k, kind="stable")
    k, mu, s, amp = p.k[order], p.mu[order], p.s[order], p.amp[order]
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    ends = np.r_[starts[1:], k.size]
    # all same-k index pairs (i, j)
    ii, jj = [], []
    for a, e in zip(starts, ends):
        idx = np.arange(a, e)
        ii.append(np.repeat(idx, idx.size))
        jj.append(np.tile(idx, idx.size))
    ii = np.concatenate(ii)
    jj = np.concatenate(jj)
    total = 0.0
    for c0 in range(0, ii.size, _PAIR_CHUNK):
        i = ii[c0:c0 + _PAIR_CHUNK]
        j = jj[c0:c0 + _PAIR_CHUNK]
        si2, sj2 = s[i] ** 2, s[j] ** 2
        overlap = np.exp(-((mu[i] - mu[j]) ** 2) / (2 * (si2 + sj2)))
        keep = overlap > OVERLAP_CUTOFF
        i, j, si2, sj2, overlap = i[keep], j[keep], si2[keep], sj2[keep], overlap[keep]
        var = si2 * sj2 / (si2 + sj2)
        centre = var * (mu[i] / si2 + mu[j] / sj2)
        sd = np.sqrt(2 * var)
        nodes = centre[:, None] + sd[:, None] * _GH_X[None, :]
        W2 = zb_weight(k[i][:, None], nodes, b, beta) ** 2
        integral = sd * (W2 @ _GH_W)
        total += float(np.sum((amp[i] * np.conj(amp[j])).real * overlap * integral))
    return math.sqrt(max(total, 0.0))


def product_packets(u: PacketSet, v: PacketSet, alpha: float) -> PacketSet:
    """Packets of the pointwise product ``u v``.

    The product of packets at ``k1, k2`` lands at ``k = k1 + k2`` with centre
    ``mu1 + mu2 + L_k1 + L_k2 - L_k``, width ``sqrt(s1^2 + s2^2)`` and
    amplitude ``A1 A2 s1 s2 / (sqrt(2 pi) sqrt(s1^2 + s2^2))``.
    """
    u, v = u.drop_zero(), v.drop_zero()
    if len(u) == 0 or len(v) == 0:
        return PacketSet.empty()
    i = np.repeat(np.arange(len(u)), len(v))
    j = np.tile(np.arange(len(v)), len(u))
    k1, k2 = u.k[i], v.k[j]
    k = k1 + k2
    L = lambda q: dispersion_relation(q, alpha)  # noqa: E731
    s1, s2 = u.s[i], v.s[j]
    width = np.sqrt(s1**2 + s2**2)
    amp = u.amp[i] * v.amp[j] * s1 * s2 / (math.sqrt(2 * math.pi) * width)
    centre = u.mu[i] + v.mu[j] + L(k1) + L(k2) - L(k)
    return PacketSet.make(k, centre, width, amp)


def matrix_packets(v: PacketSet, matrix: np.ndarray, grid: TorusGrid, alpha: float) -> PacketSet:
    """Packets of ``N v`` for a time-independent matrix ``N`` over modes ``-K..K``."""
    v = v.drop_zero()
    if len(v) == 0:
        return PacketSet.empty()
    K = grid.K
    if np.any(np.abs(v.k) > K):
        raise ValueError("packet wavenumbers exceed the grid band")
    kk = grid.wavenumbers
    out_k = np.repeat(kk[None, :], len(v), axis=0).ravel()
    src = np.repeat(np.arange(len(v)), kk.size)
    amp = (matrix[:, v.k + K].T * v.amp[:, None]).ravel()
    L = lambda q: dispersion_relation(q, alpha)  # noqa: E731
    centre = v.mu[src] + L(v.k[src]) - L(out_k)
    return PacketSet.make(out_k, centre, v.s[src], amp).drop_zero()
