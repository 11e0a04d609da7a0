"""Muckenhoupt A_2 characteristic of the power weights ``<tau>^a``."""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np
from scipy import integrate

from ..errors import PrecisionError


class A2Estimate(NamedTuple):
    value: float
    centre: float
    length: float
    intervals: int


_BREAKS = np.r_[-np.geomspace(1e6, 1.0, 7), 0.0, np.geomspace(1.0, 1e6, 7)]


def _average(f, lo: float, hi: float) -> float:
    """Mean of ``f`` on ``[lo, hi]``, split at decades so each piece is smooth on its scale."""
    cuts = np.r_[lo, _BREAKS[(_BREAKS > lo) & (_BREAKS < hi)], hi]
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(cuts[:-1], cuts[1:]):
            try:
                total += integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
            except integrate.IntegrationWarning as exc:
                raise PrecisionError(f"quadrature failed on [{a}, {b}]: {exc}") from exc
    return total / (hi - lo)


def a2_product(a: float, lo: float, hi: float) -> float:
    """``(avg_I <tau>^a) (avg_I <tau>^-a)`` on ``I = [lo, hi]``."""
    w = lambda t: (1.0 + t * t) ** (0.5 * a)  # noqa: E731
    winv = lambda t: (1.0 + t * t) ** (-0.5 * a)  # noqa: E731
    return _average(w, lo, hi) * _average(winv, lo, hi)


def a2_constant(a: float, centres=None, lengths=None) -> A2Estimate:
    """Supremum of the A_2 product over a sweep of intervals ``[c - l/2, c + l/2]``.

    Default sweep: centres 0 and a log grid on ``[1e-3, 1e6]``; lengths a log
    grid on ``[1e-3, 1e6]``.  Being a sup over finitely many intervals, the
    value is a lower bound for the characteristic.
    """
    centres = np.r_[0.0, np.geomspace(1e-3, 1e6, 28)] if centres is None else np.asarray(centres, float)
    lengths = np.geomspace(1e-3, 1e6, 28) if lengths is None else np.asarray(lengths, float)
    best = (-math.inf, 0.0, 0.0)
    n = 0
    for c in centres:
        for ell in lengths:
            val = a2_product(a, c - 0.5 * ell, c + 0.5 * ell)
            n += 1
            if val > best[0]:
                best = (val, float(c), float(ell))
    return A2Estimate(best[0], best[1], best[2], n)
