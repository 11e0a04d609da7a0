"""Model parameters: dispersion exponent, dissipation exponent, damping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .damping import DampingProfile


def check_nonlinear_range(alpha: float, beta: float):
    """Raise ``ValueError`` unless ``1 < alpha <= 2`` and ``2 - alpha < beta < alpha``."""
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    if not 2.0 - alpha < beta < alpha:
        raise ValueError(f"beta must lie in (2 - alpha, alpha) = ({2 - alpha}, {alpha}), got {beta}")


def check_linear_range(alpha: float, beta: float):
    """Relaxed range used by linear-only computations: ``alpha > 0``, ``beta >= 0``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not beta >= 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")


@dataclass(frozen=True)
class ModelParams:
    """Exponents ``alpha`` (dispersion ``D^alpha d/dx``) and ``beta``
    (dissipation ``G D^beta G``) together with the damping profile.

    ``linear=True`` admits the relaxed range ``alpha > 0, beta >= 0``.
    """

    alpha: float
    beta: float
    damping: "DampingProfile | None" = None
    linear: bool = False

    def __post_init__(self):
        if self.linear:
            check_linear_range(self.alpha, self.beta)
        else:
            check_nonlinear_range(self.alpha, self.beta)
