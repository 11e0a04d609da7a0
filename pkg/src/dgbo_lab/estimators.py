"""scikit-learn style wrappers around the linear flow, the nonlinear solver
and decay-rate fitting, so they compose with pipelines and ``get_params``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .damping import build_profile, compute_ck
from .params import ModelParams
from .semigroup import apply_W, build_linear_matrix, fit_log_slope, spectral_abscissa
from .solver import SimConfig, simulate
from .spectral import SpectralField, TorusGrid


def _coefficient_rows(X) -> np.ndarray:
    # check_array rejects complex input
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of coefficient rows, got shape {X.shape}")
    return X


class LinearDampedFlow(TransformerMixin, BaseEstimator):
    """Maps initial coefficients (rows over the ``2K`` nonzero modes) to ``W(T) v0``."""

    def __init__(self, alpha=1.5, beta=0.8, profile="smooth_bump", support=(0.0, np.pi / 2), K=16, T=1.0):
        self.alpha = alpha
        self.beta = beta
        self.profile = profile
        self.support = support
        self.K = K
        self.T = T

    def fit(self, X=None, y=None):
        params = ModelParams(self.alpha, self.beta, linear=True)
        prof = build_profile(self.profile, tuple(self.support), K=self.K)
        self.matrix_ = build_linear_matrix(params, decomp=compute_ck(prof, self.beta))
        self.decay_rate_ = spectral_abscissa(self.matrix_).decay_rate
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = _coefficient_rows(X)
        if X.shape[1] != self.matrix_.dim:
            raise ValueError(f"expected {self.matrix_.dim} columns, got {X.shape[1]}")
        return np.stack([apply_W(self.matrix_, row, self.T) for row in X])


class DampedDGBOFlow(TransformerMixin, BaseEstimator):
    """Maps initial coefficients (rows over modes ``-K..K``) to the nonlinear state at ``T_final``."""

    def __init__(self, alpha=1.5, beta=0.8, profile="smooth_bump", support=(0.0, np.pi / 2), K=16,
                 T_final=1.0, dt=None, nonlinearity=1.0):
        self.alpha = alpha
        self.beta = beta
        self.profile = profile
        self.support = support
        self.K = K
        self.T_final = T_final
        self.dt = dt
        self.nonlinearity = nonlinearity

    def fit(self, X=None, y=None):
        prof = build_profile(self.profile, tuple(self.support), K=self.K)
        self.params_ = ModelParams(self.alpha, self.beta, prof)
        self.decomp_ = compute_ck(prof, self.beta)
        return self

    def transform(self, X):
        check_is_fitted(self, "decomp_")
        X = _coefficient_rows(X)
        grid = TorusGrid(self.K)
        cfg = SimConfig(self.params_, self.K, self.T_final, self.dt, nonlinearity=self.nonlinearity,
                        snapshot_stride=10**9)
        out = []
        for row in X:
            traj = simulate(cfg, self.decomp_, SpectralField(grid, row))
            out.append(traj.snapshots[-1][1].coeffs)
        return np.stack(out)


class DecayRateEstimator(RegressorMixin, BaseEstimator):
    """Fits ``||v(t)|| ~ A exp(-rate t)`` on the trailing ``window_fraction`` of a record."""

    def __init__(self, window_fraction=1 / 3):
        self.window_fraction = window_fraction

    def fit(self, X, y):
        t = check_array(X, ensure_2d=False).ravel()
        y = np.asarray(y, dtype=float)
        self.rate_, self.residual_ = fit_log_slope(t, y, self.window_fraction)
        start = t[-1] - self.window_fraction * (t[-1] - t[0])
        sel = (t >= start) & (y > 0)
        self.log_amplitude_ = float(np.mean(np.log(y[sel]) + self.rate_ * t[sel]))
        return self

    def predict(self, X):
        check_is_fitted(self, "rate_")
        t = check_array(X, ensure_2d=False).ravel()
        return np.exp(self.log_amplitude_ - self.rate_ * t)
