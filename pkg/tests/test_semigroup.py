import math

import numpy as np
import pytest
from scipy import integrate, linalg

from dgbo_lab.damping import build_profile, compute_ck
from dgbo_lab.errors import ConditioningError
from dgbo_lab.params import ModelParams
from dgbo_lab.semigroup import (
    apply_S, apply_W, biorthogonal_residual, build_linear_matrix, decay_chain, exponential_gram, fit_log_slope,
    fitted_decay_rate, ingham_gaps, l2_norm, observability_gramian, phi_k, restrict, spectral_abscissa,
    ucp_gramian,
)
from dgbo_lab.spectral import SpectralField, TorusGrid


@pytest.fixture(scope="module")
def mat(bump8, linear_params):
    return build_linear_matrix(linear_params, decomp=bump8)


def unit_vector(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / l2_norm(v)


def test_generator_is_dispersion_minus_damping(mat, bump8):
    k = mat.modes
    expect = np.diag(-1j * k * np.abs(k) ** 1.5)
    keep = np.arange(bump8.grid.size) != bump8.grid.K
    expect = expect - bump8.gdg_matrix[np.ix_(keep, keep)]
    np.testing.assert_allclose(mat.A, expect, atol=1e-14)
    np.testing.assert_allclose(mat.A + mat.A.conj().T, -2 * mat.Q, atol=1e-14)


def test_W_is_contraction_and_semigroup(mat, rng):
    v = unit_vector(mat.dim, rng)
    a = apply_W(mat, v, 0.7)
    b = apply_W(mat, apply_W(mat, v, 0.3), 0.4)
    np.testing.assert_allclose(a, b, atol=1e-13)
    assert l2_norm(a) < 1.0
    np.testing.assert_allclose(apply_W(mat, v, 0.7, method="krylov"), a, atol=1e-12)
    with pytest.raises(ValueError):
        apply_W(mat, v, -1.0)


def test_W_preserves_reality(mat, rng):
    g = mat.grid
    f = SpectralField.project(rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size), g)
    out = apply_W(mat, f, 1.3)
    assert isinstance(out, SpectralField)


def test_energy_dissipation_law(mat, rng):
    # d/dt ||W v||^2 = -2 * 2 pi <Q W v, W v>
    v = unit_vector(mat.dim, rng)
    e = lambda t: l2_norm(apply_W(mat, v, t)) ** 2  # noqa: E731
    h = 1e-4
    deriv = (e(0.5 + h) - e(0.5 - h)) / (2 * h)
    w = apply_W(mat, v, 0.5)
    assert math.isclose(deriv, -2 * 2 * math.pi * np.vdot(w, mat.Q @ w).real, rel_tol=1e-5)


def test_apply_S_matches_symbol(bump8):
    params = ModelParams(1.5, 0.8, linear=True)
    g = bump8.grid
    f = SpectralField.project(np.ones(g.size, dtype=complex), g)
    for t in (-0.4, 0.4):
        out = apply_S(params, bump8, f, t).coeffs
        k = g.wavenumbers
        np.testing.assert_allclose(out, f.coeffs * np.exp(-1j * k * np.abs(k) ** 1.5 * t - bump8.c * abs(t)))


def test_phi_k_integrates_to_half_pi_scaled():
    # int c/(c^2+tau^2) dtau = pi
    val = integrate.quad(lambda s: phi_k(0.3, s), -np.inf, np.inf)[0]
    assert math.isclose(val, math.pi, rel_tol=1e-9)
    with pytest.raises(ValueError):
        phi_k(0.0, 1.0)


def test_fitted_rate_matches_abscissa(mat):
    rep = spectral_abscissa(mat)
    assert rep.decay_rate > 0
    assert abs(fitted_decay_rate(mat) - rep.decay_rate) < 1e-3 * rep.decay_rate


def test_fit_log_slope_exact_exponential():
    t = np.linspace(0, 10, 200)
    rate, resid = fit_log_slope(t, 3 * np.exp(-0.7 * t))
    assert math.isclose(rate, 0.7, rel_tol=1e-12) and resid < 1e-12


def test_gramian_identity_and_chain(mat, rng):
    rep = observability_gramian(mat, 3.0)
    assert rep.energy_residual < 1e-8 and rep.min_eigenvalue > 0
    # independent check with a dense adaptive integral of a single entry
    WT = lambda t: linalg.expm(mat.A * t)  # noqa: E731
    e0 = np.zeros(mat.dim)
    e0[0] = 1.0
    entry = integrate.quad(lambda t: np.vdot(WT(t) @ e0, mat.Q @ (WT(t) @ e0)).real, 0, 3.0, epsrel=1e-10)[0]
    assert math.isclose(rep.gramian[0, 0].real, entry, rel_tol=1e-7)
    mu = 2 * rep.min_eigenvalue
    for lhs, rhs in decay_chain(mat, 3.0, mu, unit_vector(mat.dim, rng)):
        assert lhs <= rhs * (1 + 1e-10)


def test_ingham_gaps_cubic():
    rep = ingham_gaps(2.0, 5)
    k = np.arange(-5, 6)
    np.testing.assert_array_equal(rep.lambda_seq, k * np.abs(k) ** 2)
    assert rep.gamma == 1.0
    assert rep.gamma_inf == 7.0  # pairs touching 0 are excluded
    assert ingham_gaps(2.0, 5, N=2).gamma_inf == 4**3 - 3**3


def test_exponential_gram_matches_quadrature():
    lam = np.array([0.0, 1.0, 2.5])
    G = exponential_gram(lam, 2.0)
    re = integrate.quad(lambda t: math.cos((lam[1] - lam[2]) * t), 0, 2)[0]
    im = integrate.quad(lambda t: math.sin((lam[1] - lam[2]) * t), 0, 2)[0]
    assert abs(G[1, 2] - (re + 1j * im)) < 1e-12
    assert G[0, 0] == 2.0


def test_biorthogonal_residual_and_errors():
    assert biorthogonal_residual(2.0, 4, 2 * math.pi) < 1e-9
    with pytest.raises(ValueError):
        biorthogonal_residual(2.0, 4, 0.1)
    with pytest.raises(ConditioningError):
        biorthogonal_residual(2.0, 4, 3.2, cond_max=1.0)


def test_ucp_gramian_full_circle_is_block_identity():
    # on the full circle distinct modes are orthogonal in x
    mu = ucp_gramian(1.5, 4, 1.0, (-math.pi, math.pi))
    assert math.isclose(mu, 2 * math.pi, rel_tol=1e-12)
    assert 0 < ucp_gramian(1.5, 4, 5.0, (0.0, 1.0)) < 2 * math.pi
    with pytest.raises(ValueError):
        ucp_gramian(1.5, 4, 1.0, (1.0, 1.0))
