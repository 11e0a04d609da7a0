import math

import numpy as np
import pytest

from dgbo_lab.damping import (
    apply_GDbetaG, apply_N1, apply_R, apply_diagonal, build_profile, compute_ck, profile_from_coefficients,
)
from dgbo_lab.errors import PrecisionError, ProfileError
from dgbo_lab.spectral import SpectralField, TorusGrid, fractional_symbol, inverse_transform

QUARTER = (0.0, math.pi / 2)


def random_field(grid, rng):
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    c = c / (1.0 + np.abs(grid.wavenumbers)) ** 2
    return SpectralField.project(c, grid)


def gdg_by_collocation(profile, beta, v, n=4096):
    """Independent evaluation of G D^beta G v on a fine grid from the profile samples."""
    fine = TorusGrid(n // 4, n)
    g = profile.values(fine.points)
    vf = inverse_transform(np.pad(v.coeffs, (fine.K - v.grid.K,)), fine)

    def G(h):
        return g * (h - 2 * math.pi * np.mean(g * h))

    def D(h):
        hk = np.fft.fft(h)
        k = np.fft.fftfreq(n, 1.0 / n)
        return np.fft.ifft(hk * fractional_symbol(k, beta)).real

    out = np.fft.fft(G(D(G(vf)))) / n
    k = v.grid.wavenumbers
    return out[k % n] * np.where(k % 2 == 0, 1, -1)


def test_profiles_have_unit_mass():
    for kind in ("raised_cosine", "smooth_bump"):
        p = build_profile(kind, QUARTER, K=8)
        assert abs(2 * math.pi * p.ghat_at(np.array([0]))[0] - 1) < 1e-15


@pytest.mark.parametrize("support", [(1.0, 1.0), (-4.0, 0.0)])
def test_bad_supports(support):
    with pytest.raises(ProfileError):
        build_profile("smooth_bump", support, K=4)


def test_constant_profile_gives_exact_symbol():
    dec = compute_ck(build_profile("constant", K=8), 0.8)
    k = dec.grid.wavenumbers
    np.testing.assert_allclose(dec.c, np.abs(k) ** 0.8 / (4 * math.pi**2), rtol=1e-14)
    assert dec.J == 0


def test_ck_matches_direct_fourier_sum():
    # raised cosine on the full circle: g = (1 + cos x) / (2 pi)
    dec = compute_ck(build_profile("raised_cosine", (-math.pi, math.pi), K=8), 1.0)
    k = np.arange(-8, 9)
    direct = (np.abs(k) + 0.25 * np.abs(k + 1) + 0.25 * np.abs(k - 1)) / (4 * math.pi**2)
    direct[8] = 0.0
    np.testing.assert_allclose(dec.c, direct, atol=1e-13)


def test_horizon_of_flat_spectrum_is_whole_band():
    g = TorusGrid(4)
    p = profile_from_coefficients(np.full(9, 1.0 / (2 * math.pi), dtype=complex), g)
    assert p.horizon(0.5) == 4
    assert p.horizon(0.5, tol=1e3) < 4


def test_horizon_grows_with_tighter_tolerance():
    p = build_profile("smooth_bump", QUARTER, K=8)
    assert p.horizon(0.8, tol=1e-4) < p.horizon(0.8) < p.horizon_max


def test_unresolvable_support_is_rejected():
    with pytest.raises(ProfileError):
        build_profile("raised_cosine", (0.0, 1e-3), K=8)


def test_narrow_kinked_profile_needs_long_horizon():
    p = build_profile("raised_cosine", (0.0, 0.3), K=8)
    assert p.horizon(1.9) > 10 * build_profile("smooth_bump", QUARTER, K=8).horizon(1.9)


def test_splitting_matches_operator(bump16, rng):
    v = random_field(bump16.grid, rng)
    whole = apply_GDbetaG(bump16, v).coeffs
    parts = (apply_diagonal(bump16, v) + apply_N1(bump16, v) + apply_R(bump16, v)).coeffs
    np.testing.assert_allclose(parts, whole, atol=1e-15)
    np.testing.assert_allclose(bump16.gdg_matrix @ v.coeffs, whole, atol=1e-15)


def test_operator_matches_collocation(bump8, rng):
    v = random_field(bump8.grid, rng)
    ref = gdg_by_collocation(bump8.profile, 0.8, v)
    np.testing.assert_allclose(apply_GDbetaG(bump8, v).coeffs, ref, atol=1e-9)


def test_remainder_is_rank_one(bump16):
    s = np.linalg.svd(bump16.r_matrix, compute_uv=False)
    assert s[1] < 1e-14 * s[0]


def test_gdg_is_hermitian_psd(bump16):
    M = bump16.gdg_matrix
    np.testing.assert_allclose(M, M.conj().T, atol=1e-15)
    assert np.linalg.eigvalsh(0.5 * (M + M.conj().T)).min() > -1e-15


def test_ck_two_sided_bounds(bump16):
    k = np.arange(-300, 301)
    c = bump16.c_at(k)
    assert np.all(c >= np.abs(k) ** 0.8 / (4 * math.pi**2) * (1 - 1e-12))
    assert np.all(c <= bump16.upper_constant() * (1 + np.abs(k) ** 0.8))
