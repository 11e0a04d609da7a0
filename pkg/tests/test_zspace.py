import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from dgbo_lab.analysis.packets import PacketSet, packet_znorm
from dgbo_lab.analysis.zspace import (
    SpaceTimeField, ZbParams, cutoff_eta, discrete_embedding_constant, embedding_constant, embedding_integral,
    smoothing_multiplier, zb_weight, znorm,
)
from dgbo_lab.spectral import TorusGrid

ALPHA = 1.5


def gaussian_field(grid, times, rng, mu_scale=1.0):
    p = PacketSet.make(np.arange(1, grid.K + 1), mu_scale * rng.standard_normal(grid.K), np.full(grid.K, 1.0),
                       rng.standard_normal(grid.K) + 1j * rng.standard_normal(grid.K)).real_closure()
    return p, p.to_field(grid, ALPHA, times)


def test_b_zero_is_parseval(rng):
    g = TorusGrid(6)
    t = np.linspace(-5, 5, 301)
    coeffs = rng.standard_normal((t.size, g.size)) + 1j * rng.standard_normal((t.size, g.size))
    coeffs = coeffs + np.conj(coeffs[:, ::-1])
    u = SpaceTimeField.from_coefficients(g, ALPHA, t, coeffs)
    assert math.isclose(znorm(u, ZbParams(0.0, 0.8, ALPHA)), u.l2_norm(), rel_tol=1e-12)
    # and equals the physical-space sum
    vals = u.values()
    assert math.isclose(u.l2_norm() ** 2, np.sum(vals**2) * (2 * math.pi / g.N) * u.dt, rel_tol=1e-12)


@pytest.mark.parametrize("b", [-0.3, 0.4, 0.5, 0.7])
def test_sampled_norm_matches_gaussian_closed_form(b, rng):
    g = TorusGrid(4)
    t = np.linspace(-12, 12, 2048, endpoint=False)
    p, u = gaussian_field(g, t, rng)
    assert u.reality_defect() < 1e-12
    assert math.isclose(znorm(u, ZbParams(b, 0.8, ALPHA)), packet_znorm(p, b, 0.8), rel_tol=1e-9)


def test_weight_branches():
    k, s = 3.0, 2.5
    kb = math.sqrt(1 + k * k) ** 0.8
    mod = math.sqrt(1 + (s / kb) ** 2)
    assert math.isclose(zb_weight(k, s, 0.3, 0.8), kb**0.3 * mod**0.3)
    assert math.isclose(zb_weight(k, s, 0.5, 0.8), math.sqrt(1 + k * k) ** 0.4 * mod**0.5)
    assert math.isclose(zb_weight(k, s, -0.5, 0.8), math.sqrt(1 + k * k) ** -0.4 * mod**-0.5)
    assert math.isclose(zb_weight(k, s, 0.7, 0.8), math.sqrt(1 + k * k) ** 0.4 * mod**0.7)


def test_cutoff_profile():
    t = np.array([-3.0, -2.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0])
    e = cutoff_eta(t)
    np.testing.assert_allclose(e, [0, 0, 1, 1, 1, 1, 0.5, 0], atol=1e-15)
    x = np.linspace(1.001, 1.999, 500)
    assert np.all(np.diff(cutoff_eta(x)) <= 0)


def test_embedding_integral_matches_quadrature():
    for b in (0.6, 1.0, 1.4):
        q = integrate.quad(lambda s: (1 + s * s) ** -b, -np.inf, np.inf, epsrel=1e-12)[0]
        assert math.isclose(embedding_integral(b), q, rel_tol=1e-9)
    assert math.isclose(embedding_constant(1.0), math.sqrt(0.5))
    with pytest.raises(ValueError):
        embedding_integral(0.5)


@given(st.floats(0.55, 1.2), st.integers(0, 10**6))
def test_discrete_embedding_holds(b, seed):
    g = TorusGrid(3)
    t = np.linspace(-6, 6, 256, endpoint=False)
    _, u = gaussian_field(g, t, np.random.default_rng(seed), mu_scale=3.0)
    zb = ZbParams(b, 0.8, ALPHA)
    assert u.max_time_l2() <= discrete_embedding_constant(u, zb) * znorm(u, zb) * (1 + 1e-10)


def test_field_validation():
    g = TorusGrid(2)
    with pytest.raises(ValueError):
        SpaceTimeField.from_envelopes(g, ALPHA, [0, 1, 3], np.zeros((3, 5)))
    with pytest.raises(ValueError):
        SpaceTimeField.from_envelopes(g, ALPHA, [0, 1], np.zeros((2, 4)))
    with pytest.raises(ValueError):
        SpaceTimeField.from_envelopes(g, ALPHA, [0, 1], np.zeros((2, 5)), window="hann")
    u = SpaceTimeField.from_envelopes(g, ALPHA, [0, 1], np.ones((2, 5)))
    assert np.all(u.envelopes[:, 2] == 0)
    with pytest.raises(ValueError):
        znorm(u, ZbParams(0.0, 0.8, 2.0))


def test_smooth_window_keeps_middle():
    g = TorusGrid(2)
    t = np.linspace(0, 8, 81)
    u = SpaceTimeField.from_envelopes(g, ALPHA, t, np.ones((81, 5)), window="smooth")
    assert np.all(u.envelopes[30:51, 3] == 1) and u.envelopes[0, 3] == 0


def test_smoothing_multiplier():
    np.testing.assert_allclose(smoothing_multiplier(TorusGrid(2), -0.5), [2**-0.5, 1, 0, 1, 2**-0.5])
