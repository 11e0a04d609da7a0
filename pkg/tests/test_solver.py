import math

import numpy as np
import pytest

from dgbo_lab.damping import build_profile, compute_ck
from dgbo_lab.errors import BlowUpError
from dgbo_lab.params import ModelParams
from dgbo_lab.semigroup import apply_W, build_linear_matrix
from dgbo_lab.solver import (
    IFRK4, SimConfig, delta_threshold_scan, energy_residuals, fit_decay_rate, initial_condition, is_monotone,
    read_trajectory_csv, simulate,
)
from dgbo_lab.spectral import TorusGrid

FULL = (-math.pi, math.pi)
PACKET = {"kind": "packet", "modes": [1, 2, 3], "amplitude": 0.5}


@pytest.fixture(scope="module")
def cosine8():
    prof = build_profile("raised_cosine", FULL, K=8)
    return ModelParams(1.5, 0.8, prof), compute_ck(prof, 0.8)


def final(cfg, decomp):
    return simulate(cfg, decomp).snapshots[-1][1]


@pytest.mark.parametrize("kind", ["single_mode", "packet", "random"])
def test_initial_conditions_are_real_with_given_norm(kind):
    v = initial_condition({"kind": kind, "amplitude": 0.25}, TorusGrid(8))
    assert math.isclose(v.norm(), 0.25, rel_tol=1e-14)
    assert v.coeffs[8] == 0


def test_initial_condition_rejects_bad_specs():
    g = TorusGrid(4)
    with pytest.raises(ValueError):
        initial_condition({"kind": "single_mode", "k": 9}, g)
    with pytest.raises(ValueError):
        initial_condition({"kind": "random", "colour": 1}, g)
    with pytest.raises(ValueError):
        initial_condition({"kind": "spike"}, g)
    assert initial_condition(None, g).norm() == 0


def test_sim_config_validation(cosine8):
    p, _ = cosine8
    with pytest.raises(ValueError):
        SimConfig(p, 8, 1.0, dt=-0.1)
    with pytest.raises(ValueError):
        SimConfig(p, 8, 0.05, dt=0.1)


def test_zero_state_stays_zero(cosine8):
    p, d = cosine8
    traj = simulate(SimConfig(p, 8, 1.0, 0.1, ic={"kind": "zero"}), d)
    assert np.all(traj.l2_norm == 0)


def test_linear_mode_matches_matrix_exponential(cosine8):
    p, d = cosine8
    lin = build_linear_matrix(ModelParams(1.5, 0.8, linear=True), decomp=d)
    v0 = initial_condition(PACKET, d.grid)
    exact = apply_W(lin, v0, 1.0).coeffs
    errs = []
    for dt in (0.1, 0.05, 0.025):
        cfg = SimConfig(p, 8, 1.0, dt, ic=PACKET, nonlinearity=0.0, snapshot_stride=10**6)
        errs.append(np.abs(final(cfg, d).coeffs - exact).max())
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(rates > 3.7), rates


def test_full_linear_propagator_is_exact_without_nonlinearity(cosine8):
    p, d = cosine8
    lin = build_linear_matrix(ModelParams(1.5, 0.8, linear=True), decomp=d)
    v0 = initial_condition(PACKET, d.grid)
    integ = IFRK4(p, d, nonlinearity=0.0, linear="full")
    c = np.array(v0.coeffs)
    for _ in range(4):
        c = integ.step(c, 0.25)
    np.testing.assert_allclose(np.delete(c, 8), apply_W(lin, v0.coeffs[np.arange(17) != 8], 1.0), atol=1e-13)
    with pytest.raises(ValueError):
        IFRK4(p, d, linear="half")


def test_nonlinear_fourth_order(cosine8):
    p, d = cosine8
    ref = final(SimConfig(p, 8, 0.5, 1.25e-3 / 2, ic=PACKET, snapshot_stride=10**6), d).coeffs
    errs = [np.abs(final(SimConfig(p, 8, 0.5, dt, ic=PACKET, snapshot_stride=10**6), d).coeffs - ref).max()
            for dt in (1e-2, 5e-3, 2.5e-3)]
    assert np.all(np.array(errs[:-1]) / errs[1:] > 13)


def test_energy_law_and_mass(cosine8):
    p, d = cosine8
    traj = simulate(SimConfig(p, 8, 2.0, 0.01, ic=PACKET), d)
    assert np.max(np.abs(energy_residuals(traj))) < 1e-6
    assert traj.mass_abs.max() <= 1e-14
    assert traj.max_reality_defect < 1e-12
    assert is_monotone(traj.l2_norm)


def test_blow_up_is_reported():
    prof = build_profile("smooth_bump", (0.0, math.pi / 2), K=32)
    cfg = SimConfig(ModelParams(1.5, 0.8, prof), 32, 20.0, 0.5, ic={"kind": "random", "amplitude": 1e-3})
    with pytest.raises(BlowUpError):
        simulate(cfg)


def test_csv_round_trip(cosine8):
    p, d = cosine8
    traj = simulate(SimConfig(p, 8, 0.5, 0.05, ic=PACKET), d)
    back = read_trajectory_csv(traj.to_csv())
    np.testing.assert_array_equal(back.l2_norm, traj.l2_norm)
    np.testing.assert_array_equal(back.times, traj.times)
    with pytest.raises(ValueError):
        read_trajectory_csv("a,b\n1,2\n")


def test_decay_fit_on_linear_flow(cosine8):
    p, d = cosine8
    lin = build_linear_matrix(ModelParams(1.5, 0.8, linear=True), decomp=d)
    from dgbo_lab.semigroup import spectral_abscissa

    rate = spectral_abscissa(lin).decay_rate
    cfg = SimConfig(p, 8, 40 / rate, 0.1, ic={"kind": "random", "amplitude": 1.0}, nonlinearity=0.0)
    fit = fit_decay_rate(simulate(cfg, d))
    assert abs(fit.rate - rate) < 1e-3 * rate


def test_threshold_scan_rows(cosine8):
    p, d = cosine8
    tmpl = SimConfig(p, 8, 30.0, 0.1, ic={"kind": "random"}, diagnostics_stride=5)
    rows = delta_threshold_scan(tmpl, [0.0, 1e-3, 1e-2], d)
    assert [r["amplitude"] for r in rows] == [0.0, 1e-3, 1e-2]
    assert abs(rows[1]["rate"] - rows[0]["rate"]) < 1e-3 * rows[0]["rate"]
    with pytest.raises(ValueError):
        delta_threshold_scan(tmpl, [1e-2, 1e-3], d)


# fitted rates at K = 64, smooth bump on [0, pi/2], dt = 0.1, horizon 40 / linear rate
RATE_FIXTURE = {0.0: 0.028240124552583276, 1e-3: 0.028240124502723313, 1e-2: 0.028240124083835232,
                1e-1: 0.028240122761317998}


@pytest.mark.slow
def test_amplitude_scan_regression():
    from dgbo_lab.semigroup import spectral_abscissa

    prof = build_profile("smooth_bump", (0.0, math.pi / 2), K=64)
    d = compute_ck(prof, 0.8)
    rate = spectral_abscissa(build_linear_matrix(ModelParams(1.5, 0.8, linear=True), decomp=d)).decay_rate
    tmpl = SimConfig(ModelParams(1.5, 0.8, prof), 64, 40 / rate, 0.1, ic={"kind": "random", "seed": 0},
                     diagnostics_stride=10)
    rows = delta_threshold_scan(tmpl, list(RATE_FIXTURE), d)
    for r in rows:
        assert r["monotone"]
        assert math.isclose(r["rate"], RATE_FIXTURE[r["amplitude"]], rel_tol=1e-8)
