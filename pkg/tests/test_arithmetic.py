import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dgbo_lab.analysis.arithmetic import (
    FrequencyTriple, admissible_b_interval, cubic_ratio, minmax_modulation, minmax_modulation_grid,
    minmax_modulation_low, modulation_scan, n1_b_window, numerology_grid, offdiag_gap_grid, offdiag_gap_scan,
    offdiag_modulation_gap, resonance, resonance_constant_scan, solver_b_interval,
)

nonzero = st.integers(-60, 60).filter(lambda k: k != 0)
pairs = st.tuples(nonzero, nonzero).filter(lambda p: p[0] + p[1] != 0)


def test_triple_validation():
    for bad in [(1, 1, 1), (0, 1, -1), (1.5, -0.5, -1)]:
        with pytest.raises(ValueError):
            FrequencyTriple(*bad)
    t = FrequencyTriple.of((3, -1, -2))
    assert (t.n_max, t.n_min) == (3, 1)


@given(pairs)
def test_cubic_identity(p):
    k1, k2 = p
    t = (k1, k2, -k1 - k2)
    # for alpha = 2, sum k|k|^2 over a zero-sum triple is 3 k1 k2 k3 up to sign
    assert abs(abs(resonance(t, 2.0)) - 3 * abs(k1 * k2 * (k1 + k2))) < 1e-9 * abs(k1 * k2 * (k1 + k2))


def brute_min_ratio(alpha, K):
    best = math.inf
    for k1, k2 in itertools.product(range(-K, K + 1), repeat=2):
        k3 = -k1 - k2
        if 0 in (k1, k2, k3) or abs(k3) > K:
            continue
        a = sorted(map(abs, (k1, k2, k3)))
        r = abs(sum(k * abs(k) ** alpha for k in (k1, k2, k3))) / (a[2] ** alpha * a[0])
        best = min(best, r)
    return best


@pytest.mark.parametrize("alpha", [1.0, 1.3, 2.0])
def test_resonance_scan_matches_brute_force(alpha):
    res = resonance_constant_scan(alpha, 20)
    assert math.isclose(res.min_ratio, brute_min_ratio(alpha, 20), rel_tol=1e-13)
    assert math.isclose(resonance_constant_scan(2.0, 20).min_ratio, 1.5)
    with pytest.raises(ValueError):
        resonance_constant_scan(alpha, 1)


@given(pairs)
def test_cubic_ratio_bounds(p):
    t = (p[0], p[1], -p[0] - p[1])
    assert 1.5 - 1e-12 <= cubic_ratio(t) <= 3.0 + 1e-12


@pytest.mark.parametrize("triple", [(1, 2, -3), (5, -2, -3), (7, 9, -16)])
def test_minmax_closed_forms_match_grid(triple):
    a, b = 1.5, 0.8
    assert math.isclose(minmax_modulation_grid(triple, a, b), minmax_modulation(triple, a, b), rel_tol=1e-9)
    assert math.isclose(minmax_modulation_grid(triple, a, b, low_frequency=True),
                        minmax_modulation_low(triple, a, b), rel_tol=1e-9)


@given(pairs)
def test_restricted_minmax_is_larger(p):
    t = (p[0], p[1], -p[0] - p[1])
    assert minmax_modulation_low(t, 1.5, 0.8) >= minmax_modulation(t, 1.5, 0.8) * (1 - 1e-12)


def test_modulation_scan_constants_positive():
    scan = modulation_scan(1.5, 0.8, 30)
    assert scan.general > 0 and scan.low > 0 and scan.min_value > 0
    t = scan.general_witness
    assert sum(t) == 0 and max(map(abs, t)) <= 30


def test_offdiag_gap():
    g = offdiag_modulation_gap(3, -2, 1.5, 0.8)
    assert g.distance > 0
    assert math.isclose(offdiag_gap_grid(3, -2, 1.5, 0.8), g.distance, rel_tol=1e-8)
    expect = math.sqrt(1 + g.distance**2) / max(math.sqrt(10), math.sqrt(5)) ** 0.7
    assert math.isclose(g.normalized, expect, rel_tol=1e-12)
    for k, n in [(2, 2), (0, 1)]:
        with pytest.raises(ValueError):
            offdiag_modulation_gap(k, n, 1.5, 0.8)
    value, arg = offdiag_gap_scan(1.5, 0.8, 40)
    assert value > 0 and arg[0] != arg[1]


def test_b_intervals():
    lo, hi, bounds = admissible_b_interval(2.0, 0.5)
    assert lo == 0.5 and hi == min(bounds.values())
    with pytest.raises(ValueError):
        admissible_b_interval(0.5, 1.0)
    lo, hi = n1_b_window(1.5, 0.8)
    assert lo == 0.5 and math.isclose(hi, 1.5 / 2.3)
    s_lo, s_hi = solver_b_interval(1.5, 0.8)
    assert s_lo >= 0.5 and s_hi <= hi


def test_numerology_has_no_violations():
    violations, checked = numerology_grid(n=20)
    assert violations == [] and checked > 300
