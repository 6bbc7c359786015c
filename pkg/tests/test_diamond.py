import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from hypothesis import given, settings, strategies as st

from steadyent.cavity import CavitySpec, adiabatic_map
from steadyent.concurrence import concurrence
from steadyent.diamond import (
    BELL_BASIS,
    DiamondSpec,
    analytic_concurrence,
    analytic_concurrence_rates,
    betas_from_rates,
    build_diamond,
    collective_ops,
    concurrence_vs_numeric,
    extreme_limit_concurrence,
    number_operator,
    rates_from_betas,
    site_lowering_ops,
)
from steadyent.errors import NonFiniteBetaError
from steadyent.lindblad import ABSORPTION, EMISSION, steady_state

G, S, A, E = (BELL_BASIS[:, k] for k in range(4))
R2 = math.sqrt(2)


def direct_formula(ba, bs):
    """Unscaled closed form, valid for moderate betas."""
    ea, es = math.exp(ba), math.exp(bs)
    s_, a_, p_ = ea + es, ea - es, ea * es
    n1 = abs(a_) * abs(s_ / 2 - 1)
    n2 = math.sqrt((s_ / 2 + 1) * (2 * s_**2 + 2 * p_ * s_ - 4 * p_))
    d = 1 + s_**2 + s_ * p_ / 2 + 1.5 * s_ - p_
    return max(0.0, (n1 - n2) / d)


def test_bell_basis_orthonormal():
    assert_allclose(BELL_BASIS.conj().T @ BELL_BASIS, np.eye(4), atol=1e-15)
    assert_allclose(S, [0, 1 / R2, 1 / R2, 0])


def test_collective_ops_action():
    js, ja = collective_ops()
    assert_allclose(js @ A, 0, atol=1e-15)
    assert_allclose(js @ S, R2 * G)
    assert_allclose(js @ E, R2 * S)
    assert_allclose(ja @ S, 0, atol=1e-15)
    # (c1 - c2)(|01> - |10>)/sqrt2 = -sqrt2 |00>; the signs flip with the phase of |A>
    assert_allclose(ja @ A, -R2 * G)
    assert_allclose(ja @ E, R2 * A)


def test_collective_number_identity():
    js, ja = collective_ops()
    c1, c2 = site_lowering_ops()
    assert_allclose(js.conj().T @ js + ja.conj().T @ ja, 2 * number_operator())
    assert_allclose(number_operator(), c1.conj().T @ c1 + c2.conj().T @ c2)


def test_rates_from_betas_examples():
    sp = rates_from_betas(0, 0)
    assert (sp.gamma_minus_A, sp.gamma_minus_S) == (1.0, 1.0)
    assert_allclose(rates_from_betas(0, math.log(2)).gamma_minus_S, 2.0)
    assert_allclose(rates_from_betas(-math.log(3), 0, gamma_plus=3).gamma_minus_A, 1.0)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(1e-3, 1e3))
@settings(max_examples=100, deadline=None)
def test_beta_round_trip(ba, bs, gp):
    assert_allclose(betas_from_rates(rates_from_betas(ba, bs, gp)), (ba, bs), atol=1e-12)


def test_betas_from_rates_examples():
    assert betas_from_rates(DiamondSpec(gamma_plus=2, gamma_minus_A=2, gamma_minus_S=1))[0] == 0.0
    assert betas_from_rates(DiamondSpec(gamma_minus_A=0.0))[0] == -math.inf


def test_betas_round_trip_with_cavity_map():
    g = 1e-3
    m = adiabatic_map(CavitySpec(g=g, kappa=2 * g, p=5e-3 * g, gamma=1e-3 * g))
    assert_allclose(betas_from_rates(m.diamond_spec()), (m.beta_A, m.beta_S), atol=1e-12)


def test_rates_from_betas_rejects_non_finite():
    for bad in (math.inf, -math.inf, math.nan, 701.0):
        with pytest.raises(NonFiniteBetaError):
            rates_from_betas(bad, 0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        DiamondSpec(gamma_plus=0.0)
    with pytest.raises(ValueError):
        DiamondSpec(gamma_minus_S=-1.0)
    with pytest.raises(ValueError):
        DiamondSpec(omega0=0.0)


def test_build_diamond_structure():
    sp = DiamondSpec(omega0=2.0, gamma_plus=0.5, gamma_minus_S=0.7, gamma_minus_A=0.3)
    sys = build_diamond(sp)
    js, ja = collective_ops()
    assert_allclose(sys.hamiltonian, 2.0 * number_operator())
    got = [(c.label, c.direction, c.rate) for c in sys.channels]
    assert got == [("S", ABSORPTION, 0.5), ("S", EMISSION, 0.7), ("A", ABSORPTION, 0.5), ("A", EMISSION, 0.3)]
    assert_allclose(sys.channels[0].jump, js.conj().T)
    assert_allclose(sys.channels[3].jump, ja)


def test_dark_antisymmetric_decay_populates_a():
    rho = steady_state(build_diamond(DiamondSpec(gamma_minus_A=0.0, gamma_minus_S=50.0))).rho
    pops = [(v.conj() @ rho @ v).real for v in (G, S, A, E)]
    # A is fed from G and emptied into E at the same rate 2 gamma_plus, so P_A = P_G
    assert_allclose(pops[2], pops[0], rtol=1e-12)
    assert pops[2] > 20 * max(pops[1], pops[3])


def test_steady_state_x_pattern():
    rho = steady_state(build_diamond(rates_from_betas(-1.3, 2.1))).rho
    mask = np.eye(4, dtype=bool)
    mask[1, 2] = mask[2, 1] = True
    assert np.max(np.abs(rho[~mask])) < 1e-14
    assert abs(rho[1, 2]) > 1e-3


def test_analytic_examples():
    assert analytic_concurrence(0.0, 0.0) == 0.0
    assert_allclose(analytic_concurrence(0.0, 30.0), 1 / 3, atol=1e-6)
    c = analytic_concurrence(-40.0, 10.0)
    assert 0.49 <= c < 0.5
    e = math.exp(-10.0)
    assert_allclose(c, 0.5 - e - math.sqrt(e) * math.sqrt(1 + 2 * e), atol=1e-3)


@pytest.mark.parametrize("ba,bs", [(-2.0, 3.0), (0.5, -1.5), (1.0, 4.0), (-4.0, -0.5), (3.0, 3.5)])
def test_analytic_matches_direct_formula(ba, bs):
    assert_allclose(analytic_concurrence(ba, bs), direct_formula(ba, bs), atol=1e-13)


def test_analytic_symmetric():
    r = np.random.default_rng(5)
    for ba, bs in r.uniform(-30, 30, size=(200, 2)):
        assert analytic_concurrence(ba, bs) == analytic_concurrence(bs, ba)


def test_thermal_bound():
    grid = np.linspace(0, 20, 50)
    assert max(analytic_concurrence(a, b) for a in grid for b in grid) <= 1 / 3 + 1e-9


def test_global_bound():
    r = np.random.default_rng(6)
    for ba, bs in r.uniform(-100, 100, size=(2000, 2)):
        assert 0.0 <= analytic_concurrence(ba, bs) <= 0.5 + 1e-12


def test_diagonal_null():
    for b in np.linspace(-10, 10, 20):
        assert analytic_concurrence(b, b) == 0.0


def test_both_negative_corner():
    for ba in (-5.0, -8.0, -20.0):
        for bs in (-5.0, -6.5, -30.0):
            assert analytic_concurrence(ba, bs) == 0.0


@pytest.mark.parametrize("ba", [-20.0, -40.0, -200.0])
@pytest.mark.parametrize("bs", [5.0, 8.0, 12.0])
def test_deep_corner_asymptote(ba, bs):
    assert_allclose(analytic_concurrence(ba, bs), extreme_limit_concurrence(bs), atol=1e-6)


def test_overflow_guard():
    c, flag = analytic_concurrence(-1000.0, 800.0, with_flag=True)
    assert flag and math.isfinite(c)
    assert_allclose(c, analytic_concurrence(-800.0, 1000.0))
    assert not analytic_concurrence(1.0, 2.0, with_flag=True)[1]
    assert analytic_concurrence(-math.inf, 10.0) == pytest.approx(extreme_limit_concurrence(10.0), abs=1e-12)


def test_analytic_rates_with_dark_channel():
    assert_allclose(
        analytic_concurrence_rates(DiamondSpec(gamma_minus_A=0.0, gamma_minus_S=math.exp(6.0))),
        extreme_limit_concurrence(6.0),
        atol=1e-12,
    )


def test_concurrence_vs_numeric_examples():
    assert concurrence_vs_numeric(0.0, 0.0) == (0.0, 0.0)
    a, n = concurrence_vs_numeric(0.0, 4.0)
    assert abs(a - n) < 1e-8
    a, n = concurrence_vs_numeric(-3.0, 2.0)
    assert abs(a - n) < 1e-8
    a, n = concurrence_vs_numeric(-3.0, 5.0)
    assert abs(a - n) < 1e-8 and a > 1 / 3 and n > 1 / 3


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.1, 10), st.floats(0.5, 2))
@settings(max_examples=40, deadline=None)
def test_numeric_oracle_is_rate_scale_free(ba, bs, gp, w0):
    a, n = concurrence_vs_numeric(ba, bs, gamma_plus=gp, omega0=w0)
    assert abs(a - n) < 1e-8


def test_numeric_oracle_uses_wootters():
    rho = steady_state(build_diamond(rates_from_betas(-2.5, 1.5))).rho
    assert_allclose(concurrence(rho), analytic_concurrence(-2.5, 1.5), atol=1e-10)
