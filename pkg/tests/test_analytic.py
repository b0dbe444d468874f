import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pacsmzi import analytic, fock
from pacsmzi.analytic import (coherent_pair_moments, coherent_spacs_moments, cross_expectation,
                              pacs_mean, pacs_number_moment, pacs_variance, s_sql,
                              vacuum_pacs_moments)
from pacsmzi.core import InputConfig
from pacsmzi.specfun import laguerre


@pytest.mark.parametrize("ab, m, expected", [(1.5, 0, 2.25), (0.0, 1, 1.0), (1.5, 1, 3.942307692)])
def test_pacs_mean_examples(ab, m, expected):
    assert pacs_mean(ab, m) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("ab, m, expected", [(1.5, 0, 2.25), (0.0, 1, 0.0), (1.5, 1, 2.4630178)])
def test_pacs_variance_examples(ab, m, expected):
    assert pacs_variance(ab, m) == pytest.approx(expected, abs=1e-7)


def test_verbatim_variance_values():
    assert pacs_variance(1.5, 1, verbatim=True) == pytest.approx(22.889423076923077, rel=1e-12)
    x = 2.25
    assert pacs_variance(1.5, 0, verbatim=True) == pytest.approx(x**2 + 3 * x, rel=1e-14)


@pytest.mark.parametrize("m", range(5))
@pytest.mark.parametrize("ab", [0.0, 0.4, 1.1 + 0.3j, 2.0])
def test_pacs_moments_three_routes(m, ab):
    """Laguerre-ratio closed forms, Poisson factorial moments, and the Fock vector agree."""
    vec = fock.pacs_state(ab, m)
    mean_p = pacs_number_moment(ab, m, 1)
    var_p = pacs_number_moment(ab, m, 2) - mean_p**2
    assert pacs_mean(ab, m) == pytest.approx(mean_p, abs=1e-11)
    assert pacs_variance(ab, m) == pytest.approx(var_p, abs=1e-10)
    assert pacs_mean(ab, m) == pytest.approx(vec.mean_n(), abs=1e-10)
    assert pacs_variance(ab, m) == pytest.approx(vec.var_n(), abs=1e-9)


def test_pacs_variance_high_order_matches_oracle():
    for m in (5, 8):
        vec = fock.pacs_state(1.2, m, 80)
        assert pacs_variance(1.2, m) == pytest.approx(vec.var_n(), abs=1e-9)


def test_pacs_number_moment_order_cap():
    with pytest.raises(ValueError):
        pacs_number_moment(1.0, 5, 2)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 30))
def test_spacs_bracket_equals_mean(x):
    bracket = (1 + 3 * x + x**2) / (1 + x)
    alt = 2 * laguerre(2, -x) / laguerre(1, -x) - 1
    assert bracket == pytest.approx(alt, rel=1e-12)
    assert pacs_mean(math.sqrt(x), 1) == pytest.approx(bracket, rel=1e-12)


@pytest.mark.parametrize("aa, ab, expected", [(1.5, 0.0, 0.0), (1.5, 1.0, 2.25), (0.0, 1.7 - 0.2j, 0.0)])
def test_cross_expectation_examples(aa, ab, expected):
    assert cross_expectation(aa, ab) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("aa, ab", [(1.5, 1.0), (0.7 - 0.4j, 1.3 + 0.6j)])
def test_cross_expectation_contraction(aa, ab):
    va, vb = fock.coherent_state(aa), fock.pacs_state(ab, 1)
    direct = np.conj(va.expect_lowering(1)) * vb.expect_lowering(1)
    assert cross_expectation(aa, ab) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("dphi, n, expected", [(0.5, 4, 1.0), (0.5, 1, 0.5)])
def test_s_sql_examples(dphi, n, expected):
    assert s_sql(dphi, n) == expected


def test_s_sql_domain():
    with pytest.raises(ValueError):
        s_sql(0.1, 0.0)


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("ab", [0.1, 0.5, 1.5, 2.0])
def test_vacuum_pacs_reaches_sql_at_half_pi(m, ab):
    assert vacuum_pacs_moments(math.pi / 2, ab, m).s_sql == pytest.approx(1.0, abs=1e-12)


def test_vacuum_pacs_divergent_at_endpoints():
    for phi in (0.0, math.pi):
        ms = vacuum_pacs_moments(phi, 1.0, 2)
        assert ms.divergent and ms.s_sql == math.inf


def test_vacuum_pacs_weaker_amplitude_converges_faster():
    for phi in (0.6, 1.0, 1.3):
        weak = vacuum_pacs_moments(phi, 0.1, 1).s_sql
        strong = vacuum_pacs_moments(phi, 1.5, 1).s_sql
        assert 1 <= weak < strong


def test_vacuum_pacs_third_pi_oracle():
    an = vacuum_pacs_moments(math.pi / 3, 1.5, 1)
    orc = fock.delta_phi_numeric(InputConfig.vacuum_pacs(1.5, 1), math.pi / 3)
    assert an.s_sql == pytest.approx(orc.s_sql, abs=1e-8)
    assert an.s_sql > 1


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, math.pi - 1e-3), st.integers(1, 5), st.floats(0.0, 2.0))
def test_vacuum_pacs_never_beats_sql(phi, m, ab):
    ms = vacuum_pacs_moments(phi, ab, m)
    assert ms.s_sql >= 1 - 1e-9


def test_fig2c_points():
    near_cross = coherent_spacs_moments(0.0, 1.5, 0.68075)
    assert near_cross.n_total == pytest.approx(4.03, abs=0.01)
    assert near_cross.s_sql == pytest.approx(1.0, abs=0.01)
    at_min = coherent_spacs_moments(0.0, 1.5, 1.1713)
    assert at_min.n_total == pytest.approx(5.2, abs=0.01)
    assert at_min.s_sql == pytest.approx(0.90, abs=0.01)


def test_coherent_with_single_photon_matches_oracle():
    # <b> = 0 for |1>, so the slope vanishes at phi = 0 on both paths
    an = coherent_spacs_moments(0.0, 1.5, 0.0)
    orc = fock.delta_phi_numeric(InputConfig(1.5, 0.0, 1), 0.0)
    assert an.divergent and orc.divergent
    for phi in (0.3, 1.2):
        an = coherent_spacs_moments(phi, 1.5, 0.0)
        orc = fock.delta_phi_numeric(InputConfig(1.5, 0.0, 1), phi)
        assert math.isfinite(an.s_sql)
        assert an.s_sql == pytest.approx(orc.s_sql, abs=1e-8)


def test_printed_terms_validated():
    checks = analytic.printed_form_checks()
    assert {c["term"] for c in checks} == {"diff", "var_u", "var_w", "cov_sum"}
    assert all(c["ok"] for c in checks)


@pytest.mark.parametrize("aa", [0.0, 0.8, 1.9])
@pytest.mark.parametrize("ab", [0.0, 0.5 + 0.5j, 1.6])
def test_oracle_equivalence_sample(aa, ab):
    cfg = InputConfig(aa, ab, 1)
    state = fock.input_state(cfg)
    for phi in np.linspace(0.1, 3.0, 6):
        an = analytic.analytic_moments(cfg, phi)
        orc = fock.oracle_moments(state, phi)
        assert an.mean_nd == pytest.approx(orc.mean_nd, abs=1e-8)
        assert an.var_nd == pytest.approx(orc.var_nd, abs=1e-8)
        assert an.slope == pytest.approx(orc.slope, abs=1e-8)


@pytest.mark.parametrize("aa, ab", [(1.5, 1.5), (0.4, 1.3), (2.0, 0.3 + 0.2j)])
def test_two_coherent_reduction(aa, ab):
    phis = np.linspace(0.0, math.pi, 301)
    rows = [coherent_pair_moments(phi, aa, ab) for phi in phis]
    n = abs(aa) ** 2 + abs(ab) ** 2
    for r in rows:
        assert r.var_nd == pytest.approx(n, abs=1e-12)
    if aa == ab:
        assert min(r.s_sql for r in rows) == pytest.approx(1.0, abs=1e-9)
    # the optimum over phi is always the SQL when both inputs are coherent
    best = min(r.s_sql for r in rows if r.status == "ok")
    assert best >= 1 - 1e-9


def test_unbalanced_coherent_closed_form():
    for aa, ab in ((1.5, 0.7), (0.4, 1.9)):
        n = aa**2 + ab**2
        assert coherent_pair_moments(0.0, aa, ab).s_sql == pytest.approx(n / (2 * aa * ab), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 3.1), st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0, 2 * math.pi))
def test_global_phase_invariance(phi, aa, ab, theta):
    rot = cmath.exp(1j * theta)
    base = coherent_spacs_moments(phi, aa, ab)
    turned = coherent_spacs_moments(phi, aa * rot, ab * rot)
    if base.status == "ok":
        assert turned.s_sql == pytest.approx(base.s_sql, rel=1e-9)


def test_dispatch():
    assert analytic.analytic_moments(InputConfig.vacuum_pacs(1.0, 4), 0.4).path == "analytic"
    with pytest.raises(analytic.NoClosedForm):
        analytic.analytic_moments(InputConfig(1.0, 1.0, 2), 0.4)


def test_input_config_validation():
    with pytest.raises(ValueError):
        InputConfig(0.5, 1.0, 1, "vacuum")
    with pytest.raises(ValueError):
        InputConfig(0.5, 1.0, 17)
    with pytest.raises(ValueError):
        InputConfig(0.5, 1.0, 1, "thermal")
