import math

import mpmath
import numpy as np
import pytest
from scipy.special import eval_hermite

from pacsmzi import fock, wigner
from pacsmzi.core import InputConfig, TruncationError

FIG4_M1 = InputConfig(1.17, 1.5, 1)
FIG4_M4 = InputConfig(0.819, 1.5, 4)


def fock_wigner_reference(n, alpha):
    # (2/pi)(-1)^n exp(-2|a|^2) L_n(4|a|^2), in extended precision
    with mpmath.workdps(60):
        r = 4 * mpmath.mpf(abs(alpha)) ** 2
        lag = mpmath.fsum((-1) ** k * mpmath.binomial(n, k) * r**k / mpmath.factorial(k)
                          for k in range(n + 1))
        return float(2 / mpmath.pi * (-1) ** n * mpmath.exp(-r / 2) * lag)


def fock_density(n, n_max):
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    rho[n, n] = 1.0
    return rho


def test_vacuum():
    grid = wigner.wigner_of_state(fock.coherent_state(0, 20).density(), wigner.GridSpec(65))
    assert grid.value_at_origin() == pytest.approx(2 / math.pi, abs=1e-14)
    assert grid.min_value > 0
    z = grid.x[:, None] + 1j * grid.p[None, :]
    np.testing.assert_allclose(grid.values, 2 / np.pi * np.exp(-2 * np.abs(z) ** 2), atol=1e-14)


def test_single_photon_origin():
    grid = wigner.wigner_of_state(fock.pacs_state(0, 1, 20).density(), wigner.GridSpec(129))
    assert grid.value_at_origin() == pytest.approx(-2 / math.pi, abs=1e-6)


@pytest.mark.parametrize("n", [1, 5, 20, 45])
def test_fock_states_against_extended_precision(n):
    ev = wigner.wigner_evaluator(fock_density(n, 120))
    for alpha in (0.0, 0.4 + 0.3j, 1.7, 2.5 - 1.5j, 4.0j):
        assert ev(alpha) == pytest.approx(fock_wigner_reference(n, alpha), abs=1e-10)


def test_coherent_positive():
    grid = wigner.wigner_of_state(fock.coherent_state(1.5).density())
    assert grid.min_value >= -1e-10


@pytest.mark.parametrize("rho", [
    fock.coherent_state(0).density(),
    fock.pacs_state(0, 1).density(),
    fock.coherent_state(1.5 - 0.5j).density(),
    fock.pacs_state(1.5, 4).density(),
])
def test_normalization(rho):
    assert wigner.wigner_of_state(rho).integral() == pytest.approx(1.0, abs=5e-3)


def x_distribution(rho, x):
    # X = (a + a^dag)/2 eigenfunctions: (2/pi)^(1/4) H_n(sqrt2 x) e^{-x^2} / sqrt(2^n n!)
    n = np.arange(rho.shape[0])
    norm = (2 / np.pi) ** 0.25 / np.sqrt([2.0**k * math.factorial(k) for k in n])
    psi = norm[:, None] * eval_hermite(n[:, None], math.sqrt(2) * x[None, :]) * np.exp(-x**2)
    return np.einsum("jk,jx,kx->x", rho, psi, psi).real


@pytest.mark.parametrize("rho", [
    fock.coherent_state(0, 30).density(),
    fock.pacs_state(0, 1, 30).density(),
    fock.coherent_state(1.5, 30).density(),
])
def test_marginals(rho):
    grid = wigner.wigner_of_state(rho)
    marginal = np.trapezoid(grid.values, grid.p, axis=1)
    reference = x_distribution(np.asarray(rho.entries), grid.x)
    l1 = np.trapezoid(np.abs(marginal - reference), grid.x)
    assert l1 <= 1e-3


def test_product_form_matches_full_output():
    phi = 0.9
    cfg = InputConfig(1.17, 1.5, 1)
    out = fock.apply_mzi(fock.input_state(cfg, 40), phi)
    w_a = wigner.wigner_evaluator(fock.coherent_state(cfg.alpha_a, 40).density())
    w_b = wigner.wigner_evaluator(fock.pacs_state(cfg.alpha_b, 1, 40).density())
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2.5, 2.5, (100, 2)) + 1j * rng.uniform(-2.5, 2.5, (100, 2))
    for zf, ze in pts:
        full = wigner.two_mode_wigner(out, zf, ze)
        assert wigner.output_wigner_product(phi, w_a, w_b, (zf, ze)) == pytest.approx(full, abs=1e-6)


def test_product_form_identity_at_zero_phase():
    w_a = wigner.wigner_evaluator(fock.coherent_state(0.8, 20).density())
    w_b = wigner.wigner_evaluator(fock.pacs_state(0.5, 1, 20).density())
    for zf, ze in ((0.1, 0.7j), (-0.4 + 0.2j, 1.0)):
        # B = 0: port f carries mode b, port e carries mode a
        assert wigner.output_wigner_product(0.0, w_a, w_b, (zf, ze)) == pytest.approx(w_a(ze) * w_b(zf), abs=1e-15)


def test_product_form_coherent_gaussians():
    phi, aa, ab = 2.2, 0.9 + 0.1j, -0.4 + 0.6j
    A, B = math.cos(phi / 2), math.sin(phi / 2)
    cf, ce = A * ab - B * aa, A * aa + B * ab
    w_a = wigner.wigner_evaluator(fock.coherent_state(aa, 20).density())
    w_b = wigner.wigner_evaluator(fock.coherent_state(ab, 20).density())
    for zf, ze in ((0.0, 0.0), (0.3 - 0.2j, 1.1), (cf, ce)):
        expect = (2 / math.pi) ** 2 * math.exp(-2 * abs(zf - cf) ** 2 - 2 * abs(ze - ce) ** 2)
        assert wigner.output_wigner_product(phi, w_a, w_b, (zf, ze)) == pytest.approx(expect, abs=1e-12)


def test_slice_negativity_near_origin():
    w_a = wigner.wigner_evaluator(fock.coherent_state(1.17).density())
    w_b = wigner.wigner_evaluator(fock.pacs_state(1.5, 1).density())
    centroid_e = 1.17  # mode e carries the coherent input at phi = 0
    axis = np.linspace(-2, 2, 81)
    z = axis[:, None] + 1j * axis[None, :]
    values = wigner.output_wigner_product(0.0, w_a, w_b, (z, np.full_like(z, centroid_e)))
    i, j = np.unravel_index(np.argmin(values), values.shape)
    assert values.min() < -1e-6
    assert abs(axis[i] + 1j * axis[j]) < 1.5


def test_output_negativity_m1():
    g0, r0 = wigner.output_mode_wigner(FIG4_M1, 0.0)
    g1, r1 = wigner.output_mode_wigner(FIG4_M1, 5.03)
    assert r0.is_nonclassical
    assert r0.negative_volume > r1.negative_volume
    assert g0.integral() == pytest.approx(1, abs=5e-3) and g1.integral() == pytest.approx(1, abs=5e-3)


def test_output_negativity_m4():
    _, r0 = wigner.output_mode_wigner(FIG4_M4, 0.0)
    _, r1 = wigner.output_mode_wigner(FIG4_M4, 3.77)
    assert r0.negative_volume > r1.negative_volume


@pytest.mark.parametrize("phi", [0.0, 1.4, 4.0])
def test_coherent_outputs_stay_positive(phi):
    grid, rep = wigner.output_mode_wigner(InputConfig(1.0, 0.6, 0), phi, grid=wigner.GridSpec(48))
    assert rep.min_value >= -1e-8 and not rep.is_nonclassical


def test_negativity_report_consistent():
    grid = wigner.wigner_of_state(fock.pacs_state(0.5, 1).density(), wigner.GridSpec(33))
    rep = wigner.negativity(grid)
    i, j = np.unravel_index(np.argmin(grid.values), grid.values.shape)
    assert rep.min_location == (grid.x[i], grid.p[j])
    assert rep.negative_volume >= 0
    assert rep.is_nonclassical == (rep.min_value < -1e-6)


def test_evaluation_is_order_independent():
    ev = wigner.wigner_evaluator(fock.reduce_mode(fock.apply_mzi(fock.input_state(FIG4_M1), 5.03), "f"))
    z = np.random.default_rng(3).normal(size=2500) + 0j
    full = ev(z)
    assert np.array_equal(full[:20], np.array([ev(v) for v in z[:20]]))
    assert np.array_equal(full[2000:], ev(z[2000:]))


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        wigner.GridSpec(8)
    with pytest.raises(ValueError):
        wigner.GridSpec(64, -1.0)
    grid = wigner.wigner_of_state(fock.coherent_state(0, 10).density(), wigner.GridSpec(16))
    with pytest.raises(ValueError):
        grid.value_at_origin()


def test_default_span_follows_centroid():
    grid = wigner.wigner_of_state(fock.coherent_state(2.0 + 1.0j, 40).density())
    assert grid.x[-1] == pytest.approx(abs(2.0 + 1.0j) + 4)
    assert grid.resolution == 128


def test_support_check():
    with pytest.raises(TruncationError):
        wigner.wigner_evaluator(fock_density(9, 10))


def test_closed_form_gaussian_limit():
    # m = n = 0 is a product of two vacuum-shaped Gaussians at the given centres
    cf, ce = 0.3 + 0.1j, -0.5j
    for zf, ze in ((0.0, 0.0), (0.4, 0.2 - 0.3j)):
        expect = (2 / math.pi) ** 2 * math.exp(-2 * abs(zf - cf) ** 2 - 2 * abs(ze - ce) ** 2)
        assert wigner.closed_form_output_wigner(zf, ze, 0, 0, cf, ce) == pytest.approx(expect, rel=1e-12)
