"""Small worked values for each module, computed by hand or from closed forms."""

import math

import numpy as np
import pytest

from switchfrac.forward import (
    ModeCoefficients,
    ProblemConfig,
    make_mode_solution,
    solve_direct,
    velocity_matched_B,
)
from switchfrac.inverse import (
    InverseInput,
    compute_Bk,
    compute_Bk_p2,
    compute_Ck,
    compute_hbar_k,
    compute_hk,
    solve_problem1,
    solve_problem2,
)
from switchfrac.mittag_leffler import mittag_leffler, ml_eval
from switchfrac.quadrature import ConvolutionSpec, conv_integral
from switchfrac.sine_basis import GridFunction, SineSeries, analyze, eigenvalue, synthesize

LAM = math.pi**2


def example(alpha, beta, K=1):
    return ProblemConfig(alpha, beta, 0.5, 1.0, 0.75, K)


def single_mode_input(alpha, beta):
    return InverseInput(example(alpha, beta), SineSeries([1.0]), SineSeries([1.0]))


# {{{ special functions and transforms


def test_exponential_margin():
    assert ml_eval(1.0, 1.0, 0.0).value == 1.0
    assert 6.0 * ml_eval(1.0, 1.0, -5.0).value == pytest.approx(0.040428, abs=5e-7)
    assert ml_eval(0.5, 0.5, -10.0).value > 0.0


def test_transform_values():
    g = GridFunction.from_function(lambda x: np.sin(2 * math.pi * x), 64)
    np.testing.assert_allclose(analyze(g, 4).coeffs, [0, 1, 0, 0], atol=1e-15)
    assert np.all(analyze(GridFunction(np.zeros(65)), 8).coeffs == 0.0)
    s = analyze(GridFunction.from_function(lambda x: x * (1 - x), 4096), 3)
    # 8 / (k pi)^3 for odd k: 0.2580122, 0, 0.0095560
    exact = [8 / math.pi**3, 0.0, 8 / (27 * math.pi**3)]
    np.testing.assert_allclose(s.coeffs, exact, atol=1e-7)
    np.testing.assert_allclose(exact, [0.2580122, 0.0, 0.0095560], atol=5e-8)

    assert synthesize(SineSeries([1.0]), [0.5])[0] == pytest.approx(1.0, abs=1e-15)
    assert synthesize(SineSeries([0.0, 1.0]), [0.25])[0] == pytest.approx(1.0, abs=1e-15)
    assert synthesize(SineSeries([1.0, 1.0]), [1 / 3])[0] == pytest.approx(math.sqrt(3), abs=1e-14)
    assert eigenvalue(3) == pytest.approx(88.826440, abs=1e-6)
    assert eigenvalue(10) == pytest.approx(100 * LAM)


def test_sine_kernel_convolution():
    # int_0^t (t - z) E_{2,2}(-lam (t - z)^2) dz = (1 - cos(sqrt(lam) t)) / lam
    spec = ConvolutionSpec(0.0, 0.5, 1.0, 2.0, 2.0, LAM, lambda z: np.ones_like(z))
    assert conv_integral(spec, 1e-12) == pytest.approx(1.0 / LAM, rel=1e-11)
    assert 1.0 / LAM == pytest.approx(0.101321, abs=5e-7)
    assert conv_integral(ConvolutionSpec(0.0, 0.5, 1.0, 2.0, 2.0, LAM, None)) == 0.0


# }}}


# {{{ mode formulas


def test_wave_side_reaches_the_switch_value():
    # u_1(a-) = E_{1.5,1} + B_1 a E_{1.5,2} with B_1 from the reference row
    c = ModeCoefficients(k=1, lambda_k=LAM, phi_k=1.0, C_k=0.0, B_k=54.596)
    m = make_mode_solution(example(1.5, 0.5), c)
    assert m.wave(0.0) == 1.0
    assert m.wave(0.5) == pytest.approx(8.9196, rel=1e-4)


def test_diffusion_side_reaches_the_snapshot():
    c = ModeCoefficients(k=1, lambda_k=LAM, phi_k=0.0, C_k=8.9196, B_k=0.0)
    m = make_mode_solution(example(1.5, 0.5), c)
    assert m.diffusion(0.5) == 8.9196
    assert m.diffusion(0.75) == pytest.approx(1.0, rel=1e-4)


def test_zero_mode_is_zero():
    c = ModeCoefficients(k=2, lambda_k=4 * LAM, phi_k=0.0, C_k=0.0, B_k=0.0)
    m = make_mode_solution(example(1.5, 0.5), c)
    assert m.wave(0.3) == 0.0 and m.diffusion(0.9) == 0.0 and m.wave_deriv(0.2) == 0.0


def test_direct_map_examples():
    d = solve_direct(example(1.8, 0.3), SineSeries([1.0]), SineSeries([36.748]))
    assert d.induced_h[1] == pytest.approx(-82.106, rel=1e-3)
    assert d.solution.evaluate([0.75], [0.5])[0, 0] == pytest.approx(1.0, rel=1e-3)
    z = solve_direct(example(1.8, 0.3, 3), SineSeries.zeros(3), SineSeries.zeros(3))
    assert np.all(z.induced_h.coeffs == 0.0)
    assert np.all(z.solution.evaluate([0.2, 0.8], [0.3]) == 0.0)


# }}}


# {{{ recovery formulas


@pytest.mark.parametrize(("beta", "C"), [(0.5, 8.9196), (0.3, 9.2479)])
def test_switch_value_from_the_snapshot(beta, C):
    assert compute_Ck(single_mode_input(1.5, beta), 1) == pytest.approx(C, rel=1e-4)


@pytest.mark.parametrize(("alpha", "beta", "h"), [(1.8, 0.3, -82.106), (1.3, 0.4, -79.425)])
def test_velocity_mismatch_values(alpha, beta, h):
    inp = single_mode_input(alpha, beta)
    C = compute_Ck(inp, 1)
    B = compute_Bk(inp, C, 1)
    assert compute_hk(inp, C, B, 1) == pytest.approx(h, rel=1e-4)


def test_reference_recovery_on_the_grid():
    res = solve_problem1(single_mode_input(1.5, 0.5))
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(res.solution.snapshot(0.75, x), np.sin(math.pi * x), atol=1e-8)
    np.testing.assert_allclose(synthesize(res.h, x), -74.264 * np.sin(math.pi * x), rtol=1e-4, atol=1e-12)


def test_zero_data_formulas():
    inp = InverseInput(example(1.5, 0.5, 2), SineSeries.zeros(2), SineSeries.zeros(2))
    for k in (1, 2):
        C = compute_Ck(inp, k)
        assert C == 0.0
        assert compute_Bk(inp, C, k) == 0.0 and compute_Bk_p2(inp, C, k) == 0.0
        assert compute_hk(inp, C, 0.0, k) == 0.0 and compute_hbar_k(inp, C, 0.0, k) == 0.0


def test_position_jump_velocity_from_the_flux_condition():
    # B_1 = lam (phi_1 a^{alpha-1} E_{alpha,alpha} - C_1) / E_{alpha,1} at z = -lam a^alpha
    alpha, a = 1.5, 0.5
    inp = single_mode_input(alpha, 0.5)
    C = compute_Ck(inp, 1)
    z = -LAM * a**alpha
    expected = LAM * (a ** (alpha - 1) * mittag_leffler(alpha, alpha, z) - C) / mittag_leffler(alpha, 1.0, z)
    assert compute_Bk_p2(inp, C, 1) == pytest.approx(expected, rel=1e-12)


def test_continuous_interface_gives_zero_jump():
    cfg = example(1.25, 0.5, 4)
    phi = SineSeries([1.0, -0.3, 0.1, 0.02])
    B = velocity_matched_B(cfg, phi, SineSeries.zeros(4))
    d = solve_direct(cfg, phi, B)
    res = solve_problem2(InverseInput(cfg, phi, d.psi))
    assert np.max(np.abs(res.hbar.coeffs)) <= 1e-8
    np.testing.assert_allclose([c.B_k for c in res.solution.coefficients], B.coeffs, rtol=1e-8)


def test_injected_jump_is_recovered_mode_by_mode():
    cfg = example(1.25, 0.5, 4)
    jump = SineSeries([0.0, 0.3, 0.0, 0.0])
    phi = SineSeries([1.0, 0.0, 0.1, 0.0])
    B = velocity_matched_B(cfg, phi, jump)
    d = solve_direct(cfg, phi, B, jump=jump)
    hbar = solve_problem2(InverseInput(cfg, phi, d.psi)).hbar.coeffs
    assert hbar[1] == pytest.approx(0.3, abs=1e-8)
    assert np.max(np.abs(hbar[[0, 2, 3]])) <= 1e-8


# }}}
