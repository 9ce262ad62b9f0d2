import math
import warnings

import numpy as np
import pytest

from switchfrac.diagnostics import (
    TailCapWarning,
    forcing_sup_norms,
    lemma1_tail,
    lemma2_tail,
    lemma3_peak,
    lemma4_tail,
    truncation_report,
)
from switchfrac.forward import Forcing, ProblemConfig
from switchfrac.harness import ik_quadrature, peak_by_search
from switchfrac.inverse import InverseInput, solve_problem1
from switchfrac.quadrature import TimeSamples, ik_closed_form
from switchfrac.sine_basis import SineSeries

CFG = ProblemConfig(1.25, 0.5, 0.5, 1.0, 0.75, 8)


# {{{ tails


def test_zero_data_has_zero_tails():
    zero = lambda k: np.zeros_like(k)  # noqa: E731
    assert lemma1_tail(zero, CFG, 4) == 0.0
    assert lemma2_tail(np.zeros(16), 4) == 0.0
    assert lemma4_tail(zero, 1.5, 4, 1.0) == 0.0


@pytest.mark.filterwarnings("ignore::switchfrac.diagnostics.TailCapWarning")
def test_forcing_tail_against_direct_summation():
    # M_k = 1 / k^3 summed term by term to K_max = 10^4
    K, K_max = 8, 10_000
    k = np.arange(K + 1, K_max + 1, dtype=float)
    expected = np.sum(np.log1p(k**2 * math.pi**2 * 0.5**0.5) / k**3) / 0.5
    got = lemma1_tail(lambda k: k**-3.0, CFG, K, K_max=K_max)
    assert got == pytest.approx(expected, rel=1e-10)


def test_snapshot_tail_against_closed_sum():
    # psi_k = 1 / k^5 beyond K = 4: pi^2 sum_{k > 4} 1 / k^3
    psi = 1.0 / np.arange(1, 20_001, dtype=float) ** 5
    expected = math.pi**2 * sum(1.0 / k**3 for k in range(5, 20_001))
    assert lemma2_tail(psi, 4) == pytest.approx(expected, rel=1e-12)


@pytest.mark.filterwarnings("ignore::switchfrac.diagnostics.TailCapWarning")
def test_tails_decrease_with_the_cutoff():
    model = lambda k: 1.0 / k**2.5  # noqa: E731
    values = [lemma4_tail(model, 1.5, K, 1.0, K_max=20_000) for K in (2, 8, 32, 128)]
    assert all(x > y for x, y in zip(values, values[1:]))
    values = [lemma2_tail(model, K, K_max=20_000) for K in (2, 8, 32)]
    assert all(x >= y for x, y in zip(values, values[1:]))


def test_plateau_stops_the_sum_early():
    # geometric decay drops below the plateau level long before K_max
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tail = lemma2_tail(lambda k: np.exp(-k), 3)
    k = np.arange(4, 200)
    assert tail == pytest.approx(np.sum(k**2 * math.pi**2 * np.exp(-k)), rel=1e-13)


def test_cap_warning_for_slow_tails():
    with pytest.warns(TailCapWarning):
        lemma2_tail(lambda k: 1.0 / k**2, 4, K_max=1000)


def test_explicit_coefficients_do_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert lemma2_tail([1.0, 0.5, 0.25], 1) == pytest.approx(math.pi**2 * (4 * 0.5 + 9 * 0.25))
        assert lemma2_tail([1.0, 0.5], 5) == 0.0


# }}}


# {{{ peak formula


def test_peak_example_values():
    t_max, g_max = lemma3_peak(1.5, math.pi**2)
    assert t_max == pytest.approx(0.34500, abs=5e-6)
    assert g_max == pytest.approx(1.1350, abs=5e-5)


def test_peak_moves_with_the_order():
    assert lemma3_peak(1.05, math.pi**2)[0] > lemma3_peak(1.5, math.pi**2)[0]


@pytest.mark.parametrize(("alpha", "lam"), [(1.1, 10.0), (1.5, math.pi**2), (1.9, 400.0)])
def test_peak_dominates_sampled_values(alpha, lam):
    t_max, g_max = lemma3_peak(alpha, lam)
    t = np.linspace(0.0, 20.0 * t_max, 1000)
    g = lam * t / (1 + lam * t**alpha)
    assert np.all(g <= g_max * (1 + 1e-14))
    ts, gs = peak_by_search(alpha, lam)
    assert ts == pytest.approx(t_max, rel=1e-8)
    assert gs == pytest.approx(g_max, rel=1e-8)


@pytest.mark.parametrize(("alpha", "lam"), [(1.0, 1.0), (2.0, 1.0), (1.5, 0.0)])
def test_peak_domain(alpha, lam):
    with pytest.raises(ValueError):
        lemma3_peak(alpha, lam)


def test_ik_oracle():
    assert ik_closed_form(30.0, 0.4, 0.7) == pytest.approx(ik_quadrature(30.0, 0.4, 0.7), rel=1e-9)


# }}}


# {{{ report


def test_forcing_sup_norms():
    f = Forcing({1: lambda t: np.sin(3 * t), 3: TimeSamples([0.0, 0.5, 1.0], [0.0, -2.0, 1.0]), 9: lambda t: t})
    M = forcing_sup_norms(f, 4, 1.0)
    assert M[0] == pytest.approx(1.0, abs=1e-4)
    assert M[1] == 0.0
    assert M[2] == 2.0
    assert M.size == 4


def test_truncation_report_fields():
    psi = 1.0 / np.arange(1, 9) ** 3
    r = truncation_report(CFG, psi, Forcing({2: lambda t: np.ones_like(t)}))
    assert r.K_used == 4
    assert r.lemma2_tail == pytest.approx(math.pi**2 * np.sum(1.0 / np.arange(5, 9)))
    assert r.lemma1_tail == 0.0  # only mode 2 is forced
    assert len(r.lemma3_peak_values) == 8
    assert r.M_k_estimates[1] == 1.0
    assert set(r.to_dict()) == {
        "K_used",
        "lemma1_tail",
        "lemma2_tail",
        "lemma3_peak_values",
        "lemma4_tail",
        "M_k_estimates",
    }


def test_report_is_attached_to_recoveries():
    psi = SineSeries(1.0 / np.arange(1, 9) ** 3)
    res = solve_problem1(InverseInput(CFG, SineSeries.zeros(8), psi))
    assert res.report["truncation"] == truncation_report(CFG, psi.coeffs).to_dict()


# }}}


@pytest.mark.parametrize("K", [4, 8, 16])
def test_snapshot_tail_bounds_the_truncation_change(K):
    # max |u_K - u_2K| on [a, b] against the constant-free tail beyond K;
    # the observed multiple is 0.6 to 0.9
    from switchfrac.forward import solve_direct

    cfg = CFG.with_modes(2 * K)
    k = np.arange(1, 2 * K + 1)
    rng = np.random.default_rng(0)
    phi = SineSeries(rng.choice([-1.0, 1.0], 2 * K) / k**4)
    B = SineSeries(rng.choice([-1.0, 1.0], 2 * K) / k**4)
    full = solve_direct(cfg, phi, B)
    cut = solve_direct(cfg.with_modes(K), SineSeries(phi.coeffs[:K]), SineSeries(B.coeffs[:K]))

    t = np.linspace(cfg.a, cfg.b, 41)
    x = np.linspace(0.0, 1.0, 101)
    change = np.max(np.abs(full.solution.evaluate(t, x) - cut.solution.evaluate(t, x)))
    tail = truncation_report(cfg, full.psi.coeffs, K_used=K).lemma2_tail
    assert change <= 2.0 * tail
