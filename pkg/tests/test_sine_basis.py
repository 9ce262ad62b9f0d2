import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from switchfrac.sine_basis import (
    GridFunction,
    SineBasisError,
    SineSeries,
    analyze,
    analyze_samples,
    eigenvalue,
    read_grid_csv,
    synthesize,
    write_grid_csv,
)


def test_single_mode_is_recovered_exactly():
    g = GridFunction.from_function(lambda x: np.sin(math.pi * x), 256)
    s = analyze(g, 8)
    np.testing.assert_allclose(s.coeffs, np.eye(8)[0], rtol=0, atol=1e-14)


def test_eigenvalues():
    assert eigenvalue(1) == pytest.approx(math.pi**2)
    np.testing.assert_allclose(eigenvalue(np.array([2, 3])), [4 * math.pi**2, 9 * math.pi**2])
    with pytest.raises(ValueError):
        eigenvalue(0)


@settings(max_examples=40, deadline=None)
@given(arrays(float, 12, elements=st.floats(-10.0, 10.0)))
def test_round_trip_band_limited(coeffs):
    s = SineSeries(coeffs)
    N = 64
    g = GridFunction(synthesize(s, np.linspace(0.0, 1.0, N + 1)))
    back = analyze(GridFunction.from_function(lambda x: synthesize(s, x), N), 12)
    np.testing.assert_allclose(back.coeffs, coeffs, rtol=0, atol=1e-12 * (1 + np.abs(coeffs).max()))
    assert g.N == N


def test_parseval():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=10) / np.arange(1, 11) ** 2
    s = SineSeries(coeffs)
    x = np.linspace(0.0, 1.0, 4097)
    y = synthesize(s, x)
    # integral of g^2 over [0, 1] is half the sum of squared coefficients
    from scipy.integrate import simpson

    assert simpson(y**2, x=x) == pytest.approx(0.5 * np.sum(coeffs**2), rel=1e-10)


def test_non_band_limited_converges():
    # g(x) = x (1 - x) has g_k = 8 / (k pi)^3 for odd k
    g = GridFunction.from_function(lambda x: x * (1 - x), 2048)
    s = analyze(g, 9)
    k = np.arange(1, 10)
    exact = np.where(k % 2 == 1, 8.0 / (k * math.pi) ** 3, 0.0)
    np.testing.assert_allclose(s.coeffs, exact, atol=1e-6)


def test_resolution_and_boundary_checks():
    with pytest.raises(SineBasisError, match="resolution"):
        analyze(GridFunction(np.zeros(17)), 8)
    with pytest.raises(SineBasisError, match="endpoint"):
        analyze(GridFunction(np.linspace(0.0, 1.0, 65)), 8)
    with pytest.raises(SineBasisError):
        SineSeries([])
    with pytest.raises(SineBasisError):
        SineSeries([1.0, math.nan])
    with pytest.raises(SineBasisError):
        synthesize(SineSeries([1.0]), [1.5])


def test_series_indexing_and_padding():
    s = SineSeries([1.0, 2.0])
    assert s[1] == 1.0 and s[2] == 2.0 and s[3] == 0.0
    with pytest.raises(IndexError):
        s[0]
    np.testing.assert_array_equal(s.padded(4).coeffs, [1.0, 2.0, 0.0, 0.0])
    np.testing.assert_array_equal(s.padded(1).coeffs, [1.0])
    np.testing.assert_array_equal(SineSeries.single(3, 2.0, K=4).coeffs, [0, 0, 2.0, 0])
    with pytest.raises(ValueError):
        s.coeffs[0] = 5.0


def test_row_wise_transform_matches_analyze():
    x = np.linspace(0.0, 1.0, 129)
    rows = np.stack([np.sin(2 * math.pi * x), 3 * np.sin(5 * math.pi * x)])
    out = analyze_samples(rows, 6)
    np.testing.assert_allclose(out[0], np.eye(6)[1], atol=1e-14)
    np.testing.assert_allclose(out[1], 3 * np.eye(6)[4], atol=1e-14)


def test_csv_round_trip_is_exact(tmp_path):
    x = np.linspace(0.0, 1.0, 65)
    g = GridFunction(np.sin(math.pi * x) * np.exp(x) / 3.0)
    g = GridFunction(np.where(np.abs(g.samples) < 1e-12, 0.0, g.samples))
    path = tmp_path / "g.csv"
    write_grid_csv(path, g)
    assert path.read_bytes().startswith(b"x,value\n")
    assert b"\r" not in path.read_bytes()
    np.testing.assert_array_equal(read_grid_csv(path).samples, g.samples)


def test_csv_rejects_bad_header_and_grid(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0,0\n1,0\n")
    with pytest.raises(SineBasisError, match="header"):
        read_grid_csv(bad)
    bad.write_text("x,value\n0,0\n0.3,1\n1,0\n")
    with pytest.raises(SineBasisError, match="uniform"):
        read_grid_csv(bad)


def test_row_wise_transform_limits_the_mode_count():
    with pytest.raises(SineBasisError, match="modes"):
        analyze_samples(np.zeros((2, 9)), 8)
    assert analyze_samples(np.zeros((2, 9)), 7).shape == (2, 7)
