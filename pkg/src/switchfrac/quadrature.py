"""Weakly singular Mittag-Leffler convolution integrals.

Evaluates

.. math::

    I = \\int_{l}^{u} (u - z)^p \\, E_{a, b}(-\\lambda (u - z)^a) \\, f(z) \\,
        \\mathrm{d}z, \\qquad p > -1,

by product integration: :math:`f` is replaced by its piecewise linear
interpolant on a mesh graded toward the singular endpoint :math:`z = u`, and
the kernel moments on each cell are integrated exactly. When :math:`p = b - 1`
(every kernel in the mode solutions has this form) the moments follow from
the antiderivative identity

.. math::

    \\int_0^s \\tau^{b - 1} E_{a, b}(-\\lambda \\tau^a) \\, \\mathrm{d}\\tau
        = s^b E_{a, b + 1}(-\\lambda s^a).

Other exponents fall back to Gauss-Jacobi / Gauss-Legendre moments per cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from switchfrac.mittag_leffler import DEFAULT_TOL as ML_TOL
from switchfrac.mittag_leffler import mittag_leffler

DEFAULT_TOL = 1.0e-8
#: default sampling density for tabulated forcing terms
DEFAULT_NODES_PER_UNIT_TIME = 256

_MIN_CELLS = 16
_MAX_CELLS = 1 << 14


class QuadratureError(ArithmeticError):
    """Raised when the requested tolerance is not reached."""

    def __init__(self, message: str, value: float = math.nan, estimate: float = math.inf):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


@dataclass(frozen=True)
class TimeSamples:
    """Piecewise linear function given by samples on an increasing time grid."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        if t.shape != values.shape or t.size < 2:
            raise ValueError("time samples need matching arrays of length >= 2")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        t.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        return np.interp(t, self.t, self.values)

    def covers(self, lower: float, upper: float) -> bool:
        eps = 1.0e-12 * max(1.0, abs(upper))
        return self.t[0] <= lower + eps and self.t[-1] >= upper - eps

    @classmethod
    def from_function(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        t_end: float,
        *,
        nodes_per_unit_time: int = DEFAULT_NODES_PER_UNIT_TIME,
        include: tuple[float, ...] = (),
    ) -> TimeSamples:
        n = max(2, int(math.ceil(nodes_per_unit_time * t_end)) + 1)
        t = np.union1d(np.linspace(0.0, t_end, n), np.asarray(include, dtype=float))
        return cls(t, np.asarray(f(t), dtype=float))


#: a mode forcing is a vectorized callable of time, tabulated samples or None
ModeForcing = Union[Callable[[np.ndarray], np.ndarray], TimeSamples, None]


@dataclass(frozen=True)
class ConvolutionSpec:
    lower: float
    upper: float
    power: float
    ml_a: float
    ml_b: float
    lam: float
    f: ModeForcing

    def __post_init__(self) -> None:
        if not self.power > -1.0:
            raise ValueError(f"kernel power must be > -1: got {self.power}")
        if not self.lower < self.upper:
            raise ValueError(f"need lower < upper: got [{self.lower}, {self.upper}]")
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be non-negative: got {self.lam}")
        if isinstance(self.f, TimeSamples) and not self.f.covers(self.lower, self.upper):
            raise ValueError(
                f"samples on [{self.f.t[0]}, {self.f.t[-1]}] do not cover "
                f"[{self.lower}, {self.upper}]"
            )


# {{{ kernel weights


def graded_nodes(span: float, ncells: int, power: float) -> np.ndarray:
    """Nodes in :math:`\\tau = u - z`, clustered toward :math:`\\tau = 0`."""
    q = min(max(2.0 / (1.0 + power), 1.0), 4.0)
    return span * np.linspace(0.0, 1.0, ncells + 1) ** q


def _antiderivatives(tau: np.ndarray, a: float, b: float, lam: float) -> tuple[np.ndarray, ...]:
    # F1(s) = s^b E_{a,b+1}(-lam s^a), F2(s) = s^{b+1} E_{a,b+2}(-lam s^a)
    z = -lam * tau**a
    e1 = mittag_leffler(a, b + 1.0, z, ML_TOL)
    e2 = mittag_leffler(a, b + 2.0, z, ML_TOL)
    return tau**b * e1, tau ** (b + 1.0) * e2


def _exact_moments(tau: np.ndarray, a: float, b: float, lam: float) -> tuple[np.ndarray, np.ndarray]:
    f1, f2 = _antiderivatives(tau, a, b, lam)
    dtau = np.diff(tau)
    m0 = np.diff(f1)
    # int (tau - tau_j) K = dtau F1(tau_{j+1}) - (F2(tau_{j+1}) - F2(tau_j))
    m1 = f1[1:] - np.diff(f2) / dtau
    return m0, m1


def _gauss_moments(
    tau: np.ndarray, p: float, a: float, b: float, lam: float
) -> tuple[np.ndarray, np.ndarray]:
    ng = 12
    xj, wj = roots_jacobi(ng, 0.0, p)
    xl, wl = roots_legendre(ng)

    m0 = np.zeros(tau.size - 1)
    m1 = np.zeros(tau.size - 1)
    for j in range(tau.size - 1):
        t0, t1 = tau[j], tau[j + 1]
        h = t1 - t0
        if j == 0:
            # weight (1 + x)^p on [-1, 1] maps to tau^p on [0, h]
            s = 0.5 * h * (1.0 + xj)
            kw = wj * (0.5 * h) ** (p + 1.0) * mittag_leffler(a, b, -lam * s**a, ML_TOL)
        else:
            s = t0 + 0.5 * h * (1.0 + xl)
            kw = 0.5 * h * wl * s**p * mittag_leffler(a, b, -lam * s**a, ML_TOL)

        m0[j] = np.sum(kw)
        m1[j] = np.sum(kw * (s - t0) / h)

    return m0, m1


def _cell_moments(
    tau: np.ndarray, power: float, a: float, b: float, lam: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell kernel mass and first moment divided by the cell width.

    With :math:`f` linear on each cell the integral is
    ``m0 @ f[:-1] + m1 @ diff(f)``. Pairing ``m1`` with the differences of
    *f*, instead of folding both into node weights, avoids an
    :math:`O(\\epsilon / h)` roundoff per cell.
    """
    if abs(power - (b - 1.0)) < 1.0e-14 and b > 0.0:
        return _exact_moments(tau, a, b, lam)
    return _gauss_moments(tau, power, a, b, lam)


@lru_cache(maxsize=256)
def _kernel_moments_cached(
    span: float, ncells: int, power: float, a: float, b: float, lam: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tau = graded_nodes(span, ncells, power)
    m0, m1 = _cell_moments(tau, power, a, b, lam)
    for arr in (tau, m0, m1):
        arr.setflags(write=False)
    return tau, m0, m1


def kernel_weights(
    span: float, ncells: int, power: float, a: float, b: float, lam: float
) -> tuple[np.ndarray, np.ndarray]:
    """Product-integration nodes and weights in :math:`\\tau = u - z`.

    For a piecewise linear :math:`f`,
    ``sum(w * f(u - tau))`` reproduces the integral up to the
    Mittag-Leffler evaluation error. The integrators work with the cell
    moments directly, which is more accurate on fine meshes.
    """
    tau, m0, m1 = _kernel_moments_cached(
        float(span), int(ncells), float(power), float(a), float(b), float(lam)
    )
    w = np.zeros_like(tau)
    w[:-1] += m0 - m1
    w[1:] += m1
    return tau, w


# }}}


# {{{ integrals


def _sampled_integral(spec: ConvolutionSpec, f: TimeSamples) -> tuple[float, float]:
    # mesh = sample nodes, so the interpolant is integrated exactly
    inside = f.t[(f.t > spec.lower) & (f.t < spec.upper)]
    z = np.concatenate([[spec.lower], inside, [spec.upper]])
    tau = np.ascontiguousarray((spec.upper - z)[::-1])
    tau[0] = 0.0

    m0, m1 = _cell_moments(tau, spec.power, spec.ml_a, spec.ml_b, spec.lam)
    values = f(spec.upper - tau)
    value = float(m0 @ values[:-1] + m1 @ np.diff(values))
    return value, ML_TOL * float(np.sum(np.abs(values))) * 4.0


def conv_integral_with_error(
    spec: ConvolutionSpec, tol: float = DEFAULT_TOL
) -> tuple[float, float]:
    """Evaluate the convolution integral and an error estimate.

    Callable forcings are refined by mesh doubling with Richardson
    extrapolation until successive extrapolated values agree to *tol*;
    tabulated forcings are integrated exactly as piecewise linear functions.

    Raises
    ------
    QuadratureError
        If the refinement cap is reached before the tolerance is met.
    """
    if spec.f is None:
        return 0.0, 0.0
    if isinstance(spec.f, TimeSamples):
        return _sampled_integral(spec, spec.f)

    span = float(spec.upper - spec.lower)
    args = (float(spec.power), float(spec.ml_a), float(spec.ml_b), float(spec.lam))

    def estimate(ncells: int) -> float:
        tau, m0, m1 = _kernel_moments_cached(span, ncells, *args)
        values = np.asarray(spec.f(spec.upper - tau), dtype=float)
        return float(m0 @ values[:-1] + m1 @ np.diff(values))

    ncells = 2 * _MIN_CELLS
    coarse, fine = estimate(_MIN_CELLS), estimate(ncells)
    prev = (4.0 * fine - coarse) / 3.0
    while True:
        ncells *= 2
        coarse, fine = fine, estimate(ncells)
        # linear interpolation error is O(h^2) with an O(h^4) next term, so
        # the extrapolated values converge fast and their difference bounds
        # the error of the latest one
        value = (4.0 * fine - coarse) / 3.0
        err = abs(value - prev)
        if err <= tol:
            return value, err
        if ncells >= _MAX_CELLS:
            raise QuadratureError(
                f"convolution integral missed tol={tol:.1e} with {ncells} cells "
                f"(estimate {err:.3e})",
                value=value,
                estimate=err,
            )
        prev = value


def conv_integral(spec: ConvolutionSpec, tol: float = DEFAULT_TOL) -> float:
    return conv_integral_with_error(spec, tol)[0]


def ik_closed_form(lam: float, beta: float, span: float) -> float:
    """:math:`\\int_a^y (y - z)^{\\beta - 1} / (1 + \\lambda (y - z)^\\beta) dz`.

    Equals :math:`\\ln(1 + \\lambda s^\\beta) / (\\beta \\lambda)` for the
    span :math:`s = y - a`.
    """
    return math.log1p(lam * span**beta) / (beta * lam)


# }}}
