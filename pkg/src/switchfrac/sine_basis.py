"""Fourier sine series on :math:`[0, 1]`.

Coefficients follow the convention
:math:`g_k = 2 \\int_0^1 g(x) \\sin(k \\pi x) \\, \\mathrm{d}x`, so that
:math:`g(x) = \\sum_k g_k \\sin(k \\pi x)`. The basis functions are the
Dirichlet eigenfunctions of :math:`-\\partial_{xx}` with eigenvalues
:math:`(k \\pi)^2`.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import fft

DEFAULT_MODES = 64
DEFAULT_RESOLUTION = 512

BOUNDARY_TOL = 1.0e-12


class SineBasisError(ValueError):
    """Invalid grid data for the sine transform."""


@dataclass(frozen=True)
class SineSeries:
    """Coefficients :math:`g_1, \\dots, g_K` of a truncated sine series."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size < 1:
            raise SineBasisError("a sine series needs at least one mode")
        if not np.all(np.isfinite(coeffs)):
            raise SineBasisError("sine coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def K(self) -> int:
        return self.coeffs.size

    def __getitem__(self, k: int) -> float:
        """Coefficient of mode *k* (1-based); zero beyond the truncation."""
        if k < 1:
            raise IndexError(f"modes are 1-based: got {k}")
        return float(self.coeffs[k - 1]) if k <= self.K else 0.0

    def padded(self, K: int) -> SineSeries:
        out = np.zeros(max(K, 1))
        n = min(K, self.K)
        out[:n] = self.coeffs[:n]
        return SineSeries(out)

    @classmethod
    def zeros(cls, K: int) -> SineSeries:
        return cls(np.zeros(K))

    @classmethod
    def single(cls, k: int, value: float = 1.0, K: int | None = None) -> SineSeries:
        coeffs = np.zeros(max(k, K or 0))
        coeffs[k - 1] = value
        return cls(coeffs)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function at the uniform nodes :math:`x_j = j / N`."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float).reshape(-1)
        if samples.size < 2:
            raise SineBasisError("a grid function needs at least two samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def N(self) -> int:
        return self.samples.size - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)

    def is_boundary_compliant(self, tol: float = BOUNDARY_TOL) -> bool:
        return abs(self.samples[0]) <= tol and abs(self.samples[-1]) <= tol

    @classmethod
    def from_function(
        cls, g: Callable[[np.ndarray], np.ndarray], N: int = DEFAULT_RESOLUTION
    ) -> GridFunction:
        x = np.linspace(0.0, 1.0, N + 1)
        samples = np.asarray(g(x), dtype=float)
        # sin(k pi x) at x = 1 is only zero up to roundoff
        samples[0] = 0.0 if abs(samples[0]) <= BOUNDARY_TOL else samples[0]
        samples[-1] = 0.0 if abs(samples[-1]) <= BOUNDARY_TOL else samples[-1]
        return cls(samples)


def eigenvalue(k: int | np.ndarray) -> float | np.ndarray:
    """Dirichlet eigenvalue :math:`\\lambda_k = (k \\pi)^2`."""
    if np.any(np.asarray(k) < 1):
        raise ValueError(f"modes are 1-based: got {k}")
    return (k * math.pi) ** 2


def _dst(interior: np.ndarray, K: int) -> np.ndarray:
    # type I: y_k = 2 sum_j x_j sin(pi (j + 1) (k + 1) / N) over the N - 1 interior nodes
    N = interior.shape[-1] + 1
    if K > N - 1:
        raise SineBasisError(f"at most N - 1 = {N - 1} modes from {N + 1} samples: got K={K}")
    return fft.dst(interior, type=1, axis=-1)[..., :K] / N


def analyze(g: GridFunction, K: int = DEFAULT_MODES) -> SineSeries:
    """Sine coefficients of grid data by a type-I discrete sine transform.

    The transform is exact for band-limited data with fewer than *N* modes.

    Raises
    ------
    SineBasisError
        If ``N < 4 K`` or the endpoint samples are not zero.
    """
    if K < 1:
        raise SineBasisError(f"K must be positive: got {K}")
    if g.N < 4 * K:
        raise SineBasisError(f"resolution N={g.N} is below 4 K = {4 * K}")
    if not g.is_boundary_compliant():
        raise SineBasisError(
            f"endpoint samples must vanish: got {g.samples[0]:.3e}, {g.samples[-1]:.3e}"
        )

    coeffs = _dst(g.samples[1:-1], K)
    return SineSeries(coeffs)


def analyze_samples(samples: np.ndarray, K: int) -> np.ndarray:
    """Row-wise sine transform of ``(..., N + 1)`` grid samples.

    Lower-level than :func:`analyze`: no boundary or resolution checks, used
    for time-dependent data such as forcing terms.
    """
    samples = np.asarray(samples, dtype=float)
    return _dst(samples[..., 1:-1], K)


def synthesize(s: SineSeries, xs: float | Sequence[float] | np.ndarray) -> np.ndarray:
    """Evaluate the partial sum :math:`\\sum_k s_k \\sin(k \\pi x)`."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise SineBasisError("evaluation points must lie in [0, 1]")

    k = np.arange(1, s.K + 1)
    return np.sin(np.pi * np.multiply.outer(xs, k)) @ s.coeffs


# {{{ csv io


def read_grid_csv(path: str | os.PathLike[str]) -> GridFunction:
    """Read a two-column ``x,value`` file on a uniform grid over [0, 1]."""
    with open(path, newline="") as infile:
        reader = csv.reader(infile)
        header = next(reader)
        if [h.strip() for h in header] != ["x", "value"]:
            raise SineBasisError(f"expected header 'x,value' in {path}: got {header}")
        rows = [(float(x), float(v)) for x, v in reader]

    data = np.array(rows)
    x = data[:, 0]
    if not np.allclose(x, np.linspace(0.0, 1.0, x.size), atol=1.0e-12):
        raise SineBasisError(f"'{path}' is not sampled on a uniform grid over [0, 1]")

    return GridFunction(data[:, 1])


def write_grid_csv(path: str | os.PathLike[str], g: GridFunction) -> None:
    with open(path, "w", newline="") as outfile:
        outfile.write("x,value\n")
        for x, v in zip(g.x, g.samples):
            outfile.write(f"{x:.17g},{v:.17g}\n")


# }}}
