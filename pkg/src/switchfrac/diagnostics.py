"""Structural truncation tails of the mode series.

The uniform-convergence estimates bound every mode by
:math:`c / (1 + |z|)`-type envelopes whose constants are never fixed. The
tails below drop those constants, so they are relative indicators of how
fast a truncated series settles, not certified error bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable, Sequence, Union

import numpy as np

from switchfrac.forward import Forcing, ProblemConfig
from switchfrac.quadrature import TimeSamples

#: summation cap for tails given as a function of k
DEFAULT_K_MAX = 100_000
#: a tail has plateaued after this many consecutive negligible terms
PLATEAU_RUN = 100
PLATEAU_TOL = 1.0e-15

#: per-mode magnitudes: an explicit array for k = 1, 2, ... or a model k -> value
TailModel = Union[Sequence[float], np.ndarray, Callable[[np.ndarray], np.ndarray]]


class TailCapWarning(RuntimeWarning):
    """The tail was still growing when the summation cap was reached."""


def _magnitudes(model: TailModel, k_max: int) -> np.ndarray:
    if callable(model):
        k = np.arange(1, k_max + 1, dtype=float)
        return np.abs(np.asarray(model(k), dtype=float))
    return np.abs(np.asarray(model, dtype=float)).reshape(-1)


def _tail(terms: np.ndarray, K: int, warn_cap: bool, name: str) -> float:
    tail = terms[K:]
    if tail.size == 0:
        return 0.0

    small = tail < PLATEAU_TOL
    if tail.size >= PLATEAU_RUN:
        # first index starting a run of PLATEAU_RUN negligible terms
        run = np.convolve(small.astype(int), np.ones(PLATEAU_RUN, dtype=int), "valid")
        hits = np.flatnonzero(run == PLATEAU_RUN)
        if hits.size:
            return float(np.sum(tail[: hits[0]]))

    if warn_cap and not np.all(small[-min(PLATEAU_RUN, small.size) :]):
        warnings.warn(
            f"{name}: tail has not plateaued at K_max={terms.size}",
            TailCapWarning,
            stacklevel=3,
        )

    return float(np.sum(tail))


def lemma1_tail(
    f_modes: TailModel, config: ProblemConfig, K: int, K_max: int = DEFAULT_K_MAX
) -> float:
    """Diffusion-side forcing tail
    :math:`\\beta^{-1} \\sum_{k > K} M_k \\ln(1 + k^2 \\pi^2 (b - a)^\\beta)`."""
    m = _magnitudes(f_modes, K_max)
    k = np.arange(1, m.size + 1, dtype=float)
    terms = m * np.log1p(k**2 * math.pi**2 * (config.b - config.a) ** config.beta)
    return _tail(terms, K, callable(f_modes), "lemma1_tail") / config.beta


def lemma2_tail(psi: TailModel, K: int, K_max: int = DEFAULT_K_MAX) -> float:
    """Snapshot-data tail :math:`\\sum_{k > K} k^2 \\pi^2 |\\psi_k|`."""
    m = _magnitudes(psi, K_max)
    k = np.arange(1, m.size + 1, dtype=float)
    return _tail(k**2 * math.pi**2 * m, K, callable(psi), "lemma2_tail")


def lemma3_peak(alpha: float, lam: float) -> tuple[float, float]:
    """Maximizer and maximum of :math:`g(t) = \\lambda t / (1 + \\lambda t^\\alpha)`.

    .. math::

        t_{max} = ((\\alpha - 1) \\lambda)^{-1/\\alpha}, \\qquad
        g(t_{max}) = \\frac{(\\alpha - 1)^{1 - 1/\\alpha}}{\\alpha}
            \\lambda^{1 - 1/\\alpha}
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must be in (1, 2): got {alpha}")
    if not lam > 0.0:
        raise ValueError(f"lambda must be positive: got {lam}")

    t_max = (1.0 / ((alpha - 1.0) * lam)) ** (1.0 / alpha)
    g_max = (alpha - 1.0) ** (1.0 - 1.0 / alpha) / alpha * lam ** (1.0 - 1.0 / alpha)
    return t_max, g_max


def lemma4_tail(
    f_modes: TailModel,
    alpha: float,
    K: int,
    horizon: float,
    K_max: int = DEFAULT_K_MAX,
) -> float:
    """Wave-side forcing tail
    :math:`\\alpha^{-1} \\sum_{k > K} M_k \\ln(1 + \\lambda_k T^\\alpha)`.

    This is the slowest of the three wave-side series, so it bounds the
    other two structurally.
    """
    m = _magnitudes(f_modes, K_max)
    k = np.arange(1, m.size + 1, dtype=float)
    terms = m * np.log1p(k**2 * math.pi**2 * horizon**alpha)
    return _tail(terms, K, callable(f_modes), "lemma4_tail") / alpha


def forcing_sup_norms(
    forcing: Forcing, K: int, t_end: float, n_t: int = 257
) -> np.ndarray:
    """:math:`M_k = \\sup_t |f_k(t)|` on a uniform grid, for k = 1..K."""
    t = np.linspace(0.0, t_end, n_t)
    out = np.zeros(K)
    for k, fk in forcing.modes.items():
        if k > K:
            continue
        if isinstance(fk, TimeSamples):
            values = np.concatenate([fk.values, fk(t)])
        else:
            values = np.asarray(fk(t), dtype=float)
        out[k - 1] = float(np.max(np.abs(values)))
    return out


@dataclass(frozen=True)
class TruncationReport:
    K_used: int
    lemma1_tail: float
    lemma2_tail: float
    lemma3_peak_values: list[float]
    lemma4_tail: float
    M_k_estimates: list[float]

    def to_dict(self) -> dict:
        return asdict(self)


def truncation_report(
    config: ProblemConfig,
    psi: Sequence[float] | np.ndarray,
    forcing: Forcing | None = None,
    K_used: int | None = None,
) -> TruncationReport:
    """Tails beyond *K_used* computed from the data actually available.

    Coefficients exist only up to ``config.K``; with the default
    ``K_used = K // 2`` the report measures how much the upper half of the
    available modes still contributes.
    """
    K = config.K
    K_used = max(K // 2, 1) if K_used is None else K_used
    M = forcing_sup_norms(forcing or Forcing.zero(), K, config.b)
    lam = (np.arange(1, K + 1) * math.pi) ** 2

    return TruncationReport(
        K_used=K_used,
        lemma1_tail=lemma1_tail(M, config, K_used),
        lemma2_tail=lemma2_tail(np.asarray(psi, dtype=float), K_used),
        lemma3_peak_values=[lemma3_peak(config.alpha, float(v))[1] for v in lam],
        lemma4_tail=lemma4_tail(M, config.alpha, K_used, config.b),
        M_k_estimates=[float(v) for v in M],
    )
