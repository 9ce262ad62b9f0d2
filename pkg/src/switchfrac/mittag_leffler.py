"""Two-parameter Mittag-Leffler function on the non-positive real axis.

.. math::

    E_{a, b}(z) = \\sum_{n = 0}^\\infty \\frac{z^n}{\\Gamma(a n + b)}

Three evaluation routes are used, selected by the size of :math:`|z|` and by
the error estimate each route reports:

* ``series``: the defining power series, summed in log-space so that
  :math:`\\Gamma` never overflows. Accepted only when the cancellation error
  (largest term times the unit roundoff) stays below the tolerance.
* ``asymptotic``: the algebraic expansion
  :math:`-\\sum_{n \\ge 1} z^{-n} / \\Gamma(b - a n)`, plus the pole residues
  :math:`a^{-1} \\sum_j s_j^{1 - b} e^{s_j}` when :math:`a > 1`.
* ``contour``: numerical inversion of the Laplace transform
  :math:`s^{a - b} / (s^a - z)` on an optimally chosen parabolic contour
  (Garrappa, SIAM J. Numer. Anal. 53, 2015).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln

DEFAULT_TOL = 1.0e-12
MIN_TOL = 1.0e-14
MAX_TOL = 1.0e-6

#: below this radius the power series is tried first
SERIES_RADIUS = 5.0
#: beyond this radius the asymptotic expansion is tried first
ASYMPTOTIC_RADIUS = 50.0

_EPS = np.finfo(float).eps
_LOG_EPS = math.log(_EPS)
_LOG_MAX = math.log(np.finfo(float).max) - 1.0
_CONTOUR_MIN_ABS_Z = 1.0e-16

Method = Literal["series", "asymptotic", "contour"]


class MittagLefflerDomainError(ValueError):
    """Raised for parameters outside ``0 < a <= 2`` and ``z <= 0``."""


class MittagLefflerAccuracyError(ArithmeticError):
    """Raised when no evaluation route reaches the requested tolerance."""

    def __init__(self, a: float, b: float, z: float, tol: float, best: float) -> None:
        super().__init__(
            f"E_{{{a}, {b}}}({z}) could not be evaluated to tol={tol:.1e} "
            f"(best error estimate {best:.3e})"
        )
        self.a = a
        self.b = b
        self.z = z
        self.tol = tol
        self.best = best


@dataclass(frozen=True)
class MLQuery:
    a: float
    b: float
    z: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.a <= 2.0):
            raise MittagLefflerDomainError(f"order a must be in (0, 2]: got {self.a}")
        if not np.isfinite(self.b):
            raise MittagLefflerDomainError(f"parameter b must be finite: got {self.b}")
        if not self.z <= 0.0:
            raise MittagLefflerDomainError(f"argument z must be <= 0: got {self.z}")

    def evaluate(self, tol: float = DEFAULT_TOL) -> MLResult:
        return ml_eval(self.a, self.b, self.z, tol)


@dataclass(frozen=True)
class MLResult:
    value: float
    abs_error_estimate: float
    method_used: Method


# {{{ gamma helpers


def log_abs_rgamma(x: float) -> tuple[float, float]:
    """Return ``(log|1/Gamma(x)|, sign(1/Gamma(x)))``.

    At the poles of :math:`\\Gamma` the reciprocal vanishes and ``(-inf, 0)``
    is returned. Negative arguments go through the reflection formula.
    """
    if x > 0.0:
        return -float(gammaln(x)), 1.0

    if x == math.floor(x):
        return -math.inf, 0.0

    # 1 / Gamma(x) = Gamma(1 - x) sin(pi x) / pi
    s = math.sin(math.pi * x)
    return float(gammaln(1.0 - x)) + math.log(abs(s)) - math.log(math.pi), math.copysign(
        1.0, s
    )


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, zero at the poles."""
    logr, sign = log_abs_rgamma(x)
    return sign * math.exp(logr) if sign != 0.0 else 0.0


# }}}


# {{{ series


def _ml_series(a: float, b: float, z: float, tol: float) -> MLResult:
    if z == 0.0:
        return MLResult(rgamma(b), 0.0, "series")

    logz = math.log(-z)
    total = 0.0
    abs_total = 0.0
    max_term = 0.0

    n = 0
    while True:
        logr, sign = log_abs_rgamma(a * n + b)
        if n * logz + logr > math.log(tol) - _LOG_EPS:
            # cancellation alone would exceed tol
            return MLResult(math.nan, math.inf, "series")
        if sign != 0.0:
            term = (-1.0) ** n * sign * math.exp(n * logz + logr)
            total += term
            abs_total += abs(term)
            max_term = max(max_term, abs(term))
        else:
            term = 0.0

        # terms decrease monotonically once a n + b is past the Gamma minimum
        # and the ratio |z| Gamma(a n + b) / Gamma(a (n + 1) + b) is below 1
        if a * n + b > 2.0 and n * logz + logr < math.log(tol) - 40.0:
            break
        if a * n + b > 2.0 and abs(term) <= _EPS * 1.0e-3 * max(abs(total), 1.0e-300):
            break

        n += 1
        if n > 100_000:
            break

    err = 4.0 * _EPS * abs_total + 2.0 * _EPS * (n + 1) * max_term
    return MLResult(total, err, "series")


# }}}


# {{{ asymptotic


def _pole_residues(a: float, b: float, z: float) -> complex:
    # poles of s^{a - b} / (s^a - z) on the principal sheet |arg s| < pi
    r = (-z) ** (1.0 / a)
    theta = math.pi
    kmin = math.ceil(-a / 2.0 - theta / (2.0 * math.pi))
    kmax = math.floor(a / 2.0 - theta / (2.0 * math.pi))

    result = 0.0 + 0.0j
    for k in range(kmin, kmax + 1):
        arg = (theta + 2.0 * k * math.pi) / a
        if abs(arg) >= math.pi:
            continue
        s = r * complex(math.cos(arg), math.sin(arg))
        result += s ** (1.0 - b) * np.exp(s)

    return result / a


def _ml_asymptotic(a: float, b: float, z: float, tol: float) -> MLResult:
    logz = math.log(-z)

    total = 0.0
    err = math.inf
    prev_envelope = math.inf
    for n in range(1, 2000):
        x = b - a * n
        # |1/Gamma(x)| without the sin(pi x) factor, so near-poles do not
        # masquerade as convergence
        log_envelope = -n * logz + (
            -float(gammaln(x)) if x > 0.0 else float(gammaln(1.0 - x)) - math.log(math.pi)
        )
        if log_envelope > prev_envelope and n > 2:
            # the expansion has started to diverge
            err = math.exp(min(prev_envelope, _LOG_MAX))
            break
        if log_envelope > _LOG_MAX:
            # |z| far too small for the expansion
            return MLResult(math.nan, math.inf, "asymptotic")
        prev_envelope = log_envelope

        logr, sign = log_abs_rgamma(x)
        if sign != 0.0:
            # -z^{-n} / Gamma(b - a n) with z < 0 gives (-1)^{n + 1} |z|^{-n}
            total += (-1.0) ** (n + 1) * sign * math.exp(-n * logz + logr)

        if log_envelope < math.log(tol) - 10.0:
            err = math.exp(log_envelope)
            break

    if a > 1.0:
        residues = _pole_residues(a, b, z)
        total += residues.real
        # phase error of exp(s) grows with |s|
        err += 4.0 * _EPS * (-z) ** (1.0 / a) * abs(residues)
    elif a == 1.0:
        # exponentially small e^z term on the branch cut
        err += math.exp(z + abs(1.0 - b) * logz)

    err += 4.0 * _EPS * abs(total)
    return MLResult(total, err, "asymptotic")


# }}}


# {{{ contour


def _optimal_param_rb(
    t: float,
    phi_j: float,
    phi_j1: float,
    pj: float,
    qj: float,
    log_epsilon: float,
) -> tuple[float, float, float]:
    # parameters of a parabolic contour in the region between two singularities
    fac = 1.01
    f_max = math.exp(log_epsilon - _LOG_EPS)

    sq_phi_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt((log_epsilon - _LOG_EPS) / t)
    sq_phi_j1 = min(math.sqrt(phi_j1), threshold - sq_phi_j)

    f_bar = 1.0
    if pj < 1.0e-14 and qj < 1.0e-14:
        sq_phibar_j = sq_phi_j
        sq_phibar_j1 = sq_phi_j1
        admissible = True
    elif pj < 1.0e-14:
        sq_phibar_j = sq_phi_j
        if sq_phi_j > 0.0:
            f_min = fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)) ** qj
        else:
            f_min = fac
        admissible = f_min < f_max
        if admissible:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fq = f_bar ** (-1.0 / qj)
            sq_phibar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq)
    elif qj < 1.0e-14:
        sq_phibar_j1 = sq_phi_j1
        f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)) ** pj
        admissible = f_min < f_max
        if admissible:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            sq_phibar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp)
    else:
        f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j) ** max(pj, qj)
        admissible = f_min < f_max
        if admissible:
            f_min = max(f_min, 1.5)
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            fq = f_bar ** (-1.0 / qj)
            w = -phi_j1 * t / log_epsilon
            den = 2.0 + w - (1.0 + w) * fp + fq
            sq_phibar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den
            sq_phibar_j1 = (
                -(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1
            ) / den

    if not admissible:
        return 0.0, 0.0, math.inf

    log_epsilon = log_epsilon - math.log(f_bar)
    w = -(sq_phibar_j1**2) * t / log_epsilon
    mu = (((1.0 + w) * sq_phibar_j + sq_phibar_j1) / (2.0 + w)) ** 2
    h = (
        -2.0
        * math.pi
        / log_epsilon
        * (sq_phibar_j1 - sq_phibar_j)
        / ((1.0 + w) * sq_phibar_j + sq_phibar_j1)
    )
    n = math.ceil(math.sqrt(1.0 - log_epsilon / t / mu) / h)
    return mu, h, n


def _optimal_param_ru(
    t: float, phi_j: float, pj: float, log_epsilon: float
) -> tuple[float, float, float]:
    # parameters of a parabolic contour in the unbounded right-most region
    sq_phi_j = math.sqrt(phi_j)
    phibar_j = phi_j * 1.01 if phi_j > 0.0 else 0.01
    sq_phibar_j = math.sqrt(phibar_j)

    f_min, f_max, f_tar = 1.0, 10.0, 5.0
    for _ in range(100):
        phi_t = phibar_j * t
        log_eps_phi_t = log_epsilon / phi_t
        n = math.ceil(
            phi_t / math.pi * (1.0 - 1.5 * log_eps_phi_t + math.sqrt(1.0 - 2.0 * log_eps_phi_t))
        )
        big_a = math.pi * n / phi_t
        sq_mu = sq_phibar_j * abs(4.0 - big_a) / abs(7.0 - math.sqrt(1.0 + 12.0 * big_a))
        fbar = ((sq_phibar_j - sq_phi_j) / sq_mu) ** (-pj)
        if pj < 1.0e-14 or f_min < fbar < f_max:
            break
        sq_phibar_j = f_tar ** (-1.0 / pj) * sq_mu + sq_phi_j
        phibar_j = sq_phibar_j**2

    mu = sq_mu**2
    h = (-3.0 * big_a - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * big_a)) / (4.0 - big_a) / n

    threshold = (log_epsilon - _LOG_EPS) / t
    if mu > threshold:
        q = 0.0 if abs(pj) < 1.0e-14 else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phibar_j = (q + math.sqrt(phi_j)) ** 2
        if phibar_j < threshold:
            w = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon))
            u = math.sqrt(-phibar_j * t / _LOG_EPS)
            mu = threshold
            n = math.ceil(w * log_epsilon / 2.0 / math.pi / (u * w - 1.0))
            h = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon)) / n
        else:
            n = math.inf
            h = 0.0

    return mu, h, n


def _ml_contour(a: float, b: float, z: float, tol: float) -> MLResult:
    if -z < _CONTOUR_MIN_ABS_Z:
        # the poles merge with the branch point and the contour parameters
        # degenerate; two series terms are exact here anyway
        return MLResult(math.nan, math.inf, "contour")

    t = 1.0
    log_epsilon = math.log(1.0e-15)

    # singularities of the Laplace transform: the origin and the poles
    r = abs(z) ** (1.0 / a)
    theta = math.pi
    kmin = math.ceil(-a / 2.0 - theta / (2.0 * math.pi))
    kmax = math.floor(a / 2.0 - theta / (2.0 * math.pi))
    poles = [
        r * complex(math.cos((theta + 2 * k * math.pi) / a), math.sin((theta + 2 * k * math.pi) / a))
        for k in range(kmin, kmax + 1)
    ]
    phis = [(s.real + abs(s)) / 2.0 for s in poles]
    order = np.argsort(phis, kind="stable")
    poles = [poles[i] for i in order if phis[i] > 1.0e-15]
    phis = [phis[i] for i in order if phis[i] > 1.0e-15]

    s_star = [0.0j, *poles]
    phi_star = [0.0, *phis, math.inf]
    nsing = len(s_star)

    p = [max(0.0, -2.0 * (a - b + 1.0))] + [1.0] * (nsing - 1)
    q = [1.0] * (nsing - 1) + [math.inf]

    admissible = [
        j
        for j in range(nsing)
        if phi_star[j] < (log_epsilon - _LOG_EPS) / t and phi_star[j] < phi_star[j + 1]
    ]

    while True:
        params = {}
        for j in admissible:
            if j < nsing - 1:
                params[j] = _optimal_param_rb(
                    t, phi_star[j], phi_star[j + 1], p[j], q[j], log_epsilon
                )
            else:
                params[j] = _optimal_param_ru(t, phi_star[j], p[j], log_epsilon)

        jbest = min(params, key=lambda j: params[j][2])
        if params[jbest][2] <= 200 or log_epsilon > math.log(1.0e-6):
            break
        log_epsilon += math.log(10.0)

    mu, h, n = params[jbest]
    if not np.isfinite(n):
        return MLResult(math.nan, math.inf, "contour")

    k = np.arange(-n, n + 1)
    u = h * k
    s = mu * (1j * u + 1.0) ** 2
    ds = -2.0 * mu * u + 2.0j * mu
    integrand = np.exp(s * t) * s ** (a - b) / (s**a - z) * ds
    integral = h * np.sum(integrand) / (2.0j * math.pi)

    residues = 0.0j
    for sj in s_star[jbest + 1 :]:
        residues += sj ** (1.0 - b) * np.exp(t * sj)
    residues /= a

    value = (integral + residues).real
    roundoff = h * float(np.sum(np.abs(integrand))) / (2.0 * math.pi) * _EPS
    err = math.exp(log_epsilon) * max(1.0, abs(value)) + 10.0 * roundoff
    return MLResult(value, err, "contour")


# }}}


# {{{ public interface


def ml_eval(
    a: float,
    b: float,
    z: float,
    tol: float = DEFAULT_TOL,
    *,
    series_radius: float = SERIES_RADIUS,
    asymptotic_radius: float = ASYMPTOTIC_RADIUS,
) -> MLResult:
    """Evaluate :math:`E_{a, b}(z)` for ``0 < a <= 2`` and ``z <= 0``.

    Parameters
    ----------
    a, b
        Mittag-Leffler parameters.
    z
        Non-positive real argument.
    tol
        Accuracy target in ``[1e-14, 1e-6]``, absolute for ``|E| <= 1`` and
        relative beyond that (double precision cannot do better).
    series_radius, asymptotic_radius
        Regime boundaries; the contour inversion covers the gap between them
        and any case where the preferred route misses the tolerance.

    Raises
    ------
    MittagLefflerDomainError
        If the parameters fall outside the supported domain.
    MittagLefflerAccuracyError
        If no route reaches *tol*.
    """
    q = MLQuery(float(a), float(b), float(z))
    if not MIN_TOL <= tol <= MAX_TOL:
        raise ValueError(f"tol must be in [{MIN_TOL:g}, {MAX_TOL:g}]: got {tol:g}")

    a, b, z = q.a, q.b, q.z
    if z == 0.0:
        return MLResult(rgamma(b), 0.0, "series")

    routes = []
    if -z <= series_radius:
        routes.append(_ml_series)
    if -z >= asymptotic_radius:
        routes.append(_ml_asymptotic)
    routes.append(_ml_contour)

    best = math.inf
    for route in routes:
        result = route(a, b, z, tol)
        if np.isfinite(result.value) and result.abs_error_estimate <= tol * max(
            1.0, abs(result.value)
        ):
            return result
        best = min(best, result.abs_error_estimate)

    raise MittagLefflerAccuracyError(a, b, z, tol, best)


def mittag_leffler(
    a: float, b: float, z: float | np.ndarray, tol: float = DEFAULT_TOL
) -> float | np.ndarray:
    """Value-only, array-friendly wrapper around :func:`ml_eval`."""
    if np.ndim(z) == 0:
        return ml_eval(a, b, float(z), tol).value

    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    for i, zi in np.ndenumerate(z):
        out[i] = ml_eval(a, b, float(zi), tol).value

    return out


def ml_decay_margin(a: float, b: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Return :math:`|E_{a, b}(z)| (1 + |z|)`.

    The quantity stays bounded on :math:`z \\le 0` for :math:`0 < a < 2`,
    which is the decay envelope used in the convergence estimates.
    """
    result = ml_eval(a, b, z, tol)
    return abs(result.value) * (1.0 + abs(z))


# }}}
