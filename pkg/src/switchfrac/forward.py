"""Mode solutions and the direct problem for the time-switched equation.

.. math::

    H(a - t) \\, {}^C D^\\alpha_{0t} u + H(t - a) \\, {}^C D^\\beta_{at} u
        - u_{xx} = f, \\qquad 1 < \\alpha < 2, \\quad 0 < \\beta < 1,

on :math:`(0, b) \\times (0, 1)` with homogeneous Dirichlet conditions. In the
sine basis every mode :math:`u_k(t)` solves a wave-type Cauchy problem on
:math:`[0, a]` and a diffusion-type Cauchy problem on :math:`[a, b]`:

.. math::

    u_k(t) = \\begin{cases}
        \\varphi_k E_{\\alpha,1}(-\\lambda_k t^\\alpha)
            + B_k t E_{\\alpha,2}(-\\lambda_k t^\\alpha)
            + (\\mathcal{K}_{\\alpha,\\alpha} * f_k)(t), & t \\le a, \\\\
        C_k E_{\\beta,1}(-\\lambda_k (t - a)^\\beta)
            + (\\mathcal{K}_{\\beta,\\beta} * f_k)(t), & t > a,
    \\end{cases}

with :math:`\\mathcal{K}_{\\gamma,\\delta}(s) = s^{\\delta - 1}
E_{\\gamma,\\delta}(-\\lambda_k s^\\gamma)`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from switchfrac.mittag_leffler import DEFAULT_TOL as ML_TOL
from switchfrac.mittag_leffler import ml_eval
from switchfrac.quadrature import (
    DEFAULT_NODES_PER_UNIT_TIME,
    DEFAULT_TOL as QUAD_TOL,
    ConvolutionSpec,
    ModeForcing,
    TimeSamples,
    conv_integral,
)
from switchfrac.sine_basis import (
    DEFAULT_RESOLUTION,
    SineSeries,
    analyze_samples,
    eigenvalue,
)

#: number of uniform time nodes used for emitted solutions
DEFAULT_TIME_NODES = 401


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemConfig:
    """Fractional orders, switch time *a*, horizon *b*, snapshot *xi*, modes *K*."""

    alpha: float
    beta: float
    a: float
    b: float
    xi: float
    K: int = 64

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha < 2.0:
            raise ConfigError(f"alpha must be in (1, 2): got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError(f"beta must be in (0, 1): got {self.beta}")
        if not 0.0 < self.a < self.xi < self.b:
            raise ConfigError(
                f"need 0 < a < xi < b: got a={self.a}, xi={self.xi}, b={self.b}"
            )
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError(f"K must be a positive integer: got {self.K}")

    def with_modes(self, K: int) -> ProblemConfig:
        return replace(self, K=K)

    def time_grid(self, n: int = DEFAULT_TIME_NODES) -> np.ndarray:
        """Uniform grid on [0, b] that always contains 0, a, xi and b."""
        return np.union1d(np.linspace(0.0, self.b, n), [0.0, self.a, self.xi, self.b])


# {{{ forcing


@dataclass(frozen=True)
class Forcing:
    """Sine coefficients :math:`f_k(t)` of the source, stored per mode.

    Missing modes are identically zero, which lets the solvers skip their
    convolution integrals entirely.
    """

    modes: Mapping[int, ModeForcing] = field(default_factory=dict)

    def __post_init__(self) -> None:
        modes = {int(k): v for k, v in self.modes.items() if v is not None}
        if any(k < 1 for k in modes):
            raise ValueError("forcing modes are 1-based")
        object.__setattr__(self, "modes", modes)

    def mode(self, k: int) -> ModeForcing:
        return self.modes.get(k)

    def value(self, k: int, t: float) -> float:
        fk = self.modes.get(k)
        if fk is None:
            return 0.0
        if isinstance(fk, TimeSamples):
            hits = np.flatnonzero(np.isclose(fk.t, t, rtol=0.0, atol=1.0e-12))
            if hits.size == 0:
                raise ValueError(f"forcing samples for mode {k} do not contain t={t}")
            return float(fk.values[hits[0]])
        return float(np.asarray(fk(np.array([t])), dtype=float).reshape(-1)[0])

    def __bool__(self) -> bool:
        return bool(self.modes)

    def scaled(self, c: float) -> Forcing:
        def scale(fk: ModeForcing) -> ModeForcing:
            if isinstance(fk, TimeSamples):
                return TimeSamples(fk.t, c * fk.values)
            return lambda t, fk=fk: c * np.asarray(fk(t), dtype=float)

        return Forcing({k: scale(fk) for k, fk in self.modes.items()})

    @classmethod
    def zero(cls) -> Forcing:
        return cls({})

    @classmethod
    def from_function(
        cls,
        f: Callable[[np.ndarray, np.ndarray], np.ndarray],
        K: int,
        t_end: float,
        *,
        N: int = DEFAULT_RESOLUTION,
        drop_tol: float = 1.0e-13,
    ) -> Forcing:
        """Project a vectorized ``f(t, x)`` onto the first *K* sine modes.

        Each mode becomes a callable that re-projects ``f(t, .)`` on demand.
        Modes whose coefficients stay below ``drop_tol`` (relative to the
        largest) on a probe grid over ``[0, t_end]`` are dropped.
        """
        x = np.linspace(0.0, 1.0, N + 1)

        def coefficients(t: np.ndarray) -> np.ndarray:
            t = np.atleast_1d(np.asarray(t, dtype=float))
            samples = np.asarray(f(t[:, None], x[None, :]), dtype=float)
            samples = np.broadcast_to(samples, (t.size, x.size))
            return analyze_samples(samples, K)

        probe = coefficients(np.linspace(0.0, t_end, 65))
        scale = float(np.max(np.abs(probe))) if probe.size else 0.0
        keep = [
            k for k in range(1, K + 1) if np.max(np.abs(probe[:, k - 1])) > drop_tol * scale
        ]

        def mode(k: int) -> Callable[[np.ndarray], np.ndarray]:
            def fk(t: np.ndarray) -> np.ndarray:
                out = coefficients(t)[:, k - 1]
                return out if np.ndim(t) else out[0]

            return fk

        return cls({k: mode(k) for k in keep})

    def tabulated(
        self,
        t_end: float,
        *,
        nodes_per_unit_time: int = DEFAULT_NODES_PER_UNIT_TIME,
        include: Sequence[float] = (),
    ) -> Forcing:
        """Replace callables by piecewise linear samples on a uniform grid."""
        out: dict[int, ModeForcing] = {}
        for k, fk in self.modes.items():
            if isinstance(fk, TimeSamples):
                out[k] = fk
            else:
                out[k] = TimeSamples.from_function(
                    fk,
                    t_end,
                    nodes_per_unit_time=nodes_per_unit_time,
                    include=tuple(include),
                )
        return Forcing(out)


def as_forcing(f: Forcing | Mapping[int, ModeForcing] | None) -> Forcing:
    if f is None:
        return Forcing.zero()
    if isinstance(f, Forcing):
        return f
    return Forcing(f)


# }}}


# {{{ mode solutions


@dataclass(frozen=True)
class ModeCoefficients:
    """Constants of one mode together with the Mittag-Leffler guard values.

    ``h_k`` is the velocity mismatch at the switch and ``hbar_k`` the jump of
    :math:`u_k` across it; a solution normally carries only one of them.
    """

    k: int
    lambda_k: float
    phi_k: float
    C_k: float
    B_k: float
    h_k: float = 0.0
    hbar_k: float = 0.0
    guard_E_alpha2: float = math.nan
    guard_E_alpha1: float = math.nan


@dataclass(frozen=True)
class PiecewiseModeSolution:
    config: ProblemConfig
    coeffs: ModeCoefficients
    f_k: ModeForcing = None
    ml_tol: float = ML_TOL
    quad_tol: float = QUAD_TOL

    @property
    def lam(self) -> float:
        return self.coeffs.lambda_k

    def _ml(self, a: float, b: float, z: float) -> float:
        return ml_eval(a, b, z, self.ml_tol).value

    def _conv(self, lower: float, upper: float, power: float, a: float, b: float) -> float:
        if self.f_k is None or upper <= lower:
            return 0.0
        spec = ConvolutionSpec(lower, upper, power, a, b, self.lam, self.f_k)
        return conv_integral(spec, self.quad_tol)

    def wave(self, t: float) -> float:
        """:math:`u_k(t)` on the wave side :math:`0 \\le t \\le a`."""
        cfg, c = self.config, self.coeffs
        if not 0.0 <= t <= cfg.a * (1.0 + 1.0e-14):
            raise ValueError(f"wave formula needs 0 <= t <= a: got t={t}")

        al = cfg.alpha
        z = -self.lam * t**al
        value = c.phi_k * self._ml(al, 1.0, z) + c.B_k * t * self._ml(al, 2.0, z)
        return value + self._conv(0.0, t, al - 1.0, al, al)

    def wave_deriv(self, t: float) -> float:
        """:math:`u_k'(t)` on the wave side :math:`0 \\le t \\le a`."""
        cfg, c = self.config, self.coeffs
        if not 0.0 <= t <= cfg.a * (1.0 + 1.0e-14):
            raise ValueError(f"wave derivative needs 0 <= t <= a: got t={t}")
        if t == 0.0:
            return c.B_k

        al = cfg.alpha
        z = -self.lam * t**al
        value = (
            -self.lam * c.phi_k * t ** (al - 1.0) * self._ml(al, al, z)
            + c.B_k * self._ml(al, 1.0, z)
        )
        return value + self._conv(0.0, t, al - 2.0, al, al - 1.0)

    def diffusion(self, t: float) -> float:
        """:math:`u_k(t)` on the diffusion side :math:`a \\le t \\le b`."""
        cfg, c = self.config, self.coeffs
        if not cfg.a <= t <= cfg.b * (1.0 + 1.0e-14):
            raise ValueError(f"diffusion formula needs a <= t <= b: got t={t}")

        be = cfg.beta
        value = c.C_k * self._ml(be, 1.0, -self.lam * (t - cfg.a) ** be)
        return value + self._conv(cfg.a, t, be - 1.0, be, be)

    def __call__(self, t: float) -> float:
        # t = a belongs to the closed wave interval
        return self.wave(t) if t <= self.config.a else self.diffusion(t)

    def evaluate(self, ts: Sequence[float] | np.ndarray) -> np.ndarray:
        return np.array([self(float(t)) for t in np.asarray(ts, dtype=float).reshape(-1)])


def mode_u_wave(sol: PiecewiseModeSolution, t: float) -> float:
    return sol.wave(t)


def mode_u_diffusion(sol: PiecewiseModeSolution, t: float) -> float:
    return sol.diffusion(t)


def mode_u_wave_deriv(sol: PiecewiseModeSolution, t: float) -> float:
    return sol.wave_deriv(t)


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated series :math:`u(t, x) = \\sum_k u_k(t) \\sin(k \\pi x)`."""

    config: ProblemConfig
    modes: tuple[PiecewiseModeSolution, ...]

    @property
    def coefficients(self) -> list[ModeCoefficients]:
        return [m.coeffs for m in self.modes]

    def mode_values(self, ts: Sequence[float] | np.ndarray) -> np.ndarray:
        """Matrix ``(len(ts), K)`` of mode amplitudes :math:`u_k(t_i)`."""
        ts = np.asarray(ts, dtype=float).reshape(-1)
        out = np.zeros((ts.size, self.config.K))
        for m in self.modes:
            out[:, m.coeffs.k - 1] = m.evaluate(ts)
        return out

    def evaluate(
        self, ts: Sequence[float] | np.ndarray, xs: Sequence[float] | np.ndarray
    ) -> np.ndarray:
        """Matrix ``(len(ts), len(xs))`` of :math:`u(t_i, x_j)`."""
        xs = np.asarray(xs, dtype=float).reshape(-1)
        k = np.arange(1, self.config.K + 1)
        return self.mode_values(ts) @ np.sin(np.pi * np.outer(k, xs))

    def snapshot(self, t: float, xs: Sequence[float] | np.ndarray) -> np.ndarray:
        return self.evaluate([t], xs)[0]


def make_mode_solution(
    config: ProblemConfig,
    coeffs: ModeCoefficients,
    forcing: Forcing | None = None,
    *,
    ml_tol: float = ML_TOL,
    quad_tol: float = QUAD_TOL,
) -> PiecewiseModeSolution:
    forcing = as_forcing(forcing)
    return PiecewiseModeSolution(config, coeffs, forcing.mode(coeffs.k), ml_tol, quad_tol)


def assemble_solution(
    config: ProblemConfig,
    coeffs: Sequence[ModeCoefficients],
    forcing: Forcing | None,
    ts: Sequence[float] | np.ndarray,
    xs: Sequence[float] | np.ndarray,
    **kwargs: float,
) -> np.ndarray:
    """Evaluate :math:`u(t_i, x_j)` from per-mode constants."""
    modes = tuple(make_mode_solution(config, c, forcing, **kwargs) for c in coeffs)
    return SeriesSolution(config, modes).evaluate(ts, xs)


# }}}


# {{{ direct problem


def wave_side_constants(
    config: ProblemConfig,
    k: int,
    phi_k: float,
    forcing: Forcing | None = None,
    *,
    ml_tol: float = ML_TOL,
    quad_tol: float = QUAD_TOL,
) -> dict[str, float]:
    """Mittag-Leffler values and integrals at :math:`t = a` shared by all solvers.

    Keys: ``E_alpha1``, ``E_alpha2``, ``E_alphaalpha`` evaluated at
    :math:`-\\lambda_k a^\\alpha`; ``I_position`` and ``I_velocity``, the
    :math:`(a - z)^{\\alpha - 1}` and :math:`(a - z)^{\\alpha - 2}`
    convolutions over :math:`[0, a]`; ``f_a`` the forcing at the switch.
    """
    forcing = as_forcing(forcing)
    lam = eigenvalue(k)
    al, a = config.alpha, config.a
    z = -lam * a**al

    fk = forcing.mode(k)
    if fk is None:
        i_pos = i_vel = f_a = 0.0
    else:
        i_pos = conv_integral(ConvolutionSpec(0.0, a, al - 1.0, al, al, lam, fk), quad_tol)
        i_vel = conv_integral(
            ConvolutionSpec(0.0, a, al - 2.0, al, al - 1.0, lam, fk), quad_tol
        )
        f_a = forcing.value(k, a)

    return {
        "lambda": lam,
        "E_alpha1": ml_eval(al, 1.0, z, ml_tol).value,
        "E_alpha2": ml_eval(al, 2.0, z, ml_tol).value,
        "E_alphaalpha": ml_eval(al, al, z, ml_tol).value,
        "I_position": i_pos,
        "I_velocity": i_vel,
        "f_a": f_a,
    }


@dataclass(frozen=True)
class DirectResult:
    solution: SeriesSolution
    induced_h: SineSeries
    psi: SineSeries


def solve_direct(
    config: ProblemConfig,
    phi: SineSeries,
    B: SineSeries,
    f: Forcing | Mapping[int, ModeForcing] | None = None,
    *,
    jump: SineSeries | None = None,
    ml_tol: float = ML_TOL,
    quad_tol: float = QUAD_TOL,
) -> DirectResult:
    """Solve the direct problem from the initial data :math:`(\\varphi, B)`.

    The switch constant is :math:`C_k = u_k(a^-) + \\bar h_k` (with the
    optional *jump* :math:`\\bar h`, zero by default) and the induced velocity
    mismatch is :math:`h_k = f_k(a) - \\lambda_k C_k - u_k'(a^-)`, the unique
    value making the fractional-flux transmitting condition hold. The
    snapshot coefficients :math:`\\psi_k = u_k(\\xi)` are returned as well,
    which is the data an inverse solve consumes.
    """
    forcing = as_forcing(f)
    K = config.K
    phi, B = phi.padded(K), B.padded(K)
    jump = SineSeries.zeros(K) if jump is None else jump.padded(K)

    modes = []
    h = np.zeros(K)
    psi = np.zeros(K)
    for k in range(1, K + 1):
        w = wave_side_constants(config, k, phi[k], forcing, ml_tol=ml_tol, quad_tol=quad_tol)
        lam, a, al = w["lambda"], config.a, config.alpha

        u_am = phi[k] * w["E_alpha1"] + B[k] * a * w["E_alpha2"] + w["I_position"]
        du_am = (
            -lam * phi[k] * a ** (al - 1.0) * w["E_alphaalpha"]
            + B[k] * w["E_alpha1"]
            + w["I_velocity"]
        )
        C = u_am + jump[k]
        h[k - 1] = w["f_a"] - lam * C - du_am

        coeffs = ModeCoefficients(
            k=k,
            lambda_k=lam,
            phi_k=phi[k],
            C_k=C,
            B_k=B[k],
            h_k=h[k - 1],
            hbar_k=jump[k],
            guard_E_alpha2=w["E_alpha2"],
            guard_E_alpha1=w["E_alpha1"],
        )
        mode = make_mode_solution(config, coeffs, forcing, ml_tol=ml_tol, quad_tol=quad_tol)
        psi[k - 1] = mode.diffusion(config.xi)
        modes.append(mode)

    return DirectResult(SeriesSolution(config, tuple(modes)), SineSeries(h), SineSeries(psi))


def velocity_matched_B(
    config: ProblemConfig,
    phi: SineSeries,
    jump: SineSeries,
    f: Forcing | Mapping[int, ModeForcing] | None = None,
    *,
    ml_tol: float = ML_TOL,
    quad_tol: float = QUAD_TOL,
) -> SineSeries:
    """Initial velocities for which a solve with *jump* induces no mismatch.

    Solving :math:`f_k(a) - \\lambda_k (u_k(a^-) + \\bar h_k) = u_k'(a^-)` for
    :math:`B_k` gives data consistent with the position-jump problem.
    """
    forcing = as_forcing(f)
    K = config.K
    phi, jump = phi.padded(K), jump.padded(K)

    B = np.zeros(K)
    for k in range(1, K + 1):
        w = wave_side_constants(config, k, phi[k], forcing, ml_tol=ml_tol, quad_tol=quad_tol)
        lam, a, al = w["lambda"], config.a, config.alpha
        rhs = (
            w["f_a"]
            - lam * (phi[k] * w["E_alpha1"] + w["I_position"] + jump[k])
            + lam * phi[k] * a ** (al - 1.0) * w["E_alphaalpha"]
            - w["I_velocity"]
        )
        B[k - 1] = rhs / (w["E_alpha1"] + lam * a * w["E_alpha2"])

    return SineSeries(B)


# }}}


# {{{ residuals


def continuity_residuals(solution: SeriesSolution) -> np.ndarray:
    """Per-mode :math:`|u_k(a^+) - u_k(a^-) - \\bar h_k|`."""
    a = solution.config.a
    return np.array(
        [abs(m.diffusion(a) - m.wave(a) - m.coeffs.hbar_k) for m in solution.modes]
    )


def velocity_residuals(solution: SeriesSolution, forcing: Forcing | None = None) -> np.ndarray:
    """Per-mode :math:`|f_k(a) - \\lambda_k u_k(a^+) - u_k'(a^-) - h_k|`.

    Uses the limit of the diffusion-side Caputo derivative at the switch,
    :math:`f_k(a) - \\lambda_k u_k(a^+)`.
    """
    forcing = as_forcing(forcing)
    a = solution.config.a
    out = []
    for m in solution.modes:
        k = m.coeffs.k
        flux = forcing.value(k, a) - m.lam * m.diffusion(a)
        out.append(abs(flux - m.wave_deriv(a) - m.coeffs.h_k))
    return np.array(out)


# }}}
