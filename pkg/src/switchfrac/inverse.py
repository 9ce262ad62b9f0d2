"""Recovery of the unknown interface function from the snapshot at ``t = xi``.

Both problems share the snapshot condition :math:`u(\\xi, x) = \\psi(x)`,
which fixes :math:`C_k = u_k(a^+)` mode by mode. They differ in which
transmitting condition carries the unknown:

* velocity mismatch (``solve_problem1``): :math:`u` is continuous at
  :math:`t = a` and
  :math:`\\lim_{t \\to a^+} {}^C D^\\beta_{at} u = u_t(a^-) + h`;
  :math:`B_k` follows from continuity and :math:`h_k` from the flux relation.
* position jump (``solve_problem2``): the flux relation holds without
  mismatch and :math:`u(a^+) = u(a^-) + \\bar h`; :math:`B_k` follows from
  the flux relation and :math:`\\bar h_k` from the jump.

Each recovery divides by a Mittag-Leffler value at
:math:`-\\lambda_k a^\\alpha` (:math:`E_{\\alpha,2}` resp.
:math:`E_{\\alpha,1}`) that may vanish for some modes once
:math:`\\alpha > 4/3`; these are checked against a scaled threshold.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from switchfrac.diagnostics import truncation_report
from switchfrac.forward import (
    Forcing,
    ModeCoefficients,
    ProblemConfig,
    SeriesSolution,
    as_forcing,
    continuity_residuals,
    make_mode_solution,
    velocity_residuals,
    wave_side_constants,
)
from switchfrac.mittag_leffler import DEFAULT_TOL as ML_TOL
from switchfrac.mittag_leffler import ml_eval
from switchfrac.quadrature import DEFAULT_TOL as QUAD_TOL
from switchfrac.quadrature import ConvolutionSpec, conv_integral
from switchfrac.sine_basis import (
    BOUNDARY_TOL,
    GridFunction,
    SineSeries,
    analyze,
    eigenvalue,
    synthesize,
)

logger = logging.getLogger(__name__)

#: relative size below which a guard denominator counts as zero
GUARD_SCALE = 1.0e-10


class NearZeroDenominator(ArithmeticError):
    """A Mittag-Leffler denominator is numerically zero for mode *k*."""

    def __init__(self, k: int, alpha: float, name: str, value: float, threshold: float):
        super().__init__(
            f"mode {k}: {name} = {value:.3e} is below the guard threshold "
            f"{threshold:.3e} (alpha={alpha})"
        )
        self.k = k
        self.alpha = alpha
        self.name = name
        self.value = value
        self.threshold = threshold


class BoundaryConditionError(ValueError):
    pass


def guard_threshold(lam: float, a: float, order: float, scale: float = GUARD_SCALE) -> float:
    """Threshold relative to the :math:`c / (1 + |z|)` decay envelope."""
    return scale / (1.0 + lam * a**order)


def _check_guard(
    k: int, alpha: float, name: str, value: float, threshold: float
) -> None:
    if not abs(value) > threshold:
        raise NearZeroDenominator(k, alpha, name, value, threshold)


@dataclass(frozen=True)
class InverseInput:
    """Data :math:`(\\varphi, \\psi, f)` of an interface-recovery problem."""

    config: ProblemConfig
    phi: SineSeries
    psi: SineSeries
    forcing: Forcing = field(default_factory=Forcing.zero)
    guard_scale: float = GUARD_SCALE
    ml_tol: float = ML_TOL
    quad_tol: float = QUAD_TOL

    def __post_init__(self) -> None:
        K = self.config.K
        object.__setattr__(self, "phi", self.phi.padded(K))
        object.__setattr__(self, "psi", self.psi.padded(K))
        object.__setattr__(self, "forcing", as_forcing(self.forcing))

    @classmethod
    def from_grids(
        cls,
        config: ProblemConfig,
        phi: GridFunction,
        psi: GridFunction,
        forcing: Forcing | None = None,
        **kwargs: Any,
    ) -> InverseInput:
        """Build the input from grid samples after checking boundary values.

        Requires :math:`\\varphi(0) = \\varphi(1) = 0` and
        :math:`\\psi = \\psi'' = 0` at both ends; :math:`\\psi''` is estimated
        by one-sided differences and compared with its interior maximum.
        """
        for name, g in (("phi", phi), ("psi", psi)):
            if not g.is_boundary_compliant(BOUNDARY_TOL):
                raise BoundaryConditionError(f"{name} must vanish at x = 0 and x = 1")

        d2 = _second_derivative(psi)
        scale = max(float(np.max(np.abs(d2[1:-1]))), 1.0e-300)
        if max(abs(d2[0]), abs(d2[-1])) > 1.0e-3 * scale:
            raise BoundaryConditionError(
                f"psi'' must vanish at x = 0 and x = 1: got {d2[0]:.3e}, {d2[-1]:.3e}"
            )

        K = config.K
        return cls(config, analyze(phi, K), analyze(psi, K), as_forcing(forcing), **kwargs)


InverseP1Input = InverseInput
InverseP2Input = InverseInput


def _second_derivative(g: GridFunction) -> np.ndarray:
    y = g.samples
    h = 1.0 / g.N
    d2 = np.empty_like(y)
    d2[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / h**2
    d2[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h**2
    d2[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / h**2
    return d2


@dataclass(frozen=True)
class InverseResult:
    solution: SeriesSolution
    interface: SineSeries
    excluded_modes: tuple[int, ...]
    report: dict[str, Any]

    # problem 1 calls the recovered function h, problem 2 calls it hbar
    @property
    def h(self) -> SineSeries:
        return self.interface

    @property
    def hbar(self) -> SineSeries:
        return self.interface


# {{{ per-mode recovery


def compute_Ck(inp: InverseInput, k: int) -> float:
    """Switch constant :math:`C_k` from the snapshot :math:`u_k(\\xi) = \\psi_k`."""
    cfg = inp.config
    lam = eigenvalue(k)
    be = cfg.beta
    denom = ml_eval(be, 1.0, -lam * (cfg.xi - cfg.a) ** be, inp.ml_tol).value
    _check_guard(
        k, cfg.alpha, "E_beta1", denom, guard_threshold(lam, cfg.xi - cfg.a, be, inp.guard_scale)
    )

    fk = inp.forcing.mode(k)
    integral = 0.0
    if fk is not None:
        spec = ConvolutionSpec(cfg.a, cfg.xi, be - 1.0, be, be, lam, fk)
        integral = conv_integral(spec, inp.quad_tol)

    return (inp.psi[k] - integral) / denom


def _wave(inp: InverseInput, k: int) -> dict[str, float]:
    return wave_side_constants(
        inp.config, k, inp.phi[k], inp.forcing, ml_tol=inp.ml_tol, quad_tol=inp.quad_tol
    )


def compute_Bk(inp: InverseInput, C_k: float, k: int, *, wave: dict | None = None) -> float:
    """Initial velocity :math:`B_k` from continuity at the switch."""
    cfg = inp.config
    w = _wave(inp, k) if wave is None else wave
    _check_guard(
        k,
        cfg.alpha,
        "E_alpha2",
        w["E_alpha2"],
        guard_threshold(w["lambda"], cfg.a, cfg.alpha, inp.guard_scale),
    )

    num = C_k - inp.phi[k] * w["E_alpha1"] - w["I_position"]
    return num / (cfg.a * w["E_alpha2"])


def compute_hk(
    inp: InverseInput, C_k: float, B_k: float, k: int, *, wave: dict | None = None
) -> float:
    """Velocity mismatch :math:`h_k` from the fractional-flux condition."""
    cfg = inp.config
    w = _wave(inp, k) if wave is None else wave
    lam = w["lambda"]
    return (
        w["f_a"]
        + lam * inp.phi[k] * cfg.a ** (cfg.alpha - 1.0) * w["E_alphaalpha"]
        - lam * C_k
        - B_k * w["E_alpha1"]
        - w["I_velocity"]
    )


def compute_Bk_p2(inp: InverseInput, C_k: float, k: int, *, wave: dict | None = None) -> float:
    """Initial velocity :math:`B_k` from the mismatch-free flux condition."""
    cfg = inp.config
    w = _wave(inp, k) if wave is None else wave
    lam = w["lambda"]
    _check_guard(
        k,
        cfg.alpha,
        "E_alpha1",
        w["E_alpha1"],
        guard_threshold(lam, cfg.a, cfg.alpha, inp.guard_scale),
    )

    num = (
        w["f_a"]
        + lam * (inp.phi[k] * cfg.a ** (cfg.alpha - 1.0) * w["E_alphaalpha"] - C_k)
        - w["I_velocity"]
    )
    return num / w["E_alpha1"]


def compute_hbar_k(
    inp: InverseInput, C_k: float, B_k: float, k: int, *, wave: dict | None = None
) -> float:
    """Position jump :math:`\\bar h_k = u_k(a^+) - u_k(a^-)`."""
    cfg = inp.config
    w = _wave(inp, k) if wave is None else wave
    return C_k - inp.phi[k] * w["E_alpha1"] - B_k * cfg.a * w["E_alpha2"] - w["I_position"]


# }}}


# {{{ solvers


def _solve(inp: InverseInput, problem: int, skip_bad_modes: bool) -> InverseResult:
    start = time.perf_counter()
    cfg = inp.config
    K = cfg.K

    coeffs = []
    interface = np.zeros(K)
    excluded = []
    guards = []
    for k in range(1, K + 1):
        w = _wave(inp, k)
        guards.append(
            {
                "k": k,
                "E_alpha1": w["E_alpha1"],
                "E_alpha2": w["E_alpha2"],
                "threshold": guard_threshold(w["lambda"], cfg.a, cfg.alpha, inp.guard_scale),
            }
        )
        try:
            C = compute_Ck(inp, k)
            if problem == 1:
                B = compute_Bk(inp, C, k, wave=w)
                h, hbar = compute_hk(inp, C, B, k, wave=w), 0.0
            else:
                B = compute_Bk_p2(inp, C, k, wave=w)
                h, hbar = 0.0, compute_hbar_k(inp, C, B, k, wave=w)
        except NearZeroDenominator as exc:
            if not skip_bad_modes:
                raise
            logger.warning("excluding mode %d: %s", k, exc)
            excluded.append(k)
            C = B = h = hbar = 0.0

        interface[k - 1] = h if problem == 1 else hbar
        coeffs.append(
            ModeCoefficients(
                k=k,
                lambda_k=w["lambda"],
                phi_k=inp.phi[k],
                C_k=C,
                B_k=B,
                h_k=h,
                hbar_k=hbar,
                guard_E_alpha2=w["E_alpha2"],
                guard_E_alpha1=w["E_alpha1"],
            )
        )

    modes = tuple(
        make_mode_solution(cfg, c, inp.forcing, ml_tol=inp.ml_tol, quad_tol=inp.quad_tol)
        for c in coeffs
        if c.k not in excluded
    )
    solution = SeriesSolution(cfg, modes)

    report = {
        "problem": problem,
        "config": config_to_dict(cfg),
        "guards": guards,
        "excluded_modes": excluded,
        "indeterminate_modes": excluded,
        "residuals": interface_residuals(solution, inp),
        "truncation": truncation_report(cfg, inp.psi.coeffs, inp.forcing).to_dict(),
        "wall_time": time.perf_counter() - start,
    }
    return InverseResult(solution, SineSeries(interface), tuple(excluded), report)


def solve_problem1(inp: InverseInput, *, skip_bad_modes: bool = False) -> InverseResult:
    """Recover :math:`u` and the velocity mismatch :math:`h`.

    Raises
    ------
    NearZeroDenominator
        If a guard fails and *skip_bad_modes* is not set. With the flag the
        mode is dropped from the expansion and listed in the report.
    """
    return _solve(inp, 1, skip_bad_modes)


def solve_problem2(inp: InverseInput, *, skip_bad_modes: bool = False) -> InverseResult:
    """Recover :math:`u` and the position jump :math:`\\bar h`."""
    return _solve(inp, 2, skip_bad_modes)


# }}}


# {{{ diagnostics


def config_to_dict(cfg: ProblemConfig) -> dict[str, float]:
    return {
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "a": cfg.a,
        "b": cfg.b,
        "xi": cfg.xi,
        "modes": cfg.K,
    }


def interface_residuals(
    solution: SeriesSolution, inp: InverseInput, nx: int = 101
) -> dict[str, float]:
    """Overdetermination, continuity and flux residuals of a recovery."""
    cfg = solution.config
    xs = np.linspace(0.0, 1.0, nx)
    snapshot = solution.snapshot(cfg.xi, xs)
    target = synthesize(inp.psi, xs)

    cont = continuity_residuals(solution)
    vel = velocity_residuals(solution, inp.forcing)
    return {
        "overdetermination": float(np.max(np.abs(snapshot - target))),
        "continuity_max": float(np.max(cont)) if cont.size else 0.0,
        "velocity_max": float(np.max(vel)) if vel.size else 0.0,
        "continuity": [float(v) for v in cont],
        "velocity": [float(v) for v in vel],
    }


# }}}
