"""Run configuration files and result writers.

A configuration is a JSON object::

    {
        "alpha": 1.25, "beta": 0.5, "a": 0.5, "b": 1.0, "xi": 0.75,
        "modes": 16,
        "phi": [1.0, 0.0, 0.125],
        "psi": "psi.csv",
        "B": {"coefficients": [36.7]},
        "forcing": "forcing.csv"
    }

Data entries are either coefficient lists (modes 1, 2, ...) or paths to
``x,value`` grid files, which are sine-transformed. The optional forcing file
holds mode coefficients as columns ``t,f_1,...,f_K`` on an increasing time
grid that must contain the switch time. Relative paths are resolved against
the configuration file.

All CSV output uses 17 significant digits and LF line endings, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
import pathlib
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from switchfrac.forward import Forcing, ProblemConfig
from switchfrac.mittag_leffler import DEFAULT_TOL as ML_TOL
from switchfrac.quadrature import DEFAULT_TOL as QUAD_TOL
from switchfrac.quadrature import TimeSamples
from switchfrac.sine_basis import SineSeries, analyze, read_grid_csv, synthesize

#: spatial nodes of emitted solution surfaces
DEFAULT_SPACE_NODES = 101
#: spatial nodes of emitted interface profiles
DEFAULT_PROFILE_NODES = 201

_PROBLEM_KEYS = ("alpha", "beta", "a", "b", "xi")
_DATA_KEYS = ("phi", "psi", "B", "jump")


class RunConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """A problem configuration together with its data and solver settings."""

    problem: ProblemConfig
    data: Mapping[str, SineSeries] = field(default_factory=dict)
    forcing: Forcing = field(default_factory=Forcing.zero)
    ml_tol: float = ML_TOL
    quad_tol: float = QUAD_TOL
    skip_bad_modes: bool = False
    time_nodes: int = 401
    space_nodes: int = DEFAULT_SPACE_NODES
    seed: int | None = None
    source: dict[str, Any] = field(default_factory=dict)

    def series(self, name: str) -> SineSeries:
        """Data series *name*, zero if the configuration omits it."""
        s = self.data.get(name)
        return SineSeries.zeros(self.problem.K) if s is None else s.padded(self.problem.K)


def _resolve(path: str, base: pathlib.Path) -> pathlib.Path:
    p = pathlib.Path(path)
    p = p if p.is_absolute() else base / p
    if not p.is_file():
        raise RunConfigError(f"data file not found: '{p}'")
    return p


def _load_series(entry: Any, K: int, base: pathlib.Path, name: str) -> SineSeries:
    if isinstance(entry, Mapping):
        if "coefficients" in entry:
            entry = entry["coefficients"]
        elif "csv" in entry:
            entry = entry["csv"]
        else:
            raise RunConfigError(f"'{name}' needs a 'coefficients' or 'csv' entry")

    if isinstance(entry, str):
        grid = read_grid_csv(_resolve(entry, base))
        return analyze(grid, K)
    if isinstance(entry, (list, tuple)):
        return SineSeries(np.asarray(entry, dtype=float)).padded(K)

    raise RunConfigError(f"'{name}' must be a coefficient list or a CSV path")


def read_forcing_csv(path: str | os.PathLike[str]) -> Forcing:
    """Read tabulated mode forcing with header ``t,f_1,...,f_K``."""
    with open(path, newline="") as infile:
        reader = csv.reader(infile)
        header = [h.strip() for h in next(reader)]
        rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)

    if not header or header[0] != "t" or rows.ndim != 2 or rows.shape[1] != len(header):
        raise RunConfigError(f"'{path}' must have columns t,f_1,...,f_K")

    modes = {}
    for j, name in enumerate(header[1:], start=1):
        if not name.startswith("f_"):
            raise RunConfigError(f"unexpected forcing column '{name}' in {path}")
        k = int(name[2:])
        if np.any(rows[:, j] != 0.0):
            modes[k] = TimeSamples(rows[:, 0], rows[:, j])
    return Forcing(modes)


def load_config(
    path: str | os.PathLike[str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Read a JSON run configuration and apply non-``None`` *overrides*.

    Recognized override keys are the problem keys (``alpha``, ``beta``,
    ``a``, ``b``, ``xi``, ``modes``) and ``tol``, ``quad_tol``,
    ``skip_bad_modes``.
    """
    raw: dict[str, Any] = {}
    base = pathlib.Path.cwd()
    if path is not None:
        p = pathlib.Path(path)
        if not p.is_file():
            raise RunConfigError(f"config file not found: '{p}'")
        raw = json.loads(p.read_text())
        base = p.resolve().parent

    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    missing = [k for k in _PROBLEM_KEYS if k not in raw]
    if missing:
        raise RunConfigError(f"missing problem parameters: {', '.join(missing)}")

    problem = ProblemConfig(
        alpha=float(raw["alpha"]),
        beta=float(raw["beta"]),
        a=float(raw["a"]),
        b=float(raw["b"]),
        xi=float(raw["xi"]),
        K=int(raw.get("modes", 64)),
    )
    data = {
        name: _load_series(raw[name], problem.K, base, name)
        for name in _DATA_KEYS
        if raw.get(name) is not None
    }
    forcing = Forcing.zero()
    if raw.get("forcing") is not None:
        forcing = read_forcing_csv(_resolve(raw["forcing"], base))

    return RunConfig(
        problem=problem,
        data=data,
        forcing=forcing,
        ml_tol=float(raw.get("tol", ML_TOL)),
        quad_tol=float(raw.get("quad_tol", QUAD_TOL)),
        skip_bad_modes=bool(raw.get("skip_bad_modes", False)),
        time_nodes=int(raw.get("time_nodes", 401)),
        space_nodes=int(raw.get("space_nodes", DEFAULT_SPACE_NODES)),
        seed=raw.get("seed"),
        source=raw,
    )


# {{{ writers


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def write_rows(
    path: str | os.PathLike[str], header: Sequence[str], columns: Sequence[np.ndarray]
) -> None:
    columns = [np.asarray(c, dtype=float).reshape(-1) for c in columns]
    with open(path, "w", newline="\n") as outfile:
        outfile.write(",".join(header) + "\n")
        for row in zip(*columns):
            outfile.write(",".join(_fmt(v) for v in row) + "\n")


def write_profile_csv(
    path: str | os.PathLike[str],
    series: SineSeries,
    name: str,
    n: int = DEFAULT_PROFILE_NODES,
) -> None:
    """Write ``x,<name>`` samples of a sine series on a uniform grid."""
    x = np.linspace(0.0, 1.0, n)
    write_rows(path, ["x", name], [x, synthesize(series, x)])


def write_surface_csv(
    path: str | os.PathLike[str], ts: np.ndarray, xs: np.ndarray, u: np.ndarray
) -> None:
    """Write the long-format table ``t,x,u`` with *x* varying fastest."""
    T, X = np.meshgrid(ts, xs, indexing="ij")
    write_rows(path, ["t", "x", "u"], [T, X, u])


def write_surface_json(
    path: str | os.PathLike[str],
    config: ProblemConfig,
    ts: np.ndarray,
    xs: np.ndarray,
    u: np.ndarray,
) -> None:
    payload = {
        "config": config_header(config),
        "t": [float(v) for v in ts],
        "x": [float(v) for v in xs],
        "u": [[float(v) for v in row] for row in np.asarray(u)],
    }
    write_json(path, payload)


def write_json(path: str | os.PathLike[str], payload: Any) -> None:
    with open(path, "w", newline="\n") as outfile:
        json.dump(to_jsonable(payload), outfile, indent=2, sort_keys=True, allow_nan=True)
        outfile.write("\n")


def config_header(config: ProblemConfig) -> dict[str, float]:
    return {
        "alpha": config.alpha,
        "beta": config.beta,
        "a": config.a,
        "b": config.b,
        "xi": config.xi,
        "modes": config.K,
    }


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars, arrays and dataclass-like values for ``json``."""
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, SineSeries):
        return [float(v) for v in obj.coeffs]
    if isinstance(obj, ProblemConfig):
        return config_header(obj)
    if isinstance(obj, pathlib.PurePath):
        return str(obj)
    return obj


def ensure_dir(path: str | os.PathLike[str]) -> pathlib.Path:
    out = pathlib.Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise RunConfigError(f"output directory is not writable: '{out}'")
    return out


# }}}
