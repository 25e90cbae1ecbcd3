"""Scenario configuration: flat ``key = value`` text with dotted sections.

Example::

    # uniform slab, collapses at t = 1
    geometry = slab
    gamma = 0.15915494309189535
    initial_density = uniform-slab
    initial_density.b = 1
    initial_density.a = 1
    times = 0, 0.5, 2.0
    grid.n_points = 201
    grid.range = -1.5, 1.5
    run_mode = analytic

Lists are comma separated.  ``#`` starts a comment.  Every parse or
validation error carries the offending line and key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gravgas.errors import ConfigError
from gravgas.lagrange_series import MAX_ORDER
from gravgas.profiles import CLAMP, CONSTANT, LINEAR, ZERO, ProfileFunction

GEOMETRIES = ("spherical", "slab")
RUN_MODES = ("analytic", "oracle", "compare", "perturbation", "collapse-time")
PERTURBATION_MODES = ("gravitating", "sound")

_DENSITY_KEYS = {"value", "b", "a", "knots", "values", "kind", "extrapolation"}
_VELOCITY_KEYS = {"value", "slope", "lo", "hi", "knots", "values", "kind", "extrapolation"}

KNOWN_KEYS = {
    "geometry", "gamma", "initial_density", "initial_velocity", "times", "run_mode",
    "grid.n_points", "grid.range",
    "solver.tol", "solver.kepler_guard", "solver.collapse_guard", "solver.series_order",
    "oracle.n", "oracle.rtol", "oracle.guard",
    "compare.density_tol", "compare.velocity_tol", "compare.cumulative_tol",
    "perturbation.mode", "perturbation.rho0", "perturbation.amplitude", "perturbation.rate",
    "perturbation.sound_speed", "perturbation.wavenumber", "perturbation.t_end",
    "output.dir",
} | {f"initial_density.{k}" for k in _DENSITY_KEYS} | {f"initial_velocity.{k}" for k in _VELOCITY_KEYS}


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-14
    kepler_guard: float = 1e-8
    collapse_guard: float = 1e-8
    series_order: int = 0


@dataclass(frozen=True)
class OracleSettings:
    n: int | None = None
    rtol: float = 3e-14
    guard: float | None = None


@dataclass(frozen=True)
class CompareSettings:
    density_tol: float = 0.02
    velocity_tol: float = 1e-6
    cumulative_tol: float = 1e-6


@dataclass(frozen=True)
class PerturbationSettings:
    mode: str = "gravitating"
    rho0: float | None = None
    amplitude: float | None = None
    rate: float = 0.0
    sound_speed: float = 1.0
    wavenumber: float = 1.0
    t_end: float | None = None


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    geometry: str
    gamma: float
    density: ProfileFunction
    density_kind: str
    velocity: ProfileFunction
    velocity_kind: str
    times: tuple
    n_points: int
    grid_range: tuple
    run_mode: str
    output_dir: Path
    solver: SolverSettings = field(default_factory=SolverSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    compare: CompareSettings = field(default_factory=CompareSettings)
    perturbation: PerturbationSettings = field(default_factory=PerturbationSettings)

    def grid(self):
        """Output grid; a spherical grid starting at 0 drops the centre."""
        lo, hi = self.grid_range
        if self.geometry == "spherical" and lo == 0.0:
            return np.linspace(lo, hi, self.n_points + 1)[1:]
        return np.linspace(lo, hi, self.n_points)


def parse_text(text):
    """Split config text into ``{key: (value, line)}``; rejects duplicates and junk lines."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("missing key", line=lineno)
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", line=lineno, key=key)
        if not value:
            raise ConfigError("missing value", line=lineno, key=key)
        entries[key] = (value, lineno)
    return entries


class _Reader:
    def __init__(self, entries):
        self.entries = entries

    def has(self, key):
        return key in self.entries

    def line(self, key):
        return self.entries[key][1] if key in self.entries else None

    def error(self, key, message):
        return ConfigError(message, line=self.line(key), key=key)

    def raw(self, key, default=None, required=False):
        if key not in self.entries:
            if required:
                raise ConfigError("required key is missing", key=key)
            return default
        return self.entries[key][0]

    def number(self, key, default=None, required=False, positive=False, nonnegative=False):
        raw = self.raw(key, required=required)
        if raw is None:
            return default
        try:
            value = float(raw)
        except ValueError:
            raise self.error(key, f"not a number: {raw!r}") from None
        if not math.isfinite(value):
            raise self.error(key, "must be finite")
        if positive and value <= 0:
            raise self.error(key, "must be > 0")
        if nonnegative and value < 0:
            raise self.error(key, "must be >= 0")
        return value

    def integer(self, key, default=None, minimum=None):
        raw = self.raw(key)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise self.error(key, f"not an integer: {raw!r}") from None
        if minimum is not None and value < minimum:
            raise self.error(key, f"must be >= {minimum}")
        return value

    def numbers(self, key, required=False, length=None):
        raw = self.raw(key, required=required)
        if raw is None:
            return None
        try:
            values = tuple(float(s) for s in raw.split(","))
        except ValueError:
            raise self.error(key, f"not a comma-separated list of numbers: {raw!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise self.error(key, "values must be finite")
        if length is not None and len(values) != length:
            raise self.error(key, f"expected {length} values")
        return values

    def choice(self, key, options, default=None, required=False):
        raw = self.raw(key, default=default, required=required)
        if raw is not None and raw not in options:
            raise self.error(key, f"must be one of {', '.join(options)}")
        return raw


def _table(rd, prefix, default_extrapolation):
    knots = rd.numbers(f"{prefix}.knots", required=True)
    values = rd.numbers(f"{prefix}.values", required=True)
    kind = rd.choice(f"{prefix}.kind", (LINEAR, CONSTANT), default=LINEAR)
    extrap = rd.choice(f"{prefix}.extrapolation", (CLAMP, ZERO), default=default_extrapolation)
    try:
        return ProfileFunction(knots, values, kind, extrap)
    except ValueError as exc:
        raise rd.error(f"{prefix}.values", str(exc)) from None


def _density(rd, geometry):
    kind = rd.choice("initial_density", ("constant", "uniform-slab", "table"), required=True)
    if kind == "constant":
        if geometry != "spherical":
            raise rd.error("initial_density", "a constant density has infinite line mass; use uniform-slab")
        value = rd.number("initial_density.value", required=True, nonnegative=True)
        return ProfileFunction.constant(value), kind
    if kind == "uniform-slab":
        if geometry != "slab":
            raise rd.error("initial_density", "uniform-slab requires geometry = slab")
        b = rd.number("initial_density.b", required=True, nonnegative=True)
        a = rd.number("initial_density.a", required=True, positive=True)
        return ProfileFunction.top_hat(b, a), kind
    profile = _table(rd, "initial_density", ZERO if geometry == "slab" else CLAMP)
    if not profile.is_density:
        raise rd.error("initial_density.values", "density values must be >= 0")
    if geometry == "spherical" and profile.knots[0] < 0:
        raise rd.error("initial_density.knots", "spherical knots must be >= 0")
    if geometry == "slab" and (profile.left_value != 0 or profile.right_value != 0):
        raise rd.error("initial_density.extrapolation", "slab density must vanish outside its knots")
    return profile, kind


def _velocity(rd, geometry):
    kind = rd.choice("initial_velocity", ("zero", "constant", "linear", "table"), default="zero")
    if kind == "zero":
        return ProfileFunction.zero(), kind
    if geometry == "spherical":
        raise rd.error("initial_velocity", "spherical runs support cold (zero velocity) data only")
    if kind == "constant":
        return ProfileFunction.constant(rd.number("initial_velocity.value", required=True)), kind
    if kind == "linear":
        slope = rd.number("initial_velocity.slope", required=True)
        lo = rd.number("initial_velocity.lo", default=-1.0)
        hi = rd.number("initial_velocity.hi", default=1.0)
        if not lo < hi:
            raise rd.error("initial_velocity.hi", "must exceed initial_velocity.lo")
        return ProfileFunction.linear(slope, lo, hi), kind
    return _table(rd, "initial_velocity", CLAMP), kind


def _default_range(geometry, density):
    hi = float(density.knots[-1])
    if geometry == "spherical":
        return 0.0, hi
    ext = 1.5 * max(abs(float(density.knots[0])), hi)
    return -ext, ext


def build_config(entries, base_dir="."):
    rd = _Reader(entries)
    geometry = rd.choice("geometry", GEOMETRIES, required=True)
    gamma = rd.number("gamma", required=True, positive=True)
    run_mode = rd.choice("run_mode", RUN_MODES, default="analytic")

    density, density_kind = _density(rd, geometry)
    velocity, velocity_kind = _velocity(rd, geometry)

    times = rd.numbers("times", required=run_mode in ("analytic", "oracle", "compare"))
    times = times or ()
    if any(t < 0 for t in times):
        raise rd.error("times", "times must be nonnegative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise rd.error("times", "times must be strictly increasing")

    n_points = rd.integer("grid.n_points", default=101, minimum=2)
    grid_range = rd.numbers("grid.range", length=2) or _default_range(geometry, density)
    if not grid_range[0] < grid_range[1]:
        raise rd.error("grid.range", "range must be increasing")
    if geometry == "spherical" and grid_range[0] < 0:
        raise rd.error("grid.range", "spherical radii must be >= 0")

    solver = SolverSettings(
        tol=rd.number("solver.tol", 1e-14, positive=True),
        kepler_guard=rd.number("solver.kepler_guard", 1e-8, positive=True),
        collapse_guard=rd.number("solver.collapse_guard", 1e-8, positive=True),
        series_order=rd.integer("solver.series_order", 0, minimum=0),
    )
    if solver.series_order > MAX_ORDER:
        raise rd.error("solver.series_order", f"must be <= {MAX_ORDER}")
    oracle = OracleSettings(
        n=rd.integer("oracle.n", None, minimum=2),
        rtol=rd.number("oracle.rtol", 3e-14, positive=True),
        guard=rd.number("oracle.guard", None, positive=True),
    )
    compare = CompareSettings(
        density_tol=rd.number("compare.density_tol", 0.02, positive=True),
        velocity_tol=rd.number("compare.velocity_tol", 1e-6, positive=True),
        cumulative_tol=rd.number("compare.cumulative_tol", 1e-6, positive=True),
    )
    perturbation = PerturbationSettings(
        mode=rd.choice("perturbation.mode", PERTURBATION_MODES, default="gravitating"),
        rho0=rd.number("perturbation.rho0", None, positive=True),
        amplitude=rd.number("perturbation.amplitude", None),
        rate=rd.number("perturbation.rate", 0.0),
        sound_speed=rd.number("perturbation.sound_speed", 1.0, positive=True),
        wavenumber=rd.number("perturbation.wavenumber", 1.0, positive=True),
        t_end=rd.number("perturbation.t_end", None, positive=True),
    )
    out = Path(rd.raw("output.dir", default="output"))
    if not out.is_absolute():
        out = Path(base_dir) / out

    return ScenarioConfig(
        geometry=geometry, gamma=gamma, density=density, density_kind=density_kind,
        velocity=velocity, velocity_kind=velocity_kind, times=tuple(times), n_points=n_points,
        grid_range=tuple(grid_range), run_mode=run_mode, output_dir=out, solver=solver,
        oracle=oracle, compare=compare, perturbation=perturbation,
    )


def parse_config(text, base_dir="."):
    """Parse and validate config text.

    Raises
    ------
    ConfigError
        With the line number and key of the first problem found.
    """
    return build_config(parse_text(text), base_dir)


def load_config(path):
    """Read a config file; a relative ``output.dir`` is resolved against the file's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)
