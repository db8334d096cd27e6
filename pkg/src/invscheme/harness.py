"""Experiment runner and command line interface.

Configures the four builtin experiments (fig1..fig4) plus arbitrary JSON
configs, runs every requested method (invariant scheme, standard finite
differences with Newton, adaptive embedded RK5(4)), measures geometry and
cost, and writes one CSV per method plus a JSON report.  A method that
fails is recorded as data; the run itself never aborts because of it.

Config files are flat key-value JSON:

    {"name": "demo", "realization": "sl3", "order": "Second",
     "x0": 1, "y0": 8, "C": 2, "a": 1, "h": 0.01, "maxSteps": 5000,
     "xWindow": [-4, 6], "methods": ["invariant", "standardFD"]}

CSV columns are index,x,y for the baselines and index,x,y,J1,J2,
meshResidual for the invariant method (blank fields for the seed rows and
for J2 at order 2), all floats at 17 significant digits so files are
byte-deterministic and re-parse exactly.  Timings live only in the report
JSON.  The default output directory is --out, then the config's output
field, then $INVSCHEME_OUT, then the working directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .baselines import UniformMesh, ode_rhs_library, rk45_integrate, standard_fd_step
from .core import (
    DomainViolation,
    HaltInfo,
    NumericError,
    Point2,
    RealizationId,
    StepDiagnostics,
    Trajectory,
)
from .exact import (
    CircleSolution,
    HyperbolaSolution,
    conic_distance,
    fit_circle,
    fit_hyperbola,
    slope_at,
)
from .invariants import (
    disc_i1_sl3,
    disc_i1_sl4,
    window_invariants,
    window_j2,
)
from .schemes import _ode_curve, advance_state, bootstrap, run_scheme, square

_RK_RTOL = 1e-8
_RK_ATOL = 1e-10

F_CHOICES: dict[str, Callable[[float], float]] = {
    "square": square,
    "identity": lambda u: u,
    "zero": lambda u: 0.0,
}

_METHODS = ("invariant", "standardFD", "rk45")

_IC_KEYS = ("x0", "y0", "yp0", "ypp0", "C", "a")

_CONFIG_KEYS = {
    "name", "realization", "order", "F", "h", "maxSteps", "xWindow",
    "methods", "output", "seed", *_IC_KEYS,
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    name: str
    realization: RealizationId
    order: int
    ics: dict[str, float]
    f_name: str = "square"
    h: float = 0.01
    max_steps: int = 5000
    x_window: tuple[float, float] = (0.0, 0.0)
    methods: tuple[str, ...] = ("invariant", "standardFD")
    output: Optional[str] = None
    seed: Optional[int] = None

    @property
    def f(self) -> Callable[[float], float]:
        return F_CHOICES[self.f_name]

    def as_raw(self) -> dict:
        raw = {
            "name": self.name,
            "realization": self.realization.value,
            "order": "Second" if self.order == 2 else "Third",
            "F": self.f_name,
            "h": self.h,
            "maxSteps": self.max_steps,
            "xWindow": list(self.x_window),
            "methods": list(self.methods),
        }
        raw.update(self.ics)
        if self.output is not None:
            raw["output"] = self.output
        if self.seed is not None:
            raw["seed"] = self.seed
        return raw


def _as_float(raw: dict, key: str) -> float:
    try:
        return float(raw[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} must be a number, got {raw[key]!r}")


def config_from_raw(raw: dict) -> ExperimentConfig:
    """Validate a flat key-value mapping into an ExperimentConfig.

    Order-2 configs must provide (C, a) or yp0; order-3 configs must
    provide yp0 and ypp0.  Unknown keys are rejected so typos surface.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        real_raw = str(raw["realization"]).lower()
    except KeyError:
        raise ConfigError("config needs a realization (sl3 or sl4)")
    try:
        realization = RealizationId(real_raw)
    except ValueError:
        raise ConfigError(f"unknown realization {raw['realization']!r}")
    order_raw = raw.get("order")
    order_map = {"second": 2, "third": 3, "2": 2, "3": 3, 2: 2, 3: 3}
    key = order_raw.lower() if isinstance(order_raw, str) else order_raw
    if key not in order_map:
        raise ConfigError("order must be 'Second' or 'Third'")
    order = order_map[key]
    for needed in ("x0", "y0"):
        if needed not in raw:
            raise ConfigError(f"config needs {needed}")
    ics = {k: _as_float(raw, k) for k in _IC_KEYS if k in raw}
    if ics["x0"] <= 0.0:
        raise ConfigError("x0 must be positive (the half plane x > 0)")
    if order == 2 and not (("C" in ics and "a" in ics) or "yp0" in ics):
        raise ConfigError("order-2 config needs (C, a) or yp0")
    if order == 3 and ("yp0" not in ics or "ypp0" not in ics):
        raise ConfigError("order-3 config needs yp0 and ypp0")
    f_name = raw.get("F", "square")
    if f_name not in F_CHOICES:
        raise ConfigError(f"unknown F {f_name!r}; choices: {sorted(F_CHOICES)}")
    h = float(raw.get("h", 0.01))
    if not (h > 0.0 and math.isfinite(h)):
        raise ConfigError("h must be positive")
    max_steps = raw.get("maxSteps", 5000)
    if not isinstance(max_steps, int) or isinstance(max_steps, bool) or max_steps < 0:
        raise ConfigError("maxSteps must be a nonnegative integer")
    window_raw = raw.get("xWindow", [ics["x0"] - 5.0, ics["x0"] + 5.0])
    if (
        not isinstance(window_raw, (list, tuple))
        or len(window_raw) != 2
        or not all(isinstance(v, (int, float)) for v in window_raw)
        or not window_raw[0] < window_raw[1]
    ):
        raise ConfigError("xWindow must be [xmin, xmax] with xmin < xmax")
    default_methods = ["invariant", "standardFD"] + (["rk45"] if order == 3 else [])
    methods_raw = raw.get("methods", default_methods)
    if not isinstance(methods_raw, (list, tuple)):
        raise ConfigError("methods must be a list")
    for m in methods_raw:
        if m not in _METHODS:
            raise ConfigError(f"unknown method {m!r}; choices: {list(_METHODS)}")
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ConfigError("seed must be an integer")
    return ExperimentConfig(
        name=str(raw.get("name", "experiment")),
        realization=realization,
        order=order,
        ics=ics,
        f_name=f_name,
        h=h,
        max_steps=max_steps,
        x_window=(float(window_raw[0]), float(window_raw[1])),
        methods=tuple(methods_raw),
        output=raw.get("output"),
        seed=seed,
    )


def builtin_experiments() -> list[ExperimentConfig]:
    """The four named builtin experiments with their published data."""
    return [
        config_from_raw({
            "name": "fig1", "realization": "sl3", "order": "Second",
            "x0": 1.0, "y0": 8.0, "C": 2.0, "a": 1.0,
            "methods": ["invariant", "standardFD"],
        }),
        config_from_raw({
            "name": "fig2", "realization": "sl3", "order": "Third",
            "x0": 1.0, "y0": 1.0, "yp0": 1.0, "ypp0": 3.0,
            "methods": ["invariant", "standardFD", "rk45"],
        }),
        config_from_raw({
            "name": "fig3", "realization": "sl4", "order": "Second",
            "x0": 2.0, "y0": 5.0, "C": 5.0, "a": 1.0,
            "methods": ["invariant", "standardFD"],
        }),
        config_from_raw({
            "name": "fig4", "realization": "sl4", "order": "Third",
            "x0": 2.0, "y0": 1.0, "yp0": -1.5, "ypp0": -1.5,
            "methods": ["invariant", "standardFD", "rk45"],
        }),
    ]


# -- singularity detection -----------------------------------------------------


@dataclass(frozen=True)
class SingularityFlag:
    x: float
    kind: str  # "blow-up" or "tangent-crossing"


def all_singularities(traj: Trajectory) -> list[SingularityFlag]:
    """Every secant blow-up (|dy/dx| > 1e4) and x-reversal, in order."""
    pts = traj.points
    flags: list[SingularityFlag] = []
    for j in range(len(pts) - 1):
        dx = pts[j + 1].x - pts[j].x
        dy = pts[j + 1].y - pts[j].y
        if j >= 1:
            dx_prev = pts[j].x - pts[j - 1].x
            if dx_prev * dx < 0.0:
                flags.append(SingularityFlag(pts[j].x, "tangent-crossing"))
                continue
        if abs(dy) > 1e4 * abs(dx):
            flags.append(SingularityFlag(pts[j + 1].x, "blow-up"))
    return flags


def detect_singularity(traj: Trajectory) -> Optional[SingularityFlag]:
    """First singular event along a trajectory, or None.

    Flags the first x where the secant slope |dy/dx| exceeds 1e4
    (kind "blow-up") or where dx changes sign, i.e. the trajectory crossed
    a vertical tangent (kind "tangent-crossing").
    """
    if len(traj.points) < 3:
        return None
    flags = all_singularities(traj)
    return flags[0] if flags else None


# -- method drivers ------------------------------------------------------------


@dataclass
class MethodOutcome:
    method: str
    trajectory: Trajectory = field(default_factory=Trajectory)
    seed_points: int = 0
    step_seconds: list[float] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def new_points(self) -> int:
        return max(0, len(self.trajectory.points) - self.seed_points)

    @property
    def failed(self) -> bool:
        return self.error is not None or self.new_points == 0


def _exact_conic(cfg: ExperimentConfig):
    """Fitted exact conic for order-2 configs with (C, a), else None."""
    if cfg.order != 2 or "C" not in cfg.ics or "a" not in cfg.ics:
        return None
    p0 = Point2(cfg.ics["x0"], cfg.ics["y0"])
    fit = fit_circle if cfg.realization is RealizationId.SL3 else fit_hyperbola
    return fit(p0, cfg.ics["C"], cfg.ics["a"])[0]


def _conic_branch_y(sol, x: float, branch: float) -> float:
    dx = x - sol.cx
    if isinstance(sol, CircleSolution):
        rad = sol.r * sol.r - dx * dx
    else:
        rad = dx * dx - sol.r * sol.r
    if rad < 0.0:
        raise DomainViolation("abscissa outside the conic's x range", x)
    return sol.cy + branch * math.sqrt(rad)


def _initial_slope(cfg: ExperimentConfig) -> float:
    """y'(x0) for baseline integrators on order-2 configs.

    Prefers an explicit yp0.  Otherwise reads the slope off the fitted
    conic on the initial point's y branch; a vertical tangent at x0 is
    sidestepped by a documented 1e-6 nudge along x.
    """
    if "yp0" in cfg.ics:
        return cfg.ics["yp0"]
    sol = _exact_conic(cfg)
    if sol is None:
        raise ConfigError("order-2 baseline needs yp0 or (C, a)")
    x0, y0 = cfg.ics["x0"], cfg.ics["y0"]
    branch = 1.0 if y0 >= sol.cy else -1.0
    try:
        return slope_at(sol, Point2(x0, y0))
    except DomainViolation:
        xn = x0 + 1e-6
        return slope_at(sol, Point2(xn, _conic_branch_y(sol, xn, branch)))


def _f_for_library(cfg: ExperimentConfig):
    """Named F choices keep their name so the ODE library can pick the
    denominator-cleared residual form for the finite-difference baseline."""
    return cfg.f_name if cfg.f_name == "square" else cfg.f


def _drive_invariant(cfg: ExperimentConfig) -> MethodOutcome:
    out = MethodOutcome("invariant")
    state = bootstrap(cfg.realization, cfg.order, cfg.ics, cfg.h, f=cfg.f)
    out.seed_points = len(state.window)
    t0 = time.perf_counter()
    out.trajectory = run_scheme(state, cfg.max_steps, cfg.x_window)
    elapsed = time.perf_counter() - t0
    steps = max(1, len(out.trajectory.points) - out.seed_points)
    out.step_seconds = [elapsed / steps] * steps
    return out


def _drive_standard_fd(cfg: ExperimentConfig) -> MethodOutcome:
    out = MethodOutcome("standardFD")
    ics = cfg.ics
    x0 = ics["x0"]
    if cfg.order == 2:
        if "C" not in ics:
            raise ConfigError("order-2 standardFD needs C in the config")
        problem = ode_rhs_library(cfg.realization, 2, C=ics["C"])
        sol = _exact_conic(cfg)
        if sol is not None:
            branch = 1.0 if ics["y0"] >= sol.cy else -1.0
            ys = [ics["y0"], _conic_branch_y(sol, x0 + cfg.h, branch)]
        elif "yp0" in ics:
            ys = [ics["y0"], ics["y0"] + cfg.h * ics["yp0"]]
        else:
            raise ConfigError("order-2 standardFD needs (C, a) or yp0")
        width = 2
    else:
        problem = ode_rhs_library(cfg.realization, 3, F=_f_for_library(cfg))
        curve = _ode_curve(cfg.realization, ics, cfg.f)
        ys = [curve(x0 + i * cfg.h).y for i in range(3)]
        width = 3
    out.seed_points = width
    mesh = UniformMesh(x0, cfg.h)
    traj = Trajectory(points=[Point2(mesh.node(i), y) for i, y in enumerate(ys)])
    out.trajectory = traj
    for _ in range(cfg.max_steps):
        i = len(traj.points)
        x_next = mesh.node(i)
        guess = 2.0 * ys[-1] - ys[-2]
        t0 = time.perf_counter()
        try:
            y_next = standard_fd_step(problem.residual, ys[-width:], mesh, i - width, guess)
        except NumericError as exc:
            traj.halt = HaltInfo(exc.kind, x=x_next, detail=exc.detail)
            return out
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            traj.halt = HaltInfo("numericError", x=x_next, detail=str(exc))
            return out
        out.step_seconds.append(time.perf_counter() - t0)
        ys.append(y_next)
        traj.points.append(Point2(x_next, y_next))
        if abs(y_next) > 1e8:
            traj.halt = HaltInfo("singularityDetected", x=x_next, detail="|y| > 1e8")
            return out
        if not (cfg.x_window[0] <= x_next <= cfg.x_window[1]):
            traj.halt = HaltInfo(
                "xRangeExit", x=x_next,
                detail=f"left [{cfg.x_window[0]}, {cfg.x_window[1]}]",
            )
            return out
    traj.halt = HaltInfo("maxSteps", x=traj.points[-1].x, detail=f"{cfg.max_steps} steps")
    return out


_RK_STATUS = {
    "ok": "completed",
    "singularity": "singularityDetected",
    "stepUnderflow": "stepUnderflow",
    "maxSteps": "maxSteps",
}


def _drive_rk45(cfg: ExperimentConfig) -> MethodOutcome:
    out = MethodOutcome("rk45")
    ics = cfg.ics
    if cfg.order == 2:
        if "C" not in ics:
            raise ConfigError("order-2 rk45 needs C in the config")
        problem = ode_rhs_library(cfg.realization, 2, C=ics["C"])
        state0 = [ics["y0"], _initial_slope(cfg)]
    else:
        problem = ode_rhs_library(cfg.realization, 3, F=_f_for_library(cfg))
        state0 = [ics["y0"], ics["yp0"], ics["ypp0"]]
    out.seed_points = 1
    t0 = time.perf_counter()
    result = rk45_integrate(
        problem.system, ics["x0"], state0, cfg.x_window[1],
        rtol=_RK_RTOL, atol=_RK_ATOL,
    )
    elapsed = time.perf_counter() - t0
    pts = [Point2(x, st[0]) for x, st in zip(result.xs, result.states)]
    halt = HaltInfo(
        _RK_STATUS.get(result.status, result.status),
        x=result.halt_x,
        detail=result.detail,
    )
    out.trajectory = Trajectory(points=pts, halt=halt)
    steps = max(1, len(pts) - 1)
    out.step_seconds = [elapsed / steps] * steps
    return out


_DRIVERS = {
    "invariant": _drive_invariant,
    "standardFD": _drive_standard_fd,
    "rk45": _drive_rk45,
}


# -- reports -------------------------------------------------------------------


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.17g}"


def _csv_rows(outcome: MethodOutcome, order: int):
    traj = outcome.trajectory
    if outcome.method != "invariant":
        yield ("index", "x", "y")
        for i, p in enumerate(traj.points):
            yield (str(i), _fmt(p.x), _fmt(p.y))
        return
    yield ("index", "x", "y", "J1", "J2", "meshResidual")
    seed = outcome.seed_points
    for i, p in enumerate(traj.points):
        diag: Optional[StepDiagnostics] = None
        if i >= seed and i - seed < len(traj.diagnostics):
            diag = traj.diagnostics[i - seed]
        yield (
            str(i), _fmt(p.x), _fmt(p.y),
            _fmt(diag.j1 if diag else None),
            _fmt(diag.j2 if diag else None),
            _fmt(diag.mesh_residual if diag else None),
        )


def read_trajectory_csv(path: str | Path) -> list[dict[str, float]]:
    """Parse a written trajectory CSV back into per-row value dicts."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                {k: float(v) for k, v in rec.items() if v not in ("", None)}
            )
    return rows


# Halt reasons that are ordinary run outcomes rather than numeric failures.
_OK_HALTS = ("maxSteps", "completed", "xRangeExit")


@dataclass
class MethodReport:
    method: str
    file: Optional[str] = None
    halt_reason: Optional[str] = None
    halt_x: Optional[float] = None
    halt_detail: str = ""
    points: int = 0
    new_points: int = 0
    x_max: Optional[float] = None
    x_end: Optional[float] = None
    max_conic_distance: Optional[float] = None
    mesh_drift: Optional[float] = None
    scheme_drift: Optional[float] = None
    wall_seconds_per_step: Optional[float] = None
    singularity: Optional[SingularityFlag] = None
    error: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "file": self.file,
            "haltReason": self.halt_reason,
            "haltX": self.halt_x,
            "haltDetail": self.halt_detail,
            "points": self.points,
            "newPoints": self.new_points,
            "xMax": self.x_max,
            "xEnd": self.x_end,
            "maxConicDistance": self.max_conic_distance,
            "meshDrift": self.mesh_drift,
            "schemeDrift": self.scheme_drift,
            "wallSecondsPerStep": self.wall_seconds_per_step,
            "singularity": (
                {"x": self.singularity.x, "kind": self.singularity.kind}
                if self.singularity else None
            ),
            "error": self.error,
        }

    @property
    def failed(self) -> bool:
        """True when the method produced no usable progress.

        A structured error always counts; so does a numeric halt
        (divergence, lost intersection, blow-up, ...) before any new
        point.  An empty run that merely exhausted a zero step budget or
        left the window is not a failure.
        """
        if self.error is not None:
            return True
        return self.new_points == 0 and self.halt_reason not in _OK_HALTS


@dataclass
class RunReport:
    config: ExperimentConfig
    out_dir: Path
    entries: dict[str, MethodReport] = field(default_factory=dict)

    @property
    def all_failed(self) -> bool:
        return bool(self.entries) and all(e.failed for e in self.entries.values())

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_raw(),
            "methods": {m: r.as_dict() for m, r in self.entries.items()},
        }


def _resolve_out_dir(cfg: ExperimentConfig, override: Optional[str] = None) -> Path:
    for cand in (override, cfg.output, os.environ.get("INVSCHEME_OUT")):
        if cand:
            return Path(cand)
    return Path(".")


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> RunReport:
    """Run every requested method, write CSVs and the report JSON.

    One entry per method; a method failure (structured numeric error or a
    config gap such as a missing slope) becomes data in its entry instead
    of aborting the others.
    """
    directory = _resolve_out_dir(cfg, out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    report = RunReport(cfg, directory)
    conic = None
    try:
        conic = _exact_conic(cfg)
    except NumericError:
        conic = None
    for method in cfg.methods:
        entry = MethodReport(method)
        report.entries[method] = entry
        try:
            outcome = _DRIVERS[method](cfg)
        except (NumericError, ConfigError) as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
            continue
        traj = outcome.trajectory
        entry.points = len(traj.points)
        entry.new_points = outcome.new_points
        entry.error = outcome.error
        if traj.halt is not None:
            entry.halt_reason = traj.halt.reason
            entry.halt_x = traj.halt.x
            entry.halt_detail = traj.halt.detail
        if traj.points:
            entry.x_max = max(p.x for p in traj.points)
            entry.x_end = traj.points[-1].x
        if conic is not None and traj.points:
            entry.max_conic_distance = max(
                conic_distance(conic, p) for p in traj.points
            )
        if method == "invariant" and traj.diagnostics:
            entry.mesh_drift = max(d.mesh_residual for d in traj.diagnostics)
            entry.scheme_drift = max(d.scheme_residual for d in traj.diagnostics)
        if outcome.step_seconds:
            entry.wall_seconds_per_step = sum(outcome.step_seconds) / len(
                outcome.step_seconds
            )
        entry.singularity = detect_singularity(traj)
        filename = f"{cfg.name}_{method}.csv"
        with open(directory / filename, "w", newline="") as fh:
            csv.writer(fh).writerows(_csv_rows(outcome, cfg.order))
        entry.file = filename
    with open(directory / f"{cfg.name}_report.json", "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


# -- step-cost benchmark -------------------------------------------------------


def benchmark_step_cost(cfg: ExperimentConfig) -> dict:
    """Median wall seconds per accepted step, per requested method.

    Steps each method under a timer until the config's step budget runs
    out or the method halts; methods that survive the budget yield at
    least the budgeted number of measured steps, methods that halt early
    contribute the steps they managed.  The adaptive integrator is timed
    in aggregate (total time over accepted steps).  The soft expectation
    that the invariant scheme costs no more per step than standardFD is
    returned as a flag, never asserted.
    """
    per_step: dict[str, float] = {}
    steps_measured: dict[str, int] = {}
    for method in cfg.methods:
        times: list[float] = []
        try:
            if method == "invariant":
                state = bootstrap(cfg.realization, cfg.order, cfg.ics, cfg.h, f=cfg.f)
                from .schemes import step_with_diagnostics
                for _ in range(cfg.max_steps):
                    t0 = time.perf_counter()
                    try:
                        p_next, _diag = step_with_diagnostics(state)
                    except NumericError:
                        break
                    times.append(time.perf_counter() - t0)
                    state = advance_state(state, p_next)
            elif method == "standardFD":
                outcome = _drive_standard_fd(cfg)
                times = outcome.step_seconds
            else:
                outcome = _drive_rk45(cfg)
                times = outcome.step_seconds
        except (NumericError, ConfigError):
            times = []
        if times:
            per_step[method] = statistics.median(times)
            steps_measured[method] = len(times)
    soft = None
    if "invariant" in per_step and "standardFD" in per_step:
        soft = per_step["invariant"] <= per_step["standardFD"]
    return {
        "secondsPerStep": per_step,
        "stepsMeasured": steps_measured,
        "softInvariantFasterOrEqual": soft,
    }


# -- command line --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invscheme",
        description="Invariant difference schemes: experiments and reports.",
    )
    sub = parser.add_subparsers(dest="command")
    run_p = sub.add_parser("run", help="run a builtin or JSON-file experiment")
    run_p.add_argument("experiment", help="builtin name (fig1..fig4) or config path")
    run_p.add_argument("--h", type=float, default=None, help="mesh spacing override")
    run_p.add_argument("--max-steps", type=int, default=None)
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--methods", default=None, help="comma-separated method list")
    run_p.add_argument("--seed", type=int, default=None)
    sub.add_parser("list", help="list builtin experiments")
    val_p = sub.add_parser("validate", help="validate a JSON config file")
    val_p.add_argument("config")
    inv_p = sub.add_parser("invariants", help="evaluate invariants on given points")
    inv_p.add_argument("--realization", required=True, choices=["sl3", "sl4"])
    inv_p.add_argument(
        "--points", required=True,
        help="semicolon-separated x,y pairs, e.g. '1,8;1.2,8.3;1.5,8.5'",
    )
    return parser


def _load_config(spec: str) -> ExperimentConfig:
    for cfg in builtin_experiments():
        if cfg.name == spec:
            return cfg
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no builtin experiment or config file named {spec!r}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {spec}: {exc}")
    return config_from_raw(raw)


def _cmd_run(args) -> int:
    cfg = _load_config(args.experiment)
    raw = cfg.as_raw()
    if args.h is not None:
        raw["h"] = args.h
    if args.max_steps is not None:
        raw["maxSteps"] = args.max_steps
    if args.methods is not None:
        raw["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = config_from_raw(raw)
    report = run_experiment(cfg, out_dir=args.out)
    print(f"report: {report.out_dir / (cfg.name + '_report.json')}")
    for method, entry in report.entries.items():
        if entry.error:
            print(f"  {method}: error {entry.error}")
        else:
            print(
                f"  {method}: {entry.points} points, halt {entry.halt_reason} "
                f"at x={entry.halt_x}"
            )
    return 2 if report.all_failed else 0


def _cmd_invariants(args) -> int:
    realization = RealizationId(args.realization)
    pts = []
    try:
        for chunk in args.points.split(";"):
            xs, ys = chunk.split(",")
            pts.append(Point2(float(xs), float(ys)))
    except ValueError:
        print("points must look like 'x1,y1;x2,y2;...'", file=sys.stderr)
        return 1
    if len(pts) < 2:
        print("need at least two points", file=sys.stderr)
        return 1
    disc = disc_i1_sl3 if realization is RealizationId.SL3 else disc_i1_sl4
    try:
        for i in range(len(pts) - 1):
            print(f"disc_I1[{i},{i+1}] = {disc(pts[i], pts[i+1]):.17g}")
        for i in range(len(pts) - 2):
            win = window_invariants(realization, pts[i], pts[i + 1], pts[i + 2])
            print(f"J1[{i}..{i+2}] = {win.j1:.17g}")
        for i in range(len(pts) - 3):
            j2 = window_j2(realization, pts[i], pts[i + 1], pts[i + 2], pts[i + 3])
            print(f"J2[{i}..{i+3}] = {j2:.17g}")
    except NumericError as exc:
        print(f"invariant evaluation failed: {exc}", file=sys.stderr)
        return 2
    return 0


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        if args.command == "list":
            for cfg in builtin_experiments():
                print(cfg.name)
            return 0
        if args.command == "validate":
            path = Path(args.config)
            if not path.exists():
                print(f"no such file: {args.config}", file=sys.stderr)
                return 1
            try:
                raw = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                print(f"invalid JSON: {exc}", file=sys.stderr)
                return 1
            cfg = config_from_raw(raw)
            print(f"ok: {cfg.name} ({cfg.realization.value}, order {cfg.order})")
            return 0
        if args.command == "invariants":
            return _cmd_invariants(args)
        return _cmd_run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(cli_main())
