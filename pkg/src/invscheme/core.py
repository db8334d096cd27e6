"""Shared types and numeric predicates for the invariant-scheme package.

Both realizations of sl(2,R) used here act on the half plane x > 0; every
point fed to an invariant or a scheme has to stay inside it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional


class RealizationId(enum.Enum):
    """Which realization of sl(2,R) the scheme or invariant belongs to."""

    SL3 = "sl3"
    SL4 = "sl4"


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


class NumericError(Exception):
    """Base class for structured numeric failures.

    Attributes
    ----------
    detail : str
        Human readable description.
    location : object or None
        Point2, x value, or step index where the failure happened.
    """

    kind = "numericError"

    def __init__(self, detail: str = "", location: object | None = None):
        super().__init__(detail)
        self.detail = detail
        self.location = location


class DomainViolation(NumericError):
    """A point or jet left the admissible domain (x <= 0, bad slope, ...)."""

    kind = "domainViolation"


class NoIntersection(NumericError):
    """The step's line/conic system has no admissible real root."""

    kind = "noIntersection"


class NewtonDivergence(NumericError):
    """A Newton iteration failed to converge within its budget."""

    kind = "newtonDivergence"


class StepUnderflow(NumericError):
    """An adaptive integrator's step size collapsed below resolution."""

    kind = "stepUnderflow"


class SingularityDetected(NumericError):
    """State magnitude exceeded the blow-up threshold."""

    kind = "singularityDetected"


def validate_point(p: Point2, realization: RealizationId) -> bool:
    """True when p lies in the open half plane x > 0 (both realizations)."""
    del realization
    return p.is_finite() and p.x > 0.0


def near_equal(a: float, b: float, rel_tol: float) -> bool:
    """Mixed absolute/relative comparison: |a-b| <= relTol*(1+max(|a|,|b|))."""
    if not rel_tol > 0.0:
        raise ValueError("rel_tol must be positive")
    return abs(a - b) <= rel_tol * (1.0 + max(abs(a), abs(b)))


@dataclass(frozen=True)
class SchemeSpec:
    """Defines one invariant scheme run.

    order 2 solves J1 = C on a constant mesh invariant K; order 3 solves
    J2 = F(J1) on the same kind of mesh.  C must be nonnegative because J1
    is a principal square root.
    """

    realization: RealizationId
    order: int
    K: float
    C: Optional[float] = None
    F: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.order not in (2, 3):
            raise ValueError("order must be 2 or 3")
        if self.order == 2:
            if self.C is None:
                raise ValueError("order-2 scheme needs the constant C")
            if self.C < 0.0:
                raise ValueError("C must be nonnegative (J1 is a principal root)")
        if self.order == 3 and self.F is None:
            raise ValueError("order-3 scheme needs the right-hand side F")
        if not (math.isfinite(self.K) and self.K > 0.0):
            raise ValueError("mesh constant K must be finite and positive")


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step record emitted by the invariant stepper.

    j1/j2 are the discrete invariant combinations evaluated on the window
    that produced the step; mesh_residual and scheme_residual are the
    residuals of the two equations the step solver enforced.
    """

    j1: float
    mesh_residual: float
    scheme_residual: float
    iterations: int
    j2: Optional[float] = None


@dataclass(frozen=True)
class HaltInfo:
    reason: str
    x: Optional[float] = None
    detail: str = ""


@dataclass
class Trajectory:
    """Ordered points plus the per-step diagnostics that produced them.

    For a scheme of stencil width w, diagnostics has length
    len(points) - (w - 1): one record per accepted step.
    """

    points: list[Point2] = field(default_factory=list)
    diagnostics: list[StepDiagnostics] = field(default_factory=list)
    halt: Optional[HaltInfo] = None

    @property
    def xs(self) -> list[float]:
        return [p.x for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p.y for p in self.points]

    def __len__(self) -> int:
        return len(self.points)
