"""Differential and difference invariants of two sl(2,R) realizations.

The sl3 realization is spanned by d_y, x d_x + y d_y, 2xy d_x + (y^2 - x^2) d_y
and the sl4 realization by d_y, x d_x + y d_y, 2xy d_x + (x^2 + y^2) d_y,
both acting on the half plane x > 0.  Each admits two low-order differential
invariants (I1, I2) and a three-point difference invariant; J1 and J2 are the
combinations of difference invariants that converge to I1 and I2 as the mesh
is refined.

Sign convention: all square roots are principal, so discrete invariants and
J1 are nonnegative and J1 converges to |I1|.  Along an sl3 circle solution
with center (cx, cy) and radius r the continuous I1 equals (cx/r)*sign(y-cy);
along an sl4 hyperbola (x-cx)^2-(y-cy)^2=r^2 it equals -(cx/r)*sign(y-cy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import DomainViolation, Point2, RealizationId

_RADICAND_SLACK = 1e-12


@dataclass(frozen=True)
class JetPoint:
    """A point of the jet space: x plus derivatives of y (y itself drops out)."""

    x: float
    yp: float
    ypp: float
    yppp: Optional[float] = None


# -- continuous invariants ---------------------------------------------------


def cont_i1_sl3(jet: JetPoint) -> float:
    """First sl3 invariant (y'(1+y'^2) - x y'') / (1+y'^2)^(3/2)."""
    if jet.x <= 0.0:
        raise DomainViolation("jet needs x > 0", jet.x)
    d = 1.0 + jet.yp * jet.yp
    return (jet.yp * d - jet.x * jet.ypp) / d**1.5


def cont_i2_sl3(jet: JetPoint) -> float:
    """Second sl3 invariant (3x^2 y' y''^2 - x^2 y'''(1+y'^2)) / (1+y'^2)^3."""
    if jet.x <= 0.0:
        raise DomainViolation("jet needs x > 0", jet.x)
    if jet.yppp is None:
        raise DomainViolation("second invariant needs y'''")
    d = 1.0 + jet.yp * jet.yp
    x2 = jet.x * jet.x
    return (3.0 * x2 * jet.yp * jet.ypp**2 - x2 * jet.yppp * d) / d**3


def cont_i1_sl4(jet: JetPoint) -> float:
    """First sl4 invariant (x y'' + y'(y'^2-1)) / (y'^2-1)^(3/2); needs |y'| > 1."""
    if jet.x <= 0.0:
        raise DomainViolation("jet needs x > 0", jet.x)
    e = jet.yp * jet.yp - 1.0
    if e <= 0.0:
        raise DomainViolation("sl4 first invariant needs |y'| > 1", jet.yp)
    return (jet.x * jet.ypp + jet.yp * e) / e**1.5


def cont_i2_sl4(jet: JetPoint) -> float:
    """Second sl4 invariant; defined wherever y' != +-1."""
    if jet.x <= 0.0:
        raise DomainViolation("jet needs x > 0", jet.x)
    if jet.yppp is None:
        raise DomainViolation("second invariant needs y'''")
    u, v, w, x = jet.yp, jet.ypp, jet.yppp, jet.x
    if u == 1.0 or u == -1.0:
        raise DomainViolation("sl4 second invariant needs y' != +-1", u)
    num = 2.0 * x * x * (u + 1.0) * w + 3.0 * (
        (u - 1.0) * (u + 1.0) ** 2 * (3.0 * u * u - 1.0)
        + 4.0 * x * u * (u + 1.0) * v
        - 2.0 * x * x * v * v
    )
    den = (u - 1.0) ** 2 * (u + 1.0) ** 3
    return num / den


# -- discrete invariants -----------------------------------------------------


def _require_domain(*points: Point2) -> None:
    for p in points:
        if not (p.is_finite() and p.x > 0.0):
            raise DomainViolation("point outside half plane x > 0", p)


def disc_i1_sl3(pa: Point2, pb: Point2) -> float:
    """Three-point sl3 difference invariant on one pair:
    sqrt(((dx)^2 + (dy)^2) / (x_a x_b))."""
    _require_domain(pa, pb)
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    return math.sqrt((dx * dx + dy * dy) / (pa.x * pb.x))


def disc_i2_sl3(pa: Point2, pc: Point2) -> float:
    """Same chord invariant evaluated on the outer pair of a 3-point window."""
    return disc_i1_sl3(pa, pc)


def _sl4_pair(pa: Point2, pb: Point2) -> tuple[float, float]:
    """(e, den) with e = (dy)^2-(dx)^2 and den = 4 x_a x_b - e."""
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    e = dy * dy - dx * dx
    return e, 4.0 * pa.x * pb.x - e


def disc_i1_sl4(pa: Point2, pb: Point2) -> float:
    """Three-point sl4 difference invariant on one pair:
    sqrt(((dy)^2 - (dx)^2) / (4 x_a x_b - ((dy)^2 - (dx)^2)))."""
    _require_domain(pa, pb)
    e, den = _sl4_pair(pa, pb)
    if e < 0.0:
        raise DomainViolation("sl4 pair needs (dy)^2 >= (dx)^2", pb)
    if den <= 0.0:
        raise DomainViolation("sl4 pair denominator is not positive", pb)
    return math.sqrt(e / den)


def disc_i2_sl4(pa: Point2, pc: Point2) -> float:
    """Same invariant evaluated on the outer pair of a 3-point window."""
    return disc_i1_sl4(pa, pc)


# -- J combinations ----------------------------------------------------------


def _checked_sqrt(radicand: float, what: str) -> float:
    if radicand < 0.0:
        if radicand > -_RADICAND_SLACK:
            return 0.0
        raise DomainViolation(f"{what} has negative radicand", radicand)
    return math.sqrt(radicand)


def j1_sl3(i1n: float, i1n1: float, i2n1: float) -> float:
    """sqrt(1 - 8(I2 - (I1n + I1n1)) / (I1n I1n1 (I1n + I1n1)))."""
    den = i1n * i1n1 * (i1n + i1n1)
    if den == 0.0:
        raise DomainViolation("J1 needs nonzero pair invariants")
    rad = 1.0 - 8.0 * (i2n1 - (i1n + i1n1)) / den
    return _checked_sqrt(rad, "J1_sl3")


def j2_sl3(i1n: float, i1n1: float, i1n2: float, j1n1: float, j1n2: float) -> float:
    """3 (J1^{n+2} - J1^{n+1}) / (I1^n + I1^{n+1} + I1^{n+2})."""
    s = i1n + i1n1 + i1n2
    if s == 0.0:
        raise DomainViolation("J2 needs a nonzero invariant sum")
    return 3.0 * (j1n2 - j1n1) / s


def j1_sl4(i1n: float, i1n1: float, i2n1: float) -> float:
    """sqrt(2) * sqrt((I2 - (I1n + I1n1)) / (I1n I1n1 (I1n + I1n1)) - 1)."""
    den = i1n * i1n1 * (i1n + i1n1)
    if den == 0.0:
        raise DomainViolation("J1 needs nonzero pair invariants")
    rad = (i2n1 - (i1n + i1n1)) / den - 1.0
    return math.sqrt(2.0) * _checked_sqrt(rad, "J1_sl4")


def j2_sl4(i1n: float, i1n1: float, i1n2: float, j1n1: float, j1n2: float) -> float:
    """3 (J1^{n+2} - J1^{n+1}) / sum(I1) + 6 (J1^{n+1})^2 + 3."""
    s = i1n + i1n1 + i1n2
    if s == 0.0:
        raise DomainViolation("J2 needs a nonzero invariant sum")
    return 3.0 * (j1n2 - j1n1) / s + 6.0 * j1n1 * j1n1 + 3.0


# -- window evaluation -------------------------------------------------------
#
# J1^2 - 1 is a ratio of O(h^4) differences of O(h^2) quantities, so feeding
# rounded pair invariants into the formulas above loses ~h^-2 digits.  The
# window evaluators below rebuild the difference I2 - I1n - I1n1 as a single
# fraction in the coordinates, which keeps the relative error near machine
# precision for the meshes the schemes use.


@dataclass(frozen=True)
class WindowInvariants:
    """Pair invariants of a 3-point window plus a well-conditioned J1."""

    i1n: float
    i1n1: float
    i2n1: float
    j1: float


def _window_sl3(pa: Point2, pb: Point2, pc: Point2) -> WindowInvariants:
    _require_domain(pa, pb, pc)

    def chord2(p: Point2, q: Point2) -> float:
        dx = q.x - p.x
        dy = q.y - p.y
        return dx * dx + dy * dy

    cab = chord2(pa, pb)
    cbc = chord2(pb, pc)
    cac = chord2(pa, pc)
    i1n = math.sqrt(cab / (pa.x * pb.x))
    i1n1 = math.sqrt(cbc / (pb.x * pc.x))
    i2 = math.sqrt(cac / (pa.x * pc.x))
    # I2^2 - I1n^2 - I1n1^2 as one fraction, then
    # I2 - I1n - I1n1 = (that - 2 I1n I1n1) / (I2 + I1n + I1n1)
    p_num = cac * pb.x - cab * pc.x - cbc * pa.x
    p_val = p_num / (pa.x * pb.x * pc.x)
    n_val = p_val - 2.0 * i1n * i1n1
    denom = i1n * i1n1 * (i1n + i1n1)
    if denom == 0.0 or (i2 + i1n + i1n1) == 0.0:
        raise DomainViolation("degenerate window (coincident points)", pb)
    q_val = n_val / (i2 + i1n + i1n1)
    rad = 1.0 - 8.0 * q_val / denom
    return WindowInvariants(i1n, i1n1, i2, _checked_sqrt(rad, "window J1"))


def _window_sl4(pa: Point2, pb: Point2, pc: Point2) -> WindowInvariants:
    _require_domain(pa, pb, pc)
    eab, dab = _sl4_pair(pa, pb)
    ebc, dbc = _sl4_pair(pb, pc)
    eac, dac = _sl4_pair(pa, pc)
    for e, d, loc in ((eab, dab, pb), (ebc, dbc, pc), (eac, dac, pc)):
        if e < 0.0 or d <= 0.0:
            raise DomainViolation("sl4 window pair outside domain", loc)
    i1n = math.sqrt(eab / dab)
    i1n1 = math.sqrt(ebc / dbc)
    i2 = math.sqrt(eac / dac)
    p_num = eac * dab * dbc - eab * dac * dbc - ebc * dac * dab
    p_val = p_num / (dac * dab * dbc)
    n_val = p_val - 2.0 * i1n * i1n1
    denom = i1n * i1n1 * (i1n + i1n1)
    if denom == 0.0 or (i2 + i1n + i1n1) == 0.0:
        raise DomainViolation("degenerate window (coincident points)", pb)
    q_val = n_val / (i2 + i1n + i1n1)
    rad = 2.0 * (q_val / denom - 1.0)
    return WindowInvariants(i1n, i1n1, i2, _checked_sqrt(rad, "window J1"))


def window_invariants(
    realization: RealizationId, pa: Point2, pb: Point2, pc: Point2
) -> WindowInvariants:
    """Pair invariants and J1 of one 3-point window, from coordinates."""
    if realization is RealizationId.SL3:
        return _window_sl3(pa, pb, pc)
    return _window_sl4(pa, pb, pc)


def window_j1(realization: RealizationId, pa: Point2, pb: Point2, pc: Point2) -> float:
    return window_invariants(realization, pa, pb, pc).j1


def window_j2(
    realization: RealizationId, pa: Point2, pb: Point2, pc: Point2, pd: Point2
) -> float:
    """J2 of a 4-point window, built from two overlapping 3-point windows."""
    w1 = window_invariants(realization, pa, pb, pc)
    w2 = window_invariants(realization, pb, pc, pd)
    s = w1.i1n + w1.i1n1 + w2.i1n1
    if realization is RealizationId.SL3:
        return 3.0 * (w2.j1 - w1.j1) / s
    return 3.0 * (w2.j1 - w1.j1) / s + 6.0 * w1.j1 * w1.j1 + 3.0
