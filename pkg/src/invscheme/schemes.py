"""Symmetry-preserving difference steppers for the sl3 and sl4 realizations.

A step advances a window of mesh points by solving two equations for the
next point p: the mesh equation fixes the pair invariant of the newest
pair at the mesh constant K, and the scheme equation fixes the pair
invariant of the outer pair at a target M obtained by inverting the
three-point invariant relation (J1 = C for order 2, the J2 = F(J1) update
rule for order 3).  Each equation is a level set of a pair invariant,
which is a conic in the coordinates of p; subtracting one conic equation
from the other leaves a straight line, so every step reduces to a single
line/conic intersection.  A short Newton polish removes the intersection
roundoff, and a damped 2-D Newton on the pair-invariant equations serves
as an independent fallback for degenerate reductions.

Root selection: the intersection quadratic has two roots, mirror images
across the line.  Away from tangency both lie forward of the motion, so
forward filtering alone cannot separate them; what distinguishes them is
the side the trajectory turns to.  The stepper therefore carries the
turning side (sign of the cross product of consecutive displacements) in
its state and keeps it continuous from step to step.

J1 is a principal (nonnegative) square root everywhere.  An order-3 step
whose J1 target comes out negative, or whose outer-pair target M is not
positive, is geometrically impossible at this mesh constant and raises
NoIntersection, which a runner records as the halting event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional, Sequence

from .baselines import ode_rhs_library, rk45_integrate
from .core import (
    DomainViolation,
    HaltInfo,
    NewtonDivergence,
    NoIntersection,
    NumericError,
    Point2,
    RealizationId,
    SchemeSpec,
    StepDiagnostics,
    Trajectory,
    near_equal,
    validate_point,
)
from .exact import (
    fit_circle,
    fit_hyperbola,
    next_chord_point,
    param_of,
    point_at,
)
from .invariants import disc_i1_sl3, disc_i1_sl4, window_j1, window_j2

# Residual level (on the pair-invariant equations) beyond which a step is
# rejected as unreliable rather than appended to the trajectory.
_RESIDUAL_HALT = 5e-11

# Mesh precondition guard: window pairs must agree with K at least this
# well (bootstrap promises 1e-6, solved steps are near machine precision).
_MESH_GUARD = 1e-5


def square(u: float) -> float:
    """Default order-3 right-hand side F(J1) = J1^2."""
    return u * u


@dataclass(frozen=True)
class SchemeState:
    """Stepper state: the sliding window plus continuation bookkeeping.

    window holds the points a step needs (2 for order 2, 3 for order 3),
    oldest first.  last_j1 is the three-point invariant of the current
    window (order 3 only).  side is the turning side carried for root
    selection: +1, -1, or 0 when not yet established.
    """

    window: tuple[Point2, ...]
    spec: SchemeSpec
    last_j1: Optional[float] = None
    side: float = 0.0

    def __post_init__(self):
        if len(self.window) != self.spec.order:
            raise ValueError(
                f"order-{self.spec.order} scheme needs a window of "
                f"{self.spec.order} points, got {len(self.window)}"
            )
        if self.spec.order == 3 and self.last_j1 is None:
            raise ValueError("order-3 state needs last_j1")


@dataclass(frozen=True)
class LineCoeffs:
    """Line a*x + b*y = d with (a, b) != (0, 0)."""

    a: float
    b: float
    d: float

    def __post_init__(self):
        if self.a == 0.0 and self.b == 0.0:
            raise ValueError("line normal must be nonzero")


@dataclass(frozen=True)
class ConicCoeffs:
    """Conic qxx*x^2 + qxy*x*y + qyy*y^2 + qx*x + qy*y + q0 = 0."""

    qxx: float
    qxy: float
    qyy: float
    qx: float
    qy: float
    q0: float

    def __post_init__(self):
        if self.qxx == 0.0 and self.qxy == 0.0 and self.qyy == 0.0:
            raise ValueError("conic must have a quadratic part")


def _pair_disc(realization: RealizationId) -> Callable[[Point2, Point2], float]:
    return disc_i1_sl3 if realization is RealizationId.SL3 else disc_i1_sl4


def mesh_conic(realization: RealizationId, ref: Point2, t: float) -> ConicCoeffs:
    """The level set {p : pair invariant of (ref, p) = t} as a conic.

    For sl3 the pair invariant squared is |p - ref|^2 / (ref.x * p.x), so
    the level set is a circle-type conic; for sl4 it is e / (4 ref.x p.x
    - e) with e = dy^2 - dx^2, a rectangular hyperbola-type conic.
    """
    if realization is RealizationId.SL3:
        return ConicCoeffs(
            1.0, 0.0, 1.0,
            -(2.0 + t * t) * ref.x,
            -2.0 * ref.y,
            ref.x * ref.x + ref.y * ref.y,
        )
    ph = t * t / (1.0 + t * t)
    return ConicCoeffs(
        -1.0, 0.0, 1.0,
        (2.0 - 4.0 * ph) * ref.x,
        -2.0 * ref.y,
        ref.y * ref.y - ref.x * ref.x,
    )


@dataclass(frozen=True)
class SchemeTargets:
    """Per-step targets: measured window pair invariant, outer target M,
    and (order 3 only) the next J1 value produced by the update rule."""

    i1_window: float
    m: float
    j1_next: Optional[float] = None


def _invert_j1(realization: RealizationId, sum_pair: float, prod: float, t: float) -> float:
    """Outer-pair invariant M that makes the window's J1 equal t.

    Solves the J1 formula for the outer pair invariant: with s = i1n +
    i1n1 and q = i1n * i1n1, sl3 gives M = s + q*s*(1 - t^2)/8 and sl4
    gives M = s + q*s*(1 + t^2/2).
    """
    if realization is RealizationId.SL3:
        return sum_pair + prod * sum_pair * (1.0 - t * t) / 8.0
    return sum_pair + prod * sum_pair * (1.0 + t * t / 2.0)


def scheme_targets(state: SchemeState) -> SchemeTargets:
    """Compute the step's target equations from the current window.

    Raises NoIntersection when the targets are geometrically impossible
    (negative J1 target on the principal branch, or nonpositive M).
    """
    spec = state.spec
    disc = _pair_disc(spec.realization)
    k = spec.K
    if spec.order == 2:
        i1n = disc(state.window[-2], state.window[-1])
        t = spec.C
        m = _invert_j1(spec.realization, i1n + k, i1n * k, t)
        j1_next = None
    else:
        i1n = disc(state.window[-3], state.window[-2])
        i1n1 = disc(state.window[-2], state.window[-1])
        s3 = i1n + i1n1 + k
        tau = state.last_j1
        if spec.realization is RealizationId.SL3:
            j1_next = tau + s3 / 3.0 * spec.F(tau)
        else:
            j1_next = tau + s3 / 3.0 * (spec.F(tau) - 6.0 * tau * tau - 3.0)
        if j1_next < 0.0:
            raise NoIntersection(
                f"J1 target {j1_next:.3e} is negative on the principal branch",
                state.window[-1],
            )
        m = _invert_j1(spec.realization, i1n1 + k, i1n1 * k, j1_next)
        i1n = i1n1
    if m <= 0.0:
        raise NoIntersection(
            f"outer pair invariant target {m:.3e} is not positive",
            state.window[-1],
        )
    return SchemeTargets(i1n, m, j1_next)


def _check_mesh(state: SchemeState) -> None:
    disc = _pair_disc(state.spec.realization)
    for pa, pb in zip(state.window, state.window[1:]):
        if not near_equal(disc(pa, pb), state.spec.K, _MESH_GUARD):
            raise DomainViolation(
                f"window pair invariant {disc(pa, pb):.6e} does not match "
                f"the mesh constant {state.spec.K:.6e}",
                pb,
            )


def reduce_to_line_conic(state: SchemeState) -> tuple[LineCoeffs, ConicCoeffs]:
    """Rewrite the step's two conic equations as a line plus one conic.

    The mesh equation is the conic around the newest window point with
    parameter K; the scheme equation is the conic around the previous
    point with parameter M.  Their quadratic parts are identical, so the
    difference is a line; (line, mesh conic) has exactly the same solution
    set as the original pair.  The line is returned with a unit normal.

    Raises DomainViolation when the difference degenerates (no line),
    in which case the caller should fall back to the 2-D Newton solver.
    """
    targets = scheme_targets(state)
    real = state.spec.realization
    p_last = state.window[-1]
    p_prev = state.window[-2]
    mesh = mesh_conic(real, p_last, state.spec.K)
    outer = mesh_conic(real, p_prev, targets.m)
    a = mesh.qx - outer.qx
    b = mesh.qy - outer.qy
    d = outer.q0 - mesh.q0
    nrm = math.hypot(a, b)
    if nrm == 0.0:
        raise DomainViolation("conic difference is degenerate, no line", p_last)
    return LineCoeffs(a / nrm, b / nrm, d / nrm), mesh


def _roots_on_line(
    line: LineCoeffs, conic: ConicCoeffs, anchor: Point2, band: float
) -> list[Point2]:
    """Intersection points of line and conic via a stable quadratic.

    The line is parametrized from the foot of the perpendicular dropped
    from anchor, which keeps the parameter small near the region of
    interest.  band is the absolute tolerance below zero within which the
    discriminant is treated as a tangency (double root); anything more
    negative raises NoIntersection.
    """
    nrm = math.hypot(line.a, line.b)
    la, lb, ld = line.a / nrm, line.b / nrm, line.d / nrm
    t0 = la * anchor.x + lb * anchor.y - ld
    bx, by = anchor.x - t0 * la, anchor.y - t0 * lb
    dx, dy = lb, -la
    alpha = conic.qxx * dx * dx + conic.qxy * dx * dy + conic.qyy * dy * dy
    beta = (
        2.0 * conic.qxx * bx * dx
        + conic.qxy * (bx * dy + by * dx)
        + 2.0 * conic.qyy * by * dy
        + conic.qx * dx
        + conic.qy * dy
    )
    gamma = (
        conic.qxx * bx * bx
        + conic.qxy * bx * by
        + conic.qyy * by * by
        + conic.qx * bx
        + conic.qy * by
        + conic.q0
    )
    if abs(alpha) < 1e-13 * (abs(beta) + 1.0):
        if beta == 0.0:
            raise NoIntersection("line/conic system is degenerate", anchor)
        ts = [-gamma / beta]
    else:
        disc = beta * beta - 4.0 * alpha * gamma
        if disc < 0.0:
            if disc >= -band:
                disc = 0.0
            else:
                raise NoIntersection(
                    f"negative intersection discriminant {disc:.3e}", anchor
                )
        sq = math.sqrt(disc)
        q = -0.5 * (beta + math.copysign(sq, beta))
        ts = [q / alpha] if q == 0.0 else [q / alpha, gamma / q]
    return [Point2(bx + t * dx, by + t * dy) for t in ts]


def solve_line_conic(
    line: LineCoeffs, conic: ConicCoeffs, prev: Point2, prev_dir: tuple[float, float]
) -> Point2:
    """Pick the line/conic intersection that continues past prev.

    Substitutes the line into the conic and solves the quadratic with the
    stable (sign-aware) root formula.  Roots whose displacement from prev
    has positive inner product with prev_dir qualify; of two qualifying
    roots the one farther from prev wins, which avoids re-selecting the
    current point.  A discriminant within [-1e-12, 0] counts as tangency
    and yields the double root; below that raises NoIntersection, as does
    the absence of any qualifying root.
    """
    roots = _roots_on_line(line, conic, prev, band=1e-12)
    best: Optional[Point2] = None
    best_d2 = -1.0
    for r in roots:
        rx, ry = r.x - prev.x, r.y - prev.y
        if rx * prev_dir[0] + ry * prev_dir[1] <= 0.0:
            continue
        d2 = rx * rx + ry * ry
        if d2 > best_d2:
            best, best_d2 = r, d2
    if best is None:
        raise NoIntersection("no root continues past the previous point", prev)
    return best


def turning_side(p0: Point2, p1: Point2, p2: Point2, fallback: float = 0.0) -> float:
    """Sign of the cross product of displacements p0->p1 and p1->p2.

    Returns fallback when the three points are collinear to relative
    precision 1e-9, so an established side survives straight stretches.
    """
    vx, vy = p1.x - p0.x, p1.y - p0.y
    wx, wy = p2.x - p1.x, p2.y - p1.y
    cr = vx * wy - vy * wx
    if abs(cr) > 1e-9 * math.hypot(vx, vy) * math.hypot(wx, wy):
        return 1.0 if cr > 0.0 else -1.0
    return fallback


def _pick_step_root(
    roots: Sequence[Point2], p_prev: Point2, p_last: Point2, side: float
) -> Point2:
    """Forward, in-domain root consistent with the carried turning side.

    Of the mirror pair, prefer the root whose turn matches side (any turn
    matches side 0); among equals take the root nearest the linear
    extrapolation of the last chord.  The extrapolation misses the smooth
    continuation by O(K^2) while the mirror root sits O(K) away, so
    nearness separates them cleanly; picking by forward distance instead
    can capture the mirror, whose displacement in the hyperbolic-rotation
    geometry grows without bound as chords approach slope +-1.
    """
    pdx, pdy = p_last.x - p_prev.x, p_last.y - p_prev.y
    gx, gy = p_last.x + pdx, p_last.y + pdy
    best: Optional[Point2] = None
    best_key: tuple[bool, float] | None = None
    for r in roots:
        if r.x <= 0.0:
            continue
        rx, ry = r.x - p_last.x, r.y - p_last.y
        fwd = rx * pdx + ry * pdy
        if fwd <= 0.0:
            continue
        cross = pdx * ry - pdy * rx
        key = (cross * side >= 0.0, -math.hypot(r.x - gx, r.y - gy))
        if best is None or key > best_key:
            best, best_key = r, key
    if best is None:
        raise NoIntersection("no admissible forward root", p_last)
    return best


def _disc_grad(
    realization: RealizationId, ref: Point2, p: Point2
) -> tuple[float, float, float]:
    """Pair invariant of (ref, p) and its gradient with respect to p."""
    dx, dy = p.x - ref.x, p.y - ref.y
    if realization is RealizationId.SL3:
        den = ref.x * p.x
        if den <= 0.0:
            raise DomainViolation("pair invariant needs x > 0", p)
        d2 = (dx * dx + dy * dy) / den
        d = math.sqrt(d2)
        if d == 0.0:
            raise DomainViolation("coincident pair", p)
        gx = (2.0 * dx / den - d2 / p.x) / (2.0 * d)
        gy = dy / (den * d)
        return d, gx, gy
    e = dy * dy - dx * dx
    den = 4.0 * ref.x * p.x - e
    if e <= 0.0 or den <= 0.0:
        raise DomainViolation("pair outside the sl4 invariant domain", p)
    d2 = e / den
    d = math.sqrt(d2)
    ex, ey = -2.0 * dx, 2.0 * dy
    dnx, dny = 4.0 * ref.x - ex, -ey
    gx = (ex * den - e * dnx) / (den * den) / (2.0 * d)
    gy = (ey * den - e * dny) / (den * den) / (2.0 * d)
    return d, gx, gy


def _polish(
    realization: RealizationId,
    p_prev: Point2,
    p_last: Point2,
    k: float,
    m: float,
    p: Point2,
) -> tuple[Point2, float, int]:
    """Few analytic Newton corrections on the two pair-invariant equations.

    Returns (point, max residual, iterations).  The residual is infinite
    when the iterate leaves the invariant domain.
    """
    iters = 0
    for _ in range(4):
        try:
            da, gax, gay = _disc_grad(realization, p_last, p)
            db, gbx, gby = _disc_grad(realization, p_prev, p)
        except DomainViolation:
            return p, math.inf, iters
        r1, r2 = da - k, db - m
        res = max(abs(r1), abs(r2))
        if res < 1e-14 * max(1.0, k):
            return p, res, iters
        det = gax * gby - gay * gbx
        if det == 0.0:
            return p, res, iters
        sx = (gby * r1 - gay * r2) / det
        sy = (gax * r2 - gbx * r1) / det
        p = Point2(p.x - sx, p.y - sy)
        iters += 1
    try:
        da, _, _ = _disc_grad(realization, p_last, p)
        db, _, _ = _disc_grad(realization, p_prev, p)
        res = max(abs(da - k), abs(db - m))
    except DomainViolation:
        res = math.inf
    return p, res, iters


def _step_residuals(state: SchemeState, m: float, p: Point2) -> tuple[float, float]:
    disc = _pair_disc(state.spec.realization)
    return (
        abs(disc(state.window[-1], p) - state.spec.K),
        abs(disc(state.window[-2], p) - m),
    )


def newton_fallback_step(state: SchemeState, guess: Point2) -> Point2:
    """Damped 2-D Newton on the step's pair-invariant equations.

    Independent of the line/conic reduction: finite-difference Jacobian
    (relative step 1e-7), at most 50 iterations, halving the update up to
    20 times whenever the residual norm fails to decrease.  Succeeds when
    both residuals are at most 1e-12; an already-exact guess returns
    immediately.  Raises NewtonDivergence otherwise.
    """
    targets = scheme_targets(state)
    disc = _pair_disc(state.spec.realization)
    p_last, p_prev = state.window[-1], state.window[-2]
    k, m = state.spec.K, targets.m

    def residuals(p: Point2) -> tuple[float, float]:
        if not validate_point(p, state.spec.realization):
            raise DomainViolation("iterate left the half plane", p)
        return disc(p_last, p) - k, disc(p_prev, p) - m

    def norm(r: tuple[float, float]) -> float:
        return max(abs(r[0]), abs(r[1]))

    p = guess
    try:
        r = residuals(p)
    except DomainViolation as exc:
        raise NewtonDivergence(f"guess outside domain: {exc.detail}", guess)
    for _ in range(50):
        if norm(r) <= 1e-12:
            return p
        hx = 1e-7 * max(abs(p.x), 1.0)
        hy = 1e-7 * max(abs(p.y), 1.0)
        try:
            rx = residuals(Point2(p.x + hx, p.y))
            ry = residuals(Point2(p.x, p.y + hy))
        except DomainViolation:
            raise NewtonDivergence("Jacobian probe left the domain", p)
        j11 = (rx[0] - r[0]) / hx
        j12 = (ry[0] - r[0]) / hy
        j21 = (rx[1] - r[1]) / hx
        j22 = (ry[1] - r[1]) / hy
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            raise NewtonDivergence("singular Jacobian in fallback step", p)
        sx = (j22 * r[0] - j12 * r[1]) / det
        sy = (j11 * r[1] - j21 * r[0]) / det
        scale = 1.0
        for _ in range(20):
            cand = Point2(p.x - scale * sx, p.y - scale * sy)
            try:
                rc = residuals(cand)
            except DomainViolation:
                scale *= 0.5
                continue
            if norm(rc) < norm(r):
                p, r = cand, rc
                break
            scale *= 0.5
        else:
            raise NewtonDivergence("damping exhausted without progress", p)
    if norm(r) <= 1e-12:
        return p
    raise NewtonDivergence(f"no convergence, residual {norm(r):.3e}", p)


def _extrapolated_guess(state: SchemeState) -> Point2:
    """Polynomial continuation of the window, quadratic when three points
    are available.

    The extra order matters: the step's mirror root pair straddles the
    last chord line only O(K^2) apart, so a linear guess sits ambiguously
    between the two roots, while the quadratic one lands O(K^3) from the
    true continuation and well inside its Newton basin.
    """
    w = state.window
    if len(w) >= 3:
        return Point2(
            w[-3].x - 3.0 * w[-2].x + 3.0 * w[-1].x,
            w[-3].y - 3.0 * w[-2].y + 3.0 * w[-1].y,
        )
    p_prev, p_last = w[-2], w[-1]
    return Point2(2.0 * p_last.x - p_prev.x, 2.0 * p_last.y - p_prev.y)


def step_with_diagnostics(state: SchemeState) -> tuple[Point2, StepDiagnostics]:
    """One scheme step: line/conic fast path, Newton fallback, diagnostics."""
    _check_mesh(state)
    spec = state.spec
    targets = scheme_targets(state)
    p_prev, p_last = state.window[-2], state.window[-1]
    try:
        line, conic = reduce_to_line_conic(state)
        roots = _roots_on_line(line, conic, p_last, band=1e-10)
        root = _pick_step_root(roots, p_prev, p_last, state.side)
        root, res, iters = _polish(
            spec.realization, p_prev, p_last, spec.K, targets.m, root
        )
    except DomainViolation:
        root = newton_fallback_step(state, _extrapolated_guess(state))
        res = max(_step_residuals(state, targets.m, root))
        iters = 50
    if res > _RESIDUAL_HALT:
        root = newton_fallback_step(state, root)
        res = max(_step_residuals(state, targets.m, root))
        iters += 1
        if res > _RESIDUAL_HALT:
            raise NewtonDivergence(
                f"step residual {res:.3e} did not converge", root
            )
    mesh_res, scheme_res = _step_residuals(state, targets.m, root)
    j1 = window_j1(spec.realization, p_prev, p_last, root)
    j2 = None
    if spec.order == 3:
        j2 = window_j2(spec.realization, state.window[-3], p_prev, p_last, root)
    return root, StepDiagnostics(
        j1=j1,
        mesh_residual=mesh_res,
        scheme_residual=scheme_res,
        iterations=iters,
        j2=j2,
    )


def step_order2(state: SchemeState) -> Point2:
    """Next point of the order-2 scheme (J1 = C on a constant-K mesh)."""
    if state.spec.order != 2:
        raise ValueError("step_order2 needs an order-2 state")
    return step_with_diagnostics(state)[0]


def step_order3(state: SchemeState) -> Point2:
    """Next point of the order-3 scheme (J2 = F(J1) on a constant-K mesh)."""
    if state.spec.order != 3:
        raise ValueError("step_order3 needs an order-3 state")
    return step_with_diagnostics(state)[0]


def advance_state(state: SchemeState, p_next: Point2) -> SchemeState:
    """Slide the window over p_next and update side and last_j1."""
    new_side = turning_side(
        state.window[-2], state.window[-1], p_next, fallback=state.side
    )
    last_j1 = None
    if state.spec.order == 3:
        last_j1 = scheme_targets(state).j1_next
    return replace(
        state,
        window=state.window[1:] + (p_next,),
        last_j1=last_j1,
        side=new_side,
    )


# -- bootstrap ----------------------------------------------------------------


def _pick_direction(sol, t0: float, h: float) -> float:
    """Walk direction on a conic: increasing y first, increasing x on ties."""
    p0 = point_at(sol, t0)
    probes = {}
    for d in (1.0, -1.0):
        p1 = point_at(sol, next_chord_point(sol, t0, h, d))
        probes[d] = (p1.y - p0.y, p1.x - p0.x)
    return max(probes, key=lambda d: probes[d])


def _ode_curve(
    realization: RealizationId,
    ics: Mapping[str, float],
    f: Callable[[float], float],
) -> Callable[[float], Point2]:
    """Graph-form reference solution x -> (x, y(x)) at tight tolerance."""
    problem = ode_rhs_library(realization, 3, F=f)
    x0 = float(ics["x0"])
    state0 = [float(ics["y0"]), float(ics["yp0"]), float(ics["ypp0"])]

    def at(x: float) -> Point2:
        if x == x0:
            return Point2(x0, state0[0])
        result = rk45_integrate(problem.system, x0, state0, x, rtol=1e-12, atol=1e-13)
        if result.status != "ok":
            raise NumericError(
                f"reference integration failed: {result.detail}", result.halt_x
            )
        return Point2(result.xs[-1], result.states[-1][0])

    return at


def _advance_by_chord(curve, x_start: float, h: float) -> float:
    """Abscissa one Euclidean chord h ahead along the reference curve."""
    p0 = curve(x_start)

    def gap(x: float) -> float:
        p = curve(x)
        return math.hypot(p.x - p0.x, p.y - p0.y) - h

    hi = h
    while gap(x_start + hi) < 0.0:
        hi *= 2.0
        if hi > 1e3 * h:
            raise NumericError("chord search failed to bracket", x_start)
    lo_x, hi_x = x_start, x_start + hi
    for _ in range(80):
        mid = 0.5 * (lo_x + hi_x)
        if gap(mid) < 0.0:
            lo_x = mid
        else:
            hi_x = mid
    return 0.5 * (lo_x + hi_x)


def _advance_by_invariant(curve, disc, x_start: float, k: float) -> float:
    """Abscissa one pair-invariant step k ahead along the reference curve."""
    p0 = curve(x_start)

    def gap(x: float) -> float:
        try:
            return disc(p0, curve(x)) - k
        except DomainViolation:
            return math.inf

    hi = 1e-4
    while gap(x_start + hi) < 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise NumericError("invariant search failed to bracket", x_start)
    lo_x, hi_x = x_start, x_start + hi
    for _ in range(80):
        mid = 0.5 * (lo_x + hi_x)
        if gap(mid) < 0.0:
            lo_x = mid
        else:
            hi_x = mid
    return 0.5 * (lo_x + hi_x)


def bootstrap(
    realization: RealizationId,
    order: int,
    ics: Mapping[str, float],
    h: float,
    f: Optional[Callable[[float], float]] = None,
) -> SchemeState:
    """Starting state from initial data, spaced by steps of length ~h.

    Order 2 needs x0, y0, C, a: the exact conic through (x0, y0) with
    invariant C and scale a supplies the second point one chord h along
    it, walking toward increasing y first (increasing x on ties).  Order 3
    needs x0, y0, yp0, ypp0: the reference solution comes from the
    high-accuracy adaptive integrator at tolerance 1e-12, the second point
    sits one chord h along it, and the third is re-spaced by bisection
    until its pair invariant matches the first pair's within 1e-6.

    The mesh constant K is the measured pair invariant of the first pair.
    """
    x0, y0 = float(ics["x0"]), float(ics["y0"])
    p0 = Point2(x0, y0)
    if not validate_point(p0, realization):
        raise DomainViolation("initial point outside the half plane", p0)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError("bootstrap spacing h must be positive")
    disc = _pair_disc(realization)

    if order == 2:
        if "C" not in ics or "a" not in ics:
            raise ValueError("order-2 bootstrap needs C and a")
        c, a = float(ics["C"]), float(ics["a"])
        fit = fit_circle if realization is RealizationId.SL3 else fit_hyperbola
        sol = fit(p0, c, a)[0]
        t0 = param_of(sol, p0)
        direction = _pick_direction(sol, t0, h)
        t1 = next_chord_point(sol, t0, h, direction)
        p1 = point_at(sol, t1)
        k = disc(p0, p1)
        t2 = next_chord_point(sol, t1, h, direction)
        side = turning_side(p0, p1, point_at(sol, t2))
        spec = SchemeSpec(realization, 2, K=k, C=c)
        return SchemeState((p0, p1), spec, None, side)

    if order != 3:
        raise ValueError("order must be 2 or 3")
    if "yp0" not in ics or "ypp0" not in ics:
        raise ValueError("order-3 bootstrap needs yp0 and ypp0")
    rhs = f if f is not None else square
    curve = _ode_curve(realization, ics, rhs)
    x1 = _advance_by_chord(curve, x0, h)
    p1 = curve(x1)
    k = disc(p0, p1)
    x2 = _advance_by_invariant(curve, disc, x1, k)
    p2 = curve(x2)
    if abs(disc(p1, p2) - k) > 1e-6:
        raise NumericError(
            f"second pair invariant {disc(p1, p2):.6e} missed K={k:.6e}", x2
        )
    tau = window_j1(realization, p0, p1, p2)
    side = turning_side(p0, p1, p2)
    spec = SchemeSpec(realization, 3, K=k, F=rhs)
    return SchemeState((p0, p1, p2), spec, tau, side)


def run_scheme(
    state: SchemeState,
    max_steps: int,
    x_window: Optional[tuple[float, float]] = None,
) -> Trajectory:
    """Repeat the step until max steps, x-range exit, or a numeric halt.

    The trajectory starts with the window points and records per-step
    diagnostics; whatever stops the run is stored in the halt record, so
    failures are data rather than exceptions.  A point that lands outside
    x_window is kept (it is the evidence of the exit).
    """
    traj = Trajectory(points=list(state.window))
    if max_steps <= 0:
        traj.halt = HaltInfo("maxSteps", x=state.window[-1].x, detail="0 steps requested")
        return traj
    for _ in range(max_steps):
        try:
            p_next, diag = step_with_diagnostics(state)
        except NumericError as exc:
            traj.halt = HaltInfo(exc.kind, x=state.window[-1].x, detail=exc.detail)
            return traj
        traj.points.append(p_next)
        traj.diagnostics.append(diag)
        state = advance_state(state, p_next)
        if x_window is not None and not (x_window[0] <= p_next.x <= x_window[1]):
            traj.halt = HaltInfo(
                "xRangeExit", x=p_next.x,
                detail=f"left [{x_window[0]}, {x_window[1]}]",
            )
            return traj
    traj.halt = HaltInfo("maxSteps", x=traj.points[-1].x, detail=f"{max_steps} steps")
    return traj
