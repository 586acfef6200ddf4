"""Continuation of located Maass forms along curves in parameter space.

A located form is continued by a secant predictor through the last two
accepted points and a derivative-free corrector that re-minimizes the
residual over (one transverse parameter, R) at the predicted point.  The
transverse parameter is the axis most orthogonal to the current curve
direction.  When the group is mirror symmetric and the step stays inside
the symmetry plane, the corrector fixes the plane and minimizes over R
alone, which keeps in-plane curves exactly in the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, NoOverlap, NotConverged
from .groups import GAMMA222, GroupPresentation, build_group
from .search import (
    MaassCandidate,
    _golden_minimize,
    classify_parity,
    detection_threshold,
)
from .system import ResidualEvaluator, SolveSettings, plan_settings


@dataclass(frozen=True)
class StepPolicy:
    """Step-size control of the continuation."""

    initial: float = 0.005
    minimum: float = 1e-5
    maximum: float = 0.02
    growth: float = 1.5
    grow_after: int = 3


@dataclass
class DeformationCurve:
    """Ordered sequence of candidates along a path in parameter space."""

    family: str
    free_axes: tuple[int, ...]
    points: list[MaassCandidate] = field(default_factory=list)
    step_policy: StepPolicy = field(default_factory=StepPolicy)
    termination: str = "max_steps"

    def axis_values(self, axis: int) -> np.ndarray:
        return np.array([c.params[axis] for c in self.points])

    def r_values(self) -> np.ndarray:
        return np.array([c.R for c in self.points])


def _residual_function(family: str, params: tuple[float, ...],
                       w_axis: int | None, r_max: float,
                       eps: float, sector) -> tuple:
    """Objective residual(w, R) with the group rebuilt per w."""
    base = build_group(family, params)
    settings = plan_settings(base, r_max, eps=eps, y0_factor=0.75, sector=sector)

    def objective(w: float, R: float) -> float:
        p = list(params)
        if w_axis is not None:
            p[w_axis] = w
        try:
            group = build_group(family, p)
            if settings.y0 >= group.min_elliptic_height():
                return float("inf")
            return ResidualEvaluator(group, settings).residual(R)
        except (DomainError, ValueError):
            return float("inf")

    return objective, settings


def correct_candidate(family: str, params, w_axis: int | None, r_guess: float,
                      eps: float = 1e-6, sector=None,
                      span: float = 0.01, presearch: bool = True) -> MaassCandidate:
    """Corrector: local residual minimization over (params[w_axis], R).

    ``params`` holds the fixed coordinates with the initial guess in slot
    ``w_axis``; with ``w_axis=None`` only R is free (used inside symmetry
    planes).  Raises ``NotConverged`` when no minimum below the detection
    threshold is found near the guess.
    """
    params = tuple(float(p) for p in params)
    objective, settings = _residual_function(
        family, params, w_axis, r_guess + 0.5, eps, sector)
    threshold = detection_threshold(eps)

    if w_axis is None:
        r_best, f_best = _golden_minimize(
            lambda R: objective(0.0, R), r_guess - span, r_guess + span, 1e-8)
        w_best = None
    else:
        w0 = params[w_axis]
        best = (w0, r_guess, objective(w0, r_guess))
        if presearch and not best[2] < threshold:
            for w in np.linspace(w0 - span, w0 + span, 7):
                for R in np.linspace(r_guess - span, r_guess + span, 7):
                    f = objective(w, R)
                    if f < best[2]:
                        best = (w, R, f)
        scale = max(span / 4.0, 1e-5)
        x0 = np.array([best[0], best[1]])
        simplex = np.array([x0, x0 + [scale, 0.0], x0 + [0.0, scale]])
        opt = minimize(lambda v: objective(v[0], v[1]), x0,
                       method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-14,
                                "initial_simplex": simplex, "maxiter": 400})
        w_best, r_best, f_best = float(opt.x[0]), float(opt.x[1]), float(opt.fun)

    if not f_best < threshold:
        raise NotConverged(
            f"corrector stuck at residual {f_best:.3g} near R={r_guess:.6f}")

    p = list(params)
    if w_axis is not None:
        p[w_axis] = w_best
    group = build_group(family, p)
    evaluator = ResidualEvaluator(group, settings)
    result = evaluator.solve_at(r_best)
    cand = MaassCandidate(
        family=family, params=group.params, R=r_best,
        coefficients=result.coefficients, residual=result.residual,
        settings=settings, collocation_size=evaluator.collocation.size,
        normalize_index=settings.normalize_index)
    return replace(cand, parity=classify_parity(group, cand))


def track_to(start: MaassCandidate, target_params, free_axis: int,
             steps: int = 6, eps: float = 1e-6, sector=None) -> MaassCandidate:
    """Walk the fixed parameters to ``target_params``, correcting along the way.

    ``target_params`` fixes every coordinate except ``free_axis`` (whose
    entry is ignored); the walk interpolates the fixed coordinates linearly
    from the start in ``steps`` corrector stages, each warm-started from
    the previous stage, so the result stays on the branch through ``start``.
    """
    p_start = np.array(start.params, float)
    p_target = np.array([float(v) for v in target_params])
    p_target[free_axis] = p_start[free_axis]
    w, r = p_start[free_axis], start.R
    cand = start
    for k in range(1, steps + 1):
        p = p_start + (k / steps) * (p_target - p_start)
        p[free_axis] = w
        cand = correct_candidate(start.family, tuple(p), free_axis, r,
                                 eps=eps, sector=sector,
                                 span=0.006, presearch=False)
        w, r = cand.params[free_axis], cand.R
    return cand


def _transverse_axis(direction: np.ndarray, free_axes: tuple[int, ...]) -> int:
    """The free axis most orthogonal to the step direction."""
    comp = np.abs(direction)
    return free_axes[int(np.argmin(comp))]


def _in_symmetry_plane(family: str, params, direction: np.ndarray,
                       free_axes: tuple[int, ...]) -> bool:
    if family != GAMMA222:
        return False
    b_axis = 1
    if b_axis not in free_axes:
        return abs(params[b_axis]) < 1e-12
    return abs(params[b_axis]) < 1e-12 and \
        abs(direction[free_axes.index(b_axis)]) < 1e-12


def continue_curve(start: MaassCandidate, direction, policy: StepPolicy | None = None,
                   max_steps: int = 50, eps: float = 1e-6, sector=None,
                   free_axes: tuple[int, ...] | None = None,
                   stop_when=None) -> DeformationCurve:
    """Track the deformation curve through ``start`` along ``direction``.

    The first step follows ``direction`` (a unit vector over the free
    axes); later steps extrapolate through the last two accepted points.
    Steps halve on corrector failure down to the policy minimum (curve
    terminates 'lost'), grow after repeated first-try successes, and the
    curve closes when it returns to its start ('closed_loop').  Leaving the
    parameter domain terminates with 'boundary'.
    """
    policy = policy or StepPolicy()
    if free_axes is None:
        free_axes = tuple(range(len(start.params)))
    direction = np.asarray(direction, float)
    if direction.size != len(free_axes):
        raise ValueError("direction needs one component per free axis")
    direction = direction / np.linalg.norm(direction)

    curve = DeformationCurve(family=start.family, free_axes=free_axes,
                             points=[start], step_policy=policy)
    step = policy.initial
    streak = 0
    start_vec = np.array([start.params[a] for a in free_axes])

    for _ in range(max_steps):
        points = curve.points
        last = points[-1]
        last_vec = np.array([last.params[a] for a in free_axes])
        if len(points) >= 2:
            prev = points[-2]
            prev_vec = np.array([prev.params[a] for a in free_axes])
            tangent = last_vec - prev_vec
            norm = np.linalg.norm(tangent)
            if norm > 0:
                direction = tangent / norm
                r_slope = (last.R - prev.R) / norm
            else:
                r_slope = 0.0
        else:
            r_slope = 0.0

        accepted = None
        first_try = True
        while step >= policy.minimum:
            pred_vec = last_vec + step * direction
            r_pred = last.R + step * r_slope
            pred_params = list(last.params)
            for a, v in zip(free_axes, pred_vec):
                pred_params[a] = v
            try:
                if _in_symmetry_plane(start.family, pred_params, direction, free_axes):
                    accepted = correct_candidate(
                        start.family, pred_params, None, r_pred,
                        eps=eps, sector=sector, span=max(4.0 * step, 0.01))
                else:
                    w_axis = _transverse_axis(direction, free_axes)
                    accepted = correct_candidate(
                        start.family, pred_params, w_axis, r_pred,
                        eps=eps, sector=sector,
                        span=max(2.0 * step, 0.004), presearch=not first_try)
                break
            except (NotConverged, DomainError):
                step *= 0.5
                first_try = False
        if accepted is None:
            curve.termination = "boundary" if _outside_domain(
                start.family, pred_params) else "lost"
            return curve

        # reject steps that jump to a different branch
        if abs(accepted.R - last.R) > 50.0 * max(step, 1e-4):
            curve.termination = "lost"
            return curve

        curve.points.append(accepted)
        if first_try:
            streak += 1
            if streak >= policy.grow_after:
                step = min(step * policy.growth, policy.maximum)
                streak = 0
        else:
            streak = 0

        acc_vec = np.array([accepted.params[a] for a in free_axes])
        if len(curve.points) > 10 and np.linalg.norm(acc_vec - start_vec) < 2.0 * step:
            curve.termination = "closed_loop"
            return curve
        if stop_when is not None and stop_when(accepted):
            curve.termination = "stopped"
            return curve

    curve.termination = "max_steps"
    return curve


def _outside_domain(family: str, params) -> bool:
    try:
        build_group(family, params)
        return False
    except (DomainError, ValueError):
        return True


def probe_directions(candidate: MaassCandidate, angular_resolution: float = 15.0,
                     probe_size: float = 1e-3, eps: float = 1e-6,
                     sector=None) -> list[float]:
    """Distinct tangent lines of the solution set through a candidate.

    Attempts one corrector step of fixed size in each sampled direction of
    the parameter plane (two free parameters); the displacement vectors of
    the successful corrections are clustered into lines modulo sign.
    Returns one representative angle in [0, pi) per line.
    """
    if len(candidate.params) != 2:
        raise DomainError("direction probing needs a two-parameter family")
    p0 = np.array(candidate.params)
    displacements = []
    for deg in np.arange(0.0, 360.0, angular_resolution):
        ang = math.radians(deg)
        v = np.array([math.cos(ang), math.sin(ang)])
        pred = p0 + probe_size * v
        w_axis = int(np.argmin(np.abs(v)))
        try:
            cand = correct_candidate(
                candidate.family, tuple(pred), w_axis, candidate.R,
                eps=eps, sector=sector, span=3.0 * probe_size, presearch=False)
        except (NotConverged, DomainError):
            continue
        disp = np.array(cand.params) - p0
        norm = np.linalg.norm(disp)
        if not probe_size / 5.0 <= norm <= probe_size * 5.0:
            continue
        displacements.append(disp / norm)

    lines: list[float] = []
    for d in displacements:
        angle = math.atan2(d[1], d[0]) % math.pi
        for known in lines:
            delta = abs(angle - known)
            if min(delta, math.pi - delta) < math.radians(20.0):
                break
        else:
            lines.append(angle)
    return sorted(lines)


def gap_profile(curve1: DeformationCurve, curve2: DeformationCurve,
                axis: int) -> tuple[float, float, float]:
    """Minimum |R1 - R2| of two curves over their common axis window.

    Returns (gap, axis_location, mean_R).  Raises ``NoOverlap`` when the
    curves share no window on the axis.
    """
    t1, r1 = curve1.axis_values(axis), curve1.r_values()
    t2, r2 = curve2.axis_values(axis), curve2.r_values()
    lo = max(t1.min(), t2.min())
    hi = min(t1.max(), t2.max())
    if not lo < hi:
        raise NoOverlap(f"curves do not overlap on axis {axis}")
    o1, o2 = np.argsort(t1), np.argsort(t2)
    grid = np.linspace(lo, hi, 400)
    g1 = np.interp(grid, t1[o1], r1[o1])
    g2 = np.interp(grid, t2[o2], r2[o2])
    gaps = np.abs(g1 - g2)
    i = int(np.argmin(gaps))
    return float(gaps[i]), float(grid[i]), float(0.5 * (g1[i] + g2[i]))


def multiplicity_check(candidate: MaassCandidate, eps: float = 1e-6,
                       sector=None, n_compare: int = 10) -> dict:
    """Evidence for or against a multiple eigenvalue at a curve point.

    Re-solves with the normalization moved to the second coefficient; a
    single form reproduces the same coefficient vector after rescaling,
    while a two-dimensional solution space produces normalization-dependent
    vectors (or a form with vanishing first coefficient).
    """
    group = candidate.group()
    settings = plan_settings(group, candidate.R + 0.5, eps=eps, sector=sector)
    evaluator = ResidualEvaluator(group, settings)
    res1 = evaluator.solve_at(candidate.R, normalize_index=1)
    res2 = evaluator.solve_at(candidate.R, normalize_index=2)
    return compare_normalizations(res1, res2, n_compare)


def compare_normalizations(res1, res2, n_compare: int = 10) -> dict:
    """Decide multiplicity from two differently normalized solutions."""
    a1_of_2 = res2.coefficients.get(1, 0.0)
    if abs(a1_of_2) < 1e-3:
        return {"multiplicity": 2, "reason": "independent solution with "
                "vanishing first coefficient", "distance": float("inf")}
    dist = 0.0
    for n in range(1, n_compare + 1):
        v1 = res1.coefficients.get(n, 0.0)
        v2 = res2.coefficients.get(n, 0.0) / a1_of_2
        dist = max(dist, abs(v1 - v2))
    multiplicity = 2 if dist > 1e-2 else 1
    return {"multiplicity": multiplicity, "distance": float(dist),
            "reason": "normalization-dependent solutions" if multiplicity == 2
            else "single form"}


def branch_limits_agree(curve1: DeformationCurve, curve2: DeformationCurve,
                        n_compare: int = 10, tol: float = 0.1) -> bool:
    """Whether coefficient vectors agree where two curve ends meet."""
    c1, c2 = curve1.points[-1], curve2.points[-1]
    dist = max(abs(c1.coefficients.get(n, 0.0) - c2.coefficients.get(n, 0.0))
               for n in range(1, n_compare + 1))
    return dist < tol
