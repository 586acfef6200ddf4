"""Locating Maass form candidates: grid scan, bracket refinement, parity.

The least-squares residual of the automorphy system, as a function of the
spectral parameter R at a fixed group, is of order one away from
eigenvalues and drops to the truncation error at them.  ``scan`` finds the
dips on a grid, ``refine`` polishes each bracket with a derivative-free
1-D minimization, and ``classify_parity`` tests located forms for evenness
or oddness in x on mirror-symmetric groups.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bessel import BesselEvaluator
from .errors import NotConverged
from .groups import GroupPresentation, build_group
from .system import (
    MODE_CUSP,
    ResidualEvaluator,
    SolveResult,
    SolveSettings,
    plan_settings,
)

#: a grid local minimum brackets an eigenvalue when it drops below this
#: fraction of the median residual of the scan
BRACKET_FRACTION = 0.5
#: refined candidates are accepted below max(100 eps, this floor)
THRESHOLD_FLOOR = 1e-4
#: |ratio -/+ 1| bound of the parity test
PARITY_TOL = 1e-4


def detection_threshold(eps: float) -> float:
    return max(100.0 * eps, THRESHOLD_FLOOR)


@dataclass(frozen=True)
class MaassCandidate:
    """One located form: group coordinates, spectral data, solver output."""

    family: str
    params: tuple[float, ...]
    R: float
    coefficients: dict[int, complex]
    residual: float
    parity: str = "unknown"
    settings: SolveSettings | None = None
    collocation_size: int = 0
    normalize_index: int = 1

    @property
    def eigenvalue(self) -> float:
        """lambda = 1/4 + R^2."""
        return 0.25 + self.R * self.R

    def group(self) -> GroupPresentation:
        return build_group(self.family, self.params)


@dataclass(frozen=True)
class Bracket:
    """A grid local minimum with its neighboring grid points."""

    r_left: float
    r_mid: float
    r_right: float
    residual: float


def _grid_residuals(evaluator: ResidualEvaluator, grid: np.ndarray,
                    threads: int = 1) -> np.ndarray:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.array(list(pool.map(evaluator.residual, grid)))
    return np.array([evaluator.residual(R) for R in grid])


def scan(group: GroupPresentation, r_lo: float, r_hi: float,
         step: float = 0.005, settings: SolveSettings | None = None,
         threads: int = 1) -> list[Bracket]:
    """Residual scan on a grid; returns a bracket per qualifying local minimum.

    A local minimum qualifies when it falls below ``BRACKET_FRACTION`` times
    the median grid residual; spurious shallow brackets are weeded out later
    by ``refine``.  An empty list is a valid result.
    """
    if not r_lo < r_hi:
        raise ValueError(f"empty scan range [{r_lo}, {r_hi}]")
    if settings is None:
        settings = plan_settings(group, r_hi)
    evaluator = ResidualEvaluator(group, settings)
    grid = np.arange(r_lo, r_hi + 0.5 * step, step)
    vals = _grid_residuals(evaluator, grid, threads)
    med = float(np.median(vals))
    cut = BRACKET_FRACTION * med
    brackets = []
    for i in range(1, len(grid) - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1] and vals[i] < cut:
            brackets.append(Bracket(grid[i - 1], grid[i], grid[i + 1], vals[i]))
    return brackets


def _golden_minimize(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    """Golden-section minimization with a final parabolic polish."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x0, f0 = (c, fc) if fc < fd else (d, fd)
    # parabola through (a, x0, b) sharpens the minimum below the bracket tol
    h = max(b - a, xtol)
    xs = np.array([x0 - h, x0, x0 + h])
    fs = np.array([f(xs[0]), f0, f(xs[2])])
    denom = fs[0] - 2.0 * fs[1] + fs[2]
    if denom > 0.0:
        xv = x0 + 0.5 * h * (fs[0] - fs[2]) / denom
        fv = f(xv)
        if fv < f0:
            return xv, fv
    return x0, f0


def refine(group: GroupPresentation, bracket: Bracket,
           settings: SolveSettings | None = None,
           xtol: float = 1e-7) -> MaassCandidate:
    """Minimize the residual inside a bracket and accept below threshold.

    Raises ``NotConverged`` when the minimum stays above the detection
    threshold (the bracket was spurious).
    """
    if settings is None:
        settings = plan_settings(group, bracket.r_right + 0.5)
    evaluator = ResidualEvaluator(group, settings)
    r_best, f_best = _golden_minimize(
        evaluator.residual, bracket.r_left, bracket.r_right, xtol)
    threshold = detection_threshold(settings.eps)
    if f_best >= threshold:
        raise NotConverged(
            f"residual {f_best:.3g} at R={r_best:.8f} stays above "
            f"threshold {threshold:.3g}")
    result = evaluator.solve_at(r_best)
    candidate = MaassCandidate(
        family=group.family,
        params=group.params,
        R=r_best,
        coefficients=result.coefficients,
        residual=result.residual,
        settings=settings,
        collocation_size=evaluator.collocation.size,
        normalize_index=result.settings.normalize_index
        if result.settings else settings.normalize_index,
    )
    return classify_and_tag(group, candidate)


def refine_near(group: GroupPresentation, r_near: float, window: float = 0.02,
                step: float = 0.002, settings: SolveSettings | None = None) -> MaassCandidate:
    """Scan a small window around ``r_near`` and refine the closest bracket."""
    if settings is None:
        settings = plan_settings(group, r_near + window + 0.5)
    brackets = scan(group, r_near - window, r_near + window, step, settings)
    if not brackets:
        raise NotConverged(f"no bracket within {window} of R={r_near}")
    best = min(brackets, key=lambda br: abs(br.r_mid - r_near))
    return refine(group, best, settings)


def evaluate_expansion(candidate: MaassCandidate, z: complex,
                       bessel: BesselEvaluator | None = None) -> complex:
    """Truncated expansion at z (with the uniform Bessel scaling)."""
    if bessel is None:
        bessel = BesselEvaluator(candidate.R)
    y, x = z.imag, z.real
    ns = sorted(n for n in candidate.coefficients if n > 0)
    ks = bessel.eval_many([2.0 * math.pi * n * y for n in ns])
    total = 0.0 + 0.0j
    for n, k in zip(ns, ks):
        a_pos = candidate.coefficients[n]
        a_neg = candidate.coefficients.get(-n, 0.0)
        phase = np.exp(2j * math.pi * n * x)
        total += k * (a_pos * phase + a_neg * np.conj(phase))
    return math.sqrt(y) * total


def classify_parity(group: GroupPresentation, candidate: MaassCandidate) -> str:
    """'even' or 'odd' under x -> -x on mirror-symmetric groups, else 'none'.

    Compares function values at mirrored sample points above the line; the
    ratio must be uniformly +/-1 within ``PARITY_TOL``.
    """
    if not group.has_reflection_symmetry():
        return "none"
    bessel = BesselEvaluator(candidate.R)
    y = 1.1 * group.max_elliptic_height()
    xs = np.linspace(0.055, 0.445, 8)
    vals = np.array([evaluate_expansion(candidate, complex(x, y), bessel)
                     for x in xs])
    mirrored = np.array([evaluate_expansion(candidate, complex(-x, y), bessel)
                         for x in xs])
    floor = 0.05 * np.max(np.abs(vals))
    usable = np.abs(vals) > floor
    if not np.any(usable):
        return "none"
    ratios = mirrored[usable] / vals[usable]
    if np.all(np.abs(ratios - 1.0) < PARITY_TOL):
        return "even"
    if np.all(np.abs(ratios + 1.0) < PARITY_TOL):
        return "odd"
    return "none"


def classify_and_tag(group: GroupPresentation, candidate: MaassCandidate) -> MaassCandidate:
    from dataclasses import replace

    return replace(candidate, parity=classify_parity(group, candidate))


def scan_and_refine(group: GroupPresentation, r_lo: float, r_hi: float,
                    step: float = 0.005, settings: SolveSettings | None = None,
                    threads: int = 1) -> list[MaassCandidate]:
    """Full detection pass: scan, refine every bracket, drop spurious ones."""
    if settings is None:
        settings = plan_settings(group, r_hi)
    brackets = scan(group, r_lo, r_hi, step, settings, threads)
    candidates = []
    for bracket in brackets:
        try:
            cand = refine(group, bracket, settings)
        except NotConverged:
            continue
        if candidates and abs(candidates[-1].R - cand.R) < 1e-5:
            # two grid dips resolved to the same eigenvalue
            if cand.residual < candidates[-1].residual:
                candidates[-1] = cand
            continue
        candidates.append(cand)
    return candidates
