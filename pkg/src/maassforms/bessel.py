"""Modified Bessel function of imaginary order, scaled as e^{pi R/2} K_{iR}(u).

All values returned by this module carry the uniform scaling factor
e^{pi R/2}; unscaled K_{iR} underflows already for moderate R and the
collocation systems are column-normalized anyway, so only ratios matter.

Evaluation uses the integral K_{iR}(u) = int_0^inf e^{-u cosh t} cos(Rt) dt
in two regimes chosen to avoid catastrophic cancellation in doubles:

* ``u >= u_switch(R)``: direct quadrature of the integral with the factor
  e^{-u} pulled out and the t-range truncated where the integrand has
  dropped below 1e-20 of its peak.
* ``u < u_switch(R)``: the same integral along a shifted contour,

      e^{pi R/2} K_{iR}(u) = int_0^inf cos(Rt - u sinh t) dt,

  evaluated as a bounded head on [0, t_cut] (t_cut where u cosh t = R + C)
  plus a vertical leg at t_cut on which the integrand decays like
  e^{-C s}.  On this contour the integrand never exceeds 1 while the value
  is of order 1, so no precision is lost to the e^{pi R/2} scale.

The switch point balances the residual cancellation of the two forms and
keeps both inside a 1e-10 relative-error budget for R <= 17.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError

#: supported argument window, wide enough for every argument 2 pi |n| y
#: arising with R <= 17, M <= 200, y <= 10; outside it we refuse rather
#: than degrade
U_MIN, U_MAX = 1e-3, 1.3e4
R_MAX = 20.0
#: beyond this the scaled value underflows double precision to exactly 0.0
_U_DEAD_OFFSET = 745.0

#: decay budget: integrands are followed until e^{-46} ~ 1e-20 of peak
_LOG_TAIL = 46.0
#: damping rate of the vertical contour leg
_C_DAMP = 55.0
#: vertical leg length; (R + C) sin(s) - R s > 46 for all R <= R_MAX
_S_MAX = 1.2
#: panel orders of the two node families
_GL_ORDER = 12
_CC_ORDER = 16

_rule_cache: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}


def _unit_rule(family: str, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights on [-1, 1] for one panel."""
    key = (family, order)
    if key not in _rule_cache:
        if family == "legendre":
            _rule_cache[key] = np.polynomial.legendre.leggauss(order)
        else:  # Clenshaw-Curtis on Chebyshev extrema
            n = order
            j = np.arange(n + 1)
            x = np.cos(np.pi * j / n)
            w = np.empty(n + 1)
            ks = np.arange(1, n // 2 + 1)
            bk = np.where(ks == n / 2, 1.0, 2.0)
            for jj in j:
                w[jj] = 1.0 - np.sum(bk * np.cos(2.0 * ks * np.pi * jj / n)
                                     / (4.0 * ks * ks - 1.0))
            w *= 2.0 / n
            w[0] *= 0.5
            w[-1] *= 0.5
            _rule_cache[key] = (x, w)
    return _rule_cache[key]


def _panels(a: float, b: float, n_panels: int, family: str, order: int):
    """Composite panel rule on [a, b] from the chosen node family."""
    x0, w0 = _unit_rule(family, order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * x0[None, :]).ravel(), (half * w0[None, :]).ravel()


def _trapezoid(a: float, b: float, n: int):
    t, h = np.linspace(a, b, n + 1, retstep=True)
    w = np.full(t.shape, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return t, w


def u_switch(R: float) -> float:
    """Boundary between the direct and contour evaluation regimes."""
    return R + max(3.0, 0.571 * R)


def _direct_batch(R: float, u: np.ndarray, density: float, method: str):
    """e^{pi R/2 - u} int e^{-u(cosh t - 1)} cos(Rt) dt for a u-bucket.

    Returns (values, envelope); the envelope is the natural amplitude scale
    against which quadrature convergence is judged (the value itself can sit
    arbitrarily close to a zero of the oscillation).
    """
    u_lo, u_hi = u[0], u[-1]
    T = math.acosh(1.0 + _LOG_TAIL / u_lo)
    dt = min(math.pi / (4.0 * (R + 1.0)), 0.25 / math.sqrt(u_hi)) / density
    n = max(40, int(math.ceil(T / dt)))
    if method == "legendre":
        # the integrand is even at 0 and decayed to 1e-20 at T, so the
        # plain trapezoid converges spectrally here
        t, w = _trapezoid(0.0, T, n)
    else:
        t, w = _panels(0.0, T, max(4, -(-n // 8)), "chebyshev", _CC_ORDER)
    kern = w * np.cos(R * t)
    mat = np.exp(-u[:, None] * (np.cosh(t)[None, :] - 1.0))
    pref = np.exp(np.pi * R / 2.0 - u)
    return pref * (mat @ kern), pref * T


def _contour_batch(R: float, u: np.ndarray, density: float, method: str):
    """Head plus vertical-leg contour evaluation for a u-bucket (u < switch)."""
    u_lo, u_hi = u[0], u[-1]
    t_cut = math.acosh((R + _C_DAMP) / u_lo)
    ch, sh = math.cosh(t_cut), math.sinh(t_cut)
    order = _GL_ORDER if method == "legendre" else _CC_ORDER
    out = np.zeros_like(u)
    # head: int_0^{t_cut} cos(Rt - u sinh t) dt
    fmax = max(abs(R - u_lo), u_hi * ch - R, 10.0)
    pw = (2.0 * math.pi / fmax) * (1.1 if method == "legendre" else 1.3) / density
    t, w = _panels(0.0, t_cut, max(4, int(math.ceil(t_cut / pw))), method, order)
    out += np.cos(R * t[None, :] - u[:, None] * np.sinh(t)[None, :]) @ w
    # vertical leg: int_0^{smax} e^{Rs - u cosh(t_cut) sin s}
    #                          * sin(R t_cut - u sinh(t_cut) cos s) ds
    fmax_v = u_hi * sh + R + 10.0
    pw = (2.0 * math.pi / fmax_v) * (1.1 if method == "legendre" else 1.3) / density
    s, w = _panels(0.0, _S_MAX, max(4, int(math.ceil(_S_MAX / pw))), method, order)
    mag = np.exp(R * s[None, :] - u[:, None] * ch * np.sin(s)[None, :])
    osc = np.sin(R * t_cut - u[:, None] * sh * np.cos(s)[None, :])
    out += (mag * osc) @ w
    return out, np.full_like(u, max(1.0, t_cut))


def _eval_sorted(R: float, u: np.ndarray, density: float, method: str):
    """Evaluate on an ascending array of arguments, bucketed geometrically.

    Returns (values, envelopes).
    """
    out = np.empty_like(u)
    amp = np.empty_like(u)
    usw = u_switch(R)
    split = int(np.searchsorted(u, usw))
    for lo_all, hi_all, kernel in (
        (0, split, _contour_batch),
        (split, u.size, _direct_batch),
    ):
        lo = lo_all
        while lo < hi_all:
            hi = min(int(np.searchsorted(u, u[lo] * 1.4, side="right")), hi_all)
            out[lo:hi], amp[lo:hi] = kernel(R, u[lo:hi], density, method)
            lo = hi
    return out, amp


@dataclass
class BesselEvaluator:
    """Cached, batched evaluator of e^{pi R/2} K_{iR}(u) at fixed R.

    ``method`` selects the quadrature node family ('legendre' for
    Gauss-Legendre panels, 'chebyshev' for Clenshaw-Curtis panels); both
    implement the same integral representation and cross-check each other.  The cache maps each argument to the exact
    float produced on first evaluation, so repeated calls are bitwise
    reproducible.
    """

    R: float
    target_accuracy: float = 1e-10
    method: str = "legendre"
    cache: dict[float, float] = field(default_factory=dict)

    def __post_init__(self):
        self.R = abs(float(self.R))  # the integrand depends on R via cos(Rt)
        if self.R > R_MAX:
            raise DomainError(f"spectral parameter R={self.R} above supported {R_MAX}")
        if self.method not in ("legendre", "chebyshev"):
            raise DomainError(f"unknown quadrature method {self.method!r}")

    @property
    def eigenvalue(self) -> float:
        """lambda = 1/4 + R^2."""
        return 0.25 + self.R * self.R

    def __call__(self, u: float) -> float:
        return self.eval_one(u)

    def eval_one(self, u: float) -> float:
        return float(self.eval_many(np.array([u]))[0])

    def eval_many(self, u) -> np.ndarray:
        """Vectorized evaluation with per-argument caching."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.size == 0:
            return np.empty(0)
        if np.any(u <= 0.0):
            raise DomainError("Bessel argument must be positive")
        if np.any(u < U_MIN) or np.any(u > U_MAX):
            raise AccuracyError(
                f"argument outside supported window [{U_MIN}, {U_MAX}]")
        uniq, inv = np.unique(u, return_inverse=True)
        if not self.cache:
            vals = self._compute(uniq)
            self.cache.update(zip(uniq.tolist(), vals.tolist()))
            return vals[inv]
        vals = np.empty_like(uniq)
        hit = np.zeros(uniq.shape, dtype=bool)
        for i, ui in enumerate(uniq.tolist()):
            cached = self.cache.get(ui)
            if cached is not None:
                vals[i] = cached
                hit[i] = True
        if not np.all(hit):
            fresh = self._compute(uniq[~hit])
            vals[~hit] = fresh
            self.cache.update(zip(uniq[~hit].tolist(), fresh.tolist()))
        return vals[inv]

    def _compute(self, uniq: np.ndarray) -> np.ndarray:
        dead = uniq > math.pi * self.R / 2.0 + _U_DEAD_OFFSET
        if np.any(dead):
            out = np.zeros_like(uniq)
            live = ~dead
            if np.any(live):
                out[live] = self._compute(uniq[live])
            return out
        coarse, _ = _eval_sorted(self.R, uniq, 1.0, self.method)
        fine, amp = _eval_sorted(self.R, uniq, 1.6, self.method)
        # near zeros of the oscillation, convergence is judged against the
        # envelope: the quadrature error is absolute at that scale
        scale = np.maximum(np.abs(fine), 1e-2 * amp)
        ok = np.abs(fine - coarse) <= self.target_accuracy * scale
        if not np.all(ok):
            finer, amp = _eval_sorted(self.R, uniq, 2.6, self.method)
            scale = np.maximum(np.abs(finer), 1e-2 * amp)
            ok = np.abs(finer - fine) <= self.target_accuracy * scale
            if not np.all(ok):
                bad = uniq[~ok][:5]
                raise AccuracyError(
                    f"K_i{self.R} quadrature did not converge at u={bad}")
            return finer
        return fine


def k_bessel(ev: BesselEvaluator, u: float) -> float:
    """Scaled value e^{pi R/2} K_{iR}(u)."""
    return ev.eval_one(u)


def truncation_level(R: float, y0: float, eps: float) -> int:
    """Smallest M with scaled K_{iR}(2 pi M y0) below eps times its peak.

    Terms beyond index M contribute less than eps relative to the retained
    ones at every height >= y0 of the collocation geometry.
    """
    if y0 <= 0.0 or not (0.0 < eps < 1.0):
        raise DomainError(f"need y0 > 0 and 0 < eps < 1, got y0={y0}, eps={eps}")
    ev = BesselEvaluator(R, target_accuracy=1e-8)
    base = 2.0 * math.pi * y0
    # peak of the scaled Bessel factor over the argument range in use
    u_hi = max(R + 10.0, 2.0 * base)
    grid = np.linspace(max(base, U_MIN), u_hi, 200)
    peak = float(np.max(np.abs(ev.eval_many(grid))))
    m = max(1, int((R + 1.0) / base))
    while m < 2000:
        if base * m > U_MAX:
            break
        if abs(ev.eval_one(base * m)) < eps * peak:
            return m
        m += 1
    return m
