"""Overdetermined linear system expressing automorphy of the truncated expansion.

The truncated expansion at spectral parameter R is

    f(z) = sqrt(y) sum_{0 < |n| <= M} a_n K_{iR}(2 pi |n| y) e^{2 pi i n x}

with complex coefficients a_n and the normalization a_1 = 1 (the a_1 terms
move to the right-hand side).  Each collocation pair (z, z*) contributes the
complex identity f(z*) - f(z) = 0, split into two real rows; the unknowns
are the real and imaginary parts of the remaining a_n, which makes 4M - 2
real unknowns.  In constant-term mode two more real unknowns (a0, b0) enter
through sqrt(y)(a0 cos(R ln y) + b0 sin(R ln y)).

Columns (and the right-hand side) are scaled to unit maximum magnitude, so
the least-squares residual   ||A x - b||_2   is measured in units where the
first nonconstant coefficient's column has size one; this residual is the
detector that drops from order 1 to the truncation error at eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bessel import BesselEvaluator, truncation_level
from .collocation import CollocationSet, choose_points, default_line_height
from .errors import DomainError
from .groups import GroupPresentation

MODE_CUSP = "cusp"
MODE_CONSTANT = "with_constant_term"


@dataclass(frozen=True)
class SolveSettings:
    """Discretization parameters of one residual evaluation.

    ``sector`` assigns a sign to each elliptic generator; a collocation row
    for the image g z picks up the product of the signs of the generators
    applied during the pullback.  The all-plus default detects ordinary
    automorphic forms; mixed signs detect forms that flip under some of the
    involutions (the signs must multiply to +1 so the translation keeps
    sign +1 and the Fourier expansion stays 1-periodic).
    """

    M: int
    y0: float
    eps: float = 1e-6
    oversample: float = 1.25
    mode: str = MODE_CUSP
    normalize_index: int = 1
    offset: float = 0.0
    sector: tuple[int, ...] | None = None


def plan_settings(group: GroupPresentation, r_max: float, eps: float = 1e-6,
                  oversample: float = 1.25, y0_factor: float = 0.8,
                  mode: str = MODE_CUSP, n_max: int | None = None,
                  sector: tuple[int, ...] | None = None) -> SolveSettings:
    """Choose (M, y0) for residual evaluations with R up to ``r_max``.

    ``n_max`` forces the line low enough that coefficients up to that index
    keep non-negligible Bessel columns and are therefore reliably determined
    (needed by the verification checks, not by plain detection).
    """
    if sector is not None:
        if len(sector) != len(group.generators):
            raise DomainError("sector needs one sign per elliptic generator")
        if any(s not in (-1, 1) for s in sector):
            raise DomainError("sector signs must be +1 or -1")
        if math.prod(sector) != 1:
            raise DomainError("sector signs must multiply to +1")
    y0 = default_line_height(group, y0_factor)
    if n_max is not None:
        y0 = min(y0, (r_max + 4.0) / (2.0 * math.pi * n_max))
    M = truncation_level(r_max, y0, eps)
    if n_max is not None:
        M = max(M, n_max)
    return SolveSettings(M=M, y0=y0, eps=eps, oversample=oversample, mode=mode,
                         sector=sector)


@dataclass
class LinearSystem:
    """Scaled real system A x = b with its column layout."""

    matrix: np.ndarray          # (2N, cols), columns scaled to max |entry| 1
    rhs: np.ndarray             # (2N,), scaled to max |entry| 1
    column_scales: np.ndarray   # raw max magnitudes of the columns
    rhs_scale: float            # raw max magnitude of the right-hand side
    coeff_indices: tuple[int, ...]  # Fourier index of each complex column pair
    mode: str
    normalize_index: int
    settings: SolveSettings
    collocation: CollocationSet


@dataclass
class SolveResult:
    """Least-squares solution of one automorphy system."""

    coefficients: dict[int, complex]  # includes the normalized one
    constant_term: tuple[float, float] | None
    residual: float
    rank: int
    rank_deficient: bool
    settings: SolveSettings
    size: tuple[int, int] = (0, 0)

    def coefficient_vector(self, n_max: int) -> np.ndarray:
        """a_1 .. a_{n_max} as a complex vector."""
        return np.array([self.coefficients.get(n, 0.0) for n in range(1, n_max + 1)])


def assemble(group: GroupPresentation, R: float, coll: CollocationSet,
             bessel: BesselEvaluator, mode: str = MODE_CUSP,
             settings: SolveSettings | None = None,
             normalize_index: int = 1) -> LinearSystem:
    """Build the scaled real least-squares system at spectral parameter R."""
    if settings is None:
        settings = SolveSettings(M=max(2, normalize_index), y0=coll.y0)
    M = settings.M
    if M < max(2, normalize_index):
        raise DomainError(f"need M >= {max(2, normalize_index)}, got {M}")
    n_pts = coll.size
    if n_pts <= 4 * M:
        raise DomainError(f"collocation set of {n_pts} points needs N > 4M = {4 * M}")
    two_pi = 2.0 * math.pi
    ns = np.arange(1, M + 1)

    y0 = coll.y0
    x_pts = np.array([z.real for z in coll.points])
    y_img = np.array([im.imag for _, im in coll.images])
    x_img = np.array([im.real for _, im in coll.images])
    if settings.sector is None:
        signs = np.ones(n_pts)
    else:
        sec = settings.sector
        signs = np.array(
            [math.prod(sec[j] for j in word) for word, _ in coll.images], float)

    # Bessel factors: one row of arguments for the shared base height,
    # a matrix for the image heights.  Arguments beyond the decay cutoff
    # contribute less than 1e-15 in scaled units to any entry and are
    # zeroed without evaluation.
    k_base = bessel.eval_many(two_pi * ns * y0)                      # (M,)
    args = (two_pi * ns[None, :] * y_img[:, None]).ravel()
    u_dead = math.pi * abs(R) / 2.0 + 38.0
    live = args <= u_dead
    k_flat = np.zeros_like(args)
    if np.any(live):
        k_flat[live] = bessel.eval_many(args[live])
    k_img = k_flat.reshape(n_pts, M)

    sq_base = math.sqrt(y0)
    sq_img = np.sqrt(y_img)

    e_base = np.exp(2j * math.pi * np.outer(x_pts, ns))              # (n_pts, M)
    e_img = np.exp(2j * math.pi * np.outer(x_img, ns))

    # c_n(z) = sqrt(y) K(2 pi n y) e^{2 pi i n x}; the row encodes
    # sign(word) f(z*) - f(z) = 0
    img_pos = signs[:, None] * sq_img[:, None] * k_img * e_img
    img_neg = signs[:, None] * sq_img[:, None] * k_img * np.conj(e_img)
    c_pos = img_pos - sq_base * k_base[None, :] * e_base
    c_neg = img_neg - sq_base * k_base[None, :] * np.conj(e_base)    # index -n

    # column order: n = -M..-1 then the positive indices without the
    # normalized one
    pos_indices = [n for n in range(1, M + 1) if n != normalize_index]
    coeff_indices = tuple(range(-M, 0)) + tuple(pos_indices)
    cols = []
    for n in range(-M, 0):
        cols.append(c_neg[:, -n - 1])
    for n in pos_indices:
        cols.append(c_pos[:, n - 1])
    ccols = np.stack(cols, axis=1)                                   # (n_pts, 2M-1)
    rhs_c = -c_pos[:, normalize_index - 1]

    # complex identity -> two real rows per point
    ncc = ccols.shape[1]
    n_cols = 2 * ncc + (2 if mode == MODE_CONSTANT else 0)
    A = np.zeros((2 * n_pts, n_cols))
    A[0::2, 0:2 * ncc:2] = ccols.real
    A[0::2, 1:2 * ncc:2] = -ccols.imag
    A[1::2, 0:2 * ncc:2] = ccols.imag
    A[1::2, 1:2 * ncc:2] = ccols.real
    b = np.empty(2 * n_pts)
    b[0::2] = rhs_c.real
    b[1::2] = rhs_c.imag

    if mode == MODE_CONSTANT:
        # sqrt(y)(a0 cos(R ln y) + b0 sin(R ln y)), real-valued, so it only
        # enters the real-part rows
        ly0, ly = math.log(y0), np.log(y_img)
        ca = signs * sq_img * np.cos(R * ly) - sq_base * math.cos(R * ly0)
        cb = signs * sq_img * np.sin(R * ly) - sq_base * math.sin(R * ly0)
        A[0::2, -2] = ca
        A[1::2, -2] = 0.0
        A[0::2, -1] = cb
        A[1::2, -1] = 0.0

    scales = np.max(np.abs(A), axis=0)
    scales[scales == 0.0] = 1.0
    A /= scales[None, :]
    rhs_scale = float(np.max(np.abs(b)))
    if rhs_scale == 0.0:
        rhs_scale = 1.0
    b /= rhs_scale

    return LinearSystem(
        matrix=A, rhs=b, column_scales=scales, rhs_scale=rhs_scale,
        coeff_indices=coeff_indices, mode=mode,
        normalize_index=normalize_index, settings=settings, collocation=coll)


def solve(system: LinearSystem) -> SolveResult:
    """Least-squares minimizer of ||A x - b||_2 via orthogonal factorization.

    Rank deficiency (effective rank < columns - 1) is reported on the
    result, not raised; at a point with two independent automorphic
    solutions the minimizer depends on the point set and the caller decides.
    """
    A, b = system.matrix, system.rhs
    rows, cols = A.shape
    if rows < cols + 2:
        raise DomainError(f"system of {rows} rows x {cols} cols is not overdetermined")
    x, _, rank, _ = scipy.linalg.lstsq(A, b, lapack_driver="gelsy", cond=1e-12)
    residual = float(np.linalg.norm(A @ x - b))

    # unscale back to coefficient units
    raw = system.rhs_scale * x / system.column_scales
    ncoef = len(system.coeff_indices)
    coeffs = {system.normalize_index: complex(1.0, 0.0)}
    for j, n in enumerate(system.coeff_indices):
        coeffs[n] = complex(raw[2 * j], raw[2 * j + 1])
    constant = None
    if system.mode == MODE_CONSTANT:
        constant = (float(raw[2 * ncoef]), float(raw[2 * ncoef + 1]))
    return SolveResult(
        coefficients=coeffs,
        constant_term=constant,
        residual=residual,
        rank=int(rank),
        rank_deficient=rank < cols - 1,
        settings=system.settings,
        size=(rows, cols),
    )


@dataclass
class ResidualEvaluator:
    """Reusable residual function R -> solve result at a fixed group.

    The collocation set is built once (it does not depend on R), so scans
    and minimizations share it; a fresh Bessel cache is used per R.
    """

    group: GroupPresentation
    settings: SolveSettings
    collocation: CollocationSet = field(init=False)

    def __post_init__(self):
        self.collocation = choose_points(
            self.group, self.settings.M, self.settings.oversample,
            self.settings.y0, self.settings.offset)

    def solve_at(self, R: float, mode: str | None = None,
                 normalize_index: int | None = None) -> SolveResult:
        mode = self.settings.mode if mode is None else mode
        ni = self.settings.normalize_index if normalize_index is None else normalize_index
        bessel = BesselEvaluator(R)
        system = assemble(self.group, R, self.collocation, bessel,
                          mode=mode, settings=self.settings, normalize_index=ni)
        result = solve(system)
        if result.rank_deficient and mode == MODE_CUSP and ni < 3:
            # the normalized coefficient may vanish for this form; fall back
            # to normalizing the next one
            return self.solve_at(R, mode=mode, normalize_index=ni + 1)
        return result

    def residual(self, R: float) -> float:
        return self.solve_at(R).residual


def residual_at(group: GroupPresentation, R: float,
                settings: SolveSettings) -> float:
    return ResidualEvaluator(group, settings).residual(R)
