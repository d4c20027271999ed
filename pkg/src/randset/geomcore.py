"""Exact geometry of balls, caps, lunes, and star-shaped sets.

Closed-form constants plus the radius-function machinery shared by the
samplers and the statistics layer. Everything here is deterministic and
pure; random sampling lives in :mod:`randset.ppp`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

UNIT_NORM_TOL = 1e-12


def validate_dimension(d) -> int:
    """Check that d is an integer >= 1 and return it as a plain int."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise ValueError(f"dimension must be an integer >= 1, got {d!r}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return int(d)


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in d dimensions.

    Accepts d = 0 and returns 1.0, the convention that makes the
    d = 1 forms of the wedge volume and the asymptotic volume constant
    come out right.
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 0:
        raise ValueError(f"dimension must be an integer >= 0, got {d!r}")
    return float(np.pi ** (d / 2.0) / special.gamma(d / 2.0 + 1.0))


def unit_sphere_area(d: int) -> float:
    """Surface area of the boundary sphere of the unit d-ball (d * omega_d)."""
    d = validate_dimension(d)
    return d * unit_ball_volume(d)


def lune_fraction(d: int, r) -> float | np.ndarray:
    """Normalized volume of the lune cut from the unit ball by a shifted copy.

    The lune is the part of the unit ball not covered by the unit ball
    centered at distance r along an axis.  Splitting the two-ball
    intersection into spherical caps and applying the reflection identity
    for the regularized incomplete beta function gives

        lune_fraction(d, r) = I_{r^2/4}(1/2, (d+1)/2),

    which is exact and keeps full relative precision down to r = 0
    (the naive cap difference cancels catastrophically there).

    Parameters
    ----------
    d : int
        Dimension, >= 1.
    r : float or array
        Center separation, 0 <= r <= 2.
    """
    d = validate_dimension(d)
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 2.0):
        raise ValueError("separation r must lie in [0, 2]")
    out = special.betainc(0.5, (d + 1) / 2.0, arr * arr / 4.0)
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def lune_linear_coefficient(d: int) -> float:
    """Leading coefficient of lune_fraction(d, r) as r -> 0, omega_{d-1}/omega_d."""
    d = validate_dimension(d)
    return unit_ball_volume(d - 1) / unit_ball_volume(d)


def wedge_volume(d: int, r: float) -> float:
    """Volume omega_{d-1} * r of the slab {x in unit ball : 0 < x_1 < r}, linearized.

    This is the first-order stand-in for the absolute lune volume; the
    difference is cubic in r (see tests for the explicit bound).
    """
    d = validate_dimension(d)
    if r < 0:
        raise ValueError("r must be >= 0")
    return unit_ball_volume(d - 1) * float(r)


def cap_hyp_distance(delta: float) -> float:
    """Hausdorff gap 1 - cos(delta) between a spherical cap of angular radius
    delta and the flat disk spanning its rim.  Domain (0, pi/2)."""
    if not 0.0 < delta < np.pi / 2.0:
        raise ValueError("delta must lie in (0, pi/2)")
    return 1.0 - float(np.cos(delta))


def as_unit_vector(v) -> np.ndarray:
    """Return v normalized to unit length; near-unit input is renormalized."""
    arr = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(arr))
    if n < UNIT_NORM_TOL:
        raise ValueError("cannot normalize a (near-)zero vector")
    return arr / n


@dataclass(frozen=True)
class DirectionGrid:
    """A fixed set of unit vectors used for quadrature and sup-norm scans."""

    dim: int
    points: np.ndarray  # shape (n, dim), unit rows
    kind: str

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty (n, dim) array")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("grid rows must be unit vectors")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]


def direction_grid(d: int, n: int, seed: int = 0) -> DirectionGrid:
    """Deterministic direction grid.

    d = 1 alternates the two endpoints, d = 2 uses equally spaced angles,
    d = 3 uses the golden-angle (Fibonacci) spiral, and d >= 4 falls back
    to seeded normalized Gaussians.  Same (d, n, seed) always yields the
    same array.
    """
    d = validate_dimension(d)
    if n < 1:
        raise ValueError("grid size must be >= 1")
    if d == 1:
        pts = np.where(np.arange(n)[:, None] % 2 == 0, 1.0, -1.0)
        return DirectionGrid(1, pts, "alternating-1d")
    if d == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        return DirectionGrid(2, np.column_stack([np.cos(ang), np.sin(ang)]), "regular-2d")
    if d == 3:
        i = np.arange(n)
        z = 1.0 - (2.0 * i + 1.0) / n
        rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * i
        pts = np.column_stack([rad * np.cos(phi), rad * np.sin(phi), z])
        return DirectionGrid(3, pts, "fibonacci-3d")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d))
    norms = np.linalg.norm(pts, axis=1)
    # resample any degenerate rows; astronomically unlikely but cheap to guard
    while np.any(norms < UNIT_NORM_TOL):
        bad = norms < UNIT_NORM_TOL
        pts[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(pts, axis=1)
    return DirectionGrid(d, pts / norms[:, None], "gaussian")


@dataclass(frozen=True)
class StarSet:
    """A star-shaped set about the origin, described by its radius function.

    ``radius_fn`` maps an (m, dim) array of unit directions to the (m,)
    array of boundary distances.  Values must stay within [0, rmax];
    rmax is 1 for the intersection models and equals the sampling window
    for tessellation cells.
    """

    dim: int
    radius_fn: Callable[[np.ndarray], np.ndarray]
    rmax: float = 1.0

    def radii(self, grid: DirectionGrid) -> np.ndarray:
        if grid.dim != self.dim:
            raise ValueError(f"grid dimension {grid.dim} != set dimension {self.dim}")
        out = np.asarray(self.radius_fn(grid.points), dtype=float)
        if out.shape != (grid.size,):
            raise ValueError("radius_fn returned wrong shape")
        return out

    def contains(self, x) -> bool:
        """True iff |x| <= radius_fn(x/|x|); the origin is always inside."""
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},)")
        nx = float(np.linalg.norm(arr))
        if nx == 0.0:
            return True
        if nx > self.rmax + 1e-12:
            return False
        r = float(np.asarray(self.radius_fn((arr / nx)[None, :]), dtype=float)[0])
        return nx <= r


def ball_star(d: int, radius: float = 1.0) -> StarSet:
    """The centered ball of the given radius as a StarSet."""
    d = validate_dimension(d)
    if radius < 0:
        raise ValueError("radius must be >= 0")

    def fn(dirs: np.ndarray) -> np.ndarray:
        return np.full(dirs.shape[0], float(radius))

    return StarSet(d, fn, rmax=max(radius, 1.0))


def star_volume(star: StarSet, grid: DirectionGrid) -> float:
    """Volume of a star set by the surface quadrature (1/d) * int f^d dsigma.

    Equal weights on the grid, so the estimate is omega_d * mean(f^d).
    Exact for the ball on any grid; for kinked radius functions the
    error decays with grid size (regular 2-d grids are second order).
    """
    if grid.dim != star.dim:
        raise ValueError("grid/set dimension mismatch")
    f = star.radii(grid)
    return unit_ball_volume(star.dim) * float(np.mean(f ** star.dim))


def hausdorff_star(a: StarSet, b: StarSet, grid: DirectionGrid) -> float:
    """Sup over the grid of |radius_a - radius_b|.

    For star sets sharing the origin this dominates the true Hausdorff
    distance (each boundary point sees the other set within the radial
    gap along its own ray), so it is the upper-bound proxy used by the
    coupling experiments.
    """
    if a.dim != b.dim:
        raise ValueError("sets have different dimensions")
    return float(np.max(np.abs(a.radii(grid) - b.radii(grid))))
