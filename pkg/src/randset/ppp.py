"""Poisson point process sampling and discrete probability bounds.

Counter-based random streams (Philox) keyed by (seed, stream_id) so that
replicates are independent and reproducible byte for byte regardless of
execution order.  Radial laws are carried around as CDF/inverse pairs.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .geomcore import unit_ball_volume, validate_dimension

_MASK64 = (1 << 64) - 1


def stream_id_for(*parts) -> int:
    """Stable 64-bit stream id from a tuple of labels.

    Uses blake2b rather than hash() so ids do not depend on interpreter
    randomization.  Floats are keyed by their exact bit pattern.
    """
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        if isinstance(p, float):
            token = "f:" + p.hex()
        elif isinstance(p, (int, np.integer)):
            token = "i:" + str(int(p))
        else:
            token = "s:" + str(p)
        h.update(token.encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


class RngStream:
    """One independent random stream; (seed, stream_id) identifies it fully."""

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._gen = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed, self.stream_id], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def spawn(self, *parts) -> "RngStream":
        """Derive a child stream; children with distinct labels never collide."""
        return RngStream(self.seed, stream_id_for(self.stream_id, *parts))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class RadialMeasure:
    """A probability law on [0, 1] given by its CDF and inverse CDF."""

    name: str
    cdf: Callable[[np.ndarray], np.ndarray]
    inverse_cdf: Callable[[np.ndarray], np.ndarray]


def uniform_radial_law(d: int) -> RadialMeasure:
    """Radius law of a uniform point in the unit ball: CDF r^d."""
    d = validate_dimension(d)
    return RadialMeasure(
        name="uniform",
        cdf=lambda r: np.asarray(r, dtype=float) ** d,
        inverse_cdf=lambda u: np.asarray(u, dtype=float) ** (1.0 / d),
    )


def depth_radial_law(d: int) -> RadialMeasure:
    """Law of the distance from a uniform point in the ball to the unit
    sphere: CDF 1 - (1-r)^d.  Used as the offset law that makes pinned
    half-spaces mimic boundary-tangent balls."""
    d = validate_dimension(d)
    return RadialMeasure(
        name="depth",
        cdf=lambda r: 1.0 - (1.0 - np.asarray(r, dtype=float)) ** d,
        inverse_cdf=lambda u: 1.0 - (1.0 - np.asarray(u, dtype=float)) ** (1.0 / d),
    )


def radial_law_from_cdf(name: str, cdf: Callable, tol: float = 1e-12) -> RadialMeasure:
    """Wrap an increasing CDF on [0,1]; the inverse is found by bisection."""

    def inverse(u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        lo = np.zeros_like(u_arr)
        hi = np.ones_like(u_arr)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = np.asarray(cdf(mid), dtype=float) < u_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < tol:
                break
        out = 0.5 * (lo + hi)
        return out if np.ndim(u) else float(out[0])

    return RadialMeasure(name=name, cdf=cdf, inverse_cdf=inverse)


def sample_poisson_count(mean: float, rng: RngStream) -> int:
    """One Poisson draw.  Delegates to numpy's generator, which switches
    between inversion and rejection internally depending on the mean."""
    if not np.isfinite(mean) or mean < 0:
        raise ValueError(f"Poisson mean must be finite and >= 0, got {mean}")
    return int(rng.gen.poisson(mean))


def uniform_directions(d: int, n: int, rng: RngStream) -> np.ndarray:
    """n iid uniform unit vectors, shape (n, d)."""
    d = validate_dimension(d)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.empty((0, d))
    g = rng.gen
    if d == 1:
        return np.where(g.random(n)[:, None] < 0.5, -1.0, 1.0)
    if d == 2:
        ang = g.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    v = g.standard_normal((n, d))
    norms = np.linalg.norm(v, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        v[bad] = g.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(v, axis=1)
    return v / norms[:, None]


def axis_cosines(d: int, n: int, rng: RngStream) -> np.ndarray:
    """Cosine of the angle between a uniform direction and a fixed axis.

    Density proportional to (1-u^2)^((d-3)/2) on [-1, 1]; drawn directly
    through a Beta((d-1)/2, (d-1)/2) variable so single-axis radius
    computations never need full d-dimensional vectors.
    """
    d = validate_dimension(d)
    if d == 1:
        return np.where(rng.gen.random(n) < 0.5, -1.0, 1.0)
    return 2.0 * rng.gen.beta((d - 1) / 2.0, (d - 1) / 2.0, n) - 1.0


@dataclass(frozen=True)
class ProcessSample:
    """A realized marked Poisson sample: points, the driving intensity, and
    the region the points live on."""

    dim: int
    points: np.ndarray  # (n, dim)
    intensity: float
    region: str  # "ball", "shell-inner", "shell-outer", "annulus"
    eps: float | None = None

    @property
    def count(self) -> int:
        return self.points.shape[0]


def sample_product_process(d: int, lam: float, mu: RadialMeasure, rng: RngStream) -> ProcessSample:
    """Poisson(lam * omega_d) points with iid radii from mu and uniform angles.

    With mu the uniform radial law this is exactly the homogeneous
    intensity-lam process on the unit ball.
    """
    d = validate_dimension(d)
    if lam < 0:
        raise ValueError("intensity must be >= 0")
    n = sample_poisson_count(lam * unit_ball_volume(d), rng)
    radii = np.asarray(mu.inverse_cdf(rng.gen.random(n)), dtype=float)
    dirs = uniform_directions(d, n, rng)
    return ProcessSample(d, radii[:, None] * dirs, float(lam), "ball")


def _shell_bounds(eps: float, side: str) -> tuple[float, float]:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if side == "inner":
        return 1.0 - eps, 1.0
    if side == "outer":
        return 1.0, 1.0 + eps
    if side == "both":
        return 1.0 - eps, 1.0 + eps
    raise ValueError(f"side must be inner/outer/both, got {side!r}")


def sample_shell(d: int, lam: float, eps: float, side: str, rng: RngStream) -> ProcessSample:
    """Homogeneous Poisson(lam) sample on a shell around the unit sphere.

    side selects the inner shell (1-eps, 1), the outer shell (1, 1+eps),
    or the full annulus.  Expected count is lam * omega_d * (hi^d - lo^d).
    """
    d = validate_dimension(d)
    if lam < 0:
        raise ValueError("intensity must be >= 0")
    lo, hi = _shell_bounds(eps, side)
    mass = unit_ball_volume(d) * (hi**d - lo**d)
    n = sample_poisson_count(lam * mass, rng)
    u = rng.gen.random(n)
    radii = (lo**d + u * (hi**d - lo**d)) ** (1.0 / d)
    dirs = uniform_directions(d, n, rng)
    region = {"inner": "shell-inner", "outer": "shell-outer", "both": "annulus"}[side]
    return ProcessSample(d, radii[:, None] * dirs, float(lam), region, eps=float(eps))


def sample_ball_uniform(d: int, lam: float, rng: RngStream, rmax: float = 1.0) -> ProcessSample:
    """Homogeneous Poisson(lam) sample on the centered ball of radius rmax."""
    d = validate_dimension(d)
    if lam < 0 or rmax <= 0:
        raise ValueError("need lam >= 0 and rmax > 0")
    n = sample_poisson_count(lam * unit_ball_volume(d) * rmax**d, rng)
    radii = rmax * rng.gen.random(n) ** (1.0 / d)
    dirs = uniform_directions(d, n, rng)
    return ProcessSample(d, radii[:, None] * dirs, float(lam), "ball")


class ShellDepthCdfs:
    """Depth laws on a shell of width eps, written in the depth variable
    w = |1 - |x|| in (0, eps) so both CDFs run from 0 at w=0 to 1 at w=eps.

    ``inner`` is the depth law of a uniform point on the inner shell.
    ``folded`` is the depth law after reflecting outer-shell points of a
    uniform annulus sample through the unit sphere (s -> 2 - s) while
    keeping inner points; its density picks up mass from both sides.
    The transport w -> inner_inverse(folded(w)) corrects folded depths to
    the inner law, and the correction is uniformly O(eps^2).
    """

    def __init__(self, eps: float, d: int):
        if not 0.0 < eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        self.eps = float(eps)
        self.d = validate_dimension(d)
        self._den_inner = 1.0 - (1.0 - eps) ** d
        self._den_folded = (1.0 + eps) ** d - (1.0 - eps) ** d

    def _check_depth(self, w):
        arr = np.asarray(w, dtype=float)
        if np.any(arr < -1e-15) or np.any(arr > self.eps + 1e-15):
            raise ValueError(f"depth outside [0, eps={self.eps}]")
        return np.clip(arr, 0.0, self.eps)

    def _check_quantile(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any(arr < -1e-15) or np.any(arr > 1.0 + 1e-15):
            raise ValueError("quantile outside [0, 1]")
        return np.clip(arr, 0.0, 1.0)

    def inner(self, w):
        w = self._check_depth(w)
        return (1.0 - (1.0 - w) ** self.d) / self._den_inner

    def inner_inverse(self, u):
        u = self._check_quantile(u)
        return 1.0 - (1.0 - u * self._den_inner) ** (1.0 / self.d)

    def folded(self, w):
        w = self._check_depth(w)
        return ((1.0 + w) ** self.d - (1.0 - w) ** self.d) / self._den_folded

    def folded_inverse(self, u):
        u = self._check_quantile(u)
        target = np.atleast_1d(np.asarray(u, dtype=float)) * self._den_folded
        lo = np.zeros_like(target)
        hi = np.full_like(target, self.eps)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            val = (1.0 + mid) ** self.d - (1.0 - mid) ** self.d
            below = val < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if np.ndim(u) else float(out[0])

    def transport(self, w):
        """Monotone transport of a folded-law depth onto the inner law.

        This is the optimal L1 coupling map between the two depth laws;
        its displacement |w - transport(w)| is O(eps^2) uniformly on
        (0, eps).  (The gap between the two CDFs themselves is only
        O(eps), so the quantile-space composition does not enjoy the
        same bound; the depth-space map is the one the coupling uses.)
        """
        return self.inner_inverse(self.folded(w))

    def correct_folded_depth(self, w):
        """Alias of :meth:`transport`, named for its role in the coupling."""
        return self.transport(w)


def shell_depth_cdfs(eps: float, d: int) -> ShellDepthCdfs:
    return ShellDepthCdfs(eps, d)


def coupon_bound(k: int, a_star: float, lam: float) -> float:
    """Tail bound K * lam^(ln(1 - a_star)) for the coupon collector with K
    categories of minimum probability a_star, run for log(lam) draws."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError("k must be an integer >= 1")
    if not 0.0 < a_star <= 1.0 / k:
        raise ValueError("need 0 < a_star <= 1/k")
    if lam <= 1.0:
        raise ValueError("lam must exceed 1")
    if a_star == 1.0:
        return 0.0
    return float(k * lam ** np.log1p(-a_star))


def coupon_empirical(k: int, probs, t: int, replicates: int, rng: RngStream) -> float:
    """Monte Carlo estimate of P(some category unseen after t draws)."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (k,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probs must be a length-k probability vector")
    if t < 1 or replicates < 1:
        raise ValueError("t and replicates must be >= 1")
    draws = rng.gen.choice(k, size=(replicates, t), p=p)
    seen = np.zeros((replicates, k), dtype=bool)
    seen[np.arange(replicates)[:, None], draws] = True
    return float(1.0 - seen.all(axis=1).mean())


def poisson_total_variation(mu: float, delta: float) -> float:
    """Exact total variation distance between Poisson(mu) and Poisson(mu+delta).

    Summed directly from the pmfs over a range wide enough that the
    truncated tail is below machine precision.
    """
    if mu < 0 or delta < 0:
        raise ValueError("need mu >= 0 and delta >= 0")
    if delta == 0.0:
        return 0.0
    hi = int(np.ceil(mu + delta + 12.0 * np.sqrt(mu + delta) + 30.0))
    ks = np.arange(0, hi + 1)
    p = stats.poisson.pmf(ks, mu)
    q = stats.poisson.pmf(ks, mu + delta)
    tv = float(0.5 * np.sum(np.abs(p - q)))
    # tv <= delta holds for all mu (mean-shift coupling); a violation means
    # the truncation window or the pmf evaluation broke down
    if tv > delta + 1e-12:
        raise ArithmeticError(f"tv {tv} exceeded its bound delta {delta}")
    return tv


def poisson_tail_crossover(mu: float, delta: float) -> float:
    """Independent route to the same TV distance via the single sign change
    of the pmf difference; used to cross-check the summation."""
    if delta <= 0:
        return 0.0
    kappa = delta / np.log((mu + delta) / mu) if mu > 0 else 0.0
    m = int(np.ceil(kappa)) - 1
    return float(stats.poisson.cdf(m, mu) - stats.poisson.cdf(m, mu + delta))


def poisson_log_tail_check(lam: float, d: int = 2) -> tuple[float, bool]:
    """P(Poisson(V_eps * lam) < log(lam)) with eps = log(lam)^2 / lam and
    V_eps the annulus volume; returns (probability, probability < 1/lam)."""
    d = validate_dimension(d)
    if lam <= 1.0:
        raise ValueError("lam must exceed 1")
    eps = np.log(lam) ** 2 / lam
    vol = unit_ball_volume(d) * ((1.0 + eps) ** d - (1.0 - eps) ** d)
    threshold = np.log(lam)
    prob = float(stats.poisson.cdf(np.ceil(threshold) - 1.0, vol * lam))
    return prob, prob < 1.0 / lam


def segmented_min(values: np.ndarray, counts: np.ndarray, fill: float) -> np.ndarray:
    """Minimum of consecutive segments of `values` with the given lengths;
    empty segments get `fill`."""
    counts = np.asarray(counts, dtype=np.int64)
    out = np.full(counts.shape[0], fill, dtype=float)
    nz = counts > 0
    if not np.any(nz):
        return out
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    out[nz] = np.minimum.reduceat(values, starts[nz])
    return out
