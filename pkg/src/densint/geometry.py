"""Convex bodies, ball volumes, uniform sampling and grid packings.

Points are numpy arrays of shape ``(d,)``; batches of points have shape
``(k, d)``. Built-in bodies are closed, so boundary points count as inside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InvalidArgument, InvalidDimension, PackingFailure

# Slack for closed-set membership tests; keeps points rounded onto the
# boundary (e.g. normalized directions) inside.
BOUNDARY_TOL = 1e-12

KINDS = ("unit-ball", "axis-cube", "unit-interval", "oracle")


def vol_unit_ball(d: int) -> float:
    """Volume of the Euclidean unit ball in ``R^d``: ``pi^(d/2) / Gamma(d/2 + 1)``."""
    if int(d) != d or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d}")
    d = int(d)
    if d > 64:
        return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))
    # vol(B^d) = vol(B^(d-2)) * 2 pi / d from vol(B^0) = 1, vol(B^1) = 2
    v = 1.0 if d % 2 == 0 else 2.0
    for k in range(2 + d % 2, d + 1, 2):
        v *= 2.0 * math.pi / k
    return v


def gamma_half_ratio(z: float) -> float:
    """``Gamma(z + 1/2) / Gamma(z)`` for ``z > 0``."""
    if not z > 0:
        raise DomainError(f"gamma_half_ratio needs z > 0, got {z}")
    return math.exp(math.lgamma(z + 0.5) - math.lgamma(z))


def ball_volume_ratio(d: int) -> float:
    """``vol(B^(d-1)) / vol(B^d)``, with ``vol(B^0) = 1``."""
    lower = 1.0 if d == 1 else vol_unit_ball(d - 1)
    return lower / vol_unit_ball(d)


@dataclass(frozen=True)
class ConvexBody:
    """A convex body with a membership oracle.

    Built-in kinds are ``unit-ball`` (centered at the origin), ``axis-cube``
    (``[0, 1]^d``) and ``unit-interval`` (``[0, 1]``). Kind ``oracle`` wraps a
    caller-supplied membership function and diameter; it has no sampler and
    no known volume.
    """

    dim: int
    kind: str = "unit-ball"
    oracle: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False, repr=False)
    oracle_diameter: Optional[float] = None
    oracle_center: Optional[tuple] = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidDimension(f"dimension must be a positive integer, got {self.dim}")
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown body kind {self.kind!r}")
        if self.kind == "unit-interval" and self.dim != 1:
            raise InvalidDimension("unit-interval is one-dimensional")
        if self.kind == "oracle" and (self.oracle is None or not self.oracle_diameter):
            raise InvalidArgument("oracle bodies need a membership function and a diameter")

    @classmethod
    def ball(cls, d: int) -> ConvexBody:
        return cls(d, "unit-ball")

    @classmethod
    def cube(cls, d: int) -> ConvexBody:
        return cls(d, "axis-cube")

    @classmethod
    def interval(cls) -> ConvexBody:
        return cls(1, "unit-interval")

    @classmethod
    def from_oracle(cls, d: int, contains, diameter: float, center=None) -> ConvexBody:
        center = tuple(np.zeros(d)) if center is None else tuple(center)
        return cls(d, "oracle", oracle=contains, oracle_diameter=float(diameter), oracle_center=center)

    @property
    def diameter(self) -> float:
        if self.kind == "unit-ball":
            return 2.0
        if self.kind in ("axis-cube", "unit-interval"):
            return math.sqrt(self.dim)
        return self.oracle_diameter

    @property
    def volume(self) -> float:
        if self.kind == "unit-ball":
            return vol_unit_ball(self.dim)
        if self.kind in ("axis-cube", "unit-interval"):
            return 1.0
        raise InvalidArgument("volume is unknown for oracle bodies")

    @property
    def center(self) -> np.ndarray:
        if self.kind == "unit-ball":
            return np.zeros(self.dim)
        if self.kind in ("axis-cube", "unit-interval"):
            return np.full(self.dim, 0.5)
        return np.array(self.oracle_center, dtype=float)

    @property
    def can_sample(self) -> bool:
        return self.kind != "oracle"

    def contains(self, X) -> np.ndarray:
        """Vectorized membership for an array of shape ``(k, d)``; no cost accounting."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise InvalidArgument(f"point dimension {X.shape[-1]} does not match body dimension {self.dim}")
        if self.kind == "unit-ball":
            return np.einsum("...i,...i->...", X, X) <= 1.0 + BOUNDARY_TOL
        if self.kind in ("axis-cube", "unit-interval"):
            return np.all((X >= -BOUNDARY_TOL) & (X <= 1.0 + BOUNDARY_TOL), axis=-1)
        return np.asarray(self.oracle(X), dtype=bool)

    def sample(self, rng, size: int) -> np.ndarray:
        """``size`` i.i.d. uniform points, shape ``(size, d)``.

        The ball uses a normalized Gaussian direction scaled by ``U^(1/d)``
        (``d + 1`` draws per point); cubes use ``d`` uniforms per point.
        """
        if self.kind == "unit-ball":
            return uniform_in_balls(np.zeros((size, self.dim)), 1.0, rng.normal((size, self.dim)), rng.random(size))
        if self.kind in ("axis-cube", "unit-interval"):
            return rng.random((size, self.dim))
        raise InvalidArgument("oracle bodies have no uniform sampler")

    def draws_per_sample(self) -> int:
        return self.dim + 1 if self.kind == "unit-ball" else self.dim


def uniform_in_balls(centers: np.ndarray, radius, gauss: np.ndarray, unif: np.ndarray) -> np.ndarray:
    """Map Gaussian vectors and uniforms to uniform points in ``B(center, radius)``."""
    d = centers.shape[-1]
    norms = np.sqrt(np.einsum("...i,...i->...", gauss, gauss))
    norms = np.where(norms > 0, norms, 1.0)
    scale = np.asarray(radius) * unif ** (1.0 / d) / norms
    return centers + gauss * scale[..., None]


def membership(body: ConvexBody, x, budget=None) -> bool:
    """Membership oracle for a single point; charges one call to ``budget`` if given."""
    x = np.asarray(x, dtype=float)
    if x.shape != (body.dim,):
        raise InvalidArgument(f"expected a point of dimension {body.dim}, got shape {x.shape}")
    if budget is not None:
        budget.membership_calls += 1
    return bool(body.contains(x[None, :])[0])


def uniform_sample(body: ConvexBody, rng) -> np.ndarray:
    """One uniform point in ``body``."""
    return body.sample(rng, 1)[0]


@dataclass(frozen=True)
class Packing:
    """Centers of ``m`` disjoint closed balls of common radius inside the unit ball."""

    centers: np.ndarray
    radius: float

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def is_valid(self, tol: float = 1e-12) -> bool:
        c = self.centers
        if np.any(np.linalg.norm(c, axis=1) > 1.0 - self.radius + tol):
            return False
        if len(c) > 1:
            gaps = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
            gaps[np.diag_indices(len(c))] = np.inf
            if gaps.min() < 2 * self.radius - tol:
                return False
        return True


def packing_radius(m: int, d: int) -> float:
    return 0.5 * m ** (-1.0 / d)


def _grid_points(r: float, d: int, shifted: bool) -> np.ndarray:
    pitch = 2.0 * r
    reach = 1.0 - r
    off = 0.5 * pitch if shifted else 0.0
    k = int(math.floor((reach + off) / pitch + 1e-12))
    ticks = np.arange(-k, k + 1) * pitch
    if shifted:
        ticks = np.concatenate([ticks - off, [k * pitch + off]])
    ticks = ticks[np.abs(ticks) <= reach + 1e-12]
    n_grid = len(ticks) ** d
    if n_grid > 5_000_000:
        raise PackingFailure(f"grid with {n_grid} points is too large to enumerate")
    grid = np.array(list(itertools.product(ticks, repeat=d)), dtype=float).reshape(-1, d)
    return grid[np.linalg.norm(grid, axis=1) <= reach + 1e-12]


def packing_on_ball(m: int, d: int) -> Packing:
    """Grid packing of ``m`` balls of radius ``m^(-1/d) / 2`` in ``B^d``.

    Candidates are points of a grid of pitch ``2r`` with norm at most
    ``1 - r``. The origin-centered grid is tried first and the grid shifted
    by half a pitch in every coordinate second. Points are taken outermost
    first (ties broken lexicographically), which spreads the centers across
    the ball. Raises ``PackingFailure`` if neither grid holds ``m`` points.
    """
    if m < 1:
        raise InvalidArgument("m must be positive")
    if d < 1:
        raise InvalidDimension("d must be positive")
    r = packing_radius(m, d)
    sizes = []
    for shifted in (False, True):
        grid = _grid_points(r, d, shifted)
        sizes.append(len(grid))
        if len(grid) >= m:
            break
    else:
        raise PackingFailure(f"grids yield only {max(sizes)} centers, {m} requested (d={d})")
    norms = np.linalg.norm(grid, axis=1)
    order = np.lexsort(tuple(grid[:, j] for j in reversed(range(d))) + (-np.round(norms, 12),))
    centers = grid[order[:m]]
    centers[np.abs(centers) < 1e-15] = 0.0
    return Packing(centers=centers, radius=r)
