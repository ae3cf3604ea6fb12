"""Unit directions, half-sphere candidate grids, and cut distances.

A homogeneous hyperplane is identified by a unit normal, with ``w`` and
``-w`` naming the same plane.  That identification is centralized in
:func:`canonical_direction`, which flips the sign so the first nonzero
coordinate is positive; every grid and estimator works with canonical
representatives.
"""

from __future__ import annotations

import csv

import numpy as np

from ._rng import as_prng
from .validation import as_unit_vector

_SIGN_EPS = 1e-12


def canonical_direction(w) -> np.ndarray:
    """Fix the antipodal sign of a unit vector.

    The representative of {w, -w} has its first coordinate of magnitude
    above 1e-12 positive.  Only the sign is touched (negation is exact in
    floating point), so the operation is idempotent bit-for-bit.
    """
    w = as_unit_vector(w)
    for coord in w:
        if abs(coord) > _SIGN_EPS:
            return -w if coord < 0.0 else w
    raise ValueError("zero direction has no canonical form")


class SphereGrid:
    """Deterministic candidate directions covering the half-sphere.

    ``directions`` is a (K, d) array of canonical unit vectors, no two equal
    or antipodal.  ``step_angle`` is the characteristic angular spacing used
    for covering bounds: pi/K for d=2, sqrt(2*pi/K) for the d=3 spiral.
    """

    def __init__(self, d: int, directions: np.ndarray, step_angle: float):
        self.d = d
        self.directions = directions
        self.step_angle = step_angle

    @property
    def resolution(self) -> int:
        return len(self.directions)

    def __len__(self) -> int:
        return len(self.directions)

    def __getitem__(self, i) -> np.ndarray:
        return self.directions[i]

    def to_csv(self, path) -> None:
        """One direction per row, for debugging."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"w{i}" for i in range(self.d)])
            for row in self.directions:
                writer.writerow([repr(float(v)) for v in row])


def sphere_grid(d: int, resolution: int) -> SphereGrid:
    """Half-sphere grid of unit directions.

    d=2: angles j*pi/K for j < K, so every line through the origin has a
    grid direction within half a step; the worst-case angular distance
    1 - cos(pi/(2K)) is below (pi^2/8) / K^2.

    d=3: a Fibonacci spiral on the upper hemisphere (golden-angle
    azimuths, heights centered on K equal-area slabs), canonicalized.
    Empirically the covering distance 1 - |w . w_grid| stays below 8/K
    for K >= 8.

    Higher d is rejected; estimators accept caller-supplied candidate
    arrays instead, since covering grids grow exponentially with d.
    """
    if resolution < 8 and not (d == 2 and resolution >= 2):
        raise ValueError("grid resolution must be >= 8")
    if d == 2:
        theta = np.arange(resolution) * np.pi / resolution
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        step = np.pi / resolution
    elif d == 3:
        i = np.arange(resolution)
        z = (i + 0.5) / resolution
        r = np.sqrt(1.0 - z * z)
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * i
        dirs = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        step = np.sqrt(2.0 * np.pi / resolution)
    else:
        raise ValueError(
            "sphere grids are built for d in {2, 3}; pass explicit candidates for higher d"
        )
    dirs = np.array([canonical_direction(w) for w in dirs])
    return SphereGrid(d=d, directions=dirs, step_angle=step)


def angular_distance(w, v) -> float:
    """1 - |w . v|: zero for equal or antipodal directions, one when
    orthogonal."""
    w = as_unit_vector(w)
    v = as_unit_vector(v)
    return float(1.0 - min(abs(float(w @ v)), 1.0))


def position_distance(x: float, y: float) -> float:
    """|x - y|, the 1-d counterpart of the angular distance."""
    return abs(float(x) - float(y))


def density_difference(density, w, v) -> float:
    """Absolute gap between the cut densities of two separators.

    For d >= 2 pass unit directions and a mixture; for 1-d cuts pass scalar
    positions and a piecewise-linear density.
    """
    if np.isscalar(w) or np.asarray(w).ndim == 0:
        return abs(float(density.pdf(w)) - float(density.pdf(v)))
    w = as_unit_vector(w)
    v = as_unit_vector(v)
    return abs(float(density.projection_density(w)) - float(density.projection_density(v)))


def halfspace_disagreement(density, w, v, n_mc: int, seed) -> float:
    """Monte-Carlo mass of the half-space symmetric difference.

    Draws ``n_mc`` points, takes the fraction ``s`` whose side of the cut
    differs between ``w`` and ``v``, and returns ``min(s, 1 - s)``: the two
    symmetric-difference masses (against the positive and negative
    half-space of ``w``) are complementary up to the null boundary set, so
    the minimum over both is exactly this.  The standard error is at most
    ``1 / (2 sqrt(n_mc))``.
    """
    if n_mc < 10_000:
        raise ValueError("n_mc must be >= 10^4 for a usable standard error")
    w = as_unit_vector(w)
    v = as_unit_vector(v)
    points = density.sample(n_mc, as_prng(seed))
    s = float(np.mean((points @ w >= 0.0) != (points @ v >= 0.0)))
    return min(s, 1.0 - s)


def interval_mass_distance(density, x: float, y: float) -> float:
    """Exact 1-d counterpart of the symmetric-difference distance.

    The half-lines above two cut points differ on the interval between
    them; its mass comes straight from the cdf, no sampling needed.
    """
    lo, hi = sorted((float(x), float(y)))
    s = float(density.cdf(hi) - density.cdf(lo))
    return min(s, 1.0 - s)


def mc_standard_error(n_mc: int) -> float:
    """Worst-case binomial standard error of a Monte-Carlo fraction."""
    return 0.5 / np.sqrt(n_mc)
