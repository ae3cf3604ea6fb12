"""Synthetic distribution models with analytically known lowest-density cuts.

Two families are provided:

* :class:`PiecewiseLinearDensity` — a 1-d density on [0, 1] given as a knot
  list, linear in between, zero outside.  The cdf is piecewise quadratic and
  is inverted in closed form, so sampling is an exact quantile transform.
* :class:`GaussianMixture` — a d-dimensional mixture.  The integral of the
  density over the hyperplane through the origin with unit normal ``w``
  equals the density of the 1-d projection ``w @ X`` at zero, which is a
  closed-form mixture of normal pdfs; no quadrature is needed.

Both serialize to small JSON specs, and named builders ("uniform", "thm2",
"adversarial(n)") are addressable from experiment configs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import geometry
from ._rng import as_prng
from .validation import as_unit_vector, check_nonnegative

MASS_TOL = 1e-9
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class OracleResult:
    """Ground-truth minimizer report.

    ``margin`` is how far the best competitor's density sits above the
    minimum: for knot searches, the gap to the second-lowest knot; for grid
    searches, the gap to the best direction outside a small exclusion
    neighbourhood of the argmin.  A margin of zero flags a degenerate
    (non-unique) minimizer.
    """

    value: float
    margin: float
    position: float | None = None
    direction: np.ndarray | None = None
    index: int | None = None


class PiecewiseLinearDensity:
    """1-d probability density on [0, 1], linear between knots.

    Parameters
    ----------
    knots : sequence of (x, f) pairs
        Positions strictly increasing, first at 0, last at 1, values >= 0.
        Values are rescaled so the trapezoid integral is exactly one; the
        applied factor is exposed as ``scale`` so callers can specify shapes
        without computing the normalizing constant by hand.
    """

    def __init__(self, knots):
        pts = np.asarray(knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("knots must be a sequence of at least two (x, f) pairs")
        xs, fs = pts[:, 0], pts[:, 1]
        if not np.all(np.isfinite(pts)):
            raise ValueError("knots contain non-finite values")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("first knot must be at x=0 and last at x=1")
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("knot positions must be strictly increasing")
        if np.any(fs < 0.0):
            raise ValueError("density values must be >= 0")
        raw_mass = float(np.sum((fs[:-1] + fs[1:]) * np.diff(xs)) / 2.0)
        if raw_mass <= 0.0:
            raise ValueError("density has zero total mass")
        self.scale = 1.0 / raw_mass
        self.xs = xs
        self.fs = fs * self.scale
        # cumulative mass at each knot; the last entry is 1 up to rounding
        seg = (self.fs[:-1] + self.fs[1:]) * np.diff(xs) / 2.0
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        if abs(self._cum[-1] - 1.0) > MASS_TOL:
            raise AssertionError("normalization failed to reach unit mass")

    @property
    def knots(self):
        return list(zip(self.xs.tolist(), self.fs.tolist()))

    def pdf(self, x):
        """Density at x; linear interpolation inside [0, 1], zero outside."""
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= 1.0)
        out = np.where(inside, np.interp(x, self.xs, self.fs), 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        """Exact piecewise-quadratic integral of the pdf."""
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, 1.0)
        i = np.clip(np.searchsorted(self.xs, xc, side="right") - 1, 0, len(self.xs) - 2)
        y = xc - self.xs[i]
        dx = self.xs[i + 1] - self.xs[i]
        slope = (self.fs[i + 1] - self.fs[i]) / dx
        val = self._cum[i] + self.fs[i] * y + 0.5 * slope * y * y
        out = np.clip(val, 0.0, 1.0)
        return out if out.ndim else float(out)

    def quantile(self, u):
        """Smallest x with cdf(x) >= u, by per-segment quadratic inversion.

        On a segment [x0, x1] with endpoint densities f0, f1 the cdf gains
        ``f0*y + s*y^2/2`` at offset y (s the density slope); the root is
        taken in the cancellation-free form ``2t / (f0 + sqrt(f0^2 + 2st))``.
        Where the density vanishes on a whole segment the cdf plateaus and
        the left end of the plateau is returned.
        """
        u = np.asarray(u, dtype=float)
        if u.size and (np.min(u) < 0.0 or np.max(u) > 1.0):
            raise ValueError("quantile argument must lie in [0, 1]")
        j = np.clip(np.searchsorted(self._cum[1:], u, side="left"), 0, len(self.xs) - 2)
        t = u - self._cum[j]
        f0 = self.fs[j]
        dx = self.xs[j + 1] - self.xs[j]
        slope = (self.fs[j + 1] - self.fs[j]) / dx
        disc = np.maximum(f0 * f0 + 2.0 * slope * t, 0.0)
        denom = f0 + np.sqrt(disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(denom > 0.0, 2.0 * t / np.where(denom > 0.0, denom, 1.0), 0.0)
        out = np.clip(self.xs[j] + np.minimum(y, dx), 0.0, 1.0)
        return out if out.ndim else float(out)

    def sample(self, m: int, seed) -> np.ndarray:
        """m i.i.d. draws via quantile transform; deterministic given seed."""
        if m < 0:
            raise ValueError("sample size must be >= 0")
        prng = as_prng(seed)
        return self.quantile(prng.uniforms(m))

    def minimizer(self) -> OracleResult:
        """Exact lowest-density point.

        Linear pieces attain their extrema at knots, so the global minimum
        is the lowest knot value.  The margin is the gap to the second
        lowest knot; zero means the minimizer is not unique.
        """
        order = np.argsort(self.fs, kind="stable")
        best = int(order[0])
        value = float(self.fs[best])
        margin = float(self.fs[order[1]] - value) if len(order) > 1 else np.inf
        return OracleResult(value=value, margin=margin, position=float(self.xs[best]))

    def interval_mass(self, lo: float, hi: float) -> float:
        """Probability mass of [lo, hi]."""
        if hi < lo:
            raise ValueError("interval endpoints out of order")
        return float(self.cdf(hi) - self.cdf(lo))

    def to_spec(self) -> dict:
        return {"kind": "pwl", "knots": [[float(x), float(f)] for x, f in self.knots]}


def uniform_density() -> PiecewiseLinearDensity:
    """Uniform density on [0, 1]."""
    return PiecewiseLinearDensity([(0.0, 1.0), (1.0, 1.0)])


def vee_density() -> PiecewiseLinearDensity:
    """Density falling linearly to a unique zero at x = 1/4, flat at 4/3 on
    the right half.  The canonical example where over-fine bucketing fails:
    empty buckets appear in the flat right half long before the valley is
    resolved."""
    return PiecewiseLinearDensity(
        [(0.0, 4.0 / 3.0), (0.25, 0.0), (0.5, 4.0 / 3.0), (1.0, 4.0 / 3.0)]
    )


def adversarial_pair(n: int):
    """Mirrored near-uniform densities that finite samples cannot tell apart.

    ``f`` is constant except for a thin V-notch of width 1/n reaching zero
    at 1/4; ``g`` is its reflection, g(x) = f(1-x), with the notch at 3/4.
    Outside the two notch intervals the densities are identical, so a sample
    that misses both notches carries no information about which one
    generated it.  Requires n >= 4 so the notch fits inside [0, 1/2].
    """
    if n < 4:
        raise ValueError("sharpness n must be >= 4")
    half = 1.0 / (2.0 * n)
    f = PiecewiseLinearDensity(
        [(0.0, 1.0), (0.25 - half, 1.0), (0.25, 0.0), (0.25 + half, 1.0), (1.0, 1.0)]
    )
    g = PiecewiseLinearDensity(
        [(0.0, 1.0), (0.75 - half, 1.0), (0.75, 0.0), (0.75 + half, 1.0), (1.0, 1.0)]
    )
    return f, g


def notch_intervals(n: int):
    """The two width-1/n intervals around 1/4 and 3/4 cut out by the pair."""
    half = 1.0 / (2.0 * n)
    return (0.25 - half, 0.25 + half), (0.75 - half, 0.75 + half)


class GaussianMixture:
    """d-dimensional Gaussian mixture with closed-form hyperplane densities.

    Parameters
    ----------
    weights : (K,) positive, summing to one within 1e-12.
    means : (K, d) component means, d >= 2.
    covariances : (K, d, d) symmetric positive-definite matrices
        (symmetry checked to 1e-12; definiteness via Cholesky).
    """

    def __init__(self, weights, means, covariances):
        w = np.asarray(weights, dtype=float)
        mu = np.asarray(means, dtype=float)
        cov = np.asarray(covariances, dtype=float)
        if w.ndim != 1 or mu.ndim != 2 or cov.ndim != 3:
            raise ValueError("expected weights (K,), means (K,d), covariances (K,d,d)")
        k, d = mu.shape
        if d < 2:
            raise ValueError("mixture dimension must be >= 2")
        if w.shape != (k,) or cov.shape != (k, d, d):
            raise ValueError("component counts disagree across weights/means/covariances")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        if np.max(np.abs(cov - np.transpose(cov, (0, 2, 1)))) > 1e-12:
            raise ValueError("covariances must be symmetric within 1e-12")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariances must be positive-definite") from exc
        self.weights = w
        self.means = mu
        self.covariances = cov
        self._chol = chol
        self._cumw = np.cumsum(w)

    @property
    def d(self) -> int:
        return self.means.shape[1]

    def sample(self, m: int, seed) -> np.ndarray:
        """m i.i.d. draws: component picked by weight from one uniform, then
        an affine (Cholesky) transform of Box-Muller normals.  Draw order is
        fixed: all component picks first, then all normals row-major."""
        if m < 0:
            raise ValueError("sample size must be >= 0")
        prng = as_prng(seed)
        comp = np.searchsorted(self._cumw, prng.uniforms(m), side="right")
        comp = np.minimum(comp, len(self.weights) - 1)
        z = prng.normals(m * self.d).reshape(m, self.d)
        return self.means[comp] + np.einsum("nij,nj->ni", self._chol[comp], z)

    def projected(self, w) -> tuple[np.ndarray, np.ndarray]:
        """Means and standard deviations of the 1-d projection w @ X per
        component; ``w`` may be one direction (d,) or a stack (K, d)."""
        w = np.asarray(w, dtype=float)
        mus = w @ self.means.T
        sig2 = np.einsum("...i,kij,...j->...k", w, self.covariances, w)
        return mus, np.sqrt(sig2)

    def projection_density(self, w):
        """Hyperplane density: the pdf of the projection w @ X at zero.

        Antipodal symmetry holds exactly in floating point: negating ``w``
        negates each projected mean and leaves its square unchanged.
        """
        w_arr = np.asarray(w, dtype=float)
        if w_arr.ndim == 1:
            as_unit_vector(w_arr)
        mus, sig = self.projected(w_arr)
        vals = np.exp(-0.5 * (mus / sig) ** 2) / (sig * _SQRT_2PI)
        out = vals @ self.weights
        return out if out.ndim else float(out)

    def strip_mass(self, w, gamma: float) -> float:
        """Probability mass of the slab {x : |w @ x| <= gamma}.

        Nondecreasing in gamma, saturating at one; mass / (2 gamma) tends to
        ``projection_density(w)`` as gamma shrinks.
        """
        w = as_unit_vector(w)
        gamma = check_nonnegative(gamma, "gamma")
        mus, sig = self.projected(w)
        upper = ndtr((gamma - mus) / sig)
        lower = ndtr((-gamma - mus) / sig)
        return float(np.clip((upper - lower) @ self.weights, 0.0, 1.0))

    def to_spec(self) -> dict:
        return {
            "kind": "gmm",
            "d": self.d,
            "components": [
                {
                    "w": float(wk),
                    "mean": mk.tolist(),
                    "cov": ck.tolist(),
                }
                for wk, mk, ck in zip(self.weights, self.means, self.covariances)
            ],
        }


def two_blob_mixture(separation: float = 2.0) -> GaussianMixture:
    """Equal-weight identity-covariance pair at (+/-separation, 0) in d=2."""
    return GaussianMixture(
        weights=[0.5, 0.5],
        means=[[separation, 0.0], [-separation, 0.0]],
        covariances=[np.eye(2), np.eye(2)],
    )


def oracle_minimizer(
    mixture: GaussianMixture,
    resolution: int = 3600,
    grid: "geometry.SphereGrid | None" = None,
    exclusion: float | None = None,
) -> OracleResult:
    """Brute-force grid argmin of the hyperplane density.

    Scans ``projection_density`` over a half-sphere grid and returns the
    argmin (ties broken by lowest grid index).  Within the grid no direction
    has strictly smaller density.  The margin is measured against the best
    direction outside an exclusion neighbourhood of the winner (default:
    five angular grid steps), since immediate neighbours of a smooth argmin
    are always near-ties.
    """
    if grid is None:
        if resolution < 8:
            raise ValueError("oracle resolution must be >= 8")
        grid = geometry.sphere_grid(mixture.d, resolution)
    dirs = grid.directions
    values = mixture.projection_density(dirs)
    best = int(np.argmin(values))
    w_star = dirs[best]
    if exclusion is None:
        exclusion = 1.0 - np.cos(5.0 * grid.step_angle)
    far = (1.0 - np.abs(dirs @ w_star)) > exclusion
    margin = float(np.min(values[far]) - values[best]) if np.any(far) else np.inf
    return OracleResult(
        value=float(values[best]),
        margin=margin,
        direction=w_star,
        index=best,
    )


_ADVERSARIAL_RE = re.compile(r"^adversarial\((\d+)\)$")

_NAMED_BUILDERS = {
    "uniform": uniform_density,
    "thm2": vee_density,
}


def from_spec(spec):
    """Resolve a density from a builder name, a JSON string, or a dict.

    Named forms: "uniform", "thm2", and "adversarial(n)" (which returns the
    (f, g) pair).  Dict forms follow ``to_spec``'s schema.
    """
    if isinstance(spec, str):
        name = spec.strip()
        if name in _NAMED_BUILDERS:
            return _NAMED_BUILDERS[name]()
        m = _ADVERSARIAL_RE.match(name)
        if m:
            return adversarial_pair(int(m.group(1)))
        if name.startswith("{"):
            return from_spec(json.loads(name))
        raise ValueError(f"unknown density name {spec!r}")
    if not isinstance(spec, dict):
        raise ValueError("density spec must be a name or a JSON object")
    kind = spec.get("kind")
    if kind == "pwl":
        return PiecewiseLinearDensity(spec["knots"])
    if kind == "gmm":
        comps = spec["components"]
        gmm = GaussianMixture(
            weights=[c["w"] for c in comps],
            means=[c["mean"] for c in comps],
            covariances=[c["cov"] for c in comps],
        )
        if "d" in spec and int(spec["d"]) != gmm.d:
            raise ValueError("declared dimension disagrees with component means")
        return gmm
    raise ValueError(f"unknown density kind {kind!r}")


def builder_names() -> list[str]:
    return sorted(_NAMED_BUILDERS) + ["adversarial(n)"]
