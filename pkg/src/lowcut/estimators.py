"""The linear-cut learning algorithms.

Three algorithms, each a pure function of (sample, parameters):

* bucketing — split [0, 1] into k equal buckets, return the midpoint of the
  emptiest one (rightmost on ties).  Consistent when k grows like o(sqrt(m)),
  inconsistent when it grows like m.
* hard margin (1-d) — midpoint of the largest gap in the sorted sample
  augmented with sentinels 0 and 1.
* soft margin (any d) — over a candidate grid of unit normals, return the
  direction whose gamma-strip contains the fewest sample points.

Each also has a scikit-learn style estimator class (``fit`` stores the cut,
``predict`` labels points by their side of it), so the algorithms compose
with pipelines and parameter search out of the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator

from .geometry import SphereGrid
from .validation import as_points, as_sample_1d, as_unit_vector, check_nonnegative


@dataclass(frozen=True)
class CutEstimate:
    """One estimate: a cut point (d=1) or a unit normal (d>=2).

    ``score`` is the quantity the algorithm optimized (winning bucket or
    strip count, winning gap or margin width); ``runner_up`` is the second
    best value of the same quantity and ``index`` the winning bucket or
    candidate index.
    """

    point: float | None = None
    direction: np.ndarray | None = None
    score: float = 0.0
    runner_up: float = 0.0
    index: int = 0

    @property
    def dim(self) -> int:
        return 1 if self.point is not None else len(self.direction)

    @property
    def values(self) -> tuple[float, ...]:
        if self.point is not None:
            return (self.point,)
        return tuple(float(v) for v in self.direction)


def bucketing_cut(x, k: int) -> CutEstimate:
    """Midpoint of the emptiest of k equal-width buckets on [0, 1].

    Buckets are [i/k, (i+1)/k), the last one closed at 1.  Ties go to the
    rightmost bucket.
    """
    if k < 1:
        raise ValueError("bucket count must be >= 1")
    x = as_sample_1d(x)
    idx = np.minimum(np.floor(x * k).astype(np.int64), k - 1)
    counts = np.bincount(idx, minlength=k)
    # rightmost argmin
    best = k - 1 - int(np.argmin(counts[::-1]))
    ordered = np.sort(counts)
    runner = float(ordered[1]) if k > 1 else float(ordered[0])
    return CutEstimate(
        point=(best + 0.5) / k,
        score=float(counts[best]),
        runner_up=runner,
        index=best,
    )


def largest_gap_cut(x) -> CutEstimate:
    """Midpoint of the largest gap of the sample with sentinels 0 and 1.

    Ties go to the smallest gap index.
    """
    x = as_sample_1d(x)
    xs = np.sort(np.concatenate([[0.0, 1.0], x]))
    gaps = np.diff(xs)
    i = int(np.argmax(gaps))
    ordered = np.sort(gaps)
    runner = float(ordered[-2]) if len(gaps) > 1 else 0.0
    return CutEstimate(
        point=float((xs[i] + xs[i + 1]) / 2.0),
        score=float(gaps[i]),
        runner_up=runner,
        index=i,
    )


def _candidate_array(candidates) -> np.ndarray:
    if isinstance(candidates, SphereGrid):
        return candidates.directions
    arr = np.asarray(candidates, dtype=float)
    if arr.ndim != 2:
        raise ValueError("candidates must be a SphereGrid or a (K, d) array")
    if len(arr) == 0:
        raise ValueError("candidate set is empty")
    for w in arr:
        as_unit_vector(w)
    return arr


def strip_count(X, w, gamma: float) -> int:
    """Number of sample points within distance gamma of the hyperplane
    normal to w, boundary inclusive."""
    w = as_unit_vector(w)
    gamma = check_nonnegative(gamma, "gamma")
    X = as_points(X, d=len(w))
    return int(np.count_nonzero(np.abs(X @ w) <= gamma))


def soft_margin_cut(X, gamma: float, candidates) -> CutEstimate:
    """Candidate direction whose gamma-strip holds the fewest points.

    Ties break to the lowest candidate index (one fixed choice among the
    arbitrary ones).  The score/runner_up diagnostics are the winning and
    second-lowest strip counts.
    """
    W = _candidate_array(candidates)
    gamma = check_nonnegative(gamma, "gamma")
    X = as_points(X, d=W.shape[1])
    if len(X):
        counts = np.count_nonzero(np.abs(X @ W.T) <= gamma, axis=0)
    else:
        counts = np.zeros(len(W), dtype=np.int64)
    best = int(np.argmin(counts))
    ordered = np.sort(counts)
    runner = float(ordered[1]) if len(W) > 1 else float(ordered[0])
    return CutEstimate(
        direction=W[best],
        score=float(counts[best]),
        runner_up=runner,
        index=best,
    )


def widest_margin_cut(X, candidates) -> CutEstimate:
    """Candidate direction with the widest point-free slab around it.

    Maximizes min |w . x| over the sample; ties break to the lowest
    candidate index.  Experimental for d > 1: unlike the 1-d largest-gap
    rule, this variant carries no consistency guarantee, and records made
    with it are flagged accordingly.
    """
    W = _candidate_array(candidates)
    X = as_points(X, d=W.shape[1])
    if len(X) == 0:
        raise ValueError("widest-margin cut is undefined for an empty sample")
    margins = np.min(np.abs(X @ W.T), axis=0)
    best = int(np.argmax(margins))
    ordered = np.sort(margins)
    runner = float(ordered[-2]) if len(W) > 1 else float(ordered[-1])
    return CutEstimate(
        direction=W[best],
        score=float(margins[best]),
        runner_up=runner,
        index=best,
    )


# ---------------------------------------------------------------------------
# Parameter schedules


@dataclass(frozen=True)
class Schedule:
    """Named rule mapping sample size m to an algorithm parameter."""

    name: str
    fn: Callable[[int], float]

    def __call__(self, m: int) -> float:
        if m < 1:
            raise ValueError("sample size must be >= 1")
        return self.fn(m)


def _int_cbrt_ceil(m: int) -> int:
    k = math.ceil(m ** (1.0 / 3.0))
    # float cube roots can overshoot an exact cube
    while k > 1 and (k - 1) ** 3 >= m:
        k -= 1
    return k


_SAFE_EXPR_NAMES = {
    "log": math.log,
    "log2": math.log2,
    "sqrt": math.sqrt,
    "cbrt": lambda v: v ** (1.0 / 3.0),
    "ceil": math.ceil,
    "floor": math.floor,
    "min": min,
    "max": max,
    "pi": math.pi,
    "e": math.e,
}


def _custom_rule(expr: str) -> Callable[[int], float]:
    code = compile(expr, "<schedule>", "eval")
    for name in code.co_names:
        if name != "m" and name not in _SAFE_EXPR_NAMES:
            raise ValueError(f"schedule expression uses unknown name {name!r}")

    def rule(m: int) -> float:
        return float(eval(code, {"__builtins__": {}}, {"m": m, **_SAFE_EXPR_NAMES}))

    return rule


def bucket_schedule(spec: str = "cbrt") -> Schedule:
    """Bucket-count rule k(m).

    "cbrt" (default) is ceil(m^(1/3)): it grows without bound yet stays
    o(sqrt(m)), the regime where bucketing converges.  "identity" is
    k(m) = m, the canonical too-many-buckets failure rule.  "custom:<expr>"
    evaluates an expression in m (math names allowed) and rounds up.
    """
    if spec == "cbrt":
        return Schedule("cbrt", _int_cbrt_ceil)
    if spec == "identity":
        return Schedule("identity", lambda m: m)
    if spec.startswith("custom:"):
        rule = _custom_rule(spec[len("custom:"):])
        return Schedule(spec, lambda m: max(1, math.ceil(rule(m))))
    raise ValueError(f"unknown bucket schedule {spec!r}")


def width_schedule(spec: str = "cbrt") -> Schedule:
    """Strip-width rule gamma(m).

    "cbrt" (default) is m^(-1/3): it shrinks to zero yet stays
    omega(1/sqrt(m)), the regime where the soft-margin scan converges.
    "custom:<expr>" evaluates an expression in m.
    """
    if spec == "cbrt":
        return Schedule("cbrt", lambda m: m ** (-1.0 / 3.0))
    if spec.startswith("custom:"):
        return Schedule(spec, _custom_rule(spec[len("custom:"):]))
    raise ValueError(f"unknown width schedule {spec!r}")


# ---------------------------------------------------------------------------
# scikit-learn style wrappers


class _FittedCutMixin:
    def _require_fit(self):
        if getattr(self, "estimate_", None) is None:
            raise RuntimeError("estimator is not fitted yet; call fit(X) first")


class BucketingCut(BaseEstimator, _FittedCutMixin):
    """Lowest-density cut on [0, 1] from equal-width bucket counts.

    Parameters
    ----------
    buckets : "cbrt", "identity", "custom:<expr>", or a fixed int.

    Attributes
    ----------
    cut_ : the estimated cut position.
    k_ : bucket count actually used.
    estimate_ : full :class:`CutEstimate` with count diagnostics.
    """

    def __init__(self, buckets="cbrt"):
        self.buckets = buckets

    def _resolve_k(self, m: int) -> int:
        if isinstance(self.buckets, int):
            return self.buckets
        return int(bucket_schedule(self.buckets)(m))

    def fit(self, X, y=None):
        x = as_sample_1d(X)
        self.k_ = self._resolve_k(len(x)) if len(x) else self._resolve_k(1)
        self.estimate_ = bucketing_cut(x, self.k_)
        self.cut_ = self.estimate_.point
        return self

    def predict(self, X):
        self._require_fit()
        x = as_sample_1d(X, unit_interval=False)
        return np.where(x >= self.cut_, 1, -1)


class HardMarginCut(BaseEstimator, _FittedCutMixin):
    """Largest-gap cut on [0, 1] (sentinels 0 and 1 included).

    Attributes: ``cut_``, ``gap_`` (winning gap width), ``estimate_``.
    """

    def fit(self, X, y=None):
        x = as_sample_1d(X)
        self.estimate_ = largest_gap_cut(x)
        self.cut_ = self.estimate_.point
        self.gap_ = self.estimate_.score
        return self

    def predict(self, X):
        self._require_fit()
        x = as_sample_1d(X, unit_interval=False)
        return np.where(x >= self.cut_, 1, -1)


class _GridCutBase(BaseEstimator, _FittedCutMixin):
    def _resolve_candidates(self, d: int):
        from .geometry import sphere_grid

        if self.candidates is not None:
            return _candidate_array(self.candidates)
        return sphere_grid(d, self.grid_size).directions

    def predict(self, X):
        self._require_fit()
        X = as_points(X, d=len(self.direction_))
        return np.where(X @ self.direction_ >= 0.0, 1, -1)


class SoftMarginCut(_GridCutBase):
    """Direction of the emptiest gamma-strip over a candidate grid.

    Parameters
    ----------
    gamma : "cbrt", "custom:<expr>", or a fixed float strip half-width.
    grid_size : resolution of the default half-sphere grid (d <= 3).
    candidates : optional explicit (K, d) array or SphereGrid; required
        beyond d=3, where no default grid is built.

    Attributes: ``direction_``, ``gamma_``, ``estimate_``.
    """

    def __init__(self, gamma="cbrt", grid_size=360, candidates=None):
        self.gamma = gamma
        self.grid_size = grid_size
        self.candidates = candidates

    def fit(self, X, y=None):
        X = as_points(X)
        W = self._resolve_candidates(X.shape[1])
        if isinstance(self.gamma, (int, float)):
            self.gamma_ = float(self.gamma)
        else:
            self.gamma_ = float(width_schedule(self.gamma)(max(len(X), 1)))
        self.estimate_ = soft_margin_cut(X, self.gamma_, W)
        self.direction_ = self.estimate_.direction
        return self


class WidestMarginCut(_GridCutBase):
    """Direction of the widest point-free slab over a candidate grid.

    Experimental above one dimension; see :func:`widest_margin_cut`.
    Attributes: ``direction_``, ``margin_``, ``estimate_``.
    """

    def __init__(self, grid_size=360, candidates=None):
        self.grid_size = grid_size
        self.candidates = candidates

    def fit(self, X, y=None):
        X = as_points(X)
        W = self._resolve_candidates(X.shape[1])
        self.estimate_ = widest_margin_cut(X, W)
        self.direction_ = self.estimate_.direction
        self.margin_ = self.estimate_.score
        return self


ESTIMATOR_NAMES = ("bucketing", "hard1d", "soft", "hardnd")
