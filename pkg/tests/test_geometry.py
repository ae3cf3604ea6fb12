import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowcut._rng import Prng
from lowcut.densities import GaussianMixture, two_blob_mixture, vee_density
from lowcut.geometry import (
    angular_distance,
    canonical_direction,
    density_difference,
    halfspace_disagreement,
    interval_mass_distance,
    mc_standard_error,
    position_distance,
    sphere_grid,
)

PHI_0 = 1.0 / math.sqrt(2.0 * math.pi)
PHI_2 = math.exp(-2.0) / math.sqrt(2.0 * math.pi)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# canonicalization


def test_canonical_flips_sign():
    w = canonical_direction([-1.0, 0.0])
    np.testing.assert_allclose(w, [1.0, 0.0])
    w = canonical_direction([0.0, -1.0])
    np.testing.assert_allclose(w, [0.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=2, max_size=4))
def test_canonical_idempotent(coords):
    v = np.asarray(coords)
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        return
    w = canonical_direction(v / norm)
    np.testing.assert_array_equal(canonical_direction(w), w)
    # first clearly nonzero coordinate is positive
    nonzero = w[np.abs(w) > 1e-12]
    assert nonzero[0] > 0


def test_canonical_rejects_non_unit():
    with pytest.raises(ValueError):
        canonical_direction([2.0, 0.0])


# ---------------------------------------------------------------------------
# grids


def test_grid_d2_small():
    g = sphere_grid(2, 2)
    np.testing.assert_allclose(g.directions, [[1.0, 0.0], [0.0, 1.0]], atol=1e-15)
    g4 = sphere_grid(2, 4)
    r = math.sqrt(0.5)
    assert any(np.allclose(w, [r, r]) for w in g4.directions)


def test_grid_d2_covering():
    g = sphere_grid(2, 360)
    rng = np.random.default_rng(0)
    v = rng.normal(size=(10_000, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    worst = np.max(1.0 - np.abs(v @ g.directions.T).max(axis=1))
    assert worst <= 1.0 - math.cos(math.pi / 360)


def test_grid_d3_covering_bound():
    for k in (8, 100, 1000):
        g = sphere_grid(3, k)
        rng = np.random.default_rng(k)
        v = rng.normal(size=(3000, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        worst = np.max(1.0 - np.abs(v @ g.directions.T).max(axis=1))
        assert worst <= 8.0 / k


def test_grid_no_duplicate_or_antipodal():
    for d, k in ((2, 37), (3, 64)):
        g = sphere_grid(d, k)
        dots = np.abs(g.directions @ g.directions.T)
        np.fill_diagonal(dots, 0.0)
        assert dots.max() < 1.0 - 1e-12


def test_grid_deterministic():
    a = sphere_grid(3, 128).directions
    b = sphere_grid(3, 128).directions
    np.testing.assert_array_equal(a, b)


def test_grid_rejects_unsupported():
    with pytest.raises(ValueError):
        sphere_grid(4, 100)
    with pytest.raises(ValueError):
        sphere_grid(3, 4)


def test_grid_csv_export(tmp_path):
    g = sphere_grid(2, 8)
    path = tmp_path / "grid.csv"
    g.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "w0,w1"
    assert len(lines) == 9
    first = [float(v) for v in lines[1].split(",")]
    np.testing.assert_allclose(first, g.directions[0])


# ---------------------------------------------------------------------------
# distances


def test_angular_distance_values():
    w = unit([1.0, 0.0])
    assert angular_distance(w, w) == 0.0
    assert angular_distance(w, [0.0, 1.0]) == 1.0
    assert angular_distance(w, -w) == 0.0
    forty_five = unit([1.0, 1.0])
    assert angular_distance(w, forty_five) == pytest.approx(1.0 - math.sqrt(2) / 2)
    with pytest.raises(ValueError):
        angular_distance([1.0, 1.0], w)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=3),
       st.lists(st.floats(-1, 1), min_size=2, max_size=3))
def test_angular_distance_symmetric_bounded(a, b):
    if len(a) != len(b):
        return
    a, b = np.asarray(a), np.asarray(b)
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(b) < 1e-3:
        return
    w, v = unit(a), unit(b)
    d1, d2 = angular_distance(w, v), angular_distance(v, w)
    assert d1 == pytest.approx(d2, abs=1e-12)
    assert 0.0 <= d1 <= 1.0


def test_angular_distance_bulk_properties():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        w = unit(rng.normal(size=3))
        v = unit(rng.normal(size=3))
        d = angular_distance(w, v)
        assert 0.0 <= d <= 1.0
        assert d == angular_distance(v, w)
        # self-distance is zero up to one ulp of the dot product
        assert angular_distance(w, w) <= 1e-14
        assert angular_distance(w, -w) <= 1e-14


def test_position_distance():
    assert position_distance(0.25, 0.75) == 0.5
    assert position_distance(0.3, 0.3) == 0.0


def test_density_difference_values():
    std = GaussianMixture([1.0], [[0.0, 0.0]], [np.eye(2)])
    w, v = unit([1.0, 0.0]), unit([0.3, 1.0])
    assert density_difference(std, w, w) == 0.0
    assert density_difference(std, w, v) == pytest.approx(0.0, abs=1e-12)
    mix = two_blob_mixture(2.0)
    got = density_difference(mix, [1.0, 0.0], [0.0, 1.0])
    assert got == pytest.approx(abs(PHI_2 - PHI_0), abs=1e-6)


def test_density_difference_1d():
    d = vee_density()
    assert density_difference(d, 0.25, 0.5) == pytest.approx(4.0 / 3.0)


def test_halfspace_disagreement_values():
    std = GaussianMixture([1.0], [[0.0, 0.0]], [np.eye(2)])
    w = unit([1.0, 0.0])
    assert halfspace_disagreement(std, w, w, 10_000, 1) == 0.0
    assert halfspace_disagreement(std, w, -w, 10_000, 1) == 0.0
    got = halfspace_disagreement(std, w, [0.0, 1.0], 1_000_000, 1)
    assert got == pytest.approx(0.5, abs=0.002)
    with pytest.raises(ValueError):
        halfspace_disagreement(std, w, w, 100, 1)


def test_halfspace_disagreement_symmetry():
    mix = two_blob_mixture(1.0)
    rng = np.random.default_rng(2)
    for i in range(20):
        w = unit(rng.normal(size=2))
        v = unit(rng.normal(size=2))
        # identical draws: exactly symmetric
        assert halfspace_disagreement(mix, w, v, 10_000, i) == \
            halfspace_disagreement(mix, v, w, 10_000, i)
        # independent draws: within two standard errors
        a = halfspace_disagreement(mix, w, v, 40_000, Prng(1000 + i))
        b = halfspace_disagreement(mix, v, w, 40_000, Prng(2000 + i))
        assert abs(a - b) <= 2.0 * mc_standard_error(40_000) + 1e-12


def test_interval_mass_distance_exact():
    d = vee_density()
    assert interval_mass_distance(d, 0.25, 0.25) == 0.0
    got = interval_mass_distance(d, 0.0, 0.5)
    assert got == pytest.approx(1.0 / 3.0, abs=1e-12)
    # complement symmetry: mass above 1/2 is 2/3, so min picks 1/3
    assert interval_mass_distance(d, 0.5, 1.0) == pytest.approx(1.0 / 3.0)
