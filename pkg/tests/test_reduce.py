import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist, squareform

from clusterpower import datagen as dg
from clusterpower.reduce import MDSParams, classical_mds, mds, projected_separation


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_rigid_triangle_is_reproduced():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    moved = tri @ rotation(0.7).T + [3.0, -2.0]
    proj = mds(moved, rng=np.random.default_rng(0))
    assert proj.stress <= 1e-6
    np.testing.assert_allclose(pdist(proj.coords), pdist(tri), atol=1e-3)


def test_three_points_in_five_dims():
    pts = np.zeros((3, 5))
    pts[1, 0] = 3.0
    pts[2, 1] = 4.0
    proj = mds(pts, rng=np.random.default_rng(1))
    assert sorted(pdist(proj.coords)) == pytest.approx([3, 4, 5], abs=1e-3)


def test_planar_data_embeds_exactly():
    rng = np.random.default_rng(4)
    plane = rng.normal(size=(25, 2))
    basis = np.linalg.qr(rng.normal(size=(6, 2)))[0]
    lifted = plane @ basis.T + rng.normal(size=6)
    proj = mds(lifted, rng=np.random.default_rng(2), max_iter=3000, tol=1e-12)
    assert proj.normalized_stress <= 1e-3
    assert proj.stress <= 1e-6 * proj.total_squared_distance


def test_classical_init_recovers_plane_immediately():
    rng = np.random.default_rng(5)
    plane = rng.normal(size=(30, 2))
    lifted = np.hstack([plane, np.zeros((30, 3))])
    proj = mds(lifted, init="classical")
    assert proj.stress <= 1e-9 * proj.total_squared_distance
    torgerson = classical_mds(squareform(pdist(plane)))
    np.testing.assert_allclose(pdist(torgerson), pdist(plane), atol=1e-9)


@settings(max_examples=25)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 30), p=st.integers(2, 8))
def test_stress_never_increases(seed, n, p):
    data = np.random.default_rng(seed).normal(size=(n, p))
    proj = mds(data, n_init=2, rng=np.random.default_rng(seed + 1))
    h = np.asarray(proj.stress_history)
    assert np.all(np.diff(h) <= 1e-9 * h[:-1] + 1e-12)
    assert proj.stress == h[-1]
    np.testing.assert_allclose(proj.coords.mean(axis=0), 0, atol=1e-9)


def test_identical_rows_are_degenerate():
    proj = mds(np.ones((5, 3)), rng=np.random.default_rng(0))
    assert proj.degenerate
    np.testing.assert_array_equal(proj.coords, 0)


def test_too_few_rows():
    with pytest.raises(ValueError):
        mds(np.zeros((2, 3)))


def test_deterministic_given_seed():
    data = np.random.default_rng(3).normal(size=(40, 5))
    a = MDSParams().run(data, np.random.default_rng(11))
    b = MDSParams().run(data, np.random.default_rng(11))
    np.testing.assert_array_equal(a.coords, b.coords)


def test_projected_separation_examples():
    assert projected_separation([[0, 0], [1, 1], [4, 0], [5, 1]], [0, 0, 1, 1]) == pytest.approx(4.0)
    three = [[0, 0], [3, 0], [0, 4]]
    assert projected_separation(three, [0, 1, 2]) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        projected_separation([[0, 0], [1, 1]], [0, 0])


@given(
    seed=st.integers(0, 10_000),
    theta=st.floats(0, 2 * math.pi),
    shift=st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
)
def test_projected_separation_rigid_invariance(seed, theta, shift):
    rng = np.random.default_rng(seed)
    coords = rng.normal(size=(12, 2))
    truth = np.repeat([0, 1, 2], 4)
    moved = coords @ rotation(theta).T + np.asarray(shift)
    assert projected_separation(moved, truth) == pytest.approx(projected_separation(coords, truth), rel=1e-9, abs=1e-9)


def test_projected_separation_label_permutation():
    coords = np.random.default_rng(0).normal(size=(10, 2))
    truth = np.array([0] * 5 + [1] * 5)
    assert projected_separation(coords, truth) == projected_separation(coords, 1 - truth)


def test_sampled_two_group_separation():
    pop = dg.make_equidistant_population(2, 6.0)
    ds = dg.sample(pop, 1000, np.random.default_rng(0))
    assert projected_separation(ds.data, ds.truth) == pytest.approx(6.0, abs=0.15)


def test_mds_does_not_shrink_grid_separation():
    pop = dg.make_grid_population("two_50_50", 1.3, 10, "none", rng=np.random.default_rng(1))
    ds = dg.sample(pop, 400, np.random.default_rng(2))
    proj = mds(ds.data, rng=np.random.default_rng(3))
    before = projected_separation(ds.data, ds.truth)
    after = projected_separation(proj.coords, ds.truth)
    assert after > before


def test_projection_csv(tmp_path):
    data = np.random.default_rng(0).normal(size=(6, 3))
    proj = mds(data, rng=np.random.default_rng(0))
    path = tmp_path / "p.csv"
    proj.to_csv(path, truth=[0, 0, 0, 1, 1, 1])
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,truth"
    np.testing.assert_array_equal(np.loadtxt(path, delimiter=",", skiprows=1)[:, :2], proj.coords)
