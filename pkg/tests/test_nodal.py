import math

import numpy as np
import pytest

from nodal_lab.eigen import TrigPolynomial, constant, product_mode, sectoral, synth_random
from nodal_lab.errors import PreconditionError
from nodal_lab.geometry import BallSpec, CubeSpec, Manifold
from nodal_lab.nodal import (clip_segments_to_disc, density_radius, extract_nodal_2d,
                             extract_nodal_3d, local_lower_bound_check, marching_squares,
                             partition_areas, sign_ball_search, vanishing_index)


def _seg_len(segs):
    return float(np.sum(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)))


# --- marching squares -----------------------------------------------------------------

def test_marching_squares_straight_line():
    xs = ys = np.linspace(-1, 1, 11)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    segs = marching_squares(X - 0.13, xs, ys)
    assert _seg_len(segs) == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(segs[..., 0], 0.13, atol=1e-12)


def test_marching_squares_circle_converges():
    f = lambda p: np.sum(p * p, axis=-1) - 0.25
    errs = []
    for n in (32, 64, 128):
        xs = np.linspace(-1, 1, n + 1)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        V = f(np.stack([X, Y], axis=-1))
        errs.append(abs(_seg_len(marching_squares(V, xs, xs, f=f)) - math.pi))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 2e-4


def test_saddle_resolved_by_center():
    # f = x y: the zero set is the two axes; cell [-1, 1]^2 is a saddle
    f = lambda p: p[..., 0] * p[..., 1] + 0.1
    xs = np.array([-1.0, 1.0])
    V = f(np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1))
    segs = marching_squares(V, xs, xs, f=f)
    assert len(segs) == 2
    # center positive: the positive corners (-1,-1), (1,1) connect through the center,
    # so each segment cuts off a negative corner
    mids = segs.mean(axis=1)
    assert np.all(np.sign(mids[:, 0]) == -np.sign(mids[:, 1]))


def test_vertex_zero_is_snapped_consistently():
    # the zero line passes exactly through grid vertices
    f = lambda p: p[..., 0] - p[..., 1]
    xs = np.linspace(0, 1, 9)
    V = f(np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1))
    segs = marching_squares(V, xs, xs, f=f)
    assert _seg_len(segs) == pytest.approx(math.sqrt(2), rel=1e-9)


def test_clip_segments():
    segs = np.array([[[-2.0, 0.0], [2.0, 0.0]], [[3.0, 3.0], [4.0, 4.0]]])
    out = clip_segments_to_disc(segs, (0.0, 0.0), 1.0)
    assert len(out) == 1
    assert _seg_len(out) == pytest.approx(2.0)


# --- 2D oracles -------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(1, 1), (3, 4), (2, 7), (5, 5)])
def test_product_mode_length(n, m):
    u = product_mode(("sin", n), ("sin", m))
    got = extract_nodal_2d(u, resolution=1024).total
    assert got == pytest.approx(4 * math.pi * (n + m), rel=2e-3)


def test_random_lengths_match_find_contours(frozen):
    for row in frozen["nodal_length_2d"]:
        t = TrigPolynomial(row["freqs"], row["a"], row["b"])
        from nodal_lab.eigen import from_trig, torus_representatives

        reps = set(torus_representatives(2, row["lam"]))
        assert {tuple(k) for k in row["freqs"]} <= reps
        u = from_trig(Manifold.TORUS2, row["lam"], t)
        assert extract_nodal_2d(u, resolution=1024).total == pytest.approx(row["length"], rel=2e-3)


def test_length_converges_under_refinement():
    u = synth_random(Manifold.TORUS2, 200, seed=1)
    a = extract_nodal_2d(u, resolution=512).total
    b = extract_nodal_2d(u, resolution=1024).total
    assert abs(a - b) / b < 5e-3


def test_invariances_2d():
    u = synth_random(Manifold.TORUS2, 65, seed=2)
    base = extract_nodal_2d(u, resolution=512).total
    assert extract_nodal_2d(u.scaled(-7.0), resolution=512).total == pytest.approx(base, rel=1e-9)
    shifted = extract_nodal_2d(u.translated((0.37, 1.9)), resolution=512).total
    assert shifted == pytest.approx(base, rel=5e-3)


def test_constant_has_empty_nodal_set():
    m = extract_nodal_2d(constant(Manifold.TORUS2), resolution=64)
    assert m.total == 0.0 and m.count == 0


def test_vertices_lie_on_zero_set():
    u = synth_random(Manifold.TORUS2, 50, seed=3)
    m = extract_nodal_2d(u, resolution=256)
    pts = m.elements.reshape(-1, 2)
    g = np.linalg.norm(u.gradient(pts), axis=1)
    # bisection leaves the points within a tiny fraction of the cell size
    assert np.max(np.abs(u(pts)) / np.maximum(g, 1e-3)) < 1e-5


def test_resolution_precondition():
    u = synth_random(Manifold.TORUS2, 10000, seed=0)
    with pytest.raises(PreconditionError):
        extract_nodal_2d(u, resolution=1000)


@pytest.mark.parametrize("l", [5, 10, 20])
def test_sectoral_length(l):
    m = extract_nodal_2d(sectoral(l), resolution=1024)
    assert m.total == pytest.approx(2 * math.pi * l, rel=0.015)
    assert set(np.unique(m.charts)) == {"north", "south"}


def test_zonal_harmonic_on_sphere():
    # Y_20 ~ 3 z^2 - 1 vanishes on two circles of latitude z = +-1/sqrt(3)
    from nodal_lab.eigen import Eigenfunction

    u = Eigenfunction(Manifold.SPHERE2, 6, (((2, 0), 1.0),))
    got = extract_nodal_2d(u, resolution=512).total
    assert got == pytest.approx(2 * 2 * math.pi * math.sqrt(2 / 3), rel=2e-3)


def test_region_extraction():
    u = product_mode(("sin", 1), ("sin", 1))
    # square around the origin sees both axes
    m = extract_nodal_2d(u, region=CubeSpec((0.0, 0.0), 1.0), resolution=128)
    assert m.total == pytest.approx(4.0, rel=1e-6)
    b = extract_nodal_2d(u, region=BallSpec((0.0, 0.0), 0.5), resolution=128)
    assert b.total == pytest.approx(2.0, rel=1e-6)


def test_export_text(tmp_path):
    m = extract_nodal_2d(product_mode(("sin", 1), ("sin", 2)), resolution=64)
    path = tmp_path / "n.txt"
    m.export_text(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# dim 2 elements")
    assert len(lines) == m.count + 1
    assert len(lines[1].split()) == 4
    s = extract_nodal_2d(sectoral(3), resolution=64)
    s.export_text(path)
    assert path.read_text().splitlines()[1].split()[-1] in ("north", "south")


# --- 3D -------------------------------------------------------------------------------

def test_planes_area_3d():
    u = product_mode(("sin", 2), ("cos", 0), ("cos", 0))
    m = extract_nodal_3d(u, resolution=64)
    assert m.total == pytest.approx(4 * (2 * math.pi) ** 2, rel=1e-7)
    assert m.meta["mesh_area"] == pytest.approx(m.total, rel=1e-9)


def test_3d_random_converges():
    u = synth_random(Manifold.TORUS3, 27, seed=1)
    a = extract_nodal_3d(u, resolution=64).total
    b = extract_nodal_3d(u, resolution=128).total
    assert abs(a - b) / b < 0.01


def test_3d_guards():
    u = synth_random(Manifold.TORUS3, 3, seed=0)
    with pytest.raises(PreconditionError):
        extract_nodal_3d(u, resolution=1024)
    with pytest.raises(PreconditionError):
        extract_nodal_3d(synth_random(Manifold.TORUS3, 10000, 0), resolution=64)
    with pytest.raises(PreconditionError):
        extract_nodal_3d(synth_random(Manifold.TORUS2, 5, 0))


def test_partition_sums_to_global():
    u = synth_random(Manifold.TORUS3, 50, seed=2)
    parts = partition_areas(u, 4, 16)
    glob = extract_nodal_3d(u, resolution=64, offset=0.0).total
    assert math.fsum(parts) == pytest.approx(glob, rel=1e-7)
    assert len(parts) == 64


# --- density, lower bound, sign balls -----------------------------------------------------

def test_density_radius_closed_forms():
    u = product_mode(("sin", 5), ("sin", 5))
    # farthest points are the cell centers, at distance pi / 10
    assert density_radius(u, samples=2048) == pytest.approx(math.pi / 10, rel=1e-3)
    v = product_mode(("sin", 1), ("cos", 0))
    assert density_radius(v, samples=1024) == pytest.approx(math.pi / 2, rel=1e-4)
    with pytest.raises(PreconditionError):
        density_radius(constant(Manifold.TORUS2))


def test_density_radius_sphere_zonal():
    # Y_10 ~ z vanishes on the equator: max distance pi/2 at the poles
    from nodal_lab.eigen import Eigenfunction

    u = Eigenfunction(Manifold.SPHERE2, 2, (((1, 0), 1.0),))
    assert density_radius(u, samples=2048) == pytest.approx(math.pi / 2, rel=1e-3)


def test_density_radius_scales_like_wavelength():
    for lam in (100, 400):
        u = synth_random(Manifold.TORUS2, lam, seed=lam)
        assert density_radius(u, samples=1024) * math.sqrt(lam) <= 3.0


def test_local_lower_bound_vacuous_at_simple_zero():
    u = product_mode(("sin", 2), ("sin", 2))
    rep = local_lower_bound_check(u, (0.0, 0.0), 0.09 / math.sqrt(8))
    assert rep.N == 2 and rep.vacuous and rep.holds
    with pytest.raises(PreconditionError):
        local_lower_bound_check(u, (0.3, 0.4), 0.01)
    with pytest.raises(PreconditionError):
        local_lower_bound_check(u, (0.0, 0.0), 1.0)


def test_local_lower_bound_sectoral_pole():
    l = 8
    u = sectoral(l)
    r = 0.099 / math.sqrt(l * (l + 1))
    rep = local_lower_bound_check(u, (0.0, 0.0), r, chart="north")
    assert rep.N == l
    assert not rep.vacuous and rep.holds
    # 2l half-meridians of geodesic length r/2 each; the grid loses a little
    # length where all of them meet at the pole
    assert rep.measured == pytest.approx(l * r, rel=0.01)
    assert vanishing_index(u, (0.0, 0.0), r) == l


def test_sign_balls_sectoral():
    l = 8
    u = sectoral(l)
    r = 0.099 / math.sqrt(l * (l + 1))
    rep = sign_ball_search(u, (0.0, 0.0), r, l, chart="north")
    assert rep.holds and rep.successful >= l / 2
    assert rep.weak_max_consistent
    with pytest.raises(PreconditionError):
        sign_ball_search(u, (0.0, 0.0), r, 2, chart="north")
