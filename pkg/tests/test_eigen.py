import math

import numpy as np
import pytest

import oracles
from nodal_lab.eigen import (Eigenfunction, TrigPolynomial, basis_indices, constant,
                             eigenvalue_list, is_eigenvalue, lattice_vectors, lift,
                             nearest_eigenvalue, product_mode, random_trig_polynomial, sectoral,
                             synth_random, torus_representatives)
from nodal_lab.errors import PreconditionError
from nodal_lab.geometry import Manifold, chart_to_xyz, conformal_factor, xyz_to_chart


def test_multiplicities_match_brute_force(frozen):
    for row in frozen["multiplicity"]:
        assert len(lattice_vectors(row["dim"], row["lam"])) == row["count"]
        m = dict(eigenvalue_list(Manifold.TORUS2 if row["dim"] == 2 else Manifold.TORUS3, row["lam"]))
        assert m[row["lam"]] == row["count"]


def test_eigenvalue_lists():
    assert eigenvalue_list("Sphere2", 12) == [(0, 1), (2, 3), (6, 5), (12, 7)]
    assert eigenvalue_list("Torus2", 5) == [(0, 1), (1, 4), (2, 4), (4, 4), (5, 8)]
    assert not is_eigenvalue("Torus2", 3) and is_eigenvalue("Torus3", 3)
    assert not is_eigenvalue("Torus3", 7)
    assert nearest_eigenvalue("Sphere2", 100) == 110 or nearest_eigenvalue("Sphere2", 100) == 90
    assert nearest_eigenvalue("Torus2", 3) in (2, 4)
    with pytest.raises(PreconditionError):
        eigenvalue_list("Torus2", 0.5)


def test_representatives_halve_lattice():
    for lam in (1, 25, 50, 65):
        assert 2 * len(torus_representatives(2, lam)) == len(lattice_vectors(2, lam))
    assert len(basis_indices("Sphere2", 20)) == 9


def test_spherical_harmonics_match_scipy(frozen):
    for row in frozen["sph_harm"]:
        l, m = row["l"], row["m"]
        u = Eigenfunction(Manifold.SPHERE2, l * (l + 1), (((l, m), 1.0),))
        th, ph = row["theta"], row["phi"]
        xyz = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        chart = "north" if xyz[2] > -0.5 else "south"
        w = xyz_to_chart(xyz, chart)
        assert float(u(w[None], chart)[0]) == pytest.approx(row["value"], rel=1e-10, abs=1e-12)


def test_spherical_harmonic_values_agree_across_charts():
    u = synth_random("Sphere2", 30, seed=5)
    w = np.array([[0.6, 0.7], [-0.9, 0.4]])
    xyz = chart_to_xyz(w, "north")
    np.testing.assert_allclose(u(w, "north"), u(xyz_to_chart(xyz, "south"), "south"), rtol=1e-11)


@pytest.mark.parametrize("manifold,lam", [("Torus2", 25), ("Torus2", 65), ("Torus3", 14)])
def test_torus_eigen_equation(manifold, lam):
    u = synth_random(manifold, lam, seed=lam)
    x = np.random.default_rng(0).uniform(0, 2 * math.pi, size=(50, u.dim))
    np.testing.assert_allclose(u.trig.hessian_trace(x), -lam * u(x), atol=1e-9 * lam)


@pytest.mark.parametrize("lam", [6, 42, 110])
def test_sphere_eigen_equation_in_chart(lam):
    # Laplace-Beltrami in a conformal chart is sigma^-2 times the flat Laplacian
    u = synth_random("Sphere2", lam, seed=lam)
    rng = np.random.default_rng(1)
    h = 1e-4
    for w in rng.uniform(-0.8, 0.8, size=(10, 2)):
        e = np.eye(2) * h
        pts = np.array([w + e[0], w - e[0], w + e[1], w - e[1], w])
        v = u(pts, "north")
        lap = (v[0] + v[1] + v[2] + v[3] - 4 * v[4]) / h ** 2
        s = float(conformal_factor(w))
        assert lap / s ** 2 == pytest.approx(-lam * v[4], abs=2e-5 * lam * np.abs(v).max())


def test_gradients_match_finite_differences():
    for u in (synth_random("Torus2", 13, 2), synth_random("Sphere2", 20, 3)):
        w = np.array([[0.3, -0.4]])
        g = u.gradient(w, "north")[0]
        h = 1e-6
        fd = [(u(w + h * e, "north") - u(w - h * e, "north"))[0] / (2 * h) for e in np.eye(2)]
        np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-8)


def test_synth_random_unit_norm_and_deterministic():
    for manifold, lam in (("Torus2", 100), ("Torus3", 29), ("Sphere2", 72)):
        u = synth_random(manifold, lam, seed=9)
        assert u.l2_norm() == pytest.approx(1.0, rel=1e-12)
        assert synth_random(manifold, lam, seed=9) == u


def test_torus_norm_by_quadrature():
    u = synth_random("Torus2", 25, seed=1)
    n = 64
    V = u.trig.grid(n)
    assert np.mean(V ** 2) * (2 * math.pi) ** 2 == pytest.approx(1.0, rel=1e-12)


def test_sphere_norm_by_quadrature():
    u = synth_random("Sphere2", 12, seed=2)
    x, wx = np.polynomial.legendre.leggauss(40)
    ph = np.linspace(0, 2 * math.pi, 81)[:-1]
    Z, P = np.meshgrid(x, ph, indexing="ij")
    r = np.sqrt(1 - Z ** 2)
    xyz = np.stack([r * np.cos(P), r * np.sin(P), Z], axis=-1)
    north = xyz[..., 2] > 0
    vals = np.where(north, u(xyz_to_chart(xyz, "north"), "north"),
                    u(xyz_to_chart(xyz, "south"), "south"))
    total = np.sum(wx[:, None] * vals ** 2) * 2 * math.pi / len(ph)
    assert total == pytest.approx(1.0, rel=1e-10)


def test_fft_grid_matches_direct_evaluation():
    u = synth_random("Torus3", 11, seed=4)
    n = 16
    V = u.trig.grid(n, offset=0.25)
    x = (np.arange(n) + 0.25) * 2 * math.pi / n
    G = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1)
    np.testing.assert_allclose(V, u(G.reshape(-1, 3)).reshape(V.shape), atol=1e-12)
    with pytest.raises(PreconditionError):
        u.trig.grid(4)


def test_translation_and_scaling():
    u = synth_random("Torus2", 10, seed=6)
    s = np.array([0.4, -1.1])
    x = np.random.default_rng(2).uniform(0, 6, (20, 2))
    np.testing.assert_allclose(u.translated(s)(x), u(x - s), atol=1e-12)
    np.testing.assert_allclose(u.scaled(-2.5)(x), -2.5 * u(x))


def test_product_mode_and_sectoral():
    u = product_mode(("sin", 3), ("sin", 4))
    x = np.random.default_rng(3).uniform(0, 6, (20, 2))
    np.testing.assert_allclose(u(x), np.sin(3 * x[:, 0]) * np.sin(4 * x[:, 1]), atol=1e-13)
    assert u.lam == 25
    v = product_mode(("cos", 0), ("sin", 2), ("cos", 1))
    y = np.random.default_rng(4).uniform(0, 6, (20, 3))
    np.testing.assert_allclose(v(y), np.sin(2 * y[:, 1]) * np.cos(y[:, 2]), atol=1e-13)
    s = sectoral(6)
    w = np.array([[0.5, 0.2]])
    xyz = chart_to_xyz(w)[0]
    th, ph = math.acos(xyz[2]), math.atan2(xyz[1], xyz[0])
    assert float(s(w)[0]) == pytest.approx(oracles.real_sph_harm(6, 6, th, ph), rel=1e-10)


def test_invalid_eigenfunctions_rejected():
    with pytest.raises(PreconditionError):
        Eigenfunction("Torus2", 5, ((("cos", (1, 1)), 1.0),))
    with pytest.raises(PreconditionError):
        Eigenfunction("Torus2", 2, ((("cos", (1, 1)), 0.0),))
    with pytest.raises(PreconditionError):
        Eigenfunction("Torus2", 2, ((("cos", (-1, 1)), 1.0),))
    with pytest.raises(PreconditionError):
        basis_indices("Torus2", 3)
    with pytest.raises(PreconditionError):
        lift(constant("Torus2"))


def test_lift_is_harmonic():
    h = lift(synth_random("Torus2", 17, seed=8))
    rng = np.random.default_rng(5)
    d = 1e-3
    for p in rng.uniform(-0.5, 0.5, (5, 3)):
        lap = sum(float(h((p + d * e)[None])[0] + h((p - d * e)[None])[0] - 2 * h(p[None])[0])
                  for e in np.eye(3)) / d ** 2
        assert abs(lap) < 1e-4 * 17 * abs(float(h(p[None])[0])) + 1e-4
    g = h.gradient(np.array([[0.1, 0.2, 0.3]]))[0]
    assert g.shape == (3,)
    assert h.t_mass(0.0, 0.5) == pytest.approx(math.sinh(math.sqrt(17)) / math.sqrt(17))


def test_random_trig_polynomial():
    p = random_trig_polynomial(3, 5, 4, seed=1, integer=True)
    assert isinstance(p, TrigPolynomial) and p.dim == 3
    assert np.all(p.freqs == np.rint(p.freqs))
