import math

import numpy as np
import pytest

import oracles
from nodal_lab.doubling import (DoublingParams, check_linfty_estimate, check_monotonicity,
                                doubling_index, doubling_indices, lift_index_offset,
                                subdivision_threshold, tilde_index, tilde_indices,
                                verify_subdivision_lemma)
from nodal_lab.eigen import TrigPolynomial, constant, lift, product_mode, synth_random
from nodal_lab.errors import ChartError, MassUnderflowError, PreconditionError
from nodal_lab.geometry import BallSpec, CubeSpec, Manifold, lift_cube
from nodal_lab.quad import QuadratureSpec

EXACT = DoublingParams(quadrature=QuadratureSpec(kind="exact"))
GAUSS32 = DoublingParams(quadrature=QuadratureSpec(order=32))
LOG2_5 = math.log2(5)


def test_params_validation():
    with pytest.raises(PreconditionError):
        DoublingParams(l=4)
    with pytest.raises(PreconditionError):
        DoublingParams(tilde_depth=0)
    with pytest.raises(PreconditionError):
        doubling_index(lambda p: p[:, 0], CubeSpec((0.0,) * 4, 1.0), DoublingParams(l=3))


def test_constant_index():
    for dim in (2, 3):
        r = doubling_index(lambda p: np.ones(len(p)), CubeSpec((0.2,) * dim, 0.3), GAUSS32)
        assert r.N == pytest.approx(dim / 2 * LOG2_5, rel=1e-12)
        assert r.converged


def test_linear_index():
    r = doubling_index(lambda p: p[:, 0], CubeSpec((0.0, 0.0, 0.0), 0.7), GAUSS32)
    assert r.N == pytest.approx(2.5 * LOG2_5, rel=1e-12)
    assert r.N == pytest.approx(5.8048, abs=1e-4)


@pytest.mark.parametrize("center", [(0.0, 0.0, 0.0), (3.0, -1.0, 0.5), (-7.0, 2.0, 2.0)])
def test_exponential_index_center_independent(center):
    r = doubling_index(lambda p: np.exp(p[:, 0]), CubeSpec(center, 0.5), GAUSS32)
    ref = 0.5 * math.log2(25 * math.sinh(5) / math.sinh(1))
    assert r.N == pytest.approx(ref, rel=1e-10)
    assert ref == pytest.approx(oracles.exp_index(1.0, 3, 0.5))


def test_random_trig_indices_match_adaptive_oracle(frozen):
    for row in frozen["doubling_2d"]:
        p = TrigPolynomial(row["freqs"], row["a"], row["b"])
        q = CubeSpec(row["center"], row["half"])
        assert doubling_index(p, q, EXACT).N == pytest.approx(row["N"], rel=1e-8)
        assert doubling_index(p, q, GAUSS32).N == pytest.approx(row["N"], rel=1e-8)


def test_scalar_and_translation_invariance():
    u = synth_random(Manifold.TORUS2, 50, seed=3)
    q = CubeSpec((1.0, 2.0), 0.2)
    n = doubling_index(u, q, EXACT).N
    assert doubling_index(u.scaled(-1e6), q, EXACT).N == pytest.approx(n, abs=1e-12)
    assert doubling_index(u.scaled(3e-5), q, EXACT).N == pytest.approx(n, abs=1e-12)
    s = np.array([0.7, -0.3])
    qs = CubeSpec(tuple(np.asarray(q.center) + s), q.half_side)
    assert doubling_index(u.translated(s), qs, EXACT).N == pytest.approx(n, abs=1e-10)
    # a full period shift is the identity on the torus
    qp = CubeSpec((1.0 + 2 * math.pi, 2.0 - 2 * math.pi), 0.2)
    assert doubling_index(u, qp, EXACT).N == pytest.approx(n, abs=1e-9)


def test_vectorised_indices_match_scalar():
    u = synth_random(Manifold.TORUS2, 26, seed=4)
    centers = np.random.default_rng(0).uniform(0, 6, (12, 2))
    vals = doubling_indices(u, centers, 0.15, EXACT)
    ref = [doubling_index(u, CubeSpec(c, 0.15), GAUSS32).N for c in centers]
    np.testing.assert_allclose(vals, ref, rtol=1e-9)


def test_lift_index_is_base_plus_closed_form():
    u = synth_random(Manifold.TORUS2, 40, seed=5)
    h = lift(u)
    q = CubeSpec((0.5, 1.5), 0.1)
    base = doubling_index(u, q, EXACT).N
    for t in (-0.3, 0.0, 0.4):
        n = doubling_index(h, lift_cube(q, t), EXACT).N
        assert n == pytest.approx(base + lift_index_offset(h, 0.1), rel=1e-12)
    # the closed form agrees with direct tensor quadrature of the lift
    nq = doubling_index(h, lift_cube(q, 0.2), DoublingParams(quadrature=QuadratureSpec(order=32),
                                                             check_convergence=False)).N
    assert nq == pytest.approx(base + lift_index_offset(h, 0.1), rel=1e-8)
    # offset formula does not overflow for large arguments
    assert math.isfinite(lift_index_offset(lift(synth_random(Manifold.TORUS2, 10000, 0)), 3.0))


def test_mass_underflow():
    z = TrigPolynomial([[1.0, 0.0]], [0.0], [0.0])
    with pytest.raises(MassUnderflowError):
        doubling_index(z, CubeSpec((0.0, 0.0), 1.0), EXACT)


def test_chart_escape():
    u = synth_random(Manifold.SPHERE2, 6, seed=1)
    with pytest.raises(ChartError):
        doubling_index(u, CubeSpec((0.0, 0.0), 0.5), GAUSS32, manifold=Manifold.SPHERE2)


def test_nonnegative_index():
    rng = np.random.default_rng(7)
    for seed in range(20):
        u = synth_random(Manifold.TORUS2, 25, seed)
        c = rng.uniform(0, 6, 2)
        assert doubling_index(u, CubeSpec(c, rng.uniform(0.01, 1.0)), EXACT).N >= -1e-12


def test_tilde_index_examples():
    one = lambda p: np.ones(len(p))
    q = CubeSpec((0.0, 0.0, 0.0), 0.5)
    p = DoublingParams(quadrature=QuadratureSpec(order=8))
    assert tilde_index(one, q, p) == pytest.approx(1.5 * LOG2_5, rel=1e-12)
    # exponential: the largest index comes from the cube itself and decreases with size
    ex = oracles.ExpMode(2.0, 3)
    vals = [tilde_index(ex, q, DoublingParams(quadrature=QuadratureSpec(kind="exact"), tilde_depth=d))
            for d in (1, 2, 3)]
    assert vals[0] == pytest.approx(oracles.exp_index(2.0, 3, 0.5), rel=1e-12)
    assert oracles.exp_index(2.0, 3, 1e-6) == pytest.approx(1.5 * LOG2_5, rel=1e-4)


def test_tilde_monotone_in_depth_and_nested():
    u = synth_random(Manifold.TORUS2, 85, seed=2)
    q = CubeSpec((2.0, 3.0), 0.6)
    vals = [tilde_index(u, q, DoublingParams(quadrature=QuadratureSpec(kind="exact"), tilde_depth=d))
            for d in range(1, 5)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[0] >= doubling_index(u, q, EXACT).N
    # a dyadic child probed one level shallower sees a subset of the parent's cubes
    child = CubeSpec((1.7, 2.7), 0.3)
    shallow = DoublingParams(quadrature=QuadratureSpec(kind="exact"), tilde_depth=2)
    assert tilde_index(u, child, shallow) <= vals[2] + 1e-12
    n, cube = tilde_index(u, q, EXACT, return_cube=True)
    assert doubling_index(u, cube, EXACT).N == pytest.approx(n)


def test_tilde_indices_vectorised():
    h = lift(synth_random(Manifold.TORUS2, 20, seed=1))
    centers = np.array([[0.5, 0.5, 0.0], [2.0, 1.0, 0.1]])
    got = tilde_indices(h, centers, 0.3, EXACT)
    ref = [tilde_index(h, CubeSpec(c, 0.3), EXACT) for c in centers]
    np.testing.assert_allclose(got, ref, rtol=1e-12)


@pytest.mark.parametrize("dim,K,s", [(2, 2, 40.0), (2, 3, 60.0), (3, 2, 80.0)])
def test_subdivision_lemma_exponential_closed_forms(dim, K, s):
    # Both sides have closed forms.  For large s the stated inequality misses
    # by (K-1)(dim-1)/2 log2 l (the volume part of N0 is multiplied by K, the
    # exponential part is not); the 3/4 K N0 bound from the covering argument holds.
    Q = CubeSpec((0.0,) * dim, 1.0)
    rep = verify_subdivision_lemma(oracles.ExpMode(s, dim), Q, K, EXACT)
    assert rep.N0 == pytest.approx(oracles.exp_index(s, dim, 1.0 / (5 * K)), rel=1e-12)
    assert rep.lhs == pytest.approx(oracles.exp_index(s, dim, 0.2), rel=1e-12)
    assert not rep.vacuous
    assert rep.rhs - rep.lhs == pytest.approx((K - 1) * (dim - 1) / 2 * LOG2_5, rel=1e-3)
    assert not rep.holds and rep.holds_provable


def test_subdivision_lemma_exponential_sweep():
    # across s the provable form always holds; the stated form fails on
    # every non-vacuous exponential
    for dim in (2, 3):
        for s in (2.0, 5.0, 10.0, 20.0, 40.0, 80.0):
            rep = verify_subdivision_lemma(oracles.ExpMode(s, dim), CubeSpec((0.0,) * dim, 1.0), 2, EXACT)
            assert rep.holds_provable
            assert rep.holds == rep.vacuous


def test_subdivision_lemma_vacuous_for_constant():
    one = TrigPolynomial([[0.0, 0.0, 0.0]], [1.0], [0.0])
    rep = verify_subdivision_lemma(one, CubeSpec((0.0,) * 3, 1.0), 2, EXACT)
    assert rep.N0 == pytest.approx(1.5 * LOG2_5)
    assert rep.vacuous and rep.holds
    assert rep.threshold == pytest.approx(subdivision_threshold(3, 5))
    assert rep.threshold == pytest.approx(13.93, abs=0.01)


def test_monotonicity_checks():
    p = DoublingParams(quadrature=QuadratureSpec(order=8))
    one = lambda x: np.ones(len(x))
    q = CubeSpec((0.0, 0.0, 0.0), 1.0)
    q1 = CubeSpec((0.0, 0.0, 0.0), 1.0 / 16)
    r = check_monotonicity(one, q1, q, p)
    assert r.ratio == pytest.approx(1.0) and r.holds
    with pytest.raises(PreconditionError):
        check_monotonicity(one, CubeSpec((0.0, 0.0, 0.0), 0.1), q, p)
    # harmonic polynomials Re (x1 + i x2)^k at the origin
    for k in (1, 5, 10, 20):
        f = lambda x, k=k: np.real((x[:, 0] + 1j * x[:, 1]) ** k)
        r = check_monotonicity(f, q1, q, DoublingParams(quadrature=QuadratureSpec(order=32)))
        assert r.ratio <= p.C0


def test_monotonicity_lifted_eigenfunctions():
    for lam in (1, 10, 50, 100):
        h = lift(synth_random(Manifold.TORUS2, lam, seed=lam))
        q = CubeSpec((1.0, 2.0, 0.0), 0.8 / math.sqrt(lam))
        q1 = CubeSpec(q.center, q.half_side / 16)
        assert check_monotonicity(h, q1, q, EXACT).holds


def test_linfty_estimate():
    h = lift(product_mode(("sin", 1), ("cos", 0)))
    r = check_linfty_estimate(h, BallSpec((0.0, 0.0, 0.0), 0.3), EXACT)
    assert r.holds and r.ratio > 0
    one = TrigPolynomial([[0.0, 0.0, 0.0]], [1.0], [0.0])
    r = check_linfty_estimate(one, BallSpec((0.0, 0.0, 0.0), 0.3), EXACT)
    assert r.ratio == pytest.approx(2 ** (-1.5 * LOG2_5), rel=1e-9)


def test_linfty_estimate_sweep_stable_under_refinement():
    rng = np.random.default_rng(11)
    worst, worst_fine = 0.0, 0.0
    for i in range(10):
        lam = int(rng.choice([1, 2, 5, 10, 25, 50, 100]))
        h = lift(synth_random(Manifold.TORUS2, lam, seed=i))
        B = BallSpec(tuple(rng.uniform(0, 6, 2)) + (0.0,), rng.uniform(0.2, 1.5) / math.sqrt(lam))
        worst = max(worst, check_linfty_estimate(h, B, EXACT, samples=256).ratio)
        worst_fine = max(worst_fine, check_linfty_estimate(h, B, EXACT, samples=1024).ratio)
    assert worst <= EXACT.C7
    assert worst_fine == pytest.approx(worst, rel=0.05)


def test_constant_eigenfunction_has_volume_index():
    u = constant(Manifold.TORUS2, 2.0)
    assert doubling_index(u, CubeSpec((1.0, 1.0), 0.3), EXACT).N == pytest.approx(LOG2_5)
