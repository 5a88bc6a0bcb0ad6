import math

import mpmath
import numpy as np
import pytest

from holoshear.coords import (
    CotangentVector,
    GenShearVector,
    LamVector,
    ShearVector,
    constraint_map,
    constraint_residual,
    sample_in_kernel,
)
from holoshear.errors import DomainError, UnsupportedMoveError
from holoshear.fatgraph import graph_move, random_closed_path, transport_path
from holoshear.holonomy import holonomy
from holoshear.moves import (
    a_matrix,
    apply_move,
    canonical_space,
    decompose_move,
    face_correspondence,
    gauge_orbit_residual,
    hamiltonian_H,
    hamiltonian_H_prime,
    im_H_lambda,
    im_H_partials,
    move_cotangent,
    move_lam,
    move_x,
    move_z,
    pentagon_check,
    relation_suite,
    transpose,
)
from holoshear.poisson import cotangent_bivector, grav_bivector, numeric_gradient, pi_sharp, wp_coefficients
from holoshear.ralgebra import Lambda, RNum

from conftest import LAMBDAS

LOG2 = math.log(2.0)


def frame(g, alpha):
    return graph_move(g, g.edge_index(alpha)).frame


def test_move_x_at_zero(k4):
    fr = frame(k4, 0)
    x = ShearVector(k4, np.zeros(6))
    out = move_x(x, 0)
    assert out.x[fr.alpha] == 0.0
    assert out.x[fr.beta] == pytest.approx(LOG2) and out.x[fr.delta] == pytest.approx(LOG2)
    assert out.x[fr.gamma] == pytest.approx(-LOG2) and out.x[fr.epsilon] == pytest.approx(-LOG2)


def test_move_x_coincident_neighbours(torus):
    # on the torus β = δ and γ = ε, so each neighbour picks up two increments
    fr = frame(torus, "a")
    assert fr.beta == fr.delta and fr.gamma == fr.epsilon
    out = move_x(ShearVector(torus, [0.0, 0.5, -0.5]), "a")
    assert out.x[fr.beta] == pytest.approx(0.5 * (1 if fr.beta == 1 else -1) + 2 * LOG2)
    assert out.x[fr.gamma] == pytest.approx(0.5 * (1 if fr.gamma == 1 else -1) - 2 * LOG2)
    x = ShearVector(torus, [1.0, -0.5, -0.5])
    out = move_x(x, "a")
    expect = np.array(x.x)
    expect[0] = -1.0
    np.add.at(expect, [fr.beta, fr.delta], math.log1p(math.e))
    np.add.at(expect, [fr.gamma, fr.epsilon], -math.log1p(math.exp(-1.0)))
    assert np.allclose(out.x, expect, atol=1e-15)


def test_move_x_twice_and_constraints(graph, rng):
    cm = constraint_map(graph)
    x = sample_in_kernel(cm, rng)
    for a in range(graph.num_edges):
        if graph.is_loop(a):
            continue
        y = move_x(x, a)
        assert np.max(np.abs(constraint_residual(y, constraint_map(y.graph)))) < 1e-12
        back = move_x(y, a)
        # same labels, possibly a relabelled copy of the graph
        assert np.allclose([back[s] for s in graph.labels], x.x, atol=1e-12)


def test_loop_edge_rejected(dumbbell):
    with pytest.raises(UnsupportedMoveError):
        move_x(ShearVector(dumbbell, [0.0, 0.0, 0.0]), "a")


def test_move_lam_zero_w(k4, rng):
    x = sample_in_kernel(constraint_map(k4), rng)
    w = LamVector(k4, np.zeros(6), np.zeros(6), 0)
    x2, w2 = move_lam(x, w, 2)
    assert np.allclose(x2.x, move_x(x, 2).x)
    assert np.allclose(w2.re, 0.0) and np.allclose(w2.im, 0.0)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_move_lam_real_w_consistency(k4, lam, rng):
    cm = constraint_map(k4)
    x = sample_in_kernel(cm, rng)
    u = sample_in_kernel(cm, rng).x
    w = LamVector(k4, u, np.zeros(6), lam)
    x2, w2 = move_lam(x, w, 1)
    diff = move_x(ShearVector(k4, x.x + u), 1).x - move_x(x, 1).x
    assert np.allclose(w2.re, diff, atol=1e-12)
    assert np.allclose(w2.im, 0.0)
    assert np.allclose(x2.x, move_x(x, 1).x)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_move_lam_constraints_and_z(genus2, lam, rng):
    cm = constraint_map(genus2)
    x = sample_in_kernel(cm, rng, xbox=1.0)
    w = sample_in_kernel(cm, rng, "lamination", lam, xbox=1.0, ybox=0.5)
    x2, w2 = move_lam(x, w, 4)
    res = constraint_residual(w2, constraint_map(w2.graph))
    assert np.max(np.abs(res)) < 1e-10
    # z = x + w moves the same way
    z2 = move_z(GenShearVector(genus2, x.x + w.re, w.im, lam), 4)
    assert np.allclose(z2.re, x2.x + w2.re, atol=1e-12)
    assert np.allclose(z2.im, w2.im, atol=1e-12)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_move_z_real_slice(k4, lam, rng):
    x = sample_in_kernel(constraint_map(k4), rng)
    z2 = move_z(GenShearVector(k4, x.x, np.zeros(6), lam), 3)
    assert np.allclose(z2.re, move_x(x, 3).x, atol=1e-14)
    assert np.allclose(z2.im, 0.0, atol=1e-14)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_move_z_trace_invariance(genus2, lam, rng):
    z = sample_in_kernel(constraint_map(genus2), rng, "spacetime", lam)
    for a in (0, 3, 7):
        mv = graph_move(genus2, a)
        z2 = move_z(z, a)
        for _ in range(4):
            p = random_closed_path(genus2, rng, 2, 10)
            t1 = holonomy(p, z).trace()
            t2 = holonomy(transport_path(p, mv), z2).trace()
            s = 1.0 if t1.re * t2.re >= 0 else -1.0
            scale = max(1.0, abs(t1.re), abs(t1.im))
            assert abs(t1.re - s * t2.re) / scale < 1e-9
            assert abs(t1.im - s * t2.im) / scale < 1e-9


def test_branch_point_rejected(torus):
    z = GenShearVector(torus, [0.0, 0.0, 0.0], [math.pi, -math.pi / 2, -math.pi / 2], 1)
    with pytest.raises(DomainError, match="'a'"):
        move_z(z, "a")


def test_cotangent_p_zero_dual(k4, rng):
    x = sample_in_kernel(constraint_map(k4), rng)
    cv = CotangentVector(k4, x.x, np.zeros(6))
    out = move_cotangent(cv, 0, Lambda.ZERO)
    assert np.allclose(out.x, move_x(x, 0).x)
    assert out.p[0] == 0.0 and np.allclose(out.p, 0.0)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_cotangent_commuting_square(graph, lam, rng):
    cv = sample_in_kernel(constraint_map(graph), rng, "cotangent")
    for a in range(graph.num_edges):
        if graph.is_loop(a):
            continue
        lhs = pi_sharp(move_cotangent(cv, a, lam), lam)
        rhs = move_z(pi_sharp(cv, lam), a)
        assert np.allclose(lhs.re, rhs.re, atol=1e-12)
        assert np.allclose(lhs.im, rhs.im, atol=1e-12)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_cotangent_constraints_and_gauge_orbits(genus2, lam, rng):
    cv = sample_in_kernel(constraint_map(genus2), rng, "cotangent")
    out = move_cotangent(cv, 2, lam)
    th = constraint_map(out.graph).theta
    assert np.max(np.abs(th @ out.x)) < 1e-10
    mv = graph_move(genus2, 2)
    assert sorted(face_correspondence(mv)) == list(range(genus2.num_faces))
    for face in range(genus2.num_faces):
        assert gauge_orbit_residual(cv, 2, 0.37, face, lam) < 1e-12


@pytest.mark.parametrize("space, lam", [("teich", Lambda.PLUS)] + [
    (s, lam) for s in ("spacetime", "cotangent") for lam in LAMBDAS])
def test_decomposition(k4, space, lam, rng):
    cm = constraint_map(k4)
    v = sample_in_kernel(cm, rng, space, lam)
    a_map, b_map = decompose_move(k4, 1, space, lam)
    out = a_map(b_map(v))
    if space == "cotangent":
        full = move_cotangent(v, 1, lam)
    else:
        full, _ = apply_move(v, 1)
    assert out.graph.fingerprint == full.graph.fingerprint
    assert np.allclose(out.flat(), full.flat(), atol=1e-12)


def test_a_push_forward_exact(graph):
    for a in range(graph.num_edges):
        if graph.is_loop(a):
            continue
        post = graph_move(graph, a).post_graph
        a2 = a_matrix(graph, a)
        assert a2.dtype.kind == "i"
        assert np.array_equal(a2 @ wp_coefficients(graph) @ a2.T, 4 * wp_coefficients(post))
        assert np.array_equal(a2 @ a2, 4 * np.eye(graph.num_edges, dtype=int))


def test_cotangent_a_map(k4):
    a_map, _ = decompose_move(k4, 0, "cotangent")
    fr = frame(k4, 0)
    p = np.arange(1.0, 7.0)
    out = a_map(CotangentVector(k4, np.zeros(6), p))
    nb = [fr.beta, fr.gamma, fr.delta, fr.epsilon]
    assert out.p[0] == pytest.approx(-p[0] + 0.5 * sum(p[k] for k in nb))
    m = 2 * a_map.matrix
    pi = cotangent_bivector(k4).matrix
    assert np.array_equal(np.rint(m).astype(int) @ pi @ np.rint(m).astype(int).T, 4 * pi)


def _jacobian(f, at, step=1e-6):
    cols = []
    for i in range(at.size):
        e = np.zeros_like(at)
        e[i] = step
        cols.append((f(at + e) - f(at - e)) / (2 * step))
    return np.array(cols).T


@pytest.mark.parametrize("lam", LAMBDAS)
def test_moves_are_poisson(k4, lam, rng):
    z = sample_in_kernel(constraint_map(k4), rng, "spacetime", lam)
    post = graph_move(k4, 2).post_graph
    f = lambda v: move_z(GenShearVector(k4, v[:6], v[6:], lam), 2).flat()
    j = _jacobian(f, z.flat())
    assert np.allclose(j @ grav_bivector(k4).matrix @ j.T, grav_bivector(post).matrix, atol=1e-5)
    cv = sample_in_kernel(constraint_map(k4), rng, "cotangent")
    g = lambda v: move_cotangent(CotangentVector(k4, v[:6], v[6:]), 2, lam).flat()
    j = _jacobian(g, cv.flat())
    pi = cotangent_bivector(k4).matrix
    assert np.allclose(j @ pi @ j.T, pi, atol=1e-5)


def test_hamiltonian_values():
    assert hamiltonian_H(0.0) == pytest.approx(-math.pi ** 2 / 12, abs=1e-15)
    for x in (-3.0, -0.4, 0.0, 1.1, 5.0):
        ref = x * x / 4 + float(mpmath.polylog(2, -mpmath.e ** x))
        assert hamiltonian_H(x) == pytest.approx(ref, abs=1e-13)
        fd = numeric_gradient(lambda v: hamiltonian_H(v[0]), np.array([x]))[0]
        assert hamiltonian_H_prime(x) == pytest.approx(fd, abs=1e-6)


def test_im_h_cases():
    x, y = 0.7, -0.3
    assert im_H_lambda(RNum(x, y, 0)) == pytest.approx(0.5 * x * y - y * math.log1p(math.exp(x)))
    for lam in LAMBDAS:
        assert im_H_lambda(RNum(x, 0.0, lam)) == pytest.approx(0.0, abs=1e-15)
    ref = 0.5 * x * y + float(mpmath.im(mpmath.polylog(2, -mpmath.exp(x + 1j * y))))
    assert im_H_lambda(RNum(x, y, 1)) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_im_h_partials(lam):
    at = np.array([0.4, 0.25])
    fd = numeric_gradient(lambda v: im_H_lambda(RNum(v[0], v[1], lam)), at)
    gx, gy = im_H_partials(RNum(at[0], at[1], lam))
    assert gx == pytest.approx(fd[0], abs=1e-6) and gy == pytest.approx(fd[1], abs=1e-6)


def test_apply_move_record(k4, rng):
    z = sample_in_kernel(constraint_map(k4), rng, "spacetime", -1)
    out, rec = apply_move(z, "e12")
    fr = frame(k4, "e12")
    assert rec.alpha == fr.alpha and rec.frame == (fr.beta, fr.gamma, fr.delta, fr.epsilon)
    assert rec.pre_fingerprint == k4.fingerprint and rec.post_fingerprint == out.graph.fingerprint
    assert rec.space == "spacetime" and rec.lam == Lambda.MINUS
    with pytest.raises(TypeError):
        apply_move(LamVector(k4, np.zeros(6), np.zeros(6), -1), 0)


def test_canonical_space():
    assert canonical_space("z") == "spacetime" and canonical_space("XP") == "cotangent"
    with pytest.raises(ValueError):
        canonical_space("q")


def test_transpose_swaps_labels(torus):
    x = ShearVector(torus, [1.0, 2.0, -3.0])
    y = transpose(x, "a", "b")
    assert y["a"] == 2.0 and y["b"] == 1.0 and y["c"] == -3.0


@pytest.mark.parametrize("space", ["teich", "lamination", "spacetime", "cotangent"])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_pentagon_k4(k4, space, lam, rng):
    v = sample_in_kernel(constraint_map(k4), rng, space if space != "lamination" else "teich", lam)
    if space == "lamination":
        v = (v, sample_in_kernel(constraint_map(k4), rng, "lamination", lam))
    res, exp_res = pentagon_check(v, 0, 1, space, lam)
    assert res < 1e-9
    if exp_res is not None:
        assert exp_res < 1e-9


def test_pentagon_needs_adjacent_pair(k4):
    v = sample_in_kernel(constraint_map(k4), 0)
    # e01 and e23 are disjoint
    with pytest.raises(UnsupportedMoveError):
        pentagon_check(v, "e01", "e23")


@pytest.mark.parametrize("space", ["teich", "lamination", "spacetime", "cotangent"])
def test_relation_suite_k4(k4, space):
    rep = relation_suite(k4, space, 1, seed=3, samples=8)
    for name in ("involutivity", "naturality", "commutativity", "pentagon"):
        assert not rep[name].skipped
        assert rep[name].max_residual < 1e-9


def test_relation_suite_skips_on_torus(torus):
    rep = relation_suite(torus, "spacetime", 0, seed=1, samples=4)
    assert rep["involutivity"].max_residual < 1e-10
    assert rep["commutativity"].skipped and "skipped" in rep["commutativity"].notice
    assert rep["pentagon"].skipped
    assert rep["pentagon"].to_dict()["skipped"] is True


def test_relation_suite_deterministic_across_threads(genus2):
    one = relation_suite(genus2, "cotangent", -1, seed=5, samples=6, threads=1)
    many = relation_suite(genus2, "cotangent", -1, seed=5, samples=6, threads=4)
    assert {k: v.to_dict() for k, v in one.items()} == {k: v.to_dict() for k, v in many.items()}


def test_relation_suite_rejects_all_loops():
    from holoshear.fatgraph import FatGraph
    # single vertex pair joined by three edges has no loops; build a rose instead
    rose = FatGraph([[0, 3], [1, 4], [2, 5]], [[0, 1, 2], [3, 4, 5]])
    assert relation_suite(rose, "teich", 1, samples=2)["involutivity"].max_residual < 1e-10
