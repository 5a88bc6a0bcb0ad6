import json

import numpy as np
import pytest

from holoshear.coords import (
    CotangentVector,
    GenShearVector,
    LamVector,
    ShearVector,
    constraint_map,
    constraint_residual,
    coords_from_dict,
    coords_to_dict,
    dirac_matrix,
    kernel_basis,
    lamination_base,
    load_coords,
    sample_in_kernel,
    save_coords,
)
from holoshear.errors import GaugeError, GraphMismatchError
from holoshear.ralgebra import Lambda



def test_kernel_dimension(graph):
    cm = constraint_map(graph)
    # θ has rank F for a single puncture too (the one row is nonzero)
    assert cm.rank == graph.num_faces
    assert cm.kernel_dimension == graph.num_edges - graph.num_faces
    k = kernel_basis(cm)
    assert k.shape == (graph.num_edges, cm.kernel_dimension)
    assert np.allclose(cm.theta @ k, 0.0)


@pytest.mark.parametrize("space", ["teich", "lamination", "spacetime", "cotangent"])
def test_samples_satisfy_constraints(graph, space):
    cm = constraint_map(graph)
    for seed in range(5):
        v = sample_in_kernel(cm, seed, space, Lambda.ZERO)
        res = constraint_residual(v, cm)
        assert np.max(np.abs(res)) < 1e-12


def test_sampling_box_and_determinism(genus2):
    cm = constraint_map(genus2)
    a = sample_in_kernel(cm, 3, "spacetime", -1, xbox=0.5, ybox=0.25)
    b = sample_in_kernel(cm, 3, "spacetime", -1, xbox=0.5, ybox=0.25)
    assert np.array_equal(a.re, b.re) and np.array_equal(a.im, b.im)
    assert np.max(np.abs(a.re)) <= 0.5 + 1e-15
    assert np.max(np.abs(a.im)) <= 0.25 + 1e-15


def test_cotangent_sample_y_box(k4):
    from holoshear.poisson import wp_coefficients
    cm = constraint_map(k4)
    v = sample_in_kernel(cm, 1, "cotangent", ybox=0.3)
    y = wp_coefficients(k4) @ v.p
    assert np.max(np.abs(y)) <= 0.3 + 1e-12


def test_no_gauge(torus):
    cm = constraint_map(torus, gauge=None)
    assert not cm.is_admissible()
    with pytest.raises(GaugeError):
        dirac_matrix(cm)
    with pytest.raises(GaugeError):
        sample_in_kernel(cm, 0, "cotangent")
    with pytest.raises(GaugeError):
        constraint_map(torus, gauge=np.ones((2, 3)))


def test_default_gauge_admissible(graph):
    cm = constraint_map(graph)
    assert cm.is_admissible()
    assert np.allclose(dirac_matrix(cm), cm.theta @ cm.theta.T)


@pytest.mark.parametrize("space", ["teich", "lamination", "spacetime", "cotangent"])
def test_save_load_roundtrip(tmp_path, k4, space):
    v = sample_in_kernel(constraint_map(k4), 11, space, Lambda.MINUS)
    path = tmp_path / "v.json"
    save_coords(v, path)
    w = load_coords(path)
    assert type(w) is type(v)
    assert np.allclose(w.flat(), v.flat())
    assert w.fingerprint == v.fingerprint
    if space in ("lamination", "spacetime"):
        assert w.lam == Lambda.MINUS


def test_lamination_base_field(torus):
    x = ShearVector(torus, [1.0, -0.5, -0.5])
    w = LamVector(torus, [0.1, 0.2, -0.3], [0, 0, 0], 0)
    doc = coords_to_dict(w, base=x)
    assert np.allclose(lamination_base(doc, torus).x, x.x)
    assert lamination_base(coords_to_dict(w), torus) is None


def test_mismatched_graph(torus, k4):
    v = ShearVector(torus, [0.0, 0.0, 0.0])
    doc = coords_to_dict(v)
    with pytest.raises(GraphMismatchError):
        coords_from_dict(doc, graph=k4)
    with pytest.raises(GraphMismatchError):
        coords_from_dict(coords_to_dict(v, include_graph=False))
    with pytest.raises(GraphMismatchError):
        constraint_residual(v, constraint_map(k4))


def test_missing_and_unknown_edges(torus):
    doc = coords_to_dict(ShearVector(torus, [0.0, 0.0, 0.0]))
    doc["values"].pop("a")
    with pytest.raises(ValueError, match="lacks"):
        coords_from_dict(doc)
    doc["values"]["a"] = 0.0
    doc["values"]["q"] = 0.0
    with pytest.raises(ValueError, match="unknown"):
        coords_from_dict(doc)


def test_lambda_required(torus):
    doc = coords_to_dict(GenShearVector(torus, [0, 0, 0], [0, 0, 0], 1))
    doc["lambda"] = None
    with pytest.raises(ValueError, match="lambda"):
        coords_from_dict(doc)
    assert coords_from_dict(doc, lam=0).lam == Lambda.ZERO


def test_vector_shape_checked(torus):
    with pytest.raises(ValueError):
        ShearVector(torus, [0.0, 1.0])
    with pytest.raises(ValueError):
        CotangentVector(torus, [0.0] * 3, [0.0] * 4)


def test_by_label(torus):
    v = ShearVector(torus, [1.0, 2.0, 3.0])
    assert v.by_label() == {"a": 1.0, "b": 2.0, "c": 3.0}
    assert v["b"] == 2.0 and v[2] == 3.0
    json.dumps(coords_to_dict(sample_in_kernel(constraint_map(torus), 0, "cotangent")))
