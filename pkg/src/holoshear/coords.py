"""Edge coordinate vectors, face constraints and gauge fixing.

Four kinds of vectors live on the edges of a fat graph:

* :class:`ShearVector` – real shear coordinates x^α (Teichmüller space);
* :class:`LamVector` – R_Λ-valued lamination coordinates w^α = u^α + ℓv^α;
* :class:`GenShearVector` – shear-bending coordinates z^α = x^α + ℓy^α;
* :class:`CotangentVector` – pairs (x^α, p_α) on T*ℝ^E.

Every vector holds a reference to its graph, so mixing graphs fails fast.
"""

from __future__ import annotations

import json

import numpy as np

from . import jsonio
from .errors import GaugeError, GraphMismatchError, RankError
from .fatgraph import FatGraph
from .ralgebra import Lambda, RNum

__all__ = [
    "SPACES",
    "ShearVector",
    "LamVector",
    "GenShearVector",
    "CotangentVector",
    "ConstraintMap",
    "constraint_map",
    "constraint_residual",
    "sample_in_kernel",
    "kernel_basis",
    "dirac_matrix",
    "coords_to_dict",
    "coords_from_dict",
    "save_coords",
    "load_coords",
    "lamination_base",
    "read_coords_document",
]

SPACES = ("teich", "lamination", "spacetime", "cotangent")


def _frozen(a, n, name):
    arr = np.array(a, dtype=float).reshape(-1)
    if arr.shape != (n,):
        raise ValueError(f"{name} needs {n} entries, got {arr.size}")
    arr.setflags(write=False)
    return arr


class _EdgeVector:
    __slots__ = ("graph",)
    space = ""

    @property
    def fingerprint(self) -> str:
        return self.graph.fingerprint

    def _same_graph(self, other):
        if other.graph.fingerprint != self.graph.fingerprint:
            raise GraphMismatchError("vectors live on different graphs")

    def by_label(self) -> dict:
        raise NotImplementedError


class ShearVector(_EdgeVector):
    """Real shear coordinates, one per edge."""

    __slots__ = ("x",)
    space = "teich"

    def __init__(self, graph: FatGraph, x):
        self.graph = graph
        self.x = _frozen(x, graph.num_edges, "x")

    def __getitem__(self, edge) -> float:
        return float(self.x[self.graph.edge_index(edge)])

    def flat(self) -> np.ndarray:
        return np.array(self.x)

    def by_label(self) -> dict:
        return {s: float(v) for s, v in zip(self.graph.labels, self.x)}

    def __repr__(self):
        return f"ShearVector({self.by_label()})"


class _RVector(_EdgeVector):
    __slots__ = ("re", "im", "lam")

    def __init__(self, graph: FatGraph, re, im=None, lam=Lambda.PLUS):
        self.graph = graph
        n = graph.num_edges
        if isinstance(re, RNum):
            re, im, lam = re.re, re.im, re.lam
        self.re = _frozen(re, n, "re")
        self.im = _frozen(np.zeros(n) if im is None else im, n, "im")
        self.lam = Lambda.parse(lam)

    @property
    def values(self) -> RNum:
        return RNum(np.array(self.re), np.array(self.im), self.lam)

    def __getitem__(self, edge) -> RNum:
        i = self.graph.edge_index(edge)
        return RNum(self.re[i], self.im[i], self.lam)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.re, self.im])

    def by_label(self) -> dict:
        return {s: [float(a), float(b)] for s, a, b in zip(self.graph.labels, self.re, self.im)}

    def __repr__(self):
        return f"{type(self).__name__}(Λ={int(self.lam)}, {self.by_label()})"


class LamVector(_RVector):
    """Lamination coordinates w = u + ℓv."""

    __slots__ = ()
    space = "lamination"

    u = property(lambda self: self.re)
    v = property(lambda self: self.im)


class GenShearVector(_RVector):
    """Shear-bending coordinates z = x + ℓy."""

    __slots__ = ()
    space = "spacetime"

    x = property(lambda self: self.re)
    y = property(lambda self: self.im)


class CotangentVector(_EdgeVector):
    """Point (x, p) of T*ℝ^E."""

    __slots__ = ("x", "p")
    space = "cotangent"

    def __init__(self, graph: FatGraph, x, p):
        self.graph = graph
        n = graph.num_edges
        self.x = _frozen(x, n, "x")
        self.p = _frozen(p, n, "p")

    def __getitem__(self, edge):
        i = self.graph.edge_index(edge)
        return float(self.x[i]), float(self.p[i])

    def flat(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    def by_label(self) -> dict:
        return {s: [float(a), float(b)] for s, a, b in zip(self.graph.labels, self.x, self.p)}

    def __repr__(self):
        return f"CotangentVector({self.by_label()})"


class ConstraintMap:
    """Face constraints θ (F × E) with an optional gauge matrix θ̃ (F × E).

    The gauge is stored row-per-face, so c̃_i(p) = Σ_α θ̃[i, α] p_α and the
    natural choice θ̃ = θᵀ of index notation is the array ``theta`` itself.
    """

    __slots__ = ("graph", "theta", "gauge")

    def __init__(self, graph: FatGraph, gauge="default"):
        self.graph = graph
        theta = graph.theta()
        theta.setflags(write=False)
        self.theta = theta
        if isinstance(gauge, str):
            if gauge != "default":
                raise ValueError(f"unknown gauge {gauge!r}")
            gauge = theta.astype(float)
        elif gauge is not None:
            gauge = np.array(gauge, dtype=float)
            if gauge.shape != theta.shape:
                raise GaugeError(f"gauge must have shape {theta.shape}, got {gauge.shape}")
        if gauge is not None:
            gauge.setflags(write=False)
        self.gauge = gauge

    @property
    def num_faces(self) -> int:
        return self.theta.shape[0]

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.theta))

    @property
    def kernel_dimension(self) -> int:
        return self.graph.num_edges - self.rank

    def is_admissible(self, tol: float = 1e-9) -> bool:
        if self.gauge is None:
            return False
        m = dirac_matrix(self)
        return bool(np.linalg.matrix_rank(m, tol=tol) == m.shape[0])


def constraint_map(graph: FatGraph, gauge="default") -> ConstraintMap:
    return ConstraintMap(graph, gauge)


def _check_bound(v, cm):
    if v.graph.fingerprint != cm.graph.fingerprint:
        raise GraphMismatchError("vector and constraint map belong to different graphs")


def constraint_residual(v, cm: ConstraintMap) -> np.ndarray:
    """θ·v per face.

    Real vectors give shape (F,).  R_Λ vectors give (F, 2) with the Re_ℓ and
    Im_ℓ residuals; cotangent vectors give (F, 2) holding c(x) and c̃(p).
    """
    _check_bound(v, cm)
    th = cm.theta.astype(float)
    if isinstance(v, ShearVector):
        return th @ v.x
    if isinstance(v, _RVector):
        return np.stack([th @ v.re, th @ v.im], axis=1)
    if isinstance(v, CotangentVector):
        if cm.gauge is None:
            raise GaugeError("cotangent residual needs a gauge matrix")
        return np.stack([th @ v.x, cm.gauge @ v.p], axis=1)
    raise TypeError(f"not a coordinate vector: {type(v).__name__}")


def _null_projector(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    rows = mat.shape[0]
    if np.linalg.matrix_rank(mat) != rows:
        raise RankError(f"constraint matrix has rank {np.linalg.matrix_rank(mat)} < {rows}")
    return np.eye(mat.shape[1]) - mat.T @ np.linalg.solve(mat @ mat.T, mat)


def kernel_basis(cm: ConstraintMap) -> np.ndarray:
    """Orthonormal basis of Ker θ as columns (E × (E − F))."""
    u, s, vt = np.linalg.svd(cm.theta.astype(float))
    r = int(np.sum(s > 1e-10))
    return vt[r:].T.copy()


def _project(proj, vec, mat):
    out = proj @ vec
    # one refinement step keeps the residual at rounding level
    mat = np.asarray(mat, dtype=float)
    return out - mat.T @ np.linalg.solve(mat @ mat.T, mat @ out)


def _box(vec, bound):
    m = float(np.max(np.abs(vec))) if vec.size else 0.0
    return vec * (bound / m) if m > bound else vec


def sample_in_kernel(cm: ConstraintMap, seed, space: str = "teich", lam=Lambda.PLUS,
                     xbox: float = 2.0, ybox: float = 1.0):
    """Seeded Gaussian sample projected orthogonally onto the constraint kernel.

    Samples are rescaled into ‖x‖∞ ≤ ``xbox`` and ‖y‖∞ ≤ ``ybox`` (for
    cotangent vectors the bound applies to y = π_WP p).  Cotangent fibres
    are gauge fixed to Ker c̃.
    """
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = cm.graph
    n = g.num_edges
    proj = _null_projector(cm.theta)

    def draw(bound):
        return _box(_project(proj, rng.standard_normal(n), cm.theta), bound)

    if space == "teich":
        return ShearVector(g, draw(xbox))
    if space == "lamination":
        return LamVector(g, draw(xbox), draw(ybox), lam)
    if space == "spacetime":
        return GenShearVector(g, draw(xbox), draw(ybox), lam)
    if cm.gauge is None:
        raise GaugeError("cotangent sampling needs a gauge matrix")
    from .poisson import wp_coefficients
    pi = wp_coefficients(g).astype(float)
    x = draw(xbox)
    gproj = _null_projector(cm.gauge)
    p = _project(gproj, rng.standard_normal(n), cm.gauge)
    y = pi @ p
    m = float(np.max(np.abs(y))) if y.size else 0.0
    if m > ybox:
        p = p * (ybox / m)
    return CotangentVector(g, x, p)


def dirac_matrix(cm: ConstraintMap) -> np.ndarray:
    """M = θ̃ θᵀ (F × F)."""
    if cm.gauge is None:
        raise GaugeError("Dirac matrix needs a gauge matrix")
    return cm.gauge @ cm.theta.T.astype(float)


# ---------------------------------------------------------------------------
# files


def coords_to_dict(v, include_graph: bool = True, base: ShearVector | None = None) -> dict:
    if isinstance(v, ShearVector):
        lam = None
        values = v.by_label()
    elif isinstance(v, _RVector):
        lam = int(v.lam)
        values = v.by_label()
    elif isinstance(v, CotangentVector):
        lam = None
        values = v.by_label()
    else:
        raise TypeError(f"not a coordinate vector: {type(v).__name__}")
    doc = {"lambda": lam, "space": v.space, "values": values,
           "graph_fingerprint": v.fingerprint}
    if base is not None:
        base._same_graph(v)
        doc["base"] = base.by_label()
    if include_graph:
        doc["graph"] = v.graph.to_dict()
    return doc


def coords_from_dict(doc: dict, graph: FatGraph | None = None, lam=None):
    """Parse a coordinate document into a vector.

    The graph comes from ``graph`` or, failing that, from the document's
    embedded ``"graph"`` field.
    """
    if graph is None:
        if "graph" not in doc:
            raise GraphMismatchError("coordinate file has no embedded graph; pass one")
        graph = FatGraph.from_dict(doc["graph"])
    fp = doc.get("graph_fingerprint")
    if fp is not None and fp != graph.fingerprint:
        raise GraphMismatchError(
            f"coordinate file is bound to graph {fp}, not {graph.fingerprint}")
    space = doc.get("space", "teich")
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}")
    values = doc.get("values", {})
    missing = [s for s in graph.labels if s not in values]
    if missing:
        raise ValueError(f"coordinate file lacks edges {missing}")
    extra = [s for s in values if s not in graph.labels]
    if extra:
        raise ValueError(f"coordinate file names unknown edges {extra}")
    rows = [values[s] for s in graph.labels]
    if lam is None:
        lam = doc.get("lambda")
    if space == "teich":
        return ShearVector(graph, [float(r) for r in rows])
    pairs = np.array(rows, dtype=float).reshape(len(rows), 2)
    if space == "cotangent":
        return CotangentVector(graph, pairs[:, 0], pairs[:, 1])
    if lam is None:
        raise ValueError(f"space {space!r} needs a lambda")
    cls = LamVector if space == "lamination" else GenShearVector
    return cls(graph, pairs[:, 0], pairs[:, 1], Lambda.parse(lam))


def lamination_base(doc: dict, graph: FatGraph) -> ShearVector | None:
    """Base point x stored next to lamination coordinates, if any."""
    if "base" not in doc:
        return None
    return ShearVector(graph, [float(doc["base"][s]) for s in graph.labels])


def save_coords(v, path, base: ShearVector | None = None) -> None:
    jsonio.dump(coords_to_dict(v, base=base), path)


def read_coords_document(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_coords(path, graph: FatGraph | None = None, lam=None):
    return coords_from_dict(read_coords_document(path), graph, lam)
