"""Whitehead moves on all coordinate systems, their Hamiltonian decomposition
and the relation suite.

For a move on α with neighbor frame (β, γ, δ, ε), where β, δ follow the two
half-edges of α in the cyclic order and γ, ε follow β, δ, every system
transforms as

    z^α ↦ −z^α,  z^{β,δ} ↦ z^{β,δ} + log(1+e^{z^α}),  z^{γ,ε} ↦ z^{γ,ε} − log(1+e^{−z^α}).

Coincident neighbors accumulate their increments.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .coords import (
    ConstraintMap,
    CotangentVector,
    GenShearVector,
    LamVector,
    ShearVector,
    sample_in_kernel,
)
from .errors import DomainError, GraphMismatchError, UnsupportedMoveError
from .fatgraph import FatGraph, GraphMove, find_isomorphism, graph_move, transposition
from .poisson import cotangent_bivector, grav_bivector, wp_coefficients
from .ralgebra import Lambda, RNum, extend, li2, li2_complex

__all__ = [
    "SPACE_ALIASES",
    "MoveRecord",
    "canonical_space",
    "cached_move",
    "move_x",
    "move_lam",
    "move_z",
    "move_cotangent",
    "apply_move",
    "transpose",
    "hamiltonian_H",
    "hamiltonian_H_prime",
    "im_H_lambda",
    "im_H_partials",
    "a_matrix",
    "decompose_move",
    "face_correspondence",
    "gauge_orbit_residual",
    "RelationResult",
    "pentagon_check",
    "relation_suite",
]

SPACE_ALIASES = {
    "x": "teich", "teich": "teich",
    "xw": "lamination", "lam": "lamination", "lamination": "lamination",
    "z": "spacetime", "spacetime": "spacetime",
    "xp": "cotangent", "cotangent": "cotangent",
}


def canonical_space(tag: str) -> str:
    try:
        return SPACE_ALIASES[str(tag).lower()]
    except KeyError:
        raise ValueError(f"unknown space {tag!r}; choose from {sorted(SPACE_ALIASES)}") from None


@dataclass(frozen=True)
class MoveRecord:
    alpha: int
    frame: tuple
    pre_fingerprint: str
    post_fingerprint: str
    space: str
    lam: Lambda | None


@lru_cache(maxsize=256)
def cached_move(g: FatGraph, alpha: int) -> GraphMove:
    return graph_move(g, alpha)


def _move(g: FatGraph, alpha) -> GraphMove:
    return cached_move(g, g.edge_index(alpha))


def _index_sets(mv: GraphMove):
    fr = mv.frame
    return fr.alpha, np.array([fr.beta, fr.delta]), np.array([fr.gamma, fr.epsilon])


# below this modulus 1 + e^z is treated as the non-invertible point z = iπ
_BRANCH_TOL = 1e-12


def _log1pexp(z: RNum, edge: str) -> RNum:
    try:
        w = 1.0 + extend("exp", z)
        if z.lam == Lambda.PLUS and np.any(np.hypot(w.re, w.im) < _BRANCH_TOL):
            raise DomainError("1 + e^z is not invertible (z = iπ mod 2πi)", part="argument")
        return extend("log", w)
    except (DomainError, ZeroDivisionError) as exc:
        raise DomainError(f"move on edge {edge!r}: {exc}", part=getattr(exc, "part", "argument")) from exc


def _shift(values: np.ndarray, a, plus, minus, dp, dm, negate=True) -> np.ndarray:
    out = np.array(values, dtype=float)
    if negate:
        out[a] = -out[a]
    np.add.at(out, plus, dp)
    np.add.at(out, minus, -dm)
    return out


def move_x(x: ShearVector, alpha) -> ShearVector:
    mv = _move(x.graph, alpha)
    a, plus, minus = _index_sets(mv)
    xa = x.x[a]
    new = _shift(x.x, a, plus, minus, np.logaddexp(0.0, xa), np.logaddexp(0.0, -xa))
    return ShearVector(mv.post_graph, new)


def move_lam(x: ShearVector, w: LamVector, alpha):
    """Joint move of a base point x and an R_Λ lamination vector w."""
    if x.graph.fingerprint != w.graph.fingerprint:
        raise GraphMismatchError("x and w live on different graphs")
    mv = _move(x.graph, alpha)
    a, plus, minus = _index_sets(mv)
    label = x.graph.labels[a]
    xa = float(x.x[a])
    wa = w.values[a]
    up = _log1pexp(wa + xa, label) - float(np.logaddexp(0.0, xa))
    dn = _log1pexp(-wa - xa, label) - float(np.logaddexp(0.0, -xa))
    re = _shift(w.re, a, plus, minus, up.re, dn.re)
    im = _shift(w.im, a, plus, minus, up.im, dn.im)
    return move_x(x, alpha), LamVector(mv.post_graph, re, im, w.lam)


def move_z(z: GenShearVector, alpha) -> GenShearVector:
    mv = _move(z.graph, alpha)
    a, plus, minus = _index_sets(mv)
    label = z.graph.labels[a]
    za = z.values[a]
    up = _log1pexp(za, label)
    dn = _log1pexp(-za, label)
    re = _shift(z.re, a, plus, minus, up.re, dn.re)
    im = _shift(z.im, a, plus, minus, up.im, dn.im)
    return GenShearVector(mv.post_graph, re, im, z.lam)


def move_cotangent(cv: CotangentVector, alpha, lam=Lambda.PLUS) -> CotangentVector:
    """Move on (x, p): x via Re_ℓ of the z-move at z^α = x^α + ℓ(π p)_α;
    p_α ↦ −p_α + p_γ + p_ε + Im_ℓ log(1+e^{z^α}); other p fixed."""
    lam = Lambda.parse(lam)
    g = cv.graph
    mv = _move(g, alpha)
    a, plus, minus = _index_sets(mv)
    ya = float(wp_coefficients(g)[a] @ cv.p)
    za = RNum(float(cv.x[a]), ya, lam)
    label = g.labels[a]
    up = _log1pexp(za, label)
    dn = _log1pexp(-za, label)
    x = _shift(cv.x, a, plus, minus, up.re, dn.re)
    p = np.array(cv.p, dtype=float)
    p[a] = -p[a] + float(np.sum(cv.p[minus])) + float(up.im)
    return CotangentVector(mv.post_graph, x, p)


def apply_move(v, alpha, lam=None, w: LamVector | None = None):
    """Dispatch on the vector type; returns (moved, MoveRecord).

    For laminations pass the base point as ``v`` and the lamination as ``w``;
    the moved value is then the pair (x′, w′).
    """
    g = v.graph
    mv = _move(g, alpha)
    fr = mv.frame
    frame = (fr.beta, fr.gamma, fr.delta, fr.epsilon)
    if w is not None:
        out = move_lam(v, w, alpha)
        space, lam_out = "lamination", w.lam
    elif isinstance(v, ShearVector):
        out, space, lam_out = move_x(v, alpha), "teich", None
    elif isinstance(v, GenShearVector):
        out, space, lam_out = move_z(v, alpha), "spacetime", v.lam
    elif isinstance(v, CotangentVector):
        lam_out = Lambda.parse(Lambda.PLUS if lam is None else lam)
        out, space = move_cotangent(v, alpha, lam_out), "cotangent"
    else:
        raise TypeError(f"cannot move a {type(v).__name__}")
    rec = MoveRecord(fr.alpha, frame, g.fingerprint, mv.post_graph.fingerprint, space, lam_out)
    return out, rec


def _rebind(v, g: FatGraph):
    if isinstance(v, ShearVector):
        return ShearVector(g, v.x)
    if isinstance(v, (LamVector, GenShearVector)):
        return type(v)(g, v.re, v.im, v.lam)
    if isinstance(v, CotangentVector):
        return CotangentVector(g, v.x, v.p)
    if isinstance(v, tuple):
        return tuple(_rebind(u, g) for u in v)
    raise TypeError(f"cannot rebind a {type(v).__name__}")


def transpose(v, a, b):
    """Apply the transposition (a b): same values, edge labels a and b swapped."""
    g = v[0].graph if isinstance(v, tuple) else v.graph
    return _rebind(v, transposition(g, a, b))


# ---------------------------------------------------------------------------
# Hamiltonians


def hamiltonian_H(x):
    """H(x) = x²/4 + Li₂(−eˣ)."""
    x = np.asarray(x, dtype=float)
    out = x * x / 4 + li2(-np.exp(x))
    return float(out) if out.ndim == 0 else out


def hamiltonian_H_prime(x):
    x = np.asarray(x, dtype=float)
    out = x / 2 - np.logaddexp(0.0, x)
    return float(out) if out.ndim == 0 else out


def im_H_lambda(z: RNum):
    """Im_ℓ of the R_Λ extension of H."""
    x = np.asarray(z.re, dtype=float)
    y = np.asarray(z.im, dtype=float)
    base = 0.5 * x * y
    if z.lam == Lambda.ZERO:
        out = base - y * np.logaddexp(0.0, x)
    elif z.lam == Lambda.MINUS:
        out = base + 0.5 * li2(-np.exp(x + y)) - 0.5 * li2(-np.exp(x - y))
    else:
        out = base + np.imag(li2_complex(-np.exp(x + 1j * y)))
    return float(out) if np.ndim(out) == 0 else out


def im_H_partials(z: RNum):
    """(∂/∂x, ∂/∂y) of Im_ℓ H^Λ: (Im_ℓ, Re_ℓ) of z/2 − log(1+e^z)."""
    h = RNum(0.5 * np.asarray(z.re), 0.5 * np.asarray(z.im), z.lam) - extend("log", 1.0 + extend("exp", z))
    return h.im, h.re


# ---------------------------------------------------------------------------
# A∘B decomposition


def a_matrix(g: FatGraph, alpha) -> np.ndarray:
    """Twice the linear map A_α on ℝ^E, as an integer matrix."""
    mv = _move(g, alpha)
    a, plus, minus = _index_sets(mv)
    n = g.num_edges
    m = 2 * np.eye(n, dtype=np.int64)
    m[a, a] = -2
    for k in np.concatenate([plus, minus]):
        m[k, a] += 1
    return m


def _a_full(g: FatGraph, alpha, space: str) -> np.ndarray:
    """Twice the Jacobian of A on the flat coordinates of ``space``."""
    a2 = a_matrix(g, alpha)
    if space == "teich":
        return a2
    n = g.num_edges
    full = np.zeros((2 * n, 2 * n), dtype=np.int64)
    full[:n, :n] = a2
    # (x, y) and (x, w) transform alike; on p the map is the cotangent lift Aᵀ = A⁻¹ᵀ
    full[n:, n:] = a2.T if space == "cotangent" else a2
    return full


def _flat(v):
    if isinstance(v, ShearVector):
        return v.x.copy()
    if isinstance(v, (LamVector, GenShearVector)):
        return np.concatenate([v.re, v.im])
    return np.concatenate([v.x, v.p])


def _unflat(flat, like, g):
    n = g.num_edges
    if isinstance(like, ShearVector):
        return ShearVector(g, flat)
    if isinstance(like, (LamVector, GenShearVector)):
        return type(like)(g, flat[:n], flat[n:], like.lam)
    return CotangentVector(g, flat[:n], flat[n:])


def decompose_move(g: FatGraph, alpha, space: str = "teich", lam=Lambda.PLUS):
    """Return (A, B) with W_α = A ∘ B.

    A is the Λ-independent linear map onto the post-move graph.  B is the
    time-one Hamiltonian flow on the pre-move graph, computed as identity
    plus Π·dG for the module bivector Π and generator

      teich:      G = H(x^α)                          under π_WP,
      spacetime:  G = 2·Im_ℓ H^Λ(z^α)                 under π_Λ,
      cotangent:  G = −Im_ℓ H^Λ(x^α + ℓ(π p)_α)       under π_{T*}.

    The factors follow from {x, y}_Λ = ½π and J π_{T*} Jᵀ = −2π_Λ for the
    Jacobian J of π♯.  The flow is linear because G depends only on
    coordinates that Π·dG does not move.
    """
    space = canonical_space(space)
    if space == "lamination":
        raise ValueError("decompose the lamination move through z = x + w (space 'spacetime')")
    lam = Lambda.parse(lam)
    mv = _move(g, alpha)
    a = mv.frame.alpha
    n = g.num_edges
    half_a = _a_full(g, alpha, space) / 2.0
    pi = wp_coefficients(g)
    if space == "teich":
        bivec = pi.astype(float)
    elif space == "spacetime":
        bivec = grav_bivector(g).matrix
    else:
        bivec = cotangent_bivector(g).matrix.astype(float)

    def gradient(flat):
        d = np.zeros_like(flat)
        if space == "teich":
            d[a] = hamiltonian_H_prime(flat[a])
        elif space == "spacetime":
            gx, gy = im_H_partials(RNum(flat[a], flat[n + a], lam))
            d[a], d[n + a] = 2 * gx, 2 * gy
        else:
            ya = float(pi[a] @ flat[n:])
            gx, gy = im_H_partials(RNum(flat[a], ya, lam))
            d[a] = -gx
            d[n:] = -gy * pi[a]
        return d

    def b_map(v):
        if v.graph.fingerprint != g.fingerprint:
            raise GraphMismatchError("B acts on the pre-move graph")
        flat = _flat(v)
        return _unflat(flat + bivec @ gradient(flat), v, g)

    def a_map(v):
        if v.graph.fingerprint != g.fingerprint:
            raise GraphMismatchError("A acts on the pre-move graph")
        return _unflat(half_a @ _flat(v), v, mv.post_graph)

    a_map.matrix = half_a
    b_map.bivector = bivec
    return a_map, b_map


# ---------------------------------------------------------------------------
# faces across a move


def face_correspondence(mv: GraphMove) -> list:
    """Index in the post-move face list of the image of every pre-move face."""
    from .fatgraph import transport_path

    post_faces = mv.post_graph.faces()
    keys = {}
    for j, f in enumerate(post_faces):
        b = tuple(f.boundary)
        for r in range(len(b)):
            keys[b[r:] + b[:r]] = j
    out = []
    for i in range(mv.pre_graph.num_faces):
        q = transport_path(mv.pre_graph.face_path(i), mv)
        key = tuple(q.half_edges)
        if key not in keys:
            raise UnsupportedMoveError(f"face {i} has no image after the move")
        out.append(keys[key])
    return out


def gauge_orbit_residual(cv: CotangentVector, alpha, q: float, face: int, lam=Lambda.PLUS) -> float:
    """|W̃(x, p + q dc^i) − W̃(x, p) − q dc′^{i′}|∞ for face i and its image i′."""
    g = cv.graph
    mv = _move(g, alpha)
    j = face_correspondence(mv)[face]
    th = g.theta()[face]
    th2 = mv.post_graph.theta()[j]
    shifted = CotangentVector(g, cv.x, cv.p + q * th)
    lhs = move_cotangent(shifted, alpha, lam)
    rhs = move_cotangent(cv, alpha, lam)
    return float(max(np.max(np.abs(lhs.x - rhs.x)), np.max(np.abs(lhs.p - rhs.p - q * th2))))


# ---------------------------------------------------------------------------
# relation suite


@dataclass
class RelationResult:
    relation: str
    max_residual: float | None
    samples: int
    edges: tuple = ()
    notice: str | None = None
    exp_residual: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.max_residual is None

    def to_dict(self) -> dict:
        d = {
            "relation": self.relation,
            "max_residual": self.max_residual,
            "samples": self.samples,
            "edges": list(self.edges),
            "skipped": self.skipped,
        }
        if self.notice:
            d["notice"] = self.notice
        if self.exp_residual is not None:
            d["exp_residual"] = self.exp_residual
        return d


def _sample(g, space, lam, rng):
    cm = ConstraintMap(g)
    if space == "lamination":
        x = sample_in_kernel(cm, rng, "teich")
        w = sample_in_kernel(cm, rng, "lamination", lam)
        return (x, w)
    return sample_in_kernel(cm, rng, space, lam)


def _mv(v, alpha, space, lam):
    if space == "teich":
        return move_x(v, alpha)
    if space == "lamination":
        return move_lam(v[0], v[1], alpha)
    if space == "spacetime":
        return move_z(v, alpha)
    return move_cotangent(v, alpha, lam)


def _graph(v):
    return v[0].graph if isinstance(v, tuple) else v.graph


def _residual(u, v, exp_level=False) -> float:
    """Max label-wise difference of two coordinate vectors."""
    if isinstance(u, tuple):
        return max(_residual(a, b, exp_level) for a, b in zip(u, v))
    gu, gv = u.graph, v.graph
    idx = [gv.edge_index(lab) for lab in gu.labels]
    fu, fv = _flat(u), _flat(v)
    n = gu.num_edges
    perm = np.array(idx + ([n + i for i in idx] if fu.size > n else []))
    fv = fv[perm]
    if exp_level and isinstance(u, GenShearVector):
        eu = extend("exp", u.values)
        ev = extend("exp", RNum(fv[:n], fv[n:], u.lam))
        return float(max(np.max(np.abs(eu.re - ev.re)), np.max(np.abs(eu.im - ev.im))))
    return float(np.max(np.abs(fu - fv)))


def _same_graph(g: FatGraph, h: FatGraph) -> bool:
    return find_isomorphism(g, h, labels=True) is not None


def _edge_pairs(g: FatGraph):
    adjacent, disjoint = [], []
    for i in range(g.num_edges):
        for j in range(i + 1, g.num_edges):
            if g.is_loop(i) or g.is_loop(j):
                continue
            k = g.shares_vertex(i, j)
            if k == 1:
                adjacent.append((i, j))
            elif k == 0:
                disjoint.append((i, j))
    return adjacent, disjoint


def _movable(g):
    return [i for i in range(g.num_edges) if not g.is_loop(i)]


def _one_sample(g, space, lam, seed_seq, pairs):
    rng = np.random.default_rng(seed_seq)
    v = _sample(g, space, lam, rng)
    adjacent, disjoint = pairs
    out = {}
    edges = _movable(g)

    a = edges[int(rng.integers(len(edges)))]
    w1 = _mv(v, a, space, lam)
    w2 = _mv(w1, a, space, lam)
    if not _same_graph(_graph(w2), g):
        raise AssertionError("W_α² did not return the original fat graph")
    out["involutivity"] = (_residual(v, w2), None)

    other = [e for e in range(g.num_edges) if e != a]
    b = other[int(rng.integers(len(other)))]
    # σ∘W_α against W_{σ(α)}∘σ; σ(α) is addressed by label on the relabelled graph
    sa = transpose(v, a, b)
    lhs = transpose(_mv(v, a, space, lam), a, b)
    rhs = _mv(sa, g.labels[b], space, lam)
    out["naturality"] = (_residual(lhs, rhs), None)

    if disjoint:
        i, j = disjoint[int(rng.integers(len(disjoint)))]
        ab = _mv(_mv(v, j, space, lam), i, space, lam)
        ba = _mv(_mv(v, i, space, lam), j, space, lam)
        out["commutativity"] = (_residual(ab, ba), None)

    if adjacent:
        i, j = adjacent[int(rng.integers(len(adjacent)))]
        out["pentagon"] = pentagon_check(v, i, j, space, lam)
    return out


def pentagon_check(v, alpha, beta, space: str | None = None, lam=Lambda.PLUS):
    """Residuals of W_α W_β W_α W_β W_α = (α β) at ``v``.

    Returns (coordinate residual, exponential residual); the second is only
    computed for Λ = 1 spacetime vectors, where it is the branch-free test.
    """
    g = _graph(v)
    if space is None:
        space = _space_of(v)
    space = canonical_space(space)
    lam = Lambda.parse(lam)
    if g.shares_vertex(alpha, beta) != 1:
        raise UnsupportedMoveError("pentagon needs two edges sharing exactly one vertex")
    u = v
    for e in (alpha, beta, alpha, beta, alpha):
        u = _mv(u, e, space, lam)
    target = transpose(v, alpha, beta)
    if not _same_graph(_graph(u), _graph(target)):
        raise AssertionError("pentagon did not return the transposed fat graph")
    exp_res = None
    if space == "spacetime" and v.lam == Lambda.PLUS:
        exp_res = _residual(u, target, exp_level=True)
    return _residual(u, target), exp_res


def _space_of(v) -> str:
    if isinstance(v, tuple):
        return "lamination"
    if isinstance(v, ShearVector):
        return "teich"
    if isinstance(v, GenShearVector):
        return "spacetime"
    if isinstance(v, CotangentVector):
        return "cotangent"
    raise TypeError(f"not a coordinate vector: {type(v).__name__}")


def _threads(default: int = 4) -> int:
    env = os.environ.get("HOLOSHEAR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(default, os.cpu_count() or 1))


def relation_suite(g: FatGraph, space: str = "teich", lam=Lambda.PLUS, seed: int = 0,
                   samples: int = 100, threads: int | None = None) -> dict:
    """Involutivity, naturality, commutativity and pentagon on seeded samples.

    Returns {relation: RelationResult}.  Results depend only on ``seed`` and
    ``samples``: every sample draws from its own spawned seed and residuals
    are combined in sample order.
    """
    space = canonical_space(space)
    lam = Lambda.parse(lam)
    if not _movable(g):
        raise UnsupportedMoveError("every edge of this graph is a loop")
    pairs = _edge_pairs(g)
    seeds = np.random.SeedSequence(seed).spawn(samples)
    workers = threads if threads is not None else _threads()
    if workers > 1 and samples > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _one_sample(g, space, lam, s, pairs), seeds))
    else:
        rows = [_one_sample(g, space, lam, s, pairs) for s in seeds]

    report = {}
    for name in ("involutivity", "naturality", "commutativity", "pentagon"):
        vals = [r[name] for r in rows if name in r]
        if not vals:
            need = "two edges without a common vertex" if name == "commutativity" \
                else "two edges sharing exactly one vertex"
            report[name] = RelationResult(name, None, 0, notice=f"skipped: graph has no {need}")
            continue
        res = max(v[0] for v in vals)
        exps = [v[1] for v in vals if v[1] is not None]
        report[name] = RelationResult(name, res, len(vals),
                                      exp_residual=max(exps) if exps else None)
    return report
