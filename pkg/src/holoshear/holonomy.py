"""Holonomies of edge paths, their frames, and the earthquake/grafting cocycles.

For a closed path a = (α₁, …, α_n) the holonomy is

    ρ(a) = P_n E(z^{α_n}) ⋯ P_1 E(z^{α_1}),

with P_k = L or R according to the turn from α_k to α_{k+1} (indices mod n).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .coords import ConstraintMap, GenShearVector, LamVector, ShearVector
from .errors import ConstraintError, GraphMismatchError, PathError
from .fatgraph import EdgePath, FatGraph, turn
from .ralgebra import Lambda, RNum, extend
from .rmatrix import Mat2, ad, basis, gen_L, gen_R, geodesic_length

__all__ = [
    "Holonomy",
    "holonomy",
    "turn_matrices",
    "prefix_frames",
    "lievec_frames",
    "earthquake_cocycle",
    "grafting_cocycle",
    "compose_loops",
    "edge_matrices",
]


@dataclass(frozen=True)
class Holonomy:
    """Holonomy matrix of a closed path; defined up to sign and conjugation."""

    matrix: Mat2
    path: EdgePath
    lam: Lambda

    def trace(self) -> RNum:
        return self.matrix.trace()

    def length(self) -> float:
        return geodesic_length(self.trace())


def _unpack(v, lam):
    if isinstance(v, ShearVector):
        lam = Lambda.PLUS if lam is None else Lambda.parse(lam)
        return v.graph, RNum(np.array(v.x), np.zeros(len(v.x)), lam)
    if isinstance(v, (GenShearVector, LamVector)):
        if lam is not None and Lambda.parse(lam) != v.lam:
            raise ValueError("explicit lambda disagrees with the vector's")
        return v.graph, v.values
    raise TypeError(f"holonomy needs a ShearVector or GenShearVector, got {type(v).__name__}")


def edge_matrices(v, lam=None) -> list:
    """E(z^α) for every edge α."""
    g, z = _unpack(v, lam)
    half = RNum(0.5 * z.re, 0.5 * z.im, z.lam)
    p = extend("exp", half)
    m = extend("exp", -half)
    out = []
    for i in range(g.num_edges):
        re = np.array([[p.re[i], 0.0], [0.0, m.re[i]]])
        im = np.array([[p.im[i], 0.0], [0.0, m.im[i]]])
        out.append(Mat2(re, im, z.lam))
    return out


def _check(p: EdgePath, g: FatGraph):
    if not p.closed:
        raise PathError("holonomy needs a closed path")
    g.check_path(p)


def turn_matrices(g: FatGraph, p: EdgePath, lam=Lambda.PLUS) -> list:
    """P_1, …, P_n."""
    _check(p, g)
    L, R = gen_L(lam), gen_R(lam)
    return [L if turn(g, p, k) == "L" else R for k in range(len(p))]


def holonomy(p: EdgePath, v, lam=None) -> Holonomy:
    g, z = _unpack(v, lam)
    mats = edge_matrices(v, lam)
    ps = turn_matrices(g, p, z.lam)
    m = Mat2.identity(z.lam)
    for k, h in enumerate(p):
        m = ps[k] @ (mats[g.edge_of[h]] @ m)
    return Holonomy(m, p, z.lam)


def prefix_frames(p: EdgePath, v, lam=None) -> list:
    """A_k = P_n E(z^{α_n}) ⋯ E(z^{α_{k+1}}) P_k for k = 1..n (list index k−1).

    ρ(a) = A_k E(z^{α_k}) P_{k−1} ⋯ P_1 E(z^{α_1}) for every k.
    """
    g, z = _unpack(v, lam)
    mats = edge_matrices(v, lam)
    ps = turn_matrices(g, p, z.lam)
    n = len(p)
    frames = [None] * n
    frames[n - 1] = ps[n - 1]
    for k in range(n - 2, -1, -1):
        frames[k] = frames[k + 1] @ mats[g.edge_of[p[k + 1]]] @ ps[k]
    return frames


def lievec_frames(p: EdgePath, v, lam=None) -> list:
    """J_k = Ad_{A_k} J₁."""
    frames = prefix_frames(p, v, lam)
    j1 = basis(1, frames[0].lam)
    return [ad(a, j1) for a in frames]


def _require_kernel(vecs, strict):
    for vec in vecs:
        cm = ConstraintMap(vec.graph, gauge=None)
        th = cm.theta.astype(float)
        parts = [vec.x] if isinstance(vec, ShearVector) else [vec.re, vec.im]
        worst = max(float(np.max(np.abs(th @ part))) for part in parts)
        if worst > 1e-9:
            msg = f"coordinates violate the face constraints (residual {worst:.3g})"
            if strict:
                raise ConstraintError(msg)
            warnings.warn(msg, stacklevel=3)


def _cocycle(p, x, shifts, lam):
    # Ad_{A_n}E_n ⋯ Ad_{A_1}E_1 telescopes through A_{k+1}⁻¹A_k = E(z^{α_{k+1}})P_k;
    # multiplying those factors avoids cancelling the large conjugates
    g = x.graph
    mats = edge_matrices(x, lam)
    ps = turn_matrices(g, p, lam)
    frames = prefix_frames(p, x, lam)
    n = len(p)
    out = ps[n - 1]
    for k in range(n - 1, 0, -1):
        out = out @ shifts[g.edge_of[p[k]]] @ mats[g.edge_of[p[k]]] @ ps[k - 1]
    return out @ shifts[g.edge_of[p[0]]] @ frames[0].inverse()


def earthquake_cocycle(p: EdgePath, x: ShearVector, x2: ShearVector,
                       strict: bool = False, lam=Lambda.PLUS) -> Mat2:
    """Z(a) = Ad_{A_n(x)} E(x′^{α_n} − x^{α_n}) ⋯ Ad_{A_1(x)} E(x′^{α_1} − x^{α_1}).

    Satisfies Z(a) ρ_x(a) = ρ_{x′}(a).
    """
    if x.graph.fingerprint != x2.graph.fingerprint:
        raise GraphMismatchError("x and x′ live on different graphs")
    _require_kernel([x, x2], strict)
    lam = Lambda.parse(lam)
    d = ShearVector(x.graph, np.array(x2.x) - np.array(x.x))
    return _cocycle(p, x, edge_matrices(d, lam), lam)


def grafting_cocycle(p: EdgePath, x: ShearVector, w: LamVector, strict: bool = False) -> Mat2:
    """Z(a) = Ad_{A_n(x)} E(w^{α_n}) ⋯ Ad_{A_1(x)} E(w^{α_1}) over R_Λ.

    Satisfies Z(a) ρ_x(a) = ρ_{x+w}(a).
    """
    if x.graph.fingerprint != w.graph.fingerprint:
        raise GraphMismatchError("x and w live on different graphs")
    _require_kernel([x, w], strict)
    return _cocycle(p, x, edge_matrices(w), w.lam)


def compose_loops(g: FatGraph, a: EdgePath, b: EdgePath) -> EdgePath:
    """Loop traversing b then a, for loops that start with the same half-edge.

    With this convention ρ(ab) = ρ(a) ρ(b).
    """
    if a[0] != b[0]:
        raise PathError("loops must start with the same directed edge")
    out = EdgePath(b.half_edges + a.half_edges, True)
    g.check_path(out)
    return out
