"""Trivalent fat graphs: faces, turns, Whitehead moves and path transport.

Half-edges are integers ``0 .. N-1``.  ``sigma`` pairs them into edges (the
first half-edge of each stored pair is the edge's source) and ``nu`` sends a
half-edge to its counterclockwise successor at the same vertex.  A directed
edge is named by its outgoing half-edge.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphError, PathError, UnsupportedMoveError

__all__ = [
    "FatGraph",
    "Face",
    "EdgePath",
    "NeighborFrame",
    "GraphMove",
    "SHIPPED_GRAPHS",
    "shipped_graph",
    "load_graph",
    "whitehead",
    "graph_move",
    "transport_path",
    "turn",
    "find_isomorphism",
    "relabel",
    "transposition",
    "random_closed_path",
]

SHIPPED_GRAPHS = (
    "punctured_torus",
    "thrice_punctured_sphere",
    "four_punctured_sphere",
    "genus2_one_puncture",
)


@dataclass(frozen=True)
class Face:
    """Face of the ribbon graph: an all-left closed path."""

    boundary: tuple
    multiplicities: np.ndarray = field(compare=False, repr=False)

    def __len__(self):
        return len(self.boundary)


@dataclass(frozen=True)
class EdgePath:
    """Sequence of directed edges, each given by its outgoing half-edge."""

    half_edges: tuple
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "half_edges", tuple(int(h) for h in self.half_edges))
        if not self.half_edges:
            raise PathError("empty path")

    def __len__(self):
        return len(self.half_edges)

    def __iter__(self):
        return iter(self.half_edges)

    def __getitem__(self, k):
        return self.half_edges[k]

    def rotated(self, k: int) -> "EdgePath":
        if not self.closed:
            raise PathError("only closed paths can be rotated")
        k %= len(self.half_edges)
        return EdgePath(self.half_edges[k:] + self.half_edges[:k], True)

    def reversed(self, g: "FatGraph") -> "EdgePath":
        return EdgePath(tuple(g.sigma[h] for h in reversed(self.half_edges)), self.closed)

    def edges(self, g: "FatGraph") -> list:
        return [g.edge_of[h] for h in self.half_edges]

    def labels(self, g: "FatGraph") -> list:
        """Signed label tokens: ``"a"`` along the stored direction, ``"-a"`` against."""
        out = []
        for h in self.half_edges:
            e = g.edge_of[h]
            out.append(g.labels[e] if g.edges[e][0] == h else "-" + g.labels[e])
        return out


@dataclass(frozen=True)
class NeighborFrame:
    """Local data of a Whitehead move on edge ``alpha``.

    ``a0``/``a1`` are the source/target half-edges of α; ``b, c`` follow
    ``a0`` counterclockwise at the source and ``d, e`` follow ``a1`` at the
    target.  β, γ, δ, ε are the edges carrying b, c, d, e.
    """

    alpha: int
    beta: int
    gamma: int
    delta: int
    epsilon: int
    a0: int
    a1: int
    b: int
    c: int
    d: int
    e: int

    @property
    def neighbors(self) -> tuple:
        return (self.beta, self.gamma, self.delta, self.epsilon)


@dataclass(frozen=True)
class GraphMove:
    """A Whitehead move together with the graphs before and after it."""

    pre_graph: "FatGraph"
    post_graph: "FatGraph"
    frame: NeighborFrame

    @property
    def alpha(self) -> int:
        return self.frame.alpha


class FatGraph:
    """Connected trivalent ribbon graph.

    Parameters
    ----------
    edges:
        One ``(source, target)`` pair of half-edges per edge, in edge order.
    nu:
        Either the full permutation (length N) or its 3-cycles, each listed
        counterclockwise.
    labels:
        One identifier per edge; stored as strings.
    """

    __slots__ = ("edges", "sigma", "nu", "nu_inv", "edge_of", "labels",
                 "vertex_of", "vertices", "_faces", "_fingerprint", "_label_index")

    def __init__(self, edges: Sequence, nu: Sequence, labels: Sequence | None = None):
        pairs = [tuple(int(h) for h in pair) for pair in edges]
        if any(len(p) != 2 for p in pairs):
            raise GraphError("sigma must be a list of pairs")
        n = 2 * len(pairs)
        flat = [h for p in pairs for h in p]
        if sorted(flat) != list(range(n)):
            bad = sorted(set(range(n)).symmetric_difference(flat)) or \
                sorted(h for h in set(flat) if flat.count(h) > 1)
            raise GraphError(
                f"sigma is not a fixed-point-free involution on 0..{n - 1}: "
                f"problem half-edges {bad}")
        sigma = [0] * n
        for h0, h1 in pairs:
            sigma[h0], sigma[h1] = h1, h0
        nu = list(nu)
        if nu and isinstance(nu[0], (list, tuple)):
            perm = [-1] * n
            for i, cyc in enumerate(nu):
                cyc = [int(h) for h in cyc]
                if len(cyc) != 3:
                    raise GraphError(f"vertex {i} has valence {len(cyc)}, expected 3")
                for j, h in enumerate(cyc):
                    if not 0 <= h < n or perm[h] != -1:
                        raise GraphError(f"half-edge {h} repeated or out of range in nu")
                    perm[h] = cyc[(j + 1) % 3]
            if -1 in perm:
                raise GraphError(f"half-edge {perm.index(-1)} belongs to no vertex")
            nu = perm
        else:
            nu = [int(h) for h in nu]
            if sorted(nu) != list(range(n)):
                raise GraphError("nu is not a permutation of the half-edges")
        nu_inv = [0] * n
        for h, k in enumerate(nu):
            nu_inv[k] = h
        vertex_of = [-1] * n
        vertices = []
        for h in range(n):
            if vertex_of[h] == -1:
                cyc = [h, nu[h], nu[nu[h]]]
                if nu[cyc[2]] != h or len(set(cyc)) != 3:
                    raise GraphError(f"vertex through half-edge {h} is not trivalent")
                for k in cyc:
                    vertex_of[k] = len(vertices)
                vertices.append(tuple(cyc))
        if labels is None:
            labels = [str(i) for i in range(len(pairs))]
        labels = [str(s) for s in labels]
        if len(labels) != len(pairs):
            raise GraphError(f"{len(labels)} labels for {len(pairs)} edges")
        if len(set(labels)) != len(labels):
            raise GraphError("edge labels are not unique")
        edge_of = [0] * n
        for i, (h0, h1) in enumerate(pairs):
            edge_of[h0] = edge_of[h1] = i
        self.edges = tuple(pairs)
        self.sigma = tuple(sigma)
        self.nu = tuple(nu)
        self.nu_inv = tuple(nu_inv)
        self.edge_of = tuple(edge_of)
        self.labels = tuple(labels)
        self.vertex_of = tuple(vertex_of)
        self.vertices = tuple(vertices)
        self._faces = None
        self._fingerprint = None
        self._label_index = {s: i for i, s in enumerate(labels)}
        self._check_connected()
        self._check_euler()

    # -- validation ---------------------------------------------------------
    def _check_connected(self):
        n = self.num_half_edges
        seen = {0}
        stack = [0]
        while stack:
            h = stack.pop()
            for k in (self.sigma[h], self.nu[h]):
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        if len(seen) != n:
            raise GraphError(f"graph is disconnected ({n - len(seen)} unreachable half-edges)")

    def _check_euler(self):
        v, e, f = self.num_vertices, self.num_edges, len(self.faces())
        two_g = 2 - v + e - f
        if two_g % 2 or two_g < 0:
            raise GraphError(f"Euler characteristic V−E+F = {v - e + f} is inconsistent")
        g, s = two_g // 2, f
        if s < 1 or 2 * g - 2 + s <= 0:
            raise GraphError(f"(g, s) = ({g}, {s}) is not hyperbolic")
        if e != 6 * g - 6 + 3 * s or v != 4 * g - 4 + 2 * s:
            raise GraphError("edge/vertex counts do not match a triangulation")

    # -- counts -------------------------------------------------------------
    @property
    def num_half_edges(self) -> int:
        return len(self.sigma)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_faces(self) -> int:
        return len(self.faces())

    @property
    def genus(self) -> int:
        return (2 - self.num_vertices + self.num_edges - self.num_faces) // 2

    @property
    def punctures(self) -> int:
        return self.num_faces

    # -- lookup -------------------------------------------------------------
    def edge_index(self, edge) -> int:
        """Edge index from a label (str) or an index (int)."""
        if isinstance(edge, (int, np.integer)) and not isinstance(edge, bool):
            if not 0 <= edge < self.num_edges:
                raise KeyError(f"edge index {edge} out of range")
            return int(edge)
        try:
            return self._label_index[str(edge)]
        except KeyError:
            raise KeyError(f"no edge labelled {edge!r}") from None

    def is_loop(self, edge) -> bool:
        h0, h1 = self.edges[self.edge_index(edge)]
        return self.vertex_of[h0] == self.vertex_of[h1]

    def shares_vertex(self, e1, e2) -> int:
        """Number of vertices common to two edges."""
        v1 = {self.vertex_of[h] for h in self.edges[self.edge_index(e1)]}
        v2 = {self.vertex_of[h] for h in self.edges[self.edge_index(e2)]}
        return len(v1 & v2)

    # -- faces --------------------------------------------------------------
    def face_step(self, h: int) -> int:
        """Next half-edge along the face to the left of ``h``."""
        return self.nu[self.sigma[h]]

    def faces(self) -> list:
        if self._faces is None:
            n = self.num_half_edges
            seen = [False] * n
            faces = []
            for h in range(n):
                if seen[h]:
                    continue
                cyc = []
                k = h
                while not seen[k]:
                    seen[k] = True
                    cyc.append(k)
                    k = self.face_step(k)
                mult = np.zeros(self.num_edges, dtype=np.int64)
                for k in cyc:
                    mult[self.edge_of[k]] += 1
                mult.setflags(write=False)
                faces.append(Face(tuple(cyc), mult))
            self._faces = faces
        return list(self._faces)

    def theta(self) -> np.ndarray:
        """Face–edge multiplicity matrix θ (F × E)."""
        return np.array([f.multiplicities for f in self.faces()], dtype=np.int64)

    # -- paths --------------------------------------------------------------
    def local_sign(self, incoming: int, outgoing: int) -> int:
        """+1 if ``outgoing`` follows ``incoming`` counterclockwise, −1 if it precedes, else 0."""
        if self.nu[incoming] == outgoing:
            return 1
        if self.nu_inv[incoming] == outgoing:
            return -1
        return 0

    def check_path(self, p: EdgePath) -> None:
        hs = p.half_edges
        n = self.num_half_edges
        for h in hs:
            if not 0 <= h < n:
                raise PathError(f"half-edge {h} out of range")
        steps = len(hs) if p.closed else len(hs) - 1
        for k in range(steps):
            h, nxt = hs[k], hs[(k + 1) % len(hs)]
            inc = self.sigma[h]
            if nxt == inc:
                raise PathError(f"path backtracks at step {k}")
            if self.vertex_of[inc] != self.vertex_of[nxt]:
                raise PathError(f"steps {k} and {k + 1} are not incident")

    def path(self, tokens: Iterable, closed: bool = True) -> EdgePath:
        """Build a path from label tokens.

        ``"a"``/``"+a"`` traverse edge a from its source, ``"-a"`` from its
        target.  Bare labels are oriented by continuity; when several
        orientations fit, the one reading earliest tokens forward wins.
        """
        toks = [str(t).strip() for t in tokens if str(t).strip()]
        if not toks:
            raise PathError("empty path")
        options = []
        for t in toks:
            sign = None
            if t[0] in "+-" and t not in self._label_index:
                sign, t = t[0], t[1:]
            e = self.edge_index(t)
            h0, h1 = self.edges[e]
            options.append([h0] if sign == "+" else [h1] if sign == "-" else [h0, h1])
        n = len(options)

        def ok(prev, nxt):
            inc = self.sigma[prev]
            return nxt != inc and self.vertex_of[inc] == self.vertex_of[nxt]

        found = []

        def search(k, chosen):
            if found:
                return
            if k == n:
                if not closed or ok(chosen[-1], chosen[0]):
                    found.append(list(chosen))
                return
            for h in options[k]:
                if k == 0 or ok(chosen[-1], h):
                    chosen.append(h)
                    search(k + 1, chosen)
                    chosen.pop()

        search(0, [])
        if not found:
            raise PathError(f"tokens {toks} do not form a {'closed ' if closed else ''}reduced path")
        return EdgePath(tuple(found[0]), closed)

    def face_path(self, i: int) -> EdgePath:
        return EdgePath(self.faces()[i].boundary, True)

    # -- identity -----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "half_edges": self.num_half_edges,
            "sigma": [list(p) for p in self.edges],
            "nu": [list(v) for v in self.vertices],
            "edge_labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FatGraph":
        try:
            n = int(data["half_edges"])
            sigma = data["sigma"]
            nu = data["nu"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"graph document lacks field: {exc}") from None
        if 2 * len(sigma) != n:
            raise GraphError(f"half_edges = {n} but sigma has {len(sigma)} pairs")
        return cls(sigma, nu, data.get("edge_labels"))

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            doc = json.dumps([self.edges, self.nu, self.labels], separators=(",", ":"))
            self._fingerprint = hashlib.sha256(doc.encode()).hexdigest()[:16]
        return self._fingerprint

    def __eq__(self, other):
        if not isinstance(other, FatGraph):
            return NotImplemented
        return (self.edges, self.nu, self.labels) == (other.edges, other.nu, other.labels)

    def __hash__(self):
        return hash(self.fingerprint)

    def __repr__(self):
        return (f"FatGraph(V={self.num_vertices}, E={self.num_edges}, "
                f"F={self.num_faces}, g={self.genus}, labels={list(self.labels)})")


def load_graph(path) -> FatGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: not valid JSON ({exc})") from None
    return FatGraph.from_dict(data)


def shipped_graph(name: str) -> FatGraph:
    """One of :data:`SHIPPED_GRAPHS`."""
    if name not in SHIPPED_GRAPHS:
        raise KeyError(f"unknown graph {name!r}; shipped: {', '.join(SHIPPED_GRAPHS)}")
    text = resources.files("holoshear.graphs").joinpath(f"{name}.json").read_text()
    return FatGraph.from_dict(json.loads(text))


def turn(g: FatGraph, p: EdgePath, k: int) -> str:
    """'L' or 'R' for the passage from step k to step k+1."""
    n = len(p)
    if not p.closed and not 0 <= k < n - 1:
        raise PathError(f"no turn after the last step of an open path (k={k})")
    h, nxt = p[k % n], p[(k + 1) % n]
    inc = g.sigma[h]
    if nxt == inc:
        raise PathError(f"path backtracks at step {k}")
    s = g.local_sign(inc, nxt)
    if s == 0:
        raise PathError(f"steps {k} and {k + 1} are not incident")
    return "L" if s > 0 else "R"


# ---------------------------------------------------------------------------
# Whitehead moves


def _frame(g: FatGraph, alpha: int) -> NeighborFrame:
    a0, a1 = g.edges[alpha]
    if g.vertex_of[a0] == g.vertex_of[a1]:
        raise UnsupportedMoveError(f"edge {g.labels[alpha]!r} is a loop")
    b = g.nu[a0]
    c = g.nu[b]
    d = g.nu[a1]
    e = g.nu[d]
    eo = g.edge_of
    return NeighborFrame(alpha, eo[b], eo[c], eo[d], eo[e], a0, a1, b, c, d, e)


def graph_move(g: FatGraph, alpha) -> GraphMove:
    alpha = g.edge_index(alpha)
    fr = _frame(g, alpha)
    nu = list(g.nu)
    # collapse α and re-expand it the other way: (a0 c d), (a1 e b)
    nu[fr.a0], nu[fr.c], nu[fr.d] = fr.c, fr.d, fr.a0
    nu[fr.a1], nu[fr.e], nu[fr.b] = fr.e, fr.b, fr.a1
    return GraphMove(g, FatGraph(g.edges, nu, g.labels), fr)


def whitehead(g: FatGraph, alpha):
    """Whitehead move on a non-loop edge; returns (new graph, neighbor frame)."""
    mv = graph_move(g, alpha)
    return mv.post_graph, mv.frame


def transport_path(p: EdgePath, move) -> EdgePath:
    """Rewrite a closed reduced path across a Whitehead move.

    ``move`` is a :class:`GraphMove` (or anything with ``pre_graph`` and
    ``frame``).  Traversals of α are dropped, then α is reinserted wherever
    the path passes between the two new vertices.
    """
    g = move.pre_graph
    fr = move.frame
    if not p.closed:
        raise PathError("transport needs a closed path")
    g.check_path(p)
    hs = list(p.half_edges)
    on_alpha = {fr.a0, fr.a1}
    rest = [k for k, h in enumerate(hs) if h not in on_alpha]
    if not rest:
        raise PathError("path runs only along the moved edge")
    hs = hs[rest[0]:] + hs[:rest[0]]
    q = [h for h in hs if h not in on_alpha]
    at_source = {fr.c, fr.d}
    at_target = {fr.e, fr.b}
    out = []
    for k, h in enumerate(q):
        out.append(h)
        inc = g.sigma[h]
        nxt = q[(k + 1) % len(q)]
        if inc in at_source and nxt in at_target:
            out.append(fr.a0)
        elif inc in at_target and nxt in at_source:
            out.append(fr.a1)
    return EdgePath(tuple(out), True)


# ---------------------------------------------------------------------------
# isomorphism and relabelling


def find_isomorphism(g: FatGraph, h: FatGraph, labels: bool = True):
    """Half-edge bijection φ with φσ = σ'φ and φν = ν'φ, or None.

    With ``labels`` the map must also carry every edge to the edge of the
    same label.  A connected graph is determined by the image of one
    half-edge, so at most 2E candidates are propagated.
    """
    if (g.num_half_edges, g.num_vertices, g.num_faces) != (h.num_half_edges, h.num_vertices, h.num_faces):
        return None
    start = g.edges[0][0]
    if labels:
        if set(g.labels) != set(h.labels):
            return None
        cands = h.edges[h.edge_index(g.labels[0])]
    else:
        cands = range(h.num_half_edges)
    for cand in cands:
        phi = {start: cand}
        stack = [start]
        ok = True
        while stack and ok:
            x = stack.pop()
            y = phi[x]
            for gx, hy in ((g.sigma[x], h.sigma[y]), (g.nu[x], h.nu[y])):
                if gx in phi:
                    if phi[gx] != hy:
                        ok = False
                        break
                else:
                    phi[gx] = hy
                    stack.append(gx)
        if not ok or len(set(phi.values())) != g.num_half_edges:
            continue
        if labels and any(g.labels[g.edge_of[x]] != h.labels[h.edge_of[y]] for x, y in phi.items()):
            continue
        return [phi[x] for x in range(g.num_half_edges)]
    return None


def relabel(g: FatGraph, mapping: dict) -> FatGraph:
    """Rename edges; labels absent from ``mapping`` are kept."""
    new = [str(mapping.get(s, s)) for s in g.labels]
    return FatGraph(g.edges, g.nu, new)


def transposition(g: FatGraph, a, b) -> FatGraph:
    """Swap the labels of two edges."""
    la, lb = g.labels[g.edge_index(a)], g.labels[g.edge_index(b)]
    return relabel(g, {la: lb, lb: la})


def random_closed_path(g: FatGraph, rng, min_length: int = 2, max_length: int = 40,
                       start: int | None = None) -> EdgePath:
    """Random cyclically reduced closed walk, optionally starting at ``start``."""
    for _ in range(1000):
        h0 = int(rng.integers(g.num_half_edges)) if start is None else int(start)
        walk = [h0]
        while len(walk) < max_length:
            inc = g.sigma[walk[-1]]
            if len(walk) >= min_length and g.vertex_of[inc] == g.vertex_of[h0] and inc != h0:
                if rng.random() < 0.5:
                    return EdgePath(tuple(walk), True)
            walk.append(g.nu[inc] if rng.random() < 0.5 else g.nu_inv[inc])
    raise PathError("could not close a random walk")
