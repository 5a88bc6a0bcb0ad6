"""Poisson bivectors on edge coordinates, Dirac reduction and the Goldman bracket.

Flat coordinate conventions: Teichmüller functions take x ∈ ℝ^E, spacetime
functions take (x, y) ∈ ℝ^{2E} and cotangent functions take (x, p) ∈ ℝ^{2E}.
Brackets are {f, g} = df · Π · dg for the coefficient matrix Π, so that

    {x^α, x^β}_WP = π^{αβ},   {x^α, y^β}_Λ = ½π^{αβ},   {x^α, p_β}_{T*} = δ^α_β.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coords import ConstraintMap, CotangentVector, GenShearVector, dirac_matrix
from .errors import DegenerateSystemError, GaugeError, GraphMismatchError
from .fatgraph import EdgePath, FatGraph
from .holonomy import holonomy, prefix_frames
from .ralgebra import Lambda, RNum
from .rmatrix import ETA, Mat2, ad, basis, kappa

__all__ = [
    "Bivector",
    "wp_coefficients",
    "wp_bivector",
    "grav_bivector",
    "cotangent_bivector",
    "numeric_gradient",
    "bracket",
    "pi_sharp",
    "pi_sharp_jacobian",
    "dirac_full_matrix",
    "dirac_bivector",
    "dirac_bracket",
    "trace_function",
    "Segment",
    "GoldmanReport",
    "common_segments",
    "goldman_bracket_traces",
    "FlowReport",
    "hamiltonian_flow_check",
    "form_nondegenerate",
]


def wp_coefficients(g: FatGraph) -> np.ndarray:
    """Integer matrix π^{αβ}_WP.

    Each half-edge h of α contributes +1 towards the edge of ν(h) and −1
    towards the edge of ν⁻¹(h); coincident neighbours add up.
    """
    n = g.num_edges
    pi = np.zeros((n, n), dtype=np.int64)
    for h in range(g.num_half_edges):
        a = g.edge_of[h]
        pi[a, g.edge_of[g.nu[h]]] += 1
        pi[a, g.edge_of[g.nu_inv[h]]] -= 1
    return pi


@dataclass(frozen=True)
class Bivector:
    """Constant Poisson bivector given by its coefficient matrix."""

    kind: str
    graph: FatGraph = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def pair(self, df, dg) -> float:
        df = np.asarray(df, dtype=float)
        dg = np.asarray(dg, dtype=float)
        if df.shape != (self.dim,) or dg.shape != (self.dim,):
            raise ValueError(f"{self.kind} bivector needs covectors of length {self.dim}")
        return float(df @ self.matrix @ dg)


def wp_bivector(g: FatGraph) -> Bivector:
    return Bivector("WP", g, wp_coefficients(g))


def grav_bivector(g: FatGraph) -> Bivector:
    """π_Λ = ½ Σ π^{αβ} ∂_{x^α} ∧ ∂_{y^β} on (x, y)."""
    pi = wp_coefficients(g).astype(float)
    n = g.num_edges
    m = np.zeros((2 * n, 2 * n))
    m[:n, n:] = 0.5 * pi
    m[n:, :n] = 0.5 * pi
    return Bivector("GravΛ", g, m)


def cotangent_bivector(g: FatGraph) -> Bivector:
    """π_{T*} = Σ ∂_{x^α} ∧ ∂_{p_α} on (x, p)."""
    n = g.num_edges
    m = np.zeros((2 * n, 2 * n), dtype=np.int64)
    m[:n, n:] = np.eye(n, dtype=np.int64)
    m[n:, :n] = -np.eye(n, dtype=np.int64)
    return Bivector("Cotangent", g, m)


def numeric_gradient(f, at, step: float = 1e-3, method: str = "richardson") -> np.ndarray:
    """Finite-difference gradient.

    ``"central"`` is the plain two-point stencil; ``"richardson"`` combines
    steps h and h/2 to cancel the O(h²) error.
    """
    at = np.asarray(at, dtype=float)
    grad = np.empty_like(at)

    def central(i, h):
        e = np.zeros_like(at)
        e[i] = h
        return (f(at + e) - f(at - e)) / (2 * h)

    for i in range(at.size):
        if method == "central":
            grad[i] = central(i, step)
        elif method == "richardson":
            grad[i] = (4 * central(i, step / 2) - central(i, step)) / 3
        else:
            raise ValueError(f"unknown method {method!r}")
    return grad


def bracket(f, g, b: Bivector, at, grad_f=None, grad_g=None, **kw) -> float:
    """{f, g} = (df ⊗ dg)(Π) at a point; gradients default to finite differences."""
    at = np.asarray(at, dtype=float)
    if at.shape != (b.dim,):
        raise ValueError(f"point has {at.size} coordinates, bivector expects {b.dim}")
    df = grad_f(at) if grad_f is not None else numeric_gradient(f, at, **kw)
    dg = grad_g(at) if grad_g is not None else numeric_gradient(g, at, **kw)
    return b.pair(df, dg)


# ---------------------------------------------------------------------------
# cotangent bundle


def pi_sharp(cv: CotangentVector, lam=Lambda.PLUS, graph: FatGraph | None = None) -> GenShearVector:
    """(x, p) ↦ (x, y) with y = π_WP p."""
    g = cv.graph if graph is None else graph
    if g.fingerprint != cv.graph.fingerprint:
        raise GraphMismatchError("cotangent vector is bound to another graph")
    y = wp_coefficients(g).astype(float) @ cv.p
    return GenShearVector(g, cv.x, y, lam)


def pi_sharp_jacobian(g: FatGraph) -> np.ndarray:
    """Integer Jacobian [[I, 0], [0, π]] of π♯."""
    n = g.num_edges
    jac = np.zeros((2 * n, 2 * n), dtype=np.int64)
    jac[:n, :n] = np.eye(n, dtype=np.int64)
    jac[n:, n:] = wp_coefficients(g)
    return jac


def _constraint_rows(cm: ConstraintMap) -> np.ndarray:
    if cm.gauge is None:
        raise GaugeError("Dirac reduction needs a gauge matrix")
    f, n = cm.theta.shape
    rows = np.zeros((2 * f, 2 * n))
    rows[:f, :n] = cm.theta
    rows[f:, n:] = cm.gauge
    return rows


def dirac_full_matrix(cm: ConstraintMap) -> np.ndarray:
    """D_ij = {C_i, C_j}_{T*} for C = (c, c̃); equals [[0, Mᵀ], [−M, 0]]."""
    rows = _constraint_rows(cm)
    return rows @ cotangent_bivector(cm.graph).matrix @ rows.T


def dirac_bivector(cm: ConstraintMap) -> np.ndarray:
    """Coefficient matrix of the Dirac bracket on (x, p)."""
    rows = _constraint_rows(cm)
    pi = cotangent_bivector(cm.graph).matrix.astype(float)
    d = rows @ pi @ rows.T
    if np.linalg.matrix_rank(dirac_matrix(cm)) < cm.num_faces:
        raise GaugeError("gauge is not admissible: M = θ̃θᵀ is singular")
    return pi - pi @ rows.T @ np.linalg.solve(d, rows @ pi)


def dirac_bracket(f, g, cm: ConstraintMap, at, grad_f=None, grad_g=None, **kw) -> float:
    b = Bivector("Dirac", cm.graph, dirac_bivector(cm))
    return bracket(f, g, b, at, grad_f, grad_g, **kw)


# ---------------------------------------------------------------------------
# trace functions and the Goldman bracket


def trace_function(p: EdgePath, g: FatGraph, lam, part: str = "im"):
    """(x, y) ↦ Re_ℓ or Im_ℓ of Tr ρ(p)."""
    lam = Lambda.parse(lam)
    n = g.num_edges
    if part not in ("re", "im"):
        raise ValueError("part must be 're' or 'im'")

    def f(flat):
        flat = np.asarray(flat, dtype=float)
        z = GenShearVector(g, flat[:n], flat[n:], lam)
        t = holonomy(p, z).trace()
        return float(t.re if part == "re" else t.im)

    return f


@dataclass(frozen=True)
class Segment:
    """Maximal common run of two closed paths.

    ``a_start``/``b_start`` index the first shared step, ``length`` the
    number of shared steps; ``reversed`` marks runs where b is read backwards.
    """

    a_start: int
    b_start: int
    length: int
    reversed: bool
    eps: float
    contribution: float = 0.0


def _runs(a, b):
    n, m = len(a), len(b)
    out = []
    for k in range(n):
        for l in range(m):
            if a[k] == b[l] and a[k - 1] != b[l - 1]:
                j = 0
                while j < n + m and a[(k + j) % n] == b[(l + j) % m]:
                    j += 1
                if j < n + m:
                    out.append((k, l, j))
    return out


def common_segments(g: FatGraph, a: EdgePath, b: EdgePath) -> list:
    """Shared runs of a with b and with b reversed, with ε = ½(entry + exit sign).

    The entry sign is a's local turn sign into the run and the exit sign is
    b's local turn sign out of it.
    """
    segs = []
    for rev, bb in ((False, b), (True, b.reversed(g))):
        n, m = len(a), len(bb)
        for k, l, j in _runs(a.half_edges, bb.half_edges):
            s_in = g.local_sign(g.sigma[a[k - 1]], a[k])
            s_out = g.local_sign(g.sigma[a[(k + j - 1) % n]], bb[(l + j) % m])
            segs.append(Segment(k, l, j, rev, 0.5 * (s_in + s_out)))
    return segs


def _traceless_dual(rho: Mat2) -> Mat2:
    """F ∈ g_Λ with Im_ℓ κ(F, X) = d/dt Im_ℓ Tr(ρ e^{tX})|₀ for all X."""
    lam = rho.lam
    dirs = [basis(i, lam).to_matrix() for i in range(3)] + \
        [basis(i, lam, ell=True).to_matrix() for i in range(3)]
    rhs = np.array([(rho @ x).trace().im for x in dirs])
    mat = np.array([[kappa(u, x).im for u in dirs] for x in dirs])
    if np.linalg.cond(mat) > 1e12:
        raise DegenerateSystemError("form matrix is singular at this point; resample")
    coef = np.linalg.solve(mat, rhs)
    out = Mat2(np.zeros((2, 2)), None, lam)
    for c, u in zip(coef, dirs):
        out = out + u.scale(c)
    return out


@dataclass(frozen=True)
class GoldmanReport:
    chain_rule: float
    segment_sum: float
    segments: tuple

    @property
    def residual(self) -> float:
        return abs(self.chain_rule - self.segment_sum)


def goldman_bracket_traces(a: EdgePath, b: EdgePath, z: GenShearVector,
                           step: float = 1e-3, method: str = "richardson") -> GoldmanReport:
    """{Im_ℓ Tr ρ(a), Im_ℓ Tr ρ(b)}_Λ evaluated two ways.

    (i) contraction of numeric gradients with π_Λ;
    (ii) Σ over common segments of ε · Im_ℓ Σ_i η^{ii} κ(F_a, Ad_{A^a} J_i) κ(G_b, Ad_{A^b} J_i),
    with F_a, G_b solved from the trace derivatives and A^a, A^b the prefix
    frames at the last shared step.
    """
    g = z.graph
    lam = z.lam
    fa = trace_function(a, g, lam)
    fb = trace_function(b, g, lam)
    route1 = bracket(fa, fb, grav_bivector(g), z.flat(), step=step, method=method)

    rho_a = holonomy(a, z).matrix
    big_f = _traceless_dual(rho_a)
    frames_a = prefix_frames(a, z)
    js = [basis(i, lam).to_matrix() for i in range(3)]
    eta = np.diag(ETA)
    total = 0.0
    segs = []
    cache = {}
    for seg in common_segments(g, a, b):
        if seg.reversed not in cache:
            bb = b.reversed(g) if seg.reversed else b
            cache[seg.reversed] = (_traceless_dual(holonomy(bb, z).matrix), prefix_frames(bb, z))
        big_g, frames_b = cache[seg.reversed]
        fa_k = frames_a[(seg.a_start + seg.length - 1) % len(a)]
        fb_k = frames_b[(seg.b_start + seg.length - 1) % len(b)]
        acc = RNum(0.0, 0.0, lam)
        for i in range(3):
            acc = acc + kappa(big_f, ad(fa_k, js[i])) * kappa(big_g, ad(fb_k, js[i])) * eta[i]
        c = seg.eps * float(acc.im)
        total += c
        segs.append(Segment(seg.a_start, seg.b_start, seg.length, seg.reversed, seg.eps, c))
    return GoldmanReport(route1, total, tuple(segs))


@dataclass(frozen=True)
class FlowReport:
    part: str
    closed_form: RNum
    numeric: RNum

    @property
    def residual(self) -> float:
        return float(max(np.max(np.abs(self.closed_form.re - self.numeric.re)),
                         np.max(np.abs(self.closed_form.im - self.numeric.im))))


def hamiltonian_flow_check(a: EdgePath, z: GenShearVector, part: str = "im",
                           step: float = 1e-3, method: str = "richardson") -> FlowReport:
    """{Re_ℓ/Im_ℓ Tr ρ(a), z^β}_Λ for every edge β, closed form against numeric.

    Closed forms: {Re_ℓ Tr ρ, z^β} = ½ Σ_k π^{α_kβ} Tr(ℓJ_k ρ) and
    {Im_ℓ Tr ρ, z^β} = ½ Σ_k π^{α_kβ} Tr(J_k ρ).
    """
    g = z.graph
    lam = z.lam
    n = g.num_edges
    pi = wp_coefficients(g)
    rho = holonomy(a, z).matrix
    frames = prefix_frames(a, z)
    j1 = basis(1, lam).to_matrix()
    ell = RNum(0.0, 1.0, lam)
    cre = np.zeros(n)
    cim = np.zeros(n)
    for k, h in enumerate(a):
        jk = ad(frames[k], j1)
        t = (jk @ rho).trace()
        if part == "re":
            t = t * ell
        alpha = g.edge_of[h]
        cre += 0.5 * pi[alpha] * t.re
        cim += 0.5 * pi[alpha] * t.im
    f = trace_function(a, g, lam, part)
    df = numeric_gradient(f, z.flat(), step=step, method=method)
    m = grav_bivector(g).matrix
    # {F, x^β} and {F, y^β}
    row = df @ m
    return FlowReport(part, RNum(cre, cim, lam), RNum(row[:n], row[n:], lam))


def form_nondegenerate(mu: float, nu: float, lam) -> bool:
    """Non-degeneracy of B = μ(,) + ν⟨,⟩ on g_Λ: μ²Λ + ν² ≠ 0."""
    return mu * mu * int(Lambda.parse(lam)) + nu * nu != 0
