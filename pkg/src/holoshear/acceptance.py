"""The ten acceptance criteria as callable checks.

Each check returns a :class:`CriterionResult` with the worst residual seen.
A tolerance override tightens or loosens every floating-point threshold;
failures are classified as ``"tolerance"`` when the residual still meets the
criterion's default threshold and as ``"logic"`` otherwise.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .coords import (
    ConstraintMap,
    CotangentVector,
    GenShearVector,
    constraint_residual,
    sample_in_kernel,
)
from .errors import DegenerateSystemError, PathError
from .fatgraph import SHIPPED_GRAPHS, random_closed_path, shipped_graph, transport_path
from .holonomy import compose_loops, earthquake_cocycle, grafting_cocycle, holonomy
from .moves import (
    _a_full,
    _edge_pairs,
    _flat,
    _movable,
    _unflat,
    cached_move,
    decompose_move,
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
)
from .poisson import (
    cotangent_bivector,
    goldman_bracket_traces,
    grav_bivector,
    pi_sharp,
    pi_sharp_jacobian,
    wp_coefficients,
)
from .ralgebra import Lambda, RNum
from .rmatrix import ad

__all__ = ["CriterionResult", "CRITERIA", "DEFAULT_TOLERANCES", "run_acceptance"]

LAMBDAS = (Lambda.MINUS, Lambda.ZERO, Lambda.PLUS)

DEFAULT_TOLERANCES = {
    1: 1e-9,
    2: 1e-10,
    3: 1e-10,
    4: 0.0,
    5: 0.0,
    6: 1e-5,
    7: 1e-8,
    8: 1e-10,
    9: 1e-10,
    10: 1e-10,
}

NAMES = {
    1: "pentagon relation",
    2: "involutivity / commutativity / naturality",
    3: "constraint preservation",
    4: "Casimir property",
    5: "symplectomorphism",
    6: "Poisson property of moves",
    7: "Goldman agreement",
    8: "trace / parabolicity",
    9: "cocycle laws",
    10: "Hamiltonian decomposition",
}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    residual: float
    tolerance: float
    default_tolerance: float
    failure: str | None = None
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({self.failure})"
        return (f"[{status}] {self.number:2d}. {self.name}: residual {self.residual:.3e} "
                f"(tol {self.tolerance:.1e})")

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "default_tolerance": self.default_tolerance,
            "failure": self.failure,
            "details": self.details,
        }


class _Worst:
    """Running maximum per named part."""

    def __init__(self):
        self.parts: dict = {}

    def add(self, key, value):
        value = float(value)
        self.parts[key] = max(self.parts.get(key, 0.0), value)

    @property
    def value(self) -> float:
        return max(self.parts.values()) if self.parts else 0.0


def _rng(seed, *salt):
    return np.random.default_rng([seed, *salt])


def _max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


# ---------------------------------------------------------------------------
# criteria


def c1_pentagon(graphs, seed, samples):
    w = _Worst()
    exp = _Worst()
    used = []
    for gi, g in enumerate(graphs):
        adjacent, _ = _edge_pairs(g)
        if not adjacent:
            continue
        used.append(g.fingerprint)
        cm = ConstraintMap(g)
        for lam in LAMBDAS:
            rng = _rng(seed, 1, gi, int(lam) + 1)
            for _ in range(samples):
                i, j = adjacent[int(rng.integers(len(adjacent)))]
                z = sample_in_kernel(cm, rng, "spacetime", lam)
                res, eres = pentagon_check(z, i, j, "spacetime", lam)
                w.add(f"lambda={int(lam)}", res)
                if eres is not None:
                    exp.add("lambda=1 exp-level", eres)
    return w, {"graphs_with_adjacent_pair": len(used), "exp_level": exp.parts}


def c2_relations(graphs, seed, samples):
    w = _Worst()
    skipped = []
    for gi, g in enumerate(graphs):
        for space in ("teich", "lamination", "spacetime", "cotangent"):
            lams = (Lambda.PLUS,) if space == "teich" else LAMBDAS
            for lam in lams:
                rep = relation_suite(g, space, lam, seed=seed + 1000 * gi, samples=samples)
                for name in ("involutivity", "naturality", "commutativity"):
                    r = rep[name]
                    if r.skipped:
                        skipped.append(f"{g.fingerprint}:{name}")
                    else:
                        w.add(f"{space}:{name}", r.max_residual)
    return w, {"skipped": sorted(set(skipped))}


def c3_constraints(graphs, seed, samples):
    w = _Worst()
    for gi, g in enumerate(graphs):
        edges = _movable(g)
        if not edges:
            continue
        cm = ConstraintMap(g)
        for lam in LAMBDAS:
            rng = _rng(seed, 3, gi, int(lam) + 1)
            for _ in range(samples):
                a = edges[int(rng.integers(len(edges)))]
                mv = cached_move(g, a)
                cm2 = ConstraintMap(mv.post_graph)
                x = sample_in_kernel(cm, rng, "teich")
                w.add("c(x')", _max_abs(constraint_residual(move_x(x, a), cm2)))
                lw = sample_in_kernel(cm, rng, "lamination", lam)
                _, lw2 = move_lam(x, lw, a)
                w.add("c(u'), c(v')", _max_abs(constraint_residual(lw2, cm2)))
                z = sample_in_kernel(cm, rng, "spacetime", lam)
                w.add("c_Λ(z')", _max_abs(constraint_residual(move_z(z, a), cm2)))
                cv = sample_in_kernel(cm, rng, "cotangent", lam)
                cv2 = move_cotangent(cv, a, lam)
                w.add("c(x') cotangent", _max_abs(cm2.theta @ cv2.x))
                face = int(rng.integers(g.num_faces))
                q = float(rng.uniform(-1, 1))
                w.add("gauge orbit", gauge_orbit_residual(cv, a, q, face, lam))
    return w, {}


def c4_casimir(graphs, seed, samples):
    w = _Worst()
    for g in graphs:
        w.add(g.fingerprint, int(np.max(np.abs(g.theta() @ wp_coefficients(g)))))
    return w, {}


def c5_symplecto(graphs, seed, samples):
    w = _Worst()
    for g in graphs:
        n = g.num_edges
        jac = pi_sharp_jacobian(g)
        lhs = jac @ cotangent_bivector(g).matrix @ jac.T
        pi = wp_coefficients(g)
        two_grav = np.zeros((2 * n, 2 * n), dtype=np.int64)
        two_grav[:n, n:] = pi
        two_grav[n:, :n] = pi
        w.add("J π_T* Jᵀ + 2π_Λ", int(np.max(np.abs(lhs + two_grav))))
        th = g.theta()
        # pi_sharp of every constraint differential dc^i = θ^i
        img = np.stack([pi @ th[i] for i in range(th.shape[0])])
        w.add("π♯(dc)", int(np.max(np.abs(img))))
        zero = CotangentVector(g, np.zeros(n), th[0].astype(float))
        w.add("π♯(dc) via pi_sharp", _max_abs(pi_sharp(zero).im))
    return w, {}


def _fd_jacobian(fn, flat, step):
    n = flat.size
    jac = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        jac[:, i] = (fn(flat + e) - fn(flat - e)) / (2 * step)
    return jac


def c6_poisson(graphs, seed, samples, step=1e-6):
    w = _Worst()
    for gi, g in enumerate(graphs):
        edges = _movable(g)
        if not edges:
            continue
        cm = ConstraintMap(g)
        for lam in LAMBDAS:
            rng = _rng(seed, 6, gi, int(lam) + 1)
            for _ in range(samples):
                a = edges[int(rng.integers(len(edges)))]
                g2 = cached_move(g, a).post_graph
                z = sample_in_kernel(cm, rng, "spacetime", lam)
                fz = lambda f: _flat(move_z(_unflat(f, z, g), a))
                jac = _fd_jacobian(fz, _flat(z), step)
                pz = grav_bivector(g).matrix
                pz2 = grav_bivector(g2).matrix
                w.add(f"z lambda={int(lam)}", _max_abs(jac @ pz @ jac.T - pz2))
                cv = sample_in_kernel(cm, rng, "cotangent", lam)
                fc = lambda f: _flat(move_cotangent(_unflat(f, cv, g), a, lam))
                jac = _fd_jacobian(fc, _flat(cv), step)
                pc = cotangent_bivector(g).matrix
                w.add(f"cotangent lambda={int(lam)}", _max_abs(jac @ pc @ jac.T - pc))
    return w, {"step": step}


def c7_goldman(graphs, seed, samples):
    g = shipped_graph("punctured_torus")
    a = g.path(["a", "-b"])
    b = g.path(["b", "-c"])
    cm = ConstraintMap(g)
    w = _Worst()
    resampled = 0
    values = {}
    for lam in LAMBDAS:
        rng = _rng(seed, 7, int(lam) + 1)
        done = 0
        while done < samples:
            z = sample_in_kernel(cm, rng, "spacetime", lam)
            try:
                rep = goldman_bracket_traces(a, b, z)
            except DegenerateSystemError:
                resampled += 1
                continue
            scale = max(1.0, abs(rep.chain_rule))
            w.add(f"lambda={int(lam)}", rep.residual / scale)
            values.setdefault(f"lambda={int(lam)}", rep.chain_rule)
            done += 1
    return w, {"pair": ["a -b", "b -c"], "resampled": resampled, "first_value": values,
               "residual": "relative to max(1, |bracket|)"}


def c8_traces(graphs, seed, samples):
    w = _Worst()
    for gi, g in enumerate(graphs):
        cm = ConstraintMap(g)
        edges = _movable(g)
        for lam in LAMBDAS:
            rng = _rng(seed, 8, gi, int(lam) + 1)
            for _ in range(samples):
                z = sample_in_kernel(cm, rng, "spacetime", lam)
                for i in range(g.num_faces):
                    t = holonomy(g.face_path(i), z).trace()
                    w.add("face |Re Tr| - 2", abs(abs(float(t.re)) - 2.0))
                    w.add("face Im Tr", abs(float(t.im)))
                a = edges[int(rng.integers(len(edges)))]
                mv = cached_move(g, a)
                p = random_closed_path(g, rng, 2, 12)
                if all(h in mv.pre_graph.edges[a] for h in p):
                    continue
                t1 = holonomy(p, z).trace()
                t2 = holonomy(transport_path(p, mv), move_z(z, a)).trace()
                w.add("transported trace", max(abs(t1.re - t2.re), abs(t1.im - t2.im)))
    return w, {}


def _norm(m) -> float:
    return float(max(np.max(np.abs(m.re)), np.max(np.abs(m.im))))


def _rel_diff(m1, m2, scale) -> float:
    """|m1 − m2|∞ relative to the size of the factors that produced them."""
    d = float(max(np.max(np.abs(m1.re - m2.re)), np.max(np.abs(m1.im - m2.im))))
    return d / max(1.0, scale)


def c9_cocycle(graphs, seed, samples, max_length=8):
    w = _Worst()
    for gi, g in enumerate(graphs):
        cm = ConstraintMap(g)
        if cm.kernel_dimension == 0:
            continue
        rng = _rng(seed, 9, gi)
        done = 0
        while done < samples:
            x = sample_in_kernel(cm, rng, "teich")
            x2 = sample_in_kernel(cm, rng, "teich")
            start = int(rng.integers(g.num_half_edges))
            try:
                pa = random_closed_path(g, rng, 2, max_length, start=start)
                pb = random_closed_path(g, rng, 2, max_length, start=start)
            except PathError:
                continue
            done += 1
            pab = compose_loops(g, pa, pb)
            cases = [("earthquake", lambda p: earthquake_cocycle(p, x, x2, strict=True),
                      holonomy(pa, x).matrix, holonomy(pa, x2).matrix)]
            for lam in LAMBDAS:
                lw = sample_in_kernel(cm, rng, "lamination", lam)
                xl = GenShearVector(g, x.x, np.zeros(g.num_edges), lam)
                cases.append((f"grafting lambda={int(lam)}",
                              lambda p, lw=lw: grafting_cocycle(p, x, lw, strict=True),
                              holonomy(pa, xl).matrix,
                              holonomy(pa, GenShearVector(g, x.x + lw.re, lw.im, lam)).matrix))
            for name, z, ra, target in cases:
                za, zb, zab = z(pa), z(pb), z(pab)
                w.add(f"Zρ = ρ' {name}", _rel_diff(za @ ra, target, _norm(za) * _norm(ra)))
                scale = _norm(za) * _norm(ra) ** 2 * _norm(zb)
                w.add(f"Z(ab) {name}", _rel_diff(zab, za @ ad(ra, zb), scale))
    return w, {"max_loop_length": max_length,
               "residual": "entrywise difference over the product of factor norms"}


def _fd(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def c10_hamiltonian(graphs, seed, samples):
    w = _Worst()
    exact = _Worst()
    fd = _Worst()
    for gi, g in enumerate(graphs):
        cm = ConstraintMap(g)
        edges = _movable(g)
        for lam in LAMBDAS:
            rng = _rng(seed, 10, gi, int(lam) + 1)
            for _ in range(samples):
                a = edges[int(rng.integers(len(edges)))]
                for space, mover in (("teich", lambda v: move_x(v, a)),
                                     ("spacetime", lambda v: move_z(v, a)),
                                     ("cotangent", lambda v: move_cotangent(v, a, lam))):
                    if space == "teich" and lam != Lambda.PLUS:
                        continue
                    v = sample_in_kernel(cm, rng, space, lam)
                    amap, bmap = decompose_move(g, a, space, lam)
                    w.add(f"A∘B {space}", _max_abs(_flat(amap(bmap(v))) - _flat(mover(v))))
        for a in _movable(g):
            g2 = cached_move(g, a).post_graph
            for space in ("teich", "spacetime", "cotangent"):
                j2 = _a_full(g, a, space)
                if space == "teich":
                    p1, p2 = wp_coefficients(g), wp_coefficients(g2)
                elif space == "spacetime":
                    p1 = np.rint(2 * grav_bivector(g).matrix).astype(np.int64)
                    p2 = np.rint(2 * grav_bivector(g2).matrix).astype(np.int64)
                else:
                    p1, p2 = cotangent_bivector(g).matrix, cotangent_bivector(g2).matrix
                # (2J) π (2J)ᵀ = 4π′ keeps everything in integers
                exact.add(f"A_* π {space}", int(np.max(np.abs(j2 @ p1 @ j2.T - 4 * p2))))
    rng = _rng(seed, 10, 99)
    for _ in range(samples):
        x = float(rng.uniform(-2, 2))
        fd.add("dH/dx", abs(_fd(hamiltonian_H, x) - hamiltonian_H_prime(x)))
        for lam in LAMBDAS:
            y = float(rng.uniform(-1, 1))
            gx, gy = im_H_partials(RNum(x, y, lam))
            nx = _fd(lambda t: im_H_lambda(RNum(t, y, lam)), x)
            ny = _fd(lambda t: im_H_lambda(RNum(x, t, lam)), y)
            fd.add(f"dImH/dx lambda={int(lam)}", abs(nx - gx))
            fd.add(f"dImH/dy lambda={int(lam)}", abs(ny - gy))
    h0 = abs(hamiltonian_H(0.0) + math.pi ** 2 / 12)
    details = {"exact_parts": exact.parts, "finite_difference_parts": fd.parts, "H(0)+π²/12": h0}
    return w, exact, fd, h0, details


CRITERIA = {
    1: c1_pentagon,
    2: c2_relations,
    3: c3_constraints,
    4: c4_casimir,
    5: c5_symplecto,
    6: c6_poisson,
    7: c7_goldman,
    8: c8_traces,
    9: c9_cocycle,
    10: c10_hamiltonian,
}

DEFAULT_SAMPLES = {1: 100, 2: 100, 3: 50, 4: 0, 5: 0, 6: 25, 7: 50, 8: 50, 9: 50, 10: 50}


def _classify(residual, tol, default):
    if residual <= tol:
        return True, None
    return False, "tolerance" if residual <= default else "logic"


def run_criterion(k: int, graphs, seed: int = 7, samples: int | None = None,
                  tol: float | None = None) -> CriterionResult:
    default = DEFAULT_TOLERANCES[k]
    use = default if tol is None or default == 0.0 else tol
    n = DEFAULT_SAMPLES[k] if samples is None else samples
    t0 = time.perf_counter()
    if k == 10:
        w, exact, fd, h0, details = c10_hamiltonian(graphs, seed, n)
        parts = [
            _classify(w.value, use, default),
            _classify(exact.value, 0.0, 0.0),
            _classify(fd.value, 1e-5 if tol is None else tol, 1e-5),
            _classify(h0, 1e-12 if tol is None else tol, 1e-12),
        ]
        # the headline residual is A∘B against the full move; the exact and
        # finite-difference parts are gated separately and kept in details
        residual = w.value
        passed = all(p for p, _ in parts)
        kinds = [f for p, f in parts if not p]
        failure = None if passed else ("logic" if "logic" in kinds else "tolerance")
        details["parts"] = w.parts
    else:
        w, details = CRITERIA[k](graphs, seed, n)
        residual = w.value
        passed, failure = _classify(residual, use, default)
        details = {"parts": w.parts, **details}
    return CriterionResult(k, NAMES[k], passed, residual, use, default, failure,
                           time.perf_counter() - t0, details)


def default_graphs() -> list:
    return [shipped_graph(name) for name in SHIPPED_GRAPHS]


def run_acceptance(graphs=None, seed: int = 7, samples: int | None = None,
                   tol: float | None = None, only=None) -> list:
    graphs = default_graphs() if graphs is None else list(graphs)
    keys = sorted(CRITERIA) if only is None else sorted(only)
    return [run_criterion(k, graphs, seed, samples, tol) for k in keys]
