"""Command-line front end.

Exit codes: 0 success, 1 failed check or criterion, 2 usage, I/O or
validation error.  Reports are JSON with doubles at 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, jsonio
from .acceptance import DEFAULT_TOLERANCES, run_acceptance
from .coords import (
    SPACES,
    ConstraintMap,
    GenShearVector,
    LamVector,
    ShearVector,
    constraint_residual,
    coords_from_dict,
    coords_to_dict,
    lamination_base,
    read_coords_document,
    sample_in_kernel,
)
from .errors import HoloshearError, NonHyperbolicError
from .fatgraph import SHIPPED_GRAPHS, FatGraph, load_graph, shipped_graph
from .holonomy import holonomy
from .moves import apply_move, canonical_space, relation_suite
from .poisson import goldman_bracket_traces, wp_coefficients
from .ralgebra import Lambda

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    lam: Lambda | None = None
    graph: str | None = None
    coords: list = field(default_factory=list)
    seed: int = 7
    samples: int | None = None
    tol: float | None = None
    report: str | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.samples is not None and self.samples < 1:
            raise UsageError("--samples must be at least 1")
        for path in ([self.graph] if self.graph and self.graph not in SHIPPED_GRAPHS else []) + self.coords:
            if not os.path.exists(path):
                raise UsageError(f"no such file: {path}")


def _lambda(text):
    try:
        return Lambda.parse(int(text))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError("lambda must be -1, 0 or 1") from None


def _graph(spec) -> FatGraph:
    """A graph file, or the name of a shipped graph."""
    if spec in SHIPPED_GRAPHS:
        return shipped_graph(spec)
    return load_graph(spec)


def _emit(doc, path):
    text = jsonio.dumps(doc)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_vector(path, graph, lam):
    doc = read_coords_document(path)
    v = coords_from_dict(doc, graph, lam)
    return v, doc


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    RunConfig("validate", graph=args.graph)
    g = _graph(args.graph)
    cm = ConstraintMap(g)
    pi = wp_coefficients(g)
    doc = {
        "graph_fingerprint": g.fingerprint,
        "genus": g.genus,
        "punctures": g.punctures,
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "faces": g.num_faces,
        "edge_labels": list(g.labels),
        "theta": cm.theta.tolist(),
        "pi_wp": pi.tolist(),
        "pi_wp_rank": int(np.linalg.matrix_rank(pi)),
        "casimir_residual": int(np.max(np.abs(cm.theta @ pi))),
        "default_gauge_admissible": cm.is_admissible(),
        "loops": [g.labels[i] for i in range(g.num_edges) if g.is_loop(i)],
    }
    _emit(doc, args.report)
    return EXIT_OK


def _resolve_graph(args):
    return _graph(args.graph) if args.graph else None


def cmd_holonomy(args) -> int:
    RunConfig("holonomy", graph=args.graph, coords=[args.coords])
    g = _resolve_graph(args)
    v, _ = _load_vector(args.coords, g, args.lam)
    g = v.graph
    if isinstance(v, LamVector):
        raise UsageError("holonomy takes teich or spacetime coordinates, not a lamination")
    if not isinstance(v, (ShearVector, GenShearVector)):
        raise UsageError("holonomy takes teich or spacetime coordinates")
    p = g.path(args.path.replace(",", " ").split())
    h = holonomy(p, v, args.lam if isinstance(v, ShearVector) else None)
    t = h.trace()
    doc = {
        "path": p.labels(g),
        "half_edges": list(p.half_edges),
        "lambda": int(h.lam),
        "matrix_re": np.asarray(h.matrix.re).tolist(),
        "matrix_im": np.asarray(h.matrix.im).tolist(),
        "trace_re": float(t.re),
        "trace_im": float(t.im),
    }
    try:
        doc["length"] = h.length()
    except NonHyperbolicError as exc:
        doc["length"] = None
        doc["length_note"] = str(exc)
    _emit(doc, args.report)
    return EXIT_OK


def cmd_accept(args) -> int:
    graphs_arg = args.graph or []
    cfg = RunConfig("accept", graph=None, seed=args.seed, samples=args.samples, tol=args.tol)
    for spec in graphs_arg:
        if spec not in SHIPPED_GRAPHS and not os.path.exists(spec):
            raise UsageError(f"no such file: {spec}")
    graphs = [_graph(s) for s in graphs_arg] or None
    only = None
    if args.only:
        only = sorted({int(s) for s in args.only.split(",")})
        bad = [k for k in only if k not in DEFAULT_TOLERANCES]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
    results = run_acceptance(graphs, cfg.seed, cfg.samples, cfg.tol, only)
    for r in results:
        print(r.line())
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if args.report:
        jsonio.dump({
            "seed": cfg.seed,
            "samples": cfg.samples,
            "tolerance_override": cfg.tol,
            "graphs": [g.fingerprint for g in graphs] if graphs else list(SHIPPED_GRAPHS),
            "passed": passed,
            "criteria": [r.to_dict() for r in results],
        }, args.report)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_moves_apply(args) -> int:
    src = args.infile
    RunConfig("moves apply", graph=args.graph, coords=[src])
    g = _resolve_graph(args)
    v, doc = _load_vector(src, g, args.lam)
    g = v.graph
    space = canonical_space(args.space) if args.space else v.space
    if space != v.space:
        raise UsageError(f"--space {args.space} does not match the file's space {v.space!r}")
    base = None
    if isinstance(v, LamVector):
        base = lamination_base(doc, g)
        if base is None:
            raise UsageError("lamination files need a 'base' field with the shear coordinates x")
        (x2, out), rec = apply_move(base, args.edge, w=v)
        base = x2
    elif space == "cotangent":
        lam = args.lam if args.lam is not None else doc.get("lambda")
        if lam is None:
            raise UsageError("cotangent moves depend on lambda; pass --lambda")
        out, rec = apply_move(v, args.edge, lam)
    else:
        out, rec = apply_move(v, args.edge)
    result = coords_to_dict(out, base=base)
    result["move"] = {
        "edge": g.labels[rec.alpha],
        "frame": [g.labels[e] for e in rec.frame],
        "pre_graph_fingerprint": rec.pre_fingerprint,
        "post_graph_fingerprint": rec.post_fingerprint,
        "space": rec.space,
        "lambda": None if rec.lam is None else int(rec.lam),
    }
    if space == "cotangent":
        result["lambda"] = int(rec.lam)
    _emit(result, args.out)
    return EXIT_OK


def cmd_moves_relations(args) -> int:
    cfg = RunConfig("moves relations", graph=args.graph, seed=args.seed,
                    samples=args.samples, tol=args.tol)
    g = _graph(args.graph)
    space = canonical_space(args.space)
    lam = Lambda.PLUS if args.lam is None else args.lam
    samples = cfg.samples or 100
    rep = relation_suite(g, space, lam, seed=cfg.seed, samples=samples)
    tols = {"involutivity": 1e-10, "naturality": 1e-10, "commutativity": 1e-10, "pentagon": 1e-9}
    if cfg.tol is not None:
        tols = {k: cfg.tol for k in tols}
    ok = True
    rows = []
    for name, r in rep.items():
        d = r.to_dict()
        if r.skipped:
            print(f"[SKIP] {name}: {r.notice}")
        else:
            d["tolerance"] = tols[name]
            d["passed"] = r.max_residual <= tols[name]
            ok &= d["passed"]
            extra = "" if r.exp_residual is None else f", exp-level {r.exp_residual:.3e}"
            print(f"[{'PASS' if d['passed'] else 'FAIL'}] {name}: {r.max_residual:.3e}{extra}")
        rows.append(d)
    if args.report:
        jsonio.dump({"graph_fingerprint": g.fingerprint, "space": space, "lambda": int(lam),
                     "seed": cfg.seed, "samples": samples, "passed": ok, "relations": rows},
                    args.report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_goldman(args) -> int:
    RunConfig("goldman", graph=args.graph, coords=[args.coords])
    g = _resolve_graph(args)
    v, _ = _load_vector(args.coords, g, args.lam)
    if not isinstance(v, GenShearVector) or isinstance(v, LamVector):
        raise UsageError("goldman needs spacetime coordinates")
    g = v.graph
    if len(args.path) != 2:
        raise UsageError("goldman needs exactly two --path arguments")
    a, b = (g.path(p.replace(",", " ").split()) for p in args.path)
    rep = goldman_bracket_traces(a, b, v)
    doc = {
        "lambda": int(v.lam),
        "paths": [a.labels(g), b.labels(g)],
        "chain_rule": rep.chain_rule,
        "segment_sum": rep.segment_sum,
        "residual": rep.residual,
        "segments": [
            {"a_start": s.a_start, "b_start": s.b_start, "length": s.length,
             "reversed": s.reversed, "eps": s.eps, "contribution": s.contribution}
            for s in rep.segments
        ],
    }
    _emit(doc, args.report)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = RunConfig("sample", graph=args.graph, seed=args.seed)
    g = _graph(args.graph)
    space = canonical_space(args.space)
    lam = Lambda.PLUS if args.lam is None else args.lam
    cm = ConstraintMap(g)
    rng = np.random.default_rng(cfg.seed)
    base = None
    if space == "lamination":
        base = sample_in_kernel(cm, rng, "teich")
    v = sample_in_kernel(cm, rng, space, lam)
    doc = coords_to_dict(v, base=base)
    if space == "cotangent":
        doc["lambda"] = int(lam)
    doc["constraint_residual"] = float(np.max(np.abs(constraint_residual(v, cm)))) if g.num_faces else 0.0
    _emit(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holoshear", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_arg(p, required=True):
        p.add_argument("--graph", required=required,
                       help=f"graph JSON file or shipped name ({', '.join(SHIPPED_GRAPHS)})")

    p = sub.add_parser("validate", help="check a fat graph and report its invariants")
    graph_arg(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("holonomy", help="holonomy matrix, trace and length of a closed path")
    graph_arg(p, required=False)
    p.add_argument("--coords", required=True)
    p.add_argument("--path", required=True, help="edge labels, e.g. 'a -b' (a leading '-' reverses)")
    p.add_argument("--lambda", dest="lam", type=_lambda)
    p.add_argument("--report")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("accept", help="run the acceptance criteria")
    p.add_argument("--graph", action="append", help="restrict to these graphs (repeatable)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--report")
    p.set_defaults(func=cmd_accept)

    p = sub.add_parser("moves", help="Whitehead moves")
    msub = p.add_subparsers(dest="moves_command", required=True)
    q = msub.add_parser("apply", help="apply one Whitehead move to a coordinate file")
    graph_arg(q, required=False)
    q.add_argument("--edge", required=True)
    q.add_argument("--space", choices=sorted(set(SPACES) | {"x", "xw", "z", "xp", "lam"}))
    q.add_argument("--lambda", dest="lam", type=_lambda)
    q.add_argument("--in", "--coords", dest="infile", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_moves_apply)
    q = msub.add_parser("relations", help="sampled check of the Whitehead move relations")
    graph_arg(q)
    q.add_argument("--space", default="teich")
    q.add_argument("--lambda", dest="lam", type=_lambda)
    q.add_argument("--samples", type=int)
    q.add_argument("--seed", type=int, default=7)
    q.add_argument("--tol", type=float)
    q.add_argument("--report")
    q.set_defaults(func=cmd_moves_relations)

    p = sub.add_parser("goldman", help="two-way evaluation of the bracket of two trace functions")
    graph_arg(p, required=False)
    p.add_argument("--coords", required=True)
    p.add_argument("--path", action="append", default=[], required=True)
    p.add_argument("--lambda", dest="lam", type=_lambda)
    p.add_argument("--report")
    p.set_defaults(func=cmd_goldman)

    p = sub.add_parser("sample", help="seeded coordinate vector satisfying the face constraints")
    graph_arg(p)
    p.add_argument("--space", default="teich")
    p.add_argument("--lambda", dest="lam", type=_lambda)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, HoloshearError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"holoshear: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
