"""Command-line front end.

Exit codes: 0 success/PASS/SOLVED, 1 verification FAIL, 2 INFEASIBLE,
3 input or parse error, 4 INCONCLUSIVE.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import catalog
from .cell_system import MissingCell, parse_cells
from .fusion_graph import GraphError, parse_graph
from .fusion_ring import fusion_matrices, nimrep_check
from .hecke import check_hecke_relations
from .numerics import qint
from .solver import (INCONCLUSIVE, INFEASIBLE, SOLVED, SolverOptions,
                     certify_infeasible_z9, solve, verify)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_INCONCLUSIVE = 4

_STATUS_EXIT = {SOLVED: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE, INCONCLUSIVE: EXIT_INCONCLUSIVE}


def _default_precision() -> int:
    env = os.environ.get("QCELLS_PRECISION")
    if env:
        try:
            return max(15, int(env))
        except ValueError:
            pass
    return 15


def _load_graph(selector: str, precision: int, tolerance: float):
    if os.path.exists(selector):
        with open(selector, "rb") as fh:
            return parse_graph(fh.read(), precision=precision, tolerance=tolerance)
    return catalog.builtin_graph(selector, precision=precision, tolerance=tolerance)


def _write_json(path, doc):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def cmd_graphs_list(args) -> int:
    print(f"{'name':<14} {'kappa':>6} {'V':>4} {'E':>4} {'triangles':>9} {'typeI':>6} {'typeII':>7}")
    for name in catalog.catalog_names():
        g = catalog.builtin_graph(name)
        kappa = "inf" if g.context.classical else str(g.context.altitude)
        print(f"{name:<14} {kappa:>6} {len(g.vertices):>4} {len(g.edges):>4} "
              f"{len(g.enumerate_triangles()):>9} {g.type1_vertex_pair_count():>6} "
              f"{g.type2_frame_count_formula():>7}")
    return EXIT_OK


def cmd_graph_show(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    dims = None
    try:
        dims = g.pf_dimensions()
    except GraphError:
        pass
    print(f"graph {g.name}: altitude {'inf' if g.context.classical else g.context.altitude}, "
          f"{len(g.vertices)} vertices, {len(g.edges)} edges")
    print(f"  triangles: {len(g.enumerate_triangles())} (Tr(G^3)/3 = {g.triangle_count_formula()})")
    print(f"  type I frames: {g.type1_vertex_pair_count()} vertex pairs, "
          f"{len(g.enumerate_type1_frames())} edge pairs")
    t2 = g.enumerate_type2_frames(dedup=False)
    split = {"doubly": 0, "singly": 0, "none": 0}
    for f in t2:
        split[f.degeneracy] += 1
    print(f"  type II frames: {len(t2)} raw (= {g.type2_frame_count_formula()}), "
          f"split {split['doubly']}/{split['singly']}/{split['none']}, "
          f"{len(g.enumerate_type2_frames())} after dedup")
    if dims is not None:
        print(f"  PF eigenvalue: {dims.eigenvalue:.12f}")
        for v in g.vertices:
            tri = g.triality[v]
            tri_s = "" if tri is None else f"  triality {tri}"
            print(f"    [{v}] = {dims[v]:.12f}{tri_s}")
    return EXIT_OK


def cmd_solve(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    opts = SolverOptions(restarts=args.restarts, seed=args.seed, tol_solve=args.tol)
    report = solve(g, opts)
    print(f"{g.name}: {report.status} (max residual {report.max_residual:.3e}, "
          f"{report.restarts} restarts, seed {report.seed})")
    for k, v in report.invariants.items():
        if k not in ("graph", "moduli"):
            print(f"  {k}: {v}")
    _write_json(args.output, report.as_dict())
    return _STATUS_EXIT[report.status]


def cmd_verify(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    with open(args.cells, "rb") as fh:
        cells = parse_cells(fh.read(), g)
    rep = verify(g, cells, tolerance=args.tol)
    print(rep)
    _write_json(args.output, rep.as_dict())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_invariants(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    with open(args.cells, "rb") as fh:
        cells = parse_cells(fh.read(), g)
    from .cell_system import gauge_invariants
    from .solver import _jsonify
    inv = gauge_invariants(cells)
    doc = _jsonify(inv)
    print(json.dumps(doc, indent=2))
    _write_json(args.output, doc)
    return EXIT_OK


def cmd_hecke(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    with open(args.cells, "rb") as fh:
        cells = parse_cells(fh.read(), g)
    report = check_hecke_relations(cells, g, p_max=args.pmax)
    print(f"{g.name}: Hecke relations up to Path^{args.pmax}, "
          f"max violation {report['max_violation']:.3e}")
    for name, v in report["violations"].items():
        print(f"  {name}: {v}")
    _write_json(args.output, report)
    return EXIT_OK if report["max_violation"] < args.tol * 10 else EXIT_FAIL


def cmd_fusion(args) -> int:
    fam = fusion_matrices(args.level)
    if args.weight:
        l, m = (int(x) for x in args.weight.split(","))
        print(f"N_({l},{m}) at level {args.level}:")
        print(fam[(l, m)])
    else:
        print(f"level {args.level}: {len(fam.weights)} weights")
        for w in fam.weights:
            print(f"  N_{w}: entry sum {int(fam[w].sum())}")
    return EXIT_OK


def cmd_nimrep(args) -> int:
    g = _load_graph(args.graph, args.precision, args.tol)
    rep = nimrep_check(g)
    print(rep)
    _write_json(args.output, rep.as_dict())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_certify_z9(args) -> int:
    rep = certify_infeasible_z9(precision=max(args.precision, 30))
    print(f"Z9 analytic certificate at {rep['precision']} digits: "
          f"minimum violation {rep['min_violation']:.6e} over {len(rep['assignments'])} "
          f"branch assignments")
    print(f"  b branches: {rep['b_branches']}")
    print(f"  c branches: {rep['c_branches']}")
    _write_json(args.output, rep)
    return EXIT_INFEASIBLE if rep["min_violation"] > 0 else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcells", description=__doc__)
    p.add_argument("--precision", type=int, default=_default_precision(),
                   help="working precision in decimal digits (env QCELLS_PRECISION)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cells=False):
        sp.add_argument("graph", help="catalog name or graph JSON path")
        if cells:
            sp.add_argument("--cells", required=True, help="cells JSON path")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("-o", "--output", default=None, help="write JSON report here")

    graphs = sub.add_parser("graphs", help="catalog operations")
    gsub = graphs.add_subparsers(dest="action", required=True)
    gsub.add_parser("list").set_defaults(func=cmd_graphs_list)

    graph = sub.add_parser("graph", help="inspect one graph")
    g2 = graph.add_subparsers(dest="action", required=True)
    show = g2.add_parser("show")
    common(show)
    show.set_defaults(func=cmd_graph_show)

    sp = sub.add_parser("solve", help="solve the coherence equations")
    common(sp)
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="verify a cell system")
    common(sp, cells=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("invariants", help="gauge invariants of a cell system")
    common(sp, cells=True)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("hecke", help="Hecke relation checks from a cell system")
    common(sp, cells=True)
    sp.add_argument("--pmax", type=int, default=4)
    sp.set_defaults(func=cmd_hecke)

    sp = sub.add_parser("fusion", help="fusion matrix tables")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--weight", default=None, help="l,m")
    sp.set_defaults(func=cmd_fusion)

    sp = sub.add_parser("nimrep", help="annular/module consistency check")
    common(sp)
    sp.set_defaults(func=cmd_nimrep)

    sp = sub.add_parser("certify-z9", help="analytic infeasibility certificate for Z9")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_certify_z9)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, MissingCell, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
