"""Built-in catalog of fusion graphs.

Names: ``A<k>`` (the level-k alcove graph, altitude k+3), ``A<k>-classical``
(the q = 1 alcove truncated at level k, used for the classical cell chain),
``E5``, ``E9``, ``E21``, ``Z9``.  Vertex names follow the published tables so
that solver output is directly comparable.
"""

from __future__ import annotations

import re

from .fusion_graph import Edge, FusionGraph, UnknownGraph
from .numerics import INFINITY, RootOfUnityContext


def _alcove_weights(level: int):
    return [(l, m) for n in range(level + 1) for l in range(n + 1) for m in (n - l,)]


def _wname(w) -> str:
    return f"({w[0]},{w[1]})"


def _alcove_graph(name, level, ctx, **kw) -> FusionGraph:
    ws = set(_alcove_weights(level))
    verts = [(_wname(w), (w[0] + 2 * w[1]) % 3) for w in sorted(ws)]
    edges = []
    for w in sorted(ws):
        l, m = w
        for t in ((l + 1, m), (l - 1, m + 1), (l, m - 1)):
            if t in ws:
                edges.append(Edge(f"e{len(edges)}", _wname(w), _wname(t)))
    return FusionGraph(name, ctx, verts, edges, "(0,0)", **kw)


def a_graph(level: int, precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """Fusion graph of the level-k alcove itself (module over its own ring)."""
    if level < 1:
        raise UnknownGraph("A_k requires k >= 1")
    ctx = RootOfUnityContext(level + 3, precision=precision, tolerance=tolerance)
    return _alcove_graph(f"A{level}", level, ctx)


def a_classical_graph(level: int, precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """Classical (q = 1) alcove truncated at the given level.

    Not a module graph by itself: the Perron-Frobenius check is skipped and an
    envelope one level larger marks which frames carry complete equations.
    """
    if level < 1:
        raise UnknownGraph("classical alcove requires level >= 1")
    ctx = RootOfUnityContext(INFINITY, precision=precision, tolerance=tolerance)
    envelope = _alcove_graph(f"A{level + 1}-classical-envelope", level + 1, ctx,
                             check_altitude=False)
    return _alcove_graph(f"A{level}-classical", level, ctx,
                         check_altitude=False, envelope=envelope)


def e5_graph(precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """The 12-vertex exceptional graph at level 5 (altitude 8)."""
    ctx = RootOfUnityContext(8, precision=precision, tolerance=tolerance)
    verts = [(f"1_{i}", i % 3) for i in range(6)] + [(f"2_{i}", i % 3) for i in range(6)]
    edges = []
    for i in range(6):
        edges.append(Edge(f"e{len(edges)}", f"1_{i}", f"2_{(i + 1) % 6}"))
        edges.append(Edge(f"e{len(edges)}", f"2_{i}", f"1_{(i + 4) % 6}"))
        edges.append(Edge(f"e{len(edges)}", f"2_{i}", f"2_{(i + 1) % 6}"))
        edges.append(Edge(f"e{len(edges)}", f"2_{i}", f"2_{(i + 4) % 6}"))
    # forced signs live on the two large inner triangles; nu_1 carries it
    preferred = [("2_1", "2_5", "2_3"), ("2_0", "2_4", "2_2")]
    return FusionGraph("E5", ctx, verts, edges, "1_0",
                       preferred_negative_cells=preferred)


def e9_graph(precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """The 12-vertex exceptional graph at level 9, with two double edges."""
    ctx = RootOfUnityContext(12, precision=precision, tolerance=tolerance)
    verts = ([(f"0^{j}", 0) for j in range(3)]
             + [(f"1^{j}", 1) for j in range(3)]
             + [(f"2^{j}", 2) for j in range(3)]
             + [("3_0", 0), ("3_1", 1), ("3_2", 2)])
    edges = []
    for j in range(3):
        edges += [
            Edge(f"e01^{j}", f"0^{j}", f"1^{j}"),
            Edge(f"e12^{j}", f"1^{j}", f"2^{j}"),
            Edge(f"e20^{j}", f"2^{j}", f"0^{j}"),
            Edge(f"e23^{j}", f"2^{j}", "3_0"),
            Edge(f"e31^{j}", "3_0", f"1^{j}"),
            Edge(f"e13^{j}", f"1^{j}", "3_2"),
            Edge(f"e32^{j}", "3_1", f"2^{j}"),
        ]
    edges += [
        Edge("alpha_1", "3_0", "3_1"),
        Edge("alpha_2", "3_0", "3_1"),
        Edge("beta_1", "3_2", "3_0"),
        Edge("beta_2", "3_2", "3_0"),
        Edge("e_3132", "3_1", "3_2"),
    ]
    return FusionGraph("E9", ctx, verts, edges, "0^0")


def e21_graph(precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """The 24-vertex exceptional graph at level 21 (altitude 24).

    Two six-vertex wings (Z2-symmetric) feed an inner block on the 4/5/6/7
    slices; the inner block contains three octahedra whose sign obstructions
    land on the two small {4_k, 4_{k+1}, 7} cells and one large one.
    """
    ctx = RootOfUnityContext(24, precision=precision, tolerance=tolerance)
    verts = []
    for k in (1, 2):
        verts += [(f"1_{k}", 0), (f"2_{k}^1", 1), (f"2_{k}^2", 2), (f"3_{k}", 0),
                  (f"3_{k}^1", 1), (f"3_{k}^2", 2), (f"4_{k}^1", 1), (f"4_{k}^2", 2),
                  (f"5_{k}^1", 1), (f"5_{k}^2", 2), (f"6_{k}", 0), (f"7_{k}", 0)]
    pairs = []
    for k in (1, 2):
        K = 3 - k
        pairs += [
            # wing k
            (f"1_{k}", f"2_{k}^1"), (f"2_{k}^1", f"2_{k}^2"), (f"2_{k}^2", f"1_{k}"),
            (f"2_{k}^2", f"3_{k}"), (f"3_{k}", f"2_{k}^1"), (f"2_{k}^1", f"3_{k}^2"),
            (f"3_{k}^2", f"3_{k}"), (f"3_{k}", f"3_{k}^1"), (f"3_{k}^1", f"2_{k}^2"),
            (f"3_{k}^1", f"4_{k}^2"), (f"4_{k}^2", f"3_{k}"), (f"3_{k}", f"4_{k}^1"),
            (f"4_{k}^1", f"3_{k}^2"),
            # wing-to-inner
            (f"4_{k}^1", f"4_{k}^2"), (f"4_{k}^2", f"6_{K}"), (f"6_{K}", f"3_{k}^1"),
            (f"3_{k}^2", f"6_{k}"), (f"6_{k}", f"4_{k}^1"),
            # inner block
            (f"4_{k}^1", f"4_{K}^2"), (f"4_{k}^2", "7_1"), (f"4_{k}^2", "7_2"),
            ("7_1", f"4_{k}^1"), ("7_2", f"4_{k}^1"),
            (f"4_{k}^1", f"5_{k}^2"), (f"5_{k}^2", f"6_{k}"), (f"5_{k}^1", f"4_{k}^2"),
            (f"6_{K}", f"5_{k}^1"), (f"5_{K}^1", f"5_{k}^2"), (f"5_{k}^2", f"7_{k}"),
            (f"7_{K}", f"5_{k}^1"),
        ]
    edges = [Edge(f"e{i}", a, b) for i, (a, b) in enumerate(pairs)]
    preferred = [
        ("4_1^1", "4_2^2", "7_1"),   # small sigma_2''
        ("4_2^1", "4_1^2", "7_2"),   # small sigma_2'
        ("4_2^1", "4_1^2", "7_1"),   # large rho''
        ("4_1^1", "4_2^2", "7_2"),   # large rho'
    ]
    return FusionGraph("E21", ctx, verts, edges, "1_1",
                       preferred_negative_cells=preferred)


def z9_graph(precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """The rejected level-9 candidate: a bona fide nimrep whose cell system
    has no solution."""
    ctx = RootOfUnityContext(12, precision=precision, tolerance=tolerance)
    verts = [(f"0_{i}", i) for i in range(3)]
    verts += [(f"3_{i}^{j}", i) for i in range(3) for j in range(1, 4)]
    edges = []
    for i in range(3):
        i1 = (i + 1) % 3
        edges.append(Edge(f"e{len(edges)}", f"0_{i}", f"0_{i1}"))
        for j in range(1, 4):
            edges.append(Edge(f"e{len(edges)}", f"0_{i}", f"3_{i1}^{j}"))
            edges.append(Edge(f"e{len(edges)}", f"3_{i}^{j}", f"0_{i1}"))
            edges.append(Edge(f"e{len(edges)}", f"3_{i}^{j}", f"3_{i1}^{j}"))
    return FusionGraph("Z9", ctx, verts, edges, "0_0")


_A_RE = re.compile(r"^A(\d+)(-classical)?$", re.IGNORECASE)


def builtin_graph(name: str, precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    """Fetch a catalog graph by name; raises UnknownGraph otherwise."""
    key = name.strip()
    fixed = {"E5": e5_graph, "E9": e9_graph, "E21": e21_graph, "Z9": z9_graph}
    for fname, fn in fixed.items():
        if key.upper() == fname:
            return fn(precision=precision, tolerance=tolerance)
    m = _A_RE.match(key)
    if m:
        level = int(m.group(1))
        if m.group(2):
            return a_classical_graph(level, precision=precision, tolerance=tolerance)
        return a_graph(level, precision=precision, tolerance=tolerance)
    raise UnknownGraph(f"no catalog graph named {name!r}")


def catalog_names(max_level: int = 6):
    names = [f"A{k}" for k in range(1, max_level + 1)]
    names += [f"A{k}-classical" for k in range(1, max_level + 1)]
    names += ["E5", "E9", "E21", "Z9"]
    return names
