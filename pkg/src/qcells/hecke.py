"""Hecke-algebra representation data derived from a solved cell system.

Each adjacent vertex pair (a, c) with at least one edge c -> a carries a
rhombus matrix indexed by the length-2 paths a -> b -> c,

    U_{(b,alpha,beta),(b',alpha',beta')} =
        (1/(mu_a mu_c)) sum_gamma T_{abc}^{alpha beta gamma}
                                  conj(T_{ab'c}^{alpha' beta' gamma}),

hermitian with spectrum in {0, [2]}.  Applied at positions (n, n+1) of the
space of length-p edge paths it yields operators U_n satisfying the Hecke
relations with parameter [2] plus the quartic relation
(U3 U2 U1 - (U1 + U3)) (U2 U3 U2 - U2) = 0 special to this setting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cell_system import CellSystem
from .fusion_graph import FusionGraph
from .numerics import qint


class NotAdjacent(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


@dataclass
class RhombusMatrix:
    a: str
    c: str
    paths: list          # (b, alpha_eid, beta_eid) index set
    matrix: np.ndarray   # complex, len(paths) x len(paths)
    gamma_count: int

    def hermiticity_defect(self) -> float:
        if self.matrix.size == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def idempotency_defect(self, beta: float) -> float:
        if self.matrix.size == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix @ self.matrix - beta * self.matrix)))

    def trace_defect(self, beta: float) -> float:
        return float(abs(np.trace(self.matrix) - beta * self.gamma_count))


def rhombus_matrix(cells: CellSystem, a: str, c: str) -> RhombusMatrix:
    """The Hecke generator block for vertex pair (a, c); needs an edge c -> a."""
    g = cells.graph
    gammas = g.edges_between.get((c, a), [])
    if not gammas:
        raise NotAdjacent(f"no edge {c} -> {a}")
    dims = g.pf_dimensions()
    paths = []
    for e1 in g.out_edges[a]:
        for e2 in g.out_edges[e1.dst]:
            if e2.dst == c:
                paths.append((e1.dst, e1.eid, e2.eid))
    n = len(paths)
    M = np.zeros((n, n), dtype=complex)
    for i, (b, al, be) in enumerate(paths):
        for j, (bp, alp, bep) in enumerate(paths):
            s = 0j
            for gam in gammas:
                s += (cells.value(a, b, c, al, be, gam.eid)
                      * np.conj(cells.value(a, bp, c, alp, bep, gam.eid)))
            M[i, j] = s / (dims[a] * dims[c])
    return RhombusMatrix(a, c, paths, M, len(gammas))


class PathSpace:
    """Elementary paths of a fixed length on the fusion graph, orthonormal."""

    def __init__(self, graph: FusionGraph, length: int):
        if length < 1:
            raise ValueError("path length must be >= 1")
        self.graph = graph
        self.length = length
        paths = [()]
        for _ in range(length):
            nxt = []
            for pa in paths:
                start_vertices = [pa[-1][2]] if pa else graph.vertices
                for s in start_vertices:
                    for e in graph.out_edges[s]:
                        nxt.append(pa + ((e.eid, s, e.dst),))
            paths = nxt
        self.basis = paths
        self.index = {pa: i for i, pa in enumerate(paths)}

    @property
    def dimension(self) -> int:
        return len(self.basis)


def path_operator(cells: CellSystem, space: PathSpace, n: int) -> np.ndarray:
    """Matrix of U_n on the path space (positions are 1-indexed)."""
    if not 1 <= n <= space.length - 1:
        raise IndexOutOfRange(f"position {n} not in 1..{space.length - 1}")
    g = cells.graph
    N = space.dimension
    U = np.zeros((N, N), dtype=complex)
    cache = {}
    for i, pa in enumerate(space.basis):
        (al, a, b), (be, _, c) = pa[n - 1], pa[n]
        if (a, c) not in cache:
            if g.edges_between.get((c, a)):
                cache[(a, c)] = rhombus_matrix(cells, a, c)
            else:
                cache[(a, c)] = None
        rh = cache[(a, c)]
        if rh is None:
            continue
        k = rh.paths.index((b, al, be))
        for kp, (bp, alp, bep) in enumerate(rh.paths):
            qa = pa[:n - 1] + ((alp, a, bp), (bep, bp, c)) + pa[n + 1:]
            U[space.index[qa], i] += rh.matrix[kp, k]
    return U


def check_hecke_relations(cells: CellSystem, graph: FusionGraph, p_max: int = 4) -> dict:
    """Evaluate the defining relations on Path^p for p <= p_max.

    Violations are largest absolute entries of the relation residual matrices.
    The quartic SU(3) relation needs p >= 4.
    """
    if p_max < 4:
        raise ValueError("p_max must be >= 4 for the quartic relation")
    beta = float(qint(2, graph.context))
    q3 = float(qint(3, graph.context))
    report = {"graph": graph.name, "beta": beta, "violations": {}}

    def mx(A):
        return float(np.max(np.abs(A))) if A.size else 0.0

    rh_worst = {"hermitian": 0.0, "idempotent": 0.0, "trace": 0.0}
    for a in graph.vertices:
        for c in graph.vertices:
            if not graph.edges_between.get((c, a)):
                continue
            rh = rhombus_matrix(cells, a, c)
            rh_worst["hermitian"] = max(rh_worst["hermitian"], rh.hermiticity_defect())
            rh_worst["idempotent"] = max(rh_worst["idempotent"], rh.idempotency_defect(beta))
            rh_worst["trace"] = max(rh_worst["trace"], rh.trace_defect(beta))
    report["violations"]["rhombus"] = rh_worst

    ops = {}
    for p in range(2, p_max + 1):
        space = PathSpace(graph, p)
        ops[p] = [path_operator(cells, space, n) for n in range(1, p)]

    quad = max(mx(U @ U - beta * U) for p in ops for U in ops[p])
    report["violations"]["quadratic"] = quad

    far = 0.0
    for p in ops:
        Us = ops[p]
        for i in range(len(Us)):
            for j in range(i + 2, len(Us)):
                far = max(far, mx(Us[i] @ Us[j] - Us[j] @ Us[i]))
    report["violations"]["far_commutation"] = far

    cubic = 0.0
    for p in ops:
        Us = ops[p]
        for i in range(len(Us) - 1):
            Un, Um = Us[i], Us[i + 1]
            cubic = max(cubic, mx(Un @ Um @ Un - Un - (Um @ Un @ Um - Um)))
    report["violations"]["cubic"] = cubic

    if p_max >= 4:
        U1, U2, U3 = ops[4][0], ops[4][1], ops[4][2]
        quartic = mx((U3 @ U2 @ U1 - (U1 + U3)) @ (U2 @ U3 @ U2 - U2))
        report["violations"]["quartic"] = quartic

    if p_max >= 3:
        V1, V2 = ops[3][0], ops[3][1]
        F = V1 @ V2 @ V1 - V1
        report["violations"]["f_operator"] = mx(F @ F - beta * q3 * F)

    report["max_violation"] = max(
        v if isinstance(v, float) else max(v.values())
        for v in report["violations"].values())
    return report
