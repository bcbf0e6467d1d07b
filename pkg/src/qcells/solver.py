"""Assemble and solve the coherence system.

Single-edge graphs go through two stages mirroring the structure of the
equations: a moduli stage (squared moduli from the diagonal quadratic frames
plus the degenerate quartic frames, solved as a bounded nonlinear least-squares
problem with random restarts) and a phase stage (gauge reduction to the few
non-gaugeable phase directions, then a tiny angular least-squares).  Graphs
with multiple edges couple moduli and phases through off-diagonal hermitian
blocks, so they are solved jointly over all complex cells.

Every restart is seeded deterministically from the report seed; reduction is
by best residual with ties broken by restart index.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import least_squares

from .cell_system import (CellSystem, MissingCell, ResidualTables, gauge_invariants)
from .fusion_graph import FusionGraph, OrientedTriangle, canonical_rotation
from .numerics import qint

SOLVED = "SOLVED"
INFEASIBLE = "INFEASIBLE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class SolverOptions:
    restarts: int = 64
    seed: int = 0
    tol_solve: float = 1e-9
    theta_inf: float = 1e-4
    max_nfev: int = 4000

    def rng(self, index: int):
        return np.random.default_rng((self.seed, index))


@dataclass
class ModuliSolution:
    graph: FusionGraph
    status: str
    values: dict                  # canonical triangle key -> squared modulus
    best_residual: float
    restarts: int
    seed: int
    branches: list = field(default_factory=list)
    note: str = ""


@dataclass
class SolveReport:
    graph: FusionGraph
    status: str
    cells: CellSystem | None
    max_residual: float
    restarts: int
    seed: int
    invariants: dict = field(default_factory=dict)
    note: str = ""

    def as_dict(self) -> dict:
        doc = {
            "graph": self.graph.name,
            "status": self.status,
            "max_residual": self.max_residual,
            "restarts": self.restarts,
            "seed": self.seed,
            "invariants": _jsonify(self.invariants),
            "note": self.note,
            "cells": [],
        }
        if self.cells is not None:
            for key, val in sorted(self.cells.items()):
                (a, al), (b, be), (c, ga) = key
                doc["cells"].append({"a": a, "b": b, "c": c,
                                     "alpha": al, "beta": be, "gamma": ga,
                                     "re": val.real, "im": val.imag})
        return doc

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _single_edged(graph: FusionGraph) -> bool:
    return all(len(es) == 1 for es in graph.edges_between.values())


# -- moduli stage -------------------------------------------------------------

class _ModuliSystem:
    """Residuals over x = squared moduli, single-edge graphs only."""

    def __init__(self, graph: FusionGraph):
        dims = graph.pf_dimensions()
        q2 = float(qint(2, graph.context))
        tris = graph.enumerate_triangles()
        self.triangles = tris
        tindex = {t.key: i for i, t in enumerate(tris)}

        def tri(a, b, c):
            ab = graph.edges_between[(a, b)][0].eid
            bc = graph.edges_between[(b, c)][0].eid
            ca = graph.edges_between[(c, a)][0].eid
            return tindex[canonical_rotation(((a, ab), (b, bc), (c, ca)))]

        self.lin, self.quad, self.bil = [], [], []
        for fr in graph.enumerate_type1_frames():
            if not graph.is_frame_complete(fr):
                continue
            idxs = [tri(fr.a, fr.b, c) for (c, _, _) in graph._type1_apexes(fr)]
            self.lin.append((np.asarray(idxs, dtype=int), q2 * dims[fr.a] * dims[fr.b]))
        for fr in graph.enumerate_type2_frames():
            if fr.degeneracy == "none" or not graph.is_frame_complete(fr):
                continue
            ws = np.asarray([1.0 / dims[c] for (c, *_ ) in graph.apex_summands(fr)])
            cs = [c for (c, *_ ) in graph.apex_summands(fr)]
            if fr.degeneracy == "doubly":
                ii = np.asarray([tri(fr.a1, fr.a2, c) for c in cs], dtype=int)
                rhs = dims[fr.a1] ** 2 * dims[fr.a2] + dims[fr.a1] * dims[fr.a2] ** 2
                self.quad.append((ws, ii, rhs))
            elif fr.a1 == fr.a3:
                ii = np.asarray([tri(fr.a1, fr.a2, c) for c in cs], dtype=int)
                jj = np.asarray([tri(fr.a1, fr.a4, c) for c in cs], dtype=int)
                self.bil.append((ws, ii, jj, dims[fr.a1] * dims[fr.a2] * dims[fr.a4]))
            else:
                ii = np.asarray([tri(fr.a1, fr.a2, c) for c in cs], dtype=int)
                jj = np.asarray([tri(fr.a3, fr.a2, c) for c in cs], dtype=int)
                self.bil.append((ws, ii, jj, dims[fr.a1] * dims[fr.a2] * dims[fr.a3]))
        self.size = len(self.lin) + len(self.quad) + len(self.bil)
        self.scale = max((rhs for _, rhs in self.lin), default=1.0)

    def residual(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(self.size)
        k = 0
        for idxs, rhs in self.lin:
            out[k] = x[idxs].sum() - rhs
            k += 1
        for ws, ii, rhs in self.quad:
            out[k] = np.sum(ws * x[ii] ** 2) - rhs
            k += 1
        for ws, ii, jj, rhs in self.bil:
            out[k] = np.sum(ws * x[ii] * x[jj]) - rhs
            k += 1
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        J = np.zeros((self.size, len(self.triangles)))
        k = 0
        for idxs, _ in self.lin:
            np.add.at(J[k], idxs, 1.0)
            k += 1
        for ws, ii, _ in self.quad:
            np.add.at(J[k], ii, 2.0 * ws * x[ii])
            k += 1
        for ws, ii, jj, _ in self.bil:
            np.add.at(J[k], ii, ws * x[jj])
            np.add.at(J[k], jj, ws * x[ii])
            k += 1
        return J


def solve_moduli(graph: FusionGraph, options: SolverOptions | None = None) -> ModuliSolution:
    """Non-negative solution of the moduli subsystem, with random restarts.

    Multi-edge graphs couple moduli to phases through the hermitian Type I
    blocks; for those this stage defers to the joint solve and returns
    INCONCLUSIVE on its own.
    """
    options = options or SolverOptions()
    if not _single_edged(graph):
        return ModuliSolution(graph, INCONCLUSIVE, {}, float("inf"),
                              0, options.seed,
                              note="multi-edge graph: moduli couple to phases; use solve()")
    sys = _ModuliSystem(graph)
    nt = len(sys.triangles)
    if nt == 0:
        status = SOLVED if not sys.lin else INFEASIBLE
        return ModuliSolution(graph, status, {}, 0.0 if status == SOLVED else float("inf"),
                              0, options.seed)
    best_r, best_x, branches = np.inf, None, []
    for it in range(options.restarts):
        rng = options.rng(it)
        x0 = rng.uniform(0.05, 1.0, nt) * sys.scale / 2
        sol = least_squares(sys.residual, x0, jac=sys.jacobian, bounds=(0.0, np.inf),
                            method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=options.max_nfev)
        r = float(np.max(np.abs(sys.residual(sol.x))))
        if r < best_r:
            best_r, best_x = r, sol.x
        if r < options.tol_solve:
            key = tuple(np.round(sol.x, 6))
            if key not in {tuple(np.round(b, 6)) for b in branches}:
                branches.append(sol.x.copy())
    if best_r < options.tol_solve:
        status = SOLVED
    elif best_r > options.theta_inf:
        status = INFEASIBLE
    else:
        status = INCONCLUSIVE
    values = {}
    if best_x is not None:
        values = {t.key: float(v) for t, v in zip(sys.triangles, np.maximum(best_x, 0.0))}
    return ModuliSolution(graph, status, values, best_r, options.restarts,
                          options.seed, branches=branches)


# -- phase stage ---------------------------------------------------------------

def _incidence(graph: FusionGraph, triangles):
    eindex = {e.eid: i for i, e in enumerate(graph.edges)}
    A = np.zeros((len(triangles), len(graph.edges)), dtype=int)
    for r, t in enumerate(triangles):
        for eid in t.edge_ids:
            A[r, eindex[eid]] += 1
    return A


def _greedy_independent_rows(A: np.ndarray):
    """Exact greedy row-independence scan (fraction-free elimination)."""
    rows = []  # reduced pivot rows as Fraction lists
    pivots = []
    independent = []
    ncols = A.shape[1]
    for r in range(A.shape[0]):
        v = [Fraction(int(x)) for x in A[r]]
        for prow, pc in zip(rows, pivots):
            if v[pc]:
                f = v[pc] / prow[pc]
                v = [a - f * b for a, b in zip(v, prow)]
        pc = next((j for j in range(ncols) if v[j]), None)
        if pc is None:
            independent.append(False)
        else:
            independent.append(True)
            rows.append(v)
            pivots.append(pc)
    return np.asarray(independent, dtype=bool)


def _solve_gf2(B: np.ndarray, rhs: np.ndarray):
    """One solution x of B x = rhs over GF(2), or None."""
    nrows, ncols = B.shape
    rows = []
    for r in range(nrows):
        bits = 0
        for j in range(ncols):
            if B[r, j] & 1:
                bits |= 1 << j
        rows.append((bits, int(rhs[r]) & 1))
    pivots = {}
    reduced = []
    for bits, b in rows:
        for pbits, pb, pcol in reduced:
            if bits >> pcol & 1:
                bits ^= pbits
                b ^= pb
        if bits == 0:
            if b:
                return None
            continue
        pcol = bits.bit_length() - 1
        reduced.append((bits, b, pcol))
    x = np.zeros(ncols, dtype=int)
    for bits, b, pcol in sorted(reduced, key=lambda t: -t[2]):
        acc = b
        for j in range(ncols):
            if j != pcol and (bits >> j & 1) and x[j]:
                acc ^= 1
        x[pcol] = acc
    # verify (cheap; guards against pivot ordering slips)
    if np.any((B @ x) % 2 != rhs % 2):
        return None
    return x


def _preferred_triangles(graph: FusionGraph, triangles):
    """Resolve catalog sign-carrier hints (vertex cycles) to triangle indices."""
    out = []
    lookup = {}
    for i, t in enumerate(triangles):
        for k in range(3):
            lookup[tuple(v for v, _ in t.rotated(k))] = i
    for cyc in graph.preferred_negative_cells:
        if tuple(cyc) in lookup:
            out.append(lookup[tuple(cyc)])
    return out


def _relocate_signs(graph: FusionGraph, triangles, signs: np.ndarray):
    """Move negative signs onto the catalog's preferred carriers, if a gauge
    sign flip (GF(2) edge-phase choice) achieves it.  Returns new sign vector."""
    neg = np.where(signs < 0)[0]
    prefs = _preferred_triangles(graph, triangles)
    if len(neg) == 0 or not prefs:
        return signs
    B = _incidence(graph, triangles) % 2
    cur = np.zeros(len(triangles), dtype=int)
    cur[neg] = 1
    for combo in itertools.combinations(prefs, len(neg)):
        target = np.zeros(len(triangles), dtype=int)
        target[list(combo)] = 1
        x = _solve_gf2(B, (cur + target) % 2)
        if x is not None:
            new = signs.copy()
            flips = (B @ x) % 2
            new[flips == 1] *= -1
            return new
    return signs


def solve_phases(graph: FusionGraph, moduli: ModuliSolution,
                 options: SolverOptions | None = None) -> SolveReport:
    """Fix phases of a single-edge cell system on top of solved moduli.

    A maximal gauge-fixable set of triangles (greedy in canonical order) is
    pinned real positive; the remaining phase directions, one per incidence
    dependency, are solved from the quartic residuals by least squares with
    restarts, then signs are relocated onto the catalog's preferred carriers.
    """
    options = options or SolverOptions()
    if moduli.status != SOLVED:
        return SolveReport(graph, moduli.status, None, moduli.best_residual,
                           moduli.restarts, options.seed, note="moduli stage failed")
    tables = ResidualTables(graph, complete_only=graph.envelope is not None)
    tris = tables.triangles
    mods = np.sqrt(np.asarray([max(moduli.values[t.key], 0.0) for t in tris]))

    A = _incidence(graph, tris)
    indep = _greedy_independent_rows(A)
    free = np.where(~indep)[0]

    def cellvec(theta_free):
        theta = np.zeros(len(tris))
        theta[free] = theta_free
        return mods * np.exp(1j * theta)

    if len(free) == 0:
        best_theta = np.zeros(0)
        best_r = float(np.max(np.abs(tables.residual_vector(cellvec(best_theta)))))
    else:
        def fun(th):
            r = tables.residual_vector(cellvec(th))
            return np.concatenate([r.real, r.imag])
        best_r, best_theta = np.inf, None
        for it in range(max(8, min(options.restarts, 32))):
            rng = options.rng(10_000 + it)
            th0 = rng.uniform(0.0, 2 * np.pi, len(free))
            sol = least_squares(fun, th0, method="lm", xtol=1e-15, ftol=1e-15,
                                max_nfev=2000)
            r = float(np.max(np.abs(fun(sol.x))))
            if r < best_r:
                best_r, best_theta = r, sol.x
            if r < options.tol_solve / 10:
                break
    T = cellvec(best_theta)

    # canonical signs: if the solution is real, push negatives onto carriers
    if np.max(np.abs(T.imag)) < options.tol_solve:
        signs = np.where(T.real < 0, -1.0, 1.0)
        signs = _relocate_signs(graph, tris, signs)
        T = mods * signs
    best_r = float(np.max(np.abs(tables.residual_vector(T))))

    if best_r < options.tol_solve:
        status = SOLVED
    elif best_r > options.theta_inf:
        status = INFEASIBLE
    else:
        status = INCONCLUSIVE
    cells = CellSystem(graph, {t.key: v for t, v in zip(tris, T)})
    inv = gauge_invariants(cells) if status == SOLVED else {}
    return SolveReport(graph, status, cells, best_r, moduli.restarts,
                       options.seed, invariants=inv)


# -- joint solve (multi-edge) ----------------------------------------------------

def _joint_solve(graph: FusionGraph, options: SolverOptions) -> SolveReport:
    tables = ResidualTables(graph)
    nt = len(tables.triangles)

    def fun(z):
        T = z[:nt] + 1j * z[nt:]
        r = tables.residual_vector(T)
        return np.concatenate([r.real, r.imag])

    scale = np.sqrt(np.mean([rhs for *_, rhs in tables.t1 if rhs > 0]))
    best_r, best_z = np.inf, None
    used = 0
    for it in range(options.restarts):
        used += 1
        rng = options.rng(it)
        mod = rng.uniform(0.3, 1.2, nt) * scale
        ph = rng.uniform(0.0, 2 * np.pi, nt)
        z0 = np.concatenate([mod * np.cos(ph), mod * np.sin(ph)])
        sol = least_squares(fun, z0, method="trf", xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, max_nfev=options.max_nfev)
        r = float(np.max(np.abs(fun(sol.x))))
        if r < best_r:
            best_r, best_z = r, sol.x
        if r < options.tol_solve / 10:
            break
    T = best_z[:nt] + 1j * best_z[nt:]
    cells = CellSystem(graph, {t.key: v for t, v in zip(tables.triangles, T)})
    if best_r < options.tol_solve:
        status = SOLVED
    elif best_r > options.theta_inf:
        status = INFEASIBLE
    else:
        status = INCONCLUSIVE
    inv = {}
    if status == SOLVED:
        inv = gauge_invariants(cells)
        tp = inv.get("c", {}).get("triple_product")
        if tp is not None and tp.imag < 0:
            cells = cells.conjugated()
            inv = gauge_invariants(cells)
    return SolveReport(graph, status, cells, best_r, used, options.seed, invariants=inv)


def solve(graph: FusionGraph, options: SolverOptions | None = None) -> SolveReport:
    """Solve the full coherence system for a fusion graph."""
    options = options or SolverOptions()
    if not graph.enumerate_triangles():
        frames = [f for f in graph.enumerate_type1_frames() if graph.is_frame_complete(f)]
        if not frames:
            return SolveReport(graph, SOLVED, CellSystem(graph, {}), 0.0, 0, options.seed)
        return SolveReport(graph, INFEASIBLE, None, float("inf"), 0, options.seed,
                           note="edges without triangles cannot satisfy the quadratic frames")
    if _single_edged(graph):
        moduli = solve_moduli(graph, options)
        return solve_phases(graph, moduli, options)
    return _joint_solve(graph, options)


# -- verification ------------------------------------------------------------------

@dataclass
class VerifyReport:
    graph_name: str
    passed: bool
    max_residual: float
    tolerance: float
    worst_frames: list
    type1_count: int
    type2_count: int

    def __str__(self):
        word = "PASS" if self.passed else "FAIL"
        return (f"{self.graph_name}: verify {word} "
                f"(max residual {self.max_residual:.3e}, tolerance {self.tolerance:.1e}, "
                f"{self.type1_count} quadratic + {self.type2_count} quartic frames)")

    def as_dict(self):
        return {"graph": self.graph_name, "status": "PASS" if self.passed else "FAIL",
                "max_residual": self.max_residual, "tolerance": self.tolerance,
                "worst_frames": [[str(f), r] for f, r in self.worst_frames[:5]]}


def verify(graph: FusionGraph, cells: CellSystem, tolerance: float = 1e-9) -> VerifyReport:
    """Max and per-frame residuals over all frames; PASS iff max < tolerance."""
    if not cells.covers_graph():
        raise MissingCell("cell system does not cover every triangle of the graph")
    tables = ResidualTables(graph, complete_only=graph.envelope is not None)
    r = np.abs(tables.residual_vector(tables.cell_vector(cells)))
    frames = list(tables.t1_frames) + list(tables.t2_frames)
    order = np.argsort(-r)
    worst = [(frames[i], float(r[i])) for i in order[:10]]
    mx = float(r.max()) if len(r) else 0.0
    return VerifyReport(graph.name, mx < tolerance, mx, tolerance, worst,
                        len(tables.t1_frames), len(tables.t2_frames))


# -- analytic Z9 certificate ---------------------------------------------------------

def certify_infeasible_z9(precision: int = 30) -> dict:
    """Reproduce the analytic contradiction for the Z9 candidate graph.

    The quadratic/quartic pair on the (0_1, 3_2^j) edges forces
    b_j = (3*sqrt2 +- (3 - sqrt3))/6 and c_j = (sqrt6 -+ (3 - sqrt3))/6; the
    pair on the (0_0, 0_1) edge then requires a = sqrt(2+sqrt3) - sum(b_j)
    and a^2 + sqrt3 * sum(b_j^2) = 2 simultaneously.  The minimum violation
    over all 8 branch assignments is strictly positive.
    """
    with mpmath.workdps(precision):
        s2, s3, s6 = mpmath.sqrt(2), mpmath.sqrt(3), mpmath.sqrt(6)
        b_plus = (3 * s2 + (3 - s3)) / 6
        b_minus = (3 * s2 - (3 - s3)) / 6
        c_plus = (s6 - (3 - s3)) / 6
        c_minus = (s6 + (3 - s3)) / 6
        # sanity: both branches satisfy the edge equations they came from
        edge_rhs = mpmath.sqrt((2 + s3) / 3)
        quart_rhs = (1 + s3) / 3
        for b, c in ((b_plus, c_plus), (b_minus, c_minus)):
            assert mpmath.almosteq(b + c, edge_rhs, rel_eps=0, abs_eps=mpmath.mpf(10) ** (5 - precision))
            assert mpmath.almosteq(b ** 2 + s3 * c ** 2, quart_rhs, rel_eps=0,
                                   abs_eps=mpmath.mpf(10) ** (5 - precision))
        best = None
        assignments = []
        for signs in itertools.product((0, 1), repeat=3):
            bs = [b_plus if s else b_minus for s in signs]
            a = mpmath.sqrt(2 + s3) - sum(bs)
            violation = abs(a ** 2 + s3 * sum(b ** 2 for b in bs) - 2)
            if a < 0:
                # a is a squared modulus; a negative value is itself a violation
                violation = max(violation, abs(a))
            assignments.append({"signs": signs, "a": float(a), "violation": float(violation)})
            if best is None or violation < best:
                best = violation
        return {
            "status": INFEASIBLE,
            "precision": precision,
            "b_branches": [float(b_plus), float(b_minus)],
            "c_branches": [float(c_plus), float(c_minus)],
            "min_violation": float(best),
            "assignments": assignments,
        }
