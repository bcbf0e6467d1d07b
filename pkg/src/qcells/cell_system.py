"""Cell systems: complex values on oriented triangles, coherence residuals,
gauge transformations and gauge invariants.

The two residual families implemented here are the quadratic one,

    sum_{c,beta,gamma} T_{abc}^{alpha beta gamma} conj(T_{abc}^{alpha' beta gamma})
        - [2] delta_{alpha alpha'} mu_a mu_b,

over parallel-edge frames, and the quartic one over quadrilateral frames,

    sum_{c,beta_1..beta_4} (1/mu_c)
        T_{a1 a2 c}^{alpha1 beta2 beta1} conj(T_{a3 a2 c}^{alpha2 beta2 beta3})
        T_{a3 a4 c}^{alpha3 beta4 beta3} conj(T_{a1 a4 c}^{alpha4 beta4 beta1})
      - [a1][a2][a3] delta_{alpha1 alpha4} delta_{alpha2 alpha3}
      - [a1][a2][a4] delta_{alpha1 alpha2} delta_{alpha3 alpha4}.

Cells are stored once per canonical triangle rotation; conjugate-orientation
values are never stored, the formulas conjugate stored values explicitly.
"""

from __future__ import annotations

import json

import numpy as np

from .fusion_graph import (FusionGraph, OrientedTriangle, ParseError, TypeIFrame,
                           TypeIIFrame, canonical_rotation)
from .numerics import qint


class MissingCell(KeyError):
    pass


class ShapeMismatch(ValueError):
    pass


class UnsupportedGraph(ValueError):
    pass


class CellSystem:
    """Assignment of a complex number to every oriented triangle of a graph.

    Lookup is rotation-invariant: value(a,b,c,alpha,beta,gamma) returns the
    stored entry of the canonical rotation.
    """

    def __init__(self, graph: FusionGraph, values):
        self.graph = graph
        self._values = {}
        for key, val in values.items():
            if isinstance(key, OrientedTriangle):
                key = key.key
            self._values[canonical_rotation(key)] = complex(val)

    def __len__(self):
        return len(self._values)

    def items(self):
        return self._values.items()

    def triangle_value(self, tri: OrientedTriangle) -> complex:
        try:
            return self._values[tri.key]
        except KeyError:
            raise MissingCell(f"no cell stored for triangle {tri}")

    def value(self, a, b, c, alpha, beta, gamma) -> complex:
        key = canonical_rotation(((a, alpha), (b, beta), (c, gamma)))
        try:
            return self._values[key]
        except KeyError:
            raise MissingCell(f"no cell stored for ({a},{b},{c};{alpha},{beta},{gamma})")

    def covers_graph(self) -> bool:
        return all(t.key in self._values for t in self.graph.enumerate_triangles())

    def with_values(self, values) -> "CellSystem":
        return CellSystem(self.graph, values)

    def conjugated(self) -> "CellSystem":
        """Complex-conjugate every cell (maps solutions to solutions)."""
        return CellSystem(self.graph, {k: np.conj(v) for k, v in self._values.items()})


# -- residuals ---------------------------------------------------------------

def type1_residual(cells: CellSystem, frame: TypeIFrame) -> complex:
    g = cells.graph
    dims = g.pf_dimensions()
    total = 0j
    for (c, beta, gamma) in g._type1_apexes(frame):
        total += (cells.value(frame.a, frame.b, c, frame.alpha, beta, gamma)
                  * np.conj(cells.value(frame.a, frame.b, c, frame.alpha_prime, beta, gamma)))
    rhs = 0.0
    if frame.diagonal:
        rhs = float(qint(2, g.context)) * dims[frame.a] * dims[frame.b]
    return total - rhs


def type2_residual(cells: CellSystem, frame: TypeIIFrame) -> complex:
    g = cells.graph
    dims = g.pf_dimensions()
    total = 0j
    for (c, b1, b2, b3, b4) in g.apex_summands(frame):
        total += (cells.value(frame.a1, frame.a2, c, frame.alpha1, b2, b1)
                  * np.conj(cells.value(frame.a3, frame.a2, c, frame.alpha2, b2, b3))
                  * cells.value(frame.a3, frame.a4, c, frame.alpha3, b4, b3)
                  * np.conj(cells.value(frame.a1, frame.a4, c, frame.alpha4, b4, b1))
                  ) / dims[c]
    rhs = 0.0
    if frame.alpha1 == frame.alpha4 and frame.alpha2 == frame.alpha3:
        rhs += dims[frame.a1] * dims[frame.a2] * dims[frame.a3]
    if frame.alpha1 == frame.alpha2 and frame.alpha3 == frame.alpha4:
        rhs += dims[frame.a1] * dims[frame.a2] * dims[frame.a4]
    return total - rhs


class ResidualTables:
    """Vectorized index tables for evaluating every residual of a graph.

    Built once per graph; evaluation is a handful of numpy gathers per frame,
    cheap enough for 100-gauge property sweeps and solver inner loops.
    """

    def __init__(self, graph: FusionGraph, complete_only: bool = False):
        self.graph = graph
        dims = graph.pf_dimensions()
        tris = graph.enumerate_triangles()
        self.triangles = tris
        self.tindex = {t.key: i for i, t in enumerate(tris)}
        q2 = float(qint(2, graph.context))

        self.t1_frames, self.t1 = [], []
        for fr in graph.enumerate_type1_frames():
            if complete_only and not graph.is_frame_complete(fr):
                continue
            ii, jj = [], []
            for (c, beta, gamma) in graph._type1_apexes(fr):
                ii.append(self.tindex[canonical_rotation(
                    ((fr.a, fr.alpha), (fr.b, beta), (c, gamma)))])
                jj.append(self.tindex[canonical_rotation(
                    ((fr.a, fr.alpha_prime), (fr.b, beta), (c, gamma)))])
            rhs = q2 * dims[fr.a] * dims[fr.b] if fr.diagonal else 0.0
            self.t1_frames.append(fr)
            self.t1.append((np.asarray(ii, dtype=int), np.asarray(jj, dtype=int), rhs))

        self.t2_frames, self.t2 = [], []
        for fr in graph.enumerate_type2_frames():
            if complete_only and not graph.is_frame_complete(fr):
                continue
            ws, i1, i2, i3, i4 = [], [], [], [], []
            for (c, b1, b2, b3, b4) in graph.apex_summands(fr):
                ws.append(1.0 / dims[c])
                i1.append(self.tindex[canonical_rotation(((fr.a1, fr.alpha1), (fr.a2, b2), (c, b1)))])
                i2.append(self.tindex[canonical_rotation(((fr.a3, fr.alpha2), (fr.a2, b2), (c, b3)))])
                i3.append(self.tindex[canonical_rotation(((fr.a3, fr.alpha3), (fr.a4, b4), (c, b3)))])
                i4.append(self.tindex[canonical_rotation(((fr.a1, fr.alpha4), (fr.a4, b4), (c, b1)))])
            rhs = 0.0
            if fr.alpha1 == fr.alpha4 and fr.alpha2 == fr.alpha3:
                rhs += dims[fr.a1] * dims[fr.a2] * dims[fr.a3]
            if fr.alpha1 == fr.alpha2 and fr.alpha3 == fr.alpha4:
                rhs += dims[fr.a1] * dims[fr.a2] * dims[fr.a4]
            self.t2_frames.append(fr)
            self.t2.append((np.asarray(ws), np.asarray(i1, dtype=int), np.asarray(i2, dtype=int),
                            np.asarray(i3, dtype=int), np.asarray(i4, dtype=int), rhs))

    def cell_vector(self, cells: CellSystem) -> np.ndarray:
        return np.array([cells.triangle_value(t) for t in self.triangles], dtype=complex)

    def residual_vector(self, T: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.t1) + len(self.t2), dtype=complex)
        k = 0
        for ii, jj, rhs in self.t1:
            out[k] = np.sum(T[ii] * np.conj(T[jj])) - rhs
            k += 1
        for ws, i1, i2, i3, i4, rhs in self.t2:
            out[k] = np.sum(ws * T[i1] * np.conj(T[i2]) * T[i3] * np.conj(T[i4])) - rhs
            k += 1
        return out

    def max_residual(self, cells: CellSystem) -> float:
        return float(np.max(np.abs(self.residual_vector(self.cell_vector(cells)))))


# -- gauge -------------------------------------------------------------------

class GaugeChoice:
    """A unitary U^{ab} of size s_ab x s_ab for each ordered adjacent pair."""

    def __init__(self, graph: FusionGraph, matrices: dict):
        self.graph = graph
        self.matrices = {}
        for (a, b), es in graph.edges_between.items():
            U = matrices.get((a, b))
            if U is None:
                U = np.eye(len(es))
            U = np.asarray(U, dtype=complex)
            if U.shape != (len(es), len(es)):
                raise ShapeMismatch(f"gauge for ({a},{b}) must be {len(es)}x{len(es)}")
            if np.max(np.abs(U.conj().T @ U - np.eye(len(es)))) > 1e-9:
                raise ShapeMismatch(f"gauge for ({a},{b}) is not unitary")
            self.matrices[(a, b)] = U

    @classmethod
    def identity(cls, graph: FusionGraph) -> "GaugeChoice":
        return cls(graph, {})

    @classmethod
    def random(cls, graph: FusionGraph, rng) -> "GaugeChoice":
        mats = {}
        for (a, b), es in graph.edges_between.items():
            n = len(es)
            z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            q, r = np.linalg.qr(z)
            mats[(a, b)] = q * (np.diag(r) / np.abs(np.diag(r)))
        return cls(graph, mats)

    @classmethod
    def edge_phases(cls, graph: FusionGraph, phases: dict) -> "GaugeChoice":
        """Diagonal gauge from per-edge phases (radians)."""
        mats = {}
        for (a, b), es in graph.edges_between.items():
            mats[(a, b)] = np.diag([np.exp(1j * phases.get(e.eid, 0.0)) for e in es])
        return cls(graph, mats)


def apply_gauge(cells: CellSystem, gauge: GaugeChoice) -> CellSystem:
    """T'_{abc}^{a'b'g'} = sum T_{abc}^{abg} U^{ab}_{a'a} U^{bc}_{b'b} U^{ca}_{g'g}."""
    g = cells.graph
    if gauge.graph is not g and gauge.graph.name != g.name:
        raise ShapeMismatch("gauge built for a different graph")
    pos = {}
    for (a, b), es in g.edges_between.items():
        for i, e in enumerate(es):
            pos[e.eid] = i
    new = {}
    for t in g.enumerate_triangles():
        (a, _), (b, _), (c, _) = t.key
        Uab = gauge.matrices[(a, b)]
        Ubc = gauge.matrices[(b, c)]
        Uca = gauge.matrices[(c, a)]
        eab = g.edges_between[(a, b)]
        ebc = g.edges_between[(b, c)]
        eca = g.edges_between[(c, a)]
        (_, alp), (_, bep), (_, gap) = t.key
        total = 0j
        for ea in eab:
            for eb in ebc:
                for ec in eca:
                    total += (cells.value(a, b, c, ea.eid, eb.eid, ec.eid)
                              * Uab[pos[alp], pos[ea.eid]]
                              * Ubc[pos[bep], pos[eb.eid]]
                              * Uca[pos[gap], pos[ec.eid]])
        new[t.key] = total
    return CellSystem(g, new)


# -- invariants ---------------------------------------------------------------

def _single_edged(graph: FusionGraph) -> bool:
    return all(len(es) == 1 for es in graph.edges_between.values())


def _e5_octahedron_product(cells: CellSystem) -> complex:
    """Alternating-conjugate product over the eight inner-octahedron cells.

    Gauge invariant; on the canonical real solution it equals the plain
    product mu^6 nu_0 nu_1 of the published table.
    """
    g = cells.graph

    def tri(i, j, k):
        return cells.value(f"2_{i}", f"2_{j}", f"2_{k}",
                           g.edges_between[(f"2_{i}", f"2_{j}")][0].eid,
                           g.edges_between[(f"2_{j}", f"2_{k}")][0].eid,
                           g.edges_between[(f"2_{k}", f"2_{i}")][0].eid)

    mus = [tri(i, (i + 1) % 6, (i + 2) % 6) for i in range(6)]
    nu0 = tri(0, 4, 2)
    nu1 = tri(1, 5, 3)
    prod = nu0 * np.conj(nu1)
    for i, m in enumerate(mus):
        prod *= m if i % 2 == 0 else np.conj(m)
    return prod


def _e9_vectors(cells: CellSystem):
    g = cells.graph
    c = [np.array([cells.value("3_0", "3_1", f"2^{j}", f"alpha_{k}",
                               f"e32^{j}", f"e23^{j}") for k in (1, 2)])
         for j in range(3)]
    d = [np.array([cells.value("3_2", "3_0", f"1^{j}", f"beta_{l}",
                               f"e31^{j}", f"e13^{j}") for l in (1, 2)])
         for j in range(3)]
    M = np.array([[cells.value("3_1", "3_2", "3_0", "e_3132", f"beta_{k}", f"alpha_{l}")
                   for l in (1, 2)] for k in (1, 2)])
    return c, d, M


def _vec_invariants(vs):
    norms = [float(np.vdot(v, v).real) for v in vs]
    cross = [float(abs(np.vdot(vs[i], vs[j])) ** 2)
             for i, j in ((0, 1), (1, 2), (2, 0))]
    triple = complex(np.vdot(vs[0], vs[1]) * np.vdot(vs[1], vs[2]) * np.vdot(vs[2], vs[0]))
    return {"norms": norms, "cross_moduli_sq": cross, "triple_product": triple}


def gauge_invariants(cells: CellSystem) -> dict:
    """Documented gauge invariants of the cell system.

    Always includes per-triangle moduli for single-edge graphs; adds the
    octahedron product for E5 and the Det/Tr/vector family for E9.
    """
    g = cells.graph
    report = {"graph": g.name}
    if _single_edged(g):
        report["moduli"] = {str(t): float(abs(cells.triangle_value(t)))
                            for t in g.enumerate_triangles()}
    if g.name == "E5":
        report["octahedron_product"] = complex(_e5_octahedron_product(cells))
    elif g.name == "E9":
        c, d, M = _e9_vectors(cells)
        MM = M.conj().T @ M
        report["det_MdagM"] = float(np.linalg.det(MM).real)
        report["tr_MdagM"] = float(np.trace(MM).real)
        report["c"] = _vec_invariants(c)
        report["d"] = _vec_invariants(d)
    elif not _single_edged(g):
        raise UnsupportedGraph(
            f"no documented invariant family for multi-edge graph {g.name!r}")
    return report


# -- file format ---------------------------------------------------------------

def serialize_cells(cells: CellSystem) -> bytes:
    rows = []
    for key, val in sorted(cells.items()):
        (a, al), (b, be), (c, ga) = key
        rows.append({"a": a, "b": b, "c": c, "alpha": al, "beta": be, "gamma": ga,
                     "re": val.real, "im": val.imag})
    doc = {"graph": cells.graph.name, "cells": rows}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def parse_cells(data: bytes, graph: FusionGraph) -> CellSystem:
    try:
        doc = json.loads(data.decode("utf-8"))
        rows = doc["cells"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"not a valid cells file: {exc}") from exc
    values = {}
    for r in rows:
        try:
            key = ((r["a"], r["alpha"]), (r["b"], r["beta"]), (r["c"], r["gamma"]))
            values[key] = complex(r["re"], r.get("im", 0.0))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed cell row {r!r}: {exc}") from exc
    return CellSystem(graph, values)
