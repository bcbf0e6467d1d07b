"""Fusion-graph data model: vertices, labeled oriented multi-edges,
Perron-Frobenius dimensions, triangle and frame enumeration, JSON format.

A fusion graph is the Cayley graph of the fundamental generator acting on the
simple objects of a module; its adjacency matrix G must have Perron-Frobenius
eigenvalue [3] at the graph's altitude.  Oriented triangles of the graph are
the carriers of cell values; Type I frames (parallel-edge pairs) and Type II
frames (quadrilaterals with apex summands) index the coherence equations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .numerics import INFINITY, RootOfUnityContext, qint


class GraphError(Exception):
    pass


class ParseError(GraphError):
    pass


class ValidationError(GraphError):
    pass


class UnknownGraph(GraphError):
    pass


class NotConnected(GraphError):
    pass


class AltitudeMismatch(GraphError):
    """PF eigenvalue of G is not [3] at the declared altitude."""


@dataclass(frozen=True)
class Edge:
    eid: str
    src: str
    dst: str


# An oriented triangle is stored as its canonical rotation of
# ((a, alpha), (b, beta), (c, gamma)): edges a->b, b->c, c->a.
TriangleKey = tuple


def canonical_rotation(tri: TriangleKey) -> TriangleKey:
    rots = (tri, tri[1:] + tri[:1], tri[2:] + tri[:2])
    return min(rots)


@dataclass(frozen=True)
class OrientedTriangle:
    """Cyclic vertex triple with edge ids, stored in canonical rotation."""

    key: TriangleKey

    @classmethod
    def make(cls, a, alpha, b, beta, c, gamma) -> "OrientedTriangle":
        return cls(canonical_rotation(((a, alpha), (b, beta), (c, gamma))))

    @property
    def vertices(self):
        return tuple(v for v, _ in self.key)

    @property
    def edge_ids(self):
        return tuple(e for _, e in self.key)

    def rotated(self, k: int) -> TriangleKey:
        k %= 3
        return self.key[k:] + self.key[:k]

    def __str__(self):
        return "(" + ", ".join(f"{v}[{e}]" for v, e in self.key) + ")"


@dataclass(frozen=True)
class TypeIFrame:
    """Ordered vertex pair (a, b) with an ordered pair of parallel edges."""

    a: str
    b: str
    alpha: str
    alpha_prime: str

    @property
    def diagonal(self) -> bool:
        return self.alpha == self.alpha_prime


@dataclass(frozen=True)
class TypeIIFrame:
    """Quadrilateral frame: edges a1->a2 (alpha1), a3->a2 (alpha2),
    a3->a4 (alpha3), a1->a4 (alpha4)."""

    a1: str
    a2: str
    a3: str
    a4: str
    alpha1: str
    alpha2: str
    alpha3: str
    alpha4: str

    @property
    def degeneracy(self) -> str:
        dd = self.a1 == self.a3
        rr = self.a2 == self.a4
        if dd and rr:
            return "doubly"
        if dd or rr:
            return "singly"
        return "none"


class DimensionVector:
    """Perron-Frobenius quantum dimensions, normalized at the unit vertex."""

    def __init__(self, values: dict, eigenvalue: float):
        self._values = dict(values)
        self.eigenvalue = eigenvalue

    def __getitem__(self, vertex: str) -> float:
        return self._values[vertex]

    def items(self):
        return self._values.items()

    def as_dict(self) -> dict:
        return dict(self._values)


class FusionGraph:
    """Immutable fusion graph with labeled oriented multi-edges.

    Parameters
    ----------
    name : str
    context : RootOfUnityContext
        Carries the altitude; INFINITY marks a classical (q = 1) graph.
    vertices : iterable of (vertex_id, triality-or-None)
    edges : iterable of Edge or (eid, src, dst)
    unit : str
        Vertex at which Perron-Frobenius dimensions are normalized.
    check_altitude : bool
        Verify PF eigenvalue == [3] (disabled for classical truncations).
    envelope : FusionGraph, optional
        A strictly larger graph used to decide frame completeness on
        truncated classical alcoves.
    """

    def __init__(self, name, context, vertices, edges, unit, *,
                 check_altitude=True, envelope=None,
                 preferred_negative_cells=None, validate=True):
        self.name = name
        self.context = context
        self.vertices = []
        self.triality = {}
        for item in vertices:
            if isinstance(item, str):
                vid, tri = item, None
            else:
                vid, tri = item
            self.vertices.append(vid)
            self.triality[vid] = tri
        self.edges = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        self.unit = unit
        self.envelope = envelope
        self.preferred_negative_cells = preferred_negative_cells or []

        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.out_edges = {v: [] for v in self.vertices}
        self.edges_between = {}
        eids = set()
        for e in self.edges:
            if e.eid in eids:
                raise ValidationError(f"duplicate edge id {e.eid!r}")
            eids.add(e.eid)
            if e.src not in self.vindex or e.dst not in self.vindex:
                raise ValidationError(f"edge {e.eid!r} references unknown vertex")
            self.out_edges[e.src].append(e)
            self.edges_between.setdefault((e.src, e.dst), []).append(e)
        n = len(self.vertices)
        self.adjacency = np.zeros((n, n), dtype=int)
        for e in self.edges:
            self.adjacency[self.vindex[e.src], self.vindex[e.dst]] += 1

        self._dims = None
        self._triangles = None
        self.check_altitude = check_altitude
        if validate:
            self.validate()

    # -- validation ------------------------------------------------------

    def validate(self):
        if self.unit not in self.vindex:
            raise ValidationError(f"unit vertex {self.unit!r} not in graph")
        for e in self.edges:
            ta, tb = self.triality.get(e.src), self.triality.get(e.dst)
            if ta is not None and tb is not None and (ta + 1) % 3 != tb % 3:
                raise ValidationError(
                    f"edge {e.eid!r}: triality {ta} -> {tb} does not advance by 1 mod 3")
        if self.check_altitude:
            self.pf_dimensions()  # raises NotConnected / AltitudeMismatch

    # -- Perron-Frobenius ------------------------------------------------

    def pf_dimensions(self) -> DimensionVector:
        """Positive eigenvector of G for the largest eigenvalue, unit-normalized."""
        if self._dims is not None:
            return self._dims
        n = len(self.vertices)
        ncomp, _ = csgraph.connected_components(
            csr_matrix(self.adjacency), connection="strong")
        if ncomp != 1:
            raise NotConnected(f"{self.name}: graph is not strongly connected")
        w, v = np.linalg.eig(self.adjacency.astype(float))
        i0 = int(np.argmax(w.real))
        pf = float(w[i0].real)
        vec = v[:, i0].real
        vec = np.abs(vec) / abs(vec[self.vindex[self.unit]])
        if self.check_altitude:
            expected = float(qint(3, RootOfUnityContext(self.context.altitude)))
            if abs(pf - expected) > self.context.tolerance:
                raise AltitudeMismatch(
                    f"{self.name}: PF eigenvalue {pf} != [3] = {expected} at altitude "
                    f"{self.context.altitude}")
        self._dims = DimensionVector(
            {a: float(vec[self.vindex[a]]) for a in self.vertices}, pf)
        return self._dims

    # -- enumeration -----------------------------------------------------

    def enumerate_triangles(self):
        """All oriented triangles, canonical, no duplicates; len == Tr(G^3)/3."""
        if self._triangles is not None:
            return self._triangles
        seen = set()
        for e1 in self.edges:
            for e2 in self.out_edges[e1.dst]:
                for e3 in self.edges_between.get((e2.dst, e1.src), []):
                    seen.add(canonical_rotation(
                        ((e1.src, e1.eid), (e1.dst, e2.eid), (e2.dst, e3.eid))))
        self._triangles = [OrientedTriangle(k) for k in sorted(seen)]
        return self._triangles

    def triangle_count_formula(self) -> int:
        G = self.adjacency
        return int(np.trace(G @ G @ G)) // 3

    def enumerate_type1_frames(self):
        """One frame per ordered (a, b, alpha, alpha'); alpha == alpha' flagged
        diagonal.  The vertex-pair grouping count is ``type1_vertex_pair_count``."""
        frames = []
        for (a, b), es in sorted(self.edges_between.items()):
            for e1 in es:
                for e2 in es:
                    frames.append(TypeIFrame(a, b, e1.eid, e2.eid))
        return frames

    def type1_vertex_pair_count(self) -> int:
        return int((self.adjacency > 0).sum())

    def type2_frame_count_formula(self) -> int:
        G = self.adjacency
        return int(np.trace(G @ G.T @ G @ G.T))

    def _type2_raw(self):
        pairs = sorted(self.edges_between.items())
        into = {}
        for (a, b), es in pairs:
            into.setdefault(b, []).append((a, es))
        frames = []
        for (a1, a2), e12 in pairs:
            for a3, e32 in into.get(a2, []):
                for (src, a4), e14 in pairs:
                    if src != a1:
                        continue
                    e34 = self.edges_between.get((a3, a4))
                    if not e34:
                        continue
                    for x1 in e12:
                        for x2 in e32:
                            for x3 in e34:
                                for x4 in e14:
                                    frames.append(TypeIIFrame(
                                        a1, a2, a3, a4, x1.eid, x2.eid, x3.eid, x4.eid))
        return frames

    @staticmethod
    def _t2_orbit_key(f: TypeIIFrame):
        variants = [
            (f.a1, f.a2, f.a3, f.a4, f.alpha1, f.alpha2, f.alpha3, f.alpha4),
            (f.a3, f.a2, f.a1, f.a4, f.alpha2, f.alpha1, f.alpha4, f.alpha3),
            (f.a1, f.a4, f.a3, f.a2, f.alpha4, f.alpha3, f.alpha2, f.alpha1),
            (f.a3, f.a4, f.a1, f.a2, f.alpha3, f.alpha4, f.alpha1, f.alpha2),
        ]
        return min(variants)

    def apex_summands(self, frame: TypeIIFrame):
        """All (c, beta1: c->a1, beta2: a2->c, beta3: c->a3, beta4: a4->c)."""
        out = []
        for c in self.vertices:
            b1s = self.edges_between.get((c, frame.a1), [])
            b2s = self.edges_between.get((frame.a2, c), [])
            b3s = self.edges_between.get((c, frame.a3), [])
            b4s = self.edges_between.get((frame.a4, c), [])
            if not (b1s and b2s and b3s and b4s):
                continue
            for b1 in b1s:
                for b2 in b2s:
                    for b3 in b3s:
                        for b4 in b4s:
                            out.append((c, b1.eid, b2.eid, b3.eid, b4.eid))
        return out

    def enumerate_type2_frames(self, dedup: bool = True):
        """Type II frames.  Raw count equals Tr(G G^T G G^T); with dedup one
        representative per orbit of the two diagonal symmetries, and frames
        with an empty apex set are dropped."""
        raw = self._type2_raw()
        if not dedup:
            return raw
        rep = {}
        for f in raw:
            rep.setdefault(self._t2_orbit_key(f), f)
        frames = [rep[k] for k in sorted(rep)]
        return [f for f in frames if self.apex_summands(f)]

    # -- frame completeness on truncated classical graphs -----------------

    def is_frame_complete(self, frame) -> bool:
        """True unless the graph is a truncation whose envelope would add
        apex summands to this frame (boundary frames of classical alcoves)."""
        if self.envelope is None:
            return True
        if isinstance(frame, TypeIFrame):
            mine = self._type1_apexes(frame)
            theirs = self.envelope._type1_apexes(frame)
        else:
            mine = self.apex_summands(frame)
            theirs = self.envelope.apex_summands(frame)
        return len(mine) == len(theirs)

    def _type1_apexes(self, frame: TypeIFrame):
        out = []
        for e2 in self.out_edges.get(frame.b, []):
            for e3 in self.edges_between.get((e2.dst, frame.a), []):
                out.append((e2.dst, e2.eid, e3.eid))
        return out

    # -- transforms -------------------------------------------------------

    def conjugate(self) -> "FusionGraph":
        """All edges reversed; triality negated mod 3."""
        verts = [(v, None if self.triality[v] is None else (-self.triality[v]) % 3)
                 for v in self.vertices]
        edges = [Edge(e.eid, e.dst, e.src) for e in self.edges]
        return FusionGraph(self.name + "*", self.context, verts, edges, self.unit,
                           check_altitude=self.check_altitude)


def conjugate_graph(graph: FusionGraph) -> FusionGraph:
    return graph.conjugate()


def pf_dimensions(graph: FusionGraph) -> DimensionVector:
    return graph.pf_dimensions()


def enumerate_triangles(graph: FusionGraph):
    return graph.enumerate_triangles()


def enumerate_type1_frames(graph: FusionGraph):
    return graph.enumerate_type1_frames()


def enumerate_type2_frames(graph: FusionGraph, dedup: bool = True):
    return graph.enumerate_type2_frames(dedup=dedup)


# -- file format -----------------------------------------------------------

def serialize_graph(graph: FusionGraph) -> bytes:
    doc = {
        "name": graph.name,
        "altitude": "infinity" if graph.context.classical else graph.context.altitude,
        "unit": graph.unit,
        "vertices": [
            {"id": v} if graph.triality[v] is None else {"id": v, "triality": graph.triality[v]}
            for v in graph.vertices
        ],
        "edges": [{"id": e.eid, "from": e.src, "to": e.dst} for e in graph.edges],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def parse_graph(data: bytes, *, precision: int = 15, tolerance: float = 1e-9) -> FusionGraph:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"not valid graph JSON: {exc}") from exc
    try:
        name = doc["name"]
        altitude = doc["altitude"]
        unit = doc["unit"]
        vertices = [(v["id"], v.get("triality")) for v in doc["vertices"]]
        edges = [Edge(e["id"], e["from"], e["to"]) for e in doc["edges"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from exc
    alt = INFINITY if altitude == "infinity" else altitude
    ctx = RootOfUnityContext(alt, precision=precision, tolerance=tolerance)
    return FusionGraph(name, ctx, vertices, edges, unit,
                       check_altitude=not ctx.classical)


def graphs_equal(g1: FusionGraph, g2: FusionGraph) -> bool:
    return (g1.name == g2.name
            and g1.context.altitude == g2.context.altitude
            and g1.unit == g2.unit
            and g1.vertices == g2.vertices
            and g1.triality == g2.triality
            and [(e.eid, e.src, e.dst) for e in g1.edges]
                == [(e.eid, e.src, e.dst) for e in g2.edges])
