"""SU(3) fusion matrices at level k and annular matrices of a module graph.

Both families obey the same three-term recurrence; only the seed differs
(the alcove adjacency for the ring, the module graph's adjacency for the
annular family).  Out-of-alcove terms contribute zero.
"""

from __future__ import annotations

import numpy as np

from .catalog import _alcove_weights, a_graph
from .fusion_graph import FusionGraph


class NegativeEntry(Exception):
    """The annular recurrence produced a negative entry: the graph does not
    even carry a module structure over the fusion ring."""

    def __init__(self, weight, row, col, value):
        self.weight, self.row, self.col, self.value = weight, row, col, value
        super().__init__(f"F{weight}[{row},{col}] = {value} < 0")


class _RecurrenceFamily:
    """Matrices N_(l,m) generated from a seed by the fusion recurrence."""

    def __init__(self, level: int, seed: np.ndarray, labels):
        self.level = level
        self.weights = _alcove_weights(level)
        self.windex = {w: i for i, w in enumerate(self.weights)}
        self.labels = list(labels)
        self._seed = np.asarray(seed, dtype=np.int64)
        n = self._seed.shape[0]
        self._id = np.eye(n, dtype=np.int64)
        self._cache = {}
        for w in self.weights:
            self[w]

    def _zero_ok(self, w) -> bool:
        l, m = w
        return l < 0 or m < 0 or l + m > self.level

    def _get(self, w) -> np.ndarray:
        if self._zero_ok(w):
            return np.zeros_like(self._id)
        return self[w]

    def __getitem__(self, w) -> np.ndarray:
        if w in self._cache:
            return self._cache[w]
        l, m = w
        if w == (0, 0):
            mat = self._id
        elif m == 0:
            mat = self._seed @ self._get((l - 1, 0)) - self._get((l - 2, 1))
        elif l == 0:
            mat = self[(m, 0)].T
        else:
            mat = (self._seed @ self._get((l - 1, m))
                   - self._get((l - 1, m - 1)) - self._get((l - 2, m + 1)))
        self._cache[w] = mat
        return mat

    def __iter__(self):
        return iter(self.weights)

    def __contains__(self, w):
        return w in self._cache or (not self._zero_ok(w) and w in self.windex)


class FusionFamily(_RecurrenceFamily):
    """N_(l,m) for the level-k fusion ring, seeded by the alcove adjacency."""

    def structure_constant(self, m, n, p) -> int:
        """N_{mn}^p, the coefficient of p in m x n."""
        return int(self[m][self.windex[n], self.windex[p]])


class AnnularFamily(_RecurrenceFamily):
    """F_(l,m) for a module graph, seeded by its adjacency matrix."""

    def __init__(self, graph: FusionGraph):
        self.graph = graph
        level = graph.context.altitude - 3
        super().__init__(level, graph.adjacency, graph.vertices)
        for w in self.weights:
            mat = self[w]
            if (mat < 0).any():
                i, j = np.argwhere(mat < 0)[0]
                raise NegativeEntry(w, self.labels[i], self.labels[j], int(mat[i, j]))


def fusion_matrices(level: int) -> FusionFamily:
    """All fusion matrices of the level-k SU(3) alcove."""
    if level < 1:
        raise ValueError("level must be >= 1")
    graph = a_graph(level)
    return FusionFamily(level, graph.adjacency, graph.vertices)


def annular_matrices(graph: FusionGraph) -> AnnularFamily:
    """Annular matrices of a module graph; raises NegativeEntry on failure."""
    if graph.context.classical:
        raise ValueError("annular matrices need a finite altitude")
    return AnnularFamily(graph)


def fusion_dimension(family: _RecurrenceFamily, weight) -> int:
    """Entry sum of the weight's matrix (triangle-space dimension)."""
    return int(family[weight].sum())


class NimrepReport:
    def __init__(self, graph_name, passed, failures, pairs_checked):
        self.graph_name = graph_name
        self.passed = passed
        self.failures = failures
        self.pairs_checked = pairs_checked

    def __str__(self):
        if self.passed:
            return f"{self.graph_name}: nimrep PASS ({self.pairs_checked} weight pairs)"
        first = self.failures[0]
        return f"{self.graph_name}: nimrep FAIL at {first}"

    def as_dict(self):
        return {"graph": self.graph_name, "status": "PASS" if self.passed else "FAIL",
                "pairs_checked": self.pairs_checked,
                "failures": [str(f) for f in self.failures[:10]]}


def nimrep_check(graph: FusionGraph) -> NimrepReport:
    """Verify F_m F_n = sum_p N_{mn}^p F_p (exact integers) plus non-negativity."""
    level = graph.context.altitude - 3
    N = fusion_matrices(level)
    try:
        F = annular_matrices(graph)
    except NegativeEntry as exc:
        return NimrepReport(graph.name, False, [f"negative entry: {exc}"], 0)
    failures = []
    pairs = 0
    for m in N.weights:
        Nm = N[m]
        for n in N.weights:
            pairs += 1
            lhs = F[m] @ F[n]
            rhs = np.zeros_like(lhs)
            for p in N.weights:
                coef = Nm[N.windex[n], N.windex[p]]
                if coef:
                    rhs = rhs + coef * F[p]
            if not np.array_equal(lhs, rhs):
                failures.append((m, n))
                if len(failures) >= 5:
                    return NimrepReport(graph.name, False, failures, pairs)
    return NimrepReport(graph.name, not failures, failures, pairs)
