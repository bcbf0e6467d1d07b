"""Triangular cell systems on SU(3)-type fusion graphs.

Models fusion graphs, assembles and solves the coherence equations for their
triangular cells, classifies solutions by gauge invariants, certifies
infeasible candidates, and derives Hecke representation operators.
"""

from .numerics import INFINITY, RootOfUnityContext, WeightOutsideAlcove, qdim_weight, qint, with_precision
from .fusion_graph import (AltitudeMismatch, DimensionVector, Edge, FusionGraph,
                           GraphError, NotConnected, OrientedTriangle, ParseError,
                           TypeIFrame, TypeIIFrame, UnknownGraph, ValidationError,
                           conjugate_graph, enumerate_triangles, enumerate_type1_frames,
                           enumerate_type2_frames, parse_graph, pf_dimensions,
                           serialize_graph)
from .catalog import builtin_graph, catalog_names
from .fusion_ring import (AnnularFamily, FusionFamily, NegativeEntry,
                          annular_matrices, fusion_dimension, fusion_matrices,
                          nimrep_check)
from .cell_system import (CellSystem, GaugeChoice, MissingCell, ShapeMismatch,
                          UnsupportedGraph, apply_gauge, gauge_invariants,
                          parse_cells, serialize_cells, type1_residual,
                          type2_residual)
from .solver import (INCONCLUSIVE, INFEASIBLE, SOLVED, ModuliSolution,
                     SolveReport, SolverOptions, certify_infeasible_z9, solve,
                     solve_moduli, solve_phases, verify)
from .hecke import (IndexOutOfRange, NotAdjacent, PathSpace, RhombusMatrix,
                    check_hecke_relations, path_operator, rhombus_matrix)

__version__ = "0.1.0"
