"""Exact-arithmetic toolkit for GKM graphs.

Build and validate GKM graphs, enumerate their faces, compute Euler
characteristics and integral homology of order complexes, and emit
machine-checkable certificates of non-extendibility and non-realizability.
"""

from .graph import (GkmGraph, make_graph, validate, congruence_constants,
                    independence_level, holonomy, infer_connection, restrict)
from .constructions import (ConstructionConfig, build, build_quotient, cube,
                            torus, flag3, builtin, find_parameters, translate,
                            epsilon)

__all__ = [
    "GkmGraph", "make_graph", "validate", "congruence_constants",
    "independence_level", "holonomy", "infer_connection", "restrict",
    "ConstructionConfig", "build", "build_quotient", "cube", "torus",
    "flag3", "builtin", "find_parameters", "translate", "epsilon",
]
