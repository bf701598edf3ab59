"""Routing algorithms for forbidden-transition graphs.

Solvers for shortest compatible paths (color coding), bounded detours,
compatible vertex-disjoint paths on treecut decompositions, properly
colored Hamiltonian cycles on tree decompositions, and directed two
disjoint shortest paths, together with brute-force oracles and
hardness-reduction instance generators.
"""

from .core import (
    DiGraph,
    EdgeColoring,
    Endpoint,
    Graph,
    TransitionSystem,
    Walk,
    all_transitions,
    bfs_dist,
    dijkstra,
    is_compatible_walk,
    proper_coloring_transitions,
    validate_transition_system,
)
from .io import Instance, parse_instance, serialize_instance

__all__ = [
    "DiGraph",
    "EdgeColoring",
    "Endpoint",
    "Graph",
    "Instance",
    "TransitionSystem",
    "Walk",
    "all_transitions",
    "bfs_dist",
    "dijkstra",
    "is_compatible_walk",
    "parse_instance",
    "proper_coloring_transitions",
    "serialize_instance",
    "validate_transition_system",
]
