"""Exact-arithmetic classification of two-input two-output digraphs.

A graph with designated inputs u1, u2 and outputs y1, y2 falls into one of
three classes: no input reaches any output (class 0); some input reaches
some output but all such paths share a node (class 1); or two node-disjoint
paths cover both inputs and both outputs under some input pairing
(class 2).  The package decides the class three independent ways -- an
integer rank sweep of the associated transfer matrix, a backtracking
search, and a vertex-capacity linking computation -- and ships a harness
that compares them on demand or en masse.
"""

from .graph import RawDigraph, build_system, digraph, normalize, split_nodes, standardize
from .harness import compare_digraph, parse_graph, parse_graph_file
from .oracle import brute_force_class, common_node_certificate, maxflow_class
from .points import Decision, decide, sweep_points
from .resolvent import faddeev, rank_at_point

__all__ = [
    "RawDigraph",
    "digraph",
    "normalize",
    "split_nodes",
    "standardize",
    "build_system",
    "faddeev",
    "rank_at_point",
    "sweep_points",
    "decide",
    "Decision",
    "brute_force_class",
    "maxflow_class",
    "common_node_certificate",
    "parse_graph",
    "parse_graph_file",
    "compare_digraph",
]
