"""Simultaneous matrix orderings for collections of graphs on one vertex set."""
from .distances import (Approach, DistanceMatrix, MetricKind, collection_distance, delta_i,
                        distance_matrix, similarity_s, union_distance)
from .formats import DataError, load_collection, load_ordering, render_matrix, save_collection
from .graph import Graph, GraphCollection, Ordering, WeightedUnionGraph, build_union
from .harness import ExperimentReport, run_experiment, verify_report
from .metrics import (bandwidth, collection_crossings, count_adjacencies, crossings,
                      linear_arrangement, morans_i, morans_i_two_orderings, profile,
                      weighted_crossings)
from .orderers import (InvariantError, OrdererConfig, OrderingResult, barycenter, compute_ordering,
                       leaf_order, nn_2opt)

__version__ = "0.1.0"

__all__ = [
    "Approach", "DataError", "DistanceMatrix", "ExperimentReport", "Graph", "GraphCollection",
    "InvariantError", "MetricKind", "OrdererConfig", "Ordering", "OrderingResult",
    "WeightedUnionGraph", "bandwidth", "barycenter", "build_union", "collection_crossings",
    "collection_distance", "compute_ordering", "count_adjacencies", "crossings", "delta_i",
    "distance_matrix", "leaf_order", "linear_arrangement", "load_collection", "load_ordering",
    "morans_i", "morans_i_two_orderings", "nn_2opt", "profile", "render_matrix", "run_experiment",
    "save_collection", "similarity_s", "union_distance", "verify_report", "weighted_crossings",
]
