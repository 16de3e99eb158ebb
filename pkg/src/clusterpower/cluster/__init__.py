"""Clustering algorithms written against numpy only."""

from .agglomerative import UnsupportedLinkageError, agglomerative, merge_sequence
from .base import (
    NOISE,
    AgglomerativeParams,
    AlgorithmParams,
    ClusterSolution,
    CMeansParams,
    HDBSCANParams,
    KMeansParams,
)
from .cmeans import cmeans, fuzzy_memberships
from .hdbscan import hdbscan, minimum_spanning_tree, mutual_reachability
from .kmeans import kmeans, kmeans_plusplus

__all__ = [
    "NOISE",
    "AgglomerativeParams",
    "AlgorithmParams",
    "ClusterSolution",
    "CMeansParams",
    "HDBSCANParams",
    "KMeansParams",
    "UnsupportedLinkageError",
    "agglomerative",
    "cmeans",
    "fuzzy_memberships",
    "hdbscan",
    "kmeans",
    "kmeans_plusplus",
    "merge_sequence",
    "minimum_spanning_tree",
    "mutual_reachability",
]
