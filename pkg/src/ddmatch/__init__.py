"""Extent intersection matching for data distribution management.

The package identifies all intersections between a set of subscription
extents and a set of update extents (axis-aligned d-rectangles) and
records them in a packed bit matrix. Four matching algorithms are
provided (brute force, sort-based, grid-based, interval-tree), plus a
thread-parallel executor, incremental maintenance under extent moves,
and a benchmark/verification CLI (``python -m ddmatch``).
"""

from .core import (
    Extent,
    IntersectionMatrix,
    Interval1D,
    Kind,
    MatchInstance,
    intersect_1d,
    intersect_extent,
    match_extents,
    read_extents,
    read_matrix,
    write_extents,
    write_matrix,
)
from .interval_tree import IntervalTree
from .matchers import (
    BinarySearchCounter,
    GridConfig,
    match_brute_force,
    match_grid,
    match_interval_tree,
    match_sort_based,
)
from .parallel import ParallelConfig, match_brute_force_parallel, match_interval_tree_parallel
from .dynamic import DynamicMatcher
from .bench import BenchResult, WorkloadSpec, generate_workload, run_bench, verify_instance, write_csv

__all__ = [
    "BenchResult",
    "BinarySearchCounter",
    "DynamicMatcher",
    "Extent",
    "GridConfig",
    "IntersectionMatrix",
    "Interval1D",
    "IntervalTree",
    "Kind",
    "MatchInstance",
    "ParallelConfig",
    "WorkloadSpec",
    "generate_workload",
    "intersect_1d",
    "intersect_extent",
    "match_brute_force",
    "match_brute_force_parallel",
    "match_extents",
    "match_grid",
    "match_interval_tree",
    "match_interval_tree_parallel",
    "match_sort_based",
    "read_extents",
    "read_matrix",
    "run_bench",
    "verify_instance",
    "write_csv",
    "write_extents",
    "write_matrix",
]
