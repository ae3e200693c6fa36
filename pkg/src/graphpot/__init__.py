"""Discrete potential theory on weighted locally finite graphs."""

from .graph import (
    GraphFunction,
    Region,
    WeightedGraph,
    ball,
    distance,
    minimizing_path,
    region_from_interior,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "GraphFunction",
    "Region",
    "WeightedGraph",
    "ball",
    "distance",
    "minimizing_path",
    "region_from_interior",
    "validate",
]
