"""Distances between hierarchical-clustering trees of point clouds."""

__version__ = "0.1.0"
