"""Population-level analysis: distance matrices, clustering, curves, simulation."""

from .clustering import (
    ClusterAssignment,
    Selection,
    dbscan_matrix,
    hcluster_matrix,
    rand_index,
    silhouette,
    silhouette_select,
)
from .curves import HeightCurve, height_curves
from .matrix import DistanceMatrix, distance_matrix
from .mu import MuSuggestion, suggest_mu
from .simulation import SimulationConfig, SimulationReport, run_simulation_study, simulate_clouds

__all__ = [
    "ClusterAssignment",
    "DistanceMatrix",
    "HeightCurve",
    "MuSuggestion",
    "Selection",
    "SimulationConfig",
    "SimulationReport",
    "dbscan_matrix",
    "distance_matrix",
    "hcluster_matrix",
    "height_curves",
    "rand_index",
    "run_simulation_study",
    "silhouette",
    "silhouette_select",
    "simulate_clouds",
    "suggest_mu",
]
