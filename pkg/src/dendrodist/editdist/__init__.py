"""Edit distance between merge trees, pruning, and the pruned edit distance."""

from .distance import (
    DEFAULT_BUDGET_LEAVES,
    RESCALE_MODES,
    edit_distance,
    pruned_distance,
    quadrature_distance,
    rescale,
)
from .measures import (
    PruningMeasure,
    beta_measure,
    measure_from_options,
    point_mass_at_zero,
    point_masses,
    uniform_grid,
)
from .oracle import edit_distance_oracle
from .pruning import breakpoints, critical_values, prune, pruning_sequence

__all__ = [
    "DEFAULT_BUDGET_LEAVES",
    "RESCALE_MODES",
    "PruningMeasure",
    "beta_measure",
    "breakpoints",
    "critical_values",
    "edit_distance",
    "edit_distance_oracle",
    "measure_from_options",
    "point_mass_at_zero",
    "point_masses",
    "prune",
    "pruned_distance",
    "pruning_sequence",
    "quadrature_distance",
    "rescale",
    "uniform_grid",
]
