"""Heat-map guided TSP search."""

from ._core import (
    Instance,
    TrainConfig,
    SearchParams,
    generate_random,
    load_instance,
    distance_matrix,
    column_softmax,
    indicator_to_heatmap,
    surrogate_loss,
    loss_gradient,
    optimize_heatmap,
    top_m_filter,
    search_preset,
    search_preset_names,
    run_search,
    two_opt_improve,
    tour_length,
    held_karp_exact,
    nn_two_opt_baseline,
    solve_pipeline,
    heat_increment,
)

__all__ = [
    "Instance",
    "TrainConfig",
    "SearchParams",
    "generate_random",
    "load_instance",
    "distance_matrix",
    "column_softmax",
    "indicator_to_heatmap",
    "surrogate_loss",
    "loss_gradient",
    "optimize_heatmap",
    "top_m_filter",
    "search_preset",
    "search_preset_names",
    "run_search",
    "two_opt_improve",
    "tour_length",
    "held_karp_exact",
    "nn_two_opt_baseline",
    "solve_pipeline",
    "heat_increment",
]
