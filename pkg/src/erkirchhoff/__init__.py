"""Resistance distances, Kirchhoff indices and concentration of X_n on Erdos-Renyi graphs."""

__version__ = "0.1.0"

from ._validation import ContractError
from .graph import (
    INF,
    EdgeListError,
    Graph,
    build_laplacian,
    complete_graph,
    connected_components,
    empty_graph,
    is_connected,
    path_graph,
    read_edgelist,
    shortest_path_distances,
    wiener_index,
    write_edgelist,
)
from .spectral import (
    SpectralSummary,
    kirchhoff_index,
    operator_norm,
    pseudo_inverse,
    resistance_distance,
    resistance_matrix,
    symmetric_eigen,
    trace_pinv,
)
from .er import ErParams, centered_laplacian, check_event_en, l1_trace_power, sample_er, xn_statistic
from .theory import (
    TheoryPrediction,
    assumption_diagnostic,
    crb_lower_bound,
    expected_kirchhoff,
    expected_xn,
    expected_xn_vanishing,
    fluctuation_bound,
    max_trace_pinv_bound,
    predict,
)
from .sync import SyncEstimate, SyncProblem, crb_experiment, mle_estimate, sample_sync_problem
from .estimators import KirchhoffFeatures, ResistanceDistance, TranslationSynchronizer
