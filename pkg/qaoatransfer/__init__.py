# qaoatransfer/__init__.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# QAOA MaxCut parameter transferability toolkit

__version__ = "1.0.0"
__date__ = "2026-10-19"
__author__ = "Kris Kirby, KE4AHR"
__license__ = "GNU General Public License v3.0"

"""
Depth-1 QAOA MaxCut energies by lightcone decomposition, multistart
parameter optimization, and the transferability / similarity metrics
built on them.

Features:
- Lightcone census and class catalog of arbitrary graphs
- Closed-form class energies, validated against a statevector oracle
- Exact parameter-shift gradients and RMSprop multistart optimization
- Exact and heuristic classical MaxCut references
- Transfer coefficient, transfer maps, MT, SS, PS, SPS and Algorithm-1 optima split
- Seeded ensembles, result cache and hashed run manifests
"""

from .errors import (
    CapacityError, ConfigError, InfeasibleError, MetricError, QaoaTransferError, VerificationError,
)
from .graph import (
    Graph, LightconeCensus, LightconeClass, catalog, census, generate_graph, lightcone_class,
    parity, read_graph, write_graph,
)
from .simulator import QaoaParams, StateVector, prepare_state, sample_cut
from .energy import EnergyModel, class_energy, graph_energy, gradient, landscape
from .optimizer import OptimaSet, OptimizerConfig, best, optimize
from .maxcut import CutResult, approximation_ratio, solve_exact, solve_heuristic
from .centers import CenterSet, classify_optima, load_centers
from .metrics import (
    SimilarityRecord, TransferMap, TransferRecord, metric_stats, mutual_transferability,
    optima_distribution, parity_similarity, sps, subgraph_similarity, transfer_coefficient,
    transfer_map,
)
from .config import ExperimentConfig, load_config

__all__ = [
    "QaoaTransferError", "ConfigError", "InfeasibleError", "CapacityError", "VerificationError", "MetricError",
    "Graph", "LightconeClass", "LightconeCensus", "catalog", "census", "lightcone_class", "parity",
    "generate_graph", "read_graph", "write_graph",
    "QaoaParams", "StateVector", "prepare_state", "sample_cut",
    "EnergyModel", "class_energy", "graph_energy", "gradient", "landscape",
    "OptimizerConfig", "OptimaSet", "optimize", "best",
    "CutResult", "solve_exact", "solve_heuristic", "approximation_ratio",
    "CenterSet", "load_centers", "classify_optima",
    "TransferRecord", "TransferMap", "SimilarityRecord", "transfer_coefficient", "transfer_map",
    "mutual_transferability", "subgraph_similarity", "parity_similarity", "optima_distribution",
    "sps", "metric_stats",
    "ExperimentConfig", "load_config",
    "__version__",
]
