"""Node rank spectra of undirected networks.

Two independent solvers compute, for every node, the vector of ranks
interpolating between its core number and its degree: round-based threshold
peeling and warm-started fixed points of monotone graph dynamics. On top of
that sit a discrete SIR Monte Carlo profiler and block analytics comparing
how evenly spectrum-based and core-based partitions slice spreading power.
"""

from .blocks import (
    BlockPartition,
    CBlockDispersion,
    DispersionReport,
    ICell,
    ICellGrid,
    cblocks,
    cluster_spectra,
    cluster_spreading_power,
    contingency,
    dispersion,
    dispersion_report,
    icell_grid,
    kmeans_fit,
)
from .dynamics import (
    ContractivityError,
    TSystemRule,
    UpdateSchedule,
    compute_spectrum_chained,
    fixed_point,
    make_schedule,
    run_to_fixed_point,
    t_system_rule,
)
from .estimators import SirProfiler, SpectrumExtractor, SpectrumKMeans
from .graph import (
    EdgeListParseError,
    Graph,
    IngestReport,
    ThresholdUndefinedError,
    connected_components,
    degree,
    dump_edge_list,
    epidemic_threshold,
    load_edge_list,
    max_degree,
)
from .peeling import (
    ChainCheck,
    ChainRanks,
    DChain,
    DSpectrum,
    SpectrumMismatchError,
    chain_from_ranks,
    chain_level,
    core_numbers,
    core_peel,
    first_spectrum_mismatch,
    full_spectrum,
    ranks_for_order,
    verify_chain,
)
from .sir import (
    DEFAULT_H_LIST,
    RECOVERY_PROB,
    InfectionProfile,
    SirParams,
    infection_rate,
    profile_all_nodes,
    simulate_once,
)
from .validation import check_graph

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graph
    "Graph",
    "IngestReport",
    "EdgeListParseError",
    "ThresholdUndefinedError",
    "load_edge_list",
    "dump_edge_list",
    "degree",
    "max_degree",
    "epidemic_threshold",
    "connected_components",
    # peeling
    "ChainRanks",
    "DChain",
    "DSpectrum",
    "ChainCheck",
    "SpectrumMismatchError",
    "chain_level",
    "core_peel",
    "core_numbers",
    "ranks_for_order",
    "full_spectrum",
    "chain_from_ranks",
    "verify_chain",
    "first_spectrum_mismatch",
    # dynamics
    "TSystemRule",
    "t_system_rule",
    "UpdateSchedule",
    "make_schedule",
    "run_to_fixed_point",
    "fixed_point",
    "compute_spectrum_chained",
    "ContractivityError",
    # sir
    "SirParams",
    "InfectionProfile",
    "simulate_once",
    "infection_rate",
    "profile_all_nodes",
    "DEFAULT_H_LIST",
    "RECOVERY_PROB",
    # blocks
    "BlockPartition",
    "ICell",
    "ICellGrid",
    "CBlockDispersion",
    "DispersionReport",
    "dispersion",
    "cblocks",
    "cluster_spectra",
    "cluster_spreading_power",
    "icell_grid",
    "contingency",
    "dispersion_report",
    "kmeans_fit",
    # estimators
    "SpectrumExtractor",
    "SirProfiler",
    "SpectrumKMeans",
    "check_graph",
]
