"""Exact diagonalization of the open Ising chain in a tilted magnetic field.

Spectra by reflection sector, eigenstate entanglement (block entropies,
concurrence, total tangle, Meyer-Wallach Q), level-spacing statistics and
time evolution of entanglement.
"""

__version__ = "0.1.0"

from .state import (
    ChainParams,
    ReducedDensityMatrix,
    basis_index,
    basis_state,
    bit_reverse_state,
    partial_trace,
    partial_trace_pair,
)
from .hamiltonian import (
    HamiltonianMatrix,
    SymmetrySector,
    build_hamiltonian,
    build_sectors,
    duality_check,
    project_to_sector,
)
from .spectra import (
    AvoidedCrossing,
    LevelTrack,
    SpectrumResult,
    diagonalize,
    eigenstate_report,
    find_avoided_crossings,
    spectrum,
    sweep_spectrum,
)
from .entanglement import (
    MeasureSet,
    concurrence,
    entropy_block,
    localization,
    measure_all,
    q_measure,
    total_tangle,
)
from .chaostats import (
    KSReport,
    UnfoldedSpectrum,
    UnfoldingError,
    analyze_spacings,
    ks_statistic,
    nnsd_histogram,
    poisson_cdf,
    unfold,
    wigner_cdf,
)
from .dynamics import EvolutionPlan, TimeSeries, bell_seed_state, evolve, quench_time
