"""Exact Floquet analysis of a non-Hermitian two-level system under square-wave driving."""

from .analysis import (
    Axis,
    Boundary,
    EpLocation,
    SweepGrid,
    find_ep,
    hf_boundary,
    hf_effective_hamiltonian,
    hf_pi_approx,
    predict_resonances,
    scan_brackets,
    sweep,
)
from .drive import DriveProtocol, SegmentParams, derived_quantities, segment_propagator, spectrum, validate
from .engine import (
    Phase,
    PhaseLabel,
    classify,
    effective_hamiltonian,
    monodromy,
    pi_closed_form,
    quasi_energies,
)
from .su2 import Mat2, expm_series

__version__ = "0.1.0"
