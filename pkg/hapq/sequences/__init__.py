"""
Pulse sequences: representation, library, average Hamiltonians and text format.
"""

from hapq.sequences.averaging import (
    EffectiveHamiltonianReport,
    ProductTerm,
    RecouplingSummary,
    aht_convergence,
    average_hamiltonian,
    offset_scaling,
    sequence_evolution,
    stroboscopic_propagator,
    summarize_recoupling,
)
from hapq.sequences.library import (
    channel_frequencies_hz,
    check_recoupling_frequencies,
    commensurate_window,
    double_irradiation,
    excitation_profile,
    lee_goldburg,
    mrev8,
    selective_pulse,
)
from hapq.sequences.pulses import (
    FrameHint,
    IdealRotation,
    PulseChannel,
    PulseSegment,
    PulseSequence,
    rf_hamiltonian,
)
from hapq.sequences.textformat import format_sequence, parse_sequence, report_to_csv

__all__ = [
    "PulseChannel",
    "PulseSegment",
    "PulseSequence",
    "IdealRotation",
    "FrameHint",
    "rf_hamiltonian",
    "lee_goldburg",
    "mrev8",
    "selective_pulse",
    "double_irradiation",
    "check_recoupling_frequencies",
    "commensurate_window",
    "channel_frequencies_hz",
    "excitation_profile",
    "EffectiveHamiltonianReport",
    "ProductTerm",
    "RecouplingSummary",
    "average_hamiltonian",
    "stroboscopic_propagator",
    "sequence_evolution",
    "summarize_recoupling",
    "offset_scaling",
    "aht_convergence",
    "format_sequence",
    "parse_sequence",
    "report_to_csv",
]
