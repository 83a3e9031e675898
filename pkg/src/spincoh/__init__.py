"""Correlations and coherence in spin-1 Heisenberg chains.

Ground states of the spin-1 XXZ and bilinear-biquadratic chains from
infinite-system DMRG (or exact diagonalization for small chains), and on
their bulk reduced density matrices: quantum mutual information, quantum
discord, relative entropy of coherence, l1 norm of coherence and
Wigner-Yanase skew information.  Parameter sweeps with feature detection
locate the phase transitions and symmetry points of both models.
"""

from .models import ModelSpec, parse_model_spec, spin1_operators, bond_operator
from .dmrg import DmrgConfig, DmrgResult, dmrg_ground_state
from .oracle import ed_ground_state, rdm_from_vector, brute_force_discord
from .cue import sample_cue, unitary_from_angles, basis_from_unitary, naimark_dilation
from .measures import (DiscordConfig, DiscordResult, mutual_information,
                       quantum_discord, classical_correlation,
                       rel_entropy_coherence, l1_coherence, skew_information,
                       local_observable)
from .sweep import SweepConfig, run_sweep, detect_features, emit_csv, emit_plot

__version__ = "0.1.0"

__all__ = [
    "ModelSpec", "parse_model_spec", "spin1_operators", "bond_operator",
    "DmrgConfig", "DmrgResult", "dmrg_ground_state",
    "ed_ground_state", "rdm_from_vector", "brute_force_discord",
    "sample_cue", "unitary_from_angles", "basis_from_unitary", "naimark_dilation",
    "DiscordConfig", "DiscordResult", "mutual_information", "quantum_discord",
    "classical_correlation", "rel_entropy_coherence", "l1_coherence",
    "skew_information", "local_observable",
    "SweepConfig", "run_sweep", "detect_features", "emit_csv", "emit_plot",
]
