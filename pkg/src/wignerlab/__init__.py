"""Discrete phase-space toolkit for qudit systems.

Weyl operator algebra and Clifford phase-space actions, minimal-frame
quasiprobability representations, the odd-d discrete Wigner function with
negativity analysis, an outcome-assignment constraint solver that proves
the representation unique (odd d) or impossible (even d), and a
positive-Wigner Monte Carlo simulator for stabilizer circuits.
"""

from .modring import ModInt, inv2, mod_reduce, omega_power
from .qmat import SpectralDecomposition, hs_inner, spectral_decompose, tensor
from .weyl import (WeylLabel, compose_labels, weyl_matrix, weyl_measurement,
                   weyl_superop_apply)
from .clifford import (NotCliffordError, PhaseSpaceAction,
                       clifford_group_elements, hadamard, is_clifford,
                       phase_gate)
from .stabilizer import (StabilizerState, enumerate_pure_states,
                         maximally_mixed, product_states, state_from_basis)
from .frames import (Channel, DualFrame, Frame, dual_basis, is_nonnegative,
                     recover_probability, rep_channel, rep_effect, rep_state)
from .wigner import (classify_resource, gross_frame, negativity, phase_point,
                     wigner)
from .nogo import (Infeasible, Multiple, Unique, VConstraintSystem,
                   brute_force_verdict, build_constraints,
                   ontic_labelling_check, solve, verify_against_wigner)
from .sim import (Circuit, CompiledCircuit, Gate, NegativityError,
                  compile_circuit, exact_probabilities,
                  post_measurement_update, sample)

__version__ = "0.1.0"

__all__ = [
    "ModInt", "inv2", "mod_reduce", "omega_power",
    "SpectralDecomposition", "hs_inner", "spectral_decompose", "tensor",
    "WeylLabel", "compose_labels", "weyl_matrix", "weyl_measurement",
    "weyl_superop_apply",
    "NotCliffordError", "PhaseSpaceAction", "clifford_group_elements",
    "hadamard", "is_clifford", "phase_gate",
    "StabilizerState", "enumerate_pure_states", "maximally_mixed",
    "product_states", "state_from_basis",
    "Channel", "DualFrame", "Frame", "dual_basis", "is_nonnegative",
    "recover_probability", "rep_channel", "rep_effect", "rep_state",
    "classify_resource", "gross_frame", "negativity", "phase_point", "wigner",
    "Infeasible", "Multiple", "Unique", "VConstraintSystem",
    "brute_force_verdict", "build_constraints", "ontic_labelling_check",
    "solve", "verify_against_wigner",
    "Circuit", "CompiledCircuit", "Gate", "NegativityError",
    "compile_circuit", "exact_probabilities", "post_measurement_update",
    "sample",
]
