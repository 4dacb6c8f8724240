"""csdc: compile unitary matrices into elementary gate sequences via a
recursive cosine-sine decomposition tree, and decompile/verify the results."""

from .matrices import (DEFAULT_TOL, direct_sum, frobenius_distance, is_unitary,
                       state_permutation_matrix, tensor_product)
from .bitops import (BitPermutation, apply_bit_permutation, basis_change_matrix,
                     bit_reversal_permutation, gray_sequence, hadamard_transform,
                     sylvester_hadamard)
from .csd import (CsdFactors, PhaseFactors, csd, extract_phases, is_complex_d,
                  lighten, normalize_angles, phase_factors_matrix, qr_nonneg)
from .seo import (Control, Instruction, Program, apply_to_state, exchanger_program,
                  expand_controls, instruction_matrix, parse, program_to_matrix,
                  serialize)
from .central import (CentralMatrix, angles_to_theta, complex_d_central,
                      decompose_complex_d, decompose_diagonal, decompose_real_d,
                      decompose_right_angle_case, diagonal_central, level_alias,
                      real_d_central)
from .compiler import (CompileOptions, CsdNode, assemble, build_tree,
                       compile_unitary, pad_to_power_of_two)
from .reference import dft_matrix, hadamard_input, quantum_fft_program

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL", "direct_sum", "frobenius_distance", "is_unitary",
    "state_permutation_matrix", "tensor_product",
    "BitPermutation", "apply_bit_permutation", "basis_change_matrix",
    "bit_reversal_permutation", "gray_sequence", "hadamard_transform",
    "sylvester_hadamard",
    "CsdFactors", "PhaseFactors", "csd", "extract_phases", "is_complex_d",
    "lighten", "normalize_angles", "phase_factors_matrix", "qr_nonneg",
    "Control", "Instruction", "Program", "apply_to_state", "exchanger_program",
    "expand_controls", "instruction_matrix", "parse", "program_to_matrix",
    "serialize",
    "CentralMatrix", "angles_to_theta", "complex_d_central",
    "decompose_complex_d", "decompose_diagonal", "decompose_real_d",
    "decompose_right_angle_case", "diagonal_central", "level_alias",
    "real_d_central",
    "CompileOptions", "CsdNode", "assemble", "build_tree", "compile_unitary",
    "pad_to_power_of_two",
    "dft_matrix", "hadamard_input", "quantum_fft_program",
]
