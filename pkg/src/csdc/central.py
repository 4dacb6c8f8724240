"""Turn central matrices into gate programs.

A central matrix is the payload of one tree node: a direct sum of 2**(level-1)
D matrices (real or complex), or a diagonal unitary.  A level-``level`` direct
sum equals a bit relabeling of a single big D matrix whose rotation sits on
bit nb-1, so one emission routine serves every level: build the program for
the un-relabeled form, then rename bits through the level's alias permutation.

Rotation ladders follow the lazy (Gray) ordering so that one c-not survives
between adjacent rotations, and rotations with negligible angles are dropped
with their flanking c-nots merged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitops import BitPermutation, basis_change_matrix, gray_sequence, hadamard_transform
from .csd import PhaseFactors, _wrap_deg
from .seo import Control, Instruction, Program, concat, rename_bits, z_ladder

# Rotations at or below this angle (degrees) are suppressed and their flanking
# c-nots merged; this is what lets structured inputs collapse to short programs.
PRUNE_TOL = 1e-10

# Angle tolerance for recognizing the {0deg, 90deg} special case.
RIGHT_ANGLE_TOL = 1e-8


@dataclass(frozen=True)
class CentralMatrix:
    """Tagged central-matrix payload.

    variant "realD":    ``angles`` holds the 2**(nb-1) rotation angles, block
                        by block (level ``level`` means 2**(level-1) blocks).
    variant "complexD": ``blocks`` holds one PhaseFactors per D block.
    variant "diagonal": ``phases`` holds the 2**nb diagonal phases; level is
                        nb+1 by convention.
    """

    variant: str
    nb: int
    level: int
    angles: np.ndarray | None = None
    blocks: tuple[PhaseFactors, ...] | None = None
    phases: np.ndarray | None = None

    def __post_init__(self):
        if self.variant == "realD":
            if self.angles is None or len(self.angles) != 1 << (self.nb - 1):
                raise ValueError(f"realD central needs {1 << (self.nb - 1)} angles")
            if not 1 <= self.level <= self.nb:
                raise ValueError(f"realD level must be in [1, nb], got {self.level}")
        elif self.variant == "complexD":
            if self.blocks is None or len(self.blocks) != 1 << (self.level - 1):
                raise ValueError(f"complexD central at level {self.level} needs "
                                 f"{1 << (self.level - 1)} blocks")
            if not 1 <= self.level <= self.nb:
                raise ValueError(f"complexD level must be in [1, nb], got {self.level}")
            per_block = 1 << (self.nb - self.level)
            for pf in self.blocks:
                if pf.half_dim != per_block:
                    raise ValueError(f"complexD block size {pf.half_dim} != {per_block}")
        elif self.variant == "diagonal":
            if self.phases is None or len(self.phases) != 1 << self.nb:
                raise ValueError(f"diagonal central needs {1 << self.nb} phases")
        else:
            raise ValueError(f"unknown central-matrix variant {self.variant!r}")


def real_d_central(nb: int, level: int, angles) -> CentralMatrix:
    return CentralMatrix("realD", nb, level, angles=np.asarray(angles, dtype=np.float64))


def complex_d_central(nb: int, level: int, blocks) -> CentralMatrix:
    return CentralMatrix("complexD", nb, level, blocks=tuple(blocks))


def diagonal_central(nb: int, phases) -> CentralMatrix:
    return CentralMatrix("diagonal", nb, nb + 1,
                         phases=np.asarray(phases, dtype=np.float64))


def level_alias(nb: int, level: int) -> BitPermutation:
    """Bit relabeling that turns the rotation-on-top D form into a direct sum
    of 2**(level-1) blocks: the rotation bit nb-1 moves to nb-level and the
    displaced bits shift up by one."""
    if not 1 <= level <= nb:
        raise ValueError(f"level must be in [1, nb], got {level}")
    cut = nb - level
    mapping = [p + 1 if cut <= p <= nb - 2 else p for p in range(nb)]
    mapping[nb - 1] = cut
    return BitPermutation(nb, tuple(mapping))


def angles_to_theta(phi) -> np.ndarray:
    """Hadamard-transformed rotation angles: theta = H_k phi / 2**k.

    The inverse map is phi = H_k theta, so the round trip is exact up to
    floating point.
    """
    v = np.asarray(phi, dtype=np.float64)
    n = len(v)
    if n == 0 or n & (n - 1):
        raise ValueError(f"angle vector length must be a power of two, got {n}")
    return hadamard_transform(v) / n


def _alias_rename(prog: Program, nb: int, level: int) -> Program:
    perm = level_alias(nb, level)
    return prog if perm.is_identity() else rename_bits(prog, perm)


def decompose_real_d(c: CentralMatrix, prune_tol: float = PRUNE_TOL) -> Program:
    """ROTY ladder for a real D direct sum.

    Walking the Gray sequence, each step contributes a rotation of the top bit
    by the transformed angle followed by one c-not controlled by the bit the
    step flips; skipped (negligible) rotations merge their flanking c-nots by
    XOR-ing the accumulated control set.
    """
    if c.variant != "realD":
        raise ValueError("decompose_real_d needs a realD central matrix")
    nb = c.nb
    theta = _wrap_deg(angles_to_theta(c.angles))
    target = nb - 1
    out: list[Instruction] = []
    if nb == 1:
        if abs(theta[0]) > prune_tol:
            out.append(Instruction("ROTY", target=0, angle=float(theta[0])))
        return Program(1, tuple(out))

    def cnots(mask: int) -> None:
        for b in range(nb - 1):
            if mask >> b & 1:
                out.append(Instruction("CNOT", target=target, controls=(Control(b, True),)))

    seq = gray_sequence(nb - 1)
    pending = 0
    prev = 0
    for b in seq:
        pending ^= b ^ prev
        prev = b
        if abs(theta[b]) > prune_tol:
            cnots(pending)
            pending = 0
            out.append(Instruction("ROTY", target=target, angle=float(theta[b])))
    pending ^= seq[-1]
    cnots(pending)
    return _alias_rename(Program(nb, tuple(out)), nb, c.level)


def decompose_diagonal(c: CentralMatrix, mode: str = "rotz-chain",
                       prune_tol: float = PRUNE_TOL) -> Program:
    """Program for a diagonal unitary diag(exp(i phases)).

    ``rotz-chain``: Hadamard-transform the phases and emit the sigma_z ladder
    (PHAS for the empty subset, ROTZ for single bits, c-not conjugated ROTZ
    for larger subsets), Gray-ordered with c-not cancellation.

    ``controlled-phase``: rewrite over products of number operators; the
    all-T controlled phases come out directly as CPHA instructions, single-bit
    terms as one accumulated PHAS plus a ROTZ per bit.
    """
    if c.variant != "diagonal":
        raise ValueError("decompose_diagonal needs a diagonal central matrix")
    nb = c.nb
    if mode == "rotz-chain":
        theta = _wrap_deg(angles_to_theta(c.phases))
        return Program(nb, tuple(z_ladder(list(range(nb)), theta, prune_tol)))
    if mode != "controlled-phase":
        raise ValueError(f"unknown diagonal mode {mode!r}")
    # Coefficients over the number-operator basis: theta' = M^T phi with M the
    # projector-to-number basis change.
    m = basis_change_matrix("projector-to-number", nb).real
    theta = _wrap_deg(m.T @ np.asarray(c.phases, dtype=np.float64))
    out: list[Instruction] = []
    phas_total = float(theta[0])
    rotz: list[tuple[int, float]] = []
    cpha: list[tuple[int, float]] = []
    for b in range(1, 1 << nb):
        t = float(theta[b])
        if abs(t) <= prune_tol:
            continue
        if b & (b - 1) == 0:
            # exp(i t n(beta)) = exp(i t/2) exp(-i (t/2) sigma_z(beta))
            phas_total += t / 2.0
            rotz.append((b.bit_length() - 1, -t / 2.0))
        else:
            cpha.append((b, t))
    phas_total = float(_wrap_deg(phas_total))
    if abs(phas_total) > prune_tol:
        out.append(Instruction("PHAS", angle=phas_total))
    for bit, ang in rotz:
        out.append(Instruction("ROTZ", target=bit, angle=ang))
    for mask, ang in cpha:
        controls = tuple(Control(b, True) for b in range(nb) if mask >> b & 1)
        out.append(Instruction("CPHA", controls=controls, angle=ang))
    return Program(nb, tuple(out))


def decompose_complex_d(c: CentralMatrix, diag_mode: str = "controlled-phase",
                        use_right_angle: bool = False,
                        prune_tol: float = PRUNE_TOL) -> Program:
    """Split a complex D direct sum into right diagonal, real core, left diagonal.

    Per block, the parameters give Δ_L = I ⊕ Γ_L and Δ_R = Γ ⊕ Γ Γ_R around a
    real rotation core; the three pieces are emitted in application order
    (right diagonal first).
    """
    if c.variant != "complexD":
        raise ValueError("decompose_complex_d needs a complexD central matrix")
    nb, level = c.nb, c.level
    rot = nb - level                      # aliased rotation bit position
    states = np.arange(1 << nb)
    blk = states >> (rot + 1)
    hi = (states >> rot) & 1
    j = states & ((1 << rot) - 1)
    omega = np.stack([pf.omega for pf in c.blocks])
    omega_l = np.stack([pf.omega_l for pf in c.blocks])
    omega_r = np.stack([pf.omega_r for pf in c.blocks])
    phi_r = omega[blk, j] + hi * omega_r[blk, j]
    phi_l = hi * omega_l[blk, j]
    core = real_d_central(nb, level, np.concatenate([pf.thetas for pf in c.blocks]))
    prog_r = decompose_diagonal(diagonal_central(nb, phi_r), diag_mode, prune_tol)
    prog_core = _real_core_program(core, use_right_angle, prune_tol)
    prog_l = decompose_diagonal(diagonal_central(nb, phi_l), diag_mode, prune_tol)
    return concat(prog_r, prog_core, prog_l)


def is_right_angle(angles, tol: float = RIGHT_ANGLE_TOL) -> bool:
    """True iff every angle is 0 or 90 degrees within tol."""
    a = np.asarray(angles, dtype=np.float64)
    return bool(np.all((np.abs(a) <= tol) | (np.abs(a - 90.0) <= tol)))


def decompose_right_angle_case(c: CentralMatrix, prune_tol: float = PRUNE_TOL) -> Program:
    """Special handling when every D angle is 0 or 90 degrees.

    A bare 90-degree rotation stays a single ROTY; the one-control form (the
    90s fill exactly the half selected by one control bit) becomes a c-not
    followed by a two-control 180-degree phase; anything else falls back to
    the generic ladder.
    """
    if c.variant != "realD":
        raise ValueError("decompose_right_angle_case needs a realD central matrix")
    if not is_right_angle(c.angles):
        raise ValueError("decompose_right_angle_case needs angles in {0, 90} degrees")
    nb = c.nb
    on = np.abs(np.asarray(c.angles, dtype=np.float64) - 90.0) <= RIGHT_ANGLE_TOL
    target = nb - 1
    if not np.any(on):
        return Program(nb, ())
    if np.all(on):
        prog = Program(nb, (Instruction("ROTY", target=target, angle=90.0),))
        return _alias_rename(prog, nb, c.level)
    idx = np.arange(1 << (nb - 1))
    for delta in range(nb - 1):
        for pol in (True, False):
            if np.array_equal(on, ((idx >> delta) & 1) == (1 if pol else 0)):
                ctrl = Control(delta, pol)
                prog = Program(nb, (
                    Instruction("CNOT", target=target, controls=(ctrl,)),
                    Instruction("CPHA", angle=180.0,
                                controls=(ctrl, Control(target, True))),
                ))
                return _alias_rename(prog, nb, c.level)
    return decompose_real_d(c, prune_tol)


def _real_core_program(c: CentralMatrix, use_right_angle: bool, prune_tol: float) -> Program:
    if use_right_angle and is_right_angle(c.angles):
        return decompose_right_angle_case(c, prune_tol)
    return decompose_real_d(c, prune_tol)


def decompose_central(c: CentralMatrix, diag_mode: str = "controlled-phase",
                      use_right_angle: bool = True,
                      prune_tol: float = PRUNE_TOL) -> Program:
    """Dispatch a central matrix to its emission routine."""
    if c.variant == "diagonal":
        return decompose_diagonal(c, diag_mode, prune_tol)
    if c.variant == "realD":
        return _real_core_program(c, use_right_angle, prune_tol)
    return decompose_complex_d(c, diag_mode, use_right_angle, prune_tol)
