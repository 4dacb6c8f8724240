import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csdc import (Control, Instruction, Program, apply_to_state, exchanger_program,
                  expand_controls, frobenius_distance, instruction_matrix, parse,
                  program_to_matrix, serialize, state_permutation_matrix)
from csdc.seo import SeoParseError, concat, rename_bits

from conftest import random_program


class TestInstructionValidation:
    def test_repeated_bits_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            Instruction("CNOT", target=0, controls=(Control(0, True),))

    def test_sigx_rejects_angle(self):
        with pytest.raises(ValueError):
            Instruction("SIGX", target=0, angle=10.0)

    def test_phas_rejects_target(self):
        with pytest.raises(ValueError):
            Instruction("PHAS", target=0, angle=10.0)

    def test_cnot_needs_control(self):
        with pytest.raises(ValueError):
            Instruction("CNOT", target=0)

    def test_program_bit_range(self):
        ins = Instruction("SIGX", target=3)
        with pytest.raises(ValueError, match="out of range"):
            Program(2, (ins,))


class TestSerialize:
    def test_cnot_line(self):
        ins = Instruction("CNOT", target=2,
                          controls=(Control(0, True), Control(1, False)))
        assert serialize(Program(3, (ins,))) == "CNOT 0 T 1 F 2\n"

    def test_roty_line(self):
        ins = Instruction("ROTY", target=1, angle=45.0)
        assert serialize(Program(2, (ins,))) == "ROTY 1 45\n"

    def test_phas_line(self):
        assert serialize(Program(1, (Instruction("PHAS", angle=90.0),))) == "PHAS 90\n"

    def test_empty_program(self):
        assert serialize(Program(2)) == ""


class TestParse:
    def test_sigx(self):
        p = parse("SIGX 0")
        assert p.instructions == (Instruction("SIGX", target=0),)
        assert p.nb == 1

    def test_cpha(self):
        p = parse("CPHA 0 T 1 F 90")
        assert p.instructions == (Instruction(
            "CPHA", controls=(Control(0, True), Control(1, False)), angle=90.0),)

    def test_malformed_angle_reports_line(self):
        with pytest.raises(SeoParseError, match="line 1"):
            parse("ROTY 9 x")

    def test_error_line_number_counts_from_one(self):
        with pytest.raises(SeoParseError, match="line 3"):
            parse("SIGX 0\nSIGX 1\nBOGUS 2\n")

    def test_unknown_keyword(self):
        with pytest.raises(SeoParseError, match="unknown keyword"):
            parse("HADA 0")

    def test_phas_with_controls_rejected(self):
        # A controlled phase must be spelled CPHA.
        with pytest.raises(SeoParseError):
            parse("PHAS 0 T 1 F 90")

    def test_repeated_bit_rejected(self):
        with pytest.raises(SeoParseError, match="line 1"):
            parse("CNOT 0 T 0")

    def test_bit_beyond_given_nb(self):
        with pytest.raises(SeoParseError):
            parse("SIGX 5", nb=2)

    def test_blank_lines_skipped(self):
        p = parse("\nSIGX 0\n\nSIGX 1\n")
        assert len(p) == 2 and p.nb == 2

    def test_round_trip_random_programs(self, rng):
        for _ in range(50):
            p = random_program(rng, int(rng.integers(2, 6)), int(rng.integers(0, 12)))
            assert parse(serialize(p), nb=p.nb) == p

    @given(st.lists(st.sampled_from(["ROTY", "ROTZ", "SIGX", "PHAS"]), max_size=8),
           st.data())
    @settings(max_examples=60, deadline=None)
    def test_round_trip_hypothesis(self, kinds, data):
        ins = []
        for kind in kinds:
            angle = data.draw(st.decimals(min_value=-1000, max_value=1000,
                                          places=6).map(float))
            if kind == "SIGX":
                ins.append(Instruction(kind, target=data.draw(st.integers(0, 3))))
            elif kind == "PHAS":
                ins.append(Instruction(kind, angle=angle))
            else:
                ins.append(Instruction(kind, target=data.draw(st.integers(0, 3)),
                                       angle=angle))
        p = Program(4, tuple(ins))
        assert parse(serialize(p), nb=4) == p
        assert serialize(parse(serialize(p))) == serialize(p)


class TestInstructionMatrix:
    def test_roty_90(self):
        m = instruction_matrix(Instruction("ROTY", target=0, angle=90.0), 1)
        assert np.allclose(m, [[0, 1], [-1, 0]], atol=1e-15)

    def test_cnot_is_01_11_transposition(self):
        m = instruction_matrix(
            Instruction("CNOT", target=1, controls=(Control(0, True),)), 2)
        assert np.array_equal(m, state_permutation_matrix(4, [(1, 3)]))

    def test_phas_zero_is_identity(self):
        m = instruction_matrix(Instruction("PHAS", angle=0.0), 2)
        assert np.array_equal(m, np.eye(4).astype(complex))

    def test_rotz(self):
        m = instruction_matrix(Instruction("ROTZ", target=0, angle=90.0), 1)
        assert np.allclose(m, np.diag([1j, -1j]))

    def test_control_polarities(self):
        m = instruction_matrix(
            Instruction("CNOT", target=2,
                        controls=(Control(0, True), Control(1, False))), 3)
        # flips bit 2 exactly on states x01: (001,101) swap.
        assert np.array_equal(m, state_permutation_matrix(8, [(1, 5)]))

    def test_bit_out_of_range(self):
        with pytest.raises(ValueError):
            instruction_matrix(Instruction("SIGX", target=3), 2)


class TestProgramToMatrix:
    def test_empty_is_identity(self):
        assert np.array_equal(program_to_matrix(Program(2)), np.eye(4).astype(complex))

    def test_first_line_acts_first(self):
        # SIGX 0 then CNOT 0 T 1 maps |00> -> |01> -> |11>.
        p = parse("SIGX 0\nCNOT 0 T 1")
        v = np.zeros(4)
        v[0] = 1
        out = program_to_matrix(p) @ v
        assert np.argmax(np.abs(out)) == 3

    def test_matches_instruction_product(self, rng):
        p = random_program(rng, 3, 8)
        mats = [instruction_matrix(i, 3) for i in p]
        expected = np.eye(8, dtype=complex)
        for m in mats:
            expected = m @ expected
        assert frobenius_distance(program_to_matrix(p), expected) < 1e-12

    def test_file_round_trip_same_matrix(self, rng):
        p = random_program(rng, 3, 10)
        q = parse(serialize(p), nb=3)
        assert frobenius_distance(program_to_matrix(p), program_to_matrix(q)) < 1e-12


class TestApplyToState:
    def test_sigx(self):
        out = apply_to_state(parse("SIGX 0"), [1, 0])
        assert np.array_equal(out, [0, 1])

    def test_cnot_on_01(self):
        v = np.zeros(4)
        v[1] = 1  # |01>
        out = apply_to_state(parse("CNOT 0 T 1", nb=2), v)
        expected = np.zeros(4)
        expected[3] = 1  # |11>
        assert np.array_equal(out, expected)

    def test_matches_matrix_path(self, rng):
        for _ in range(15):
            p = random_program(rng, 4, 12)
            v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            direct = apply_to_state(p, v)
            assert np.abs(direct - program_to_matrix(p) @ v).max() < 1e-12

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            apply_to_state(Program(2), np.zeros(3))


class TestExchanger:
    def test_three_cnots(self):
        p = exchanger_program(0, 1, 2)
        assert serialize(p) == "CNOT 1 T 0\nCNOT 0 T 1\nCNOT 1 T 0\n"

    def test_matrix_is_exchanger(self):
        m = program_to_matrix(exchanger_program(0, 1, 2))
        assert np.array_equal(m, state_permutation_matrix(4, [(1, 2)]))

    def test_squares_to_identity(self):
        p = exchanger_program(1, 2, 3)
        twice = concat(p, p)
        assert np.array_equal(program_to_matrix(twice), np.eye(8).astype(complex))

    def test_conjugation_moves_gates(self):
        e = program_to_matrix(exchanger_program(0, 2, 3))
        sx0 = instruction_matrix(Instruction("SIGX", target=0), 3)
        sx2 = instruction_matrix(Instruction("SIGX", target=2), 3)
        assert np.array_equal(e @ sx0 @ e.conj().T, sx2)

    def test_symmetric_in_arguments(self):
        a = program_to_matrix(exchanger_program(0, 2, 3))
        b = program_to_matrix(exchanger_program(2, 0, 3))
        assert np.array_equal(a, b)
        assert serialize(exchanger_program(0, 2, 3)) != serialize(exchanger_program(2, 0, 3))

    def test_rejects_equal_bits(self):
        with pytest.raises(ValueError):
            exchanger_program(1, 1, 2)


class TestExpandControls:
    def test_two_control_cnot(self):
        ins = Instruction("CNOT", target=2,
                          controls=(Control(0, True), Control(1, False)))
        p = Program(3, (ins,))
        ex = expand_controls(p)
        assert all(len(i.bits()) <= 2 for i in ex)
        assert frobenius_distance(program_to_matrix(ex), program_to_matrix(p)) < 1e-12

    def test_single_control_program_unchanged(self, rng):
        p = random_program(rng, 4, 10, max_controls=1)
        assert expand_controls(p) == p

    def test_two_control_cpha_kept_elementary(self):
        ins = Instruction("CPHA", angle=90.0,
                          controls=(Control(0, True), Control(1, True)))
        p = Program(2, (ins,))
        assert expand_controls(p) == p

    def test_three_control_cpha(self):
        ins = Instruction("CPHA", angle=77.0,
                          controls=(Control(0, True), Control(2, False),
                                    Control(3, True)))
        p = Program(4, (ins,))
        ex = expand_controls(p)
        assert all(len(i.bits()) <= 2 for i in ex)
        assert frobenius_distance(program_to_matrix(ex), program_to_matrix(p)) < 1e-12

    def test_gray_structure_of_two_control_expansion(self):
        # All-T two-control c-not: the z-rewrite yields the four commuting
        # factors (one per control subset) as fractional-power rotations.
        ins = Instruction("CNOT", target=2,
                          controls=(Control(0, True), Control(1, True)))
        ex = expand_controls(Program(3, (ins,)))
        rotz = [i for i in ex if i.kind == "ROTZ"]
        assert len(rotz) == 7  # 2**3 - 1 subsets of {target, c0, c1}
        assert {abs(round(i.angle, 6)) for i in rotz} == {22.5}

    def test_random_multi_control_matrix_preserved(self, rng):
        for _ in range(20):
            nb = int(rng.integers(3, 6))
            p = random_program(rng, nb, 4, kinds=["CNOT", "CPHA"], max_controls=3)
            ex = expand_controls(p)
            assert all(len(i.bits()) <= 2 for i in ex)
            assert frobenius_distance(program_to_matrix(ex),
                                      program_to_matrix(p)) < 1e-10


class TestRenameBits:
    def test_rename_sequence(self):
        p = parse("CNOT 0 T 2\nROTY 1 5")
        q = rename_bits(p, [2, 0, 1])
        assert serialize(q) == "CNOT 2 T 1\nROTY 0 5\n"
