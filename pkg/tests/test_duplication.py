import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.duplication import (
    InstrClass, classify_instr, dup_instr, dup_seq, duplicate_instructions, make_dup_map,
    original_instructions, undup_instr,
)
from core.shared import DupMapError, NotDuplicateError, NotOriginalError


class TestDupMap:
    def test_offset_map_pairs_lower_and_upper_half(self, offset32):
        assert offset32.d(12) == 28
        assert offset32.d_inv(31) == 15
        assert offset32.originals == frozenset(range(16))
        assert offset32.duplicates == frozenset(range(16, 32))

    def test_parity_map_pairs_neighbours(self, parity32):
        assert parity32.d(12) == 13
        assert parity32.d_inv(5) == 4
        assert all(loc % 2 == 0 for loc in parity32.originals)

    def test_overlapping_partition_rejected(self):
        with pytest.raises(DupMapError) as e:
            make_dup_map([0, 1], [(0, 1), (1, 2)], 4)
        assert e.value.location == 1

    def test_non_injective_mapping_rejected(self):
        with pytest.raises(DupMapError):
            make_dup_map([0, 1], [(0, 2), (1, 2)], 4)

    def test_missing_duplicate_rejected(self):
        with pytest.raises(DupMapError):
            make_dup_map([0, 1], [(0, 2)], 4)

    def test_odd_location_count_rejected(self):
        with pytest.raises(DupMapError):
            make_dup_map([0], [(0, 1)], 3)

    def test_consistency_predicates_agree(self, offset32):
        assert {offset32.d(o) for o in offset32.originals} == offset32.duplicates


class TestInstructionDuplication:
    def test_add_under_both_maps(self, ridecore, offset32, parity32):
        add = ridecore.system.parse_instruction("ADD 12 4 8")
        offset = dup_instr(offset32, add)
        parity = dup_instr(parity32, add)
        assert (offset.out, offset.ins) == (28, (20, 24))
        assert (parity.out, parity.ins) == (13, (5, 9))
        assert offset.opcode == add.opcode

    def test_sequence_duplication_keeps_order(self, ridecore, example2, offset32):
        o1, o2 = example2
        d1, d2 = dup_seq(offset32, (o1, o2))
        assert (d1.out, d1.ins) == (28, (20, 31))
        assert (d2.out, d2.ins) == (31, (28, 28))

    def test_mixed_instruction_cannot_be_duplicated(self, ridecore, offset32):
        mixed = ridecore.system.parse_instruction("ADD 12 20 4")
        assert classify_instr(offset32, mixed) == InstrClass.MIXED
        with pytest.raises(NotOriginalError):
            dup_instr(offset32, mixed)

    def test_non_original_position_is_reported(self, ridecore, example2, offset32):
        o1, _ = example2
        with pytest.raises(NotOriginalError) as e:
            dup_seq(offset32, (o1, dup_instr(offset32, o1)))
        assert e.value.index == 1

    def test_undup_requires_duplicate(self, example2, offset32):
        with pytest.raises(NotDuplicateError):
            undup_instr(offset32, example2[0])

    def test_alphabet_partition(self, toy4):
        sys_, m = toy4.system, toy4.dup_map
        originals = original_instructions(sys_, m, sys_.regular_alphabet)
        duplicates = duplicate_instructions(sys_, m, sys_.regular_alphabet)
        assert len(originals) == len(duplicates) == 3 * 2 ** 3
        assert {dup_instr(m, i) for i in originals} == set(duplicates)


@given(out=st.integers(0, 15), a=st.integers(0, 15), b=st.integers(0, 15),
       op=st.sampled_from(["ADD", "MUL", "MOV"]))
def test_undup_inverts_dup(ridecore, offset32, parity32, out, a, b, op):
    instr = ridecore.system.instruction(op, out, a, b)
    for m in (offset32, parity32):
        if classify_instr(m, instr) != InstrClass.ORIGINAL:
            continue
        dup = dup_instr(m, instr)
        assert classify_instr(m, dup) == InstrClass.DUPLICATE
        assert undup_instr(m, dup) == instr
