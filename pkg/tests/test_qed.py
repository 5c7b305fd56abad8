import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.duplication import dup_instr, dup_seq
from core.model import step
from core.shared import PreconditionError
from services.qed import (
    Outcome, QedTest, TestFamily, TestMeta, enumerate_qed_consistent_inits, is_qed_test, mirror,
    qed_consistent, qed_consistent_dual, qed_mismatches, run_qed_test,
)


def example_init(entry):
    arch = [0] * 32
    arch[12] = arch[28] = 3
    return entry.system.initial_state(arch)


@pytest.fixture(scope="module")
def tests_of_example(ridecore, example2):
    m = ridecore.dup_map
    o1, o2 = example2
    short = (o1, o2) + dup_seq(m, (o1, o2))
    long = (o2, o1, o2) + dup_seq(m, (o2, o1, o2))
    interleaved = (o1, dup_instr(m, o1), o2, dup_instr(m, o2))
    return short, long, interleaved


class TestConsistency:
    def test_mirrored_state_is_consistent(self, offset32):
        arch = mirror(offset32, list(range(16)) + [0] * 16)
        assert arch[16:] == tuple(range(16))

    @given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
    def test_dual_formulation_agrees(self, toy4, arch):
        s = toy4.system.initial_state(arch)
        m = toy4.dup_map
        assert qed_consistent(m, s) == qed_consistent_dual(m, s) == (not qed_mismatches(m, s))
        assert qed_consistent(m, toy4.system.initial_state(mirror(m, arch)))

    def test_mismatches_listed_in_location_order(self, toy4):
        s = toy4.system.initial_state([1, 2, 0, 0])
        assert qed_mismatches(toy4.dup_map, s) == [(0, 2), (1, 3)]


class TestBackToBackMul:
    @pytest.mark.parametrize("name", ["ridecore", "ridecore_ordered"])
    def test_short_test_passes(self, request, name, tests_of_example):
        entry = request.getfixturevalue(name)
        short, _, _ = tests_of_example
        verdict = run_qed_test(entry.system, entry.dup_map, QedTest(short, TestFamily.STANDARD), example_init(entry))
        assert verdict.outcome == Outcome.PASS
        assert verdict.witness is None

    @pytest.mark.parametrize("name", ["ridecore", "ridecore_ordered"])
    def test_long_test_fails_on_l15(self, request, name, tests_of_example):
        entry = request.getfixturevalue(name)
        _, long, _ = tests_of_example
        verdict = run_qed_test(entry.system, entry.dup_map, QedTest(long, TestFamily.STANDARD), example_init(entry))
        assert verdict.failed
        assert verdict.witness == (15, 31)
        assert (12, 28) in verdict.mismatches
        final = verdict.trace.last
        assert (final[15], final[31]) == (1, 4)

    def test_interleaved_test_fails(self, ridecore, tests_of_example):
        _, _, interleaved = tests_of_example
        test = QedTest(interleaved, TestFamily.INTERLEAVED, TestMeta(interleaved=True))
        verdict = run_qed_test(ridecore.system, ridecore.dup_map, test, example_init(ridecore))
        assert verdict.failed
        assert verdict.witness == (15, 31)

    def test_trace_has_one_state_per_step(self, ridecore, tests_of_example):
        _, long, _ = tests_of_example
        verdict = run_qed_test(ridecore.system, ridecore.dup_map, QedTest(long, TestFamily.STANDARD),
                               example_init(ridecore))
        assert len(verdict.trace.states) == len(long) + 1


class TestPreconditions:
    def test_inconsistent_start_rejected(self, ridecore, tests_of_example):
        short, _, _ = tests_of_example
        arch = [0] * 32
        arch[12] = 3
        with pytest.raises(PreconditionError):
            run_qed_test(ridecore.system, ridecore.dup_map, QedTest(short, TestFamily.STANDARD),
                         ridecore.system.initial_state(arch))

    def test_non_initial_start_rejected(self, ridecore, tests_of_example, example2):
        short, _, _ = tests_of_example
        s1 = step(ridecore.system, example_init(ridecore), example2[0])
        consistent = type(s1)(mirror(ridecore.dup_map, s1.arch), s1.narch)
        with pytest.raises(PreconditionError):
            run_qed_test(ridecore.system, ridecore.dup_map, QedTest(short, TestFamily.STANDARD), consistent)


class TestFamilies:
    def test_standard_membership(self, ridecore, tests_of_example):
        short, long, interleaved = tests_of_example
        m = ridecore.dup_map
        assert is_qed_test(m, short, TestFamily.STANDARD)
        assert is_qed_test(m, long, TestFamily.STANDARD)
        assert not is_qed_test(m, interleaved, TestFamily.STANDARD)
        assert not is_qed_test(m, short[:3], TestFamily.STANDARD)

    def test_interleaved_membership(self, ridecore, tests_of_example):
        short, _, interleaved = tests_of_example
        m = ridecore.dup_map
        assert is_qed_test(m, interleaved, TestFamily.INTERLEAVED)
        assert is_qed_test(m, short, TestFamily.INTERLEAVED)
        # duplicate ahead of its original
        assert not is_qed_test(m, (interleaved[1], interleaved[0]) + interleaved[2:], TestFamily.INTERLEAVED)

    def test_extended_membership(self, ridecore, tests_of_example):
        short, _, interleaved = tests_of_example
        m = ridecore.dup_map
        nop = ridecore.system.parse_instruction("NOP")
        padded = short[:2] + (nop, nop) + short[2:]
        assert is_qed_test(m, padded, TestFamily.EXTENDED)
        assert not is_qed_test(m, padded, TestFamily.STANDARD)
        mixed = interleaved[:1] + (nop,) + interleaved[1:]
        assert not is_qed_test(m, mixed, TestFamily.EXTENDED)
        assert is_qed_test(m, mixed, TestFamily.EXTENDED, allow_interleaving=True)

    def test_mixed_instruction_is_never_part_of_a_test(self, ridecore):
        mixed = ridecore.system.parse_instruction("ADD 12 20 4")
        for family in (TestFamily.STANDARD, TestFamily.INTERLEAVED, TestFamily.EXTENDED):
            assert not is_qed_test(ridecore.dup_map, (mixed, mixed), family)


class TestConsistentInits:
    def test_support_varies_only_touched_originals(self, ridecore):
        inits = enumerate_qed_consistent_inits(ridecore.system, ridecore.dup_map, alphabet=ridecore.search_alphabet)
        # ADD 12 4 15 and MUL 15 12 12 touch l4, l12 and l15
        assert len(inits) == 16 ** 3
        assert inits[0].arch == (0,) * 32
        for s in inits[:50]:
            assert qed_consistent(ridecore.dup_map, s)
            assert ridecore.system.is_initial(s)

    def test_zero_strategy(self, toy4):
        inits = enumerate_qed_consistent_inits(toy4.system, toy4.dup_map, strategy="zero")
        assert [s.arch for s in inits] == [(0, 0, 0, 0)]

    def test_sampling_is_seeded(self, ridecore):
        first = enumerate_qed_consistent_inits(ridecore.system, ridecore.dup_map, strategy="sample",
                                               samples=20, seed=7)
        second = enumerate_qed_consistent_inits(ridecore.system, ridecore.dup_map, strategy="sample",
                                                samples=20, seed=7)
        assert first == second
        assert all(qed_consistent(ridecore.dup_map, s) for s in first)
