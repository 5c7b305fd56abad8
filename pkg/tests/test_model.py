import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.model import Instruction, Path, State, enumerate_reachable, explore, extend_path, is_nop, run, sequence_key, step
from core.shared import BudgetExceededError, DomainError
from zoo.builder import hard_reset_instr


class TestStep:
    def test_add_writes_sum_and_records_history(self, toy4):
        sys_ = toy4.system
        s0 = sys_.initial_state([1, 2, 0, 0])
        s1 = step(sys_, s0, sys_.parse_instruction("ADD 0 0 1"))
        assert s1.arch == (3, 2, 0, 0)
        assert s1.narch == (sys_.opcode("ADD").id,)

    def test_values_wrap_modulo(self, toy4):
        sys_ = toy4.system
        s0 = sys_.initial_state([3, 3, 0, 0])
        assert step(sys_, s0, sys_.parse_instruction("MUL 2 0 1")).arch == (3, 3, 1, 0)

    def test_mov_onto_itself_keeps_arch(self, toy4):
        sys_ = toy4.system
        mov = sys_.parse_instruction("MOV 2 2 2")
        s0 = sys_.initial_state([1, 2, 3, 0])
        assert is_nop(mov)
        assert step(sys_, s0, mov).arch == s0.arch

    def test_out_of_range_location_rejected(self, toy4):
        sys_ = toy4.system
        with pytest.raises(DomainError):
            sys_.parse_instruction("ADD 4 0 1")

    def test_foreign_value_rejected(self, toy4):
        with pytest.raises(DomainError):
            toy4.system.initial_state([4, 0, 0, 0])

    def test_hard_reset_text_rejected(self, toy4):
        with pytest.raises(DomainError, match="hard_reset_instr"):
            toy4.system.parse_instruction("HRST 0 0 0")

    def test_hard_reset_needs_initial_target(self, toy4):
        sys_ = toy4.system
        hrst = sys_.opcode("HRST")
        s0 = sys_.initial_state([0, 1, 2, 3])
        with pytest.raises(DomainError):
            step(sys_, s0, Instruction(hrst, 0, (0, 0)))
        moved = step(sys_, s0, sys_.parse_instruction("ADD 0 1 2"))
        with pytest.raises(DomainError):
            step(sys_, s0, Instruction(hrst, 0, (0, 0), moved))

    def test_hard_reset_returns_target(self, toy4):
        sys_ = toy4.system
        target = sys_.initial_state([1, 2, 3, 0])
        s1 = step(sys_, sys_.initial_state([0, 1, 2, 3]), hard_reset_instr(sys_, target))
        assert isinstance(s1, State)
        assert s1 == target

    def test_unknown_opcode_rejected(self, toy4):
        with pytest.raises(DomainError):
            toy4.system.parse_instruction("DIV 0 1 2")

    def test_soft_reset_restores_initial_narch(self, toy4):
        sys_ = toy4.system
        s0 = sys_.initial_state([1, 2, 0, 0])
        s1 = step(sys_, s0, sys_.parse_instruction("MUL 3 0 1"))
        s2 = step(sys_, s1, sys_.parse_instruction("SRST"))
        assert s2.arch == s1.arch
        assert sys_.is_initial(s2)


class TestRun:
    def test_empty_sequence_is_single_state_path(self, toy4):
        s0 = toy4.system.initial_state([0, 1, 2, 3])
        path = run(toy4.system, s0, [])
        assert path.states == (s0,)
        assert len(path) == 0
        assert path.first == path.last == s0

    def test_extend_matches_single_run(self, toy4, example_seq):
        sys_ = toy4.system
        s0 = sys_.initial_state([1, 2, 3, 0])
        whole = run(sys_, s0, example_seq)
        split = extend_path(sys_, run(sys_, s0, example_seq[:1]), example_seq[1:])
        assert whole == split

    def test_path_shape_is_checked(self, toy4):
        s0 = toy4.system.initial_state([0, 0, 0, 0])
        with pytest.raises(DomainError):
            Path((s0, s0), ())

    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_run_is_deterministic(self, toy4, data):
        sys_ = toy4.system
        seq = data.draw(st.lists(st.sampled_from(sys_.regular_alphabet), max_size=5))
        arch = data.draw(st.tuples(*[st.integers(0, 3)] * 4))
        s0 = sys_.initial_state(arch)
        assert run(sys_, s0, seq) == run(sys_, s0, seq)


@pytest.fixture
def example_seq(toy4):
    sys_ = toy4.system
    return [sys_.parse_instruction(t) for t in ("ADD 0 0 1", "MUL 2 0 0", "MOV 1 2 2")]


class TestReachability:
    def test_depth_zero_is_the_inits(self, toy4):
        inits = [toy4.system.initial_state([0, 0, 0, 0])]
        assert enumerate_reachable(toy4.system, inits, 0) == frozenset(inits)

    def test_monotone_in_depth(self, toy4):
        sys_ = toy4.system
        inits = [sys_.initial_state([1, 2, 0, 0])]
        alphabet = toy4.search_alphabet
        sizes = [len(enumerate_reachable(sys_, inits, k, alphabet=alphabet)) for k in range(3)]
        assert sizes == sorted(sizes)
        assert enumerate_reachable(sys_, inits, 1, alphabet=alphabet) <= enumerate_reachable(
            sys_, inits, 2, alphabet=alphabet)

    def test_witness_paths_replay(self, toy4):
        sys_ = toy4.system
        inits = [sys_.initial_state([1, 2, 0, 0])]
        exploration = explore(sys_, inits, 2, alphabet=toy4.search_alphabet)
        for state in exploration.layer(2)[:25]:
            root, instrs = exploration.path_to(state)
            assert len(instrs) == 2
            assert run(sys_, root, instrs).last == state

    def test_budget_exhaustion_carries_partial(self, toy4):
        sys_ = toy4.system
        inits = [sys_.initial_state([1, 2, 0, 0])]
        with pytest.raises(BudgetExceededError) as e:
            explore(sys_, inits, 3, alphabet=toy4.search_alphabet, max_states=10)
        assert e.value.partial is not None
        assert not e.value.partial.complete
        assert e.value.partial_count > 10

    def test_negative_depth_rejected(self, toy4):
        with pytest.raises(DomainError):
            explore(toy4.system, [toy4.system.initial_state([0, 0, 0, 0])], -1)


class TestOrdering:
    def test_shorter_sequences_sort_first(self, toy4):
        sys_ = toy4.system
        short = [sys_.parse_instruction("MUL 1 1 1")]
        long = [sys_.parse_instruction("ADD 0 0 0")] * 2
        assert sequence_key(short) < sequence_key(long)

    def test_state_renders_both_components(self):
        assert str(State((1, 2), (-1,))) == "[1, 2] | [-1]"
