from core.model import run
from services.qed import TestFamily
from utils.serialization import arch_diff, instruction_to_dict, path_to_steps, sanitize_for_json, state_to_dict
from zoo.builder import hard_reset_instr


class TestSerialization:
    def test_instruction(self, ridecore, example2):
        data = instruction_to_dict(example2[1])
        assert data == {"opcode": "MUL", "out": 15, "ins": [12, 12], "text": "MUL l15, (l12, l12)"}

    def test_hard_reset_carries_target(self, toy4):
        target = toy4.system.initial_state([1, 2, 3, 0])
        assert instruction_to_dict(hard_reset_instr(toy4.system, target))["target"] == [1, 2, 3, 0]

    def test_steps_record_diffs(self, toy4):
        sys_ = toy4.system
        s0 = sys_.initial_state([1, 2, 0, 0])
        path = run(sys_, s0, [sys_.parse_instruction("ADD 0 0 1"), sys_.parse_instruction("MOV 1 1 1")])
        steps = path_to_steps(path)
        assert steps[0]["diff"] == {"l0": [1, 3]}
        assert steps[1]["diff"] == {}
        assert steps[1]["index"] == 2
        assert arch_diff(path.first, path.last) == {"l0": [1, 3]}

    def test_sanitize(self, toy4):
        state = toy4.system.initial_state([0, 1, 2, 3])
        assert sanitize_for_json({"family": TestFamily.STANDARD, "pair": (1, 2), "set": frozenset({3, 1})}) == {
            "family": "standard", "pair": [1, 2], "set": [1, 3]}
        assert state_to_dict(state) == {"arch": [0, 1, 2, 3], "narch": [-1]}
