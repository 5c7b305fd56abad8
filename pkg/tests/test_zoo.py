import json

import pytest

from core.model import OpcodeRole, step
from core.shared import ConfigError, DomainError, UnsupportedError
from zoo.builder import build_system, hard_reset_instr, nop_instructions, soft_reset_instr
from zoo.corpus import corpus_names, entry_from_config, load_entry
from zoo.expressions import compile_expression, is_idempotent
from zoo.schemas import parse_processor_config


def config_text(**system_overrides):
    system = {
        "name": "tiny",
        "value_modulus": 4,
        "location_count": 4,
        "opcodes": [{"name": "add", "expression": "a + b"}, {"name": "MOV", "expression": "a"}],
    }
    system.update(system_overrides)
    return json.dumps({"system": system}, indent=2)


class TestExpressions:
    def test_table_reduced_modulo(self):
        table = compile_expression("a * b", 4)
        assert table[3][3] == 1
        assert table[2][2] == 0

    def test_conditional_and_functions(self):
        table = compile_expression("max(a, b) if a > 1 else 0", 4)
        assert table[1][3] == 0
        assert table[2][3] == 3

    def test_partial_expression_rejected(self):
        with pytest.raises(ConfigError, match="not total"):
            compile_expression("a // b", 4)

    def test_oversized_shift_and_power_rejected(self):
        with pytest.raises(ConfigError, match="LShift"):
            compile_expression("a << 10**11", 4)
        with pytest.raises(ConfigError, match="Pow"):
            compile_expression("a ** 10**6", 4)
        with pytest.raises(ConfigError, match="bits"):
            compile_expression("((b + 7) ** 4000) ** 4000", 4)

    def test_moderate_power_is_exact(self):
        table = compile_expression("a ** 100 + (b << 70)", 4)
        assert table[3][1] == pow(3, 100, 4)
        assert table[2][2] == 0

    def test_arbitrary_python_rejected(self):
        with pytest.raises(ConfigError):
            compile_expression("__import__('os')", 4)

    def test_idempotence(self):
        assert is_idempotent(compile_expression("a", 4))
        assert is_idempotent(compile_expression("max(a, b)", 4))
        assert not is_idempotent(compile_expression("a + b", 4))


class TestParse:
    def test_minimal_config_gets_defaults(self):
        cfg = parse_processor_config(config_text())
        assert cfg.system.opcodes[0].name == "ADD"
        assert cfg.search.bound == 2
        assert cfg.dup_map.scheme == "offset"

    def test_odd_location_count_points_at_field_and_line(self):
        text = config_text(location_count=5)
        with pytest.raises(ConfigError) as e:
            parse_processor_config(text, source="tiny.json")
        assert e.value.field == "system.location_count"
        assert text.splitlines()[e.value.line - 1].strip().startswith('"location_count"')

    def test_invalid_json_reports_line(self):
        with pytest.raises(ConfigError) as e:
            parse_processor_config('{\n  "system": {\n    "name": ,\n  }\n}')
        assert e.value.line == 3

    def test_reserved_opcode_name_rejected(self):
        with pytest.raises(ConfigError, match="reserved"):
            parse_processor_config(config_text(opcodes=[{"name": "NOP", "expression": "a"}]))

    def test_type_b_needs_target(self):
        injections = [{"trigger": {"opcode": "ADD"}, "effect": {"kind": "type_b"}}]
        with pytest.raises(ConfigError, match="target"):
            parse_processor_config(config_text(injections=injections))

    def test_history_pattern_longer_than_window_rejected(self):
        injections = [{"trigger": {"opcode": "ADD", "history": ["ADD", "ADD"]},
                       "effect": {"kind": "type_a"}}]
        with pytest.raises(ConfigError, match="history"):
            parse_processor_config(config_text(injections=injections))

    def test_forwarding_needs_tracked_outputs(self):
        injections = [{"trigger": {"opcode": "ADD", "prev_out_feeds_input": True},
                       "effect": {"kind": "type_a"}}]
        with pytest.raises(ConfigError, match="track_outputs"):
            parse_processor_config(config_text(injections=injections))


class TestBuild:
    def test_extension_opcodes_follow_regular_ones(self):
        cfg = parse_processor_config(config_text(soft_reset=True, hard_reset=True))
        sys_, spec = build_system(cfg)
        assert [op.name for op in sys_.opcodes] == ["ADD", "MOV", "NOP", "SRST", "HRST"]
        assert [op.role for op in sys_.opcodes][2:] == [
            OpcodeRole.NOP, OpcodeRole.SOFT_RESET, OpcodeRole.HARD_RESET]
        spec.covers(sys_)

    def test_history_window_size(self, toy4, ridecore_ordered):
        # START plus ADD, MUL, MOV and NOP per history slot
        assert len(toy4.system.narch_states) == 5
        assert len(ridecore_ordered.system.narch_states) == 25

    def test_injection_only_fires_on_trigger(self, mulmul4):
        sys_ = mulmul4.system
        mul = sys_.parse_instruction("MUL 1 0 0")
        s0 = sys_.initial_state([3, 0, 0, 0])
        s1 = step(sys_, s0, mul)
        s2 = step(sys_, s1, mul)
        assert s1.arch[1] == 1
        assert s2.arch[1] == 2

    def test_stomp_clears_target(self, stomp4):
        sys_ = stomp4.system
        s0 = sys_.initial_state([1, 1, 2, 3])
        s2 = step(sys_, step(sys_, s0, sys_.parse_instruction("ADD 0 0 1")), sys_.parse_instruction("MUL 1 0 0"))
        assert s2.arch == (2, 0, 2, 0)

    def test_spec_override_leaves_implementation(self, corrupted_toy4):
        sys_, spec = corrupted_toy4.system, corrupted_toy4.spec
        mul = sys_.parse_instruction("MUL 2 0 1")
        s0 = sys_.initial_state([2, 3, 0, 0])
        assert step(sys_, s0, mul).arch[2] == 2
        assert spec.expected(s0, mul) == 3

    def test_reset_instructions(self, toy4):
        sys_ = toy4.system
        assert soft_reset_instr(sys_).opcode.name == "SRST"
        target = sys_.initial_state([1, 2, 3, 0])
        assert step(sys_, target, hard_reset_instr(sys_, target)) == target

    def test_hard_reset_target_must_be_initial(self, toy4):
        sys_ = toy4.system
        s1 = step(sys_, sys_.initial_state([0, 0, 0, 0]), sys_.parse_instruction("ADD 0 0 0"))
        with pytest.raises(DomainError):
            hard_reset_instr(sys_, s1)

    def test_resets_missing(self):
        sys_, _ = build_system(parse_processor_config(config_text()))
        with pytest.raises(UnsupportedError):
            soft_reset_instr(sys_)
        with pytest.raises(UnsupportedError):
            hard_reset_instr(sys_, sys_.initial_state([0, 0, 0, 0]))

    def test_nop_set_includes_self_moves(self, toy4):
        names = [str(i) for i in nop_instructions(toy4.system)]
        assert names[0] == "NOP l0, (l0, l0)"
        assert "MOV l3, (l3, l3)" in names
        assert not any(n.startswith("ADD") for n in names)


class TestCorpus:
    def test_builtin_names(self):
        names = corpus_names()
        for expected in ("toy4", "mulmul4", "stomp4", "both4", "fwd4", "single4", "deep4",
                         "ridecore-lite", "ridecore-lite-ordered"):
            assert expected in names
        assert "toy4-corrupted-spec" not in names

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="toy4"):
            load_entry("no-such-system")

    def test_alphabet_must_be_original(self):
        cfg = parse_processor_config(json.dumps({
            "system": json.loads(config_text())["system"],
            "search": {"alphabet": ["ADD 2 0 1"]},
        }))
        entry = entry_from_config(cfg)
        with pytest.raises(ConfigError) as e:
            entry.search_alphabet
        assert e.value.field == "search.alphabet"

    def test_ridecore_oracle_alphabet_closes_over_duplicates(self, ridecore):
        texts = {str(i) for i in ridecore.oracle_alphabet}
        assert "MUL l31, (l28, l28)" in texts
        assert "SRST l0, (l0, l0)" in texts
        assert len(ridecore.search_alphabet) == 2
