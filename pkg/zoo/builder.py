"""Builds transition systems and their specifications from processor configs."""

import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from core.duplication import DupMap, make_dup_map, offset_dup_map, parity_dup_map
from core.model import (
    START, Instruction, NarchDomain, Opcode, OpcodeRole, State, TransitionSystem,
)
from core.shared import ConfigError, DomainError, DupMapError, UnsupportedError
from services.spec_oracle import OpcodeSpec, SpecRelation
from zoo.expressions import compile_expression, is_idempotent
from zoo.schemas import (
    ANY_OPCODE, HARD_RESET_NAME, NOP_NAME, SOFT_RESET_NAME,
    DupMapConfig, InjectionKind, ProcessorConfig,
)

logger = logging.getLogger(f"qedlab.{__name__}")

# Pattern slot matching any executed instruction.
ANY = -2


@dataclass(frozen=True)
class CompiledInjection:
    name: str
    history: Tuple[int, ...]
    opcode_id: int
    out_locations: Optional[FrozenSet[int]]
    same_inputs: Optional[bool]
    prev_out_feeds_input: bool
    kind: InjectionKind
    delta: int
    target: Optional[int]
    value: int

    def matches(self, narch: Tuple, instr: Instruction, tracked: bool, regular: FrozenSet[int]) -> bool:
        if instr.opcode.id != self.opcode_id:
            return False
        if self.out_locations is not None and instr.out not in self.out_locations:
            return False
        if self.same_inputs is not None and (instr.ins[0] == instr.ins[1]) != self.same_inputs:
            return False
        if self.history:
            recent = narch[len(narch) - len(self.history):]
            for wanted, entry in zip(self.history, recent):
                op = entry[0] if tracked else entry
                if op == START or (wanted != ANY and wanted != op):
                    return False
        if self.prev_out_feeds_input:
            last_op, last_out = narch[-1]
            if last_op not in regular or last_out not in instr.ins:
                return False
        return True


@dataclass(frozen=True)
class HistoryDelta:
    """Transition function: specified architectural update, injected bugs, history shift."""
    modulus: int
    tables: Tuple[Optional[Tuple[Tuple[int, ...], ...]], ...]
    roles: Tuple[OpcodeRole, ...]
    history_length: int
    track_outputs: bool
    initial: Tuple
    injections: Tuple[CompiledInjection, ...] = ()

    @property
    def regular_ids(self) -> FrozenSet[int]:
        return frozenset(i for i, role in enumerate(self.roles) if role == OpcodeRole.REGULAR)

    def _shift(self, narch: Tuple, instr: Instruction) -> Tuple:
        if not self.history_length:
            return narch
        entry = (instr.opcode.id, instr.out) if self.track_outputs else instr.opcode.id
        return narch[1:] + (entry,)

    def __call__(self, s: State, instr: Instruction) -> State:
        role = self.roles[instr.opcode.id]
        if role == OpcodeRole.HARD_RESET:
            return instr.target
        if role == OpcodeRole.SOFT_RESET:
            return State(s.arch, self.initial)
        if role == OpcodeRole.NOP:
            return State(s.arch, self._shift(s.narch, instr))

        arch = list(s.arch)
        value = self.tables[instr.opcode.id][arch[instr.ins[0]]][arch[instr.ins[1]]]
        stomps = []
        if self.injections:
            regular = self.regular_ids
            for inj in self.injections:
                if not inj.matches(s.narch, instr, self.track_outputs, regular):
                    continue
                if inj.kind in (InjectionKind.TYPE_A, InjectionKind.BOTH):
                    value = (value + inj.delta) % self.modulus
                if inj.kind in (InjectionKind.TYPE_B, InjectionKind.BOTH) and inj.target != instr.out:
                    stomps.append((inj.target, inj.value % self.modulus))
        arch[instr.out] = value
        for loc, stomp_value in stomps:
            arch[loc] = stomp_value
        return State(tuple(arch), self._shift(s.narch, instr))


def _narch_domain(history_length: int, track_outputs: bool, opcodes: List[Opcode], locations: int) -> NarchDomain:
    recorded = [op.id for op in opcodes if op.role in (OpcodeRole.REGULAR, OpcodeRole.NOP)]
    if track_outputs:
        entries = ((START, START),) + tuple((op, loc) for op in recorded for loc in range(locations))
    else:
        entries = (START,) + tuple(recorded)
    return NarchDomain(entries=entries, length=history_length)


def build_system(cfg: ProcessorConfig) -> Tuple[TransitionSystem, SpecRelation]:
    """Reference machine from the opcode table, mutated by the configured injections.

    The returned specification is built from the same table (or the
    ``spec_expression`` overrides) and is never touched by injections.
    """
    sc = cfg.system
    modulus = sc.value_modulus
    opcodes: List[Opcode] = []
    tables = []
    specs = {}
    for op_cfg in sc.opcodes:
        try:
            table = compile_expression(op_cfg.expression, modulus)
            spec_table = (
                compile_expression(op_cfg.spec_expression, modulus)
                if op_cfg.spec_expression else table
            )
        except ConfigError as e:
            raise ConfigError(f"opcode {op_cfg.name}: {e}", field=f"system.opcodes.{op_cfg.name}") from e
        op = Opcode(len(opcodes), op_cfg.name, OpcodeRole.REGULAR, is_idempotent(spec_table))
        opcodes.append(op)
        tables.append(table)
        specs[op.id] = OpcodeSpec(spec_table, op_cfg.spec_expression or op_cfg.expression)

    projection = tuple(tuple(a for _ in range(modulus)) for a in range(modulus))
    extensions = [
        (sc.nop, NOP_NAME, OpcodeRole.NOP),
        (sc.soft_reset, SOFT_RESET_NAME, OpcodeRole.SOFT_RESET),
        (sc.hard_reset, HARD_RESET_NAME, OpcodeRole.HARD_RESET),
    ]
    for enabled, name, role in extensions:
        if not enabled:
            continue
        op = Opcode(len(opcodes), name, role, idempotent=role != OpcodeRole.HARD_RESET)
        opcodes.append(op)
        tables.append(None)
        if role != OpcodeRole.HARD_RESET:
            specs[op.id] = OpcodeSpec(projection, "a")

    by_name = {op.name: op for op in opcodes}
    injections = []
    for index, inj in enumerate(sc.injections):
        history = tuple(ANY if entry == ANY_OPCODE else by_name[entry].id for entry in inj.trigger.history)
        injections.append(CompiledInjection(
            name=inj.name or f"injection-{index}",
            history=history,
            opcode_id=by_name[inj.trigger.opcode].id,
            out_locations=frozenset(inj.trigger.out_locations) if inj.trigger.out_locations is not None else None,
            same_inputs=inj.trigger.same_inputs,
            prev_out_feeds_input=inj.trigger.prev_out_feeds_input,
            kind=inj.effect.kind,
            delta=inj.effect.delta,
            target=inj.effect.target,
            value=inj.effect.value,
        ))

    narch = _narch_domain(sc.history_length, sc.track_outputs, opcodes, sc.location_count)
    delta = HistoryDelta(
        modulus=modulus,
        tables=tuple(tables),
        roles=tuple(op.role for op in opcodes),
        history_length=sc.history_length,
        track_outputs=sc.track_outputs,
        initial=narch.initial,
        injections=tuple(injections),
    )
    try:
        sys = TransitionSystem(
            name=sc.name,
            values=modulus,
            locations=sc.location_count,
            narch_states=narch,
            opcodes=tuple(opcodes),
            delta=delta,
        )
    except DomainError as e:
        raise ConfigError(str(e), field="system") from e
    spec = SpecRelation(specs)
    logger.debug(
        f"Built {sys.name}: |V|={modulus} |L|={sc.location_count} h={sc.history_length} "
        f"opcodes={[op.name for op in opcodes]} injections={len(injections)}"
    )
    return sys, spec


def build_dup_map(dm: DupMapConfig, location_count: int) -> DupMap:
    try:
        if dm.scheme == "parity":
            return parity_dup_map(location_count)
        if dm.scheme == "explicit":
            originals = dm.originals if dm.originals is not None else [o for o, _ in dm.pairs]
            return make_dup_map(originals, dm.pairs, location_count)
        return offset_dup_map(location_count, dm.offset)
    except DupMapError as e:
        raise ConfigError(f"dup_map: {e}", field="dup_map") from e


def soft_reset_instr(sys: TransitionSystem) -> Instruction:
    ops = sys.opcodes_with_role(OpcodeRole.SOFT_RESET)
    if not ops:
        raise UnsupportedError(f"system {sys.name} has no soft-reset instruction")
    return Instruction(ops[0], 0, (0, 0))


def hard_reset_instr(sys: TransitionSystem, target: State) -> Instruction:
    ops = sys.opcodes_with_role(OpcodeRole.HARD_RESET)
    if not ops:
        raise UnsupportedError(f"system {sys.name} has no hard-reset instructions")
    sys.validate_state(target)
    if not sys.is_initial(target):
        raise DomainError(f"hard-reset target {target} is not an initial state")
    return Instruction(ops[0], 0, (0, 0), target)


def nop_instructions(sys: TransitionSystem, include_self_moves: bool = True) -> Tuple[Instruction, ...]:
    """Canonical NOP and soft-reset instructions, then self-moves of idempotent opcodes."""
    result = list(sys.instructions((OpcodeRole.NOP, OpcodeRole.SOFT_RESET)))
    if include_self_moves:
        for op in sys.opcodes_with_role(OpcodeRole.REGULAR):
            if op.idempotent:
                result.extend(Instruction(op, loc, (loc, loc)) for loc in range(sys.locations))
    return tuple(result)
