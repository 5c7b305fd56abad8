"""Abstract specification relation and the brute-force bug oracle."""

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from core.model import Instruction, OpcodeRole, State, TransitionSystem, explore
from core.shared import BudgetExceededError, ContractError, DomainError, SpecConfigurationError
from utils.config import config
from zoo.schemas import InitStrategy

logger = logging.getLogger(f"qedlab.{__name__}")


class ViolationType(str, Enum):
    TYPE_A = "TypeA"
    TYPE_B = "TypeB"
    BOTH = "Both"


@dataclass(frozen=True)
class OpcodeSpec:
    """Specification function ``f_op: V x V -> V`` stored as a value table."""
    table: Tuple[Tuple[int, ...], ...]
    expression: str = ""

    def __call__(self, a: int, b: int) -> int:
        return self.table[a][b]


@dataclass(frozen=True)
class SpecRelation:
    specs: Dict[int, OpcodeSpec] = field(hash=False)

    def function(self, instr: Instruction) -> OpcodeSpec:
        if instr.opcode.role == OpcodeRole.HARD_RESET:
            raise SpecConfigurationError(
                f"hard-reset instructions are not covered by the specification ({instr})"
            )
        try:
            return self.specs[instr.opcode.id]
        except KeyError:
            raise SpecConfigurationError(f"opcode {instr.opcode.name} missing from specification") from None

    def expected(self, state: State, instr: Instruction) -> int:
        f = self.function(instr)
        return f(state.arch[instr.ins[0]], state.arch[instr.ins[1]])

    def covers(self, sys: TransitionSystem) -> None:
        for op in sys.opcodes:
            if op.role != OpcodeRole.HARD_RESET and op.id not in self.specs:
                raise SpecConfigurationError(f"opcode {op.name} of {sys.name} missing from specification")


@dataclass(frozen=True)
class ViolationKind:
    kind: ViolationType
    bad_locations: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Bug:
    instr: Instruction
    triggers: FrozenSet[State]
    kind: ViolationType
    bad_locations: Tuple[int, ...] = ()

    @property
    def trigger_count(self) -> int:
        return len(self.triggers)

    def sorted_triggers(self) -> List[State]:
        return sorted(self.triggers, key=lambda s: (s.arch, repr(s.narch)))


@dataclass
class OracleResult:
    bugs: Tuple[Bug, ...]
    depth: int
    states_explored: int
    complete: bool = True

    @property
    def has_bugs(self) -> bool:
        return bool(self.bugs)

    def bug_for(self, instr: Instruction) -> Optional[Bug]:
        for bug in self.bugs:
            if bug.instr == instr:
                return bug
        return None


def spec_holds(spec: SpecRelation, s: State, instr: Instruction, s2: State) -> bool:
    """Frame clause and output clause, architectural components only."""
    out = instr.out
    if s2.arch[out] != spec.expected(s, instr):
        return False
    return s.arch[:out] == s2.arch[:out] and s.arch[out + 1:] == s2.arch[out + 1:]


def classify_violation(spec: SpecRelation, s: State, instr: Instruction, s2: State) -> ViolationKind:
    out = instr.out
    wrong_output = s2.arch[out] != spec.expected(s, instr)
    bad = tuple(
        loc for loc, (before, after) in enumerate(zip(s.arch, s2.arch))
        if loc != out and before != after
    )
    if wrong_output and bad:
        return ViolationKind(ViolationType.BOTH, bad)
    if wrong_output:
        return ViolationKind(ViolationType.TYPE_A)
    if bad:
        return ViolationKind(ViolationType.TYPE_B, bad)
    raise ContractError(f"{instr} satisfies the specification from {s}; nothing to classify")


def _scan(sys: TransitionSystem, spec: SpecRelation, states: Sequence[State],
          alphabet: Sequence[Instruction]) -> List[Tuple[int, State, ViolationKind]]:
    found = []
    delta = sys.delta
    for s in states:
        for index, instr in enumerate(alphabet):
            s2 = delta(s, instr)
            if not spec_holds(spec, s, instr, s2):
                found.append((index, s, classify_violation(spec, s, instr, s2)))
    return found


def _chunks(items: Sequence, count: int) -> List[Sequence]:
    size = max(1, -(-len(items) // count))
    return [items[i:i + size] for i in range(0, len(items), size)]


def _merge_kind(kinds: Iterable[ViolationType]) -> ViolationType:
    kinds = set(kinds)
    if kinds == {ViolationType.TYPE_A}:
        return ViolationType.TYPE_A
    if kinds == {ViolationType.TYPE_B}:
        return ViolationType.TYPE_B
    return ViolationType.BOTH


def find_bugs(
    sys: TransitionSystem,
    spec: SpecRelation,
    inits: Iterable[State],
    depth: int,
    alphabet: Optional[Sequence[Instruction]] = None,
    max_states: Optional[int] = None,
    jobs: int = 1,
) -> OracleResult:
    """All bugs whose trigger states are reachable within ``depth`` instructions.

    One Bug per failing instruction, ordered by instruction encoding. A state
    budget overrun yields the bugs found on the partial state set, flagged
    incomplete.
    """
    if depth < 0:
        raise DomainError(f"depth must be non-negative, got {depth}")
    alphabet = sys.spec_alphabet if alphabet is None else tuple(alphabet)
    complete = True
    try:
        exploration = explore(sys, inits, depth, alphabet=alphabet, max_states=max_states)
    except BudgetExceededError as e:
        exploration = e.partial
        complete = False
    states = list(exploration.parents)

    if jobs > 1 and len(states) > jobs:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(
                _scan,
                itertools.repeat(sys), itertools.repeat(spec),
                _chunks(states, jobs), itertools.repeat(alphabet),
            ))
        found = [item for part in parts for item in part]
    else:
        found = _scan(sys, spec, states, alphabet)

    grouped: Dict[int, List[Tuple[State, ViolationKind]]] = {}
    for index, s, violation in found:
        grouped.setdefault(index, []).append((s, violation))

    bugs = []
    for index in sorted(grouped, key=lambda k: alphabet[k].sort_key):
        entries = grouped[index]
        bad = sorted({loc for _, v in entries for loc in v.bad_locations})
        bugs.append(Bug(
            instr=alphabet[index],
            triggers=frozenset(s for s, _ in entries),
            kind=_merge_kind(v.kind for _, v in entries),
            bad_locations=tuple(bad),
        ))
    logger.debug(f"Oracle on {sys.name}: {len(states)} states, {len(bugs)} bugs at depth {depth}")
    return OracleResult(tuple(bugs), depth, len(states), complete)


def bounded_correct(
    sys: TransitionSystem,
    spec: SpecRelation,
    inits: Iterable[State],
    depth: int,
    alphabet: Optional[Sequence[Instruction]] = None,
    max_states: Optional[int] = None,
) -> bool:
    """Whether every instruction satisfies the specification from every state reachable within ``depth``."""
    alphabet = sys.spec_alphabet if alphabet is None else tuple(alphabet)
    states = explore(sys, inits, depth, alphabet=alphabet, max_states=max_states).parents
    delta = sys.delta
    return all(
        spec_holds(spec, s, instr, delta(s, instr))
        for s in states
        for instr in alphabet
    )


def single_instruction_violations(
    sys: TransitionSystem,
    spec: SpecRelation,
    inits: Iterable[State],
    alphabet: Optional[Sequence[Instruction]] = None,
    limit: Optional[int] = None,
) -> List[Tuple[State, Instruction]]:
    alphabet = sys.spec_alphabet if alphabet is None else tuple(alphabet)
    found = []
    for s in inits:
        for instr in alphabet:
            if not spec_holds(spec, s, instr, sys.delta(s, instr)):
                found.append((s, instr))
                if limit is not None and len(found) >= limit:
                    return found
    return found


def single_instruction_correct(
    sys: TransitionSystem,
    spec: SpecRelation,
    init_arch_sample: Optional[Iterable] = None,
    alphabet: Optional[Sequence[Instruction]] = None,
) -> bool:
    """Every instruction executes per specification from every sampled initial state.

    ``init_arch_sample`` holds architectural tuples or initial states; without
    it the initial states are enumerated exhaustively when within the state
    budget and sampled deterministically otherwise.
    """
    if init_arch_sample is None:
        inits = select_initial_states(sys, InitStrategy.EXHAUSTIVE, alphabet=alphabet)
    else:
        inits = [
            s if isinstance(s, State) else sys.initial_state(s)
            for s in init_arch_sample
        ]
    return not single_instruction_violations(sys, spec, inits, alphabet=alphabet, limit=1)


def _support_locations(alphabet: Optional[Sequence[Instruction]]) -> List[int]:
    return sorted({loc for instr in alphabet or () for loc in instr.locations})


def sample_initial_states(sys: TransitionSystem, samples: int, seed: int) -> List[State]:
    """All-zero state first, then seeded random architectural states."""
    rng = random.Random(seed)
    zero = tuple([0] * sys.locations)
    result = {zero: None}
    attempts = 0
    while len(result) < min(samples, sys.initial_state_count) and attempts < samples * 20:
        result[tuple(rng.randrange(sys.values) for _ in range(sys.locations))] = None
        attempts += 1
    return [State(arch, sys.n0) for arch in result]


def select_initial_states(
    sys: TransitionSystem,
    strategy: InitStrategy,
    alphabet: Optional[Sequence[Instruction]] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[State]:
    """Initial states (not necessarily QED-consistent) under an enumeration strategy.

    ``exhaustive`` and ``support`` fall back to seeded sampling when the
    enumeration would exceed the state budget.
    """
    samples = config.INIT_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    strategy = InitStrategy(strategy)

    if strategy == InitStrategy.ZERO:
        return [State(tuple([0] * sys.locations), sys.n0)]
    if strategy == InitStrategy.SAMPLE:
        return sample_initial_states(sys, samples, seed)
    if strategy == InitStrategy.EXHAUSTIVE:
        if sys.initial_state_count <= config.MAX_STATES:
            return list(sys.initial_states())
        logger.warning(
            f"{sys.name}: {sys.initial_state_count} initial states exceed the budget, sampling {samples}"
        )
        return sample_initial_states(sys, samples, seed)

    support = _support_locations(alphabet) or list(range(sys.locations))
    if sys.values ** len(support) > config.MAX_STATES:
        logger.warning(f"{sys.name}: support of {len(support)} locations too large, sampling {samples}")
        return sample_initial_states(sys, samples, seed)
    result = []
    for values in itertools.product(range(sys.values), repeat=len(support)):
        arch = [0] * sys.locations
        for loc, value in zip(support, values):
            arch[loc] = value
        result.append(State(tuple(arch), sys.n0))
    return result
