"""Processor models as finite transition systems.

A processor is a transition system over states ``(arch, narch)``: ``arch`` maps
every location to a value in ``Z_|V|`` and ``narch`` is a member of a finite,
enumerated set of non-architectural states whose first element is the unique
initial element ``n0``. Executing an instruction is a single total,
deterministic transition.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from core.shared import BudgetExceededError, DomainError
from utils.config import config

logger = logging.getLogger(f"qedlab.{__name__}")

# History slot that has not seen an instruction yet.
START = -1


class OpcodeRole(str, Enum):
    REGULAR = "regular"
    NOP = "nop"
    SOFT_RESET = "soft_reset"
    HARD_RESET = "hard_reset"


# Roles whose instructions are covered by the abstract specification.
SPEC_ROLES: Tuple[OpcodeRole, ...] = (OpcodeRole.REGULAR, OpcodeRole.NOP, OpcodeRole.SOFT_RESET)


@dataclass(frozen=True)
class Opcode:
    id: int
    name: str
    role: OpcodeRole = OpcodeRole.REGULAR
    # f(a, a) == a for every value, so (op, l, (l, l)) preserves the architectural state
    idempotent: bool = False
    arity: int = 2

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class State:
    arch: Tuple[int, ...]
    narch: Tuple = ()

    def __getitem__(self, location: int) -> int:
        return self.arch[location]

    def __str__(self) -> str:
        return f"{list(self.arch)} | {list(self.narch)}"


@dataclass(frozen=True)
class Instruction:
    opcode: Opcode
    out: int
    ins: Tuple[int, int]
    # Only hard-reset instructions carry a target state.
    target: Optional[State] = None

    @property
    def locations(self) -> Tuple[int, int, int]:
        return (self.out, self.ins[0], self.ins[1])

    @property
    def encoding(self) -> Tuple[int, int, int, int]:
        return (self.opcode.id, self.out, self.ins[0], self.ins[1])

    @property
    def sort_key(self) -> Tuple:
        if self.target is None:
            return self.encoding
        return self.encoding + self.target.arch

    def __str__(self) -> str:
        text = f"{self.opcode.name} l{self.out}, (l{self.ins[0]}, l{self.ins[1]})"
        if self.target is not None:
            text += f" -> {list(self.target.arch)}"
        return text


def sequence_key(seq: Sequence[Instruction]) -> Tuple:
    """Total order on instruction sequences: length first, then lexicographic encodings."""
    return (len(seq), tuple(i.sort_key for i in seq))


def is_nop(instr: Instruction) -> bool:
    """Whether an instruction belongs to the NOP set by construction."""
    role = instr.opcode.role
    if role in (OpcodeRole.NOP, OpcodeRole.SOFT_RESET):
        return True
    return (
        role == OpcodeRole.REGULAR
        and instr.opcode.idempotent
        and instr.out == instr.ins[0] == instr.ins[1]
    )


@dataclass(frozen=True)
class NarchDomain:
    """Enumerated non-architectural states: history windows of fixed length."""
    entries: Tuple
    length: int

    @cached_property
    def _entry_set(self) -> FrozenSet:
        return frozenset(self.entries)

    @property
    def initial(self) -> Tuple:
        return (self.entries[0],) * self.length

    def __contains__(self, tag) -> bool:
        return (
            isinstance(tag, tuple)
            and len(tag) == self.length
            and all(entry in self._entry_set for entry in tag)
        )

    def __iter__(self) -> Iterator[Tuple]:
        return itertools.product(self.entries, repeat=self.length)

    def __len__(self) -> int:
        return len(self.entries) ** self.length


@dataclass(frozen=True)
class TransitionSystem:
    name: str
    values: int
    locations: int
    narch_states: NarchDomain
    opcodes: Tuple[Opcode, ...]
    delta: Callable[[State, Instruction], State] = field(compare=False, repr=False)

    def __post_init__(self):
        if self.values < 2:
            raise DomainError(f"value domain must have at least 2 elements, got {self.values}")
        if self.locations < 2 or self.locations % 2:
            raise DomainError(f"location count must be even and at least 2, got {self.locations}")
        ids = [op.id for op in self.opcodes]
        if len(set(ids)) != len(ids):
            raise DomainError(f"opcode ids are not unique in system {self.name}")

    @property
    def n0(self) -> Tuple:
        return self.narch_states.initial

    @cached_property
    def _opcodes_by_name(self) -> Dict[str, Opcode]:
        return {op.name: op for op in self.opcodes}

    def opcode(self, name: str) -> Opcode:
        try:
            return self._opcodes_by_name[name.upper()]
        except KeyError:
            raise DomainError(f"system {self.name} has no opcode {name}") from None

    def opcodes_with_role(self, role: OpcodeRole) -> Tuple[Opcode, ...]:
        return tuple(op for op in self.opcodes if op.role == role)

    def validate_instruction(self, instr: Instruction) -> None:
        for loc in instr.locations:
            if not 0 <= loc < self.locations:
                raise DomainError(
                    f"instruction {instr} uses location {loc} outside 0..{self.locations - 1}"
                )
        if self._opcodes_by_name.get(instr.opcode.name) != instr.opcode:
            raise DomainError(f"opcode {instr.opcode.name} does not belong to system {self.name}")
        if instr.opcode.role == OpcodeRole.HARD_RESET:
            if instr.target is None:
                raise DomainError(f"hard-reset instruction {instr} has no target state")
            self.validate_state(instr.target)
            if not self.is_initial(instr.target):
                raise DomainError(f"hard-reset target {instr.target} is not an initial state")

    def validate_state(self, state: State) -> None:
        if len(state.arch) != self.locations:
            raise DomainError(
                f"state defines {len(state.arch)} locations, system has {self.locations}"
            )
        for loc, value in enumerate(state.arch):
            if not 0 <= value < self.values:
                raise DomainError(f"value {value} at l{loc} outside Z_{self.values}")
        if state.narch not in self.narch_states:
            raise DomainError(f"non-architectural state {state.narch} not declared by {self.name}")

    def instruction(self, name: str, out: int, in1: int, in2: int) -> Instruction:
        instr = Instruction(self.opcode(name), out, (in1, in2))
        self.validate_instruction(instr)
        return instr

    def parse_instruction(self, text: str) -> Instruction:
        """Parse ``"ADD 12 4 15"`` or ``"ADD l12, (l4, l15)"``."""
        parts = text.strip().split(None, 1)
        if not parts:
            raise DomainError("empty instruction text")
        numbers = [int(n) for n in re.findall(r"\d+", parts[1] if len(parts) > 1 else "")]
        opcode = self.opcode(parts[0])
        if opcode.role == OpcodeRole.HARD_RESET:
            raise DomainError(
                f"{opcode.name} needs a target state; build it with zoo.builder.hard_reset_instr"
            )
        if opcode.role in (OpcodeRole.NOP, OpcodeRole.SOFT_RESET) and not numbers:
            numbers = [0, 0, 0]
        if len(numbers) != 3:
            raise DomainError(f"instruction {text!r} needs one output and two input locations")
        return self.instruction(opcode.name, *numbers)

    def initial_state(self, arch: Sequence[int]) -> State:
        state = State(tuple(arch), self.n0)
        self.validate_state(state)
        return state

    def is_initial(self, state: State) -> bool:
        return state.narch == self.n0

    def initial_states(self) -> Iterator[State]:
        """All initial states ``S_arch x {n0}``, generated lazily in canonical order."""
        for arch in itertools.product(range(self.values), repeat=self.locations):
            yield State(arch, self.n0)

    @property
    def initial_state_count(self) -> int:
        return self.values ** self.locations

    def instructions(self, roles: Iterable[OpcodeRole] = SPEC_ROLES) -> Tuple[Instruction, ...]:
        """Instruction set restricted to opcode roles, ordered by encoding.

        Regular opcodes range over all of ``L x L^2``; NOP and soft-reset opcodes
        only appear in their canonical form ``(op, l0, (l0, l0))``.
        """
        roles = set(roles)
        result: List[Instruction] = []
        locs = range(self.locations)
        for op in self.opcodes:
            if op.role not in roles:
                continue
            if op.role == OpcodeRole.REGULAR:
                result.extend(
                    Instruction(op, out, (a, b)) for out in locs for a in locs for b in locs
                )
            elif op.role in (OpcodeRole.NOP, OpcodeRole.SOFT_RESET):
                result.append(Instruction(op, 0, (0, 0)))
        result.sort(key=lambda i: i.encoding)
        return tuple(result)

    @cached_property
    def spec_alphabet(self) -> Tuple[Instruction, ...]:
        return self.instructions(SPEC_ROLES)

    @cached_property
    def regular_alphabet(self) -> Tuple[Instruction, ...]:
        return self.instructions((OpcodeRole.REGULAR,))


@dataclass(frozen=True)
class Path:
    states: Tuple[State, ...]
    instrs: Tuple[Instruction, ...] = ()

    def __post_init__(self):
        if len(self.states) != len(self.instrs) + 1:
            raise DomainError("a path holds exactly one more state than instructions")

    @property
    def first(self) -> State:
        return self.states[0]

    @property
    def last(self) -> State:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.instrs)


def step(sys: TransitionSystem, state: State, instr: Instruction) -> State:
    """One transition; total on well-formed inputs."""
    sys.validate_instruction(instr)
    return sys.delta(state, instr)


def run(sys: TransitionSystem, s0: State, seq: Sequence[Instruction]) -> Path:
    states = [s0]
    for instr in seq:
        states.append(step(sys, states[-1], instr))
    return Path(tuple(states), tuple(seq))


def extend_path(sys: TransitionSystem, path: Path, seq: Sequence[Instruction]) -> Path:
    tail = run(sys, path.last, seq)
    return Path(path.states + tail.states[1:], path.instrs + tail.instrs)


@dataclass
class Exploration:
    """Breadth-first reachability result with one witness path per state."""
    parents: Dict[State, Optional[Tuple[State, Instruction]]]
    depths: Dict[State, int]
    depth: int
    edges: List[Tuple[State, State, Instruction]] = field(default_factory=list)
    complete: bool = True

    @property
    def states(self) -> FrozenSet[State]:
        return frozenset(self.parents)

    def layer(self, depth: int) -> List[State]:
        return [s for s, d in self.depths.items() if d == depth]

    def path_to(self, state: State) -> Tuple[State, Tuple[Instruction, ...]]:
        """Root initial state and the instructions leading from it to ``state``."""
        instrs: List[Instruction] = []
        current = state
        while self.parents[current] is not None:
            parent, instr = self.parents[current]
            instrs.append(instr)
            current = parent
        return current, tuple(reversed(instrs))


def explore(
    sys: TransitionSystem,
    inits: Iterable[State],
    depth: int,
    alphabet: Optional[Sequence[Instruction]] = None,
    max_states: Optional[int] = None,
    record_edges: bool = False,
) -> Exploration:
    if depth < 0:
        raise DomainError(f"depth must be non-negative, got {depth}")
    alphabet = sys.spec_alphabet if alphabet is None else tuple(alphabet)
    for instr in alphabet:
        sys.validate_instruction(instr)
    limit = config.MAX_STATES if max_states is None else max_states

    exploration = Exploration(parents={}, depths={}, depth=depth)
    frontier: List[State] = []
    for s in inits:
        if s not in exploration.parents:
            exploration.parents[s] = None
            exploration.depths[s] = 0
            frontier.append(s)
    if not frontier:
        raise DomainError("reachability needs at least one initial state")

    delta = sys.delta
    for level in range(1, depth + 1):
        next_frontier: List[State] = []
        for s in frontier:
            for instr in alphabet:
                t = delta(s, instr)
                if record_edges:
                    exploration.edges.append((s, t, instr))
                if t in exploration.parents:
                    continue
                exploration.parents[t] = (s, instr)
                exploration.depths[t] = level
                next_frontier.append(t)
                if len(exploration.parents) > limit:
                    exploration.complete = False
                    logger.warning(
                        f"Reachability on {sys.name} exceeded {limit} states at depth {level}"
                    )
                    raise BudgetExceededError(
                        f"state budget {limit} exceeded at depth {level}",
                        partial_count=len(exploration.parents),
                        partial=exploration,
                    )
        frontier = next_frontier
        if not frontier:
            break
    return exploration


def enumerate_reachable(
    sys: TransitionSystem,
    inits: Iterable[State],
    depth: int,
    alphabet: Optional[Sequence[Instruction]] = None,
    max_states: Optional[int] = None,
) -> FrozenSet[State]:
    return explore(sys, inits, depth, alphabet=alphabet, max_states=max_states).states
