"""QED-consistency, QED tests and their verdicts."""

import itertools
import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from core.duplication import DupMap, InstrClass, classify_instr, dup_instr, dup_seq
from core.model import Instruction, OpcodeRole, Path, State, TransitionSystem, is_nop, run
from core.shared import PreconditionError
from utils.config import config
from zoo.schemas import InitStrategy

logger = logging.getLogger(f"qedlab.{__name__}")


class TestFamily(str, Enum):
    __test__ = False

    STANDARD = "standard"
    EXTENDED = "extended"
    INTERLEAVED = "interleaved"
    SOFT_RESET = "soft_reset"
    HARD_RESET = "hard_reset"


class Outcome(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"


@dataclass(frozen=True)
class TestMeta:
    __test__ = False

    dup_map: Optional[DupMap] = None
    # Bug-prefix size k for reset tests, original-half length n otherwise.
    prefix_size: Optional[int] = None
    requires_initial: bool = True
    requires_consistent: bool = True
    nop_positions: Tuple[int, ...] = ()
    interleaved: bool = False
    init: Optional[State] = None
    bug_instr: Optional[Instruction] = None
    case: Optional[str] = None
    # (l_x, l_y): locations a bug-specific test leaves inconsistent.
    witness_roles: Optional[Tuple[int, int]] = None
    nop_padding: int = 0
    reset_target: Optional[State] = None


@dataclass(frozen=True)
class QedTest:
    instrs: Tuple[Instruction, ...]
    family: TestFamily
    meta: TestMeta = TestMeta()

    def __len__(self) -> int:
        return len(self.instrs)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    trace: Path
    # (l, d(l)) for QED tests, (l,) for hard-reset tests; None on Pass.
    witness: Optional[Tuple[int, ...]] = None
    mismatches: Tuple[Tuple[int, ...], ...] = ()

    @property
    def failed(self) -> bool:
        return self.outcome == Outcome.FAIL


def qed_mismatches(m: DupMap, s: State) -> List[Tuple[int, int]]:
    arch = s.arch
    return [(o, d) for o, d in m.pairs if arch[o] != arch[d]]


def qed_consistent(m: DupMap, s: State) -> bool:
    arch = s.arch
    return all(arch[o] == arch[d] for o, d in m.pairs)


def qed_consistent_dual(m: DupMap, s: State) -> bool:
    """Same predicate stated over duplicate locations and ``d^-1``."""
    arch = s.arch
    return all(arch[dup] == arch[m.d_inv(dup)] for dup in sorted(m.duplicates))


def select_witness(m: DupMap, instrs: Sequence[Instruction], final: State) -> Optional[Tuple[int, int]]:
    """Inconsistent pair at the output of the latest original instruction, else the least one."""
    mismatches = qed_mismatches(m, final)
    if not mismatches:
        return None
    inconsistent = {o for o, _ in mismatches}
    for instr in reversed(instrs):
        if instr.out in inconsistent and classify_instr(m, instr) == InstrClass.ORIGINAL:
            return (instr.out, m.d(instr.out))
    return mismatches[0]


def hard_reset_verdict(sys: TransitionSystem, test: QedTest, mu: State) -> Verdict:
    """Fail iff the states after the two executions of the bug instruction differ."""
    k = (len(test.instrs) - 2) // 2
    path = run(sys, mu, test.instrs)
    first, second = path.states[k], path.states[2 * k + 2]
    differing = tuple(
        (loc,) for loc, (a, b) in enumerate(zip(first.arch, second.arch)) if a != b
    )
    if differing:
        return Verdict(Outcome.FAIL, path, differing[0], differing)
    return Verdict(Outcome.PASS, path)


def run_qed_test(sys: TransitionSystem, m: DupMap, test: QedTest, s0: State) -> Verdict:
    """Execute a QED test from ``s0`` and judge the final state.

    The specification is never consulted here.
    """
    if not sys.is_initial(s0):
        raise PreconditionError(f"QED tests start from an initial state, got narch {s0.narch}")
    if test.family == TestFamily.HARD_RESET:
        return hard_reset_verdict(sys, test, s0)
    if not qed_consistent(m, s0):
        raise PreconditionError(
            f"QED tests start from a QED-consistent state; l{qed_mismatches(m, s0)[0][0]} differs"
        )
    path = run(sys, s0, test.instrs)
    mismatches = tuple(qed_mismatches(m, path.last))
    if mismatches:
        return Verdict(Outcome.FAIL, path, select_witness(m, test.instrs, path.last), mismatches)
    return Verdict(Outcome.PASS, path)


def _is_standard(m: DupMap, seq: Sequence[Instruction]) -> bool:
    if not seq or len(seq) % 2:
        return False
    n = len(seq) // 2
    head = seq[:n]
    if any(classify_instr(m, i) != InstrClass.ORIGINAL for i in head):
        return False
    return tuple(seq[n:]) == dup_seq(m, head)


def _is_interleaved(m: DupMap, seq: Sequence[Instruction]) -> bool:
    originals: List[Tuple[int, Instruction]] = []
    duplicates: List[Tuple[int, Instruction]] = []
    for position, instr in enumerate(seq):
        kind = classify_instr(m, instr)
        if kind == InstrClass.ORIGINAL:
            originals.append((position, instr))
        elif kind == InstrClass.DUPLICATE:
            duplicates.append((position, instr))
        else:
            return False
    if not originals or len(originals) != len(duplicates):
        return False
    return all(
        d_pos > o_pos and d_instr == dup_instr(m, o_instr)
        for (o_pos, o_instr), (d_pos, d_instr) in zip(originals, duplicates)
    )


def _without_nops(m: DupMap, seq: Sequence[Instruction], base) -> bool:
    positions = [k for k, instr in enumerate(seq) if is_nop(instr)]
    for size in range(len(positions) + 1):
        for removed in itertools.combinations(positions, size):
            dropped = set(removed)
            if base(m, [i for k, i in enumerate(seq) if k not in dropped]):
                return True
    return False


def _is_soft_reset(m: DupMap, seq: Sequence[Instruction]) -> bool:
    if len(seq) % 3 or len(seq) < 6:
        return False
    k = len(seq) // 3
    prefix = seq[:k]
    if any(classify_instr(m, i) != InstrClass.ORIGINAL for i in prefix):
        return False
    for j in range(k):
        reset, duplicate = seq[k + 2 * j], seq[k + 2 * j + 1]
        if reset.opcode.role != OpcodeRole.SOFT_RESET or duplicate != dup_instr(m, prefix[j]):
            return False
    return True


def _is_hard_reset(seq: Sequence[Instruction]) -> bool:
    if len(seq) % 2 or len(seq) < 6:
        return False
    k = (len(seq) - 2) // 2
    return (
        seq[k].opcode.role == OpcodeRole.HARD_RESET
        and tuple(seq[k + 1:2 * k]) == tuple(seq[:k - 1])
        and seq[2 * k].opcode.role == OpcodeRole.SOFT_RESET
        and seq[2 * k + 1] == seq[k - 1]
    )


def is_qed_test(m: DupMap, seq: Sequence[Instruction], family: TestFamily,
                allow_interleaving: bool = False) -> bool:
    """Structural membership of ``seq`` in a test family."""
    family = TestFamily(family)
    if family == TestFamily.STANDARD:
        return _is_standard(m, seq)
    if family == TestFamily.INTERLEAVED:
        return _is_interleaved(m, seq)
    if family == TestFamily.EXTENDED:
        base = _is_interleaved if allow_interleaving else _is_standard
        return _without_nops(m, seq, base)
    if family == TestFamily.SOFT_RESET:
        return _is_soft_reset(m, seq)
    return _is_hard_reset(seq)


def mirror(m: DupMap, arch: Sequence[int]) -> Tuple[int, ...]:
    """Copy every original value onto its duplicate location."""
    result = list(arch)
    for o, d in m.pairs:
        result[d] = result[o]
    return tuple(result)


def enumerate_qed_consistent_inits(
    sys: TransitionSystem,
    m: DupMap,
    strategy: InitStrategy = InitStrategy.SUPPORT,
    alphabet: Optional[Sequence[Instruction]] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[State]:
    """QED-consistent initial states: free choice on original locations, mirrored onto duplicates.

    Canonical order: lexicographic over the values of the varied original
    locations. ``support`` varies only the original locations the alphabet
    touches and leaves the rest at zero.
    """
    strategy = InitStrategy(strategy)
    samples = config.INIT_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    zero = tuple([0] * sys.locations)

    if strategy == InitStrategy.ZERO:
        return [State(zero, sys.n0)]

    if strategy == InitStrategy.SUPPORT and alphabet:
        varied = sorted({
            loc if loc in m.forward else m.d_inv(loc)
            for instr in alphabet for loc in instr.locations
            if loc in m.forward or loc in m.inverse
        })
    else:
        varied = list(m.ordered_originals)

    if strategy == InitStrategy.SAMPLE or sys.values ** len(varied) > config.MAX_STATES:
        if strategy != InitStrategy.SAMPLE:
            logger.warning(
                f"{sys.name}: {sys.values ** len(varied)} QED-consistent initial states exceed the budget, "
                f"sampling {samples}"
            )
        rng = random.Random(seed)
        found = {zero: None}
        attempts = 0
        while len(found) < samples and attempts < samples * 20:
            arch = [0] * sys.locations
            for loc in varied:
                arch[loc] = rng.randrange(sys.values)
            found[mirror(m, arch)] = None
            attempts += 1
        return [State(arch, sys.n0) for arch in found]

    result = []
    for values in itertools.product(range(sys.values), repeat=len(varied)):
        arch = [0] * sys.locations
        for loc, value in zip(varied, values):
            arch[loc] = value
        result.append(State(mirror(m, arch), sys.n0))
    return result
