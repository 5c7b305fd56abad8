"""Bounded exhaustive search for failing QED tests, plus bug-specific test constructors.

Tests are explored in increasing length, then lexicographically by
instruction encoding. Within one length the candidates form a prefix tree
that is walked depth-first, one subtree per first instruction, with the
states of every initial state carried along each prefix so shared prefixes
are executed once.
"""

import itertools
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from core.duplication import DupMap, InstrClass, classify_instr, dup_instr, dup_seq, original_instructions, undup_instr
from core.model import Instruction, OpcodeRole, State, TransitionSystem, explore, is_nop, run
from core.shared import (
    BudgetExceededError, ConfigError, ConstructionError, OutOfScopeError, PreconditionError,
)
from services.qed import (
    QedTest, TestFamily, TestMeta, Verdict, enumerate_qed_consistent_inits,
    hard_reset_verdict, qed_consistent, run_qed_test,
)
from services.spec_oracle import Bug, SpecRelation, ViolationType, classify_violation, spec_holds
from utils.config import config
from utils.logger import qed_logger
from zoo.builder import hard_reset_instr, soft_reset_instr
from zoo.schemas import InitStrategy

if TYPE_CHECKING:
    from zoo.corpus import CorpusEntry

logger = logging.getLogger(f"qedlab.{__name__}")

SEARCH_FAMILIES = frozenset({TestFamily.STANDARD, TestFamily.EXTENDED, TestFamily.INTERLEAVED})

# Move kinds in the test grammar; also the tie-break order between equal instructions.
_ORIGINAL, _DUPLICATE, _INSERT = 0, 1, 2


class SearchOutcome(str, Enum):
    NO_FAILURE = "NoFailure"
    FAILURE = "Failure"


@dataclass(frozen=True)
class SearchConfig:
    bound: int
    alphabet: Tuple[Instruction, ...]
    families: FrozenSet[TestFamily] = frozenset({TestFamily.STANDARD})
    nop_alphabet: Tuple[Instruction, ...] = ()
    init_strategy: InitStrategy = InitStrategy.SUPPORT
    init_samples: int = field(default_factory=lambda: config.INIT_SAMPLES)
    seed: int = field(default_factory=lambda: config.DEFAULT_SEED)
    max_nop_insertions: int = field(default_factory=lambda: config.MAX_NOP_INSERTIONS)
    max_tests: int = field(default_factory=lambda: config.MAX_TESTS)
    # Explicit QED-consistent initial states; replaces the strategy when given.
    inits: Optional[Tuple[State, ...]] = None

    def __post_init__(self):
        if self.bound < 1:
            raise ConfigError(f"search bound must be at least 1, got {self.bound}", field="search.bound")
        if not self.alphabet:
            raise ConfigError("search alphabet is empty", field="search.alphabet")
        unknown = set(self.families) - SEARCH_FAMILIES
        if unknown or not self.families:
            raise ConfigError(
                f"searchable families are standard, extended and interleaved, got {sorted(f.value for f in unknown)}",
                field="search.families",
            )
        if self.extended and self.max_nop_insertions and not self.nop_alphabet:
            raise ConfigError("extended tests need a NOP alphabet", field="search.nop_alphabet")

    @property
    def interleaving(self) -> bool:
        return TestFamily.INTERLEAVED in self.families

    @property
    def extended(self) -> bool:
        return TestFamily.EXTENDED in self.families

    @property
    def insert_limit(self) -> int:
        return self.max_nop_insertions if self.extended else 0

    @property
    def max_length(self) -> int:
        return 2 * self.bound + self.insert_limit

    @classmethod
    def from_entry(
        cls,
        entry: "CorpusEntry",
        bound: Optional[int] = None,
        families: Optional[Iterable[str]] = None,
        max_tests: Optional[int] = None,
        seed: Optional[int] = None,
        alphabet: Optional[Sequence[Instruction]] = None,
        inits: Optional[Sequence[State]] = None,
    ) -> "SearchConfig":
        """Search section of a corpus entry with command-line overrides applied."""
        section = entry.config.search
        chosen = list(families) if families else [f.value for f in section.families]
        return cls(
            bound=bound or section.bound,
            alphabet=tuple(alphabet) if alphabet else entry.search_alphabet,
            families=frozenset(TestFamily(f) for f in chosen),
            nop_alphabet=entry.nop_alphabet,
            init_strategy=section.init_strategy,
            init_samples=section.init_samples,
            seed=section.seed if seed is None else seed,
            max_nop_insertions=section.max_nop_insertions,
            max_tests=max_tests or section.max_tests,
            inits=tuple(inits) if inits else None,
        )


@dataclass
class SearchStats:
    tests_executed: int = 0
    states_visited: int = 0
    lengths_searched: int = 0
    inits: int = 0
    wall_time: float = 0.0


@dataclass
class SearchResult:
    outcome: SearchOutcome
    bound: int
    stats: SearchStats
    complete: bool = True
    test: Optional[QedTest] = None
    verdict: Optional[Verdict] = None
    init: Optional[State] = None

    @property
    def failed(self) -> bool:
        return self.outcome == SearchOutcome.FAILURE


@dataclass(frozen=True)
class _Grammar:
    """Which instruction may come next in a test of a given total length."""
    alphabet: Tuple[Instruction, ...]
    dups: Tuple[Instruction, ...]
    nop_alphabet: Tuple[Instruction, ...]
    bound: int
    insert_limit: int
    interleaving: bool

    def feasible(self, originals: int, dups: int, inserts: int, remaining: int) -> bool:
        rest = remaining - (originals - dups)
        if rest < 0:
            return False
        for extra in range(self.bound - originals + 1):
            nops = rest - 2 * extra
            if nops < 0:
                break
            if nops <= self.insert_limit - inserts and originals + extra >= 1:
                return True
        return False

    def children(self, origs: Sequence[int], dups: int, inserts: int, remaining: int) -> List[Tuple]:
        items = []
        o = len(origs)
        if o < self.bound and (dups == 0 or self.interleaving) and self.feasible(o + 1, dups, inserts, remaining - 1):
            items.extend((instr, _ORIGINAL, index) for index, instr in enumerate(self.alphabet))
        if dups < o and self.feasible(o, dups + 1, inserts, remaining - 1):
            items.append((self.dups[origs[dups]], _DUPLICATE, None))
        if inserts < self.insert_limit and self.feasible(o, dups, inserts + 1, remaining - 1):
            items.extend((nop, _INSERT, None) for nop in self.nop_alphabet)
        items.sort(key=lambda item: (item[0].sort_key, item[1]))
        return items


@dataclass
class _PartitionResult:
    failing: Optional[Tuple] = None
    tests: int = 0
    states: int = 0
    exhausted: bool = False


class _Walker:
    """Depth-first walk of one subtree, stopping at its first failing leaf."""

    def __init__(self, sys: TransitionSystem, pairs, grammar: _Grammar, length: int, budget: int):
        self.delta = sys.delta
        self.pairs = pairs
        self.grammar = grammar
        self.length = length
        self.budget = budget
        self.result = _PartitionResult()

    def _leaf(self, seq, nops, interleaved, states):
        pairs = self.pairs
        for index, s in enumerate(states):
            self.result.tests += 1
            arch = s.arch
            for o, d in pairs:
                if arch[o] != arch[d]:
                    return (tuple(seq), index, tuple(nops), interleaved)
        return None

    def walk(self, seq, origs, dups, inserts, nops, interleaved, states):
        remaining = self.length - len(seq)
        if remaining == 0:
            return self._leaf(seq, nops, interleaved, states)
        if self.result.tests >= self.budget:
            self.result.exhausted = True
            return None
        for instr, kind, payload in self.grammar.children(origs, dups, inserts, remaining):
            found = self.step(seq, origs, dups, inserts, nops, interleaved, states, instr, kind, payload)
            if found is not None or self.result.exhausted:
                return found
        return None

    def step(self, seq, origs, dups, inserts, nops, interleaved, states, instr, kind, payload):
        delta = self.delta
        child = [delta(s, instr) for s in states]
        self.result.states += len(states)
        seq.append(instr)
        if kind == _ORIGINAL:
            origs.append(payload)
            found = self.walk(seq, origs, dups, inserts, nops, interleaved or dups > 0, child)
            origs.pop()
        elif kind == _DUPLICATE:
            found = self.walk(seq, origs, dups + 1, inserts, nops, interleaved, child)
        else:
            nops.append(len(seq) - 1)
            found = self.walk(seq, origs, dups, inserts + 1, nops, interleaved, child)
            nops.pop()
        seq.pop()
        return found


def _search_partition(task) -> _PartitionResult:
    sys, pairs, grammar, inits, length, first, budget = task
    walker = _Walker(sys, pairs, grammar, length, budget)
    instr, kind, payload = first
    walker.result.failing = walker.step([], [], 0, 0, [], False, list(inits), instr, kind, payload)
    return walker.result


def _map(pool: Optional[Executor], tasks: List) -> List[_PartitionResult]:
    if pool is None:
        return [_search_partition(task) for task in tasks]
    return list(pool.map(_search_partition, tasks))


def bmc_search(sys: TransitionSystem, m: DupMap, cfg: SearchConfig, jobs: int = 1) -> SearchResult:
    """Shortest-first search for a failing QED test up to ``2 * bound`` (plus NOP insertions).

    Every first-instruction subtree of a length is searched up to its own
    first failure, whatever the worker count, and the least failure wins, so
    the result and the statistics do not depend on ``jobs``. The test budget
    applies per subtree; an exhausted subtree ahead of every failure makes
    the result incomplete.
    """
    started = time.perf_counter()
    for instr in cfg.alphabet:
        if classify_instr(m, instr) != InstrClass.ORIGINAL:
            raise ConfigError(f"search alphabet entry {instr} is not original under {m.describe()}",
                              field="search.alphabet")
    alphabet = tuple(sorted(set(cfg.alphabet), key=lambda i: i.sort_key))
    grammar = _Grammar(
        alphabet=alphabet,
        dups=tuple(dup_instr(m, i) for i in alphabet),
        nop_alphabet=tuple(sorted(set(cfg.nop_alphabet), key=lambda i: i.sort_key)),
        bound=cfg.bound,
        insert_limit=cfg.insert_limit,
        interleaving=cfg.interleaving,
    )
    inits = list(cfg.inits) if cfg.inits else enumerate_qed_consistent_inits(
        sys, m, cfg.init_strategy, alphabet, cfg.init_samples, cfg.seed
    )
    for s0 in inits:
        if not qed_consistent(m, s0) or not sys.is_initial(s0):
            raise PreconditionError(f"search initial state {s0} is not a QED-consistent initial state")

    stats = SearchStats(inits=len(inits))
    qed_logger.log_search(sys.name, "started", {
        "bound": cfg.bound, "families": sorted(f.value for f in cfg.families),
        "alphabet": len(alphabet), "inits": len(inits), "jobs": jobs,
    }, level="DEBUG")

    def finish(outcome, complete, failing=None):
        stats.wall_time = time.perf_counter() - started
        result = SearchResult(outcome, cfg.bound, stats, complete)
        if failing is not None:
            seq, index, nops, interleaved = failing
            family = TestFamily.EXTENDED if nops else (
                TestFamily.INTERLEAVED if interleaved else TestFamily.STANDARD
            )
            test = QedTest(seq, family, TestMeta(
                dup_map=m,
                prefix_size=(len(seq) - len(nops)) // 2,
                nop_positions=nops,
                interleaved=interleaved,
                init=inits[index],
            ))
            result.test = test
            result.init = inits[index]
            result.verdict = run_qed_test(sys, m, test, inits[index])
        qed_logger.log_search(sys.name, outcome.value, {
            "tests": stats.tests_executed, "states": stats.states_visited,
            "complete": complete, "length": len(failing[0]) if failing else None,
        })
        return result

    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for length in range(2, cfg.max_length + 1):
            if not grammar.feasible(0, 0, 0, length):
                continue
            budget = cfg.max_tests - stats.tests_executed
            if budget <= 0:
                logger.warning(f"Search on {sys.name} hit the test budget before length {length}")
                return finish(SearchOutcome.NO_FAILURE, False)
            roots = grammar.children([], 0, 0, length)
            tasks = [(sys, m.pairs, grammar, inits, length, root, budget) for root in roots]
            partitions = _map(pool, tasks)
            stats.lengths_searched += 1
            for part in partitions:
                stats.tests_executed += part.tests
                stats.states_visited += part.states
            logger.debug(f"{sys.name}: length {length} searched, {stats.tests_executed} tests so far")
            for part in partitions:
                if part.failing is not None:
                    return finish(SearchOutcome.FAILURE, True, part.failing)
                if part.exhausted:
                    logger.warning(f"Search on {sys.name} exhausted its test budget at length {length}")
                    return finish(SearchOutcome.NO_FAILURE, False)
        return finish(SearchOutcome.NO_FAILURE, True)
    finally:
        if pool is not None:
            pool.shutdown()


def processor_qed_consistent(sys: TransitionSystem, m: DupMap, cfg: SearchConfig, jobs: int = 1) -> bool:
    """Whether every QED test up to the bound succeeds."""
    result = bmc_search(sys, m, cfg, jobs)
    if not result.complete:
        raise BudgetExceededError(
            f"search on {sys.name} did not finish within {cfg.max_tests} tests",
            partial_count=result.stats.tests_executed, partial=result,
        )
    return not result.failed


def _bug_specific_case(
    spec: SpecRelation, m: DupMap, i_1: Instruction, i_b: Instruction, states: Sequence[State], n: int,
) -> Optional[Tuple[str, int, int]]:
    """Case and (l_x, l_y) roles when the trace meets the bug-type requirements, else None."""
    s0, s1, s_n, s_n1, s_2n = states[0], states[1], states[n], states[n + 1], states[2 * n]
    if not spec_holds(spec, s0, i_1, s1) or spec_holds(spec, s_n, i_b, s_n1):
        return None
    violation = classify_violation(spec, s_n, i_b, s_n1)
    if violation.kind in (ViolationType.TYPE_A, ViolationType.BOTH):
        lx, ly = i_1.out, i_b.out
        if (s_n1[ly] == s_2n[ly] and s1[lx] == s_2n[lx]
                and all(s0[loc] == s_n[loc] for loc in i_b.ins)):
            return ("A", lx, ly)
    for bad in violation.bad_locations:
        if bad not in m.inverse or m.d_inv(bad) == i_1.out:
            continue
        lx, ly = m.d_inv(bad), bad
        if s_n1[ly] == s_2n[ly] and s1[lx] == s_2n[lx] and s1[ly] == s_n[ly]:
            return ("B", lx, ly)
    return None


def build_bug_specific_test(
    sys: TransitionSystem,
    spec: SpecRelation,
    m: DupMap,
    bug: Bug,
    connector_search_depth: Optional[int] = None,
    inits: Optional[Sequence[State]] = None,
    connector_alphabet: Optional[Sequence[Instruction]] = None,
) -> Optional[QedTest]:
    """Standard test whose first duplicate is the buggy instruction and which must fail.

    Connectors between ``d^-1(i_b)`` and ``i_b`` are original instructions,
    tried by length, then lexicographically, then by initial state; the
    trigger, specification and location-preservation requirements are all
    checked on the concrete trace. Returns None when no connector up to the
    depth works.
    """
    i_b = bug.instr
    if classify_instr(m, i_b) != InstrClass.DUPLICATE:
        raise ConstructionError(
            f"{i_b} is not a duplicate instruction under {m.describe()}; "
            f"choose a dup map that maps its locations into the duplicate half"
        )
    depth = config.CONNECTOR_DEPTH if connector_search_depth is None else connector_search_depth
    i_1 = undup_instr(m, i_b)
    connectors = tuple(sorted(
        connector_alphabet if connector_alphabet is not None else original_instructions(sys, m),
        key=lambda i: i.sort_key,
    ))
    if inits is None:
        inits = enumerate_qed_consistent_inits(sys, m, InitStrategy.SUPPORT, (i_1,) + connectors)

    for length in range(depth + 1):
        for connector in itertools.product(connectors, repeat=length):
            originals = (i_1,) + connector
            test_instrs = originals + dup_seq(m, originals)
            n = len(originals)
            for s0 in inits:
                path = run(sys, s0, test_instrs)
                found = _bug_specific_case(spec, m, i_1, i_b, path.states, n)
                if found is None:
                    continue
                case, lx, ly = found
                padding = 0
                for instr in reversed(connector):
                    if not is_nop(instr):
                        break
                    padding += 1
                logger.debug(f"Bug-specific test for {i_b}: case {case}, n={n}, roles (l{lx}, l{ly})")
                return QedTest(test_instrs, TestFamily.STANDARD, TestMeta(
                    dup_map=m, prefix_size=n, init=s0, bug_instr=i_b, case=case,
                    witness_roles=(lx, ly), nop_padding=padding,
                ))
    logger.debug(f"No bug-specific test for {i_b} with connectors up to {depth}")
    return None


def _check_bug_prefix(sys: TransitionSystem, spec: SpecRelation, prefix: Sequence[Instruction], s0: State) -> None:
    if len(prefix) < 2:
        raise OutOfScopeError(
            f"bug prefixes of size {len(prefix)} are single-instruction bugs; check single-instruction correctness instead"
        )
    path = run(sys, s0, prefix)
    k = len(prefix)
    for index in range(k - 1):
        if not spec_holds(spec, path.states[index], prefix[index], path.states[index + 1]):
            raise ConstructionError(f"bug prefix is not minimal: {prefix[index]} at position {index + 1} already fails")
    if spec_holds(spec, path.states[k - 1], prefix[k - 1], path.states[k]):
        raise ConstructionError(f"bug prefix does not trigger a bug: {prefix[k - 1]} executes per specification")


def build_soft_reset_test(
    sys: TransitionSystem, spec: SpecRelation, m: DupMap, bug_prefix: Sequence[Instruction], s0: State,
) -> QedTest:
    """Bug prefix, then each duplicate preceded by a soft reset: length ``3k``."""
    prefix = tuple(bug_prefix)
    for index, instr in enumerate(prefix):
        if classify_instr(m, instr) != InstrClass.ORIGINAL:
            raise ConstructionError(f"bug prefix entry {index + 1} ({instr}) is not an original instruction")
    if not qed_consistent(m, s0) or not sys.is_initial(s0):
        raise PreconditionError(f"soft-reset tests start from a QED-consistent initial state, got {s0}")
    _check_bug_prefix(sys, spec, prefix, s0)
    k = len(prefix)
    path = run(sys, s0, prefix)
    before, after = path.states[k - 1], path.states[k]
    corrupted = [loc for loc in sorted(m.duplicates) if before[loc] != after[loc]]
    if corrupted:
        raise ConstructionError(f"{prefix[-1]} corrupts duplicate location l{corrupted[0]}")
    reset = soft_reset_instr(sys)
    tail = []
    for instr in dup_seq(m, prefix):
        tail.extend((reset, instr))
    return QedTest(prefix + tuple(tail), TestFamily.SOFT_RESET, TestMeta(
        dup_map=m, prefix_size=k, init=s0, bug_instr=prefix[-1],
        nop_positions=tuple(range(k, 3 * k, 2)),
    ))


def build_bug_hunting_test(
    sys: TransitionSystem, m: DupMap, bug_prefix: Sequence[Instruction], nop: Instruction, spacing: int = 1,
) -> QedTest:
    """Extended test: bug prefix, then its duplicates spread apart by ``spacing`` NOPs."""
    if not is_nop(nop):
        raise ConstructionError(f"{nop} is not a NOP instruction")
    prefix = tuple(bug_prefix)
    duplicates = dup_seq(m, prefix)
    instrs = list(prefix)
    nops = []
    for index, instr in enumerate(duplicates):
        if index:
            for _ in range(spacing):
                nops.append(len(instrs))
                instrs.append(nop)
        instrs.append(instr)
    return QedTest(tuple(instrs), TestFamily.EXTENDED, TestMeta(
        dup_map=m, prefix_size=len(prefix), nop_positions=tuple(nops), bug_instr=prefix[-1] if prefix else None,
    ))


def find_bug_prefix(
    sys: TransitionSystem,
    spec: SpecRelation,
    m: DupMap,
    alphabet: Sequence[Instruction],
    inits: Sequence[State],
    max_k: int,
    clean_duplicates: bool = True,
) -> Optional[Tuple[Tuple[Instruction, ...], State]]:
    """Least minimal bug prefix of size 2..max_k over original instructions.

    With ``clean_duplicates`` the buggy instruction must leave every
    duplicate location untouched, as soft-reset tests require.
    """
    alphabet = tuple(sorted(alphabet, key=lambda i: i.sort_key))
    delta = sys.delta
    duplicates = sorted(m.duplicates)
    for k in range(2, max_k + 1):
        for prefix in itertools.product(alphabet, repeat=k):
            for s0 in inits:
                s = s0
                minimal = True
                for instr in prefix[:-1]:
                    nxt = delta(s, instr)
                    if not spec_holds(spec, s, instr, nxt):
                        minimal = False
                        break
                    s = nxt
                if not minimal:
                    continue
                last = delta(s, prefix[-1])
                if spec_holds(spec, s, prefix[-1], last):
                    continue
                if clean_duplicates and any(s[loc] != last[loc] for loc in duplicates):
                    continue
                return prefix, s0
    return None


def build_hard_reset_test(
    sys: TransitionSystem, prefix: Sequence[Instruction], mu: State, spec: Optional[SpecRelation] = None,
) -> QedTest:
    """prefix, hard reset to ``mu``, prefix without its last instruction, soft reset, last instruction.

    With ``spec`` the prefix is also checked to trigger a bug from ``mu``.
    """
    prefix = tuple(prefix)
    if len(prefix) < 2:
        raise OutOfScopeError(f"hard-reset tests need a bug prefix of size at least 2, got {len(prefix)}")
    hard = hard_reset_instr(sys, mu)
    soft = soft_reset_instr(sys)
    if spec is not None:
        path = run(sys, mu, prefix)
        if spec_holds(spec, path.states[-2], prefix[-1], path.last):
            raise ConstructionError(f"prefix does not trigger a bug: {prefix[-1]} executes per specification")
    k = len(prefix)
    instrs = prefix + (hard,) + prefix[:-1] + (soft, prefix[-1])
    return QedTest(instrs, TestFamily.HARD_RESET, TestMeta(
        prefix_size=k, requires_consistent=False, init=mu, reset_target=mu, bug_instr=prefix[-1],
    ))


def check_hard_reset_test(sys: TransitionSystem, test: QedTest, mu: State) -> Verdict:
    """Fail iff ``s_k`` and ``s_2k+2`` differ at some location."""
    return hard_reset_verdict(sys, test, mu)


@dataclass
class HardResetSearchResult:
    max_k: int
    pairs_checked: int
    failing_pairs: int
    complete: bool = True
    test: Optional[QedTest] = None
    verdict: Optional[Verdict] = None
    init: Optional[State] = None

    @property
    def failed(self) -> bool:
        return self.failing_pairs > 0


def hard_reset_search(
    sys: TransitionSystem,
    inits: Sequence[State],
    max_k: int,
    alphabet: Optional[Sequence[Instruction]] = None,
    max_states: Optional[int] = None,
) -> HardResetSearchResult:
    """All hard-reset tests with bug-prefix size 2..max_k from ``inits``.

    A test's verdict depends only on the state before its last prefix
    instruction and on that instruction, so prefixes are deduplicated by the
    state they reach. The first failure reported has the shortest prefix.
    """
    if max_k < 2:
        raise OutOfScopeError(f"hard-reset tests need a bug prefix of size at least 2, got {max_k}")
    alphabet = sys.spec_alphabet if alphabet is None else tuple(alphabet)
    complete = True
    try:
        exploration = explore(sys, inits, max_k - 1, alphabet=alphabet, max_states=max_states)
    except BudgetExceededError as e:
        exploration = e.partial
        complete = False

    delta = sys.delta
    # Without reset hardware the verdicts are still computed, but no test is built.
    buildable = bool(sys.opcodes_with_role(OpcodeRole.HARD_RESET) and sys.opcodes_with_role(OpcodeRole.SOFT_RESET))
    result = HardResetSearchResult(max_k=max_k, pairs_checked=0, failing_pairs=0, complete=complete)
    for s, level in exploration.depths.items():
        if level < 1:
            continue
        reset = State(s.arch, sys.n0)
        for instr in alphabet:
            result.pairs_checked += 1
            if delta(s, instr).arch == delta(reset, instr).arch:
                continue
            result.failing_pairs += 1
            if result.test is None and buildable:
                root, instrs = exploration.path_to(s)
                test = build_hard_reset_test(sys, instrs + (instr,), root)
                result.test = test
                result.init = root
                result.verdict = check_hard_reset_test(sys, test, root)
    logger.debug(
        f"Hard-reset search on {sys.name}: {result.pairs_checked} prefix endings, {result.failing_pairs} failing"
    )
    return result
