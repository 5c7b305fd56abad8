"""Executable law suite: soundness, completeness and their supporting lemmas checked over the corpus."""

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from core.duplication import InstrClass, classify_instr, dup_instr, dup_seq
from core.model import Instruction, OpcodeRole, State, explore, run
from core.shared import BudgetExceededError, QedLabError, UnknownLawError
from services.bmc_engine import (
    SearchConfig, SearchResult, bmc_search, build_bug_specific_test, build_soft_reset_test,
    find_bug_prefix, hard_reset_search,
)
from services.qed import (
    TestFamily, enumerate_qed_consistent_inits, mirror, qed_consistent, run_qed_test,
)
from services.spec_oracle import (
    OracleResult, ViolationType, bounded_correct, find_bugs, select_initial_states,
    single_instruction_correct, spec_holds,
)
from utils.logger import qed_logger
from zoo.corpus import CorpusEntry

logger = logging.getLogger(f"qedlab.{__name__}")

LAW_IDS = (
    "lemma1", "lemma2", "cor1", "eq2", "eq3", "eq4", "prop1", "lemma3",
    "lemma4a", "lemma4b", "lemma5", "thm1", "thm2", "ext", "fwd_extended",
)

# Violations listed per report; the count is always exact.
_MAX_LISTED = 20


@dataclass(frozen=True)
class LawBudgets:
    """Finite instantiation of the law quantifiers. ``None`` defers to each system's search section."""
    depth: Optional[int] = None
    bound: Optional[int] = None
    hard_reset_k: Optional[int] = None
    connector_depth: int = 2
    max_partners: int = 4
    max_bugs: int = 4
    max_nop_insertions: int = 1
    max_states: Optional[int] = None
    jobs: int = 1

    def depth_for(self, entry: CorpusEntry) -> int:
        return entry.config.search.depth if self.depth is None else self.depth

    def bound_for(self, entry: CorpusEntry) -> int:
        return entry.config.search.bound if self.bound is None else self.bound

    def hard_reset_k_for(self, entry: CorpusEntry) -> int:
        return entry.config.search.hard_reset_k if self.hard_reset_k is None else self.hard_reset_k


@dataclass
class LawReport:
    law: str
    instantiation: str
    systems: List[str] = field(default_factory=list)
    instances: int = 0
    violation_count: int = 0
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def violate(self, message: str) -> None:
        self.violation_count += 1
        if len(self.violations) < _MAX_LISTED:
            self.violations.append(message)


def standard_tests(m, alphabet: Sequence[Instruction], bound: int) -> Iterator[Tuple[Instruction, ...]]:
    for n in range(1, bound + 1):
        for originals in itertools.product(alphabet, repeat=n):
            yield originals + dup_seq(m, originals)


def interleavings(m, originals: Sequence[Instruction]) -> Iterator[Tuple[Instruction, ...]]:
    """Every order keeping originals and duplicates in sequence with each duplicate after its original."""
    duplicates = dup_seq(m, originals)
    n = len(originals)

    def extend(prefix, emitted, dups):
        if dups == n:
            yield tuple(prefix)
            return
        if emitted < n:
            yield from extend(prefix + [originals[emitted]], emitted + 1, dups)
        if dups < emitted:
            yield from extend(prefix + [duplicates[dups]], emitted, dups + 1)

    yield from extend([], 0, 0)


def with_insertions(seq: Sequence[Instruction], nops: Sequence[Instruction], count: int) -> Iterator[Tuple[Instruction, ...]]:
    """``seq`` with exactly ``count`` NOPs inserted strictly inside it."""
    if count == 0:
        yield tuple(seq)
        return
    for position in range(1, len(seq)):
        for nop in nops:
            head, tail = tuple(seq[:position]), tuple(seq[position:])
            for rest in with_insertions(tail, nops, count - 1):
                yield head + (nop,) + rest


class LawChecker:
    """Runs law checks over a corpus, caching oracle and search results shared between laws."""

    def __init__(self, corpus: Sequence[CorpusEntry], budgets: Optional[LawBudgets] = None):
        self.corpus = sorted(corpus, key=lambda e: e.name)
        self.budgets = budgets or LawBudgets()
        self._inits: Dict[str, List[State]] = {}
        self._qed_inits: Dict[str, List[State]] = {}
        self._oracles: Dict[Tuple[str, int], OracleResult] = {}
        self._searches: Dict[str, SearchResult] = {}
        self._bug_tests: Dict[str, List[Tuple]] = {}
        self._explorations: Dict[str, List[State]] = {}
        self._indexes: Dict[Tuple, Dict[Tuple[int, ...], List[State]]] = {}
        self.registry: Dict[str, Callable[[], LawReport]] = {
            "lemma1": self.lemma1,
            "lemma2": self.lemma2,
            "cor1": self.cor1,
            "eq2": lambda: self.frame(InstrClass.ORIGINAL),
            "eq3": lambda: self.frame(InstrClass.DUPLICATE),
            "eq4": self.eq4,
            "prop1": self.prop1,
            "lemma3": self.lemma3,
            "lemma4a": lambda: self.lemma4("A"),
            "lemma4b": lambda: self.lemma4("B"),
            "lemma5": self.lemma5,
            "thm1": self.thm1,
            "thm2": self.thm2,
            "ext": self.ext,
            "fwd_extended": self.fwd_extended,
        }

    # shared, cached inputs

    def inits(self, entry: CorpusEntry) -> List[State]:
        if entry.name not in self._inits:
            section = entry.config.search
            self._inits[entry.name] = select_initial_states(
                entry.system, section.init_strategy, alphabet=entry.oracle_alphabet,
                samples=section.init_samples, seed=section.seed,
            )
        return self._inits[entry.name]

    def qed_inits(self, entry: CorpusEntry) -> List[State]:
        if entry.name not in self._qed_inits:
            section = entry.config.search
            self._qed_inits[entry.name] = enumerate_qed_consistent_inits(
                entry.system, entry.dup_map, section.init_strategy, entry.search_alphabet,
                section.init_samples, section.seed,
            )
        return self._qed_inits[entry.name]

    def reachable(self, entry: CorpusEntry) -> List[State]:
        if entry.name not in self._explorations:
            try:
                exploration = explore(entry.system, self.inits(entry), self.budgets.depth_for(entry),
                                      alphabet=entry.oracle_alphabet, max_states=self.budgets.max_states)
            except BudgetExceededError as e:
                exploration = e.partial
            self._explorations[entry.name] = list(exploration.parents)
        return self._explorations[entry.name]

    def oracle(self, entry: CorpusEntry, depth: Optional[int] = None) -> OracleResult:
        depth = self.budgets.depth_for(entry) if depth is None else depth
        key = (entry.name, depth)
        if key not in self._oracles:
            result = find_bugs(entry.system, entry.spec, self.inits(entry), depth,
                               alphabet=entry.oracle_alphabet, max_states=self.budgets.max_states,
                               jobs=self.budgets.jobs)
            qed_logger.log_oracle(entry.name, depth, len(result.bugs), result.complete)
            self._oracles[key] = result
        return self._oracles[key]

    def search(self, entry: CorpusEntry) -> SearchResult:
        if entry.name not in self._searches:
            cfg = SearchConfig.from_entry(entry, bound=self.budgets.bound_for(entry))
            self._searches[entry.name] = bmc_search(entry.system, entry.dup_map, cfg, jobs=self.budgets.jobs)
        return self._searches[entry.name]

    def bug_specific_tests(self, entry: CorpusEntry) -> List[Tuple]:
        """(bug, test or None) for the first duplicate-instruction bugs of the entry."""
        if entry.name not in self._bug_tests:
            found = []
            bugs = [b for b in self.oracle(entry).bugs
                    if classify_instr(entry.dup_map, b.instr) == InstrClass.DUPLICATE]
            for bug in bugs[:self.budgets.max_bugs]:
                test = build_bug_specific_test(
                    entry.system, entry.spec, entry.dup_map, bug,
                    connector_search_depth=self.budgets.connector_depth,
                    inits=self.qed_inits(entry), connector_alphabet=entry.search_alphabet,
                )
                found.append((bug, test))
            self._bug_tests[entry.name] = found
        return self._bug_tests[entry.name]

    def _spec_triples(self, entry: CorpusEntry, kind: Optional[InstrClass] = None):
        sys, spec, m = entry.system, entry.spec, entry.dup_map
        delta = sys.delta
        alphabet = [i for i in entry.oracle_alphabet if kind is None or classify_instr(m, i) == kind]
        for s in self.reachable(entry):
            for instr in alphabet:
                s2 = delta(s, instr)
                if spec_holds(spec, s, instr, s2):
                    yield s, instr, s2

    def _report(self, law: str, detail: str) -> LawReport:
        b = self.budgets
        header = (
            f"{detail}; corpus of {len(self.corpus)} systems; depth={b.depth or 'per-system'} "
            f"bound={b.bound or 'per-system'} hard_reset_k={b.hard_reset_k or 'per-system'} "
            f"connector_depth={b.connector_depth} max_bugs={b.max_bugs}"
        )
        return LawReport(law=law, instantiation=header, systems=[e.name for e in self.corpus])

    # laws

    def frame(self, kind: InstrClass) -> LawReport:
        law = "eq2" if kind == InstrClass.ORIGINAL else "eq3"
        untouched = "duplicate" if kind == InstrClass.ORIGINAL else "original"
        report = self._report(law, f"spec-conforming {kind.value.lower()} steps from reachable states leave {untouched} locations unchanged")
        for entry in self.corpus:
            m = entry.dup_map
            protected = sorted(m.duplicates if kind == InstrClass.ORIGINAL else m.originals)
            for s, instr, s2 in self._spec_triples(entry, kind):
                report.instances += 1
                changed = [loc for loc in protected if s[loc] != s2[loc]]
                if changed:
                    report.violate(f"{entry.name}: {instr} changed l{changed[0]} from {s}")
        return report

    def eq4(self) -> LawReport:
        report = self._report("eq4", "spec-conforming steps with equal opcode and input values agree on the output value")
        for entry in self.corpus:
            seen: Dict[Tuple, Tuple[int, Instruction]] = {}
            for s, instr, s2 in self._spec_triples(entry):
                report.instances += 1
                key = (instr.opcode.id, s[instr.ins[0]], s[instr.ins[1]])
                value = s2[instr.out]
                if key in seen and seen[key][0] != value:
                    report.violate(f"{entry.name}: {instr} wrote {value}, {seen[key][1]} wrote {seen[key][0]}")
                seen.setdefault(key, (value, instr))
        return report

    def _partners(self, entry: CorpusEntry, locations: Tuple[int, ...], values: Tuple[int, ...]) -> List[State]:
        """First reachable states holding ``values`` at ``locations``."""
        key = (entry.name, locations)
        if key not in self._indexes:
            index: Dict[Tuple[int, ...], List[State]] = {}
            for s in self.reachable(entry):
                bucket = index.setdefault(tuple(s[loc] for loc in locations), [])
                if len(bucket) < self.budgets.max_partners:
                    bucket.append(s)
            self._indexes[key] = index
        return self._indexes[key].get(values, [])

    def cor1(self) -> LawReport:
        report = self._report("cor1", "original/duplicate pairs with matching input values produce matching outputs")
        for entry in self.corpus:
            m, spec, delta = entry.dup_map, entry.spec, entry.system.delta
            for s0, instr, s_orig in self._spec_triples(entry, InstrClass.ORIGINAL):
                dup = dup_instr(m, instr)
                wanted = (s0[instr.ins[0]], s0[instr.ins[1]])
                for s1 in self._partners(entry, dup.ins, wanted):
                    s_dup = delta(s1, dup)
                    if not spec_holds(spec, s1, dup, s_dup):
                        continue
                    report.instances += 1
                    if s_orig[instr.out] != s_dup[dup.out]:
                        report.violate(f"{entry.name}: {instr} gave {s_orig[instr.out]}, {dup} gave {s_dup[dup.out]}")
        return report

    def lemma1(self) -> LawReport:
        report = self._report("lemma1", "mirrored states stay mirrored across an original/duplicate pair, per location")
        for entry in self.corpus:
            m, spec, delta = entry.dup_map, entry.spec, entry.system.delta
            originals = m.ordered_originals
            images = tuple(m.d(o) for o in originals)
            for s0, instr, s_orig in self._spec_triples(entry, InstrClass.ORIGINAL):
                dup = dup_instr(m, instr)
                mirrored = State(mirror(m, s0.arch), s0.narch)
                partners = self._partners(entry, images, tuple(s0[o] for o in originals))
                for s1 in [mirrored] + [p for p in partners if p != mirrored]:
                    s_dup = delta(s1, dup)
                    if not spec_holds(spec, s1, dup, s_dup):
                        continue
                    report.instances += 1
                    for o in originals:
                        d = m.d(o)
                        if o != instr.out and (s0[o] != s_orig[o] or s1[d] != s_dup[d]):
                            report.violate(f"{entry.name}: frame step failed at l{o}/l{d} for {instr}")
                        elif s_orig[o] != s_dup[d]:
                            report.violate(f"{entry.name}: l{o}={s_orig[o]} but l{d}={s_dup[d]} after {instr}, {dup}")
        return report

    def prop1(self) -> LawReport:
        report = self._report("prop1", "oracle reports a bug iff bounded correctness fails at the same depth")
        for entry in self.corpus:
            depth = self.budgets.depth_for(entry)
            oracle = self.oracle(entry, depth)
            if not oracle.complete:
                report.notes.append(f"{entry.name}: oracle incomplete, skipped")
                continue
            report.instances += 1
            correct = bounded_correct(entry.system, entry.spec, self.inits(entry), depth,
                                      alphabet=entry.oracle_alphabet, max_states=self.budgets.max_states)
            if correct == oracle.has_bugs:
                report.violate(f"{entry.name}: oracle bugs={len(oracle.bugs)} but bounded_correct={correct}")
        return report

    def _check_preservation(self, report: LawReport, entry: CorpusEntry, seq: Sequence[Instruction],
                            s0: State, n: Optional[int]) -> None:
        """Lemma-2 conclusion for one trace; ``n`` enables the standard-test intermediate equalities."""
        m, spec = entry.dup_map, entry.spec
        path = run(entry.system, s0, seq)
        for index, instr in enumerate(seq):
            if not spec_holds(spec, path.states[index], instr, path.states[index + 1]):
                if entry.is_reference:
                    report.violate(f"{entry.name}: step {index + 1} ({instr}) of {[str(i) for i in seq]} violates the specification")
                return
        report.instances += 1
        if n is not None:
            s_n, s_2n = path.states[n], path.last
            if any(s0[d] != s_n[d] for d in m.duplicates):
                report.violate(f"{entry.name}: duplicate location changed by the original half of {[str(i) for i in seq]}")
            if any(s_n[o] != s_2n[o] for o in m.originals):
                report.violate(f"{entry.name}: original location changed by the duplicate half of {[str(i) for i in seq]}")
        if not qed_consistent(m, path.last):
            report.violate(f"{entry.name}: {[str(i) for i in seq]} from {s0} ends QED-inconsistent")

    def lemma2(self) -> LawReport:
        report = self._report("lemma2", "standard tests whose steps all conform end QED-consistent")
        for entry in self.corpus:
            bound = self.budgets.bound_for(entry)
            inits = self.qed_inits(entry)
            for seq in standard_tests(entry.dup_map, entry.search_alphabet, bound):
                for s0 in inits:
                    self._check_preservation(report, entry, seq, s0, len(seq) // 2)
        return report

    def ext(self) -> LawReport:
        report = self._report("ext", "interleaved and NOP-extended tests whose steps all conform end QED-consistent")
        limit = self.budgets.max_nop_insertions
        for entry in self.corpus:
            if not entry.is_reference:
                continue
            m = entry.dup_map
            inits = self.qed_inits(entry)
            for n in range(1, self.budgets.bound_for(entry) + 1):
                for originals in itertools.product(entry.search_alphabet, repeat=n):
                    for order in interleavings(m, originals):
                        for count in range(limit + 1):
                            for seq in with_insertions(order, entry.nop_alphabet, count):
                                for s0 in inits:
                                    self._check_preservation(report, entry, seq, s0, None)
        return report

    def lemma3(self) -> LawReport:
        report = self._report("lemma3", "every failing QED test found by search is confirmed by the oracle")
        for entry in self.corpus:
            result = self.search(entry)
            if not result.failed:
                report.notes.append(f"{entry.name}: no failing test up to bound {result.bound}")
                continue
            report.instances += 1
            test = result.test
            replay = run_qed_test(entry.system, entry.dup_map, test, result.init)
            if not replay.failed:
                report.violate(f"{entry.name}: reported failure does not replay")
            alphabet = tuple(sorted(set(test.instrs), key=lambda i: i.sort_key))
            oracle = find_bugs(entry.system, entry.spec, [result.init], len(test) - 1, alphabet=alphabet)
            if not oracle.has_bugs:
                report.violate(f"{entry.name}: spurious counterexample {[str(i) for i in test.instrs]}")
        return report

    def lemma4(self, case: str) -> LawReport:
        law = f"lemma4{case.lower()}"
        kinds = (ViolationType.TYPE_A, ViolationType.BOTH) if case == "A" else (ViolationType.TYPE_B, ViolationType.BOTH)
        report = self._report(law, f"constructed case-{case} bug-specific tests fail on the (l_x, l_y) pair")
        for entry in self.corpus:
            m = entry.dup_map
            for bug, test in self.bug_specific_tests(entry):
                if bug.kind not in kinds:
                    continue
                if test is None:
                    report.notes.append(f"{entry.name}: no bug-specific test for {bug.instr}")
                    continue
                if test.meta.case != case:
                    continue
                report.instances += 1
                verdict = run_qed_test(entry.system, m, test, test.meta.init)
                lx, ly = test.meta.witness_roles
                if not verdict.failed:
                    report.violate(f"{entry.name}: bug-specific test for {bug.instr} passed")
                elif m.d(lx) != ly or (lx, ly) not in verdict.mismatches:
                    report.violate(f"{entry.name}: witness (l{lx}, l{ly}) not among {verdict.mismatches}")
        if report.instances == 0:
            report.violate(f"no case-{case} bug-specific test was constructed anywhere in the corpus")
        return report

    def lemma5(self) -> LawReport:
        report = self._report("lemma5", "soft-reset tests built from minimal bug prefixes fail")
        candidates = 0
        for entry in self.corpus:
            sys = entry.system
            if not entry.injected or not sys.opcodes_with_role(OpcodeRole.SOFT_RESET):
                continue
            if not single_instruction_correct(sys, entry.spec, self.inits(entry), alphabet=entry.oracle_alphabet):
                report.notes.append(f"{entry.name}: not single-instruction correct, skipped")
                continue
            candidates += 1
            found = find_bug_prefix(sys, entry.spec, entry.dup_map, entry.search_alphabet,
                                    self.qed_inits(entry), self.budgets.hard_reset_k_for(entry))
            if found is None:
                report.notes.append(f"{entry.name}: no clean bug prefix up to k={self.budgets.hard_reset_k_for(entry)}")
                continue
            prefix, s0 = found
            test = build_soft_reset_test(sys, entry.spec, entry.dup_map, prefix, s0)
            report.instances += 1
            verdict = run_qed_test(sys, entry.dup_map, test, s0)
            if not verdict.failed:
                report.violate(f"{entry.name}: soft-reset test {[str(i) for i in test.instrs]} passed")
        if candidates and report.instances == 0:
            report.violate("no soft-reset test could be constructed on any single-instruction-correct system")
        return report

    def thm1(self) -> LawReport:
        report = self._report("thm1", "search failures imply bugs; bug-specific tests bound the shortest failure")
        for entry in self.corpus:
            result = self.search(entry)
            if result.failed:
                report.instances += 1
                oracle = find_bugs(entry.system, entry.spec, [result.init], len(result.test) - 1,
                                   alphabet=tuple(sorted(set(result.test.instrs), key=lambda i: i.sort_key)))
                if not oracle.has_bugs:
                    report.violate(f"{entry.name}: failing test without a bug")
            tests = [t for _, t in self.bug_specific_tests(entry) if t is not None]
            if not tests:
                continue
            shortest = min(len(t) for t in tests)
            cfg = SearchConfig.from_entry(entry, bound=shortest // 2, families=[TestFamily.STANDARD.value])
            standard = bmc_search(entry.system, entry.dup_map, cfg, jobs=self.budgets.jobs)
            report.instances += 1
            if not standard.complete:
                report.notes.append(f"{entry.name}: standard search incomplete")
            elif not standard.failed or len(standard.test) > shortest:
                report.violate(f"{entry.name}: bug-specific test of length {shortest} but search found "
                               f"{'none' if not standard.failed else len(standard.test)}")
        return report

    def thm2(self) -> LawReport:
        report = self._report("thm2", "single-instruction correct and no failing hard-reset test iff no bug")
        for entry in self.corpus:
            sys = entry.system
            if not sys.opcodes_with_role(OpcodeRole.HARD_RESET):
                report.notes.append(f"{entry.name}: no hard reset, skipped")
                continue
            k = self.budgets.hard_reset_k_for(entry)
            inits = self.inits(entry)
            sic = single_instruction_correct(sys, entry.spec, inits, alphabet=entry.oracle_alphabet)
            hard = hard_reset_search(sys, inits, k, alphabet=entry.oracle_alphabet, max_states=self.budgets.max_states)
            oracle = self.oracle(entry, k - 1)
            if not (hard.complete and oracle.complete):
                report.notes.append(f"{entry.name}: incomplete enumeration, skipped")
                continue
            report.instances += 1
            if (sic and not hard.failed) != (not oracle.has_bugs):
                report.violate(f"{entry.name}: sic={sic} hard_reset_failures={hard.failing_pairs} "
                               f"oracle_bugs={len(oracle.bugs)}")
            if hard.test is not None and not hard.verdict.failed:
                report.violate(f"{entry.name}: first failing hard-reset test does not replay")
        return report

    def fwd_extended(self) -> LawReport:
        report = self._report("fwd_extended", "forwarding bugs are exposed by extended QED tests")
        for entry in self.corpus:
            if not any(inj.trigger.prev_out_feeds_input for inj in entry.config.system.injections):
                continue
            if not self.oracle(entry).has_bugs:
                report.notes.append(f"{entry.name}: forwarding bug unreachable at oracle depth")
                continue
            report.instances += 1
            cfg = SearchConfig.from_entry(entry, bound=self.budgets.bound_for(entry),
                                          families=[TestFamily.STANDARD.value, TestFamily.EXTENDED.value])
            extended = bmc_search(entry.system, entry.dup_map, cfg, jobs=self.budgets.jobs)
            plain = bmc_search(entry.system, entry.dup_map,
                               replace(cfg, families=frozenset({TestFamily.STANDARD, TestFamily.INTERLEAVED})),
                               jobs=self.budgets.jobs)
            report.notes.append(
                f"{entry.name}: standard/interleaved {'fail' if plain.failed else 'pass'}, "
                f"extended {'fails at length ' + str(len(extended.test)) if extended.failed else 'passes'}"
            )
            if not extended.failed:
                report.violate(f"{entry.name}: no failing extended test up to bound {cfg.bound}")
        return report


def check_law(law_id: str, corpus: Sequence[CorpusEntry], budgets: Optional[LawBudgets] = None,
              checker: Optional[LawChecker] = None) -> LawReport:
    """Check one law over the corpus; pass a shared ``checker`` to reuse cached results."""
    if not corpus:
        raise QedLabError("law checks need a nonempty corpus")
    law = law_id.lower()
    if law not in LAW_IDS:
        raise UnknownLawError(f"unknown law {law_id!r}; known laws: {', '.join(LAW_IDS)}")
    checker = checker or LawChecker(corpus, budgets)
    report = checker.registry[law]()
    qed_logger.log_law(law, report.instances, report.violation_count, len(report.systems))
    return report


def check_laws(law_ids: Optional[Sequence[str]], corpus: Sequence[CorpusEntry],
               budgets: Optional[LawBudgets] = None) -> List[LawReport]:
    checker = LawChecker(corpus, budgets)
    return [check_law(law, corpus, checker=checker) for law in (law_ids or LAW_IDS)]
