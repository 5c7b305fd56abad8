"""Acceptance scenarios: the worked examples and law suites, run end to end with timings."""

import sys
import time
from datetime import datetime
from typing import Callable, Dict, List

from core.duplication import dup_instr, dup_seq, offset_dup_map, parity_dup_map
from core.model import State
from services.bmc_engine import (
    SearchConfig, bmc_search, build_soft_reset_test, find_bug_prefix,
)
from services.laws import LawBudgets, LawChecker, check_law
from services.qed import QedTest, TestFamily, TestMeta, enumerate_qed_consistent_inits, run_qed_test
from zoo.corpus import load_corpus, load_entry


class AcceptanceScenarios:
    """Scripted acceptance checks over the built-in corpus."""

    def __init__(self):
        self.ridecore = load_entry("ridecore-lite")
        self.ordered = load_entry("ridecore-lite-ordered")

    def generate_scenarios(self) -> List[Dict]:
        return [
            {
                "name": "Duplication exactness",
                "description": "ADD l12, (l4, l8) under d(k)=k+16 and under the parity map",
                "run": self.duplication,
                "limit": 1,
            },
            {
                "name": "Back-to-back MUL",
                "description": "Length-4 test passes, length-6 test fails on (l15, l31), interleaved length-4 test fails",
                "run": self.back_to_back_mul,
                "limit": 10,
            },
            {
                "name": "Shortest failing test",
                "description": "Standard search on the ordered-trigger core returns the length-6 test",
                "run": self.shortest_first,
                "limit": 10,
            },
            {
                "name": "Soft-reset test",
                "description": "k=2 soft-reset test of length 6 fails on the back-to-back MUL core",
                "run": self.soft_reset,
                "limit": 60,
            },
            {
                "name": "Law suite",
                "description": "Every law over the full corpus",
                "run": self.laws,
                "limit": 1500,
            },
        ]

    def duplication(self) -> bool:
        sys_ = self.ridecore.system
        add = sys_.parse_instruction("ADD 12 4 8")
        offset = dup_instr(offset_dup_map(32, 16), add)
        parity = dup_instr(parity_dup_map(32), add)
        return (offset.out, offset.ins) == (28, (20, 24)) and (parity.out, parity.ins) == (13, (5, 9))

    def _example_tests(self, entry):
        sys_, m = entry.system, entry.dup_map
        o1 = sys_.parse_instruction("ADD 12 4 15")
        o2 = sys_.parse_instruction("MUL 15 12 12")
        short = (o1, o2) + dup_seq(m, (o1, o2))
        long = (o2, o1, o2) + dup_seq(m, (o2, o1, o2))
        interleaved = (o1, dup_instr(m, o1), o2, dup_instr(m, o2))
        return short, long, interleaved

    def back_to_back_mul(self) -> bool:
        ok = True
        for entry in (self.ridecore, self.ordered):
            sys_, m = entry.system, entry.dup_map
            short, long, interleaved = self._example_tests(entry)
            s0 = sys_.initial_state([0] * 12 + [3] + [0] * 15 + [3] + [0] * 3)
            pass_short = run_qed_test(sys_, m, QedTest(short, TestFamily.STANDARD), s0)
            fail_long = run_qed_test(sys_, m, QedTest(long, TestFamily.STANDARD), s0)
            fail_inter = run_qed_test(sys_, m, QedTest(interleaved, TestFamily.INTERLEAVED,
                                                       TestMeta(interleaved=True)), s0)
            print(f"      {entry.name}: length 4 {pass_short.outcome.value}, length 6 "
                  f"{fail_long.outcome.value} {fail_long.witness}, interleaved {fail_inter.outcome.value}")
            ok &= not pass_short.failed and fail_long.failed and fail_long.witness == (15, 31) and fail_inter.failed
        return ok

    def shortest_first(self) -> bool:
        entry = self.ordered
        cfg = SearchConfig.from_entry(entry, bound=3, families=["standard"])
        result = bmc_search(entry.system, entry.dup_map, cfg)
        _, long, _ = self._example_tests(entry)
        print(f"      {result.outcome.value}: {[str(i) for i in result.test.instrs] if result.failed else '-'}")
        return result.failed and result.test.instrs == long and result.verdict.witness == (15, 31)

    def soft_reset(self) -> bool:
        entry = self.ridecore
        inits = enumerate_qed_consistent_inits(entry.system, entry.dup_map, alphabet=entry.search_alphabet)
        found = find_bug_prefix(entry.system, entry.spec, entry.dup_map, entry.search_alphabet, inits, 2)
        if found is None:
            return False
        prefix, s0 = found
        test = build_soft_reset_test(entry.system, entry.spec, entry.dup_map, prefix, s0)
        verdict = run_qed_test(entry.system, entry.dup_map, test, s0)
        print(f"      {[str(i) for i in test.instrs]}: {verdict.outcome.value}")
        return len(test) == 6 and verdict.failed

    def laws(self) -> bool:
        corpus = load_corpus()
        checker = LawChecker(corpus, LawBudgets())
        ok = True
        for law in checker.registry:
            report = check_law(law, corpus, checker=checker)
            print(f"      {law:<13} instances={report.instances:<7} violations={report.violation_count}")
            ok &= report.passed
        return ok


def main() -> int:
    print("\n" + "=" * 80)
    print("QED WORKBENCH ACCEPTANCE SCENARIOS")
    print("=" * 80)
    print(f"Timestamp: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    scenarios = AcceptanceScenarios()
    plan = scenarios.generate_scenarios()
    failures = 0
    for i, scenario in enumerate(plan, 1):
        print(f"\nScenario {i}/{len(plan)}: {scenario['name']}")
        print(f"   {scenario['description']}")
        run: Callable[[], bool] = scenario["run"]
        started = time.perf_counter()
        ok = run()
        elapsed = time.perf_counter() - started
        within = elapsed <= scenario["limit"]
        status = "PASS" if ok and within else "FAIL"
        failures += status == "FAIL"
        print(f"   {status} in {elapsed:.2f}s (limit {scenario['limit']}s)")

    print("\n" + "=" * 80)
    print(f"{len(plan) - failures}/{len(plan)} scenarios passed")
    print("=" * 80)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
