"""Command-line entry point: check, oracle, laws, describe."""

import argparse
import logging
import sys
from typing import List, Optional

import networkx as nx

from cli.models import (
    BugRow, CheckReport, CounterexampleModel, DescribeReport, LawRow, LawsReport, OracleReport,
    RunManifest, SearchStatsModel,
)
from cli.render import render_check, render_describe, render_laws, render_oracle, to_json
from core.model import explore
from core.shared import BudgetExceededError, ConfigError, QedLabError, UnknownLawError
from services.bmc_engine import SearchConfig, SearchResult, bmc_search
from services.laws import LAW_IDS, LawBudgets, check_laws
from services.spec_oracle import find_bugs, select_initial_states
from utils.config import config
from utils.logger import qed_logger
from utils.serialization import path_to_steps, state_to_dict
from zoo.corpus import CorpusEntry, load_corpus, load_entry

logger = logging.getLogger(f"qedlab.{__name__}")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3

FAMILY_CHOICES = ("standard", "extended", "interleaved")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qedlab",
        description="Self-consistency (QED) checking workbench for finite processor models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="processor config file, or a built-in corpus name such as toy4")
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        p.add_argument("--jobs", type=int, default=config.DEFAULT_JOBS, help="worker processes")
        p.add_argument("--seed", type=int, default=None, help="seed for sampled initial states")

    check = sub.add_parser("check", help="search for the shortest failing QED test")
    common(check)
    check.add_argument("--bound", type=int, help="original-half length n; tests up to 2n")
    check.add_argument("--family", action="append", choices=FAMILY_CHOICES,
                       help="test family to search (repeatable)")
    check.add_argument("--max-tests", type=int, help="test budget")

    oracle = sub.add_parser("oracle", help="enumerate bugs against the specification")
    common(oracle)
    oracle.add_argument("--depth", type=int, help="reachability depth")
    oracle.add_argument("--max-states", type=int, help="state budget")

    laws = sub.add_parser("laws", help="check soundness and completeness laws over the corpus")
    common(laws, config_required=False)
    laws.add_argument("--law", action="append", help=f"law id (repeatable): {', '.join(LAW_IDS)}")
    laws.add_argument("--bound", type=int, help="test bound for every system")
    laws.add_argument("--depth", type=int, help="oracle depth for every system")
    laws.add_argument("--max-states", type=int, help="state budget")

    describe = sub.add_parser("describe", help="summarize a processor and its reachability graph")
    common(describe)
    describe.add_argument("--depth", type=int, help="reachability depth")
    describe.add_argument("--max-states", type=int, help="state budget")
    return parser


def _manifest(args: argparse.Namespace, entry: Optional[CorpusEntry] = None, **fields) -> RunManifest:
    seed = args.seed
    if seed is None:
        seed = entry.config.search.seed if entry is not None else config.DEFAULT_SEED
    return RunManifest(
        command=args.command,
        config=args.config,
        system=entry.name if entry is not None else None,
        seed=seed,
        output="json" if args.json else "text",
        jobs=args.jobs,
        **fields,
    )


def _emit(report, text: str, as_json: bool) -> None:
    print(to_json(report) if as_json else text)


def check_report(entry: CorpusEntry, manifest: RunManifest, result: SearchResult) -> CheckReport:
    stats = result.stats
    counterexample = None
    if result.failed:
        verdict = result.verdict
        counterexample = CounterexampleModel(
            family=result.test.family.value,
            length=len(result.test),
            instructions=[str(i) for i in result.test.instrs],
            init=state_to_dict(result.init),
            witness=list(verdict.witness) if verdict.witness else None,
            mismatches=[list(pair) for pair in verdict.mismatches],
            steps=path_to_steps(verdict.trace),
            final=state_to_dict(verdict.trace.last),
        )
    return CheckReport(
        manifest=manifest,
        system=entry.name,
        dup_map=entry.dup_map.describe(),
        outcome=result.outcome.value,
        complete=result.complete,
        bound=result.bound,
        stats=SearchStatsModel(
            tests_executed=stats.tests_executed,
            states_visited=stats.states_visited,
            lengths_searched=stats.lengths_searched,
            inits=stats.inits,
        ),
        counterexample=counterexample,
    )


def cmd_check(args: argparse.Namespace) -> int:
    entry = load_entry(args.config)
    cfg = SearchConfig.from_entry(entry, bound=args.bound, families=args.family,
                                  max_tests=args.max_tests, seed=args.seed)
    manifest = _manifest(args, entry, bound=cfg.bound, max_tests=cfg.max_tests,
                         families=sorted(f.value for f in cfg.families))
    result = bmc_search(entry.system, entry.dup_map, cfg, jobs=args.jobs)
    logger.info(f"check {entry.name}: {result.outcome.value} after {result.stats.tests_executed} tests "
                f"in {result.stats.wall_time:.2f}s with {args.jobs} jobs")
    report = check_report(entry, manifest, result)
    _emit(report, render_check(report), args.json)
    if result.failed:
        return EXIT_FAILURE
    return EXIT_OK if result.complete else EXIT_INCOMPLETE


def cmd_oracle(args: argparse.Namespace) -> int:
    entry = load_entry(args.config)
    section = entry.config.search
    depth = section.depth if args.depth is None else args.depth
    seed = section.seed if args.seed is None else args.seed
    manifest = _manifest(args, entry, depth=depth, max_states=args.max_states)
    inits = select_initial_states(entry.system, section.init_strategy, alphabet=entry.oracle_alphabet,
                                  samples=section.init_samples, seed=seed)
    result = find_bugs(entry.system, entry.spec, inits, depth, alphabet=entry.oracle_alphabet,
                       max_states=args.max_states, jobs=args.jobs)
    qed_logger.log_oracle(entry.name, depth, len(result.bugs), result.complete)
    report = OracleReport(
        manifest=manifest,
        system=entry.name,
        depth=depth,
        complete=result.complete,
        states_explored=result.states_explored,
        bugs=[
            BugRow(
                instruction=str(bug.instr),
                opcode=bug.instr.opcode.name,
                kind=bug.kind.value,
                trigger_count=bug.trigger_count,
                bad_locations=list(bug.bad_locations),
                example_trigger=state_to_dict(bug.sorted_triggers()[0]),
            )
            for bug in result.bugs
        ],
    )
    _emit(report, render_oracle(report), args.json)
    return EXIT_OK if result.complete else EXIT_INCOMPLETE


def cmd_laws(args: argparse.Namespace) -> int:
    corpus = [load_entry(args.config)] if args.config else load_corpus()
    budgets = LawBudgets(depth=args.depth, bound=args.bound, max_states=args.max_states, jobs=args.jobs)
    manifest = _manifest(args, corpus[0] if args.config else None, bound=args.bound, depth=args.depth,
                         laws=args.law, max_states=args.max_states)
    reports = check_laws(args.law, corpus, budgets)
    passed = all(r.passed for r in reports)
    report = LawsReport(
        manifest=manifest,
        passed=passed,
        laws=[
            LawRow(law=r.law, instantiation=r.instantiation, systems=r.systems, instances=r.instances,
                   violation_count=r.violation_count, violations=r.violations, notes=r.notes, passed=r.passed)
            for r in reports
        ],
    )
    _emit(report, render_laws(report), args.json)
    return EXIT_OK if passed else EXIT_FAILURE


def _injection_summary(inj) -> str:
    trigger = inj.trigger
    parts = []
    if trigger.history:
        parts.append(f"after {' '.join(trigger.history)}")
    if trigger.prev_out_feeds_input:
        parts.append("reading the previous output")
    if trigger.same_inputs is not None:
        parts.append("same inputs" if trigger.same_inputs else "distinct inputs")
    if trigger.out_locations is not None:
        parts.append(f"writing {trigger.out_locations}")
    effect = inj.effect
    if effect.kind.value == "type_a":
        what = f"output += {effect.delta}"
    elif effect.kind.value == "type_b":
        what = f"l{effect.target} := {effect.value}"
    else:
        what = f"output += {effect.delta}, l{effect.target} := {effect.value}"
    return f"{trigger.opcode} {', '.join(parts) or 'always'} -> {what} ({effect.kind.value})"


def cmd_describe(args: argparse.Namespace) -> int:
    entry = load_entry(args.config)
    sys_ = entry.system
    section = entry.config.search
    depth = section.depth if args.depth is None else args.depth
    manifest = _manifest(args, entry, depth=depth, max_states=args.max_states)
    inits = select_initial_states(sys_, section.init_strategy, alphabet=entry.oracle_alphabet,
                                  samples=section.init_samples, seed=manifest.seed)
    try:
        exploration = explore(sys_, inits, depth, alphabet=entry.oracle_alphabet,
                              max_states=args.max_states, record_edges=True)
    except BudgetExceededError as e:
        exploration = e.partial

    graph = nx.DiGraph()
    graph.add_nodes_from(exploration.parents)
    graph.add_edges_from((s, t) for s, t, _ in exploration.edges if t in exploration.parents)
    components = nx.number_strongly_connected_components(graph)

    report = DescribeReport(
        manifest=manifest,
        system=sys_.name,
        values=sys_.values,
        locations=sys_.locations,
        opcodes=[
            {"id": op.id, "name": op.name, "role": op.role.value, "idempotent": op.idempotent,
             "spec": entry.spec.specs[op.id].expression if op.id in entry.spec.specs else "-"}
            for op in sys_.opcodes
        ],
        history_length=entry.config.system.history_length,
        narch_states=len(sys_.narch_states),
        injections=[{"name": inj.name or f"injection-{k}", "summary": _injection_summary(inj)}
                    for k, inj in enumerate(entry.config.system.injections)],
        dup_map=entry.dup_map.describe(),
        search=entry.config.search.model_dump(mode="json"),
        reachability_depth=depth,
        reachable_states=graph.number_of_nodes(),
        strongly_connected_components=components,
        strongly_connected=components == 1,
        reachability_complete=exploration.complete,
        notes=entry.config.notes,
    )
    _emit(report, render_describe(report), args.json)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "oracle": cmd_oracle,
    "laws": cmd_laws,
    "describe": cmd_describe,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        where = "".join([
            f" (field {e.field})" if e.field else "",
            f" (line {e.line})" if e.line else "",
        ])
        logger.error(f"Configuration error{where}: {e}")
        print(f"error: {e}{where}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownLawError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as e:
        logger.warning(f"Budget exhausted after {e.partial_count}: {e}")
        print(f"incomplete: {e}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except QedLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
