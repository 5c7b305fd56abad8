"""Text and JSON rendering of CLI reports."""

import json
from typing import List

import pandas as pd
from pydantic import BaseModel

from cli.models import CheckReport, DescribeReport, LawsReport, OracleReport
from utils.serialization import sanitize_for_json


def to_json(report: BaseModel) -> str:
    """Canonical JSON: sorted keys, fixed indentation, no run-dependent fields."""
    return json.dumps(sanitize_for_json(report), sort_keys=True, indent=2)


def _diff_text(diff) -> str:
    if not diff:
        return "-"
    return ", ".join(f"{loc}: {old} -> {new}" for loc, (old, new) in diff.items())


def render_check(report: CheckReport) -> str:
    lines = [
        f"System:   {report.system}",
        f"Dup map:  {report.dup_map}",
        f"Bound:    {report.bound} (families: {', '.join(report.manifest.families or [])})",
        f"Outcome:  {report.outcome}{'' if report.complete else ' (incomplete: test budget exhausted)'}",
        f"Tests:    {report.stats.tests_executed} executed from {report.stats.inits} initial states",
    ]
    cx = report.counterexample
    if cx is None:
        return "\n".join(lines)

    lines.append("")
    lines.append(f"Failing {cx.family} QED test of length {cx.length}:")
    lines.append(f"  initial arch: {cx.init['arch']}")
    width = max(len(step["instr"]["text"]) for step in cx.steps)
    for step in cx.steps:
        lines.append(f"  {step['index']:>3}. {step['instr']['text']:<{width}}  {_diff_text(step['diff'])}")
    lines.append(f"  final arch:   {cx.final['arch']}")
    if cx.witness:
        arch = cx.final["arch"]
        if len(cx.witness) == 2:
            o, d = cx.witness
            lines.append(f"Witness: l{o}={arch[o]} but l{d}={arch[d]}")
        else:
            lines.append(f"Witness: l{cx.witness[0]} differs between the two executions of the bug instruction")
    if len(cx.mismatches) > 1:
        pairs = ", ".join(f"(l{p[0]}, l{p[1]})" for p in cx.mismatches)
        lines.append(f"All inconsistent pairs: {pairs}")
    return "\n".join(lines)


def render_oracle(report: OracleReport) -> str:
    header = (
        f"Oracle on {report.system}: {len(report.bugs)} bugs within depth {report.depth}, "
        f"{report.states_explored} states explored{'' if report.complete else ' (incomplete)'}"
    )
    if not report.bugs:
        return header + "\nNo bugs found."
    table = pd.DataFrame([
        {
            "instruction": bug.instruction,
            "kind": bug.kind,
            "triggers": bug.trigger_count,
            "bad_locations": ",".join(f"l{loc}" for loc in bug.bad_locations) or "-",
        }
        for bug in report.bugs
    ])
    return header + "\n" + table.to_string(index=False)


def render_laws(report: LawsReport) -> str:
    table = pd.DataFrame([
        {
            "law": row.law,
            "systems": len(row.systems),
            "instances": row.instances,
            "violations": row.violation_count,
            "status": "pass" if row.passed else "FAIL",
        }
        for row in report.laws
    ])
    lines: List[str] = [table.to_string(index=False), ""]
    for row in report.laws:
        lines.append(f"[{row.law}] {row.instantiation}")
        lines.extend(f"  violation: {v}" for v in row.violations)
        if row.violation_count > len(row.violations):
            lines.append(f"  ... {row.violation_count - len(row.violations)} more")
        lines.extend(f"  note: {n}" for n in row.notes)
    lines.append("")
    lines.append("All laws hold." if report.passed else "Some laws were violated.")
    return "\n".join(lines)


def render_describe(report: DescribeReport) -> str:
    opcodes = pd.DataFrame(report.opcodes)
    lines = [
        f"System:      {report.system}",
        f"Values:      {report.values}  Locations: {report.locations}",
        f"History:     {report.history_length} ({report.narch_states} non-architectural states)",
        f"Dup map:     {report.dup_map}",
        "Opcodes:",
        opcodes.to_string(index=False),
    ]
    if report.injections:
        lines.append("Injections:")
        lines.extend(f"  {inj['name']}: {inj['summary']}" for inj in report.injections)
    else:
        lines.append("Injections:  none (reference system)")
    lines.append(
        f"Reachability (depth {report.reachability_depth}): {report.reachable_states} states, "
        f"{report.strongly_connected_components} strongly connected components, "
        f"{'strongly connected' if report.strongly_connected else 'not strongly connected'}"
        f"{'' if report.reachability_complete else ' (truncated)'}"
    )
    if report.notes:
        lines.append(f"Notes:       {report.notes}")
    return "\n".join(lines)
