"""Pydantic models for run manifests and machine-readable reports."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Everything that determines a run's output. ``jobs`` is recorded in logs only."""
    command: str
    config: Optional[str] = None
    system: Optional[str] = None
    seed: int = 0
    bound: Optional[int] = None
    families: Optional[List[str]] = None
    depth: Optional[int] = None
    laws: Optional[List[str]] = None
    max_tests: Optional[int] = None
    max_states: Optional[int] = None
    output: str = "text"
    jobs: int = Field(default=1, exclude=True)


class SearchStatsModel(BaseModel):
    tests_executed: int
    states_visited: int
    lengths_searched: int
    inits: int


class CounterexampleModel(BaseModel):
    family: str
    length: int
    instructions: List[str]
    init: Dict[str, Any]
    witness: Optional[List[int]] = None
    mismatches: List[List[int]] = Field(default_factory=list)
    steps: List[Dict[str, Any]] = Field(default_factory=list)
    final: Dict[str, Any] = Field(default_factory=dict)


class CheckReport(BaseModel):
    manifest: RunManifest
    system: str
    dup_map: str
    outcome: str
    complete: bool
    bound: int
    stats: SearchStatsModel
    counterexample: Optional[CounterexampleModel] = None


class BugRow(BaseModel):
    instruction: str
    opcode: str
    kind: str
    trigger_count: int
    bad_locations: List[int] = Field(default_factory=list)
    example_trigger: Dict[str, Any] = Field(default_factory=dict)


class OracleReport(BaseModel):
    manifest: RunManifest
    system: str
    depth: int
    complete: bool
    states_explored: int
    bugs: List[BugRow] = Field(default_factory=list)


class LawRow(BaseModel):
    law: str
    instantiation: str
    systems: List[str]
    instances: int
    violation_count: int
    violations: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    passed: bool


class LawsReport(BaseModel):
    manifest: RunManifest
    passed: bool
    laws: List[LawRow]


class DescribeReport(BaseModel):
    manifest: RunManifest
    system: str
    values: int
    locations: int
    opcodes: List[Dict[str, Any]]
    history_length: int
    narch_states: int
    injections: List[Dict[str, Any]]
    dup_map: str
    search: Dict[str, Any]
    reachability_depth: int
    reachable_states: int
    strongly_connected_components: int
    strongly_connected: bool
    reachability_complete: bool
    notes: Optional[str] = None
