"""Serialization utilities for reports and audit logs."""

import dataclasses
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel

from core.model import Instruction, Path, State


def instruction_to_dict(instr: Instruction) -> Dict[str, Any]:
    data = {
        "opcode": instr.opcode.name,
        "out": instr.out,
        "ins": [instr.ins[0], instr.ins[1]],
        "text": str(instr),
    }
    if instr.target is not None:
        data["target"] = list(instr.target.arch)
    return data


def state_to_dict(state: State) -> Dict[str, Any]:
    return {"arch": list(state.arch), "narch": sanitize_for_json(state.narch)}


def arch_diff(before: State, after: State) -> Dict[str, List[int]]:
    """Locations whose architectural value changed, as ``l<k>: [old, new]``."""
    return {
        f"l{loc}": [old, new]
        for loc, (old, new) in enumerate(zip(before.arch, after.arch))
        if old != new
    }


def path_to_steps(path: Path) -> List[Dict[str, Any]]:
    """One record per executed instruction with the architectural diff it caused."""
    steps = []
    for index, instr in enumerate(path.instrs):
        before, after = path.states[index], path.states[index + 1]
        steps.append({
            "index": index + 1,
            "instr": instruction_to_dict(instr),
            "diff": arch_diff(before, after),
            "narch": sanitize_for_json(after.narch),
        })
    return steps


def sanitize_for_json(data: Any) -> Any:
    """
    Recursively convert workbench values into JSON-compatible structures.

    Tuples and frozensets become lists (frozensets sorted), enums their values,
    dataclasses and pydantic models dictionaries.
    """
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, Instruction):
        return instruction_to_dict(data)
    if isinstance(data, State):
        return state_to_dict(data)
    if isinstance(data, BaseModel):
        return sanitize_for_json(data.model_dump(mode="json"))
    if dataclasses.is_dataclass(data) and not isinstance(data, type):
        return {f.name: sanitize_for_json(getattr(data, f.name)) for f in dataclasses.fields(data)}
    if isinstance(data, dict):
        return {str(key): sanitize_for_json(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [sanitize_for_json(item) for item in data]
    if isinstance(data, (set, frozenset)):
        return sorted(sanitize_for_json(item) for item in data)
    return data
