"""Processor configuration schemas."""

import json
from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from core.shared import ConfigError
from utils.config import config

# Opcode names generated by the builder for the hardware extensions.
NOP_NAME = "NOP"
SOFT_RESET_NAME = "SRST"
HARD_RESET_NAME = "HRST"
RESERVED_NAMES = (NOP_NAME, SOFT_RESET_NAME, HARD_RESET_NAME)

# History pattern entry matching any executed instruction.
ANY_OPCODE = "*"


# Enums
class InjectionKind(str, Enum):
    TYPE_A = "type_a"
    TYPE_B = "type_b"
    BOTH = "both"


class InitStrategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SUPPORT = "support"
    SAMPLE = "sample"
    ZERO = "zero"


class SearchFamily(str, Enum):
    STANDARD = "standard"
    EXTENDED = "extended"
    INTERLEAVED = "interleaved"


class OpcodeConfig(BaseModel):
    name: str
    expression: str
    # Overrides the specification function; the implementation keeps `expression`.
    spec_expression: Optional[str] = None

    @field_validator('name')
    @classmethod
    def validate_name(cls, v):
        v = v.strip().upper()
        if not v.isidentifier():
            raise ValueError(f"opcode name {v!r} is not an identifier")
        if v in RESERVED_NAMES:
            raise ValueError(f"opcode name {v} is reserved")
        return v


class TriggerConfig(BaseModel):
    # Aligned to the most recent history entry: the last element is the previous instruction.
    history: List[str] = Field(default_factory=list)
    opcode: str
    out_locations: Optional[List[int]] = None
    same_inputs: Optional[bool] = None
    prev_out_feeds_input: bool = False

    @field_validator('opcode')
    @classmethod
    def upper_opcode(cls, v):
        return v.strip().upper()

    @field_validator('history')
    @classmethod
    def upper_history(cls, v):
        return [entry.strip().upper() for entry in v]


class EffectConfig(BaseModel):
    kind: InjectionKind
    delta: int = 1
    target: Optional[int] = None
    value: int = 0

    @model_validator(mode='after')
    def check_target(self):
        if self.kind in (InjectionKind.TYPE_B, InjectionKind.BOTH) and self.target is None:
            raise ValueError(f"{self.kind.value} effects need a target location")
        return self


class BugInjection(BaseModel):
    name: Optional[str] = None
    trigger: TriggerConfig
    effect: EffectConfig


class SystemConfig(BaseModel):
    name: str
    value_modulus: int = Field(default_factory=lambda: config.VALUE_MODULUS, ge=2)
    location_count: int = Field(..., ge=2)
    history_length: int = Field(default=1, ge=0)
    track_outputs: bool = False
    opcodes: List[OpcodeConfig] = Field(..., min_length=1)
    nop: bool = True
    soft_reset: bool = False
    hard_reset: bool = False
    injections: List[BugInjection] = Field(default_factory=list)

    @field_validator('location_count')
    @classmethod
    def validate_location_count(cls, v):
        if v % 2:
            raise ValueError(f"location count must be even, got {v}")
        return v

    @model_validator(mode='after')
    def check_references(self):
        names = [op.name for op in self.opcodes]
        if len(set(names)) != len(names):
            raise ValueError("opcode names must be unique")
        known = set(names) | ({NOP_NAME} if self.nop else set())
        for index, inj in enumerate(self.injections):
            where = f"injection {inj.name or index}"
            if inj.trigger.opcode not in names:
                raise ValueError(f"{where}: trigger opcode {inj.trigger.opcode} is not a regular opcode")
            if len(inj.trigger.history) > self.history_length:
                raise ValueError(
                    f"{where}: history pattern longer than history_length {self.history_length}"
                )
            for entry in inj.trigger.history:
                if entry != ANY_OPCODE and entry not in known:
                    raise ValueError(f"{where}: unknown opcode {entry} in history pattern")
            if inj.trigger.prev_out_feeds_input and not (self.track_outputs and self.history_length):
                raise ValueError(f"{where}: prev_out_feeds_input needs track_outputs and a history")
            locations = list(inj.trigger.out_locations or [])
            if inj.effect.target is not None:
                locations.append(inj.effect.target)
            for loc in locations:
                if not 0 <= loc < self.location_count:
                    raise ValueError(f"{where}: location {loc} outside 0..{self.location_count - 1}")
        return self


class DupMapConfig(BaseModel):
    scheme: Literal["offset", "parity", "explicit"] = "offset"
    offset: Optional[int] = None
    originals: Optional[List[int]] = None
    pairs: Optional[List[Tuple[int, int]]] = None

    @model_validator(mode='after')
    def check_explicit(self):
        if self.scheme == "explicit" and not self.pairs:
            raise ValueError("explicit dup maps need pairs")
        return self


class SearchSection(BaseModel):
    bound: int = Field(default=2, ge=1)
    families: List[SearchFamily] = Field(default_factory=lambda: [SearchFamily.STANDARD])
    # Original instructions, e.g. "ADD 12 4 15"; all original instructions when absent.
    alphabet: Optional[List[str]] = None
    nop_alphabet: Optional[List[str]] = None
    init_strategy: InitStrategy = InitStrategy.SUPPORT
    init_samples: int = Field(default_factory=lambda: config.INIT_SAMPLES, ge=1)
    seed: int = Field(default_factory=lambda: config.DEFAULT_SEED)
    max_nop_insertions: int = Field(default_factory=lambda: config.MAX_NOP_INSERTIONS, ge=0)
    max_tests: int = Field(default_factory=lambda: config.MAX_TESTS, ge=1)
    depth: int = Field(default=2, ge=0)
    hard_reset_k: int = Field(default=3, ge=2)

    @field_validator('families')
    @classmethod
    def nonempty_families(cls, v):
        if not v:
            raise ValueError("at least one test family is required")
        return v


class ProcessorConfig(BaseModel):
    system: SystemConfig
    dup_map: DupMapConfig = Field(default_factory=DupMapConfig)
    search: SearchSection = Field(default_factory=SearchSection)
    # Declared bug-free: every reachable step must satisfy the specification.
    reference: bool = False
    notes: Optional[str] = None


def _line_of(text: str, loc: Tuple) -> Optional[int]:
    """Approximate line of the innermost named key of a validation error path."""
    keys = [part for part in loc if isinstance(part, str)]
    lines = text.splitlines()
    for key in reversed(keys):
        needle = f'"{key}"'
        for number, line in enumerate(lines, start=1):
            if needle in line:
                return number
    return None


def parse_processor_config(text: str, source: str = "<config>") -> ProcessorConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}", line=e.lineno
        ) from e
    try:
        return ProcessorConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        line = _line_of(text, first["loc"])
        where = f"{source}:{line}" if line else source
        raise ConfigError(f"{where}: {field or 'config'}: {first['msg']}", field=field, line=line) from e
