"""Location partition, the duplication bijection and instruction duplication."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from core.model import Instruction, TransitionSystem
from core.shared import DupMapError, NotDuplicateError, NotOriginalError


class InstrClass(str, Enum):
    ORIGINAL = "Original"
    DUPLICATE = "Duplicate"
    MIXED = "Mixed"


@dataclass(frozen=True)
class DupMap:
    """Partition ``L = O_L + D_L`` with the bijection ``d: O_L -> D_L`` and its inverse.

    Build through :func:`make_dup_map`, which validates the partition.
    """
    pairs: Tuple[Tuple[int, int], ...]
    location_count: int
    forward: Dict[int, int] = field(init=False, compare=False, repr=False)
    inverse: Dict[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "forward", dict(self.pairs))
        object.__setattr__(self, "inverse", {dup: orig for orig, dup in self.pairs})

    def __hash__(self) -> int:
        return hash((self.pairs, self.location_count))

    @property
    def originals(self) -> FrozenSet[int]:
        return frozenset(self.forward)

    @property
    def duplicates(self) -> FrozenSet[int]:
        return frozenset(self.inverse)

    @property
    def ordered_originals(self) -> Tuple[int, ...]:
        return tuple(sorted(self.forward))

    def d(self, location: int) -> int:
        return self.forward[location]

    def d_inv(self, location: int) -> int:
        return self.inverse[location]

    def describe(self) -> str:
        return ", ".join(f"l{o}->l{d}" for o, d in sorted(self.pairs))


def make_dup_map(
    originals: Iterable[int],
    mapping: Iterable[Tuple[int, int]],
    location_count: int,
) -> DupMap:
    originals = list(originals)
    pairs = sorted((int(o), int(d)) for o, d in mapping)
    if location_count < 2 or location_count % 2:
        raise DupMapError(f"location count must be even and at least 2, got {location_count}")

    seen = set()
    for loc in originals:
        if not 0 <= loc < location_count:
            raise DupMapError(f"original location l{loc} outside 0..{location_count - 1}", loc)
        if loc in seen:
            raise DupMapError(f"original location l{loc} listed twice", loc)
        seen.add(loc)
    if len(originals) * 2 != location_count:
        raise DupMapError(
            f"originals must cover half of {location_count} locations, got {len(originals)}"
        )

    origin_set = set(originals)
    images: Dict[int, int] = {}
    sources = set()
    for orig, dup in pairs:
        if orig not in origin_set:
            raise DupMapError(f"mapping source l{orig} is not an original location", orig)
        if orig in sources:
            raise DupMapError(f"mapping source l{orig} mapped twice", orig)
        if not 0 <= dup < location_count:
            raise DupMapError(f"mapping image l{dup} outside 0..{location_count - 1}", dup)
        if dup in origin_set:
            raise DupMapError(f"location l{dup} is both original and duplicate", dup)
        if dup in images:
            raise DupMapError(
                f"mapping is not injective: l{images[dup]} and l{orig} both map to l{dup}", dup
            )
        sources.add(orig)
        images[dup] = orig
    missing = sorted(origin_set - sources)
    if missing:
        raise DupMapError(f"original location l{missing[0]} has no duplicate", missing[0])

    return DupMap(pairs=tuple(pairs), location_count=location_count)


def offset_dup_map(location_count: int, offset: int = None) -> DupMap:
    """Lower half original, ``d(k) = k + |L|/2`` (or a custom offset)."""
    offset = location_count // 2 if offset is None else offset
    originals = range(location_count // 2)
    return make_dup_map(originals, [(k, k + offset) for k in originals], location_count)


def parity_dup_map(location_count: int) -> DupMap:
    """Even locations original, ``d(k) = k + 1``."""
    originals = range(0, location_count, 2)
    return make_dup_map(originals, [(k, k + 1) for k in originals], location_count)


def classify_instr(m: DupMap, instr: Instruction) -> InstrClass:
    locs = instr.locations
    if all(loc in m.forward for loc in locs):
        return InstrClass.ORIGINAL
    if all(loc in m.inverse for loc in locs):
        return InstrClass.DUPLICATE
    return InstrClass.MIXED


def dup_instr(m: DupMap, instr: Instruction) -> Instruction:
    if classify_instr(m, instr) != InstrClass.ORIGINAL:
        raise NotOriginalError(f"instruction {instr} is not original under {m.describe()}")
    return Instruction(
        instr.opcode,
        m.forward[instr.out],
        (m.forward[instr.ins[0]], m.forward[instr.ins[1]]),
        instr.target,
    )


def undup_instr(m: DupMap, instr: Instruction) -> Instruction:
    """Inverse of :func:`dup_instr`: map every location back through ``d^-1``."""
    if classify_instr(m, instr) != InstrClass.DUPLICATE:
        raise NotDuplicateError(f"instruction {instr} is not a duplicate under {m.describe()}")
    return Instruction(
        instr.opcode,
        m.inverse[instr.out],
        (m.inverse[instr.ins[0]], m.inverse[instr.ins[1]]),
        instr.target,
    )


def dup_seq(m: DupMap, seq: Sequence[Instruction]) -> Tuple[Instruction, ...]:
    result: List[Instruction] = []
    for index, instr in enumerate(seq):
        try:
            result.append(dup_instr(m, instr))
        except NotOriginalError as e:
            raise NotOriginalError(f"position {index}: {e}", index) from None
    return tuple(result)


def original_instructions(sys: TransitionSystem, m: DupMap, alphabet=None) -> Tuple[Instruction, ...]:
    alphabet = sys.spec_alphabet if alphabet is None else alphabet
    return tuple(i for i in alphabet if classify_instr(m, i) == InstrClass.ORIGINAL)


def duplicate_instructions(sys: TransitionSystem, m: DupMap, alphabet=None) -> Tuple[Instruction, ...]:
    alphabet = sys.spec_alphabet if alphabet is None else alphabet
    return tuple(i for i in alphabet if classify_instr(m, i) == InstrClass.DUPLICATE)
