"""Built-in processor corpus and config loading."""

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from core.duplication import DupMap, InstrClass, classify_instr, dup_seq, original_instructions
from core.model import Instruction, OpcodeRole, TransitionSystem
from core.shared import ConfigError, DomainError
from services.spec_oracle import SpecRelation
from utils.config import config
from zoo.builder import build_dup_map, build_system, nop_instructions
from zoo.schemas import ProcessorConfig, parse_processor_config

logger = logging.getLogger(f"qedlab.{__name__}")

_REPO_ROOT = Path(__file__).resolve().parent.parent


def config_dir(path: Optional[str] = None) -> Path:
    directory = Path(path or config.CONFIG_DIR)
    if not directory.is_absolute() and not directory.exists():
        directory = _REPO_ROOT / directory
    return directory


@dataclass
class CorpusEntry:
    name: str
    config: ProcessorConfig
    system: TransitionSystem
    spec: SpecRelation
    dup_map: DupMap
    source: str = "<memory>"

    @property
    def is_reference(self) -> bool:
        return self.config.reference

    @property
    def injected(self) -> bool:
        return bool(self.config.system.injections)

    def _parse(self, texts: Sequence[str], what: str) -> Tuple[Instruction, ...]:
        result = []
        for text in texts:
            try:
                result.append(self.system.parse_instruction(text))
            except DomainError as e:
                raise ConfigError(f"{self.source}: search.{what}: {e}", field=f"search.{what}") from e
        return tuple(result)

    @cached_property
    def search_alphabet(self) -> Tuple[Instruction, ...]:
        """Original instructions the QED-test search draws from."""
        texts = self.config.search.alphabet
        if texts is None:
            return original_instructions(self.system, self.dup_map, self.system.regular_alphabet)
        alphabet = self._parse(texts, "alphabet")
        for instr in alphabet:
            if classify_instr(self.dup_map, instr) != InstrClass.ORIGINAL:
                raise ConfigError(
                    f"{self.source}: search.alphabet: {instr} is not an original instruction",
                    field="search.alphabet",
                )
        return tuple(sorted(set(alphabet), key=lambda i: i.sort_key))

    @cached_property
    def nop_alphabet(self) -> Tuple[Instruction, ...]:
        """Instructions inserted into extended QED tests."""
        if self.config.search.nop_alphabet is not None:
            return self._parse(self.config.search.nop_alphabet, "nop_alphabet")
        nops = self.system.instructions((OpcodeRole.NOP,))
        if nops:
            return nops
        return nop_instructions(self.system)[:1]

    @cached_property
    def oracle_alphabet(self) -> Tuple[Instruction, ...]:
        """Instructions explored by the oracle: full set, or the search alphabet closure."""
        if self.config.search.alphabet is None:
            return self.system.spec_alphabet
        extra = self.system.instructions((OpcodeRole.NOP, OpcodeRole.SOFT_RESET))
        closure = set(self.search_alphabet) | set(dup_seq(self.dup_map, self.search_alphabet)) | set(extra)
        closure |= set(self.nop_alphabet)
        return tuple(sorted(closure, key=lambda i: i.sort_key))


def load_config(path: str) -> ProcessorConfig:
    file = Path(path)
    try:
        text = file.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_processor_config(text, source=str(path))


def entry_from_config(cfg: ProcessorConfig, source: str = "<memory>") -> CorpusEntry:
    sys, spec = build_system(cfg)
    dup_map = build_dup_map(cfg.dup_map, sys.locations)
    return CorpusEntry(cfg.system.name, cfg, sys, spec, dup_map, source)


def corpus_names(directory: Optional[str] = None) -> List[str]:
    return sorted(p.stem for p in config_dir(directory).glob("*.json"))


def load_entry(name_or_path: str, directory: Optional[str] = None) -> CorpusEntry:
    """Load a config file, or a built-in corpus member by name."""
    path = Path(name_or_path)
    if not path.exists():
        candidate = config_dir(directory) / f"{name_or_path}.json"
        if not candidate.exists():
            raise ConfigError(
                f"no config file or corpus system named {name_or_path!r} "
                f"(known: {', '.join(corpus_names(directory))})"
            )
        path = candidate
    return entry_from_config(load_config(str(path)), source=str(path))


def load_corpus(names: Optional[Sequence[str]] = None, directory: Optional[str] = None) -> List[CorpusEntry]:
    names = list(names) if names else corpus_names(directory)
    entries = [load_entry(name, directory) for name in names]
    logger.info(f"Loaded corpus of {len(entries)} systems: {', '.join(e.name for e in entries)}")
    return entries
