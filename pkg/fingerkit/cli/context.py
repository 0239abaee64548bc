"""State handed to every subcommand."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from fingerkit.schemas import RunConfig


@dataclass
class CommandContext:
    config: RunConfig
    out_dir: Path
    emit_svg: bool
    use_cache: bool
    deterministic_svg: bool
    cache_dir: Optional[Path] = None


@dataclass
class CommandResult:
    output_paths: List[Path] = field(default_factory=list)
    summary: List[str] = field(default_factory=list)
    cache_hit: Optional[bool] = None


def pass_fail(ok: bool) -> str:
    return "PASS" if ok else "FAIL"
