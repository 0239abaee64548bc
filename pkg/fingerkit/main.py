"""Command-line entry point."""
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import ValidationError

from fingerkit.cli.context import CommandContext
from fingerkit.cli.router import build_parser
from fingerkit.core.config import CACHE_DIR, TOOL_VERSION
from fingerkit.core.errors import ConfigurationError, FingerKitError, SchemaVersionError
from fingerkit.core.logging_config import logger
from fingerkit.schemas import SCHEMA_VERSION, RunConfig, RunManifest
from fingerkit.services.export import write_manifest


def load_config(path: Optional[str]) -> RunConfig:
    """Parse a YAML or JSON configuration file; no file means all defaults."""
    if path is None:
        return RunConfig()
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read config {source}: {e}") from e
    try:
        data = json.loads(text) if source.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"cannot parse config {source}: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {source} must be a mapping at the top level")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return RunConfig.model_validate(data)


def _report_error(name: str, detail: str, exit_code: int) -> int:
    print(json.dumps({"error": name, "detail": detail, "exit_code": exit_code}), file=sys.stderr)
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    started = time.perf_counter()
    try:
        config = load_config(args.config)
        out_dir = Path(args.out or config.output_dir)
        cache_dir = Path(args.cache_dir or config.cache_dir or CACHE_DIR)
        ctx = CommandContext(
            config=config,
            out_dir=out_dir,
            emit_svg=args.svg or config.emit_svg,
            use_cache=not args.no_cache,
            deterministic_svg=args.deterministic_svg,
            cache_dir=cache_dir,
        )
        logger.info(f"Running {args.command} (config hash {config.content_hash()[:12]})")
        result = args.handler(args, ctx)

        manifest = RunManifest(
            config_hash=config.content_hash(),
            tool_version=TOOL_VERSION,
            command=args.command,
            argv=argv,
            input_paths=[str(Path(args.config))] if args.config else [],
            output_paths=[str(p) for p in result.output_paths],
            wall_time_s=time.perf_counter() - started,
            cache_hit=result.cache_hit,
            created_at=datetime.now(timezone.utc),
            config=config.model_dump(mode="json"),
        )
        write_manifest(out_dir, manifest)
    except FingerKitError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e.detail}")
        return _report_error(type(e).__name__, e.detail, e.exit_code)
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        detail = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        return _report_error("ValidationError", detail, ConfigurationError.exit_code)

    for line in result.summary:
        print(line)
    logger.info(f"{args.command} finished in {time.perf_counter() - started:.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
