"""Command-line frontend.

    webreq-lint extract <paths...> [--format json|text] [--max-value-set N]
    webreq-lint check <paths...> --specs <dir> [--format json|text]
        [--jquery-get-data-as-query] [--max-value-set N]
        [--fail-on any-mismatch|errors-only] [--jobs N]

Exit codes: 0 on success (for `check`: no mismatch findings, subject to
--fail-on), 1 when any mismatch outcome exists, 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from webreq_lint.checker import CheckConfig, check_request
from webreq_lint.extraction import DEFAULT_MAX_VALUE_SET, extract
from webreq_lint.js.source import ParseError, SourceFile
from webreq_lint.openapi import SpecError, build_index, load_spec
from webreq_lint.report import (
    FILE_IO_ERROR, FILE_OK, FILE_SYNTAX_ERROR, FILE_TOO_LARGE, FileRecord,
    ReportDocument, render_json, render_text,
)

MAX_FILE_BYTES = 1024 * 1024  # larger files are skipped, keeping analysis cheap

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    paths: list[str]
    specs_dir: str | None = None
    output_format: str = "text"
    jquery_get_data_as_query: bool = False
    max_value_set: int = DEFAULT_MAX_VALUE_SET
    fail_on: str = "any-mismatch"
    jobs: int = 1


def discover_files(paths: list[str]) -> list[Path]:
    """Explicit files plus every `*.js` under the given directories."""
    found: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            found.extend(sorted(path.rglob("*.js")))
        elif path.is_file():
            found.append(path)
        else:
            raise UsageError(f"input path does not exist: {raw}")
    unique: dict[str, Path] = {}
    for path in found:
        unique.setdefault(path.as_posix(), path)
    return [unique[key] for key in sorted(unique)]


def analyze_file(path: Path, max_values: int) -> FileRecord:
    record = FileRecord(path=path.as_posix())
    try:
        if path.stat().st_size > MAX_FILE_BYTES:
            record.status = FILE_TOO_LARGE
            record.diagnostics.append(
                f"skipped: file exceeds {MAX_FILE_BYTES // (1024 * 1024)} MB")
            return record
        source = SourceFile.read(path)
    except OSError as exc:
        record.status = FILE_IO_ERROR
        record.diagnostics.append(f"skipped: {exc}")
        return record
    try:
        record.descriptors = extract(source, max_values)
    except ParseError as exc:
        record.status = FILE_SYNTAX_ERROR
        record.diagnostics.append(
            f"skipped: syntax error at line {exc.line}, column {exc.column}: {exc.message}")
    except RecursionError:
        record.status = FILE_SYNTAX_ERROR
        record.diagnostics.append("skipped: nesting too deep to analyze")
    return record


def _analyze_all(config: RunConfig) -> list[FileRecord]:
    files = discover_files(config.paths)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(
                lambda p: analyze_file(p, config.max_value_set), files))
    else:
        records = [analyze_file(p, config.max_value_set) for p in files]
    return records


def cmd_extract(config: RunConfig) -> ReportDocument:
    report = ReportDocument(command="extract")
    report.files = _analyze_all(config)
    report.sort()
    return report


def load_specs_dir(specs_dir: str) -> tuple[list, list[str], list[str]]:
    root = Path(specs_dir)
    if not root.is_dir():
        raise UsageError(f"--specs is not a directory: {specs_dir}")
    specs = []
    loaded: list[str] = []
    diagnostics: list[str] = []
    for path in sorted(root.glob("*.json")):
        try:
            specs.append(load_spec(path.read_text(encoding="utf-8"), source=path.name))
            loaded.append(path.name)
        except (SpecError, OSError) as exc:
            diagnostics.append(f"{path.name}: skipped: {exc}")
    if not specs:
        raise UsageError(f"no loadable specifications in {specs_dir}")
    return specs, loaded, diagnostics


def cmd_check(config: RunConfig) -> ReportDocument:
    if not config.specs_dir:
        raise UsageError("check requires --specs <dir>")
    specs, loaded, diagnostics = load_specs_dir(config.specs_dir)
    index = build_index(specs)
    check_config = CheckConfig(jquery_get_data_as_query=config.jquery_get_data_as_query)

    report = ReportDocument(command="check", specs_loaded=loaded,
                            spec_diagnostics=diagnostics)
    report.files = _analyze_all(config)
    for record in report.files:
        record.findings = [check_request(d, index, check_config)
                           for d in record.descriptors]
    report.sort()
    return report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="webreq-lint",
        description="Extract web API requests from JavaScript and check them "
                    "against Swagger 2.0 specifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("paths", nargs="+", help="JavaScript files or directories")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--max-value-set", type=int, default=DEFAULT_MAX_VALUE_SET,
                       metavar="N", help="cap on candidate values per expression")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="analyze files with N worker threads")

    p_extract = sub.add_parser("extract", help="report extracted requests only")
    common(p_extract)

    p_check = sub.add_parser("check", help="check requests against specifications")
    common(p_check)
    p_check.add_argument("--specs", required=True, metavar="DIR",
                         help="directory of Swagger 2.0 JSON documents")
    p_check.add_argument("--jquery-get-data-as-query", action="store_true",
                         help="count GET data keys as query parameters "
                              "(jQuery runtime behavior)")
    p_check.add_argument("--fail-on", choices=("any-mismatch", "errors-only"),
                         default="any-mismatch",
                         help="errors-only: findings never affect the exit code")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    config = RunConfig(
        paths=args.paths,
        specs_dir=getattr(args, "specs", None),
        output_format=args.format,
        jquery_get_data_as_query=getattr(args, "jquery_get_data_as_query", False),
        max_value_set=args.max_value_set,
        fail_on=getattr(args, "fail_on", "any-mismatch"),
        jobs=max(1, args.jobs),
    )

    try:
        if args.command == "extract":
            report = cmd_extract(config)
        else:
            report = cmd_check(config)
    except UsageError as exc:
        print(f"webreq-lint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    output = render_json(report) if config.output_format == "json" else render_text(report)
    sys.stdout.write(output)

    if args.command == "check" and config.fail_on == "any-mismatch" \
            and report.mismatch_count() > 0:
        return EXIT_FINDINGS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
