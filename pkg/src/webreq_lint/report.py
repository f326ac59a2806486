"""Report document: the JSON and text output formats.

The JSON report is deterministic: files are ordered by path, requests and
findings by line, and every value set is sorted by its rendered form, so
re-running on identical inputs reproduces the report byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from webreq_lint import __version__
from webreq_lint.checker import Finding, Outcome
from webreq_lint.extraction import RequestDescriptor
from webreq_lint.values import data_to_jsonable

FILE_OK = "ok"
FILE_SYNTAX_ERROR = "syntax-error"
FILE_TOO_LARGE = "too-large"
FILE_IO_ERROR = "io-error"


@dataclass
class FileRecord:
    path: str
    status: str = FILE_OK
    diagnostics: list[str] = field(default_factory=list)
    descriptors: list[RequestDescriptor] = field(default_factory=list)
    findings: list[Finding] = field(default_factory=list)


@dataclass
class ReportDocument:
    command: str  # extract | check
    files: list[FileRecord] = field(default_factory=list)
    specs_loaded: list[str] = field(default_factory=list)
    spec_diagnostics: list[str] = field(default_factory=list)

    def sort(self) -> None:
        self.files.sort(key=lambda f: f.path)
        for record in self.files:
            record.descriptors.sort(key=lambda d: (d.site.line, d.site.kind))
            record.findings.sort(key=lambda f: (f.line, f.outcome.value))

    def summary(self) -> dict:
        out: dict = {
            "files": len(self.files),
            "requests": sum(len(f.descriptors) for f in self.files),
        }
        if self.command == "check":
            counts = {outcome.value: 0 for outcome in Outcome}
            for record in self.files:
                for finding in record.findings:
                    counts[finding.outcome.value] += 1
            out["outcomes"] = counts
        return out

    def mismatch_count(self) -> int:
        from webreq_lint.checker import MISMATCH_OUTCOMES
        return sum(1 for record in self.files for finding in record.findings
                   if finding.outcome in MISMATCH_OUTCOMES)


def descriptor_to_jsonable(descriptor: RequestDescriptor) -> dict:
    return {
        "line": descriptor.site.line,
        "call": descriptor.site.call_name,
        "url": sorted(u.render() for u in descriptor.urls),
        "method": sorted(descriptor.methods),
        "data": sorted((data_to_jsonable(d) for d in descriptor.data),
                       key=lambda v: json.dumps(v, sort_keys=True)),
        "unresolved": descriptor.unresolved,
    }


def finding_to_jsonable(finding: Finding) -> dict:
    out: dict = {
        "line": finding.line,
        "outcome": finding.outcome.value,
        "url": finding.urls,
    }
    if finding.note:
        out["note"] = finding.note
    if finding.evidence:
        out["evidence"] = {k: finding.evidence[k] for k in sorted(finding.evidence)}
    return out


def report_to_jsonable(report: ReportDocument) -> dict:
    report.sort()
    out: dict = {
        "tool": "webreq-lint",
        "version": __version__,
        "command": report.command,
    }
    if report.command == "check":
        out["specs"] = {
            "loaded": report.specs_loaded,
            "diagnostics": report.spec_diagnostics,
        }
    out["files"] = [
        {
            "path": record.path,
            "status": record.status,
            "diagnostics": record.diagnostics,
            "requests": [descriptor_to_jsonable(d) for d in record.descriptors],
            **({"findings": [finding_to_jsonable(f) for f in record.findings]}
               if report.command == "check" else {}),
        }
        for record in report.files
    ]
    out["summary"] = report.summary()
    return out


def render_json(report: ReportDocument) -> str:
    return json.dumps(report_to_jsonable(report), indent=2) + "\n"


def render_text(report: ReportDocument) -> str:
    report.sort()
    lines: list[str] = []
    for record in report.files:
        for diag in record.diagnostics:
            lines.append(f"{record.path}: {diag}")
        if report.command == "extract":
            for d in record.descriptors:
                urls = " | ".join(sorted(u.render() for u in d.urls))
                methods = ",".join(sorted(d.methods)) or "-"
                lines.append(f"{record.path}:{d.site.line} {d.site.call_name} "
                             f"[{methods}] {urls}")
        else:
            for f in record.findings:
                url = f.urls[0] if f.urls else "-"
                if len(f.urls) > 1:
                    url += f" (+{len(f.urls) - 1} more)"
                detail = f.note or "request matches the specification"
                lines.append(f"{record.path}:{f.line} {f.outcome.value} {url} — {detail}")
    lines.append("")
    summary = report.summary()
    lines.append(f"files: {summary['files']}  requests: {summary['requests']}")
    if "outcomes" in summary:
        for outcome, count in summary["outcomes"].items():
            if count:
                lines.append(f"  {outcome}: {count}")
    return "\n".join(lines) + "\n"
