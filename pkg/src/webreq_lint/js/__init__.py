"""JavaScript frontend: source handling, lexer, parser, and IR lowering."""

from webreq_lint.js.source import ParseError, SourceFile
from webreq_lint.js.parser import parse_source
from webreq_lint.js.ir import ScriptIR, lower_to_ir

__all__ = ["ParseError", "SourceFile", "parse_source", "ScriptIR", "lower_to_ir"]
