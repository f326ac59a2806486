"""Source file container with offset-to-line mapping."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path


class ParseError(Exception):
    """Raised for syntactically invalid input; carries a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class SourceFile:
    """One JavaScript input file.

    Line numbers reported downstream are 1-based and derived from the
    newline offset table built here.
    """

    path: str
    text: str
    _line_starts: list[int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        starts = [0]
        for i, ch in enumerate(self.text):
            if ch == "\n":
                starts.append(i + 1)
        self._line_starts = starts

    @classmethod
    def read(cls, path: str | Path) -> "SourceFile":
        text = Path(path).read_text(encoding="utf-8", errors="replace")
        return cls(path=str(path), text=text)

    def line_of(self, offset: int) -> int:
        """1-based line containing the character at `offset`."""
        offset = max(0, min(offset, len(self.text)))
        return bisect.bisect_right(self._line_starts, offset)

    def column_of(self, offset: int) -> int:
        """1-based column of the character at `offset`."""
        line = self.line_of(offset)
        return offset - self._line_starts[line - 1] + 1
