"""Statically derived values: symbolic strings and structured request data.

A StringValue is an ordered sequence of literal and symbolic segments.
Symbolic segments stand for string fragments that cannot be determined
statically and render as `{name}`.
"""

from __future__ import annotations

from dataclasses import dataclass

from webreq_lint.js.estree import UNDEFINED


@dataclass(frozen=True)
class LitSeg:
    text: str


@dataclass(frozen=True)
class SymSeg:
    name: str


Segment = LitSeg | SymSeg


@dataclass(frozen=True)
class StringValue:
    segments: tuple[Segment, ...]

    @staticmethod
    def of(*segments: Segment) -> "StringValue":
        return StringValue(normalize_segments(segments))

    @staticmethod
    def literal(text: str) -> "StringValue":
        return StringValue((LitSeg(text),) if text else ())

    @staticmethod
    def symbolic(name: str) -> "StringValue":
        return StringValue((SymSeg(name),))

    @property
    def is_literal(self) -> bool:
        return all(isinstance(s, LitSeg) for s in self.segments)

    @property
    def literal_text(self) -> str:
        """Joined text of the literal segments; meaningful when is_literal."""
        return "".join(s.text for s in self.segments if isinstance(s, LitSeg))

    def concat(self, other: "StringValue") -> "StringValue":
        return StringValue(normalize_segments(self.segments + other.segments))

    def render(self) -> str:
        out: list[str] = []
        for seg in self.segments:
            if isinstance(seg, LitSeg):
                out.append(seg.text)
            else:
                out.append("{" + seg.name + "}")
        return "".join(out)

    @staticmethod
    def parse_rendered(text: str) -> "StringValue":
        """Inverse of render for texts whose literal parts contain no braces."""
        segments: list[Segment] = []
        i = 0
        while i < len(text):
            open_i = text.find("{", i)
            if open_i < 0:
                segments.append(LitSeg(text[i:]))
                break
            if open_i > i:
                segments.append(LitSeg(text[i:open_i]))
            close_i = text.find("}", open_i)
            if close_i < 0:
                segments.append(LitSeg(text[open_i:]))
                break
            segments.append(SymSeg(text[open_i + 1:close_i]))
            i = close_i + 1
        return StringValue(normalize_segments(segments))

    def __str__(self) -> str:
        return self.render()


def normalize_segments(segments) -> tuple[Segment, ...]:
    """Merge adjacent literal segments and drop empty ones."""
    out: list[Segment] = []
    for seg in segments:
        if isinstance(seg, LitSeg):
            if not seg.text:
                continue
            if out and isinstance(out[-1], LitSeg):
                out[-1] = LitSeg(out[-1].text + seg.text)
                continue
        out.append(seg)
    return tuple(out)


# --- request data values -----------------------------------------------------


@dataclass(frozen=True)
class DataValue:
    pass


@dataclass(frozen=True)
class DStr(DataValue):
    value: StringValue


@dataclass(frozen=True)
class DNum(DataValue):
    value: float


@dataclass(frozen=True)
class DBool(DataValue):
    value: bool


@dataclass(frozen=True)
class DNull(DataValue):
    pass


@dataclass(frozen=True)
class DSym(DataValue):
    name: str


@dataclass(frozen=True)
class DObj(DataValue):
    entries: tuple[tuple[str, DataValue], ...]

    def get(self, key: str) -> DataValue | None:
        for k, v in self.entries:
            if k == key:
                return v
        return None

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.entries)


@dataclass(frozen=True)
class DArr(DataValue):
    items: tuple[DataValue, ...]


@dataclass(frozen=True)
class DFunc(DataValue):
    """Function value; appears only in intermediate evaluation results."""

    fid: int
    name: str = ""


def js_number_str(value: float) -> str:
    """Render a number the way JS string conversion does for common cases."""
    if value != value:  # NaN
        return "NaN"
    if value in (float("inf"), float("-inf")):
        return "Infinity" if value > 0 else "-Infinity"
    if value == int(value) and abs(value) < 2 ** 53:
        if value == 0 and str(value)[0] == "-":
            return "0"
        return str(int(value))
    return repr(value)


def to_string_value(value: DataValue) -> StringValue:
    """JS string conversion of an evaluated value."""
    if isinstance(value, DStr):
        return value.value
    if isinstance(value, DNum):
        return StringValue.literal(js_number_str(value.value))
    if isinstance(value, DBool):
        return StringValue.literal("true" if value.value else "false")
    if isinstance(value, DNull):
        return StringValue.literal("null")
    if isinstance(value, DSym):
        return StringValue.symbolic(value.name)
    if isinstance(value, DObj):
        return StringValue.literal("[object Object]")
    if isinstance(value, DArr):
        out = StringValue.literal("")
        for i, item in enumerate(value.items):
            if i:
                out = out.concat(StringValue.literal(","))
            if not isinstance(item, DNull):
                out = out.concat(to_string_value(item))
        return out
    if isinstance(value, DFunc):
        return StringValue.symbolic(value.name or f"function#{value.fid}")
    raise TypeError(f"unexpected value {value!r}")


def literal_to_data(value: object) -> DataValue:
    """Wrap a JS literal (from the IR) as a DataValue."""
    if isinstance(value, str):
        return DStr(StringValue.literal(value))
    if isinstance(value, bool):
        return DBool(value)
    if isinstance(value, (int, float)):
        return DNum(float(value))
    if value is None:
        return DNull()
    if value is UNDEFINED:
        return DNull()
    raise TypeError(f"unexpected literal {value!r}")


def data_is_fully_literal(value: DataValue) -> bool:
    if isinstance(value, DStr):
        return value.value.is_literal
    if isinstance(value, (DNum, DBool, DNull)):
        return True
    if isinstance(value, DObj):
        return all(data_is_fully_literal(v) for _, v in value.entries)
    if isinstance(value, DArr):
        return all(data_is_fully_literal(v) for v in value.items)
    return False


def data_to_jsonable(value: DataValue) -> object:
    """Report rendering: symbolic leaves render in `{name}` form."""
    if isinstance(value, DStr):
        return value.value.render()
    if isinstance(value, DNum):
        n = value.value
        return int(n) if n == int(n) and abs(n) < 2 ** 53 else n
    if isinstance(value, DBool):
        return value.value
    if isinstance(value, DNull):
        return None
    if isinstance(value, DSym):
        return "{" + value.name + "}"
    if isinstance(value, DObj):
        return {k: data_to_jsonable(v) for k, v in value.entries}
    if isinstance(value, DArr):
        return [data_to_jsonable(v) for v in value.items]
    if isinstance(value, DFunc):
        return "{" + (value.name or f"function#{value.fid}") + "}"
    raise TypeError(f"unexpected value {value!r}")
