"""Tokenizer for the JavaScript subset accepted by the frontend.

Keywords are emitted as IDENT tokens; the parser decides reservedness so
that keywords remain usable as property names and object keys. Template
literals are lexed as one composite token carrying cooked text parts and
the source spans of their substitution expressions; the parser sub-lexes
those spans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from webreq_lint.js.source import ParseError, SourceFile

# Longest-first so that multi-char operators win over their prefixes.
PUNCTUATORS = [
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
    "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".",
]

IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
IDENT_PART = IDENT_START | set("0123456789")

# After these token values a `/` starts a regular expression literal.
_REGEX_AFTER_IDENT = {
    "return", "typeof", "instanceof", "in", "of", "new", "delete", "void",
    "throw", "do", "else", "case", "yield", "await",
}


@dataclass
class TemplatePart:
    """Cooked literal chunk followed by an optional substitution span."""

    cooked: str
    expr_span: tuple[int, int] | None = None  # [start, end) into the source text


@dataclass
class Token:
    type: str  # IDENT NUM STR TEMPLATE REGEX PUNC EOF
    value: str
    start: int
    end: int
    newline_before: bool
    template_parts: list[TemplatePart] = field(default_factory=list)
    num_value: float = 0.0


class Lexer:
    def __init__(self, src: SourceFile, start: int = 0, end: int | None = None):
        self.src = src
        self.text = src.text
        self.pos = start
        self.end = len(self.text) if end is None else end

    def error(self, message: str, offset: int | None = None) -> ParseError:
        at = self.pos if offset is None else offset
        return ParseError(message, self.src.line_of(at), self.src.column_of(at))

    def tokenize(self) -> list[Token]:
        tokens: list[Token] = []
        prev: Token | None = None
        while True:
            tok = self._next_token(prev)
            tokens.append(tok)
            if tok.type == "EOF":
                return tokens
            prev = tok

    # ------------------------------------------------------------------

    def _skip_trivia(self) -> bool:
        """Advance past whitespace and comments; report whether a line break was crossed."""
        saw_newline = False
        t = self.text
        while self.pos < self.end:
            ch = t[self.pos]
            if ch in " \t\r\f\v ﻿":
                self.pos += 1
            elif ch == "\n":
                saw_newline = True
                self.pos += 1
            elif ch == "/" and self.pos + 1 < self.end and t[self.pos + 1] == "/":
                while self.pos < self.end and t[self.pos] != "\n":
                    self.pos += 1
            elif ch == "/" and self.pos + 1 < self.end and t[self.pos + 1] == "*":
                close = t.find("*/", self.pos + 2, self.end)
                if close < 0:
                    raise self.error("unterminated block comment")
                if "\n" in t[self.pos:close]:
                    saw_newline = True
                self.pos = close + 2
            else:
                break
        return saw_newline

    def _next_token(self, prev: Token | None) -> Token:
        newline = self._skip_trivia()
        start = self.pos
        if self.pos >= self.end:
            return Token("EOF", "", start, start, newline)
        ch = self.text[self.pos]

        if ch in IDENT_START:
            return self._lex_ident(newline)
        if ch.isdigit() or (ch == "." and self._peek_digit(1)):
            return self._lex_number(newline)
        if ch in "'\"":
            return self._lex_string(newline)
        if ch == "`":
            return self._lex_template(newline)
        if ch == "/" and self._regex_allowed(prev):
            return self._lex_regex(newline)
        for p in PUNCTUATORS:
            if self.text.startswith(p, self.pos):
                self.pos += len(p)
                return Token("PUNC", p, start, self.pos, newline)
        raise self.error(f"unexpected character {ch!r}")

    def _peek_digit(self, ahead: int) -> bool:
        i = self.pos + ahead
        return i < self.end and self.text[i].isdigit()

    def _lex_ident(self, newline: bool) -> Token:
        start = self.pos
        while self.pos < self.end and self.text[self.pos] in IDENT_PART:
            self.pos += 1
        return Token("IDENT", self.text[start:self.pos], start, self.pos, newline)

    def _lex_number(self, newline: bool) -> Token:
        start = self.pos
        t = self.text

        def digits(allowed: str) -> None:
            while self.pos < self.end and (t[self.pos] in allowed or t[self.pos] == "_"):
                self.pos += 1

        if t[self.pos] == "0" and self.pos + 1 < self.end and t[self.pos + 1] in "xXoObB":
            base = {"x": 16, "o": 8, "b": 2}[t[self.pos + 1].lower()]
            self.pos += 2
            d0 = self.pos
            digits("0123456789abcdefABCDEF" if base == 16 else "01234567" if base == 8 else "01")
            if self.pos == d0:
                raise self.error("malformed numeric literal", start)
            raw = t[d0:self.pos].replace("_", "")
            value = float(int(raw, base))
        else:
            digits("0123456789")
            if self.pos < self.end and t[self.pos] == ".":
                self.pos += 1
                digits("0123456789")
            if self.pos < self.end and t[self.pos] in "eE":
                mark = self.pos
                self.pos += 1
                if self.pos < self.end and t[self.pos] in "+-":
                    self.pos += 1
                d0 = self.pos
                digits("0123456789")
                if self.pos == d0:
                    self.pos = mark  # `1e` alone: leave the `e` for the next token
            value = float(t[start:self.pos].replace("_", ""))
        if self.pos < self.end and t[self.pos] == "n":  # BigInt suffix
            self.pos += 1
        if self.pos < self.end and t[self.pos] in IDENT_START:
            raise self.error("identifier starts immediately after numeric literal", self.pos)
        tok = Token("NUM", t[start:self.pos], start, self.pos, newline)
        tok.num_value = value
        return tok

    def _lex_string(self, newline: bool) -> Token:
        start = self.pos
        quote = self.text[self.pos]
        self.pos += 1
        out: list[str] = []
        t = self.text
        while True:
            if self.pos >= self.end:
                raise self.error("unterminated string literal", start)
            ch = t[self.pos]
            if ch == quote:
                self.pos += 1
                break
            if ch == "\n":
                raise self.error("unterminated string literal", start)
            if ch == "\\":
                out.append(self._read_escape())
            else:
                out.append(ch)
                self.pos += 1
        return Token("STR", "".join(out), start, self.pos, newline)

    def _read_escape(self) -> str:
        t = self.text
        self.pos += 1  # past the backslash
        if self.pos >= self.end:
            raise self.error("bad escape at end of input")
        ch = t[self.pos]
        self.pos += 1
        simple = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}
        if ch in simple and not (ch == "0" and self.pos < self.end and t[self.pos].isdigit()):
            return simple[ch]
        if ch == "x":
            hexs = t[self.pos:self.pos + 2]
            if len(hexs) == 2 and all(c in "0123456789abcdefABCDEF" for c in hexs):
                self.pos += 2
                return chr(int(hexs, 16))
            raise self.error("bad \\x escape", self.pos - 2)
        if ch == "u":
            if self.pos < self.end and t[self.pos] == "{":
                close = t.find("}", self.pos, self.end)
                if close < 0:
                    raise self.error("bad \\u{} escape")
                code = t[self.pos + 1:close]
                self.pos = close + 1
                try:
                    return chr(int(code, 16))
                except ValueError as exc:
                    raise self.error(f"bad \\u{{}} escape: {exc}") from None
            hexs = t[self.pos:self.pos + 4]
            if len(hexs) == 4 and all(c in "0123456789abcdefABCDEF" for c in hexs):
                self.pos += 4
                return chr(int(hexs, 16))
            raise self.error("bad \\u escape", self.pos - 2)
        if ch == "\n":
            return ""  # line continuation
        if ch == "\r":
            if self.pos < self.end and t[self.pos] == "\n":
                self.pos += 1
            return ""
        if ch in "1234567":  # legacy octal, accepted leniently
            digs = ch
            while self.pos < self.end and t[self.pos] in "01234567" and len(digs) < 3:
                digs += t[self.pos]
                self.pos += 1
            return chr(int(digs, 8))
        return ch  # \' \" \\ \` \/ and any other identity escape

    def _lex_template(self, newline: bool) -> Token:
        start = self.pos
        self.pos += 1  # past the backtick
        t = self.text
        parts: list[TemplatePart] = []
        cooked: list[str] = []
        while True:
            if self.pos >= self.end:
                raise self.error("unterminated template literal", start)
            ch = t[self.pos]
            if ch == "`":
                self.pos += 1
                parts.append(TemplatePart("".join(cooked)))
                break
            if ch == "$" and self.pos + 1 < self.end and t[self.pos + 1] == "{":
                expr_start = self.pos + 2
                expr_end = self._scan_substitution(expr_start)
                parts.append(TemplatePart("".join(cooked), (expr_start, expr_end)))
                cooked = []
                self.pos = expr_end + 1  # past `}`
            elif ch == "\\":
                cooked.append(self._read_escape())
            else:
                cooked.append(ch)
                self.pos += 1
        tok = Token("TEMPLATE", t[start:self.pos], start, self.pos, newline)
        tok.template_parts = parts
        return tok

    def _scan_substitution(self, start: int) -> int:
        """Find the `}` closing a `${`, skipping nested braces, strings and templates."""
        depth = 1
        i = start
        t = self.text
        while i < self.end:
            ch = t[i]
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    return i
            elif ch in "'\"":
                i = self._skip_quoted(i)
                continue
            elif ch == "`":
                i = self._skip_nested_template(i)
                continue
            elif ch == "/" and i + 1 < self.end and t[i + 1] == "/":
                while i < self.end and t[i] != "\n":
                    i += 1
                continue
            elif ch == "/" and i + 1 < self.end and t[i + 1] == "*":
                close = t.find("*/", i + 2, self.end)
                if close < 0:
                    raise self.error("unterminated block comment", i)
                i = close + 2
                continue
            i += 1
        raise self.error("unterminated template substitution", start)

    def _skip_quoted(self, i: int) -> int:
        quote = self.text[i]
        i += 1
        while i < self.end:
            if self.text[i] == "\\":
                i += 2
            elif self.text[i] == quote:
                return i + 1
            else:
                i += 1
        raise self.error("unterminated string literal", i)

    def _skip_nested_template(self, i: int) -> int:
        i += 1
        while i < self.end:
            ch = self.text[i]
            if ch == "\\":
                i += 2
            elif ch == "`":
                return i + 1
            elif ch == "$" and i + 1 < self.end and self.text[i + 1] == "{":
                i = self._scan_substitution(i + 2) + 1
            else:
                i += 1
        raise self.error("unterminated template literal", i)

    def _regex_allowed(self, prev: Token | None) -> bool:
        if prev is None:
            return True
        if prev.type in ("NUM", "STR", "TEMPLATE", "REGEX"):
            return False
        if prev.type == "IDENT":
            return prev.value in _REGEX_AFTER_IDENT
        # PUNC: after a closing bracket or postfix ++/-- a slash is division.
        return prev.value not in (")", "]", "++", "--")

    def _lex_regex(self, newline: bool) -> Token:
        start = self.pos
        self.pos += 1
        t = self.text
        in_class = False
        while True:
            if self.pos >= self.end or t[self.pos] == "\n":
                raise self.error("unterminated regular expression", start)
            ch = t[self.pos]
            if ch == "\\":
                self.pos += 2
                continue
            if ch == "[":
                in_class = True
            elif ch == "]":
                in_class = False
            elif ch == "/" and not in_class:
                self.pos += 1
                break
            self.pos += 1
        while self.pos < self.end and t[self.pos] in IDENT_PART:  # flags
            self.pos += 1
        return Token("REGEX", t[start:self.pos], start, self.pos, newline)
