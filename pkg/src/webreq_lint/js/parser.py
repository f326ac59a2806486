"""Recursive-descent parser for the JavaScript subset.

Coverage aims at real-world browser code built from the constructs the
analysis models (functions, var/let/const, string expressions, calls,
object/array literals, control flow) plus enough of the rest of the
language (classes, destructuring, loops, try/switch, modules) to parse
typical files; constructs outside the modeled set still parse and are
handled conservatively during lowering.

Automatic semicolon insertion follows the usual rules: a statement may be
terminated by `;`, by a line break before the offending token, by `}`, or
by end of input. `return`/`throw`/`break`/`continue` are restricted
productions.
"""

from __future__ import annotations

from webreq_lint.js import estree as ast
from webreq_lint.js.estree import UNDEFINED
from webreq_lint.js.lexer import Lexer, Token
from webreq_lint.js.source import ParseError, SourceFile

# Binary operator precedence; higher binds tighter. `**` is right-associative.
_BINARY_PREC = {
    "??": 1, "||": 1, "&&": 2,
    "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7, "in": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}

_ASSIGN_OPS = {
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=",
    "&=", "|=", "^=", "&&=", "||=", "??=",
}

_RESERVED_STATEMENT_STARTERS = {
    "var", "let", "const", "function", "class", "if", "for", "while", "do",
    "return", "break", "continue", "throw", "try", "switch", "debugger",
    "import", "export",
}


def parse_source(file: SourceFile) -> ast.Program:
    """Parse one file into an AST; raises ParseError for invalid syntax."""
    tokens = Lexer(file).tokenize()
    return _Parser(file, tokens).parse_program()


class _Parser:
    def __init__(self, src: SourceFile, tokens: list[Token]):
        self.src = src
        self.tokens = tokens
        self.i = 0

    # --- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, ahead: int = 1) -> Token:
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.type != "EOF":
            self.i += 1
        return tok

    def at(self, type_: str, value: str | None = None) -> bool:
        tok = self.tok
        return tok.type == type_ and (value is None or tok.value == value)

    def at_punc(self, *values: str) -> bool:
        return self.tok.type == "PUNC" and self.tok.value in values

    def at_ident(self, *values: str) -> bool:
        return self.tok.type == "IDENT" and self.tok.value in values

    def expect(self, type_: str, value: str | None = None) -> Token:
        if not self.at(type_, value):
            want = value or type_
            raise self.error(f"expected {want!r} but found {self.tok.value or self.tok.type!r}")
        return self.advance()

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, self.src.line_of(tok.start), self.src.column_of(tok.start))

    def consume_semicolon(self) -> None:
        if self.at_punc(";"):
            self.advance()
            return
        if self.at_punc("}") or self.tok.type == "EOF" or self.tok.newline_before:
            return
        raise self.error("expected ';'")

    # --- program / statements ---------------------------------------------

    def parse_program(self) -> ast.Program:
        body: list[ast.Node] = []
        while self.tok.type != "EOF":
            body.append(self.parse_statement())
        return ast.Program(body=body, start=0)

    def parse_statement(self) -> ast.Node:
        tok = self.tok
        if tok.type == "PUNC":
            if tok.value == "{":
                return self.parse_block()
            if tok.value == ";":
                self.advance()
                return ast.EmptyStatement(start=tok.start)
        if tok.type == "IDENT":
            handler = {
                "var": self._parse_var, "let": self._parse_var, "const": self._parse_var,
                "function": self._parse_function_declaration,
                "class": self._parse_class_declaration,
                "if": self._parse_if, "for": self._parse_for, "while": self._parse_while,
                "do": self._parse_do_while, "return": self._parse_return,
                "break": self._parse_break_continue, "continue": self._parse_break_continue,
                "throw": self._parse_throw, "try": self._parse_try,
                "switch": self._parse_switch, "debugger": self._parse_debugger,
                "import": self._parse_import, "export": self._parse_export,
            }.get(tok.value)
            if handler is not None and self._keyword_starts_statement(tok.value):
                return handler()
            if tok.value == "async" and self.peek().type == "IDENT" \
                    and self.peek().value == "function" and not self.peek().newline_before:
                self.advance()
                return self._parse_function_declaration()
            # labeled statement: IDENT ':' not inside an expression
            if self.peek().type == "PUNC" and self.peek().value == ":":
                label = self.advance().value
                self.advance()
                return ast.LabeledStatement(label=label, body=self.parse_statement(), start=tok.start)
        expr = self.parse_expression()
        self.consume_semicolon()
        return ast.ExpressionStatement(expression=expr, start=tok.start)

    def _keyword_starts_statement(self, word: str) -> bool:
        # `let` is contextual: `let(x)` or `let.a` is an expression in sloppy mode.
        if word == "let":
            nxt = self.peek()
            return nxt.type == "IDENT" or (nxt.type == "PUNC" and nxt.value in ("[", "{"))
        return word in _RESERVED_STATEMENT_STARTERS

    def parse_block(self) -> ast.BlockStatement:
        start = self.expect("PUNC", "{").start
        body: list[ast.Node] = []
        while not self.at_punc("}"):
            if self.tok.type == "EOF":
                raise self.error("unexpected end of input in block")
            body.append(self.parse_statement())
        self.expect("PUNC", "}")
        return ast.BlockStatement(body=body, start=start)

    def _parse_var(self, in_for_head: bool = False) -> ast.VariableDeclaration:
        tok = self.advance()
        decls: list[ast.VariableDeclarator] = []
        while True:
            target = self._parse_binding_target()
            init = None
            if self.at_punc("="):
                self.advance()
                init = self.parse_assignment()
            decls.append(ast.VariableDeclarator(target=target, init=init, start=target.start))
            if self.at_punc(","):
                self.advance()
                continue
            break
        if not in_for_head:
            self.consume_semicolon()
        return ast.VariableDeclaration(kind=tok.value, declarations=decls, start=tok.start)

    def _parse_binding_target(self) -> ast.Node:
        if self.tok.type == "IDENT":
            tok = self.advance()
            return ast.Identifier(name=tok.value, start=tok.start)
        if self.at_punc("{"):
            return self._parse_object_pattern()
        if self.at_punc("["):
            return self._parse_array_pattern()
        raise self.error("expected binding target")

    def _parse_object_pattern(self) -> ast.ObjectPattern:
        start = self.expect("PUNC", "{").start
        names: list[str] = []
        while not self.at_punc("}"):
            if self.at_punc("..."):
                self.advance()
                names.append(self.expect("IDENT").value)
            elif self.tok.type in ("IDENT", "STR", "NUM"):
                self.advance()
                if self.at_punc(":"):
                    self.advance()
                    names.extend(self._binding_names(self._parse_binding_target()))
                else:
                    names.append(self.tokens[self.i - 1].value)
                if self.at_punc("="):
                    self.advance()
                    self.parse_assignment()  # default value, discarded
            elif self.at_punc("["):
                # computed key
                self.advance()
                self.parse_assignment()
                self.expect("PUNC", "]")
                self.expect("PUNC", ":")
                names.extend(self._binding_names(self._parse_binding_target()))
                if self.at_punc("="):
                    self.advance()
                    self.parse_assignment()
            else:
                raise self.error("unexpected token in object pattern")
            if self.at_punc(","):
                self.advance()
        self.expect("PUNC", "}")
        return ast.ObjectPattern(names=names, start=start)

    def _parse_array_pattern(self) -> ast.ArrayPattern:
        start = self.expect("PUNC", "[").start
        names: list[str] = []
        while not self.at_punc("]"):
            if self.at_punc(","):
                self.advance()
                continue
            if self.at_punc("..."):
                self.advance()
                names.extend(self._binding_names(self._parse_binding_target()))
            else:
                names.extend(self._binding_names(self._parse_binding_target()))
                if self.at_punc("="):
                    self.advance()
                    self.parse_assignment()
            if self.at_punc(","):
                self.advance()
        self.expect("PUNC", "]")
        return ast.ArrayPattern(names=names, start=start)

    @staticmethod
    def _binding_names(target: ast.Node) -> list[str]:
        if isinstance(target, ast.Identifier):
            return [target.name]
        if isinstance(target, (ast.ObjectPattern, ast.ArrayPattern)):
            return list(target.names)
        return []

    def _parse_function_declaration(self) -> ast.FunctionDeclaration:
        fn = self._parse_function(require_name=True)
        return ast.FunctionDeclaration(function=fn, start=fn.start)

    def _parse_function(self, require_name: bool) -> ast.FunctionExpression:
        start = self.expect("IDENT", "function").start
        if self.at_punc("*"):
            self.advance()
        name = None
        if self.tok.type == "IDENT" and not self.at_punc("("):
            name = self.advance().value
        elif require_name:
            raise self.error("function declaration requires a name")
        params = self._parse_params()
        body = self.parse_block()
        return ast.FunctionExpression(name=name, params=params, body=body.body, start=start)

    def _parse_params(self) -> list[ast.Node]:
        self.expect("PUNC", "(")
        params: list[ast.Node] = []
        while not self.at_punc(")"):
            if self.at_punc("..."):
                start = self.advance().start
                inner = self._parse_binding_target()
                names = self._binding_names(inner)
                params.append(ast.RestElement(name=names[0] if names else "", start=start))
            else:
                target = self._parse_binding_target()
                if self.at_punc("="):
                    self.advance()
                    default = self.parse_assignment()
                    target = ast.AssignmentPattern(target=target, default=default, start=target.start)
                params.append(target)
            if self.at_punc(","):
                self.advance()
        self.expect("PUNC", ")")
        return params

    def _parse_class_declaration(self) -> ast.ClassDeclaration:
        cls = self._parse_class(require_name=True)
        return ast.ClassDeclaration(cls=cls, start=cls.start)

    def _parse_class(self, require_name: bool) -> ast.ClassExpression:
        start = self.expect("IDENT", "class").start
        name = None
        if self.tok.type == "IDENT" and self.tok.value != "extends":
            name = self.advance().value
        elif require_name:
            raise self.error("class declaration requires a name")
        superclass = None
        if self.at_ident("extends"):
            self.advance()
            superclass = self.parse_unary()
        self.expect("PUNC", "{")
        methods: list[ast.ClassMethod] = []
        while not self.at_punc("}"):
            if self.at_punc(";"):
                self.advance()
                continue
            methods.append(self._parse_class_member())
        self.expect("PUNC", "}")
        return ast.ClassExpression(name=name, superclass=superclass, methods=methods, start=start)

    def _parse_class_member(self) -> ast.ClassMethod:
        start = self.tok.start
        static = False
        if self.at_ident("static") and not (self.peek().type == "PUNC" and self.peek().value in ("(", "=")):
            self.advance()
            static = True
        kind = "method"
        if self.at_ident("get", "set") and not (self.peek().type == "PUNC" and self.peek().value in ("(", "=", ";", "}")):
            kind = self.advance().value
        if self.at_ident("async") and not (self.peek().type == "PUNC" and self.peek().value in ("(", "=")):
            self.advance()
        if self.at_punc("*"):
            self.advance()
        computed = False
        key: str | None = None
        if self.at_punc("["):
            self.advance()
            self.parse_assignment()
            self.expect("PUNC", "]")
            computed = True
        elif self.tok.type in ("IDENT", "STR"):
            key = self.advance().value
        elif self.tok.type == "NUM":
            key = self.advance().value
        else:
            raise self.error("unexpected token in class body")
        if self.at_punc("("):
            params = self._parse_params()
            body = self.parse_block()
            fn = ast.FunctionExpression(name=key, params=params, body=body.body, start=start)
            return ast.ClassMethod(key=key, value=fn, kind=kind, static=static, computed=computed, start=start)
        # class field
        value = None
        if self.at_punc("="):
            self.advance()
            value = self.parse_assignment()
        self.consume_semicolon()
        fn = ast.FunctionExpression(name=key, params=[], body=[], start=start)
        if isinstance(value, ast.FunctionExpression):
            fn = value
        return ast.ClassMethod(key=key, value=fn, kind="method", static=static, computed=computed, start=start)

    def _parse_if(self) -> ast.IfStatement:
        start = self.advance().start
        self.expect("PUNC", "(")
        test = self.parse_expression()
        self.expect("PUNC", ")")
        consequent = self.parse_statement()
        alternate = None
        if self.at_ident("else"):
            self.advance()
            alternate = self.parse_statement()
        return ast.IfStatement(test=test, consequent=consequent, alternate=alternate, start=start)

    def _parse_for(self) -> ast.Node:
        start = self.advance().start
        self.expect("PUNC", "(")
        init: ast.Node | None = None
        if self.at_punc(";"):
            self.advance()
        else:
            if self.at_ident("var", "let", "const") and self._keyword_starts_statement(self.tok.value):
                init = self._parse_var(in_for_head=True)
            else:
                init = self.parse_expression(no_in=True)
            if self.at_ident("in") or self.at_ident("of"):
                of = self.advance().value == "of"
                right = self.parse_assignment()
                self.expect("PUNC", ")")
                body = self.parse_statement()
                return ast.ForInStatement(left=init, right=right, body=body, of=of, start=start)
            self.expect("PUNC", ";")
        test = None if self.at_punc(";") else self.parse_expression()
        self.expect("PUNC", ";")
        update = None if self.at_punc(")") else self.parse_expression()
        self.expect("PUNC", ")")
        body = self.parse_statement()
        return ast.ForStatement(init=init, test=test, update=update, body=body, start=start)

    def _parse_while(self) -> ast.WhileStatement:
        start = self.advance().start
        self.expect("PUNC", "(")
        test = self.parse_expression()
        self.expect("PUNC", ")")
        return ast.WhileStatement(test=test, body=self.parse_statement(), start=start)

    def _parse_do_while(self) -> ast.DoWhileStatement:
        start = self.advance().start
        body = self.parse_statement()
        self.expect("IDENT", "while")
        self.expect("PUNC", "(")
        test = self.parse_expression()
        self.expect("PUNC", ")")
        if self.at_punc(";"):
            self.advance()
        return ast.DoWhileStatement(body=body, test=test, start=start)

    def _parse_return(self) -> ast.ReturnStatement:
        start = self.advance().start
        argument = None
        if not (self.at_punc(";", "}") or self.tok.type == "EOF" or self.tok.newline_before):
            argument = self.parse_expression()
        self.consume_semicolon()
        return ast.ReturnStatement(argument=argument, start=start)

    def _parse_break_continue(self) -> ast.Node:
        tok = self.advance()
        label = None
        if self.tok.type == "IDENT" and not self.tok.newline_before \
                and self.tok.value not in _RESERVED_STATEMENT_STARTERS:
            label = self.advance().value
        self.consume_semicolon()
        cls = ast.BreakStatement if tok.value == "break" else ast.ContinueStatement
        return cls(label=label, start=tok.start)

    def _parse_throw(self) -> ast.ThrowStatement:
        start = self.advance().start
        if self.tok.newline_before:
            raise self.error("newline not allowed after 'throw'")
        argument = self.parse_expression()
        self.consume_semicolon()
        return ast.ThrowStatement(argument=argument, start=start)

    def _parse_try(self) -> ast.TryStatement:
        start = self.advance().start
        block = self.parse_block()
        handler_param = None
        handler = None
        finalizer = None
        if self.at_ident("catch"):
            self.advance()
            if self.at_punc("("):
                self.advance()
                handler_param = self._parse_binding_target()
                self.expect("PUNC", ")")
            handler = self.parse_block()
        if self.at_ident("finally"):
            self.advance()
            finalizer = self.parse_block()
        if handler is None and finalizer is None:
            raise self.error("try statement requires catch or finally")
        return ast.TryStatement(block=block, handler_param=handler_param,
                                handler=handler, finalizer=finalizer, start=start)

    def _parse_switch(self) -> ast.SwitchStatement:
        start = self.advance().start
        self.expect("PUNC", "(")
        discriminant = self.parse_expression()
        self.expect("PUNC", ")")
        self.expect("PUNC", "{")
        cases: list[ast.SwitchCase] = []
        while not self.at_punc("}"):
            case_start = self.tok.start
            if self.at_ident("case"):
                self.advance()
                test = self.parse_expression()
            elif self.at_ident("default"):
                self.advance()
                test = None
            else:
                raise self.error("expected 'case' or 'default'")
            self.expect("PUNC", ":")
            body: list[ast.Node] = []
            while not (self.at_punc("}") or self.at_ident("case") or self.at_ident("default")):
                body.append(self.parse_statement())
            cases.append(ast.SwitchCase(test=test, body=body, start=case_start))
        self.expect("PUNC", "}")
        return ast.SwitchStatement(discriminant=discriminant, cases=cases, start=start)

    def _parse_debugger(self) -> ast.DebuggerStatement:
        tok = self.advance()
        self.consume_semicolon()
        return ast.DebuggerStatement(start=tok.start)

    def _parse_import(self) -> ast.Node:
        start_tok = self.tok
        # dynamic import or import.meta used as an expression
        if self.peek().type == "PUNC" and self.peek().value in ("(", "."):
            expr = self.parse_expression()
            self.consume_semicolon()
            return ast.ExpressionStatement(expression=expr, start=start_tok.start)
        self.advance()
        names: list[str] = []
        if self.tok.type == "STR":
            source = self.advance().value
            self.consume_semicolon()
            return ast.ImportDeclaration(names=names, source=source, start=start_tok.start)
        if self.tok.type == "IDENT" and not self.at_ident("from"):
            names.append(self.advance().value)
            if self.at_punc(","):
                self.advance()
        if self.at_punc("*"):
            self.advance()
            self.expect("IDENT", "as")
            names.append(self.expect("IDENT").value)
        elif self.at_punc("{"):
            self.advance()
            while not self.at_punc("}"):
                imported = self.advance().value
                if self.at_ident("as"):
                    self.advance()
                    imported = self.expect("IDENT").value
                names.append(imported)
                if self.at_punc(","):
                    self.advance()
            self.expect("PUNC", "}")
        self.expect("IDENT", "from")
        source = self.expect("STR").value
        self.consume_semicolon()
        return ast.ImportDeclaration(names=names, source=source, start=start_tok.start)

    def _parse_export(self) -> ast.ExportDeclaration:
        start = self.advance().start
        if self.at_ident("default"):
            self.advance()
            if self.at_ident("function"):
                decl: ast.Node | None = self._parse_function_declaration() \
                    if self.peek().type == "IDENT" else ast.ExpressionStatement(
                        expression=self._parse_function(require_name=False), start=self.tok.start)
            elif self.at_ident("class"):
                decl = self._parse_class_declaration() if self.peek().type == "IDENT" \
                    else ast.ExpressionStatement(expression=self._parse_class(require_name=False),
                                                 start=self.tok.start)
            else:
                decl = ast.ExpressionStatement(expression=self.parse_assignment(), start=self.tok.start)
                self.consume_semicolon()
            return ast.ExportDeclaration(declaration=decl, start=start)
        if self.at_punc("{"):
            self.advance()
            while not self.at_punc("}"):
                self.advance()
            self.expect("PUNC", "}")
            if self.at_ident("from"):
                self.advance()
                self.expect("STR")
            self.consume_semicolon()
            return ast.ExportDeclaration(declaration=None, start=start)
        if self.at_punc("*"):
            self.advance()
            if self.at_ident("as"):
                self.advance()
                self.expect("IDENT")
            self.expect("IDENT", "from")
            self.expect("STR")
            self.consume_semicolon()
            return ast.ExportDeclaration(declaration=None, start=start)
        return ast.ExportDeclaration(declaration=self.parse_statement(), start=start)

    # --- expressions --------------------------------------------------------

    def parse_expression(self, no_in: bool = False) -> ast.Node:
        expr = self.parse_assignment(no_in=no_in)
        if self.at_punc(","):
            exprs = [expr]
            while self.at_punc(","):
                self.advance()
                exprs.append(self.parse_assignment(no_in=no_in))
            return ast.SequenceExpression(expressions=exprs, start=expr.start)
        return expr

    def parse_assignment(self, no_in: bool = False) -> ast.Node:
        arrow = self._try_parse_arrow()
        if arrow is not None:
            return arrow
        if self.at_ident("yield"):
            return self._parse_yield()
        left = self.parse_conditional(no_in=no_in)
        if self.tok.type == "PUNC" and self.tok.value in _ASSIGN_OPS:
            op = self.advance().value
            value = self.parse_assignment(no_in=no_in)
            return ast.AssignmentExpression(operator=op, target=left, value=value, start=left.start)
        return left

    def _try_parse_arrow(self) -> ast.Node | None:
        """Detect `ident =>`, `(params) =>`, and async variants; backtrack otherwise."""
        start_i = self.i
        is_async = False
        if self.at_ident("async") and not self.peek().newline_before \
                and (self.peek().type == "IDENT" or (self.peek().type == "PUNC" and self.peek().value == "(")) \
                and not (self.peek().type == "IDENT" and self.peek().value == "function"):
            probe = self.i + 1
        else:
            probe = self.i
        if probe != self.i:
            is_async = True

        tok = self.tokens[probe]
        if tok.type == "IDENT" and tok.value not in _RESERVED_STATEMENT_STARTERS:
            nxt = self.tokens[min(probe + 1, len(self.tokens) - 1)]
            if nxt.type == "PUNC" and nxt.value == "=>" and not nxt.newline_before:
                if is_async:
                    self.advance()
                name_tok = self.advance()
                self.advance()  # =>
                param = ast.Identifier(name=name_tok.value, start=name_tok.start)
                return self._finish_arrow([param], name_tok.start)
        if tok.type == "PUNC" and tok.value == "(":
            close = self._matching_paren(probe)
            if close is not None:
                after = self.tokens[min(close + 1, len(self.tokens) - 1)]
                if after.type == "PUNC" and after.value == "=>" and not after.newline_before:
                    if is_async:
                        self.advance()
                    try:
                        params = self._parse_params()
                    except ParseError:
                        self.i = start_i
                        return None
                    self.expect("PUNC", "=>")
                    return self._finish_arrow(params, tok.start)
        self.i = start_i
        return None

    def _matching_paren(self, open_i: int) -> int | None:
        depth = 0
        j = open_i
        while j < len(self.tokens):
            t = self.tokens[j]
            if t.type == "EOF":
                return None
            if t.type == "PUNC":
                if t.value in ("(", "[", "{"):
                    depth += 1
                elif t.value in (")", "]", "}"):
                    depth -= 1
                    if depth == 0:
                        return j
            j += 1
        return None

    def _finish_arrow(self, params: list[ast.Node], start: int) -> ast.FunctionExpression:
        if self.at_punc("{"):
            body = self.parse_block()
            return ast.FunctionExpression(params=params, body=body.body, is_arrow=True, start=start)
        expr = self.parse_assignment()
        return ast.FunctionExpression(params=params, body=[], is_arrow=True,
                                      expression_body=expr, start=start)

    def _parse_yield(self) -> ast.YieldExpression:
        start = self.advance().start
        delegate = False
        argument = None
        if self.at_punc("*"):
            self.advance()
            delegate = True
        if not (self.at_punc(")", "]", "}", ";", ",", ":") or self.tok.type == "EOF"
                or self.tok.newline_before):
            argument = self.parse_assignment()
        return ast.YieldExpression(argument=argument, delegate=delegate, start=start)

    def parse_conditional(self, no_in: bool = False) -> ast.Node:
        test = self.parse_binary(0, no_in=no_in)
        if self.at_punc("?") and not self.at_punc("?."):
            self.advance()
            consequent = self.parse_assignment()
            self.expect("PUNC", ":")
            alternate = self.parse_assignment(no_in=no_in)
            return ast.ConditionalExpression(test=test, consequent=consequent,
                                             alternate=alternate, start=test.start)
        return test

    def parse_binary(self, min_prec: int, no_in: bool = False) -> ast.Node:
        left = self.parse_unary()
        while True:
            op = None
            if self.tok.type == "PUNC" and self.tok.value in _BINARY_PREC:
                op = self.tok.value
            elif self.at_ident("instanceof"):
                op = "instanceof"
            elif self.at_ident("in") and not no_in:
                op = "in"
            if op is None:
                return left
            prec = _BINARY_PREC[op]
            if prec < min_prec:
                return left
            self.advance()
            next_min = prec if op == "**" else prec + 1  # ** is right-assoc
            right = self.parse_binary(next_min, no_in=no_in)
            if op in ("&&", "||", "??"):
                left = ast.LogicalExpression(operator=op, left=left, right=right, start=left.start)
            else:
                left = ast.BinaryExpression(operator=op, left=left, right=right, start=left.start)

    def parse_unary(self) -> ast.Node:
        tok = self.tok
        if tok.type == "PUNC" and tok.value in ("!", "~", "+", "-"):
            self.advance()
            arg = self.parse_unary()
            return ast.UnaryExpression(operator=tok.value, argument=arg, start=tok.start)
        if tok.type == "PUNC" and tok.value in ("++", "--"):
            self.advance()
            arg = self.parse_unary()
            return ast.UpdateExpression(operator=tok.value, argument=arg, prefix=True, start=tok.start)
        if tok.type == "IDENT" and tok.value in ("typeof", "void", "delete"):
            self.advance()
            arg = self.parse_unary()
            return ast.UnaryExpression(operator=tok.value, argument=arg, start=tok.start)
        if tok.type == "IDENT" and tok.value == "await":
            self.advance()
            arg = self.parse_unary()
            return ast.AwaitExpression(argument=arg, start=tok.start)
        expr = self.parse_postfix()
        return expr

    def parse_postfix(self) -> ast.Node:
        expr = self.parse_call_chain()
        if self.at_punc("++", "--") and not self.tok.newline_before:
            tok = self.advance()
            return ast.UpdateExpression(operator=tok.value, argument=expr, prefix=False, start=expr.start)
        return expr

    def parse_call_chain(self) -> ast.Node:
        if self.at_ident("new"):
            return self._parse_new()
        expr = self.parse_primary()
        return self._parse_chain_tail(expr)

    def _parse_new(self) -> ast.Node:
        start = self.advance().start
        if self.at_punc("."):  # new.target
            self.advance()
            self.expect("IDENT")
            return self._parse_chain_tail(ast.Identifier(name="new.target", start=start))
        callee = self._parse_new_callee()
        arguments: list[ast.Node] = []
        if self.at_punc("("):
            arguments, _ = self._parse_arguments()
        expr: ast.Node = ast.NewExpression(callee=callee, arguments=arguments, start=start)
        return self._parse_chain_tail(expr)

    def _parse_new_callee(self) -> ast.Node:
        if self.at_ident("new"):
            return self._parse_new()
        expr = self.parse_primary()
        # member accesses bind to the constructor; the first `(` starts its arguments
        while True:
            if self.at_punc("."):
                self.advance()
                prop = self._expect_property_name()
                expr = ast.MemberExpression(object=expr, property=prop, start=expr.start)
            elif self.at_punc("["):
                self.advance()
                index = self.parse_expression()
                self.expect("PUNC", "]")
                expr = ast.MemberExpression(object=expr, property=index, computed=True, start=expr.start)
            else:
                return expr

    def _expect_property_name(self) -> str:
        tok = self.tok
        if tok.type in ("IDENT", "NUM"):
            self.advance()
            return tok.value
        raise self.error("expected property name")

    def _parse_arguments(self) -> tuple[list[ast.Node], bool]:
        self.expect("PUNC", "(")
        args: list[ast.Node] = []
        has_spread = False
        while not self.at_punc(")"):
            if self.at_punc("..."):
                start = self.advance().start
                args.append(ast.SpreadElement(argument=self.parse_assignment(), start=start))
                has_spread = True
            else:
                args.append(self.parse_assignment())
            if self.at_punc(","):
                self.advance()
        self.expect("PUNC", ")")
        return args, has_spread

    def _parse_chain_tail(self, expr: ast.Node) -> ast.Node:
        while True:
            if self.at_punc("."):
                self.advance()
                prop = self._expect_property_name()
                expr = ast.MemberExpression(object=expr, property=prop, start=expr.start)
            elif self.at_punc("?."):
                self.advance()
                if self.at_punc("("):
                    args, spread = self._parse_arguments()
                    expr = ast.CallExpression(callee=expr, arguments=args, optional=True,
                                              has_spread=spread, start=expr.start)
                elif self.at_punc("["):
                    self.advance()
                    index = self.parse_expression()
                    self.expect("PUNC", "]")
                    expr = ast.MemberExpression(object=expr, property=index, computed=True,
                                                optional=True, start=expr.start)
                else:
                    prop = self._expect_property_name()
                    expr = ast.MemberExpression(object=expr, property=prop, optional=True, start=expr.start)
            elif self.at_punc("["):
                self.advance()
                index = self.parse_expression()
                self.expect("PUNC", "]")
                expr = ast.MemberExpression(object=expr, property=index, computed=True, start=expr.start)
            elif self.at_punc("("):
                args, spread = self._parse_arguments()
                expr = ast.CallExpression(callee=expr, arguments=args, has_spread=spread, start=expr.start)
            elif self.tok.type == "TEMPLATE":
                quasi = self._template_node(self.advance())
                expr = ast.TaggedTemplate(tag=expr, quasi=quasi, start=expr.start)
            else:
                return expr

    def parse_primary(self) -> ast.Node:
        tok = self.tok
        if tok.type == "NUM":
            self.advance()
            return ast.Literal(value=tok.num_value, kind="number", start=tok.start)
        if tok.type == "STR":
            self.advance()
            return ast.Literal(value=tok.value, kind="string", start=tok.start)
        if tok.type == "REGEX":
            self.advance()
            return ast.Literal(value=tok.value, kind="regex", start=tok.start)
        if tok.type == "TEMPLATE":
            self.advance()
            return self._template_node(tok)
        if tok.type == "PUNC":
            if tok.value == "(":
                self.advance()
                expr = self.parse_expression()
                self.expect("PUNC", ")")
                return expr
            if tok.value == "[":
                return self._parse_array_literal()
            if tok.value == "{":
                return self._parse_object_literal()
        if tok.type == "IDENT":
            value = tok.value
            if value == "function":
                return self._parse_function(require_name=False)
            if value == "async" and self.peek().type == "IDENT" and self.peek().value == "function":
                self.advance()
                return self._parse_function(require_name=False)
            if value == "class":
                return self._parse_class(require_name=False)
            if value == "this":
                self.advance()
                return ast.ThisExpression(start=tok.start)
            if value == "super":
                self.advance()
                return ast.SuperExpression(start=tok.start)
            if value == "true" or value == "false":
                self.advance()
                return ast.Literal(value=(value == "true"), kind="boolean", start=tok.start)
            if value == "null":
                self.advance()
                return ast.Literal(value=None, kind="null", start=tok.start)
            if value == "undefined":
                self.advance()
                return ast.Literal(value=UNDEFINED, kind="undefined", start=tok.start)
            if value in ("if", "for", "while", "do", "var", "const", "return", "try",
                         "switch", "throw", "else", "case", "default", "catch", "finally"):
                raise self.error(f"unexpected keyword {value!r}")
            self.advance()
            return ast.Identifier(name=value, start=tok.start)
        raise self.error(f"unexpected token {tok.value or tok.type!r}")

    def _template_node(self, tok: Token) -> ast.TemplateLiteral:
        quasis: list[str] = []
        expressions: list[ast.Node] = []
        for part in tok.template_parts:
            quasis.append(part.cooked)
            if part.expr_span is not None:
                start, end = part.expr_span
                sub_tokens = Lexer(self.src, start, end).tokenize()
                sub = _Parser(self.src, sub_tokens)
                expressions.append(sub.parse_expression())
                if sub.tok.type != "EOF":
                    raise sub.error("unexpected token in template substitution")
        return ast.TemplateLiteral(quasis=quasis, expressions=expressions, start=tok.start)

    def _parse_array_literal(self) -> ast.ArrayExpression:
        start = self.expect("PUNC", "[").start
        elements: list[ast.Node | None] = []
        has_spread = False
        while not self.at_punc("]"):
            if self.at_punc(","):
                self.advance()
                elements.append(None)  # elision
                continue
            if self.at_punc("..."):
                spread_start = self.advance().start
                elements.append(ast.SpreadElement(argument=self.parse_assignment(), start=spread_start))
                has_spread = True
            else:
                elements.append(self.parse_assignment())
            if self.at_punc(","):
                self.advance()
        self.expect("PUNC", "]")
        return ast.ArrayExpression(elements=elements, has_spread=has_spread, start=start)

    def _parse_object_literal(self) -> ast.ObjectExpression:
        start = self.expect("PUNC", "{").start
        props: list[ast.Property] = []
        while not self.at_punc("}"):
            props.append(self._parse_object_property())
            if self.at_punc(","):
                self.advance()
            elif not self.at_punc("}"):
                raise self.error("expected ',' or '}' in object literal")
        self.expect("PUNC", "}")
        return ast.ObjectExpression(properties=props, start=start)

    def _parse_object_property(self) -> ast.Property:
        start = self.tok.start
        if self.at_punc("..."):
            self.advance()
            value = self.parse_assignment()
            return ast.Property(key=None, value=value, kind="spread", start=start)
        # getter / setter
        if self.at_ident("get", "set"):
            nxt = self.peek()
            if not (nxt.type == "PUNC" and nxt.value in (",", ":", "}", "(")):
                kind = self.advance().value
                key = self._object_key()
                params = self._parse_params()
                body = self.parse_block()
                fn = ast.FunctionExpression(name=key[0], params=params, body=body.body, start=start)
                return ast.Property(key=key[0], value=fn, kind=kind, computed=key[1], start=start)
        if self.at_ident("async") and not (self.peek().type == "PUNC"
                                           and self.peek().value in (",", ":", "}", "(")):
            self.advance()
        if self.at_punc("*"):
            self.advance()
        key, computed = self._object_key()
        if self.at_punc("("):  # method shorthand
            params = self._parse_params()
            body = self.parse_block()
            fn = ast.FunctionExpression(name=key, params=params, body=body.body, start=start)
            return ast.Property(key=key, value=fn, kind="init", computed=computed, start=start)
        if self.at_punc(":"):
            self.advance()
            value = self.parse_assignment()
            return ast.Property(key=key, value=value, kind="init", computed=computed, start=start)
        # shorthand `{a}` or `{a = default}` inside patterns
        if self.at_punc("="):
            self.advance()
            self.parse_assignment()
        if key is None:
            raise self.error("computed key requires a value")
        value = ast.Identifier(name=key, start=start)
        return ast.Property(key=key, value=value, kind="init", computed=False, start=start)

    def _object_key(self) -> tuple[str | None, bool]:
        tok = self.tok
        if tok.type in ("IDENT", "STR"):
            self.advance()
            return tok.value, False
        if tok.type == "NUM":
            self.advance()
            return _number_key(tok.num_value), False
        if tok.type == "PUNC" and tok.value == "[":
            self.advance()
            self.parse_assignment()
            self.expect("PUNC", "]")
            return None, True
        raise self.error("expected property key")


def _number_key(value: float) -> str:
    if value == int(value) and abs(value) < 2 ** 53:
        return str(int(value))
    return repr(value)
