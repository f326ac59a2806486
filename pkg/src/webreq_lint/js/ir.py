"""Statement-level intermediate representation and AST lowering.

Lowering is total: everything the analysis does not model becomes an
Opaque instruction (or an opaque right-hand side) that conservatively
records the local names it may read and write. Nested expressions are
flattened through `%N` temporaries so that every operand is either a
literal or a variable read, which keeps the dataflow analysis simple.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from webreq_lint.js import estree as ast
from webreq_lint.js.estree import UNDEFINED
from webreq_lint.js.source import SourceFile

# --- operands / expressions ------------------------------------------------


@dataclass(frozen=True)
class Lit:
    """Literal operand: str, float, bool, None (null) or UNDEFINED."""

    value: object


@dataclass(frozen=True)
class VarRead:
    name: str


Operand = Lit | VarRead


@dataclass(frozen=True)
class Concat:
    left: Operand
    right: Operand


@dataclass(frozen=True)
class TemplateLit:
    """Template literal as n-ary concatenation of its parts."""

    parts: tuple[Operand, ...]


@dataclass(frozen=True)
class CalleeVar:
    name: str


@dataclass(frozen=True)
class CalleeProp:
    base: Operand
    prop: str


Callee = CalleeVar | CalleeProp


@dataclass(frozen=True)
class Call:
    callee: Callee
    args: tuple[Operand, ...]


@dataclass(frozen=True)
class PropRead:
    base: Operand
    prop: str


@dataclass(frozen=True)
class ObjectLit:
    entries: tuple[tuple[str, Operand], ...]


@dataclass(frozen=True)
class ArrayLit:
    items: tuple[Operand, ...]


@dataclass(frozen=True)
class FuncRef:
    fid: int


@dataclass(frozen=True)
class OpaqueExpr:
    """Unmodeled computation; `reads` are the local names it may consult."""

    reads: frozenset[str]
    label: str = ""


Expr = (
    Lit | VarRead | Concat | TemplateLit | Call | PropRead | ObjectLit
    | ArrayLit | FuncRef | OpaqueExpr
)


# --- instructions -----------------------------------------------------------


@dataclass(eq=False)
class Instr:
    iid: int
    line: int


@dataclass(eq=False)
class Assign(Instr):
    target: str
    expr: Expr


@dataclass(eq=False)
class PropWrite(Instr):
    base: Operand
    prop: str
    value: Operand


@dataclass(eq=False)
class Return(Instr):
    value: Operand | None


@dataclass(eq=False)
class Branch(Instr):
    """Structured union of alternative paths (if/else, ternary, ||, catch)."""

    arms: list[list[Instr]]


@dataclass(eq=False)
class Loop(Instr):
    body: list[Instr]


@dataclass(eq=False)
class Opaque(Instr):
    """Unmodeled statement with conservative read/write sets."""

    reads: frozenset[str]
    writes: frozenset[str]


@dataclass(eq=False)
class IrFunction:
    fid: int
    name: str | None
    params: list[str]
    body: list[Instr]
    parent: int | None  # lexical parent fid; None only for the top level
    declared: set[str] = field(default_factory=set)
    line: int = 1

    @property
    def display_name(self) -> str:
        return self.name or f"<anonymous@{self.line}>"


@dataclass
class ScriptIR:
    path: str
    functions: list[IrFunction]

    def __post_init__(self) -> None:
        self._owner: dict[int, int] = {}
        self._instrs: dict[int, Instr] = {}
        for fn in self.functions:
            for instr in walk_instrs(fn.body):
                self._owner[instr.iid] = fn.fid
                self._instrs[instr.iid] = instr

    @property
    def top_level(self) -> IrFunction:
        return self.functions[0]

    def function_of(self, iid: int) -> IrFunction:
        return self.functions[self._owner[iid]]

    def instr(self, iid: int) -> Instr:
        return self._instrs[iid]

    def position(self, iid: int) -> tuple[str, int]:
        return self.path, self._instrs[iid].line

    def all_instructions(self):
        for fn in self.functions:
            yield from walk_instrs(fn.body)


def walk_instrs(body: list[Instr]):
    """Yield every instruction in a body, descending into branches and loops."""
    for instr in body:
        yield instr
        if isinstance(instr, Branch):
            for arm in instr.arms:
                yield from walk_instrs(arm)
        elif isinstance(instr, Loop):
            yield from walk_instrs(instr.body)


def operand_names(op: Operand | None) -> frozenset[str]:
    if isinstance(op, VarRead):
        return frozenset((op.name,))
    return frozenset()


def expr_reads(expr: Expr) -> frozenset[str]:
    """Local names an expression may read."""
    if isinstance(expr, VarRead):
        return frozenset((expr.name,))
    if isinstance(expr, Lit) or isinstance(expr, FuncRef):
        return frozenset()
    if isinstance(expr, Concat):
        return operand_names(expr.left) | operand_names(expr.right)
    if isinstance(expr, TemplateLit):
        return frozenset().union(*(operand_names(p) for p in expr.parts)) if expr.parts else frozenset()
    if isinstance(expr, Call):
        names = frozenset().union(*(operand_names(a) for a in expr.args)) if expr.args else frozenset()
        if isinstance(expr.callee, CalleeVar):
            return names | frozenset((expr.callee.name,))
        return names | operand_names(expr.callee.base)
    if isinstance(expr, PropRead):
        return operand_names(expr.base)
    if isinstance(expr, ObjectLit):
        names = frozenset()
        for _, op in expr.entries:
            names |= operand_names(op)
        return names
    if isinstance(expr, ArrayLit):
        names = frozenset()
        for op in expr.items:
            names |= operand_names(op)
        return names
    if isinstance(expr, OpaqueExpr):
        return expr.reads
    return frozenset()


# --- lowering ---------------------------------------------------------------


def lower_to_ir(program: ast.Program, src: SourceFile) -> ScriptIR:
    """Lower a parsed program; never fails on a parseable file."""
    lowerer = _Lowerer(src)
    lowerer.lower_program(program)
    ir = ScriptIR(path=src.path, functions=lowerer.functions)
    _declare_implicit_globals(ir)
    return ir


def _declare_implicit_globals(ir: ScriptIR) -> None:
    """Assignments to names never declared anywhere create file-level globals."""
    for fn in ir.functions:
        for instr in walk_instrs(fn.body):
            targets: list[str] = []
            if isinstance(instr, Assign):
                targets.append(instr.target)
            elif isinstance(instr, Opaque):
                targets.extend(instr.writes)
            for name in targets:
                scope: IrFunction | None = fn
                while scope is not None:
                    if name in scope.declared or name in scope.params:
                        break
                    scope = None if scope.parent is None else ir.functions[scope.parent]
                else:
                    ir.top_level.declared.add(name)


class _Lowerer:
    def __init__(self, src: SourceFile):
        self.src = src
        self.functions: list[IrFunction] = []
        self._iid = 0
        self._stack: list[IrFunction] = []
        self._temp_counter = 0
        self._block_stack: list[list[Instr]] = []

    # --- bookkeeping ---

    @property
    def fn(self) -> IrFunction:
        return self._stack[-1]

    def line(self, node: ast.Node) -> int:
        return self.src.line_of(node.start)

    def next_iid(self) -> int:
        self._iid += 1
        return self._iid

    def fresh_temp(self) -> str:
        self._temp_counter += 1
        name = f"%{self._temp_counter}"
        self.fn.declared.add(name)
        return name

    def emit(self, instr: Instr) -> Instr:
        self._block_stack[-1].append(instr)
        return instr

    def assign(self, target: str, expr: Expr, node: ast.Node) -> None:
        self.emit(Assign(self.next_iid(), self.line(node), target, expr))

    def to_temp(self, expr: Expr, node: ast.Node, label: str = "") -> Operand:
        if isinstance(expr, (Lit, VarRead)):
            return expr
        temp = self.fresh_temp()
        self.assign(temp, expr, node)
        return VarRead(temp)

    def opaque_operand(self, node: ast.Node, reads: frozenset[str], label: str) -> Operand:
        return self.to_temp(OpaqueExpr(reads=reads, label=label), node)

    # --- program / functions ---

    def lower_program(self, program: ast.Program) -> None:
        top = IrFunction(fid=0, name="<toplevel>", params=[], body=[], parent=None)
        self.functions.append(top)
        self._lower_function_body(top, program.body, prelude=None)

    def new_function(self, name: str | None, params: list[ast.Node],
                     body: list[ast.Node], expression_body: ast.Node | None,
                     node: ast.Node, self_name: str | None = None) -> int:
        fid = len(self.functions)
        fn = IrFunction(fid=fid, name=name, params=[], body=[],
                        parent=self.fn.fid, line=self.line(node))
        self.functions.append(fn)

        prelude: list[tuple[str, ast.Node]] = []
        for p in params:
            if isinstance(p, ast.Identifier):
                fn.params.append(p.name)
            elif isinstance(p, ast.AssignmentPattern) and isinstance(p.target, ast.Identifier):
                fn.params.append(p.target.name)
                prelude.append((p.target.name, p.default))
            elif isinstance(p, ast.AssignmentPattern):
                for n in _pattern_names(p.target):
                    fn.declared.add(n)
            elif isinstance(p, ast.RestElement):
                if p.name:
                    fn.declared.add(p.name)
            else:
                for n in _pattern_names(p):
                    fn.declared.add(n)
        if self_name:
            fn.declared.add(self_name)

        stmts = body if expression_body is None else [ast.ReturnStatement(argument=expression_body,
                                                                          start=expression_body.start)]
        self._lower_function_body(fn, stmts, prelude, self_name=self_name)
        return fid

    def _lower_function_body(self, fn: IrFunction, stmts: list[ast.Node],
                             prelude: list[tuple[str, ast.Node]] | None,
                             self_name: str | None = None) -> None:
        _collect_declared(stmts, fn.declared)
        self._stack.append(fn)
        self._block_stack.append(fn.body)
        try:
            if self_name:
                self.assign(self_name, FuncRef(fn.fid), ast.Node(start=0))
            # default parameter values may or may not apply, so both the
            # caller-supplied value and the default reach later uses
            for pname, default in prelude or []:
                arm: list[Instr] = []
                self._block_stack.append(arm)
                op = self.lower_expr(default)
                self.assign(pname, _operand_expr(op), default)
                self._block_stack.pop()
                self.emit(Branch(self.next_iid(), self.line(default), [arm, []]))
            self._hoist_function_declarations(stmts)
            for stmt in stmts:
                self.lower_statement(stmt)
        finally:
            self._block_stack.pop()
            self._stack.pop()

    def _hoist_function_declarations(self, stmts: list[ast.Node]) -> None:
        for stmt in stmts:
            inner = stmt
            if isinstance(inner, ast.ExportDeclaration) and inner.declaration is not None:
                inner = inner.declaration
            if isinstance(inner, ast.FunctionDeclaration):
                fnode = inner.function
                fid = self.new_function(fnode.name, fnode.params, fnode.body,
                                        fnode.expression_body, fnode)
                self.assign(fnode.name, FuncRef(fid), fnode)

    # --- statements ---

    def lower_statement(self, stmt: ast.Node) -> None:
        if isinstance(stmt, ast.ExpressionStatement):
            self.lower_expr(stmt.expression)
        elif isinstance(stmt, ast.VariableDeclaration):
            self._lower_var_declaration(stmt)
        elif isinstance(stmt, ast.FunctionDeclaration):
            pass  # hoisted
        elif isinstance(stmt, ast.BlockStatement):
            for s in stmt.body:
                self.lower_statement(s)
        elif isinstance(stmt, ast.IfStatement):
            self.lower_expr(stmt.test)
            then_arm = self._lower_arm(stmt.consequent)
            else_arm = self._lower_arm(stmt.alternate) if stmt.alternate else []
            self.emit(Branch(self.next_iid(), self.line(stmt), [then_arm, else_arm]))
        elif isinstance(stmt, ast.ReturnStatement):
            value = self.lower_expr(stmt.argument) if stmt.argument is not None else None
            self.emit(Return(self.next_iid(), self.line(stmt), value))
        elif isinstance(stmt, (ast.ForStatement, ast.WhileStatement, ast.DoWhileStatement)):
            self._lower_loop(stmt)
        elif isinstance(stmt, ast.ForInStatement):
            self._lower_for_in(stmt)
        elif isinstance(stmt, ast.TryStatement):
            self._lower_try(stmt)
        elif isinstance(stmt, ast.SwitchStatement):
            self._lower_switch(stmt)
        elif isinstance(stmt, ast.ThrowStatement):
            op = self.lower_expr(stmt.argument)
            self.emit(Opaque(self.next_iid(), self.line(stmt), operand_names(op), frozenset()))
        elif isinstance(stmt, ast.LabeledStatement):
            self.lower_statement(stmt.body)
        elif isinstance(stmt, ast.ClassDeclaration):
            self._lower_class(stmt.cls, binding=stmt.cls.name)
        elif isinstance(stmt, ast.ExportDeclaration):
            if stmt.declaration is not None:
                self.lower_statement(stmt.declaration)
        elif isinstance(stmt, (ast.EmptyStatement, ast.BreakStatement, ast.ContinueStatement,
                               ast.DebuggerStatement, ast.ImportDeclaration)):
            pass
        else:
            self.emit(Opaque(self.next_iid(), self.line(stmt), frozenset(), frozenset()))

    def _lower_arm(self, stmt: ast.Node) -> list[Instr]:
        arm: list[Instr] = []
        self._block_stack.append(arm)
        try:
            self.lower_statement(stmt)
        finally:
            self._block_stack.pop()
        return arm

    def _lower_var_declaration(self, decl: ast.VariableDeclaration) -> None:
        for d in decl.declarations:
            if isinstance(d.target, ast.Identifier):
                if d.init is not None:
                    expr = self.lower_expr_rhs(d.init, target_hint=d.target.name)
                    self.assign(d.target.name, expr, d)
            else:
                names = _pattern_names(d.target)
                reads = frozenset()
                if d.init is not None:
                    reads = operand_names(self.lower_expr(d.init))
                for n in names:
                    self.assign(n, OpaqueExpr(reads=reads, label="destructure"), d)

    def _lower_loop(self, stmt: ast.ForStatement | ast.WhileStatement | ast.DoWhileStatement) -> None:
        if isinstance(stmt, ast.ForStatement) and stmt.init is not None:
            if isinstance(stmt.init, ast.VariableDeclaration):
                self._lower_var_declaration(stmt.init)
            else:
                self.lower_expr(stmt.init)
        body: list[Instr] = []
        self._block_stack.append(body)
        try:
            test = getattr(stmt, "test", None)
            if test is not None:
                self.lower_expr(test)
            self.lower_statement(stmt.body)
            update = getattr(stmt, "update", None)
            if update is not None:
                self.lower_expr(update)
        finally:
            self._block_stack.pop()
        self.emit(Loop(self.next_iid(), self.line(stmt), body))

    def _lower_for_in(self, stmt: ast.ForInStatement) -> None:
        right = self.lower_expr(stmt.right)
        names: list[str] = []
        if isinstance(stmt.left, ast.VariableDeclaration):
            for d in stmt.left.declarations:
                names.extend(_pattern_names(d.target))
        elif isinstance(stmt.left, ast.Identifier):
            names.append(stmt.left.name)
        body: list[Instr] = []
        self._block_stack.append(body)
        try:
            for n in names:
                self.assign(n, OpaqueExpr(reads=operand_names(right), label="iteration"), stmt)
            self.lower_statement(stmt.body)
        finally:
            self._block_stack.pop()
        self.emit(Loop(self.next_iid(), self.line(stmt), body))

    def _lower_try(self, stmt: ast.TryStatement) -> None:
        try_arm = self._lower_arm(stmt.block)
        self.emit(Branch(self.next_iid(), self.line(stmt), [try_arm, []]))
        if stmt.handler is not None:
            handler_arm: list[Instr] = []
            self._block_stack.append(handler_arm)
            try:
                for n in _pattern_names(stmt.handler_param) if stmt.handler_param else []:
                    self.fn.declared.add(n)
                    self.assign(n, OpaqueExpr(reads=frozenset(), label="exception"), stmt.handler)
                self.lower_statement(stmt.handler)
            finally:
                self._block_stack.pop()
            self.emit(Branch(self.next_iid(), self.line(stmt.handler), [handler_arm, []]))
        if stmt.finalizer is not None:
            self.lower_statement(stmt.finalizer)

    def _lower_switch(self, stmt: ast.SwitchStatement) -> None:
        self.lower_expr(stmt.discriminant)
        # each case body lands in its own optional branch; the union over
        # any subset of bodies covers every fall-through combination
        for case in stmt.cases:
            if case.test is not None:
                self.lower_expr(case.test)
            arm: list[Instr] = []
            self._block_stack.append(arm)
            try:
                for s in case.body:
                    self.lower_statement(s)
            finally:
                self._block_stack.pop()
            self.emit(Branch(self.next_iid(), self.line(case), [arm, []]))

    def _lower_class(self, cls: ast.ClassExpression, binding: str | None) -> Operand:
        reads = frozenset()
        if cls.superclass is not None:
            reads = operand_names(self.lower_expr(cls.superclass))
        holder = self.opaque_operand(cls, frozenset(), label="class")
        for method in cls.methods:
            if method.key is None or method.value is None:
                continue
            fname = f"{cls.name}.{method.key}" if cls.name else method.key
            fid = self.new_function(fname, method.value.params, method.value.body,
                                    method.value.expression_body, method.value)
            fref = self.to_temp(FuncRef(fid), method)
            self.emit(PropWrite(self.next_iid(), self.line(method), holder, method.key, fref))
        result = self.opaque_operand(cls, reads, label="class")
        if binding:
            self.assign(binding, _operand_expr(result), cls)
        return result

    # --- expressions ---

    def lower_expr(self, node: ast.Node) -> Operand:
        """Lower to an operand, emitting flattening instructions as needed."""
        return self.to_temp(self.lower_expr_rhs(node), node)

    def lower_expr_rhs(self, node: ast.Node, target_hint: str | None = None) -> Expr:
        """Lower to an expression suitable as an Assign right-hand side."""
        if isinstance(node, ast.Literal):
            if node.kind == "regex":
                return OpaqueExpr(reads=frozenset(), label="regex")
            return Lit(node.value)
        if isinstance(node, ast.Identifier):
            if node.name == "undefined":
                return Lit(UNDEFINED)
            return VarRead(node.name)
        if isinstance(node, ast.ThisExpression):
            return OpaqueExpr(reads=frozenset(), label="this")
        if isinstance(node, ast.SuperExpression):
            return OpaqueExpr(reads=frozenset(), label="super")
        if isinstance(node, ast.BinaryExpression):
            if node.operator == "+":
                left = self.lower_expr(node.left)
                right = self.lower_expr(node.right)
                return Concat(left, right)
            left = self.lower_expr(node.left)
            right = self.lower_expr(node.right)
            return OpaqueExpr(reads=operand_names(left) | operand_names(right),
                              label=node.operator)
        if isinstance(node, ast.TemplateLiteral):
            parts: list[Operand] = []
            for i, quasi in enumerate(node.quasis):
                if quasi:
                    parts.append(Lit(quasi))
                if i < len(node.expressions):
                    parts.append(self.lower_expr(node.expressions[i]))
            if not parts:
                return Lit("")
            return TemplateLit(tuple(parts))
        if isinstance(node, ast.AssignmentExpression):
            return self._lower_assignment(node)
        if isinstance(node, ast.ConditionalExpression):
            self.lower_expr(node.test)
            temp = self.fresh_temp()
            arms = []
            for branch_node in (node.consequent, node.alternate):
                arm: list[Instr] = []
                self._block_stack.append(arm)
                try:
                    op = self.lower_expr(branch_node)
                    self.assign(temp, _operand_expr(op), branch_node)
                finally:
                    self._block_stack.pop()
                arms.append(arm)
            self.emit(Branch(self.next_iid(), self.line(node), arms))
            return VarRead(temp)
        if isinstance(node, ast.LogicalExpression):
            left = self.lower_expr(node.left)
            temp = self.fresh_temp()
            left_arm: list[Instr] = []
            self._block_stack.append(left_arm)
            try:
                self.assign(temp, _operand_expr(left), node.left)
            finally:
                self._block_stack.pop()
            right_arm: list[Instr] = []
            self._block_stack.append(right_arm)
            try:
                right = self.lower_expr(node.right)
                self.assign(temp, _operand_expr(right), node.right)
            finally:
                self._block_stack.pop()
            self.emit(Branch(self.next_iid(), self.line(node), [left_arm, right_arm]))
            return VarRead(temp)
        if isinstance(node, ast.CallExpression):
            return self._lower_call(node, target_hint)
        if isinstance(node, ast.NewExpression):
            reads = frozenset()
            if isinstance(node.callee, ast.Identifier):
                reads |= frozenset((node.callee.name,))
            else:
                reads |= operand_names(self.lower_expr(node.callee))
            for arg in node.arguments:
                inner = arg.argument if isinstance(arg, ast.SpreadElement) else arg
                reads |= operand_names(self.lower_expr(inner))
            return OpaqueExpr(reads=reads, label="new")
        if isinstance(node, ast.MemberExpression):
            return self._lower_member_read(node)
        if isinstance(node, ast.ObjectExpression):
            return self._lower_object_literal(node)
        if isinstance(node, ast.ArrayExpression):
            return self._lower_array_literal(node)
        if isinstance(node, ast.FunctionExpression):
            fid = self.new_function(node.name, node.params, node.body,
                                    node.expression_body, node,
                                    self_name=node.name if not node.is_arrow else None)
            return FuncRef(fid)
        if isinstance(node, ast.ClassExpression):
            return _operand_expr(self._lower_class(node, binding=None))
        if isinstance(node, ast.SequenceExpression):
            op: Expr = Lit(UNDEFINED)
            for i, sub in enumerate(node.expressions):
                if i + 1 == len(node.expressions):
                    op = self.lower_expr_rhs(sub)
                else:
                    self.lower_expr(sub)
            return op
        if isinstance(node, ast.UnaryExpression):
            if node.operator in ("-", "+") and isinstance(node.argument, ast.Literal) \
                    and node.argument.kind == "number":
                value = node.argument.value
                return Lit(-value if node.operator == "-" else value)
            if node.operator == "void":
                self.lower_expr(node.argument)
                return Lit(UNDEFINED)
            arg = self.lower_expr(node.argument)
            return OpaqueExpr(reads=operand_names(arg), label=node.operator)
        if isinstance(node, ast.UpdateExpression):
            if isinstance(node.argument, ast.Identifier):
                name = node.argument.name
                self.assign(name, OpaqueExpr(reads=frozenset((name,)), label="update"), node)
                return VarRead(name)
            arg = self.lower_expr(node.argument)
            return OpaqueExpr(reads=operand_names(arg), label="update")
        if isinstance(node, (ast.AwaitExpression, ast.YieldExpression)):
            reads = frozenset()
            if node.argument is not None:
                reads = operand_names(self.lower_expr(node.argument))
            return OpaqueExpr(reads=reads, label="await")
        if isinstance(node, ast.TaggedTemplate):
            reads = operand_names(self.lower_expr(node.tag))
            for sub in node.quasi.expressions:
                reads |= operand_names(self.lower_expr(sub))
            return OpaqueExpr(reads=reads, label="tagged-template")
        if isinstance(node, ast.SpreadElement):
            reads = operand_names(self.lower_expr(node.argument))
            return OpaqueExpr(reads=reads, label="spread")
        return OpaqueExpr(reads=frozenset(), label=type(node).__name__)

    def _lower_assignment(self, node: ast.AssignmentExpression) -> Expr:
        target = node.target
        if isinstance(target, ast.Identifier):
            if node.operator == "=":
                expr = self.lower_expr_rhs(node.value, target_hint=target.name)
                self.assign(target.name, expr, node)
                return VarRead(target.name)
            if node.operator == "+=":
                value = self.lower_expr(node.value)
                self.assign(target.name, Concat(VarRead(target.name), value), node)
                return VarRead(target.name)
            if node.operator in ("&&=", "||=", "??="):
                arm: list[Instr] = []
                self._block_stack.append(arm)
                try:
                    value = self.lower_expr(node.value)
                    self.assign(target.name, _operand_expr(value), node)
                finally:
                    self._block_stack.pop()
                self.emit(Branch(self.next_iid(), self.line(node), [arm, []]))
                return VarRead(target.name)
            value = self.lower_expr(node.value)
            self.assign(target.name, OpaqueExpr(
                reads=operand_names(value) | frozenset((target.name,)),
                label=node.operator), node)
            return VarRead(target.name)
        if isinstance(target, ast.MemberExpression):
            base = self.lower_expr(target.object)
            value = self.lower_expr(node.value)
            key = _static_key(target)
            if key is not None:
                if node.operator != "=":
                    value = self.opaque_operand(node, operand_names(base) | operand_names(value),
                                                label=node.operator)
                self.emit(PropWrite(self.next_iid(), self.line(node), base, key, value))
            else:
                key_reads = operand_names(self.lower_expr(target.property)) \
                    if isinstance(target.property, ast.Node) else frozenset()
                self.emit(Opaque(self.next_iid(), self.line(node),
                                 operand_names(base) | operand_names(value) | key_reads,
                                 frozenset()))
            return _operand_expr(value)
        # destructuring assignment expression
        value = self.lower_expr(node.value)
        for name in _assignment_pattern_names(target):
            self.assign(name, OpaqueExpr(reads=operand_names(value), label="destructure"), node)
        return _operand_expr(value)

    def _lower_call(self, node: ast.CallExpression, target_hint: str | None) -> Expr:
        callee = node.callee
        args: list[Operand] = []

        def lower_args() -> None:
            for arg in node.arguments:
                if isinstance(arg, ast.SpreadElement):
                    reads = operand_names(self.lower_expr(arg.argument))
                    args.append(self.opaque_operand(arg, reads, label="spread"))
                else:
                    args.append(self.lower_expr(arg))

        if isinstance(callee, ast.Identifier):
            lower_args()
            if callee.name == "eval":
                reads = frozenset()
                for a in args:
                    reads |= operand_names(a)
                writes = frozenset(n for n in self.fn.declared if not n.startswith("%"))
                writes |= frozenset(self.fn.params)
                self.emit(Opaque(self.next_iid(), self.line(node), reads, writes))
                return OpaqueExpr(reads=reads, label="eval")
            return Call(CalleeVar(callee.name), tuple(args))
        if isinstance(callee, ast.MemberExpression):
            key = _static_key(callee)
            base = self.lower_expr(callee.object)
            lower_args()
            if key is not None:
                return Call(CalleeProp(base, key), tuple(args))
            key_reads = operand_names(self.lower_expr(callee.property)) \
                if isinstance(callee.property, ast.Node) else frozenset()
            reads = operand_names(base) | key_reads
            for a in args:
                reads |= operand_names(a)
            return OpaqueExpr(reads=reads, label="computed-call")
        # call of an arbitrary expression (IIFE and friends)
        fn_op = self.lower_expr(callee)
        lower_args()
        if isinstance(fn_op, VarRead):
            return Call(CalleeVar(fn_op.name), tuple(args))
        reads = frozenset()
        for a in args:
            reads |= operand_names(a)
        return OpaqueExpr(reads=reads, label="dynamic-call")

    def _lower_member_read(self, node: ast.MemberExpression) -> Expr:
        key = _static_key(node)
        base = self.lower_expr(node.object)
        if key is not None:
            return PropRead(base, key)
        key_reads = operand_names(self.lower_expr(node.property)) \
            if isinstance(node.property, ast.Node) else frozenset()
        return OpaqueExpr(reads=operand_names(base) | key_reads, label="computed-read")

    def _lower_object_literal(self, node: ast.ObjectExpression) -> Expr:
        entries: list[tuple[str, Operand]] = []
        opaque_reads: frozenset[str] = frozenset()
        literal = True
        for prop in node.properties:
            if prop.kind == "spread" or prop.computed or prop.key is None:
                literal = False
                if prop.value is not None:
                    opaque_reads |= operand_names(self.lower_expr(prop.value))
                continue
            if prop.kind in ("get", "set"):
                literal = False
                if isinstance(prop.value, ast.FunctionExpression):
                    self.new_function(prop.key, prop.value.params, prop.value.body,
                                      prop.value.expression_body, prop.value)
                continue
            value = self.lower_expr(prop.value)
            entries.append((prop.key, value))
            opaque_reads |= operand_names(value)
        if literal:
            return ObjectLit(tuple(entries))
        # still register function-valued entries for field-based resolution
        holder = self.opaque_operand(node, frozenset(), label="object")
        for key, value in entries:
            self.emit(PropWrite(self.next_iid(), self.line(node), holder, key, value))
        return OpaqueExpr(reads=opaque_reads, label="object")

    def _lower_array_literal(self, node: ast.ArrayExpression) -> Expr:
        items: list[Operand] = []
        reads: frozenset[str] = frozenset()
        literal = True
        for element in node.elements:
            if element is None:
                items.append(Lit(UNDEFINED))
                continue
            if isinstance(element, ast.SpreadElement):
                literal = False
                reads |= operand_names(self.lower_expr(element.argument))
                continue
            op = self.lower_expr(element)
            items.append(op)
            reads |= operand_names(op)
        if literal:
            return ArrayLit(tuple(items))
        return OpaqueExpr(reads=reads, label="array")


def _operand_expr(op: Operand) -> Expr:
    return op


def _static_key(member: ast.MemberExpression) -> str | None:
    """Property name when statically known, else None."""
    if not member.computed:
        return member.property if isinstance(member.property, str) else None
    prop = member.property
    if isinstance(prop, ast.Literal):
        if prop.kind == "string":
            return prop.value
        if prop.kind == "number":
            value = prop.value
            if value == int(value) and abs(value) < 2 ** 53:
                return str(int(value))
            return repr(value)
    return None


def _pattern_names(target: ast.Node | None) -> list[str]:
    if target is None:
        return []
    if isinstance(target, ast.Identifier):
        return [target.name]
    if isinstance(target, (ast.ObjectPattern, ast.ArrayPattern)):
        return list(target.names)
    if isinstance(target, ast.AssignmentPattern):
        return _pattern_names(target.target)
    if isinstance(target, ast.RestElement):
        return [target.name] if target.name else []
    return []


def _assignment_pattern_names(target: ast.Node) -> list[str]:
    names: list[str] = []
    if isinstance(target, ast.ObjectExpression):
        for prop in target.properties:
            if isinstance(prop.value, ast.Identifier):
                names.append(prop.value.name)
    elif isinstance(target, ast.ArrayExpression):
        for element in target.elements:
            if isinstance(element, ast.Identifier):
                names.append(element.name)
    return names


def _collect_declared(stmts: list[ast.Node], declared: set[str]) -> None:
    """Hoist declarations into the enclosing function scope.

    let/const are approximated as function-scoped, which is conservative
    for the value analysis.
    """

    def visit(node: ast.Node | None) -> None:
        if node is None:
            return
        if isinstance(node, ast.VariableDeclaration):
            for d in node.declarations:
                declared.update(_pattern_names(d.target))
        elif isinstance(node, ast.FunctionDeclaration):
            if node.function.name:
                declared.add(node.function.name)
            return  # do not descend into nested functions
        elif isinstance(node, ast.ClassDeclaration):
            if node.cls.name:
                declared.add(node.cls.name)
            return
        elif isinstance(node, (ast.FunctionExpression, ast.ClassExpression)):
            return
        elif isinstance(node, ast.ImportDeclaration):
            declared.update(node.names)
        elif isinstance(node, ast.BlockStatement):
            for s in node.body:
                visit(s)
        elif isinstance(node, ast.IfStatement):
            visit(node.consequent)
            visit(node.alternate)
        elif isinstance(node, ast.ForStatement):
            visit(node.init)
            visit(node.body)
        elif isinstance(node, ast.ForInStatement):
            visit(node.left)
            visit(node.body)
        elif isinstance(node, (ast.WhileStatement, ast.DoWhileStatement)):
            visit(node.body)
        elif isinstance(node, ast.TryStatement):
            visit(node.block)
            if node.handler_param is not None:
                declared.update(_pattern_names(node.handler_param))
            visit(node.handler)
            visit(node.finalizer)
        elif isinstance(node, ast.SwitchStatement):
            for case in node.cases:
                for s in case.body:
                    visit(s)
        elif isinstance(node, ast.LabeledStatement):
            visit(node.body)
        elif isinstance(node, ast.ExportDeclaration):
            visit(node.declaration)

    for stmt in stmts:
        visit(stmt)
