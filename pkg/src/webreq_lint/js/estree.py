"""AST node types produced by the parser.

Node naming loosely follows the ESTree convention. Every node records the
source offset of its first token so line numbers can be recovered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass
class Node:
    start: int = field(default=0, kw_only=True)


# --- expressions ---------------------------------------------------------


@dataclass
class Identifier(Node):
    name: str


@dataclass
class Literal(Node):
    value: object  # str, float, bool, None, or Undefined sentinel
    kind: str = "string"  # string number boolean null regex undefined


@dataclass
class TemplateLiteral(Node):
    quasis: list[str] = field(default_factory=list)
    expressions: list[Node] = field(default_factory=list)


@dataclass
class TaggedTemplate(Node):
    tag: Node = None
    quasi: TemplateLiteral = None


@dataclass
class ArrayExpression(Node):
    elements: list[Optional[Node]] = field(default_factory=list)
    has_spread: bool = False


@dataclass
class Property(Node):
    key: str | None = None  # None for computed keys
    value: Node = None
    kind: str = "init"  # init get set spread
    computed: bool = False


@dataclass
class ObjectExpression(Node):
    properties: list[Property] = field(default_factory=list)


@dataclass
class FunctionExpression(Node):
    name: str | None = None
    params: list[Node] = field(default_factory=list)  # Identifier or pattern nodes
    body: list[Node] = field(default_factory=list)
    is_arrow: bool = False
    expression_body: Node | None = None  # arrow with expression body


@dataclass
class ClassExpression(Node):
    name: str | None = None
    superclass: Node | None = None
    methods: list["ClassMethod"] = field(default_factory=list)


@dataclass
class ClassMethod(Node):
    key: str | None = None
    value: FunctionExpression = None
    kind: str = "method"  # method get set constructor
    static: bool = False
    computed: bool = False


@dataclass
class UnaryExpression(Node):
    operator: str = ""
    argument: Node = None


@dataclass
class UpdateExpression(Node):
    operator: str = ""
    argument: Node = None
    prefix: bool = False


@dataclass
class BinaryExpression(Node):
    operator: str = ""
    left: Node = None
    right: Node = None


@dataclass
class LogicalExpression(Node):
    operator: str = ""
    left: Node = None
    right: Node = None


@dataclass
class AssignmentExpression(Node):
    operator: str = "="
    target: Node = None
    value: Node = None


@dataclass
class ConditionalExpression(Node):
    test: Node = None
    consequent: Node = None
    alternate: Node = None


@dataclass
class CallExpression(Node):
    callee: Node = None
    arguments: list[Node] = field(default_factory=list)
    optional: bool = False
    has_spread: bool = False


@dataclass
class NewExpression(Node):
    callee: Node = None
    arguments: list[Node] = field(default_factory=list)


@dataclass
class MemberExpression(Node):
    object: Node = None
    property: Union[str, Node] = ""  # str when static, Node when computed
    computed: bool = False
    optional: bool = False


@dataclass
class SequenceExpression(Node):
    expressions: list[Node] = field(default_factory=list)


@dataclass
class SpreadElement(Node):
    argument: Node = None


@dataclass
class ThisExpression(Node):
    pass


@dataclass
class SuperExpression(Node):
    pass


@dataclass
class YieldExpression(Node):
    argument: Node | None = None
    delegate: bool = False


@dataclass
class AwaitExpression(Node):
    argument: Node = None


# --- patterns (destructuring) --------------------------------------------


@dataclass
class ObjectPattern(Node):
    names: list[str] = field(default_factory=list)  # bound identifier names


@dataclass
class ArrayPattern(Node):
    names: list[str] = field(default_factory=list)


@dataclass
class RestElement(Node):
    name: str = ""


@dataclass
class AssignmentPattern(Node):
    target: Node = None  # Identifier or pattern
    default: Node = None


# --- statements -----------------------------------------------------------


@dataclass
class Program(Node):
    body: list[Node] = field(default_factory=list)


@dataclass
class ExpressionStatement(Node):
    expression: Node = None


@dataclass
class BlockStatement(Node):
    body: list[Node] = field(default_factory=list)


@dataclass
class VariableDeclarator(Node):
    target: Node = None  # Identifier or pattern
    init: Node | None = None


@dataclass
class VariableDeclaration(Node):
    kind: str = "var"
    declarations: list[VariableDeclarator] = field(default_factory=list)


@dataclass
class FunctionDeclaration(Node):
    function: FunctionExpression = None


@dataclass
class ClassDeclaration(Node):
    cls: ClassExpression = None


@dataclass
class IfStatement(Node):
    test: Node = None
    consequent: Node = None
    alternate: Node | None = None


@dataclass
class ForStatement(Node):
    init: Node | None = None
    test: Node | None = None
    update: Node | None = None
    body: Node = None


@dataclass
class ForInStatement(Node):
    left: Node = None
    right: Node = None
    body: Node = None
    of: bool = False


@dataclass
class WhileStatement(Node):
    test: Node = None
    body: Node = None


@dataclass
class DoWhileStatement(Node):
    body: Node = None
    test: Node = None


@dataclass
class ReturnStatement(Node):
    argument: Node | None = None


@dataclass
class BreakStatement(Node):
    label: str | None = None


@dataclass
class ContinueStatement(Node):
    label: str | None = None


@dataclass
class ThrowStatement(Node):
    argument: Node = None


@dataclass
class TryStatement(Node):
    block: BlockStatement = None
    handler_param: Node | None = None
    handler: BlockStatement | None = None
    finalizer: BlockStatement | None = None


@dataclass
class SwitchCase(Node):
    test: Node | None = None  # None for default
    body: list[Node] = field(default_factory=list)


@dataclass
class SwitchStatement(Node):
    discriminant: Node = None
    cases: list[SwitchCase] = field(default_factory=list)


@dataclass
class LabeledStatement(Node):
    label: str = ""
    body: Node = None


@dataclass
class EmptyStatement(Node):
    pass


@dataclass
class DebuggerStatement(Node):
    pass


@dataclass
class ImportDeclaration(Node):
    names: list[str] = field(default_factory=list)
    source: str = ""


@dataclass
class ExportDeclaration(Node):
    declaration: Node | None = None


class Undefined:
    """Sentinel for the JS `undefined` value inside Literal nodes."""

    _instance: "Undefined | None" = None

    def __new__(cls) -> "Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"


UNDEFINED = Undefined()
