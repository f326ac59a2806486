"""Request-site location, backward slicing, and value extraction.

The evaluator recovers every dataflow that can reach a request argument,
taking the union of values over all reaching definitions, all branches,
and all callers. String values that cannot be determined statically become
symbolic segments named after the variable or parameter they entered
through (falling back to `identifier#line` when names collide).

Modeled string operators: concatenation and encodeURI work on partially
symbolic values; substring, replace, and indexOf are evaluated exactly
when the receiver and every argument are fully literal. Anything else
produces a fresh symbolic value.
"""

from __future__ import annotations

import urllib.parse
from dataclasses import dataclass, field

from webreq_lint.callgraph import (
    CallGraph, CallSite, DefKey, InstrDef, ParamDef, build_call_graph,
)
from webreq_lint.js.ir import (
    ArrayLit, Assign, Call, CalleeProp, CalleeVar, Concat, FuncRef, Instr,
    Lit, ObjectLit, Opaque, OpaqueExpr, PropRead, Return, ScriptIR,
    TemplateLit, VarRead, lower_to_ir, walk_instrs,
)
from webreq_lint.js.parser import parse_source
from webreq_lint.js.source import SourceFile
from webreq_lint.values import (
    DArr, DBool, DFunc, DNull, DNum, DObj, DStr, DSym, DataValue, LitSeg,
    StringValue, literal_to_data, to_string_value,
)

VALID_METHODS = ("GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS")

DEFAULT_MAX_VALUE_SET = 64

# characters encodeURI leaves unescaped
_ENCODE_URI_SAFE = ";,/?:@&=+$-_.!~*'()#"


@dataclass(frozen=True)
class RequestSite:
    file: str
    line: int
    kind: str  # ajax | get | post
    receiver: str  # $ | jQuery
    iid: int = field(compare=False)
    fid: int = field(compare=False)

    @property
    def call_name(self) -> str:
        return f"{self.receiver}.{self.kind}"


@dataclass
class RequestDescriptor:
    site: RequestSite
    urls: tuple[StringValue, ...]
    methods: tuple[str, ...]
    data: tuple[DataValue, ...]
    unresolved: bool = False

    @property
    def url_set(self) -> set[str]:
        return {u.render() for u in self.urls}


def locate_request_sites(graph: CallGraph) -> list[RequestSite]:
    """Find calls to $.ajax / $.get / $.post (receiver spelled `$` or `jQuery`)."""
    sites: list[RequestSite] = []
    for iid in sorted(graph.call_sites):
        cs = graph.call_sites[iid]
        callee = cs.call.callee
        if not isinstance(callee, CalleeProp):
            continue
        if callee.prop not in ("ajax", "get", "post"):
            continue
        base = callee.base
        if isinstance(base, VarRead) and base.name in ("$", "jQuery"):
            sites.append(RequestSite(
                file=graph.ir.path, line=cs.line, kind=callee.prop,
                receiver=base.name, iid=iid, fid=cs.fid))
    return sites


# --- backward slicing ---------------------------------------------------------


@dataclass
class Slice:
    """Inter-procedural backward slice from one request site.

    Behaves as the set of instructions that may affect the site's
    arguments; also carries the context the value evaluator needs.
    """

    site: RequestSite
    graph: CallGraph
    instructions: set[Instr] = field(default_factory=set)
    _evaluator: "_Evaluator | None" = field(default=None, repr=False)

    def __contains__(self, instr: Instr) -> bool:
        return instr in self.instructions

    def __iter__(self):
        return iter(self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def evaluator(self, max_values: int = DEFAULT_MAX_VALUE_SET) -> "_Evaluator":
        if self._evaluator is None:
            self._evaluator = _Evaluator(self.graph, max_values)
        return self._evaluator


def backward_slice(site: RequestSite, graph: CallGraph) -> Slice:
    """All instructions that may affect the arguments of the request call.

    Follows data dependencies through assignments, parameters, and returns;
    control dependencies are ignored (all paths are assumed feasible).
    """
    ir = graph.ir
    sl = Slice(site=site, graph=graph)
    call_instr = ir.instr(site.iid)
    sl.instructions.add(call_instr)
    cs = graph.call_sites[site.iid]

    seen_uses: set[tuple[int, str]] = set()
    seen_defs: set[DefKey] = set()
    entered: set[int] = set()
    worklist: list[tuple[int, str]] = []

    def seed_operand(iid: int, op) -> None:
        if isinstance(op, VarRead) and (iid, op.name) not in seen_uses:
            seen_uses.add((iid, op.name))
            worklist.append((iid, op.name))

    for arg in cs.call.args:
        seed_operand(site.iid, arg)

    def enter_instr(instr: Instr) -> None:
        if instr.iid in entered:
            return
        entered.add(instr.iid)
        sl.instructions.add(instr)
        reads: frozenset[str]
        if isinstance(instr, Assign):
            from webreq_lint.js.ir import expr_reads
            reads = expr_reads(instr.expr)
            if isinstance(instr.expr, Call):
                for fid in sorted(graph.edges.get(instr.iid, frozenset())):
                    for ret in _returns_of(ir, fid):
                        enter_instr(ret)
        elif isinstance(instr, Opaque):
            reads = instr.reads
        elif isinstance(instr, Return):
            reads = frozenset((instr.value.name,)) if isinstance(instr.value, VarRead) else frozenset()
        else:
            reads = frozenset()
        for name in reads:
            seed_operand(instr.iid, VarRead(name))

    def process_def(def_key: DefKey) -> None:
        if def_key in seen_defs:
            return
        seen_defs.add(def_key)
        if isinstance(def_key, InstrDef):
            enter_instr(ir.instr(def_key.iid))
        else:
            fn = ir.functions[def_key.fid]
            try:
                index = fn.params.index(def_key.name)
            except ValueError:
                return
            for caller_iid in graph.callers_of.get(def_key.fid, ()):
                caller_cs = graph.call_sites[caller_iid]
                caller_instr = ir.instr(caller_iid)
                if caller_instr not in sl.instructions:
                    sl.instructions.add(caller_instr)
                if index < len(caller_cs.call.args):
                    seed_operand(caller_iid, caller_cs.call.args[index])

    while worklist:
        iid, name = worklist.pop()
        for def_key in _sorted_defs(graph.use_defs(iid, name)):
            process_def(def_key)

    return sl


def _returns_of(ir: ScriptIR, fid: int) -> list[Return]:
    return [i for i in walk_instrs(ir.functions[fid].body) if isinstance(i, Return)]


def _sorted_defs(defs: frozenset[DefKey]) -> list[DefKey]:
    return sorted(defs, key=lambda d: (0, d.iid, "") if isinstance(d, InstrDef)
                  else (1, d.fid, d.name))


# --- value evaluation -----------------------------------------------------------


class _Evaluator:
    """Evaluates IR operands to sets of DataValues with a size cap."""

    def __init__(self, graph: CallGraph, max_values: int = DEFAULT_MAX_VALUE_SET):
        self.graph = graph
        self.ir = graph.ir
        self.max_values = max_values
        self.overflowed = False
        self._memo: dict[object, tuple[DataValue, ...]] = {}
        self._in_progress: set[object] = set()
        self._sym_owner: dict[str, object] = {}

    # symbolic values are named by originating identifier; a second origin
    # wanting the same identifier gets `identifier#line`
    def make_sym(self, preferred: str, origin: object, line: int) -> DSym:
        name = preferred or "expr"
        owner = self._sym_owner.get(name)
        if owner is not None and owner != origin:
            name = f"{name}#{line}"
        self._sym_owner.setdefault(name, origin)
        return DSym(name)

    def _cap(self, values: list[DataValue], hint: str, origin: object, line: int) -> tuple[DataValue, ...]:
        unique = tuple(dict.fromkeys(values))
        if len(unique) > self.max_values:
            self.overflowed = True
            return (self.make_sym(hint, origin, line),)
        return unique

    # --- entry points ---

    def eval_operand(self, iid: int, op, hint: str = "") -> tuple[DataValue, ...]:
        if isinstance(op, Lit):
            return (literal_to_data(op.value),)
        assert isinstance(op, VarRead)
        return self.eval_var(iid, op.name)

    def eval_var(self, iid: int, name: str) -> tuple[DataValue, ...]:
        key = ("use", iid, name)
        if key in self._memo:
            return self._memo[key]
        line = self.ir.instr(iid).line
        defs = _sorted_defs(self.graph.use_defs(iid, name))
        if not defs:
            fid = self.ir.function_of(iid).fid
            scope = self.graph.resolve_scope(fid, name)
            result: tuple[DataValue, ...] = (self.make_sym(name, ("var", scope, name), line),)
            self._memo[key] = result
            return result
        values: list[DataValue] = []
        for def_key in defs:
            values.extend(self.eval_def(def_key, name, line))
        result = self._cap(values, name, ("use", iid, name), line)
        self._memo[key] = result
        return result

    def eval_def(self, def_key: DefKey, name: str, line: int) -> tuple[DataValue, ...]:
        if isinstance(def_key, ParamDef):
            return self._eval_param(def_key)
        instr = self.ir.instr(def_key.iid)
        if isinstance(instr, Opaque):
            return (self.make_sym(name, ("opaque", def_key.iid, name), instr.line),)
        assert isinstance(instr, Assign)
        key = ("instr", def_key.iid)
        if key in self._memo:
            return self._memo[key]
        if key in self._in_progress:  # loop-carried or recursive value
            return (self.make_sym(instr.target.lstrip("%") or name,
                                  ("cycle",) + key, instr.line),)
        self._in_progress.add(key)
        try:
            result = self._cap(list(self.eval_expr(instr)), instr.target,
                               key, instr.line)
        finally:
            self._in_progress.discard(key)
        self._memo[key] = result
        return result

    def _eval_param(self, param: ParamDef) -> tuple[DataValue, ...]:
        key = ("param", param.fid, param.name)
        if key in self._memo:
            return self._memo[key]
        fn = self.ir.functions[param.fid]
        if key in self._in_progress:
            return (self.make_sym(param.name, key, fn.line),)
        callers = self.graph.callers_of.get(param.fid, ())
        if not callers:
            result: tuple[DataValue, ...] = (self.make_sym(param.name, key, fn.line),)
            self._memo[key] = result
            return result
        index = fn.params.index(param.name)
        self._in_progress.add(key)
        try:
            values: list[DataValue] = []
            for caller_iid in callers:
                call = self.graph.call_sites[caller_iid].call
                if index < len(call.args):
                    values.extend(self.eval_operand(caller_iid, call.args[index]))
                else:
                    values.append(self.make_sym(param.name, key, fn.line))
            result = self._cap(values, param.name, key, fn.line)
        finally:
            self._in_progress.discard(key)
        self._memo[key] = result
        return result

    # --- expression dispatch ---

    def eval_expr(self, instr: Assign) -> tuple[DataValue, ...]:
        expr = instr.expr
        iid = instr.iid
        line = instr.line
        hint = instr.target if not instr.target.startswith("%") else ""
        if isinstance(expr, Lit):
            return (literal_to_data(expr.value),)
        if isinstance(expr, VarRead):
            return self.eval_var(iid, expr.name)
        if isinstance(expr, FuncRef):
            fn = self.ir.functions[expr.fid]
            return (DFunc(expr.fid, fn.name or ""),)
        if isinstance(expr, Concat):
            lefts = self.eval_operand(iid, expr.left)
            rights = self.eval_operand(iid, expr.right)
            values = [_js_add(lv, rv) for lv in lefts for rv in rights]
            return self._cap(values, hint or "concat", ("instr", iid), line)
        if isinstance(expr, TemplateLit):
            combos: list[StringValue] = [StringValue.literal("")]
            for part in expr.parts:
                part_values = self.eval_operand(iid, part)
                combos = [acc.concat(to_string_value(pv)) for acc in combos for pv in part_values]
                if len(combos) > self.max_values:
                    self.overflowed = True
                    return (self.make_sym(hint or "template", ("instr", iid), line),)
            return self._cap([DStr(c) for c in combos], hint or "template", ("instr", iid), line)
        if isinstance(expr, ObjectLit):
            combos: list[tuple[tuple[str, DataValue], ...]] = [()]
            for key, op in expr.entries:
                entry_values = self.eval_operand(iid, op)
                combos = [acc + ((key, ev),) for acc in combos for ev in entry_values]
                if len(combos) > self.max_values:
                    self.overflowed = True
                    return (self.make_sym(hint or "object", ("instr", iid), line),)
            return self._cap([DObj(c) for c in combos], hint or "object", ("instr", iid), line)
        if isinstance(expr, ArrayLit):
            arr_combos: list[tuple[DataValue, ...]] = [()]
            for op in expr.items:
                item_values = self.eval_operand(iid, op)
                arr_combos = [acc + (iv,) for acc in arr_combos for iv in item_values]
                if len(arr_combos) > self.max_values:
                    self.overflowed = True
                    return (self.make_sym(hint or "array", ("instr", iid), line),)
            return self._cap([DArr(c) for c in arr_combos], hint or "array", ("instr", iid), line)
        if isinstance(expr, PropRead):
            return self._eval_prop_read(instr, expr)
        if isinstance(expr, Call):
            return self._eval_call(instr, expr)
        if isinstance(expr, OpaqueExpr):
            return (self.make_sym(hint or expr.label, ("instr", iid), line),)
        raise TypeError(f"unexpected expr {expr!r}")

    def _eval_prop_read(self, instr: Assign, expr: PropRead) -> tuple[DataValue, ...]:
        bases = self.eval_operand(instr.iid, expr.base)
        hint = instr.target if not instr.target.startswith("%") else expr.prop
        values: list[DataValue] = []
        for base in bases:
            if isinstance(base, DObj):
                found = base.get(expr.prop)
                if found is not None:
                    values.append(found)
                    continue
            values.append(self.make_sym(hint, ("prop", instr.iid, expr.prop), instr.line))
        return self._cap(values, hint, ("prop", instr.iid), instr.line)

    def _eval_call(self, instr: Assign, expr: Call) -> tuple[DataValue, ...]:
        iid = instr.iid
        line = instr.line
        hint = instr.target if not instr.target.startswith("%") else ""
        targets = sorted(self.graph.edges.get(iid, frozenset()))
        if targets:
            values: list[DataValue] = []
            for fid in targets:
                returns = _returns_of(self.ir, fid)
                if not returns:
                    fn = self.ir.functions[fid]
                    values.append(self.make_sym(hint or fn.display_name,
                                                ("result", fid), line))
                    continue
                for ret in returns:
                    if ret.value is None:
                        values.append(self.make_sym(hint or "result", ("result", fid, ret.iid), line))
                    else:
                        values.extend(self.eval_operand(ret.iid, ret.value))
            return self._cap(values, hint or "call", ("call", iid), line)
        # external callee: model the supported string operators
        callee = expr.callee
        if isinstance(callee, CalleeVar) and callee.name == "encodeURI" and len(expr.args) == 1:
            args = self.eval_operand(iid, expr.args[0])
            return self._cap([DStr(_encode_uri(to_string_value(a))) for a in args],
                             hint or "encodeURI", ("call", iid), line)
        if isinstance(callee, CalleeProp) and callee.prop in ("substring", "replace", "indexOf"):
            return self._eval_string_method(instr, expr, callee.prop)
        name = callee.name if isinstance(callee, CalleeVar) else callee.prop
        return (self.make_sym(hint or name, ("call", iid), line),)

    def _eval_string_method(self, instr: Assign, expr: Call, method: str) -> tuple[DataValue, ...]:
        iid, line = instr.iid, instr.line
        hint = instr.target if not instr.target.startswith("%") else method
        receivers = self.eval_operand(iid, expr.callee.base)
        arg_sets = [self.eval_operand(iid, a) for a in expr.args]
        values: list[DataValue] = []
        symbolic = False
        combos: list[tuple[DataValue, ...]] = [()]
        for arg_values in arg_sets:
            combos = [acc + (av,) for acc in combos for av in arg_values]
        for recv in receivers:
            recv_str = to_string_value(recv)
            if not recv_str.is_literal or not isinstance(recv, (DStr, DNum, DBool, DNull)):
                symbolic = True
                continue
            for combo in combos:
                result = _exact_string_method(recv_str.literal_text, method, combo)
                if result is None:
                    symbolic = True
                else:
                    values.append(result)
        if symbolic or not receivers:
            values.append(self.make_sym(hint, ("strop", iid), line))
        return self._cap(values, hint, ("strop", iid), line)


def _js_add(left: DataValue, right: DataValue) -> DataValue:
    numeric = (DNum, DBool, DNull)
    if isinstance(left, numeric) and isinstance(right, numeric):
        return DNum(_as_number(left) + _as_number(right))
    return DStr(to_string_value(left).concat(to_string_value(right)))


def _as_number(value: DataValue) -> float:
    if isinstance(value, DNum):
        return value.value
    if isinstance(value, DBool):
        return 1.0 if value.value else 0.0
    return 0.0  # null


def _encode_uri(value: StringValue) -> StringValue:
    from webreq_lint.values import LitSeg, SymSeg, normalize_segments
    out = []
    for seg in value.segments:
        if isinstance(seg, LitSeg):
            out.append(LitSeg(urllib.parse.quote(seg.text, safe=_ENCODE_URI_SAFE)))
        else:
            out.append(seg)
    return StringValue(normalize_segments(out))


def _exact_string_method(receiver: str, method: str, args: tuple[DataValue, ...]) -> DataValue | None:
    """JS semantics for the constant-string operators; None when not evaluable."""
    if method == "substring":
        bounds = []
        for a in args[:2]:
            if isinstance(a, DNum):
                n = a.value
                bounds.append(0 if n != n else int(n))
            else:
                return None
        start = bounds[0] if bounds else 0
        end = bounds[1] if len(bounds) > 1 else len(receiver)
        start = min(max(start, 0), len(receiver))
        end = min(max(end, 0), len(receiver))
        if start > end:
            start, end = end, start
        return DStr(StringValue.literal(receiver[start:end]))
    if method == "replace":
        if len(args) < 2:
            return None
        pat, repl = args[0], args[1]
        if not (isinstance(pat, DStr) and pat.value.is_literal):
            return None
        if not (isinstance(repl, DStr) and repl.value.is_literal):
            return None
        repl_text = repl.value.literal_text
        if "$" in repl_text:
            return None  # substitution patterns are not modeled
        return DStr(StringValue.literal(
            receiver.replace(pat.value.literal_text, repl_text, 1)))
    if method == "indexOf":
        if not args:
            return None
        needle = args[0]
        if not (isinstance(needle, DStr) and needle.value.is_literal):
            return None
        start = 0
        if len(args) > 1:
            if not isinstance(args[1], DNum):
                return None
            start = min(max(int(args[1].value), 0), len(receiver))
        return DNum(float(receiver.find(needle.value.literal_text, start)))
    return None


# --- descriptor assembly ----------------------------------------------------------


def eval_string(expr, sl: Slice, max_values: int = DEFAULT_MAX_VALUE_SET) -> set[StringValue]:
    """Union of the possible string values of an operand at the sliced site."""
    ev = sl.evaluator(max_values)
    values = ev.eval_operand(sl.site.iid, expr)
    return {to_string_value(v) for v in values}

def eval_data(expr, sl: Slice, max_values: int = DEFAULT_MAX_VALUE_SET) -> set[DataValue]:
    """Union of the possible structured values of an operand at the sliced site."""
    ev = sl.evaluator(max_values)
    return set(ev.eval_operand(sl.site.iid, expr))


def extract_from_graph(graph: CallGraph,
                       max_values: int = DEFAULT_MAX_VALUE_SET) -> list[RequestDescriptor]:
    descriptors = []
    for site in locate_request_sites(graph):
        sl = backward_slice(site, graph)
        descriptors.append(_build_descriptor(site, sl, max_values))
    return descriptors


def extract(file: SourceFile, max_values: int = DEFAULT_MAX_VALUE_SET) -> list[RequestDescriptor]:
    """Full pipeline: parse, lower, build graph, locate, slice, evaluate.

    Raises ParseError for syntactically invalid input; callers skip such
    files with a diagnostic.
    """
    program = parse_source(file)
    ir = lower_to_ir(program, file)
    graph = build_call_graph(ir)
    return extract_from_graph(graph, max_values)


def _build_descriptor(site: RequestSite, sl: Slice, max_values: int) -> RequestDescriptor:
    ev = sl.evaluator(max_values)
    call = sl.graph.call_sites[site.iid].call
    args = call.args

    urls: list[StringValue] = []
    methods: list[str] = []
    data: list[DataValue] = []

    def add_url(value: DataValue) -> None:
        urls.append(to_string_value(value))

    def add_method(value: DataValue) -> None:
        token = _method_token(value)
        if token is not None:
            methods.append(token)

    def add_data(value: DataValue) -> None:
        if not isinstance(value, DFunc):
            data.append(value)

    def read_settings(value: DataValue, with_url: bool) -> None:
        if isinstance(value, DObj):
            if with_url:
                url_value = value.get("url")
                if url_value is not None:
                    add_url(url_value)
            for key in ("type", "method"):
                mv = value.get(key)
                if mv is not None:
                    add_method(mv)
            dv = value.get("data")
            if dv is not None:
                add_data(dv)
        elif with_url and not isinstance(value, DFunc):
            add_url(value)

    if site.kind in ("get", "post"):
        methods.append("GET" if site.kind == "get" else "POST")
        if args:
            for v in ev.eval_operand(site.iid, args[0]):
                add_url(v)
        if len(args) > 1:
            for v in ev.eval_operand(site.iid, args[1]):
                add_data(v)
    else:  # ajax
        if len(args) >= 2:
            for v in ev.eval_operand(site.iid, args[0]):
                if not isinstance(v, DFunc):
                    add_url(v)
            for v in ev.eval_operand(site.iid, args[1]):
                read_settings(v, with_url=False)
        elif len(args) == 1:
            for v in ev.eval_operand(site.iid, args[0]):
                read_settings(v, with_url=True)

    if not urls:
        urls.append(StringValue.symbolic(f"url#{site.line}"))

    unresolved = ev.overflowed or all(
        not any(isinstance(seg, LitSeg) for seg in u.segments) for u in urls)
    return RequestDescriptor(
        site=site,
        urls=tuple(dict.fromkeys(urls)),
        methods=tuple(dict.fromkeys(methods)),
        data=tuple(dict.fromkeys(data)),
        unresolved=unresolved,
    )


def _method_token(value: DataValue) -> str | None:
    """Upper-case HTTP method token, or a `{name}` marker for symbolic values."""
    if isinstance(value, DStr) and value.value.is_literal:
        token = value.value.literal_text.strip().upper()
        if token in VALID_METHODS:
            return token
        return "{" + value.value.literal_text + "}"
    rendered = to_string_value(value).render()
    if rendered.startswith("{") and rendered.endswith("}"):
        return rendered
    return "{" + rendered + "}"
