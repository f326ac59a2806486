"""Approximate field-based call graph over a single file's IR.

Every function is an entry point: handlers may be registered from scripts
outside the analysis scope, so no function is assumed dead. Calls through
a property resolve to every function ever stored under that property name
anywhere in the file (one abstraction per property name, not per object).

Alongside call edges the graph carries the string dataflow facts used by
request extraction: for each instruction and each local name it reads,
the set of definitions reaching that read. Reads of names declared in an
enclosing function are resolved flow-insensitively (the closure may run
at any time); reads of locals are flow-sensitive with branch alternatives
unioned, matching a path-insensitive analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from webreq_lint.js.ir import (
    ArrayLit, Assign, Branch, Call, CalleeProp, CalleeVar, Concat, FuncRef,
    IrFunction, Lit, Loop, ObjectLit, Opaque, OpaqueExpr, PropRead, PropWrite,
    Return, ScriptIR, TemplateLit, VarRead, expr_reads, walk_instrs,
)

# --- definition keys ---------------------------------------------------------


@dataclass(frozen=True)
class InstrDef:
    """A definition by an Assign or Opaque instruction."""

    iid: int


@dataclass(frozen=True)
class ParamDef:
    fid: int
    name: str


DefKey = InstrDef | ParamDef


@dataclass(frozen=True)
class CallSite:
    iid: int
    line: int
    fid: int
    call: Call
    target: str  # temp receiving the call result


@dataclass
class CallGraph:
    ir: ScriptIR
    call_sites: dict[int, CallSite] = field(default_factory=dict)
    edges: dict[int, frozenset[int]] = field(default_factory=dict)
    prop_funcs: dict[str, frozenset[int]] = field(default_factory=dict)
    callers_of: dict[int, tuple[int, ...]] = field(default_factory=dict)
    use_facts: dict[tuple[int, str], frozenset[DefKey]] = field(default_factory=dict)
    all_defs: dict[tuple[int, str], frozenset[DefKey]] = field(default_factory=dict)
    resolution: dict[tuple[int, str], int | None] = field(default_factory=dict)

    @property
    def nodes(self) -> list[IrFunction]:
        return self.ir.functions

    def resolve_scope(self, fid: int, name: str) -> int | None:
        """fid of the function whose scope declares `name`, or None for externals."""
        key = (fid, name)
        if key in self.resolution:
            return self.resolution[key]
        scope: IrFunction | None = self.ir.functions[fid]
        while scope is not None:
            if name in scope.declared or name in scope.params:
                self.resolution[key] = scope.fid
                return scope.fid
            scope = None if scope.parent is None else self.ir.functions[scope.parent]
        self.resolution[key] = None
        return None

    def use_defs(self, iid: int, name: str) -> frozenset[DefKey]:
        """Definitions reaching the read of `name` at instruction `iid`."""
        return self.use_facts.get((iid, name), frozenset())

    def functions_for_property(self, prop: str) -> frozenset[int]:
        return self.prop_funcs.get(prop, frozenset())


def callees(graph: CallGraph, site: CallSite) -> set[IrFunction]:
    """Resolved targets of a call site; empty means unknown external callee."""
    return {graph.ir.functions[fid] for fid in graph.edges.get(site.iid, frozenset())}


def build_call_graph(ir: ScriptIR) -> CallGraph:
    graph = CallGraph(ir=ir)
    for fn in ir.functions:
        for instr in walk_instrs(fn.body):
            if isinstance(instr, Assign) and isinstance(instr.expr, Call):
                graph.call_sites[instr.iid] = CallSite(
                    iid=instr.iid, line=instr.line, fid=fn.fid,
                    call=instr.expr, target=instr.target)
    _collect_all_defs(graph)
    _function_value_fixpoint(graph)
    for fn in ir.functions:
        _reaching_defs_walk(graph, fn)
    return graph


# --- flow-insensitive definition collection ----------------------------------


def _collect_all_defs(graph: CallGraph) -> None:
    defs: dict[tuple[int, str], set[DefKey]] = {}

    def add(scope: int | None, name: str, key: DefKey) -> None:
        if scope is None:
            return
        defs.setdefault((scope, name), set()).add(key)

    for fn in graph.ir.functions:
        for p in fn.params:
            add(fn.fid, p, ParamDef(fn.fid, p))
        for instr in walk_instrs(fn.body):
            if isinstance(instr, Assign):
                add(graph.resolve_scope(fn.fid, instr.target), instr.target, InstrDef(instr.iid))
            elif isinstance(instr, Opaque):
                for w in instr.writes:
                    add(graph.resolve_scope(fn.fid, w), w, InstrDef(instr.iid))
    graph.all_defs = {k: frozenset(v) for k, v in defs.items()}


# --- function-value propagation ----------------------------------------------


def _function_value_fixpoint(graph: CallGraph) -> None:
    ir = graph.ir
    var_funcs: dict[tuple[int, str], set[int]] = {}
    prop_funcs: dict[str, set[int]] = {}
    ret_funcs: dict[int, set[int]] = {}
    edges: dict[int, set[int]] = {site: set() for site in graph.call_sites}

    def funcs_of(fid: int, op) -> set[int]:
        if isinstance(op, VarRead):
            scope = graph.resolve_scope(fid, op.name)
            if scope is not None:
                return var_funcs.get((scope, op.name), set())
        return set()

    def flow_into(scope: int | None, name: str, incoming: set[int]) -> bool:
        if scope is None or not incoming:
            return False
        current = var_funcs.setdefault((scope, name), set())
        before = len(current)
        current |= incoming
        return len(current) != before

    changed = True
    while changed:
        changed = False
        for fn in ir.functions:
            for instr in walk_instrs(fn.body):
                if isinstance(instr, PropWrite):
                    incoming = funcs_of(fn.fid, instr.value)
                    if incoming:
                        bucket = prop_funcs.setdefault(instr.prop, set())
                        if not incoming <= bucket:
                            bucket |= incoming
                            changed = True
                    continue
                if isinstance(instr, Return):
                    incoming = funcs_of(fn.fid, instr.value) if instr.value is not None else set()
                    if incoming:
                        bucket = ret_funcs.setdefault(fn.fid, set())
                        if not incoming <= bucket:
                            bucket |= incoming
                            changed = True
                    continue
                if not isinstance(instr, Assign):
                    continue
                expr = instr.expr
                scope = graph.resolve_scope(fn.fid, instr.target)
                if isinstance(expr, FuncRef):
                    changed |= flow_into(scope, instr.target, {expr.fid})
                elif isinstance(expr, VarRead):
                    changed |= flow_into(scope, instr.target, funcs_of(fn.fid, expr))
                elif isinstance(expr, PropRead):
                    changed |= flow_into(scope, instr.target, prop_funcs.get(expr.prop, set()))
                elif isinstance(expr, ObjectLit):
                    for key, op in expr.entries:
                        incoming = funcs_of(fn.fid, op)
                        if incoming:
                            bucket = prop_funcs.setdefault(key, set())
                            if not incoming <= bucket:
                                bucket |= incoming
                                changed = True
                elif isinstance(expr, Call):
                    callee = expr.callee
                    if isinstance(callee, CalleeVar):
                        targets = funcs_of(fn.fid, VarRead(callee.name))
                    else:
                        targets = prop_funcs.get(callee.prop, set())
                    bucket = edges[instr.iid]
                    if not targets <= bucket:
                        bucket |= targets
                        changed = True
                    result: set[int] = set()
                    for g in bucket:
                        result |= ret_funcs.get(g, set())
                        target_fn = ir.functions[g]
                        for i, pname in enumerate(target_fn.params):
                            if i < len(expr.args):
                                changed |= flow_into(g, pname, funcs_of(fn.fid, expr.args[i]))
                    changed |= flow_into(scope, instr.target, result)

    graph.prop_funcs = {k: frozenset(v) for k, v in prop_funcs.items()}
    graph.edges = {iid: frozenset(v) for iid, v in edges.items()}
    callers: dict[int, list[int]] = {}
    for iid, fids in graph.edges.items():
        for fid in fids:
            callers.setdefault(fid, []).append(iid)
    graph.callers_of = {fid: tuple(sorted(sites)) for fid, sites in callers.items()}


# --- flow-sensitive reaching definitions --------------------------------------

Env = dict[str, frozenset[DefKey]]


def _reaching_defs_walk(graph: CallGraph, fn: IrFunction) -> None:
    local_names = fn.declared | set(fn.params)

    def record_use(iid: int, name: str, env: Env) -> None:
        if name in local_names:
            reaching = env.get(name, frozenset())
        else:
            scope = graph.resolve_scope(fn.fid, name)
            if scope is None:
                reaching = frozenset()
            else:
                reaching = graph.all_defs.get((scope, name), frozenset())
        key = (iid, name)
        graph.use_facts[key] = graph.use_facts.get(key, frozenset()) | reaching

    def instr_reads(instr) -> frozenset[str]:
        if isinstance(instr, Assign):
            return expr_reads(instr.expr)
        if isinstance(instr, PropWrite):
            reads = frozenset()
            if isinstance(instr.base, VarRead):
                reads |= frozenset((instr.base.name,))
            if isinstance(instr.value, VarRead):
                reads |= frozenset((instr.value.name,))
            return reads
        if isinstance(instr, Return):
            if isinstance(instr.value, VarRead):
                return frozenset((instr.value.name,))
            return frozenset()
        if isinstance(instr, Opaque):
            return instr.reads
        return frozenset()

    def join(a: Env, b: Env) -> Env:
        out = dict(a)
        for name, defs in b.items():
            out[name] = out.get(name, frozenset()) | defs
        return out

    def walk(body: list, env: Env) -> Env:
        for instr in body:
            for name in instr_reads(instr):
                record_use(instr.iid, name, env)
            if isinstance(instr, Assign):
                if instr.target in local_names:
                    env = dict(env)
                    env[instr.target] = frozenset((InstrDef(instr.iid),))
            elif isinstance(instr, Opaque):
                env = dict(env)
                for w in instr.writes:
                    if w in local_names:
                        env[w] = env.get(w, frozenset()) | {InstrDef(instr.iid)}
            elif isinstance(instr, Branch):
                outs = [walk(arm, env) for arm in instr.arms]
                merged = outs[0] if outs else env
                for other in outs[1:]:
                    merged = join(merged, other)
                env = merged if outs else env
            elif isinstance(instr, Loop):
                first = walk(instr.body, env)
                env_in = join(env, first)
                second = walk(instr.body, env_in)
                env = join(env, second)
        return env

    entry: Env = {p: frozenset((ParamDef(fn.fid, p),)) for p in fn.params}
    walk(fn.body, entry)
