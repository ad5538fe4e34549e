"""Interprocedural side-effect summaries.

Each function gets a summary of what it may do to pointer parameters and
globals, split by host/device execution space.  Summaries are computed to a
fixed point over the call graph (handles recursion) and are maximally
pessimistic for functions whose body is not in the translation unit: every
non-const pointer parameter becomes readwrite on the host.  External
functions are not assumed to touch globals; otherwise any libm or stdio
call would invalidate every mapping in the file.  No inlining is performed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .access import (AccessKind, MemoryAccess, Space, Storage, VariableTable,
                     const_param_is_readonly, join_kinds)
from .astcfg import AstCfg
from .nodes import AstNode, NodeKind, declared_functions, defined_functions
from .source import SourceFile


@dataclass(frozen=True)
class Effect:
    kind: AccessKind
    spaces: frozenset[Space]

    def join(self, other: "Effect") -> "Effect":
        return Effect(join_kinds(self.kind, other.kind), self.spaces | other.spaces)


def _norm(kind: AccessKind) -> AccessKind:
    """Unknown effects are pessimized to readwrite when they leave a summary."""
    return AccessKind.READWRITE if kind is AccessKind.UNKNOWN else kind


@dataclass
class CallSummary:
    fn: str
    defined: bool
    param_effects: dict[int, Effect] = field(default_factory=dict)  # by param index
    global_effects: dict[str, Effect] = field(default_factory=dict)  # by global name

    def snapshot(self):
        return (tuple(sorted((i, e.kind, tuple(sorted(s.value for s in e.spaces)))
                             for i, e in self.param_effects.items())),
                tuple(sorted((n, e.kind, tuple(sorted(s.value for s in e.spaces)))
                             for n, e in self.global_effects.items())))


def pessimistic_summary(fn: AstNode) -> CallSummary:
    s = CallSummary(fn=fn.name, defined=False)
    for i, p in enumerate(fn.params):
        ti = p.type_info
        if ti is None or not ti.is_pointerish:
            continue
        kind = AccessKind.READ if const_param_is_readonly(p) else AccessKind.READWRITE
        s.param_effects[i] = Effect(kind, frozenset({Space.HOST}))
    return s


def _param_index(fn: AstNode) -> dict[AstNode, int]:
    return {p: i for i, p in enumerate(fn.params)}


def _merge_param(s: CallSummary, idx: int, eff: Effect) -> None:
    cur = s.param_effects.get(idx)
    s.param_effects[idx] = eff if cur is None else cur.join(eff)


def _merge_global(s: CallSummary, name: str, eff: Effect) -> None:
    cur = s.global_effects.get(name)
    s.global_effects[name] = eff if cur is None else cur.join(eff)


def _direct_effects(fn: AstNode, accesses: list[MemoryAccess]) -> CallSummary:
    s = CallSummary(fn=fn.name, defined=True)
    pidx = _param_index(fn)
    for acc in accesses:
        if acc.kind is AccessKind.UNKNOWN:
            continue  # call-through effects handled via callee summaries
        eff = Effect(acc.kind, frozenset({acc.space}))
        d = acc.var.decl
        if d is not None and d in pidx and d.type_info.is_pointerish:
            _merge_param(s, pidx[d], eff)
        elif acc.var.storage is Storage.GLOBAL:
            _merge_global(s, acc.var.name, eff)
    return s


def summarize_all(src: SourceFile, tu: AstNode, cfgs: dict[str, AstCfg],
                  accesses: dict[str, list[MemoryAccess]], table: VariableTable,
                  max_call_depth: int = 16) -> dict[str, CallSummary]:
    """Fixed-point computation of CallSummary for every declared function."""
    from .access import _Classifier  # reuse the lvalue/arg-root resolution

    helper = _Classifier(src, table)
    defined = defined_functions(tu)
    declared = declared_functions(tu)
    summaries: dict[str, CallSummary] = {}
    for name, fn in declared.items():
        if name not in defined:
            summaries[name] = pessimistic_summary(fn)
    for name, fn in defined.items():
        summaries[name] = _direct_effects(fn, accesses[name])

    max_passes = max(max_call_depth, len(defined) + 1)
    for _ in range(max_passes):
        changed = False
        for name, fn in defined.items():
            new = _direct_effects(fn, accesses[name])
            pidx = _param_index(fn)
            for cs in cfgs[name].call_sites:
                callee = summaries.get(cs.callee)
                force_dev = frozenset({Space.DEVICE}) if cs.on_device else None
                args = cs.call.children
                if callee is None:
                    # undeclared external: pessimize every memory-exposing arg
                    for arg in args:
                        root = helper.pointerish_arg_root(arg)
                        if root is None:
                            continue
                        eff = Effect(AccessKind.READWRITE,
                                     force_dev or frozenset({Space.HOST}))
                        _classify_bound(new, pidx, table, root, eff)
                    continue
                for i, eff in callee.param_effects.items():
                    if i >= len(args):
                        continue
                    root = helper.pointerish_arg_root(args[i])
                    if root is None:
                        continue
                    eff2 = Effect(_norm(eff.kind), force_dev or eff.spaces)
                    _classify_bound(new, pidx, table, root, eff2)
                for gname, eff in callee.global_effects.items():
                    eff2 = Effect(_norm(eff.kind), force_dev or eff.spaces)
                    _merge_global(new, gname, eff2)
            if new.snapshot() != summaries[name].snapshot():
                summaries[name] = new
                changed = True
            else:
                summaries[name] = new
        if not changed:
            break
    return summaries


def _classify_bound(summary: CallSummary, pidx: dict[AstNode, int],
                    table: VariableTable, root: AstNode, eff: Effect) -> None:
    """Fold a callee effect on an argument back into the caller's summary."""
    var = table.for_ref(root)
    d = var.decl
    if d is not None and d in pidx and d.type_info.is_pointerish:
        _merge_param(summary, pidx[d], eff)
    elif var.storage is Storage.GLOBAL:
        _merge_global(summary, var.name, eff)
    # effects on caller locals stay local: nothing escapes upward


def apply_call_effects(src: SourceFile, cfg: AstCfg, accesses: list[MemoryAccess],
                       summaries: dict[str, CallSummary],
                       table: VariableTable) -> list[MemoryAccess]:
    """Replace call-argument `unknown` accesses with summary-derived ones.

    The result keeps within-node ordering; global effects of a call are placed
    with the call's node.  Unknown kinds surviving a summary are upgraded to
    readwrite, so no `unknown` access remains afterwards.
    """
    from .access import _Classifier

    helper = _Classifier(src, table)
    out: list[MemoryAccess] = []
    expanded_calls: set[int] = set()

    def call_of(arg_ast: AstNode) -> AstNode | None:
        # scan_call_arg records the argument expression itself, so the
        # nearest Call ancestor is the owning call
        node = arg_ast.parent
        while node is not None and node.kind is not NodeKind.CALL:
            node = node.parent
        return node

    def emit_for(var, kind: AccessKind, spaces, node_id: int, ast: AstNode):
        for sp in sorted(spaces, key=lambda s: s.value):
            out.append(MemoryAccess(var, _norm(kind), sp, node_id, ast))

    def expand_globals(call: AstNode, node_id: int, on_device: bool):
        if id(call) in expanded_calls:
            return
        expanded_calls.add(id(call))
        summary = summaries.get(call.name)
        if summary is None:
            return
        for gname, eff in summary.global_effects.items():
            gv = table.by_name_global.get(gname)
            if gv is None:
                continue
            spaces = frozenset({Space.DEVICE}) if on_device else eff.spaces
            emit_for(gv, eff.kind, spaces, node_id, call)

    for acc in accesses:
        if acc.kind is not AccessKind.UNKNOWN:
            out.append(acc)
            continue
        call = call_of(acc.ast)
        if call is None:
            out.append(MemoryAccess(acc.var, AccessKind.READWRITE, acc.space,
                                    acc.cfg_node, acc.ast, acc.subscript))
            continue
        on_device = acc.space is Space.DEVICE
        summary = summaries.get(call.name)
        if summary is None:
            emit_for(acc.var, AccessKind.READWRITE,
                     {Space.DEVICE} if on_device else {Space.HOST},
                     acc.cfg_node, acc.ast)
        else:
            try:
                arg_index = next(i for i, a in enumerate(call.children) if a is acc.ast)
            except StopIteration:
                arg_index = -1
            eff = summary.param_effects.get(arg_index)
            if eff is not None:
                spaces = frozenset({Space.DEVICE}) if on_device else eff.spaces
                emit_for(acc.var, eff.kind, spaces, acc.cfg_node, acc.ast)
        expand_globals(call, acc.cfg_node, on_device)

    # calls without memory-exposing args still carry global effects
    for cs in cfg.call_sites:
        expand_globals(cs.call, cs.node_id, cs.on_device)
    return out
