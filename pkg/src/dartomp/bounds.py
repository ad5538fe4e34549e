"""Loop bounds extraction and update-directive placement in loop nests.

Bounds come from the three for-statement slots: the init assignment gives the
induction variable and its start, the condition's comparison gives the end
(an exclusive ``<`` bound means last value right-hand-side minus one), and the
increment gives the step.  Anything non-constant folds to None and callers
fall back to configured defaults.

Placement of update directives walks the enclosing for-loop stack from the
innermost loop outward: a loop hoists the directive outside itself only when
its induction variable indexes the array access, the walk stopping early at
loops that start before the position limit (typically the end of the kernel
that produced the data).  A final validation pass retreats the anchor back
inward past any statement that would invalidate the transferred copy.
"""
from __future__ import annotations

from dataclasses import dataclass

from .access import MemoryAccess, writes
from .nodes import AstNode, NodeKind
from .parser import fold_int
from .source import SourceFile


@dataclass(frozen=True)
class LoopBounds:
    var: str | None
    lower: int | None
    upper: int | None  # inclusive
    step: int | None

    def trip_count(self) -> int | None:
        if self.lower is None or self.upper is None or not self.step:
            return None
        span = self.upper - self.lower if self.step > 0 else self.lower - self.upper
        if span < 0:
            return 0
        return span // abs(self.step) + 1


def _init_parts(init: AstNode, env) -> tuple[str | None, int | None]:
    if init.kind is NodeKind.DECL_STMT and len(init.children) == 1:
        d = init.children[0]
        if d.children:
            return d.name, fold_int(d.children[0], env)
        return d.name, None
    if init.kind is NodeKind.EXPR_STMT and init.children:
        e = init.children[0]
        if e.kind is NodeKind.ASSIGN_OP and e.op == "=" \
                and e.children[0].kind is NodeKind.DECL_REF:
            return e.children[0].name, fold_int(e.children[1], env)
    return None, None


def _step_of(inc: AstNode, var: str | None) -> tuple[str | None, int | None]:
    """(stepped variable, step) from the for-increment expression."""
    if inc.kind is NodeKind.UNARY_OP and inc.op in ("++", "--"):
        t = inc.children[0]
        if t.kind is NodeKind.DECL_REF:
            return t.name, 1 if inc.op == "++" else -1
    if inc.kind is NodeKind.ASSIGN_OP and inc.op in ("+=", "-="):
        t = inc.children[0]
        step = fold_int(inc.children[1], None)
        if t.kind is NodeKind.DECL_REF and step is not None:
            return t.name, step if inc.op == "+=" else -step
    return None, None


def extract_for_bounds(f: AstNode, env: dict[str, int] | None = None) -> LoopBounds:
    """Fold (induction var, lower, upper, step) out of one ForStmt."""
    assert f.kind is NodeKind.FOR_STMT
    var, start = _init_parts(f.for_init, env)
    step_var, step = _step_of(f.for_inc, var)
    if var is None:
        var = step_var
    cond = f.for_cond
    lower = upper = None
    if (cond.kind is NodeKind.BINARY_OP and cond.op in ("<", "<=", ">", ">=")
            and var is not None):
        lhs, rhs = cond.children
        op = cond.op
        if rhs.kind is NodeKind.DECL_REF and rhs.name == var:
            # mirror e.g. `0 < i` into `i > 0`
            lhs, rhs = rhs, lhs
            op = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}[op]
        if lhs.kind is NodeKind.DECL_REF and lhs.name == var:
            limit = fold_int(rhs, env)
            if op == "<":
                lower, upper = start, (None if limit is None else limit - 1)
            elif op == "<=":
                lower, upper = start, limit
            elif op == ">":
                lower, upper = (None if limit is None else limit + 1), start
            elif op == ">=":
                lower, upper = limit, start
    return LoopBounds(var=var, lower=lower, upper=upper, step=step)


def find_indexing_var(f: AstNode) -> str | None:
    """Induction variable of a for-loop, or None when it cannot be trusted.

    The variable must be the one written by the increment and must appear in
    the loop condition; a mismatch means the loop's control is irregular.
    """
    if f.kind is not NodeKind.FOR_STMT:
        return None
    step_var, _ = _step_of(f.for_inc, None)
    if step_var is None:
        return None
    cond = f.for_cond
    if cond.is_empty:
        return None
    cond_vars = {n.name for n in cond.find_all(NodeKind.DECL_REF)}
    if step_var not in cond_vars:
        return None
    return step_var


def referenced_var_names(expr: AstNode) -> set[str]:
    return {n.name for n in expr.find_all(NodeKind.DECL_REF)}


def subscript_index_vars(subscript: AstNode) -> set[str]:
    """Union of variables referenced by every index of a subscript chain."""
    names: set[str] = set()
    node = subscript
    while node.kind is NodeKind.ARRAY_SUBSCRIPT:
        names |= referenced_var_names(node.children[1])
        node = node.children[0]
    return names


def find_update_insert_loc(access_stmt: AstNode, subscript: AstNode | None,
                           loops: list[AstNode], loc_lim: int) -> AstNode:
    """Outermost legal statement for an update directive on one access.

    `loops` are the for-statements enclosing the access, outermost first;
    `loc_lim` is the byte offset the directive must not precede.  Loops whose
    induction variable does not index the access are skipped without blocking
    further hoisting; loops starting before `loc_lim` stop the walk.
    """
    if subscript is None:
        return access_stmt
    indexing_vars = subscript_index_vars(subscript)
    pos = access_stmt
    stack = list(loops)
    while stack:
        f = stack.pop()  # innermost remaining
        if f.span.start < loc_lim:
            break
        v = find_indexing_var(f)
        if v is None:
            continue
        if v in indexing_vars:
            pos = f
    return pos


def writes_between(var, begin: int, end: int, accesses: list[MemoryAccess]) -> bool:
    """Any write to `var` whose source position lies in [begin, end)?"""
    for acc in accesses:
        if acc.var is var and writes(acc.kind) and begin <= acc.ast.span.start < end:
            return True
    return False


def finalize_update_anchor(candidate: AstNode, access_stmt: AstNode, var,
                           accesses: list[MemoryAccess],
                           loops: list[AstNode]) -> AstNode:
    """Retreat a hoisted anchor inward until no write invalidates the copy.

    A write to the variable (in either space) between the anchor and the
    access means the transferred data would be stale by the time the access
    runs on some iteration, so the anchor moves to the next loop level in;
    the access's own statement is always legal.
    """
    read_pos = access_stmt.span.start
    chain: list[AstNode] = []
    started = candidate is access_stmt
    if not started:
        for f in loops:
            if not started and f is candidate:
                started = True
            if started:
                chain.append(f)
    chain.append(access_stmt)
    for anchor in chain:
        if anchor is access_stmt:
            return anchor
        if not writes_between(var, anchor.span.start, read_pos, accesses):
            return anchor
    return access_stmt


def enclosing_for_loops(ast: AstNode, stop_at: AstNode | None = None) -> list[AstNode]:
    """For-statements enclosing `ast`, outermost first, inside `stop_at`."""
    loops: list[AstNode] = []
    for a in ast.ancestors():
        if a is stop_at:
            break
        if a.kind is NodeKind.FOR_STMT:
            loops.append(a)
    loops.reverse()
    return loops


def loop_trip_count(src: SourceFile, loop: AstNode, env: dict[str, int] | None,
                    default_trip: int) -> int:
    if loop.kind is NodeKind.FOR_STMT:
        tc = extract_for_bounds(loop, env).trip_count()
        if tc is not None:
            return tc
    return default_trip
