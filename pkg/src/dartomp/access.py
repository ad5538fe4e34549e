"""Memory access classification over the AST-CFG.

Walks every node's AST payload and records whole-object reads and writes per
variable, tagged host or device by where the node executes.  Call arguments
that can expose memory to a callee are recorded as `unknown` and later
replaced by interprocedural summaries.  Element-level effects are deliberately
collapsed: one written element marks the whole object written.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .astcfg import AstCfg, CfgNode
from .diagnostics import AnalysisFailure, UnsupportedConstructError
from .nodes import (AstNode, NodeKind, TypeInfo, element_size, global_var_decls,
                    iter_functions, struct_sizes)
from .source import SourceFile


class AccessKind(Enum):
    READ = "read"
    WRITE = "write"
    READWRITE = "readwrite"
    UNKNOWN = "unknown"


class Space(Enum):
    HOST = "host"
    DEVICE = "device"


def join_kinds(a: "AccessKind | None", b: AccessKind) -> AccessKind:
    """Effect lattice join: none < read, write < readwrite; unknown is top."""
    if a is None:
        return b
    if a is b:
        return a
    if AccessKind.UNKNOWN in (a, b):
        return AccessKind.UNKNOWN
    return AccessKind.READWRITE


def reads(kind: AccessKind) -> bool:
    return kind in (AccessKind.READ, AccessKind.READWRITE, AccessKind.UNKNOWN)


def writes(kind: AccessKind) -> bool:
    return kind in (AccessKind.WRITE, AccessKind.READWRITE, AccessKind.UNKNOWN)


class Storage(Enum):
    LOCAL = "local"
    PARAM = "param"
    GLOBAL = "global"


@dataclass(eq=False)
class VariableId:
    name: str
    decl: AstNode | None  # None for externally-declared globals
    storage: Storage
    is_scalar: bool
    element_size: int
    element_count: int

    @property
    def total_bytes(self) -> int:
        return self.element_size * self.element_count

    def __repr__(self) -> str:
        return (f"VariableId({self.name}, {self.storage.value}, "
                f"{self.element_count}x{self.element_size}B)")


@dataclass
class MemoryAccess:
    var: VariableId
    kind: AccessKind
    space: Space
    cfg_node: int
    ast: AstNode
    subscript: AstNode | None = None  # outermost ArraySubscript when indexed

    def __repr__(self) -> str:
        return f"{self.var.name}:{self.kind.value}@{self.space.value}[n{self.cfg_node}]"


class VariableTable:
    """VariableIds keyed by declaration; unresolved globals keyed by name."""

    def __init__(self, src: SourceFile, tu: AstNode,
                 sizes: dict[str, int] | None = None, pointer_default: int = 1024):
        self.src = src
        self.sizes = dict(sizes or {})
        self.pointer_default = pointer_default
        self.struct_size_table = struct_sizes(tu)
        self.by_decl: dict[AstNode, VariableId] = {}
        self.by_name_global: dict[str, VariableId] = {}
        self.globals: list[VariableId] = []
        for d in global_var_decls(tu):
            vid = self._make(d, Storage.GLOBAL)
            self.by_decl[d] = vid
            self.by_name_global[d.name] = vid
            self.globals.append(vid)

    def _make(self, decl: AstNode, storage: Storage) -> VariableId:
        ti = decl.type_info
        esize = element_size(ti, self.struct_size_table)
        count = ti.element_count()
        if count is None:
            count = self.sizes.get(decl.name, self.pointer_default)
        scalar = (not ti.is_pointerish) and ti.base != "struct"
        return VariableId(decl.name, decl, storage, scalar, esize, count)

    def for_decl(self, decl: AstNode) -> VariableId:
        if decl in self.by_decl:
            return self.by_decl[decl]
        storage = Storage.PARAM if decl.kind is NodeKind.PARAM_DECL else Storage.LOCAL
        if decl.enclosing(NodeKind.FUNCTION_DEF) is None:
            storage = Storage.GLOBAL
        vid = self._make(decl, storage)
        self.by_decl[decl] = vid
        if storage is Storage.GLOBAL:
            self.by_name_global[decl.name] = vid
        return vid

    def for_ref(self, ref: AstNode) -> VariableId:
        if ref.decl is not None:
            return self.for_decl(ref.decl)
        if ref.name in self.by_name_global:
            return self.by_name_global[ref.name]
        # assume an external global of unknown extent
        vid = VariableId(ref.name, None, Storage.GLOBAL, True, 4,
                         self.sizes.get(ref.name, 1))
        self.by_name_global[ref.name] = vid
        return vid


def const_param_is_readonly(param: AstNode) -> bool:
    """True when a pointer parameter's pointee is const-qualified."""
    ti = param.type_info
    return ti is not None and ti.is_pointerish and (ti.pointee_const or
                                                    (ti.is_const and ti.pointer_depth == 0))


def enclosing_statement(ast: AstNode) -> AstNode:
    """Nearest enclosing statement node of an expression."""
    stmt_kinds = {
        NodeKind.EXPR_STMT, NodeKind.DECL_STMT, NodeKind.RETURN_STMT,
        NodeKind.IF_STMT, NodeKind.SWITCH_STMT, NodeKind.FOR_STMT,
        NodeKind.WHILE_STMT, NodeKind.DO_STMT, NodeKind.OMP_DIRECTIVE,
        NodeKind.BREAK_STMT, NodeKind.CONTINUE_STMT,
    }
    node = ast
    while node is not None:
        if node.kind in stmt_kinds:
            return node
        node = node.parent
    return ast


def decl_is_inside(decl: AstNode | None, region: AstNode) -> bool:
    if decl is None:
        return False
    return any(a is region for a in decl.ancestors()) or decl is region


@dataclass
class _Ctx:
    space: Space
    node_id: int


class _Classifier:
    def __init__(self, src: SourceFile, table: VariableTable):
        self.src = src
        self.table = table
        self.out: list[MemoryAccess] = []

    def fail(self, ast: AstNode, msg: str) -> AnalysisFailure:
        return AnalysisFailure.at(self.src, ast.span.start, msg)

    def emit(self, var: VariableId, kind: AccessKind, ctx: _Ctx, ast: AstNode,
             subscript: AstNode | None = None) -> None:
        self.out.append(MemoryAccess(var, kind, ctx.space, ctx.node_id, ast, subscript))

    # ------------------------------------------------------------------
    def lvalue_root(self, expr: AstNode) -> tuple[AstNode, AstNode | None]:
        """Resolve an lvalue to its root DeclRef and outermost subscript."""
        node = expr
        subscript = None
        while True:
            if node.kind is NodeKind.DECL_REF:
                return node, subscript
            if node.kind is NodeKind.ARRAY_SUBSCRIPT:
                if subscript is None:
                    subscript = node
                node = node.children[0]
                continue
            if node.kind is NodeKind.MEMBER_ACCESS:
                node = node.children[0]
                continue
            if node.kind is NodeKind.UNARY_OP and node.op == "*":
                node = node.children[0]
                continue
            if node.kind is NodeKind.CAST:
                node = node.children[0]
                continue
            if node.kind is NodeKind.BINARY_OP and node.op in ("+", "-"):
                # *(p + i): the pointerish side carries the object
                left, right = node.children
                lt, rt = left.type_info, right.type_info
                if lt is not None and lt.is_pointerish:
                    node = left
                    continue
                if rt is not None and rt.is_pointerish:
                    node = right
                    continue
                node = left
                continue
            raise self.fail(node, "cannot resolve the object behind this lvalue")

    def scan_lvalue_parts(self, expr: AstNode, ctx: _Ctx) -> None:
        """Reads performed while evaluating an lvalue (indices, offsets)."""
        if expr.kind is NodeKind.ARRAY_SUBSCRIPT:
            self.scan_lvalue_parts(expr.children[0], ctx)
            self.scan_expr(expr.children[1], ctx)
            return
        if expr.kind in (NodeKind.MEMBER_ACCESS, NodeKind.CAST):
            self.scan_lvalue_parts(expr.children[0], ctx)
            return
        if expr.kind is NodeKind.UNARY_OP and expr.op == "*":
            self.scan_lvalue_parts(expr.children[0], ctx)
            return
        if expr.kind is NodeKind.BINARY_OP and expr.op in ("+", "-"):
            for c in expr.children:
                ti = c.type_info
                if ti is not None and ti.is_pointerish:
                    self.scan_lvalue_parts(c, ctx)
                else:
                    self.scan_expr(c, ctx)
            return
        # the root DeclRef itself: address computation only, no content read

    def write_lvalue(self, lhs: AstNode, kind: AccessKind, ctx: _Ctx) -> None:
        root, subscript = self.lvalue_root(lhs)
        var = self.table.for_ref(root)
        ti = root.type_info
        direct_ref = lhs.kind is NodeKind.DECL_REF
        if direct_ref and ti is not None and ti.pointer_depth > 0 and not ti.array_dims:
            raise self.fail(lhs, f"assignment rebinds pointer '{root.name}'; "
                                 "aliasing cannot be tracked")
        self.scan_lvalue_parts(lhs, ctx)
        self.emit(var, kind, ctx, lhs, subscript)

    # ------------------------------------------------------------------
    def scan_expr(self, expr: AstNode, ctx: _Ctx) -> None:
        k = expr.kind
        if k is NodeKind.ASSIGN_OP:
            lhs, rhs = expr.children
            self.scan_expr(rhs, ctx)
            kind = AccessKind.WRITE if expr.op == "=" else AccessKind.READWRITE
            self.write_lvalue(lhs, kind, ctx)
            return
        if k is NodeKind.UNARY_OP and expr.op in ("++", "--"):
            operand = expr.children[0]
            ti = operand.type_info
            if (operand.kind is NodeKind.DECL_REF and ti is not None
                    and ti.pointer_depth > 0 and not ti.array_dims):
                raise self.fail(expr, f"assignment rebinds pointer '{operand.name}'; "
                                      "aliasing cannot be tracked")
            self.write_lvalue(operand, AccessKind.READWRITE, ctx)
            return
        if k is NodeKind.UNARY_OP and expr.op == "&":
            if ctx.space is Space.DEVICE:
                raise UnsupportedConstructError.at(
                    self.src, expr.span.start,
                    "address-of inside an offloaded region unsupported")
            # host-side &x: the pointee effect belongs to the consuming call
            self.scan_lvalue_parts(expr.children[0], ctx)
            return
        if k is NodeKind.UNARY_OP and expr.op == "*":
            root, subscript = self.lvalue_root(expr)
            self.scan_lvalue_parts(expr.children[0], ctx)
            self.emit(self.table.for_ref(root), AccessKind.READ, ctx, expr, subscript)
            return
        if k is NodeKind.ARRAY_SUBSCRIPT:
            root, subscript = self.lvalue_root(expr)
            self.scan_lvalue_parts(expr, ctx)
            self.emit(self.table.for_ref(root), AccessKind.READ, ctx, expr, subscript)
            return
        if k is NodeKind.MEMBER_ACCESS:
            root, subscript = self.lvalue_root(expr)
            self.scan_lvalue_parts(expr, ctx)
            self.emit(self.table.for_ref(root), AccessKind.READ, ctx, expr, subscript)
            return
        if k is NodeKind.DECL_REF:
            ti = expr.type_info
            if ti is not None and ti.is_pointerish:
                return  # bare array/pointer decay: address use, not content
            self.emit(self.table.for_ref(expr), AccessKind.READ, ctx, expr)
            return
        if k is NodeKind.CALL:
            for arg in expr.children:
                self.scan_call_arg(arg, ctx)
            return
        if k in (NodeKind.INT_LITERAL, NodeKind.FLOAT_LITERAL, NodeKind.STRING_LITERAL,
                 NodeKind.EMPTY):
            return
        for c in expr.children:
            self.scan_expr(c, ctx)

    def pointerish_arg_root(self, arg: AstNode) -> AstNode | None:
        """Root DeclRef when an argument exposes memory to the callee."""
        a = arg
        while a.kind is NodeKind.CAST:
            a = a.children[0]
        if a.kind is NodeKind.DECL_REF:
            ti = a.type_info
            if ti is not None and ti.is_pointerish:
                return a
            return None
        if a.kind is NodeKind.UNARY_OP and a.op == "&":
            root, _ = self.lvalue_root(a.children[0])
            return root
        if a.kind is NodeKind.BINARY_OP and a.op in ("+", "-"):
            for c in a.children:
                ti = c.type_info
                if ti is not None and ti.is_pointerish:
                    root, _ = self.lvalue_root(c)
                    return root
        return None

    def scan_call_arg(self, arg: AstNode, ctx: _Ctx) -> None:
        root = self.pointerish_arg_root(arg)
        if root is None:
            self.scan_expr(arg, ctx)
            return
        # index/offset computation still reads its operands
        if arg.kind is NodeKind.UNARY_OP and arg.op == "&":
            if ctx.space is Space.DEVICE:
                raise UnsupportedConstructError.at(
                    self.src, arg.span.start,
                    "address-of inside an offloaded region unsupported")
            self.scan_lvalue_parts(arg.children[0], ctx)
        elif arg.kind is NodeKind.BINARY_OP:
            for c in arg.children:
                ti = c.type_info
                if ti is None or not ti.is_pointerish:
                    self.scan_expr(c, ctx)
        self.emit(self.table.for_ref(root), AccessKind.UNKNOWN, ctx, arg)

    # ------------------------------------------------------------------
    def scan_stmt_ast(self, ast: AstNode, ctx: _Ctx) -> None:
        k = ast.kind
        if k is NodeKind.DECL_STMT:
            for d in ast.children:
                if d.children:  # initializer
                    init = d.children[0]
                    ti = d.type_info
                    if (ti is not None and ti.pointer_depth > 0 and not ti.array_dims
                            and init.kind is not NodeKind.INIT_LIST):
                        raise self.fail(d, f"assignment rebinds pointer '{d.name}'; "
                                           "aliasing cannot be tracked")
                    self.scan_expr(init, ctx)
                    self.emit(self.table.for_decl(d), AccessKind.WRITE, ctx, d)
            return
        if k is NodeKind.EXPR_STMT:
            for c in ast.children:
                self.scan_expr(c, ctx)
            return
        if k is NodeKind.RETURN_STMT:
            for c in ast.children:
                self.scan_expr(c, ctx)
            return
        # predicates and loop increments arrive as bare expressions
        self.scan_expr(ast, ctx)

    def scan_node(self, node: CfgNode, host_node_id: int, space: Space) -> None:
        if node.ast is None:
            return
        ctx = _Ctx(space, host_node_id)
        self.scan_stmt_ast(node.ast, ctx)


def classify_accesses(src: SourceFile, cfg: AstCfg, table: VariableTable) -> list[MemoryAccess]:
    """All memory accesses of one function, host level plus device kernels.

    Device accesses are attributed to their kernel's host-level node id, in
    device program order, so the host traversal can treat each kernel as one
    atomic step.
    """
    c = _Classifier(src, table)
    for node in cfg.nodes:
        if node.sub_cfg is not None:
            for sub in node.sub_cfg.nodes:
                if sub.ast is not None:
                    c.scan_stmt_ast(sub.ast, _Ctx(Space.DEVICE, node.id))
        elif node.ast is not None and node.ast.kind is not NodeKind.OMP_DIRECTIVE:
            c.scan_stmt_ast(node.ast, _Ctx(Space.HOST, node.id))
    return c.out


def kernel_rw_sets(accesses: list[MemoryAccess], kernel_node_id: int,
                   kernel_ast: AstNode) -> tuple[list[VariableId], list[VariableId]]:
    """(entry reads, writes) for one kernel, whole-object granularity.

    A variable needs valid device data at kernel entry when some read of it
    is not preceded (in device program order) by a kernel-local write.
    Variables declared inside the kernel are excluded outright.
    """
    written: set[VariableId] = set()
    entry_reads: list[VariableId] = []
    writes_out: list[VariableId] = []
    for acc in accesses:
        if acc.cfg_node != kernel_node_id or acc.space is not Space.DEVICE:
            continue
        if decl_is_inside(acc.var.decl, kernel_ast):
            continue
        if reads(acc.kind) and acc.var not in written and acc.var not in entry_reads:
            entry_reads.append(acc.var)
        if writes(acc.kind):
            if acc.var not in written:
                writes_out.append(acc.var)
            written.add(acc.var)
    return entry_reads, writes_out


def kernel_referenced_vars(accesses: list[MemoryAccess], kernel_node_id: int,
                           kernel_ast: AstNode) -> list[VariableId]:
    seen: list[VariableId] = []
    for acc in accesses:
        if acc.cfg_node != kernel_node_id or acc.space is not Space.DEVICE:
            continue
        if decl_is_inside(acc.var.decl, kernel_ast):
            continue
        if acc.var not in seen:
            seen.append(acc.var)
    return seen


def dump_accesses(src: SourceFile, accesses: list[MemoryAccess]) -> str:
    lines = []
    for a in accesses:
        line = src.line_of(a.ast.span.start)
        lines.append(f"{a.var.name:16s} {a.kind.value:9s} {a.space.value:6s} "
                     f"node {a.cfg_node:3d} line {line}")
    return "\n".join(lines)
