"""AST node types for the supported C subset.

A single generic node class keeps the tree uniformly walkable; kind-specific
structure lives in the child-slot conventions documented on NodeKind members
and in the named accessors below.  Nodes compare by identity so they can key
dictionaries directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .omp import OmpDirectiveInfo
from .source import Span


class NodeKind(Enum):
    TRANSLATION_UNIT = "TranslationUnit"
    FUNCTION_DEF = "FunctionDef"
    PARAM_DECL = "ParamDecl"
    VAR_DECL = "VarDecl"
    STRUCT_DECL = "StructDecl"
    COMPOUND_STMT = "CompoundStmt"
    EXPR_STMT = "ExprStmt"
    DECL_STMT = "DeclStmt"
    IF_STMT = "IfStmt"
    SWITCH_STMT = "SwitchStmt"
    CASE_LABEL = "CaseLabel"
    FOR_STMT = "ForStmt"
    WHILE_STMT = "WhileStmt"
    DO_STMT = "DoStmt"
    RETURN_STMT = "ReturnStmt"
    BREAK_STMT = "BreakStmt"
    CONTINUE_STMT = "ContinueStmt"
    BINARY_OP = "BinaryOp"
    UNARY_OP = "UnaryOp"
    ASSIGN_OP = "AssignOp"
    ARRAY_SUBSCRIPT = "ArraySubscript"
    MEMBER_ACCESS = "MemberAccess"
    CALL = "Call"
    DECL_REF = "DeclRef"
    INT_LITERAL = "IntLiteral"
    FLOAT_LITERAL = "FloatLiteral"
    STRING_LITERAL = "StringLiteral"
    INIT_LIST = "InitList"
    CAST = "Cast"
    EMPTY = "Empty"
    OMP_DIRECTIVE = "OmpDirective"


_BASE_SIZES = {"int": 4, "float": 4, "double": 8, "char": 1, "void": 0}

LOOP_KINDS = (NodeKind.FOR_STMT, NodeKind.WHILE_STMT, NodeKind.DO_STMT)


@dataclass(frozen=True)
class TypeInfo:
    base: str  # int | float | double | char | void | struct
    struct_tag: str | None = None
    pointer_depth: int = 0
    array_dims: tuple[int | None, ...] = ()
    is_const: bool = False
    pointee_const: bool = False

    @property
    def is_pointerish(self) -> bool:
        return self.pointer_depth > 0 or bool(self.array_dims)

    def element_count(self) -> int | None:
        """Product of array dims; None when any dim or the extent is unknown."""
        if self.pointer_depth > 0 and not self.array_dims:
            return None
        count = 1
        for d in self.array_dims:
            if d is None:
                return None
            count *= d
        return count

    def render(self) -> str:
        s = "const " if self.pointee_const else ""
        s += f"struct {self.struct_tag}" if self.base == "struct" else self.base
        s += " " + "*" * self.pointer_depth if self.pointer_depth else ""
        if self.is_const:
            s += " const"
        for d in self.array_dims:
            s += f"[{'' if d is None else d}]"
        return s


@dataclass(eq=False)
class AstNode:
    kind: NodeKind
    span: Span
    children: list["AstNode"] = field(default_factory=list)
    name: str | None = None
    op: str | None = None
    value: int | float | str | None = None
    type_info: TypeInfo | None = None
    decl: "AstNode | None" = None          # resolved declaration (DeclRef)
    unresolved_global: bool = False
    postfix: bool = False                  # UnaryOp ++/--
    omp: OmpDirectiveInfo | None = None
    parent: "AstNode | None" = field(default=None, repr=False)

    # -- generic helpers ---------------------------------------------------
    def walk(self) -> Iterator["AstNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def find_all(self, kind: NodeKind) -> Iterator["AstNode"]:
        return (n for n in self.walk() if n.kind is kind)

    def ancestors(self) -> Iterator["AstNode"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def enclosing(self, *kinds: NodeKind) -> "AstNode | None":
        for a in self.ancestors():
            if a.kind in kinds:
                return a
        return None

    # -- slot accessors ----------------------------------------------------
    @property
    def body(self) -> "AstNode | None":
        if self.kind is NodeKind.FUNCTION_DEF:
            if self.children and self.children[-1].kind is NodeKind.COMPOUND_STMT:
                return self.children[-1]
            return None
        if self.kind is NodeKind.FOR_STMT:
            return self.children[3]
        if self.kind in (NodeKind.WHILE_STMT, NodeKind.SWITCH_STMT):
            return self.children[1]
        if self.kind is NodeKind.DO_STMT:
            return self.children[0]
        raise AttributeError(f"{self.kind} has no body slot")

    @property
    def params(self) -> list["AstNode"]:
        assert self.kind is NodeKind.FUNCTION_DEF
        return [c for c in self.children if c.kind is NodeKind.PARAM_DECL]

    @property
    def is_definition(self) -> bool:
        assert self.kind is NodeKind.FUNCTION_DEF
        return self.body is not None

    @property
    def for_init(self) -> "AstNode":
        assert self.kind is NodeKind.FOR_STMT
        return self.children[0]

    @property
    def for_cond(self) -> "AstNode":
        assert self.kind is NodeKind.FOR_STMT
        return self.children[1]

    @property
    def for_inc(self) -> "AstNode":
        assert self.kind is NodeKind.FOR_STMT
        return self.children[2]

    @property
    def cond(self) -> "AstNode":
        if self.kind is NodeKind.FOR_STMT:
            return self.children[1]
        if self.kind in (NodeKind.IF_STMT, NodeKind.WHILE_STMT, NodeKind.SWITCH_STMT):
            return self.children[0]
        if self.kind is NodeKind.DO_STMT:
            return self.children[1]
        raise AttributeError(f"{self.kind} has no condition slot")

    @property
    def then_branch(self) -> "AstNode":
        assert self.kind is NodeKind.IF_STMT
        return self.children[1]

    @property
    def else_branch(self) -> "AstNode | None":
        assert self.kind is NodeKind.IF_STMT
        return self.children[2] if len(self.children) > 2 else None

    @property
    def is_empty(self) -> bool:
        return self.kind is NodeKind.EMPTY


def link_parents(root: AstNode) -> None:
    for node in root.walk():
        for c in node.children:
            c.parent = node


def iter_functions(tu: AstNode) -> Iterator[AstNode]:
    for c in tu.children:
        if c.kind is NodeKind.FUNCTION_DEF:
            yield c


def defined_functions(tu: AstNode) -> dict[str, AstNode]:
    return {f.name: f for f in iter_functions(tu) if f.is_definition}


def declared_functions(tu: AstNode) -> dict[str, AstNode]:
    """All function declarations by name; definitions shadow prototypes."""
    out: dict[str, AstNode] = {}
    for f in iter_functions(tu):
        if f.name not in out or f.is_definition:
            out[f.name] = f
    return out


def global_var_decls(tu: AstNode) -> list[AstNode]:
    out = []
    for c in tu.children:
        if c.kind is NodeKind.DECL_STMT:
            out.extend(c.children)
        elif c.kind is NodeKind.VAR_DECL:
            out.append(c)
    return out


def struct_sizes(tu: AstNode) -> dict[str, int]:
    """Byte size per struct tag, member sizes summed without padding."""
    sizes: dict[str, int] = {}
    for c in tu.children:
        if c.kind is not NodeKind.STRUCT_DECL:
            continue
        total = 0
        for m in c.children:
            ti = m.type_info
            total += element_size(ti, sizes) * (ti.element_count() or 1)
        sizes[c.name] = total
    return sizes


def element_size(ti: TypeInfo, struct_size_table: dict[str, int] | None = None) -> int:
    """Size in bytes of one element of the declared type.

    For pointers this is the pointee size (what a transfer of one element
    moves), not the pointer representation itself.
    """
    if ti.base == "struct":
        if struct_size_table and ti.struct_tag in struct_size_table:
            return struct_size_table[ti.struct_tag]
        return 0
    return _BASE_SIZES[ti.base]


def dump(node: AstNode, indent: int = 0) -> str:
    """Readable tree rendering used by tests and debug flags."""
    label = node.kind.value
    bits = []
    if node.name:
        bits.append(node.name)
    if node.op:
        bits.append(repr(node.op))
    if node.value is not None:
        bits.append(repr(node.value))
    if node.type_info:
        bits.append(node.type_info.render())
    if node.omp:
        bits.append(node.omp.kind.value)
    line = "  " * indent + label + (" " + " ".join(str(b) for b in bits) if bits else "")
    parts = [line]
    for c in node.children:
        parts.append(dump(c, indent + 1))
    return "\n".join(parts)
