"""Hybrid AST-CFG construction.

Each function body becomes a graph of Entry/Exit/Decl/Stmt/Pred/LoopBack nodes
whose payloads point back into the AST.  An offload kernel collapses to a
single Stmt node at the host level; its device code is lowered into a nested
sub-graph hanging off that node.  Node ids follow construction order, so two
builds of the same tree are identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic, UnsupportedConstructError
from .nodes import LOOP_KINDS, AstNode, NodeKind
from .omp import KERNEL_KINDS, STANDALONE_KINDS, DirectiveKind
from .source import SourceFile


class CfgNodeKind(Enum):
    ENTRY = "Entry"
    EXIT = "Exit"
    DECL = "Decl"
    STMT = "Stmt"
    PRED = "Pred"
    LOOP_BACK = "LoopBack"


class EdgeLabel(Enum):
    EPSILON = "epsilon"
    TRUE = "true_branch"
    FALSE = "false_branch"


@dataclass
class CfgNode:
    id: int
    kind: CfgNodeKind
    ast: AstNode | None = None
    offloaded: bool = False
    enclosing_loops: tuple[AstNode, ...] = ()
    sub_cfg: "AstCfg | None" = None


@dataclass
class CfgEdge:
    src: int
    dst: int
    label: EdgeLabel = EdgeLabel.EPSILON
    is_back_edge: bool = False


@dataclass
class CallSite:
    node_id: int
    callee: str
    call: AstNode
    on_device: bool


@dataclass
class AstCfg:
    function: AstNode
    nodes: list[CfgNode] = field(default_factory=list)
    edges: list[CfgEdge] = field(default_factory=list)
    call_sites: list[CallSite] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)
    node_of_ast: dict[AstNode, CfgNode] = field(default_factory=dict)

    @property
    def entry(self) -> CfgNode:
        return self.nodes[0]

    @property
    def exit(self) -> CfgNode:
        return self.nodes[1]

    def node(self, node_id: int) -> CfgNode:
        return self.nodes[node_id]

    def successors(self, node_id: int) -> list[tuple[CfgNode, CfgEdge]]:
        return [(self.nodes[e.dst], e) for e in self.edges if e.src == node_id]

    def kernel_nodes(self) -> list[CfgNode]:
        return [n for n in self.nodes if n.sub_cfg is not None]

    def back_edge_count(self) -> int:
        return sum(1 for e in self.edges if e.is_back_edge)


@dataclass
class _Frame:
    """Open loop during lowering: where break/continue go."""

    loop: AstNode
    continue_target: int | None = None
    breaks: list[int] = field(default_factory=list)
    continues: list[int] = field(default_factory=list)


class _Builder:
    def __init__(self, src: SourceFile, fn: AstNode, device: bool = False):
        self.src = src
        self.fn = fn
        self.device = device
        self.cfg = AstCfg(function=fn)
        self.loop_stack: list[_Frame] = []
        self.warnings = self.cfg.warnings

    # ------------------------------------------------------------------
    def new_node(self, kind: CfgNodeKind, ast: AstNode | None = None) -> CfgNode:
        node = CfgNode(id=len(self.cfg.nodes), kind=kind, ast=ast,
                       enclosing_loops=tuple(f.loop for f in self.loop_stack))
        self.cfg.nodes.append(node)
        if ast is not None:
            self.cfg.node_of_ast[ast] = node
        return node

    def edge(self, src: int, dst: int, label: EdgeLabel = EdgeLabel.EPSILON,
             back: bool = False) -> None:
        self.cfg.edges.append(CfgEdge(src, dst, label, back))

    def record_calls(self, node: CfgNode, ast: AstNode) -> None:
        for call in ast.find_all(NodeKind.CALL):
            self.cfg.call_sites.append(CallSite(node.id, call.name, call, self.device))

    # ------------------------------------------------------------------
    def build(self) -> AstCfg:
        entry = self.new_node(CfgNodeKind.ENTRY)
        exit_node = self.new_node(CfgNodeKind.EXIT)
        body = self.fn.body if self.fn.kind is NodeKind.FUNCTION_DEF else self.fn
        if body is None:
            self.edge(entry.id, exit_node.id)
            return self.cfg
        first, dangling = self.lower_stmt(body)
        if first is None:
            self.edge(entry.id, exit_node.id)
        else:
            self.edge(entry.id, first)
        for nid, label in dangling:
            self.edge(nid, exit_node.id, label)
        self._fold_tail_return()
        self._warn_dead_code()
        return self.cfg

    def _fold_tail_return(self) -> None:
        """Absorb a final ``return`` into Exit so it gets no node of its own."""
        if self.fn.kind is not NodeKind.FUNCTION_DEF:
            return
        body = self.fn.body
        if body is None or body.kind is not NodeKind.COMPOUND_STMT or not body.children:
            return
        last = body.children[-1]
        if last.kind is not NodeKind.RETURN_STMT:
            return
        node = self.cfg.node_of_ast.get(last)
        if node is None:
            return
        exit_id = self.cfg.exit.id
        for e in self.cfg.edges:
            if e.dst == node.id:
                e.dst = exit_id
        self.cfg.edges = [e for e in self.cfg.edges if e.src != node.id]
        for cs in self.cfg.call_sites:
            if cs.node_id == node.id:
                cs.node_id = exit_id
        self.cfg.nodes.remove(node)
        remap = {n.id: i for i, n in enumerate(self.cfg.nodes)}
        for n in self.cfg.nodes:
            n.id = remap[n.id]
        for e in self.cfg.edges:
            e.src = remap[e.src]
            e.dst = remap[e.dst]
        for cs in self.cfg.call_sites:
            cs.node_id = remap[cs.node_id]
        self.cfg.exit.ast = last
        self.cfg.node_of_ast[last] = self.cfg.exit

    def _warn_dead_code(self) -> None:
        reached = {0}
        work = [0]
        succ: dict[int, list[int]] = {}
        for e in self.cfg.edges:
            succ.setdefault(e.src, []).append(e.dst)
        while work:
            n = work.pop()
            for m in succ.get(n, ()):
                if m not in reached:
                    reached.add(m)
                    work.append(m)
        for node in self.cfg.nodes:
            if node.id not in reached and node.ast is not None:
                line = self.src.line_of(node.ast.span.start)
                self.warnings.append(Diagnostic(self.src.path, line, 1, "warning",
                                                "unreachable code"))

    # ------------------------------------------------------------------
    # Statement lowering returns (first node id or None for no-op, dangling
    # exits as (node id, edge label) pairs to wire to whatever comes next).
    # ------------------------------------------------------------------
    def lower_stmt(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        k = stmt.kind
        if k is NodeKind.COMPOUND_STMT:
            return self.lower_seq(stmt.children)
        if k is NodeKind.EMPTY:
            return None, []
        if k is NodeKind.DECL_STMT:
            node = self.new_node(CfgNodeKind.DECL, stmt)
            self.record_calls(node, stmt)
            return node.id, [(node.id, EdgeLabel.EPSILON)]
        if k is NodeKind.EXPR_STMT:
            if not stmt.children:
                return None, []
            node = self.new_node(CfgNodeKind.STMT, stmt)
            self.record_calls(node, stmt)
            return node.id, [(node.id, EdgeLabel.EPSILON)]
        if k is NodeKind.RETURN_STMT:
            node = self.new_node(CfgNodeKind.STMT, stmt)
            self.record_calls(node, stmt)
            self.edge(node.id, self.cfg.exit.id)
            return node.id, []
        if k is NodeKind.BREAK_STMT:
            node = self.new_node(CfgNodeKind.STMT, stmt)
            if not self.loop_stack:
                raise UnsupportedConstructError.at(
                    self.src, stmt.span.start, "break outside loop or switch")
            self.loop_stack[-1].breaks.append(node.id)
            return node.id, []
        if k is NodeKind.CONTINUE_STMT:
            node = self.new_node(CfgNodeKind.STMT, stmt)
            frame = self._innermost_loop_frame()
            if frame is None:
                raise UnsupportedConstructError.at(
                    self.src, stmt.span.start, "continue outside loop")
            frame.continues.append(node.id)
            return node.id, []
        if k is NodeKind.IF_STMT:
            return self.lower_if(stmt)
        if k is NodeKind.SWITCH_STMT:
            return self.lower_switch(stmt)
        if k is NodeKind.FOR_STMT:
            return self.lower_for(stmt)
        if k is NodeKind.WHILE_STMT:
            return self.lower_while(stmt)
        if k is NodeKind.DO_STMT:
            return self.lower_do(stmt)
        if k is NodeKind.OMP_DIRECTIVE:
            return self.lower_omp(stmt)
        if k is NodeKind.CASE_LABEL:
            # only meaningful inside switch bodies, handled there
            return None, []
        raise UnsupportedConstructError.at(
            self.src, stmt.span.start, f"statement kind {k.value} not lowerable")

    def _innermost_loop_frame(self) -> _Frame | None:
        for f in reversed(self.loop_stack):
            if f.loop.kind in LOOP_KINDS:
                return f
        return None

    def lower_seq(self, stmts: list[AstNode]) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        first = None
        dangling: list[tuple[int, EdgeLabel]] = []
        for s in stmts:
            f, d = self.lower_stmt(s)
            if f is None:
                dangling.extend(d)
                continue
            if first is None:
                first = f
            for nid, label in dangling:
                self.edge(nid, f, label)
            dangling = d
        return first, dangling

    def lower_if(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        pred = self.new_node(CfgNodeKind.PRED, stmt.cond)
        self.record_calls(pred, stmt.cond)
        tf, td = self.lower_stmt(stmt.then_branch)
        if tf is None:
            td = [(pred.id, EdgeLabel.TRUE)]
        else:
            self.edge(pred.id, tf, EdgeLabel.TRUE)
        els = stmt.else_branch
        if els is None:
            ed = [(pred.id, EdgeLabel.FALSE)]
        else:
            ef, ed = self.lower_stmt(els)
            if ef is None:
                ed = [(pred.id, EdgeLabel.FALSE)]
            else:
                self.edge(pred.id, ef, EdgeLabel.FALSE)
        return pred.id, td + ed

    def lower_switch(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        # Chain of Pred nodes, one per case label; default is the final
        # false successor.  Fallthrough between consecutive case bodies is
        # preserved.
        body = stmt.body
        groups: list[tuple[AstNode, list[AstNode]]] = []  # (label, stmts)
        current: list[AstNode] | None = None
        for s in body.children:
            if s.kind is NodeKind.CASE_LABEL:
                groups.append((s, []))
                current = groups[-1][1]
            else:
                if current is None:
                    raise UnsupportedConstructError.at(
                        self.src, s.span.start, "statement before first case label")
                current.append(s)
        frame = _Frame(loop=stmt)
        self.loop_stack.append(frame)
        preds: list[CfgNode] = []
        default_index: int | None = None
        cond_recorded = False
        for label, _stmts in groups:
            if label.value is None:
                default_index = len(preds)
                preds.append(None)  # placeholder, no Pred for default
            else:
                # each Pred compares the switch scrutinee against one label,
                # so the scrutinee expression is its payload
                pred = self.new_node(CfgNodeKind.PRED, stmt.cond)
                if not cond_recorded:
                    self.record_calls(pred, stmt.cond)
                    cond_recorded = True
                preds.append(pred)
        firsts: list[int | None] = []
        dangles: list[list[tuple[int, EdgeLabel]]] = []
        for _, stmts in groups:
            f, d = self.lower_seq(stmts)
            firsts.append(f)
            dangles.append(d)
        self.loop_stack.pop()

        out: list[tuple[int, EdgeLabel]] = []
        # Wire the predicate chain.
        chain = [p for p in preds if p is not None]
        if chain:
            first_node = chain[0].id
        elif default_index is not None:
            # default-only switch: still evaluate the scrutinee once
            cond_node = self.new_node(CfgNodeKind.STMT, stmt.cond)
            self.record_calls(cond_node, stmt.cond)
            target = self._group_entry(firsts, dangles, default_index)
            if target is not None:
                self.edge(cond_node.id, target)
            first_node = cond_node.id
            if target is None:
                out.append((cond_node.id, EdgeLabel.EPSILON))
        else:
            first_node = None
        for gi, pred in enumerate(preds):
            if pred is None:
                continue
            target = self._group_entry(firsts, dangles, gi)
            if target is None:
                out.append((pred.id, EdgeLabel.TRUE))
            else:
                self.edge(pred.id, target, EdgeLabel.TRUE)
            nxt = self._next_pred(preds, gi)
            if nxt is not None:
                self.edge(pred.id, nxt.id, EdgeLabel.FALSE)
            elif default_index is not None:
                target = self._group_entry(firsts, dangles, default_index)
                if target is None:
                    out.append((pred.id, EdgeLabel.FALSE))
                else:
                    self.edge(pred.id, target, EdgeLabel.FALSE)
            else:
                out.append((pred.id, EdgeLabel.FALSE))
        # Fallthrough: each group's dangling exits run into the next group.
        for gi in range(len(groups)):
            nxt_entry = self._group_entry(firsts, dangles, gi + 1) if gi + 1 < len(groups) else None
            for nid, label in dangles[gi]:
                if nxt_entry is not None:
                    self.edge(nid, nxt_entry, label)
                else:
                    out.append((nid, label))
        for nid in frame.breaks:
            out.append((nid, EdgeLabel.EPSILON))
        return first_node, out

    def _group_entry(self, firsts, dangles, gi) -> int | None:
        while gi < len(firsts):
            if firsts[gi] is not None:
                return firsts[gi]
            gi += 1
        return None

    def _next_pred(self, preds, gi):
        for p in preds[gi + 1 :]:
            if p is not None:
                return p
        return None

    def lower_for(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        init_first, init_dangling = (None, [])
        if not stmt.for_init.is_empty:
            init_first, init_dangling = self.lower_stmt(stmt.for_init)

        frame = _Frame(loop=stmt)
        self.loop_stack.append(frame)
        has_cond = not stmt.for_cond.is_empty
        pred = self.new_node(CfgNodeKind.PRED, stmt.for_cond) if has_cond else None
        if pred is not None:
            self.record_calls(pred, stmt.for_cond)
        body_first, body_dangling = self.lower_stmt(stmt.body)
        latch = self.new_node(CfgNodeKind.LOOP_BACK,
                              stmt.for_inc if not stmt.for_inc.is_empty else None)
        if latch.ast is not None:
            self.record_calls(latch, latch.ast)
        self.loop_stack.pop()

        head = pred.id if pred is not None else (body_first if body_first is not None else latch.id)
        if init_first is not None:
            for nid, label in init_dangling:
                self.edge(nid, head, label)
            entry_id = init_first
        else:
            entry_id = head
        if pred is not None:
            if body_first is not None:
                self.edge(pred.id, body_first, EdgeLabel.TRUE)
            else:
                self.edge(pred.id, latch.id, EdgeLabel.TRUE)
        for nid, label in body_dangling:
            self.edge(nid, latch.id, label)
        for nid in frame.continues:
            self.edge(nid, latch.id)
        self.edge(latch.id, head, EdgeLabel.EPSILON, back=True)
        out = [(nid, EdgeLabel.EPSILON) for nid in frame.breaks]
        if pred is not None:
            out.append((pred.id, EdgeLabel.FALSE))
        return entry_id, out

    def lower_while(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        frame = _Frame(loop=stmt)
        self.loop_stack.append(frame)
        pred = self.new_node(CfgNodeKind.PRED, stmt.cond)
        self.record_calls(pred, stmt.cond)
        body_first, body_dangling = self.lower_stmt(stmt.body)
        latch = self.new_node(CfgNodeKind.LOOP_BACK)
        self.loop_stack.pop()

        if body_first is not None:
            self.edge(pred.id, body_first, EdgeLabel.TRUE)
        else:
            self.edge(pred.id, latch.id, EdgeLabel.TRUE)
        for nid, label in body_dangling:
            self.edge(nid, latch.id, label)
        for nid in frame.continues:
            self.edge(nid, latch.id)
        self.edge(latch.id, pred.id, EdgeLabel.EPSILON, back=True)
        out = [(nid, EdgeLabel.EPSILON) for nid in frame.breaks]
        out.append((pred.id, EdgeLabel.FALSE))
        return pred.id, out

    def lower_do(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        frame = _Frame(loop=stmt)
        self.loop_stack.append(frame)
        body_first, body_dangling = self.lower_stmt(stmt.body)
        pred = self.new_node(CfgNodeKind.PRED, stmt.cond)
        self.record_calls(pred, stmt.cond)
        self.loop_stack.pop()

        head = body_first if body_first is not None else pred.id
        for nid, label in body_dangling:
            self.edge(nid, pred.id, label)
        for nid in frame.continues:
            self.edge(nid, pred.id)
        self.edge(pred.id, head, EdgeLabel.TRUE, back=True)
        out = [(nid, EdgeLabel.EPSILON) for nid in frame.breaks]
        out.append((pred.id, EdgeLabel.FALSE))
        return head, out

    def lower_omp(self, stmt: AstNode) -> tuple[int | None, list[tuple[int, EdgeLabel]]]:
        info = stmt.omp
        if info.kind in KERNEL_KINDS:
            if self.device:
                raise UnsupportedConstructError.at(
                    self.src, stmt.span.start,
                    "nested target directive inside an offloaded region")
            node = self.new_node(CfgNodeKind.STMT, stmt)
            sub = _Builder(self.src, stmt.children[0], device=True).build()
            for call in stmt.children[0].find_all(NodeKind.CALL):
                self.cfg.call_sites.append(CallSite(node.id, call.name, call, True))
            node.sub_cfg = sub
            self.warnings.extend(sub.warnings)
            return node.id, [(node.id, EdgeLabel.EPSILON)]
        if info.kind in STANDALONE_KINDS:
            node = self.new_node(CfgNodeKind.STMT, stmt)
            return node.id, [(node.id, EdgeLabel.EPSILON)]
        if info.kind is DirectiveKind.TARGET_DATA:
            # marker node, then the captured statement lowered transparently;
            # the environment effects matter to the simulator, not the graph
            node = self.new_node(CfgNodeKind.STMT, stmt)
            first, dangling = self.lower_stmt(stmt.children[0])
            if first is None:
                return node.id, [(node.id, EdgeLabel.EPSILON)]
            self.edge(node.id, first)
            return node.id, dangling
        # non-target directive: transparent wrapper around its statement
        return self.lower_stmt(stmt.children[0]) if stmt.children else (None, [])


def build_astcfg(src: SourceFile, fn: AstNode) -> AstCfg:
    """Lower one function definition to its AST-CFG."""
    return _Builder(src, fn).build()


def mark_offloaded(cfg: AstCfg) -> AstCfg:
    """Flag kernel nodes and their device sub-graphs as offloaded."""
    for node in cfg.nodes:
        if node.sub_cfg is not None:
            node.offloaded = True
            for sub_node in node.sub_cfg.nodes:
                sub_node.offloaded = True
    return cfg


def dump_cfg(src: SourceFile, cfg: AstCfg, indent: str = "") -> str:
    """Tabular graph dump: ``node id | kind | offloaded | source line``."""
    lines = []
    for node in cfg.nodes:
        line = src.line_of(node.ast.span.start) if node.ast is not None else "-"
        lines.append(f"{indent}{node.id:4d} | {node.kind.value:8s} | "
                     f"{'yes' if node.offloaded else 'no':3s} | {line}")
        if node.sub_cfg is not None:
            lines.append(dump_cfg(src, node.sub_cfg, indent + "    "))
    for e in cfg.edges:
        tag = " back" if e.is_back_edge else ""
        lines.append(f"{indent}  edge {e.src} -> {e.dst} [{e.label.value}]{tag}")
    return "\n".join(lines)
