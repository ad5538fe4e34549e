"""Host/device data-flow analysis that plans mapping directives.

Each function with offloaded kernels gets one enclosing data region: the
region covers every kernel statement, lifted out of any loop containing a
kernel so per-iteration remapping never happens.  A per-variable pair of
validity flags (host copy current, device copy current) is threaded through
the statements in execution order; a read in a space whose copy is stale is
a dependency and is resolved, in preference order, by capturing scalars by
value at kernel launch, by a map clause on the region when the data only
needs to move at the region boundary, or by an update directive hoisted to
the outermost loop level that still transfers fresh data.

Branches fork the state and re-join by conjunction of the flags, so only
copies valid on every path stay valid.  Loop bodies run twice: a first pass
discovers which copies a full iteration invalidates, the entry state is
weakened accordingly, and the second pass plans directives that hold for
every iteration.  Writes never move data; they just flip the flags, so
write-after-read and write-after-write orderings cost nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .access import (AccessKind, MemoryAccess, Space, Storage, VariableId,
                     VariableTable, enclosing_statement, kernel_rw_sets,
                     reads, writes)
from .astcfg import AstCfg
from .bounds import (enclosing_for_loops, find_indexing_var,
                     find_update_insert_loc, finalize_update_anchor)
from .diagnostics import DeclPlacementError, PreconditionError
from .nodes import LOOP_KINDS, AstNode, NodeKind
from .omp import DATA_MAPPING_KINDS, OmpDirectiveInfo
from .source import SourceFile


class PlanKind(str, Enum):
    MAP_TO = "map_to"
    MAP_FROM = "map_from"
    MAP_TOFROM = "map_tofrom"
    MAP_ALLOC = "map_alloc"
    UPDATE_TO = "update_to"
    UPDATE_FROM = "update_from"
    FIRSTPRIVATE = "firstprivate"


# where a planned directive lands relative to its anchor statement
BEFORE = "before"
AFTER = "after"        # on the line following the anchor statement
BODY_END = "body_end"  # last thing inside a loop body, for loop-carried deps
REGION = "region"      # clause on the enclosing data region directive
KERNEL = "kernel"      # clause appended to one kernel's own directive

_JUMPS = (NodeKind.RETURN_STMT, NodeKind.BREAK_STMT, NodeKind.CONTINUE_STMT)


@dataclass(frozen=True)
class DirectivePlan:
    kind: PlanKind
    names: tuple[str, ...]
    anchor: AstNode
    position: str


@dataclass
class TargetDataRegion:
    block: AstNode       # compound statement holding begin/end
    begin: AstNode       # first statement covered
    end: AstNode         # last statement covered
    map_to: tuple[str, ...] = ()
    map_from: tuple[str, ...] = ()
    map_tofrom: tuple[str, ...] = ()
    map_alloc: tuple[str, ...] = ()

    def clause_text(self) -> str:
        parts = []
        for mt, names in (("to", self.map_to), ("tofrom", self.map_tofrom),
                          ("from", self.map_from), ("alloc", self.map_alloc)):
            if names:
                parts.append("map(%s: %s)" % (mt, ", ".join(names)))
        return " ".join(parts)


@dataclass
class FunctionPlan:
    function: AstNode
    region: TargetDataRegion | None
    kernel_clauses: list[DirectivePlan]   # map/firstprivate on kernel pragmas
    updates: list[DirectivePlan]
    suppressed: list[str] = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def all_plans(self) -> list[DirectivePlan]:
        return self.kernel_clauses + self.updates


class _VarState:
    __slots__ = ("host_valid", "device_valid")

    def __init__(self, host_valid=True, device_valid=False):
        self.host_valid = host_valid
        self.device_valid = device_valid

    def copy(self):
        return _VarState(self.host_valid, self.device_valid)


class _State:
    """Validity flags plus the provenance needed to anchor transfers."""

    def __init__(self):
        self.vars: dict[VariableId, _VarState] = {}
        self.device_producer: dict[VariableId, AstNode] = {}
        self.last_host_write: dict[VariableId, AstNode] = {}

    def of(self, var: VariableId) -> _VarState:
        st = self.vars.get(var)
        if st is None:
            st = self.vars[var] = _VarState()
        return st

    def copy(self) -> "_State":
        other = _State()
        other.vars = {v: s.copy() for v, s in self.vars.items()}
        other.device_producer = dict(self.device_producer)
        other.last_host_write = dict(self.last_host_write)
        return other

    def merge_conj(self, other: "_State") -> None:
        for var in set(self.vars) | set(other.vars):
            a, b = self.of(var), other.of(var)
            a.host_valid = a.host_valid and b.host_valid
            a.device_valid = a.device_valid and b.device_valid
        for key, stmt in other.device_producer.items():
            mine = self.device_producer.get(key)
            if mine is None or stmt.span.end > mine.span.end:
                self.device_producer[key] = stmt
        for key, stmt in other.last_host_write.items():
            mine = self.last_host_write.get(key)
            if mine is None or stmt.span.end > mine.span.end:
                self.last_host_write[key] = stmt


def _clause_names(info: OmpDirectiveInfo, clause: str) -> set[str]:
    names: set[str] = set()
    for cl in info.clauses:
        if cl.name != clause:
            continue
        for arg in cl.args:
            if ":" in arg:  # reduction(+: x) style
                arg = arg.split(":", 1)[1]
            if arg.strip():
                names.add(arg.strip())
    return names


def compute_region_extent(fn: AstNode, kernel_stmts: list[AstNode]
                          ) -> tuple[AstNode, AstNode, AstNode]:
    """(block, begin, end) of the data region covering every kernel.

    The block is the innermost compound statement containing all kernels,
    then hoisted above any loop wrapping it so the region opens at most once.
    """
    chains = []
    for k in kernel_stmts:
        chain = [a for a in [k, *k.ancestors()]]
        chains.append(chain)
    common = None
    for a in chains[0]:
        if a.kind is not NodeKind.COMPOUND_STMT:
            continue
        if all(a in c for c in chains[1:]):
            common = a
            break
    assert common is not None  # the function body contains every kernel
    block = common
    for a in block.ancestors():
        if a.kind in LOOP_KINDS:
            for b in a.ancestors():
                if b.kind is NodeKind.COMPOUND_STMT:
                    block = b
                    break
    lifted = []
    for k in kernel_stmts:
        node = k
        while node.parent is not block:
            node = node.parent
        lifted.append(node)
    lifted.sort(key=lambda n: n.span.start)
    return block, lifted[0], lifted[-1]


class _Analyzer:
    def __init__(self, src: SourceFile, cfg: AstCfg,
                 accesses: list[MemoryAccess], table: VariableTable,
                 allow_stale: frozenset[str] = frozenset()):
        self.src = src
        self.cfg = cfg
        self.fn = cfg.function
        self.accesses = accesses
        self.table = table
        self.allow_stale = allow_stale
        self.kernel_node_ids = {n.id for n in cfg.kernel_nodes()}
        self.kernel_stmts = [cfg.node(i).ast for i in sorted(self.kernel_node_ids)]
        self.kernel_stmts.sort(key=lambda n: n.span.start)
        self.stmt_groups: dict[AstNode, list[MemoryAccess]] = {}
        for acc in accesses:
            if acc.space is Space.DEVICE and acc.cfg_node in self.kernel_node_ids:
                continue  # folded into per-kernel read/write sets instead
            stmt = enclosing_statement(acc.ast)
            self.stmt_groups.setdefault(stmt, []).append(acc)
        self.state = _State()
        self.presence: set[VariableId] = set()
        self.to_comp: set[VariableId] = set()
        self.from_comp: set[VariableId] = set()
        self.updates: list[DirectivePlan] = []
        self.firstprivates: list[DirectivePlan] = []
        self.suppressed: list[str] = []
        self._plan_keys: set = set()
        self._plan_log: list[tuple] = []
        self.region_block: AstNode | None = None
        self.region_begin: AstNode | None = None
        self.region_end: AstNode | None = None
        if self.kernel_stmts:
            self.region_block, self.region_begin, self.region_end = \
                compute_region_extent(self.fn, self.kernel_stmts)

    # ---- region geometry ------------------------------------------------

    def in_region(self, stmt: AstNode) -> bool:
        if self.region_begin is None:
            return False
        return (stmt.span.start >= self.region_begin.span.start
                and stmt.span.end <= self.region_end.span.end)

    def after_region(self, stmt: AstNode) -> bool:
        if self.region_end is None:
            return False
        return stmt.span.start > self.region_end.span.end

    def check_decl_placement(self, var: VariableId) -> None:
        if var.storage is not Storage.LOCAL or var.decl is None:
            return
        if self.region_begin is None:
            return
        if var.decl.span.start >= self.region_begin.span.start:
            begin_line = self.src.line_of(self.region_begin.span.start)
            decl_line = self.src.line_of(var.decl.span.start)
            raise DeclPlacementError(
                "'%s' needs a device mapping but is declared at line %d, "
                "after the data region opening at line %d; move the "
                "declaration above the region" % (var.name, decl_line,
                                                  begin_line),
                path=self.src.path, line=decl_line)

    # ---- plan emission --------------------------------------------------

    def _add_plan(self, bucket: list[DirectivePlan], kind: PlanKind, var,
                  anchor: AstNode, position: str, record: bool) -> None:
        self._plan_log.append((kind, var, anchor, position))
        if not record:
            return
        key = (kind, var.name, id(anchor), position)
        if key in self._plan_keys:
            return
        self._plan_keys.add(key)
        bucket.append(DirectivePlan(kind, (var.name,), anchor, position))

    def _hoist(self, access_stmt: AstNode, subscript: AstNode | None,
               var: VariableId, loc_lim: int) -> AstNode:
        loops = enclosing_for_loops(access_stmt, stop_at=self.fn)
        pos = find_update_insert_loc(access_stmt, subscript, loops, loc_lim)
        anchor = finalize_update_anchor(pos, access_stmt, var, self.accesses,
                                        loops)
        return self._normalize_anchor(anchor)

    def _normalize_anchor(self, anchor: AstNode) -> AstNode:
        """Climb until a directive line can legally precede the anchor."""
        while anchor.parent is not None:
            p = anchor.parent
            if p.kind in (NodeKind.COMPOUND_STMT, NodeKind.FUNCTION_DEF):
                return anchor
            if p.kind in (NodeKind.IF_STMT, NodeKind.OMP_DIRECTIVE,
                          NodeKind.SWITCH_STMT):
                anchor = p
                continue
            if p.kind is NodeKind.FOR_STMT and anchor is not p.body:
                anchor = p
                continue
            raise PreconditionError.at(
                self.src, anchor.span.start,
                "braces are required around this loop body to place an "
                "update directive")
        return anchor

    # ---- access semantics -----------------------------------------------

    def host_read(self, var: VariableId, stmt: AstNode,
                  subscript: AstNode | None, record: bool,
                  anchor_override: tuple[str, AstNode] | None = None) -> None:
        st = self.state.of(var)
        if st.host_valid:
            return
        if var.name in self.allow_stale:
            if record and var.name not in self.suppressed:
                self.suppressed.append(var.name)
            st.host_valid = True
            return
        if self.after_region(stmt):
            self.presence.add(var)
            self.from_comp.add(var)
            st.host_valid = True
            return
        producer = self.state.device_producer.get(var)
        loc_lim = producer.span.end if producer is not None else 0
        if anchor_override is not None:
            position, anchor = anchor_override
        else:
            anchor = self._hoist(stmt, subscript, var, loc_lim)
            position = BEFORE
        self._add_plan(self.updates, PlanKind.UPDATE_FROM, var, anchor,
                       position, record)
        st.host_valid = True

    def host_write(self, var: VariableId, stmt: AstNode) -> None:
        st = self.state.of(var)
        st.host_valid = True
        st.device_valid = False
        self.state.last_host_write[var] = stmt

    def device_read(self, var: VariableId, stmt: AstNode, record: bool,
                    kernel_writes: set[VariableId] = frozenset(),
                    anchor_override: tuple[str, AstNode] | None = None) -> None:
        st = self.state.of(var)
        if st.device_valid:
            return
        if var.name in self.allow_stale:
            if record and var.name not in self.suppressed:
                self.suppressed.append(var.name)
            st.device_valid = True
            return
        if (var.is_scalar and var not in kernel_writes and st.host_valid
                and stmt.kind is NodeKind.OMP_DIRECTIVE):
            self._add_plan(self.firstprivates, PlanKind.FIRSTPRIVATE, var,
                           stmt, KERNEL, record)
            return
        self.presence.add(var)
        if record:
            self.check_decl_placement(var)
        last_w = self.state.last_host_write.get(var)
        host_wrote_in_region = (last_w is not None and self.region_begin
                                and last_w.span.start
                                >= self.region_begin.span.start)
        if not host_wrote_in_region:
            self.to_comp.add(var)
            st.device_valid = True
            return
        loc_lim = last_w.span.end
        subscript = self._device_read_subscript(var, stmt)
        if anchor_override is not None:
            position, anchor = anchor_override
        else:
            anchor = self._hoist(stmt, subscript, var, loc_lim)
            position = BEFORE
        self._add_plan(self.updates, PlanKind.UPDATE_TO, var, anchor,
                       position, record)
        st.device_valid = True

    def device_write(self, var: VariableId, stmt: AstNode,
                     record: bool) -> None:
        st = self.state.of(var)
        self.presence.add(var)
        if record:
            self.check_decl_placement(var)
        st.device_valid = True
        st.host_valid = False
        self.state.device_producer[var] = stmt

    def _device_read_subscript(self, var: VariableId,
                               kernel_stmt: AstNode) -> AstNode | None:
        node = self.cfg.node_of_ast.get(kernel_stmt)
        if node is None:
            return None
        for acc in self.accesses:
            if (acc.cfg_node == node.id and acc.space is Space.DEVICE
                    and acc.var is var and reads(acc.kind)
                    and acc.subscript is not None):
                return acc.subscript
        return None

    # ---- statement traversal --------------------------------------------

    def run(self) -> FunctionPlan:
        body = self.fn.body
        if body is not None:
            self.exec_block(body, record=True)
        self._escape_liveness()
        return self._finish()

    def exec_block(self, block: AstNode, record: bool) -> None:
        for stmt in block.children:
            self.exec_stmt(stmt, record)

    def _group(self, stmt: AstNode) -> list[MemoryAccess]:
        return self.stmt_groups.get(stmt, [])

    def _accs_in(self, stmt: AstNode, sub: AstNode) -> list[MemoryAccess]:
        return [a for a in self._group(stmt)
                if sub.span.start <= a.ast.span.start < sub.span.end]

    def process_accesses(self, stmt: AstNode, accs: list[MemoryAccess],
                         record: bool,
                         anchor_override=None) -> None:
        inside = self.in_region(stmt)
        for acc in accs:
            if acc.kind is AccessKind.UNKNOWN:
                continue  # call into an unseen body; effects already expanded
            space = acc.space
            if space is Space.DEVICE and not inside:
                # the callee opens and closes its own region around its
                # kernels, so from here the data round-trips through the host
                space = Space.HOST
            if space is Space.HOST:
                if reads(acc.kind):
                    self.host_read(acc.var, stmt, acc.subscript, record,
                                   anchor_override)
                if writes(acc.kind):
                    self.host_write(acc.var, stmt)
            else:
                if reads(acc.kind):
                    self.device_read(acc.var, stmt, record,
                                     anchor_override=anchor_override)
                if writes(acc.kind):
                    self.device_write(acc.var, stmt, record)

    def exec_stmt(self, stmt: AstNode, record: bool) -> None:
        kind = stmt.kind
        if kind is NodeKind.COMPOUND_STMT:
            self.exec_block(stmt, record)
        elif kind is NodeKind.OMP_DIRECTIVE:
            self.exec_omp(stmt, record)
        elif kind is NodeKind.IF_STMT:
            self.exec_if(stmt, record)
        elif kind is NodeKind.FOR_STMT:
            self.exec_for(stmt, record)
        elif kind is NodeKind.WHILE_STMT:
            self.exec_while(stmt, record)
        elif kind is NodeKind.DO_STMT:
            self.exec_do(stmt, record)
        elif kind is NodeKind.SWITCH_STMT:
            self.exec_switch(stmt, record)
        else:
            self.process_accesses(stmt, self._group(stmt), record)

    def exec_omp(self, stmt: AstNode, record: bool) -> None:
        info = stmt.omp
        if info.kind in DATA_MAPPING_KINDS:
            raise PreconditionError(
                "input already contains a '%s' directive; analysis expects "
                "unmapped offload regions" % info.kind.value,
                path=self.src.path,
                line=self.src.line_of(stmt.span.start))
        node = self.cfg.node_of_ast.get(stmt)
        if node is None or node.sub_cfg is None:
            if stmt.children:  # non-target construct wraps a normal statement
                self.exec_stmt(stmt.children[0], record)
            return
        entry_reads, kernel_writes = kernel_rw_sets(self.accesses, node.id,
                                                    stmt)
        captured = _clause_names(info, "firstprivate")
        private = _clause_names(info, "private") | _clause_names(info,
                                                                 "linear")
        # loop control variables of offloaded loops are private per thread;
        # their writes never reach the original host variable
        for f in stmt.find_all(NodeKind.FOR_STMT):
            v = find_indexing_var(f)
            if v is not None:
                private.add(v)
        for var in sorted(entry_reads, key=lambda v: v.name):
            if var.name in private:
                continue
            if var.name in captured:
                self.host_read(var, stmt, None, record)
                continue
            self.device_read(var, stmt, record, kernel_writes=kernel_writes)
        for var in sorted(kernel_writes, key=lambda v: v.name):
            if var.name in private or var.name in captured:
                continue
            self.device_write(var, stmt, record)
        # calls made from inside the kernel were expanded onto this node
        extra = [a for a in self._group(stmt)]
        if extra:
            self.process_accesses(stmt, extra, record)

    def exec_if(self, stmt: AstNode, record: bool) -> None:
        self.process_accesses(stmt, self._group(stmt), record)
        saved = self.state
        then_state = saved.copy()
        self.state = then_state
        self.exec_stmt(stmt.then_branch, record)
        arms = [(then_state, self._arm_anchor(stmt.then_branch))]
        else_state = saved.copy()
        if stmt.else_branch is not None:
            self.state = else_state
            self.exec_stmt(stmt.else_branch, record)
            arms.append((else_state, self._arm_anchor(stmt.else_branch)))
        else:
            arms.append((else_state, None))
        self.state = self._merge_arms(stmt, arms, record)

    def _arm_anchor(self, arm: AstNode):
        """Insertion point for a directive that must run last in this arm."""
        if arm.kind is NodeKind.COMPOUND_STMT:
            if not arm.children:
                return None
            last = arm.children[-1]
            if last.kind in _JUMPS:
                return (BEFORE, last)
            return (AFTER, last)
        if arm.kind in _JUMPS:
            return None
        return ("braces", arm)

    def _merge_arms(self, stmt: AstNode, arms, record: bool):
        """Conjunction-merge exclusive arms, reconciling split freshness.

        When one arm leaves only the device copy of a variable current and a
        sibling leaves only the host copy current, plain conjunction would
        mark both copies invalid and a later consumer would be fed from a
        stale source on one path.  Copying the device value back at the end
        of each device-newer arm restores a host copy that is current on
        every path.  A ``None`` anchor stands for a path with no body of its
        own (absent else, absent default, empty arm); its copy-back runs
        just before the whole branch statement, which is harmless on the
        sibling paths because they overwrite the host copy anyway.
        """
        names = set()
        for st, _ in arms:
            names.update(st.vars)
        for var in sorted(names, key=lambda v: v.name):
            views = [st.of(var) for st, _ in arms]
            dev_newer = [i for i, v in enumerate(views)
                         if v.device_valid and not v.host_valid]
            host_newer = any(v.host_valid and not v.device_valid
                             for v in views)
            if not dev_newer or not host_newer:
                continue
            for i in dev_newer:
                st, anchor = arms[i]
                if anchor is None:
                    anchor = (BEFORE, self._normalize_anchor(stmt))
                elif anchor[0] == "braces":
                    raise PreconditionError.at(
                        self.src, anchor[1].span.start,
                        "braces are required around this branch arm to "
                        "place an update directive")
                self._add_plan(self.updates, PlanKind.UPDATE_FROM, var,
                               anchor[1], anchor[0], record)
                st.of(var).host_valid = True
        merged = arms[0][0]
        for st, _ in arms[1:]:
            merged.merge_conj(st)
        return merged

    def _loop_rounds(self, stmt: AstNode, one_round, record: bool,
                     may_skip: bool) -> None:
        """Dry round, weaken the entry state, then the planning round."""
        entry = self.state.copy()
        one_round(record=False)
        self.state.merge_conj(entry)
        weakened = self.state.copy()
        mark = len(self._plan_log)
        one_round(record=record)
        if may_skip:
            # updates hoisted to a spot ahead of the loop run even when the
            # body does not, so the zero-trip path sees their effect too
            skip = weakened
            for kind, var, anchor, position in self._plan_log[mark:]:
                pre = (position == BEFORE
                       and anchor.span.start <= stmt.span.start) \
                    or (position == AFTER
                        and anchor.span.end <= stmt.span.start)
                if not pre:
                    continue
                if kind is PlanKind.UPDATE_FROM:
                    skip.of(var).host_valid = True
                elif kind is PlanKind.UPDATE_TO:
                    skip.of(var).device_valid = True
            self.state.merge_conj(skip)

    def exec_for(self, stmt: AstNode, record: bool) -> None:
        self.exec_stmt(stmt.for_init, record)
        cond_accs = self._accs_in(stmt, stmt.for_cond)
        inc_accs = self._accs_in(stmt, stmt.for_inc)
        self.process_accesses(stmt, cond_accs, record)

        def one_round(record):
            self.exec_stmt(stmt.body, record)
            self.process_accesses(stmt, inc_accs, record)
            self.process_accesses(stmt, cond_accs, record,
                                  anchor_override=(BODY_END, stmt))

        self._loop_rounds(stmt, one_round, record, may_skip=True)

    def exec_while(self, stmt: AstNode, record: bool) -> None:
        cond_accs = self._accs_in(stmt, stmt.cond)
        self.process_accesses(stmt, cond_accs, record)

        def one_round(record):
            self.exec_stmt(stmt.body, record)
            self.process_accesses(stmt, cond_accs, record,
                                  anchor_override=(BODY_END, stmt))

        self._loop_rounds(stmt, one_round, record, may_skip=True)

    def exec_do(self, stmt: AstNode, record: bool) -> None:
        cond_accs = self._accs_in(stmt, stmt.cond)

        def one_round(record):
            self.exec_stmt(stmt.body, record)
            self.process_accesses(stmt, cond_accs, record,
                                  anchor_override=(BODY_END, stmt))

        self._loop_rounds(stmt, one_round, record, may_skip=False)

    def exec_switch(self, stmt: AstNode, record: bool) -> None:
        self.process_accesses(stmt, self._group(stmt), record)
        body = stmt.body
        if body is None or body.kind is not NodeKind.COMPOUND_STMT:
            if body is not None:
                self.exec_stmt(body, record)
            return
        # arms are approximated as exclusive: each case group runs from the
        # switch entry state, results merge by conjunction
        groups: list[list[AstNode]] = []
        has_default = False
        for child in body.children:
            if child.kind is NodeKind.CASE_LABEL:
                groups.append([])
                if child.value is None:
                    has_default = True
                continue
            if not groups:
                groups.append([])
            groups[-1].append(child)
        saved = self.state
        arms = []
        for group in groups:
            self.state = saved.copy()
            for s in group:
                self.exec_stmt(s, record)
            arms.append((self.state, self._group_anchor(group)))
        if not has_default:
            arms.append((saved.copy(), None))
        if not arms:
            self.state = saved
            return
        self.state = self._merge_arms(stmt, arms, record)

    def _group_anchor(self, group: list[AstNode]):
        if not group:
            return None
        last = group[-1]
        if last.kind in _JUMPS:
            return (BEFORE, last)
        return (AFTER, last)

    # ---- wrap-up ---------------------------------------------------------

    def _escape_liveness(self) -> None:
        for var in sorted(self.presence, key=lambda v: v.name):
            st = self.state.of(var)
            if st.device_valid and not st.host_valid \
                    and var.storage is not Storage.LOCAL:
                self.from_comp.add(var)

    def _finish(self) -> FunctionPlan:
        if not self.kernel_stmts:
            return FunctionPlan(self.fn, None, [], [], self.suppressed)
        to_names = {v.name for v in self.to_comp}
        from_names = {v.name for v in self.from_comp}
        tofrom = sorted(to_names & from_names)
        to_only = sorted(to_names - from_names)
        from_only = sorted(from_names - to_names)
        alloc = sorted({v.name for v in self.presence}
                       - to_names - from_names)
        kernel_clauses = list(self.firstprivates)
        single = (len(self.kernel_stmts) == 1
                  and self.region_begin is self.kernel_stmts[0]
                  and self.region_end is self.kernel_stmts[0]
                  and not self.updates)
        region = None
        if single:
            k = self.kernel_stmts[0]
            for kind, names in ((PlanKind.MAP_TO, to_only),
                                (PlanKind.MAP_TOFROM, tofrom),
                                (PlanKind.MAP_FROM, from_only),
                                (PlanKind.MAP_ALLOC, alloc)):
                if names:
                    kernel_clauses.append(
                        DirectivePlan(kind, tuple(names), k, KERNEL))
        elif self.presence or self.updates:
            self._check_region_scoping()
            region = TargetDataRegion(
                block=self.region_block, begin=self.region_begin,
                end=self.region_end, map_to=tuple(to_only),
                map_from=tuple(from_only), map_tofrom=tuple(tofrom),
                map_alloc=tuple(alloc))
        return FunctionPlan(self.fn, region, kernel_clauses, self.updates,
                            self.suppressed)

    def _check_region_scoping(self) -> None:
        """The new region braces must not cut a declaration off from later
        uses; that would change what the program means, so the declaration
        has to move instead."""
        lo = self.region_begin.span.start
        hi = self.region_end.span.end
        inside = {}
        for acc in self.accesses:
            d = acc.var.decl
            if d is None or not (lo <= d.span.start < hi):
                continue
            if acc.ast.span.start >= hi and acc.ast is not d:
                inside.setdefault(acc.var, acc)
        for var, acc in sorted(inside.items(), key=lambda kv: kv[0].name):
            raise DeclPlacementError.at(
                self.src, var.decl.span.start,
                "'%s' is declared at line %d inside the new data region "
                "(lines %d..%d) but used at line %d after it; move the "
                "declaration above the region" % (
                    var.name, self.src.line_of(var.decl.span.start),
                    self.src.line_of(lo), self.src.line_of(hi - 1),
                    self.src.line_of(acc.ast.span.start)))


def analyze_function(src: SourceFile, cfg: AstCfg,
                     accesses: list[MemoryAccess], table: VariableTable,
                     allow_stale: frozenset[str] = frozenset()) -> FunctionPlan:
    return _Analyzer(src, cfg, accesses, table, allow_stale).run()
