"""Abstract execution that accounts host/device transfers and stale reads.

The program is walked statement by statement with a reference-counted device
data environment, the way an offloading runtime keeps one: mapping an
already-present variable only bumps its count, and data moves only on the
0-to-1 (copy in, for `to`/`tofrom` map types) and 1-to-0 (copy out, for
`from`/`tofrom`) transitions.  An update directive moves data only while the
variable is present; otherwise it is a no-op, which is exactly how silent
staleness arises in real programs.

Each variable carries two freshness flags, one per memory space.  Transfers
propagate the source flag, writes set their own space and clear the other,
and a read through a cleared flag is recorded as a stale read instead of
aborting the run.

Two accounting modes exist.  `annotated` honors the mapping directives in
the input; whatever a kernel references without an explicit clause follows
the default rules (arrays copy in and out around every launch, scalars pass
by value).  `implicit` ignores every data directive and clause so the whole
program pays the per-launch default cost; comparing the two modes prices an
annotation scheme.

Loops batch into steady state: iterations run concretely until two in a row
produce the same environment and the same transfer pattern, then the rest
of the trip count multiplies the final pattern through the event counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .access import (AccessKind, MemoryAccess, Space, VariableId,
                     VariableTable, enclosing_statement, kernel_referenced_vars,
                     reads, writes)
from .astcfg import AstCfg
from .bounds import extract_for_bounds, find_indexing_var
from .diagnostics import ConfigError
from .interproc import CallSummary
from .nodes import AstNode, NodeKind
from .omp import KERNEL_KINDS, DirectiveKind, OmpDirectiveInfo
from .parser import fold_int
from .source import SourceFile

MODE_ANNOTATED = "annotated"
MODE_IMPLICIT = "implicit"


@dataclass
class SimConfig:
    sizes: dict[str, int] = field(default_factory=dict)
    default_trip: int = 1
    mode: str = MODE_ANNOTATED
    pointer_default: int = 1024
    max_call_depth: int = 16

    def validate(self) -> None:
        if self.mode not in (MODE_ANNOTATED, MODE_IMPLICIT):
            raise ConfigError("unknown accounting mode %r" % self.mode)
        if self.default_trip < 0:
            raise ConfigError("default trip count must be non-negative")


@dataclass
class TransferEvent:
    direction: str  # "htod" | "dtoh"
    var: str
    bytes_per_call: int
    line: int
    count: int = 1

    @property
    def total_bytes(self) -> int:
        return self.bytes_per_call * self.count


@dataclass
class StaleRead:
    var: str
    space: str
    line: int
    count: int = 1

    def render(self) -> str:
        return ("stale %s read of '%s' at line %d (x%d)"
                % (self.space, self.var, self.line, self.count))


@dataclass
class TransferLog:
    events: list[TransferEvent] = field(default_factory=list)
    stale_reads: list[StaleRead] = field(default_factory=list)

    def calls(self, direction: str) -> int:
        return sum(e.count for e in self.events if e.direction == direction)

    def bytes(self, direction: str) -> int:
        return sum(e.total_bytes for e in self.events
                   if e.direction == direction)

    @property
    def htod_calls(self) -> int:
        return self.calls("htod")

    @property
    def dtoh_calls(self) -> int:
        return self.calls("dtoh")

    @property
    def htod_bytes(self) -> int:
        return self.bytes("htod")

    @property
    def dtoh_bytes(self) -> int:
        return self.bytes("dtoh")

    @property
    def stale_count(self) -> int:
        return sum(s.count for s in self.stale_reads)


@dataclass
class FunctionInfo:
    name: str
    fn: AstNode
    cfg: AstCfg
    accesses: list[MemoryAccess]


@dataclass
class ProgramModel:
    src: SourceFile
    tu: AstNode
    table: VariableTable
    functions: dict[str, FunctionInfo]
    summaries: dict[str, CallSummary] = field(default_factory=dict)

    def entry_names(self) -> list[str]:
        if "main" in self.functions:
            return ["main"]
        return [name for name, fi in self.functions.items()
                if fi.cfg.kernel_nodes()]


@dataclass
class SimReport:
    mode: str
    entries: list[str]
    log: TransferLog
    warnings: list[str]
    final_refs: dict[str, int]


class _VarSim:
    __slots__ = ("ref", "host_valid", "device_valid")

    def __init__(self):
        self.ref = 0
        self.host_valid = True
        self.device_valid = False


class _FnCtx:
    """Per-function lookup tables, computed once."""

    def __init__(self, info: FunctionInfo, table: VariableTable):
        self.info = info
        self.groups: dict[AstNode, list[MemoryAccess]] = {}
        for acc in info.accesses:
            stmt = enclosing_statement(acc.ast)
            self.groups.setdefault(stmt, []).append(acc)
        self.name_index: dict[str, VariableId] = {}
        for p in info.fn.params:
            self.name_index.setdefault(p.name, table.for_decl(p))
        for acc in info.accesses:
            self.name_index.setdefault(acc.var.name, acc.var)


_MAX_CONCRETE_ROUNDS = 10000


class _Simulator:
    def __init__(self, program: ProgramModel, config: SimConfig):
        config.validate()
        self.program = program
        self.config = config
        self.src = program.src
        self.table = program.table
        self.state: dict[VariableId, _VarSim] = {}
        self.log = TransferLog()
        self.warnings: list[str] = []
        self.alias: dict[VariableId, VariableId] = {}
        self.concrete: dict[str, int] = {}
        self.depth = 0
        self.returned = False
        self._warned: set[str] = set()
        self._fn_ctx: dict[str, _FnCtx] = {}

    # ---- environment -----------------------------------------------------

    def resolve(self, var: VariableId) -> VariableId:
        while var in self.alias:
            var = self.alias[var]
        return var

    def st(self, var: VariableId) -> _VarSim:
        var = self.resolve(var)
        s = self.state.get(var)
        if s is None:
            s = self.state[var] = _VarSim()
        return s

    def warn_once(self, message: str) -> None:
        if message not in self._warned:
            self._warned.add(message)
            self.warnings.append(message)

    def _ctx(self, name: str) -> _FnCtx | None:
        ctx = self._fn_ctx.get(name)
        if ctx is None and name in self.program.functions:
            ctx = _FnCtx(self.program.functions[name], self.table)
            self._fn_ctx[name] = ctx
        return ctx

    # ---- transfers -------------------------------------------------------

    def _copy(self, direction: str, var: VariableId, line: int) -> None:
        self.log.events.append(TransferEvent(direction, var.name,
                                             var.total_bytes, line))
        s = self.st(var)
        if direction == "htod":
            s.device_valid = s.host_valid
        else:
            s.host_valid = s.device_valid

    def map_enter(self, var: VariableId, maptype: str, line: int) -> None:
        s = self.st(var)
        if s.ref == 0:
            if maptype in ("to", "tofrom"):
                self._copy("htod", var, line)
            else:
                s.device_valid = False
        s.ref += 1

    def map_exit(self, var: VariableId, maptype: str, line: int) -> None:
        s = self.st(var)
        if s.ref == 0:
            self.warn_once("unbalanced unmap of '%s'" % var.name)
            return
        s.ref -= 1
        if s.ref == 0:
            if maptype in ("from", "tofrom"):
                self._copy("dtoh", var, line)
            s.device_valid = False

    def update(self, var: VariableId, direction: str, line: int) -> None:
        s = self.st(var)
        if s.ref == 0:
            self.warn_once("update of '%s' at line %d ignored: not mapped"
                           % (var.name, line))
            return
        self._copy("htod" if direction == "to" else "dtoh", var, line)

    # ---- reads and writes ------------------------------------------------

    def read(self, var: VariableId, space: Space, line: int) -> None:
        s = self.st(var)
        ok = s.host_valid if space is Space.HOST else s.device_valid
        if not ok:
            self.log.stale_reads.append(
                StaleRead(self.resolve(var).name, space.value, line))

    def write(self, var: VariableId, space: Space) -> None:
        s = self.st(var)
        if space is Space.HOST:
            s.host_valid = True
            if s.ref > 0:
                s.device_valid = False
        else:
            s.device_valid = True
            s.host_valid = False

    def apply_access(self, acc: MemoryAccess, space: Space) -> None:
        line = self.src.line_of(acc.ast.span.start)
        if reads(acc.kind):
            self.read(acc.var, space, line)
        if writes(acc.kind):
            self.write(acc.var, space)
            self._note_scalar_write(acc)

    def _note_scalar_write(self, acc: MemoryAccess) -> None:
        var = acc.var
        if not var.is_scalar:
            return
        if acc.ast.kind is NodeKind.VAR_DECL and acc.ast.children:
            val = fold_int(acc.ast.children[0], self.concrete)
            if val is not None:
                self.concrete[var.name] = val
                return
        self.concrete.pop(var.name, None)

    # ---- statement execution ---------------------------------------------

    def run(self) -> SimReport:
        entries = self.program.entry_names()
        for name in entries:
            self.exec_function(name, {})
        refs = {v.name: s.ref for v, s in self.state.items() if s.ref}
        return SimReport(self.config.mode, entries, self.log, self.warnings,
                         refs)

    def exec_function(self, name: str,
                      bindings: dict[VariableId, VariableId],
                      space: Space = Space.HOST) -> None:
        ctx = self._ctx(name)
        if ctx is None or ctx.info.fn.body is None:
            return
        if self.depth > self.config.max_call_depth:
            self.warn_once("call depth limit reached at '%s'; deeper effects "
                           "are not accounted" % name)
            return
        saved_alias = {}
        for formal, actual in bindings.items():
            saved_alias[formal] = self.alias.get(formal)
            self.alias[formal] = actual
        saved_concrete, self.concrete = self.concrete, {}
        saved_returned, self.returned = self.returned, False
        saved_ctx = getattr(self, "cur", None)
        self.cur = ctx
        self.depth += 1
        try:
            self.exec_block(ctx.info.fn.body, space)
        finally:
            self.depth -= 1
            self.cur = saved_ctx
            self.returned = saved_returned
            self.concrete = saved_concrete
            for formal, old in saved_alias.items():
                if old is None:
                    self.alias.pop(formal, None)
                else:
                    self.alias[formal] = old

    def exec_block(self, block: AstNode, space: Space) -> None:
        for stmt in block.children:
            if self.returned:
                return
            self.exec_stmt(stmt, space)

    def _group(self, stmt: AstNode) -> list[MemoryAccess]:
        return self.cur.groups.get(stmt, [])

    def _accs_in(self, stmt: AstNode, sub: AstNode) -> list[MemoryAccess]:
        return [a for a in self._group(stmt)
                if sub.span.start <= a.ast.span.start < sub.span.end]

    def process(self, accs: list[MemoryAccess], space: Space,
                scan: AstNode | None = None) -> None:
        handled_calls: set[int] = set()
        for acc in accs:
            eff = Space.DEVICE if space is Space.DEVICE else acc.space
            if acc.kind is AccessKind.UNKNOWN:
                call = self._call_of(acc.ast)
                if call is None:
                    continue
                if id(call) in handled_calls:
                    continue
                handled_calls.add(id(call))
                self.exec_call(call, eff)
                continue
            self.apply_access(acc, eff)
        if scan is None:
            return
        # calls whose arguments expose no memory never show up as accesses,
        # but a defined callee may still touch globals or launch kernels
        for call in scan.find_all(NodeKind.CALL):
            if id(call) in handled_calls:
                continue
            if call.name in self.program.functions:
                handled_calls.add(id(call))
                self.exec_call(call, space)

    @staticmethod
    def _call_of(ast: AstNode) -> AstNode | None:
        node = ast
        while node is not None and node.kind is not NodeKind.CALL:
            node = node.parent
        return node

    def exec_call(self, call: AstNode, space: Space) -> None:
        name = call.name
        ctx = self._ctx(name)
        if ctx is None:
            # unseen body: assume it may read and rewrite every exposed arg,
            # unless a prototype marked the parameter const (read-only)
            summary = self.program.summaries.get(name)
            for i, arg in enumerate(call.children):
                root = self._arg_root(arg)
                if root is None:
                    continue
                line = self.src.line_of(arg.span.start)
                self.read(root, space, line)
                eff = summary.param_effects.get(i) if summary else None
                if eff is None or eff.kind is not AccessKind.READ:
                    self.write(root, space)
            return
        bindings: dict[VariableId, VariableId] = {}
        params = ctx.info.fn.params
        for i, arg in enumerate(call.children):
            if i >= len(params):
                break
            root = self._arg_root(arg)
            if root is None:
                continue
            formal = self.table.for_decl(params[i])
            bindings[formal] = self.resolve(root)
        self.exec_function(name, bindings, space)

    def _arg_root(self, arg: AstNode) -> VariableId | None:
        node = arg
        while node.kind in (NodeKind.UNARY_OP, NodeKind.BINARY_OP,
                            NodeKind.CAST, NodeKind.ARRAY_SUBSCRIPT,
                            NodeKind.MEMBER_ACCESS):
            node = node.children[0]
        if node.kind is NodeKind.DECL_REF:
            ti = node.type_info
            if ti is not None and ti.is_pointerish:
                return self.table.for_ref(node)
            if arg.kind is NodeKind.UNARY_OP and arg.op == "&":
                return self.table.for_ref(node)
        return None

    def exec_stmt(self, stmt: AstNode, space: Space) -> None:
        kind = stmt.kind
        if kind is NodeKind.COMPOUND_STMT:
            self.exec_block(stmt, space)
        elif kind is NodeKind.OMP_DIRECTIVE:
            self.exec_omp(stmt, space)
        elif kind is NodeKind.IF_STMT:
            self.exec_if(stmt, space)
        elif kind is NodeKind.FOR_STMT:
            self.exec_for(stmt, space)
        elif kind is NodeKind.WHILE_STMT:
            self.exec_while(stmt, space)
        elif kind is NodeKind.DO_STMT:
            self.exec_do(stmt, space)
        elif kind is NodeKind.SWITCH_STMT:
            self.exec_switch(stmt, space)
        elif kind is NodeKind.RETURN_STMT:
            self.process(self._group(stmt), space, scan=stmt)
            self.returned = True
        else:
            self.process(self._group(stmt), space, scan=stmt)

    # ---- control flow ----------------------------------------------------

    def exec_if(self, stmt: AstNode, space: Space) -> None:
        self.process(self._group(stmt), space)
        cond = fold_int(stmt.cond, self.concrete)
        taken, untaken = stmt.then_branch, stmt.else_branch
        if cond is not None and cond == 0:
            taken, untaken = untaken, taken
        if taken is not None:
            self.exec_stmt(taken, space)
        if untaken is None or cond is not None:
            # a statically decided arm never runs, so nothing to check
            return
        # the untaken arm still gets checked for stale reads, without
        # letting its writes or transfers take effect
        mark_e = len(self.log.events)
        saved = {v: (s.ref, s.host_valid, s.device_valid)
                 for v, s in self.state.items()}
        saved_concrete = dict(self.concrete)
        saved_returned = self.returned
        self.exec_stmt(untaken, space)
        del self.log.events[mark_e:]
        for v, (ref, hv, dv) in saved.items():
            s = self.state[v]
            s.ref, s.host_valid, s.device_valid = ref, hv, dv
        for v in list(self.state):
            if v not in saved:
                del self.state[v]
        self.concrete = saved_concrete
        self.returned = saved_returned

    def exec_switch(self, stmt: AstNode, space: Space) -> None:
        self.process(self._group(stmt), space)
        body = stmt.body
        if body is None:
            return
        if body.kind is not NodeKind.COMPOUND_STMT:
            self.exec_stmt(body, space)
            return
        for child in body.children:
            if child.kind is NodeKind.CASE_LABEL:
                continue
            self.exec_stmt(child, space)
            if self.returned:
                break

    def _snapshot(self):
        env = tuple(sorted((id(v), s.ref, s.host_valid, s.device_valid)
                           for v, s in self.state.items()))
        return env, tuple(sorted(self.concrete.items()))

    def _round_sig(self, mark_e: int, mark_s: int):
        ev = tuple((e.direction, e.var, e.bytes_per_call, e.line, e.count)
                   for e in self.log.events[mark_e:])
        st = tuple((s.var, s.space, s.line, s.count)
                   for s in self.log.stale_reads[mark_s:])
        return self._snapshot(), ev, st

    def _scale_tail(self, mark_e: int, mark_s: int, remaining: int) -> None:
        tail_e = self.log.events[mark_e:]
        tail_s = self.log.stale_reads[mark_s:]
        for e in tail_e:
            self.log.events.append(TransferEvent(e.direction, e.var,
                                                 e.bytes_per_call, e.line,
                                                 e.count * remaining))
        for s in tail_s:
            self.log.stale_reads.append(StaleRead(s.var, s.space, s.line,
                                                  s.count * remaining))

    def run_loop(self, trip: int, one_round) -> None:
        prev_sig = None
        done = 0
        while done < trip and not self.returned:
            mark_e = len(self.log.events)
            mark_s = len(self.log.stale_reads)
            one_round()
            sig = self._round_sig(mark_e, mark_s)
            done += 1
            if done >= trip:
                return
            if sig == prev_sig:
                self._scale_tail(mark_e, mark_s, trip - done)
                return
            if done >= _MAX_CONCRETE_ROUNDS:
                self._scale_tail(mark_e, mark_s, trip - done)
                self.warn_once("loop did not settle; remaining iterations "
                               "were extrapolated from the last one")
                return
            prev_sig = sig

    def _trip(self, stmt: AstNode) -> int:
        if stmt.kind is NodeKind.FOR_STMT:
            tc = extract_for_bounds(stmt, self.concrete).trip_count()
            if tc is not None:
                return tc
        return self.config.default_trip

    def exec_for(self, stmt: AstNode, space: Space) -> None:
        self.exec_stmt(stmt.for_init, space)
        cond_accs = self._accs_in(stmt, stmt.for_cond)
        inc_accs = self._accs_in(stmt, stmt.for_inc)
        trip = self._trip(stmt)
        self.process(cond_accs, space)

        def one_round():
            self.exec_stmt(stmt.body, space)
            self.process(inc_accs, space)
            self.process(cond_accs, space)

        self.run_loop(trip, one_round)

    def exec_while(self, stmt: AstNode, space: Space) -> None:
        cond_accs = self._accs_in(stmt, stmt.cond)
        self.process(cond_accs, space)

        def one_round():
            self.exec_stmt(stmt.body, space)
            self.process(cond_accs, space)

        self.run_loop(self.config.default_trip, one_round)

    def exec_do(self, stmt: AstNode, space: Space) -> None:
        cond_accs = self._accs_in(stmt, stmt.cond)

        def one_round():
            self.exec_stmt(stmt.body, space)
            self.process(cond_accs, space)

        self.run_loop(max(1, self.config.default_trip), one_round)

    # ---- directives ------------------------------------------------------

    def _lookup_clause_var(self, name: str) -> VariableId | None:
        vid = self.cur.name_index.get(name)
        if vid is None:
            vid = self.table.by_name_global.get(name)
        if vid is None:
            self.warn_once("unknown variable '%s' in a mapping clause" % name)
        return vid

    def _map_entry_vars(self, info: OmpDirectiveInfo
                        ) -> list[tuple[str, VariableId]]:
        out = []
        for maptype, names in info.map_entries():
            for name in names:
                vid = self._lookup_clause_var(name)
                if vid is not None:
                    out.append((maptype, vid))
        return out

    def exec_omp(self, stmt: AstNode, space: Space) -> None:
        info = stmt.omp
        kind = info.kind
        line = self.src.line_of(stmt.span.start)
        annotated = self.config.mode == MODE_ANNOTATED
        if kind in KERNEL_KINDS:
            self.exec_kernel(stmt, info, line, annotated)
            return
        if kind is DirectiveKind.TARGET_DATA:
            entries = self._map_entry_vars(info) if annotated else []
            for mt, var in entries:
                self.map_enter(var, mt, line)
            if stmt.children:
                self.exec_stmt(stmt.children[0], space)
            for mt, var in reversed(entries):
                self.map_exit(var, mt, line)
            return
        if kind is DirectiveKind.TARGET_ENTER_DATA:
            if annotated:
                for mt, var in self._map_entry_vars(info):
                    self.map_enter(var, mt, line)
            return
        if kind is DirectiveKind.TARGET_EXIT_DATA:
            if annotated:
                for mt, var in self._map_entry_vars(info):
                    self.map_exit(var, mt, line)
            return
        if kind is DirectiveKind.TARGET_UPDATE:
            if annotated:
                for direction, names in info.update_entries():
                    for name in names:
                        vid = self._lookup_clause_var(name)
                        if vid is not None:
                            self.update(vid, direction, line)
            return
        # host-level construct (plain parallel for and friends)
        if stmt.children:
            self.exec_stmt(stmt.children[0], space)

    def exec_kernel(self, stmt: AstNode, info: OmpDirectiveInfo, line: int,
                    annotated: bool) -> None:
        node = self.cur.info.cfg.node_of_ast.get(stmt)
        if node is None or node.sub_cfg is None:
            if stmt.children:
                self.exec_stmt(stmt.children[0], Space.HOST)
            return
        referenced = kernel_referenced_vars(self.cur.info.accesses,
                                            node.id, stmt)
        explicit = self._map_entry_vars(info) if annotated else []
        explicit_names = {v.name for _, v in explicit}
        captured = set(_clause_vars(info, "firstprivate")) if annotated else set()
        private = set(_clause_vars(info, "private"))
        reduction = set(_clause_vars(info, "reduction"))
        for f in stmt.find_all(NodeKind.FOR_STMT):
            v = find_indexing_var(f)
            if v is not None:
                private.add(v)
        entries = list(explicit)
        by_value: list[VariableId] = []
        priv_vids: list[VariableId] = []
        for var in referenced:
            if var.name in private:
                priv_vids.append(var)
                continue
            if var.name in explicit_names:
                continue
            if var.name in captured:
                by_value.append(var)
            elif var.is_scalar and var.name not in reduction:
                by_value.append(var)
            else:
                entries.append(("tofrom", var))
        for var in by_value:
            # pass-by-value capture reads the host copy at launch
            self.read(var, Space.HOST, line)
        for mt, var in entries:
            self.map_enter(var, mt, line)
        # per-thread copies: their device effects stay inside the kernel
        shielded = [self.resolve(v) for v in by_value + priv_vids]
        saved = [(self.st(v).host_valid, self.st(v).device_valid)
                 for v in shielded]
        for v in shielded:
            self.st(v).device_valid = True
        if stmt.children:
            self.exec_stmt(stmt.children[0], Space.DEVICE)
        for v, (hv, dv) in zip(shielded, saved):
            s = self.st(v)
            s.host_valid, s.device_valid = hv, dv
        for mt, var in reversed(entries):
            self.map_exit(var, mt, line)


def _clause_vars(info: OmpDirectiveInfo, name: str) -> list[str]:
    out = []
    for cl in info.clauses:
        if cl.name != name:
            continue
        for arg in cl.args:
            if ":" in arg:
                arg = arg.split(":", 1)[1]
            if arg.strip():
                out.append(arg.strip())
    return out


def simulate(program: ProgramModel, config: SimConfig) -> SimReport:
    return _Simulator(program, config).run()
