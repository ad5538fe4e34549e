"""Source rewriting as pure point insertions.

Every change is an inserted byte segment at an offset of the original text;
no original byte is ever touched.  That makes the transform trivially
revertible (splice the inserted segments back out) and keeps every original
span valid in the output, which the tests rely on.

A data region becomes three kinds of insertions: the directive-plus-brace
lines before the first covered statement, the closing brace after the last,
and one indentation unit at the start of every covered line.  Update
directives and appended clauses are single insertions.  Insertions at the
same offset are ordered so region openers come first, then update
directives, then the reindent pad that belongs to the original line.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .dataflow import (AFTER, BEFORE, BODY_END, KERNEL, DirectivePlan, FunctionPlan,
                       PlanKind, TargetDataRegion)
from .diagnostics import InternalError, PreconditionError
from .nodes import AstNode, NodeKind
from .source import SourceFile

_PRIO_REGION_OPEN = 0
_PRIO_UPDATE = 1
_PRIO_CLAUSE = 2
_PRIO_REINDENT = 3
_PRIO_REGION_CLOSE = 4


@dataclass(frozen=True)
class Insertion:
    offset: int
    priority: int
    seq: int
    text: str


@dataclass
class RewriteResult:
    original: str
    text: str
    placed: list[tuple[int, str]]  # (start offset in output, inserted text)

    def splice_out(self) -> str:
        """Remove every inserted segment; must reproduce the original."""
        out = []
        pos = 0
        for start, seg in self.placed:
            out.append(self.text[pos:start])
            pos = start + len(seg)
        out.append(self.text[pos:])
        return "".join(out)


def detect_indent_unit(src: SourceFile) -> str:
    """Dominant indentation step of the file; falls back to four spaces."""
    deltas: Counter[int] = Counter()
    prev = 0
    for start in src.line_starts:
        end = src.line_end(start)
        line = src.text[start:end]
        stripped = line.strip()
        if not stripped:
            continue
        if line.startswith("\t"):
            return "\t"
        width = len(line) - len(line.lstrip(" "))
        if width > prev:
            deltas[width - prev] += 1
        prev = width
    if deltas:
        return " " * deltas.most_common(1)[0][0]
    return "    "


def _pragma_end(text: str, start: int) -> int:
    """Offset of the newline terminating a (possibly continued) pragma."""
    i = start
    while True:
        j = text.find("\n", i)
        if j == -1:
            return len(text)
        if j > 0 and text[j - 1] == "\\":
            i = j + 1
            continue
        return j


def _body_brace_offset(src: SourceFile, loop: AstNode) -> int:
    body = loop.body
    if body is None or body.kind is not NodeKind.COMPOUND_STMT:
        raise PreconditionError.at(
            src, loop.span.start,
            "braces are required around this loop body to place an "
            "update directive")
    return body.span.end - 1  # the closing brace byte


def _line_after(src: SourceFile, offset: int) -> tuple[int, str]:
    """Start of the line following `offset`, with a prefix that repairs a
    missing final newline."""
    nl = src.text.find("\n", offset)
    if nl < 0:
        return len(src.text), "\n"
    return nl + 1, ""


def _update_clause(kind: PlanKind) -> str:
    return {PlanKind.UPDATE_TO: "to", PlanKind.UPDATE_FROM: "from"}[kind]


_MAP_CLAUSE = {
    PlanKind.MAP_TO: "map(to: %s)",
    PlanKind.MAP_TOFROM: "map(tofrom: %s)",
    PlanKind.MAP_FROM: "map(from: %s)",
    PlanKind.MAP_ALLOC: "map(alloc: %s)",
    PlanKind.FIRSTPRIVATE: "firstprivate(%s)",
}
_KERNEL_CLAUSE_ORDER = [PlanKind.MAP_TO, PlanKind.MAP_TOFROM,
                        PlanKind.MAP_FROM, PlanKind.MAP_ALLOC,
                        PlanKind.FIRSTPRIVATE]


class _FunctionRewriter:
    def __init__(self, src: SourceFile, plan: FunctionPlan, unit: str):
        self.src = src
        self.plan = plan
        self.unit = unit
        self.insertions: list[Insertion] = []
        self.seq = 0
        region = plan.region
        if region is not None:
            self.region_first_line = src.line_start(region.begin.span.start)
            self.region_last_line = src.line_start(region.end.span.end - 1)
        else:
            self.region_first_line = self.region_last_line = -1

    def add(self, offset: int, priority: int, text: str) -> None:
        self.insertions.append(Insertion(offset, priority, self.seq, text))
        self.seq += 1

    def _in_region_lines(self, line_start: int) -> bool:
        return self.region_first_line <= line_start <= self.region_last_line

    def emit_region(self, region: TargetDataRegion) -> None:
        begin_off = self.src.line_start(region.begin.span.start)
        indent = self.src.indent_at(region.begin.span.start)
        clauses = region.clause_text()
        head = "%s#pragma omp target data %s\n%s{\n" % (indent, clauses,
                                                        indent)
        self.add(begin_off, _PRIO_REGION_OPEN, head)
        close_off = self.src.line_end(region.end.span.end - 1)
        closer = "%s}\n" % indent
        if close_off == len(self.src.text) and not self.src.text.endswith("\n"):
            closer = "\n" + closer
        self.add(close_off, _PRIO_REGION_CLOSE, closer)
        # shift every covered line one level deeper
        off = begin_off
        while off <= self.region_last_line:
            end = self.src.line_end(off)
            if self.src.text[off:end].strip():
                self.add(off, _PRIO_REINDENT, self.unit)
            if end <= off:
                break
            off = end

    def _line_pragma(self, line_start: int, clause_body: str) -> str:
        indent = self.src.indent_at(line_start)
        if self._in_region_lines(line_start):
            indent = self.unit + indent
        return "%s#pragma omp target update %s\n" % (indent, clause_body)

    def emit_updates(self) -> None:
        # one directive per (anchor point, direction), names merged
        grouped: dict[tuple[int, str, PlanKind], set[str]] = {}
        order: list[tuple[int, str, PlanKind]] = []
        after_ctx: dict[int, tuple[str, str]] = {}
        for p in self.plan.updates:
            if p.position == BODY_END:
                off = self.src.line_start(_body_brace_offset(self.src,
                                                             p.anchor))
            elif p.position == BEFORE:
                off = self.src.line_start(p.anchor.span.start)
            elif p.position == AFTER:
                off, prefix = _line_after(self.src, p.anchor.span.end)
                line = self.src.line_start(p.anchor.span.end)
                pad = self.unit if self._in_region_lines(line) else ""
                after_ctx[off] = (prefix, pad + self.src.indent_at(line))
            else:
                raise InternalError("unexpected update position %r"
                                    % p.position)
            key = (off, p.position, p.kind)
            if key not in grouped:
                grouped[key] = set()
                order.append(key)
            grouped[key].update(p.names)
        for off, position, kind in order:
            names = sorted(grouped[(off, position, kind)])
            other = {PlanKind.UPDATE_TO: PlanKind.UPDATE_FROM,
                     PlanKind.UPDATE_FROM: PlanKind.UPDATE_TO}[kind]
            twin = grouped.get((off, position, other), set())
            clash = set(names) & twin
            if clash:
                raise InternalError(
                    "conflicting update directions at one point for %s"
                    % ", ".join(sorted(clash)))
            body = "%s(%s)" % (_update_clause(kind), ", ".join(names))
            if position == BODY_END:
                indent = self.src.indent_at(off)
                extra = self.unit if self._in_region_lines(off) else ""
                text = "%s%s%s#pragma omp target update %s\n" % (
                    extra, indent, self.unit, body)
                # land before the closing brace's own reindent pad
                self.add(off, _PRIO_UPDATE, text)
            elif position == AFTER:
                prefix, indent = after_ctx[off]
                self.add(off, _PRIO_UPDATE,
                         "%s%s#pragma omp target update %s\n" % (
                             prefix, indent, body))
            else:
                self.add(off, _PRIO_UPDATE, self._line_pragma(off, body))

    def emit_kernel_clauses(self) -> None:
        by_kernel: dict[int, dict[PlanKind, set[str]]] = {}
        anchors: dict[int, AstNode] = {}
        for p in self.plan.kernel_clauses:
            if p.position != KERNEL:
                raise InternalError("kernel clause plan with position %r"
                                    % p.position)
            key = id(p.anchor)
            anchors[key] = p.anchor
            by_kernel.setdefault(key, {}).setdefault(p.kind,
                                                     set()).update(p.names)
        for key, kinds in by_kernel.items():
            anchor = anchors[key]
            parts = []
            for kind in _KERNEL_CLAUSE_ORDER:
                if kind in kinds:
                    parts.append(_MAP_CLAUSE[kind]
                                 % ", ".join(sorted(kinds[kind])))
            off = _pragma_end(self.src.text, anchor.span.start)
            self.add(off, _PRIO_CLAUSE, " " + " ".join(parts))

    def run(self) -> list[Insertion]:
        if self.plan.region is not None:
            self.emit_region(self.plan.region)
        self.emit_updates()
        self.emit_kernel_clauses()
        return self.insertions


def apply_plans(src: SourceFile, plans: list[FunctionPlan],
                indent_unit: str | None = None) -> RewriteResult:
    unit = indent_unit if indent_unit is not None else detect_indent_unit(src)
    insertions: list[Insertion] = []
    for plan in plans:
        insertions.extend(_FunctionRewriter(src, plan, unit).run())
    insertions.sort(key=lambda i: (i.offset, i.priority, i.seq))
    out: list[str] = []
    placed: list[tuple[int, str]] = []
    pos = 0
    written = 0
    for ins in insertions:
        out.append(src.text[pos:ins.offset])
        written += ins.offset - pos
        placed.append((written, ins.text))
        out.append(ins.text)
        written += len(ins.text)
        pos = ins.offset
    out.append(src.text[pos:])
    return RewriteResult(original=src.text, text="".join(out), placed=placed)
