"""Plan summaries, transfer accounting tables, and comparison figures.

All tabular output is tab-delimited so it pipes cleanly into cut/awk; the
comparison figure is a log-scale bar chart rendered straight to a file.
"""
from __future__ import annotations

from .dataflow import BEFORE, BODY_END, FunctionPlan, PlanKind
from .simulator import SimReport
from .source import SourceFile


def plan_lines(src: SourceFile, plans: list[FunctionPlan]) -> list[str]:
    out = []
    for plan in plans:
        out.append("function\t%s" % plan.function.name)
        region = plan.region
        if region is not None:
            first = src.line_of(region.begin.span.start)
            last = src.line_of(region.end.span.end - 1)
            out.append("region\t%d..%d\t%s" % (first, last,
                                               region.clause_text()))
        for p in plan.kernel_clauses:
            line = src.line_of(p.anchor.span.start)
            clause = {PlanKind.MAP_TO: "map(to: %s)",
                      PlanKind.MAP_TOFROM: "map(tofrom: %s)",
                      PlanKind.MAP_FROM: "map(from: %s)",
                      PlanKind.MAP_ALLOC: "map(alloc: %s)",
                      PlanKind.FIRSTPRIVATE: "firstprivate(%s)"}[p.kind]
            out.append("kernel-clause\t%d\t%s" % (line,
                                                  clause % ", ".join(p.names)))
        for p in plan.updates:
            direction = "to" if p.kind is PlanKind.UPDATE_TO else "from"
            line = src.line_of(p.anchor.span.start)
            where = {BEFORE: "before", BODY_END: "end-of-body"}[p.position]
            out.append("update\t%s(%s)\t%s line %d"
                       % (direction, ", ".join(p.names), where, line))
        for name in plan.suppressed:
            out.append("suppressed\t%s" % name)
    if not out:
        out.append("no kernels; nothing to map")
    return out


def simulation_lines(report: SimReport, verbose: bool = False) -> list[str]:
    log = report.log
    out = [
        "mode\t%s" % report.mode,
        "entry\t%s" % ",".join(report.entries),
        "htod\t%d\t%d" % (log.htod_calls, log.htod_bytes),
        "dtoh\t%d\t%d" % (log.dtoh_calls, log.dtoh_bytes),
        "stale\t%d" % log.stale_count,
    ]
    if verbose:
        for e in log.events:
            out.append("event\t%s\t%s\t%d B\tx%d\tline %d"
                       % (e.direction, e.var, e.bytes_per_call, e.count,
                          e.line))
    for s in log.stale_reads:
        out.append("stale-read\t%s\t%s\tline %d\tx%d"
                   % (s.var, s.space, s.line, s.count))
    for w in report.warnings:
        out.append("warning\t%s" % w)
    return out


def _ratio(a: int, b: int) -> str:
    if b == 0:
        return "inf" if a else "1.0"
    return "%.2f" % (a / b)


def comparison_lines(base: SimReport, mapped: SimReport) -> list[str]:
    rows = [
        ("htod_calls", base.log.htod_calls, mapped.log.htod_calls),
        ("htod_bytes", base.log.htod_bytes, mapped.log.htod_bytes),
        ("dtoh_calls", base.log.dtoh_calls, mapped.log.dtoh_calls),
        ("dtoh_bytes", base.log.dtoh_bytes, mapped.log.dtoh_bytes),
    ]
    out = ["metric\timplicit\tannotated\treduction"]
    for name, a, b in rows:
        out.append("%s\t%d\t%d\t%s" % (name, a, b, _ratio(a, b)))
    out.append("stale\t%d\t%d\t-" % (base.log.stale_count,
                                     mapped.log.stale_count))
    return out


def write_comparison_plot(base: SimReport, mapped: SimReport,
                          path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = ["HtoD calls", "DtoH calls", "HtoD bytes", "DtoH bytes"]
    implicit = [base.log.htod_calls, base.log.dtoh_calls,
                base.log.htod_bytes, base.log.dtoh_bytes]
    annotated = [mapped.log.htod_calls, mapped.log.dtoh_calls,
                 mapped.log.htod_bytes, mapped.log.dtoh_bytes]
    x = range(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar([i - width / 2 for i in x], [max(v, 0.1) for v in implicit],
           width, label="per-launch defaults")
    ax.bar([i + width / 2 for i in x], [max(v, 0.1) for v in annotated],
           width, label="planned mapping")
    ax.set_yscale("log")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel("count / bytes (log scale)")
    ax.set_title("Host-device transfer accounting")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
