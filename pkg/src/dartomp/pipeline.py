"""End-to-end drivers: parse, analyze, plan, rewrite, simulate.

One `Analysis` bundles everything the individual passes produce for a file,
so the CLI modes and the tests share a single loading path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .access import MemoryAccess, VariableTable, classify_accesses
from .astcfg import AstCfg, build_astcfg
from .dataflow import FunctionPlan, analyze_function
from .diagnostics import Diagnostic, PreconditionError
from .interproc import CallSummary, apply_call_effects, summarize_all
from .lexer import expand_defines
from .nodes import AstNode, NodeKind, defined_functions
from .omp import DATA_MAPPING_KINDS, KERNEL_KINDS
from .parser import parse
from .rewriter import RewriteResult, apply_plans
from .simulator import (FunctionInfo, ProgramModel, SimConfig, SimReport,
                        simulate)
from .source import SourceFile


@dataclass
class Analysis:
    src: SourceFile
    tu: AstNode
    table: VariableTable
    cfgs: dict[str, AstCfg]
    raw_accesses: dict[str, list[MemoryAccess]]
    accesses: dict[str, list[MemoryAccess]]  # call effects expanded
    summaries: dict[str, CallSummary]
    defines: dict[str, int]
    warnings: list[Diagnostic] = field(default_factory=list)


def load(path: str | None = None, text: str | None = None,
         sizes: dict[str, int] | None = None,
         pointer_default: int = 1024) -> Analysis:
    if text is not None:
        src = SourceFile.from_text(text, path=path or "<string>")
    else:
        src = SourceFile.from_path(path)
    pre = expand_defines(src)
    tu, pwarnings = parse(src, pre)
    table = VariableTable(src, tu, sizes=sizes, pointer_default=pointer_default)
    warnings = list(pre.warnings) + list(pwarnings)
    cfgs: dict[str, AstCfg] = {}
    raw: dict[str, list[MemoryAccess]] = {}
    for name, fn in defined_functions(tu).items():
        cfg = build_astcfg(src, fn)
        cfgs[name] = cfg
        warnings.extend(cfg.warnings)
        raw[name] = classify_accesses(src, cfg, table)
    summaries = summarize_all(src, tu, cfgs, raw, table)
    expanded = {name: apply_call_effects(src, cfgs[name], raw[name],
                                         summaries, table)
                for name in cfgs}
    return Analysis(src=src, tu=tu, table=table, cfgs=cfgs, raw_accesses=raw,
                    accesses=expanded, summaries=summaries,
                    defines=dict(pre.defines), warnings=warnings)


def check_transform_preconditions(analysis: Analysis) -> None:
    """Refuse inputs that already carry data-mapping annotations."""
    src = analysis.src
    for node in analysis.tu.find_all(NodeKind.OMP_DIRECTIVE):
        info = node.omp
        if info is None:
            continue
        line = src.line_of(node.span.start)
        if info.kind in DATA_MAPPING_KINDS:
            raise PreconditionError(
                "input already contains a '%s' directive; the transform "
                "expects offload regions without data-mapping constructs"
                % info.kind.value, path=src.path, line=line)
        if info.kind in KERNEL_KINDS and info.clause("map") is not None:
            raise PreconditionError(
                "input already contains a 'map' clause on an offload "
                "directive; the transform expects unannotated kernels",
                path=src.path, line=line)


def plan_transform(analysis: Analysis,
                   allow_stale: frozenset[str] = frozenset()
                   ) -> list[FunctionPlan]:
    check_transform_preconditions(analysis)
    plans = []
    for name in analysis.cfgs:
        plan = analyze_function(analysis.src, analysis.cfgs[name],
                                analysis.accesses[name], analysis.table,
                                allow_stale)
        if plan.region is not None or plan.all_plans:
            plans.append(plan)
    return plans


def transform(analysis: Analysis,
              allow_stale: frozenset[str] = frozenset(),
              indent_unit: str | None = None
              ) -> tuple[RewriteResult, list[FunctionPlan]]:
    plans = plan_transform(analysis, allow_stale)
    result = apply_plans(analysis.src, plans, indent_unit=indent_unit)
    return result, plans


def program_model(analysis: Analysis) -> ProgramModel:
    functions = {}
    for name, cfg in analysis.cfgs.items():
        functions[name] = FunctionInfo(name=name, fn=cfg.function, cfg=cfg,
                                       accesses=analysis.raw_accesses[name])
    return ProgramModel(src=analysis.src, tu=analysis.tu,
                        table=analysis.table, functions=functions,
                        summaries=analysis.summaries)


def simulate_analysis(analysis: Analysis, config: SimConfig) -> SimReport:
    return simulate(program_model(analysis), config)


def compare(analysis: Analysis, config: SimConfig,
            allow_stale: frozenset[str] = frozenset()
            ) -> tuple[SimReport, SimReport, RewriteResult]:
    """Price the tool's own mapping scheme against per-launch defaults."""
    result, _ = transform(analysis, allow_stale)
    implicit_cfg = SimConfig(sizes=dict(config.sizes),
                             default_trip=config.default_trip,
                             mode="implicit",
                             pointer_default=config.pointer_default,
                             max_call_depth=config.max_call_depth)
    annotated_cfg = SimConfig(sizes=dict(config.sizes),
                              default_trip=config.default_trip,
                              mode="annotated",
                              pointer_default=config.pointer_default,
                              max_call_depth=config.max_call_depth)
    base = simulate_analysis(analysis, implicit_cfg)
    transformed = load(path=analysis.src.path + " (transformed)",
                       text=result.text,
                       sizes=dict(config.sizes),
                       pointer_default=config.pointer_default)
    mapped = simulate_analysis(transformed, annotated_cfg)
    return base, mapped, result
