"""Diagnostics and error types shared across the pipeline.

Every user-visible problem is rendered as ``file:line:col: severity: message``
on stderr.  Errors that abort a run map to process exit code 1; internal
consistency failures map to exit code 2.
"""
from __future__ import annotations

from dataclasses import dataclass

from .source import SourceFile


@dataclass(frozen=True)
class Diagnostic:
    path: str
    line: int
    col: int
    severity: str  # "error" | "warning"
    message: str

    def render(self) -> str:
        return f"{self.path}:{self.line}:{self.col}: {self.severity}: {self.message}"


def warning_at(src: SourceFile, offset: int, message: str) -> Diagnostic:
    line, col = src.line_col(offset)
    return Diagnostic(src.path, line, col, "warning", message)


class ToolError(Exception):
    """Base for all diagnosable failures; carries a source location."""

    severity = "error"

    def __init__(self, message: str, path: str = "<unknown>", line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line
        self.col = col

    @classmethod
    def at(cls, src: SourceFile, offset: int, message: str) -> "ToolError":
        line, col = src.line_col(offset)
        return cls(message, src.path, line, col)

    def render(self) -> str:
        if self.path == "<unknown>":
            return f"{self.severity}: {self.message}"
        return f"{self.path}:{self.line}:{self.col}: {self.severity}: {self.message}"


class LexError(ToolError):
    pass


class ParseError(ToolError):
    pass


class UnsupportedConstructError(ToolError):
    """Input uses a C or OpenMP feature outside the supported subset."""


class AnalysisFailure(ToolError):
    """The analysis cannot produce a sound result (aliasing, pointer rebinding)."""


class DeclPlacementError(ToolError):
    """A mapped variable is declared after the computed data-region start."""


class PreconditionError(ToolError):
    """Input already contains explicit data-mapping directives."""


class ConfigError(ToolError):
    """Simulation or CLI configuration is unusable (missing sizes, bad flags)."""


class InternalError(Exception):
    """Invariant violation inside the tool itself; maps to exit code 2."""
