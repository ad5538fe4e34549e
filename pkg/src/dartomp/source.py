"""Source text handling: files, byte spans, line/column lookup."""
from __future__ import annotations

import bisect
from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open byte range [start, end) into a source file's text."""

    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start

    def covers(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str
    line_starts: tuple[int, ...]

    @classmethod
    def from_text(cls, text: str, path: str = "<string>") -> "SourceFile":
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        return cls(path=path, text=text, line_starts=tuple(starts))

    @classmethod
    def from_path(cls, path: str) -> "SourceFile":
        with open(path, "r") as fh:
            return cls.from_text(fh.read(), path=path)

    def line_col(self, offset: int) -> tuple[int, int]:
        """1-based (line, column) of a byte offset."""
        line = bisect.bisect_right(self.line_starts, offset) - 1
        return line + 1, offset - self.line_starts[line] + 1

    def line_of(self, offset: int) -> int:
        return self.line_col(offset)[0]

    def line_start(self, offset: int) -> int:
        """Offset of the first byte of the line containing `offset`."""
        line = bisect.bisect_right(self.line_starts, offset) - 1
        return self.line_starts[line]

    def line_end(self, offset: int) -> int:
        """Offset just past the newline of the line containing `offset`.

        For the last line without a trailing newline this is len(text).
        """
        line = bisect.bisect_right(self.line_starts, offset) - 1
        if line + 1 < len(self.line_starts):
            return self.line_starts[line + 1]
        return len(self.text)

    def indent_at(self, offset: int) -> str:
        start = self.line_start(offset)
        i = start
        while i < len(self.text) and self.text[i] in " \t":
            i += 1
        return self.text[start:i]

    def slice(self, span: Span) -> str:
        return self.text[span.start : span.end]
