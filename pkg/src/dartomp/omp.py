"""OpenMP pragma parsing and the offload-kernel directive table."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import ParseError


class DirectiveKind(Enum):
    TARGET = "target"
    TARGET_PARALLEL = "target parallel"
    TARGET_PARALLEL_FOR = "target parallel for"
    TARGET_PARALLEL_FOR_SIMD = "target parallel for simd"
    TARGET_PARALLEL_LOOP = "target parallel loop"
    TARGET_SIMD = "target simd"
    TARGET_TEAMS = "target teams"
    TARGET_TEAMS_DISTRIBUTE = "target teams distribute"
    TARGET_TEAMS_DISTRIBUTE_PARALLEL_FOR = "target teams distribute parallel for"
    TARGET_TEAMS_DISTRIBUTE_PARALLEL_FOR_SIMD = "target teams distribute parallel for simd"
    TARGET_TEAMS_DISTRIBUTE_SIMD = "target teams distribute simd"
    TARGET_TEAMS_LOOP = "target teams loop"
    TARGET_DATA = "target data"
    TARGET_ENTER_DATA = "target enter data"
    TARGET_EXIT_DATA = "target exit data"
    TARGET_UPDATE = "target update"
    NON_TARGET = "non-target"


#: Directives that launch device execution of their associated statement.
KERNEL_KINDS = frozenset({
    DirectiveKind.TARGET,
    DirectiveKind.TARGET_PARALLEL,
    DirectiveKind.TARGET_PARALLEL_FOR,
    DirectiveKind.TARGET_PARALLEL_FOR_SIMD,
    DirectiveKind.TARGET_PARALLEL_LOOP,
    DirectiveKind.TARGET_SIMD,
    DirectiveKind.TARGET_TEAMS,
    DirectiveKind.TARGET_TEAMS_DISTRIBUTE,
    DirectiveKind.TARGET_TEAMS_DISTRIBUTE_PARALLEL_FOR,
    DirectiveKind.TARGET_TEAMS_DISTRIBUTE_PARALLEL_FOR_SIMD,
    DirectiveKind.TARGET_TEAMS_DISTRIBUTE_SIMD,
    DirectiveKind.TARGET_TEAMS_LOOP,
})

#: Directives that stand alone rather than annotating the next statement.
STANDALONE_KINDS = frozenset({
    DirectiveKind.TARGET_ENTER_DATA,
    DirectiveKind.TARGET_EXIT_DATA,
    DirectiveKind.TARGET_UPDATE,
})

#: Directives that manage the device data environment explicitly; their
#: presence in an input makes rewriting unsafe (see cli precondition).
DATA_MAPPING_KINDS = frozenset({
    DirectiveKind.TARGET_DATA,
    DirectiveKind.TARGET_ENTER_DATA,
    DirectiveKind.TARGET_EXIT_DATA,
    DirectiveKind.TARGET_UPDATE,
})

# Longest phrases first so prefix matching picks the most specific kind.
_PHRASES: list[tuple[tuple[str, ...], DirectiveKind]] = sorted(
    (
        (tuple(k.value.split()), k)
        for k in DirectiveKind
        if k is not DirectiveKind.NON_TARGET
    ),
    key=lambda p: -len(p[0]),
)


@dataclass
class OmpClause:
    name: str
    args: list[str] = field(default_factory=list)

    def render(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(self.args)})"


@dataclass
class OmpDirectiveInfo:
    kind: DirectiveKind
    clauses: list[OmpClause]
    raw: str

    def clause(self, name: str) -> OmpClause | None:
        for c in self.clauses:
            if c.name == name:
                return c
        return None

    def map_entries(self) -> list[tuple[str, list[str]]]:
        """All map clauses as (map-type, variable names); bare map() is tofrom."""
        out = []
        for c in self.clauses:
            if c.name != "map":
                continue
            if not c.args:
                continue
            first = c.args[0]
            if ":" in first:
                mtype, v0 = first.split(":", 1)
                names = [v0] + c.args[1:]
            else:
                mtype = "tofrom"
                names = list(c.args)
            names = [_strip_section(v) for v in names]
            out.append((mtype.strip(), names))
        return out

    def update_entries(self) -> list[tuple[str, list[str]]]:
        out = []
        for c in self.clauses:
            if c.name in ("to", "from"):
                out.append((c.name, [_strip_section(v) for v in c.args]))
        return out

    def firstprivate_vars(self) -> list[str]:
        out: list[str] = []
        for c in self.clauses:
            if c.name == "firstprivate":
                out.extend(v.strip() for v in c.args)
        return out


def _strip_section(var: str) -> str:
    """Reduce ``a[0:n]`` to ``a``; analysis is whole-object anyway."""
    var = var.strip()
    cut = var.find("[")
    return var[:cut] if cut >= 0 else var


def _split_args(text: str) -> list[str]:
    args = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "," and depth == 0:
            args.append("".join(cur).strip())
            cur = []
            continue
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        args.append(tail)
    return args


def parse_omp_pragma(text: str, path: str = "<pragma>", line: int = 0) -> OmpDirectiveInfo | None:
    """Parse one joined pragma line.  Returns None for non-OpenMP pragmas."""
    words = text.split()
    if not words or words[0] not in ("#pragma", "#"):
        raise ParseError("not a pragma line", path, line, 1)
    rest = words[1:]
    if rest and rest[0] == "pragma":
        rest = rest[1:]
    if not rest or rest[0] != "omp":
        return None
    body = " ".join(rest[1:])

    # Split the body into bare words and word(...) groups.
    items: list[tuple[str, str | None]] = []  # (word, arg-text or None)
    i = 0
    n = len(body)
    while i < n:
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < n and (body[j].isalnum() or body[j] == "_"):
            j += 1
        if j == i:
            raise ParseError(f"malformed pragma near {body[i:]!r}", path, line, 1)
        word = body[i:j]
        i = j
        while i < n and body[i].isspace():
            i += 1
        if i < n and body[i] == "(":
            depth = 1
            k = i + 1
            while k < n and depth:
                if body[k] == "(":
                    depth += 1
                elif body[k] == ")":
                    depth -= 1
                k += 1
            if depth:
                raise ParseError("unbalanced parentheses in pragma", path, line, 1)
            items.append((word, body[i + 1 : k - 1]))
            i = k
        else:
            items.append((word, None))

    bare_words = []
    for word, arg in items:
        if arg is not None:
            break
        bare_words.append(word)

    kind = DirectiveKind.NON_TARGET
    matched = 0
    if bare_words and bare_words[0] == "target":
        for phrase, pkind in _PHRASES:
            if tuple(bare_words[: len(phrase)]) == phrase:
                kind = pkind
                matched = len(phrase)
                break

    clauses = [
        OmpClause(word, _split_args(arg) if arg is not None else [])
        for word, arg in items[matched:]
    ]
    return OmpDirectiveInfo(kind=kind, clauses=clauses, raw=text)


def is_kernel_directive(info: OmpDirectiveInfo) -> bool:
    return info.kind in KERNEL_KINDS
