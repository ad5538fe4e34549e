import pytest

from dartomp.diagnostics import ParseError, UnsupportedConstructError
from dartomp.lexer import expand_defines
from dartomp.nodes import NodeKind, defined_functions, element_size, dump
from dartomp.omp import DirectiveKind
from dartomp.parser import fold_int, parse
from dartomp.source import SourceFile


def parse_text(text):
    src = SourceFile.from_text(text, path="t.c")
    tu, warnings = parse(src)
    return tu, warnings


def body_of(text, fn="main"):
    tu, _ = parse_text(text)
    return defined_functions(tu)[fn].body


def first(node, kind):
    return next(iter(node.find_all(kind)))


def test_translation_unit_shape():
    tu, warnings = parse_text("""
    #define N 4
    int g[N];
    double helper(const double *v, int n);
    int main(void) { return 0; }
    """)
    assert tu.kind is NodeKind.TRANSLATION_UNIT
    assert not warnings
    assert list(defined_functions(tu)) == ["main"]


def test_globals_and_prototypes_coexist():
    tu, _ = parse_text("""
    double a[10];
    void bump(double *v, int n);
    void bump(double *v, int n) { v[0] = (double)n; }
    """)
    fns = defined_functions(tu)
    assert "bump" in fns
    assert [p.name for p in fns["bump"].params] == ["v", "n"]


def test_array_sizes_resolve_through_defines():
    tu, _ = parse_text("#define N 6\nint a[N];\nint b[N * 2];\n")
    decls = list(tu.find_all(NodeKind.VAR_DECL))
    assert [d.name for d in decls] == ["a", "b"]
    assert decls[0].type_info.element_count() == 6
    assert decls[1].type_info.element_count() == 12


def test_two_dimensional_array():
    tu, _ = parse_text("float w[3][5];\n")
    d = first(tu, NodeKind.VAR_DECL)
    assert d.type_info.element_count() == 15
    assert element_size(d.type_info) == 4


def test_multi_declarator_with_init_list():
    body = body_of("int main(void) { int a[4] = {}, sum = 0; return sum; }")
    decl = body.children[0]
    assert decl.kind is NodeKind.DECL_STMT
    names = [d.name for d in decl.children]
    assert names == ["a", "sum"]


def test_for_loop_pieces():
    body = body_of("int main(void) { for (int i = 0; i < 8; ++i) {} return 0; }")
    loop = first(body, NodeKind.FOR_STMT)
    assert loop.for_init.kind is NodeKind.DECL_STMT
    assert loop.for_cond.op == "<"
    assert loop.for_inc.op == "++"
    assert loop.body.kind is NodeKind.COMPOUND_STMT


def test_if_else_and_condition():
    body = body_of("""
    int main(void) {
      int x = 1;
      if (x > 0) { x = 2; } else { x = 3; }
      return x;
    }
    """)
    node = first(body, NodeKind.IF_STMT)
    assert node.cond.op == ">"
    assert node.then_branch.kind is NodeKind.COMPOUND_STMT
    assert node.else_branch.kind is NodeKind.COMPOUND_STMT


def test_while_do_switch():
    body = body_of("""
    int main(void) {
      int i = 0;
      while (i < 3) { i += 1; }
      do { i -= 1; } while (i > 0);
      switch (i) {
        case 0: i = 9; break;
        default: i = 7;
      }
      return i;
    }
    """)
    assert first(body, NodeKind.WHILE_STMT).cond.op == "<"
    assert first(body, NodeKind.DO_STMT).cond.op == ">"
    sw = first(body, NodeKind.SWITCH_STMT)
    labels = [c for c in sw.body.children if c.kind is NodeKind.CASE_LABEL]
    assert len(labels) == 2
    assert labels[0].value == 0
    assert labels[1].value is None  # default


def test_compound_assignment_and_subscript():
    body = body_of("int a[4];\nint main(void) { a[1] += 2; return 0; }")
    assign = first(body, NodeKind.ASSIGN_OP)
    assert assign.op == "+="
    sub = assign.children[0]
    assert sub.kind is NodeKind.ARRAY_SUBSCRIPT
    assert sub.children[0].name == "a"


def test_call_arguments():
    body = body_of("""
    double f(double *v, int n);
    double g[4];
    int main(void) { double r = f(g, 4); return (int)r; }
    """)
    call = first(body, NodeKind.CALL)
    assert call.name == "f"
    assert len(call.children) == 2


def test_cast_expression():
    body = body_of("int main(void) { double d = 1.5; return (int)d; }")
    cast = first(body, NodeKind.CAST)
    assert cast.type_info.base == "int"


def test_kernel_pragma_attaches_to_loop():
    body = body_of("""
    int a[8];
    int main(void) {
      #pragma omp target teams distribute parallel for
      for (int i = 0; i < 8; ++i) { a[i] = i; }
      return 0;
    }
    """)
    d = first(body, NodeKind.OMP_DIRECTIVE)
    assert d.omp.kind is DirectiveKind.TARGET_TEAMS_DISTRIBUTE_PARALLEL_FOR
    assert d.children[0].kind is NodeKind.FOR_STMT


def test_bare_target_pragma():
    body = body_of("""
    int a[8];
    int main(void) {
      #pragma omp target
      for (int i = 0; i < 8; ++i) { a[i] = i; }
      return 0;
    }
    """)
    d = first(body, NodeKind.OMP_DIRECTIVE)
    assert d.omp.kind is DirectiveKind.TARGET


def test_map_clause_parsing():
    body = body_of("""
    int a[8];
    int b[8];
    int main(void) {
      #pragma omp target map(to: a) map(from:b)
      for (int i = 0; i < 8; ++i) { b[i] = a[i]; }
      return b[0];
    }
    """)
    d = first(body, NodeKind.OMP_DIRECTIVE)
    assert d.omp.map_entries() == [("to", ["a"]), ("from", ["b"])]


def test_bare_map_defaults_to_tofrom():
    body = body_of("""
    int a[8];
    int main(void) {
      #pragma omp target data map(a)
      { }
      return 0;
    }
    """)
    d = first(body, NodeKind.OMP_DIRECTIVE)
    assert d.omp.kind is DirectiveKind.TARGET_DATA
    assert d.omp.map_entries() == [("tofrom", ["a"])]


def test_non_target_pragma_ignored_for_offload():
    body = body_of("""
    int main(void) {
      int s = 0;
      #pragma omp parallel for reduction(+: s)
      for (int i = 0; i < 4; ++i) { s += i; }
      return s;
    }
    """)
    d = first(body, NodeKind.OMP_DIRECTIVE)
    assert d.omp.kind is DirectiveKind.NON_TARGET


def test_ternary_rejected():
    with pytest.raises(UnsupportedConstructError):
        parse_text("int main(void) { int x = 1 > 0 ? 1 : 2; return x; }")


def test_goto_rejected():
    with pytest.raises((UnsupportedConstructError, ParseError)):
        parse_text("int main(void) { goto done; done: return 0; }")


def test_missing_semicolon_is_parse_error():
    with pytest.raises(ParseError):
        parse_text("int main(void) { int x = 1 return x; }")


@pytest.mark.parametrize("expr,expected", [
    ("1 + 2 * 3", 7),
    ("(1 + 2) * 3", 9),
    ("7 / 2", 3),
    ("-7 / 2", -3),       # C truncates toward zero
    ("7 % -2", 1),
    ("100 / 2 - 1", 49),
    ("3 < 4", 1),
    ("4 <= 3", 0),
    ("2 == 2", 1),
    ("2 != 2", 0),
    ("1 && 0", 0),
    ("1 || 0", 1),
    ("!3", 0),
])
def test_fold_int(expr, expected):
    body = body_of("int main(void) { int x = %s; return x; }" % expr)
    decl = body.children[0]
    init = decl.children[0].children[0]
    assert fold_int(init) == expected


def test_fold_int_env_binding():
    body = body_of("int main(void) { int n = 5; int x = n * 2; return x; }")
    init = body.children[1].children[0].children[0]
    assert fold_int(init) is None
    assert fold_int(init, {"n": 5}) == 10


def test_spans_slice_back_to_source():
    text = "int main(void) { int x = 1 + 2; return x; }"
    src = SourceFile.from_text(text, path="t.c")
    tu, _ = parse(src)
    for node in tu.find_all(NodeKind.BINARY_OP):
        assert text[node.span.start:node.span.end] == "1 + 2"


def test_dump_is_stable():
    tu, _ = parse_text("int main(void) { return 0; }")
    out = dump(tu)
    assert "FunctionDef" in out and "ReturnStmt" in out
