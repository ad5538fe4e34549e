import pytest

from dartomp.diagnostics import LexError, UnsupportedConstructError
from dartomp.lexer import TokenKind, expand_defines, lex, tokenize
from dartomp.source import SourceFile


def src_of(text):
    return SourceFile.from_text(text, path="t.c")


def toks(text):
    return tokenize(src_of(text))


def kinds(text):
    return [t.kind for t in toks(text)]


def lexemes(text):
    return [t.lexeme for t in toks(text)]


def test_basic_stream():
    assert lexemes("int a = 3;") == ["int", "a", "=", "3", ";"]
    assert kinds("int a = 3;") == [TokenKind.KEYWORD, TokenKind.IDENT,
                                   TokenKind.PUNCT, TokenKind.INT,
                                   TokenKind.PUNCT]


def test_two_char_punctuators_greedy():
    assert lexemes("a+=b;++i;x<=y") == ["a", "+=", "b", ";", "++", "i", ";",
                                        "x", "<=", "y"]
    assert lexemes("a--b") == ["a", "--", "b"]


@pytest.mark.parametrize("lit,value", [
    ("42", 42),
    ("0", 0),
    ("0x1f", 31),
])
def test_int_literals(lit, value):
    t = toks(lit)[0]
    assert t.kind is TokenKind.INT
    assert t.value == value


@pytest.mark.parametrize("lit", [
    "1.5", "0.5e+2", "1.0e-6", "1e3", "3.5f", "2.f",
])
def test_float_literals(lit):
    t = toks("x = " + lit + ";")[2]
    assert t.kind is TokenKind.FLOAT, lit


def test_comments_are_skipped():
    text = """
    int a; // trailing note
    /* block
       spanning lines */ int b;
    """
    assert lexemes(text) == ["int", "a", ";", "int", "b", ";"]


def test_unterminated_block_comment():
    with pytest.raises(LexError):
        toks("int a; /* oops")


def test_pragma_is_one_token():
    ts = toks("#pragma omp target\nfor (;;) ;")
    assert ts[0].kind is TokenKind.PRAGMA
    assert ts[0].lexeme.startswith("#pragma omp target")
    assert ts[1].lexeme == "for"


def test_pragma_backslash_continuation_joined():
    text = "#pragma omp target \\\n    map(to: a)\nint x;"
    ts = toks(text)
    assert ts[0].kind is TokenKind.PRAGMA
    assert "map(to: a)" in ts[0].lexeme
    assert "\\" not in ts[0].lexeme


def test_define_lines_are_directives_not_tokens():
    res = lex(src_of("#define N 100\nint a[N];"))
    assert [d.text for d in res.directives] == ["#define N 100"]
    assert lexemes("#define N 100\nint a[N];") == ["int", "a", "[", "N",
                                                   "]", ";"]


def test_expand_defines_substitutes_after_definition():
    pre = expand_defines(src_of("#define N 100\nint a[N];"))
    n = [t for t in pre.tokens if t.lexeme == "N"]
    assert len(n) == 1
    assert n[0].kind is TokenKind.INT
    assert n[0].value == 100
    assert pre.defines == {"N": 100}


def test_expand_defines_chained_names():
    pre = expand_defines(src_of("#define N 8\n#define M N\nint a[M];"))
    assert pre.defines["M"] == 8


def test_function_like_macro_rejected():
    with pytest.raises(UnsupportedConstructError):
        expand_defines(src_of("#define SQ(x) ((x)*(x))\n"))


def test_non_integer_macro_rejected():
    with pytest.raises(UnsupportedConstructError):
        expand_defines(src_of("#define PI 3.14\n"))


def test_include_skipped_with_warning():
    pre = expand_defines(src_of("#include <stdio.h>\nint a;"))
    assert any("include" in w.message for w in pre.warnings)


def test_spans_are_faithful():
    text = "int abc = 12;"
    for t in toks(text):
        assert text[t.span.start:t.span.end] == t.lexeme
