"""Recursive-descent parser producing the C-subset AST.

Declarations are resolved while parsing: every DeclRef points at its VarDecl,
ParamDecl, or global declaration.  Multi-declarator statements are normalized
into one VarDecl per name under a single DeclStmt.  Pragma tokens become
OmpDirective nodes that parent the statement they annotate (standalone data
directives carry no child).
"""
from __future__ import annotations

from .diagnostics import Diagnostic, ParseError, UnsupportedConstructError
from .lexer import Preprocessed, Token, TokenKind, expand_defines
from .nodes import AstNode, NodeKind, TypeInfo, link_parents
from .omp import STANDALONE_KINDS, parse_omp_pragma
from .source import SourceFile, Span

_TYPE_KEYWORDS = {"int", "float", "double", "char", "void", "struct", "const"}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%="}


class Parser:
    def __init__(self, src: SourceFile, tokens: list[Token]):
        self.src = src
        self.toks = tokens
        self.pos = 0
        self.scopes: list[dict[str, AstNode]] = [{}]  # [0] is file scope
        self.warnings: list[Diagnostic] = []

    # ------------------------------------------------------------------
    # cursor helpers
    # ------------------------------------------------------------------
    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.toks[i] if i < len(self.toks) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def check(self, lexeme: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t is not None and t.lexeme == lexeme and t.kind is not TokenKind.STRING

    def match(self, lexeme: str) -> Token | None:
        if self.check(lexeme):
            return self.advance()
        return None

    def expect(self, lexeme: str, what: str = "") -> Token:
        t = self.peek()
        if t is None:
            raise self._err_eof(f"expected {lexeme!r}" + (f" {what}" if what else ""))
        if t.lexeme != lexeme:
            raise self._err(t, f"expected {lexeme!r}" + (f" {what}" if what else "")
                            + f", found {t.lexeme!r}")
        return self.advance()

    def _err(self, tok: Token, msg: str) -> ParseError:
        return ParseError.at(self.src, tok.span.start, msg)

    def _err_eof(self, msg: str) -> ParseError:
        return ParseError.at(self.src, len(self.src.text), msg + " at end of file")

    def _unsupported(self, tok: Token, msg: str) -> UnsupportedConstructError:
        return UnsupportedConstructError.at(self.src, tok.span.start, msg)

    # ------------------------------------------------------------------
    # scopes
    # ------------------------------------------------------------------
    def push_scope(self) -> None:
        self.scopes.append({})

    def pop_scope(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, node: AstNode) -> None:
        self.scopes[-1][name] = node

    def lookup(self, name: str) -> AstNode | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # ------------------------------------------------------------------
    # translation unit
    # ------------------------------------------------------------------
    def parse_translation_unit(self) -> AstNode:
        start = self.peek().span.start if not self.at_end() else 0
        children: list[AstNode] = []
        while not self.at_end():
            t = self.peek()
            if t.kind is TokenKind.PRAGMA:
                self.warnings.append(Diagnostic(
                    self.src.path, t.line, 1, "warning",
                    "pragma outside any function ignored"))
                self.advance()
                continue
            if t.lexeme == "struct" and self.peek(2) is not None and self.check("{", 2):
                children.append(self.parse_struct_decl())
                continue
            children.append(self.parse_external_decl())
        end = self.toks[-1].span.end if self.toks else start
        tu = AstNode(NodeKind.TRANSLATION_UNIT, Span(0, max(end, len(self.src.text))),
                     children)
        link_parents(tu)
        return tu

    def parse_struct_decl(self) -> AstNode:
        start = self.expect("struct").span.start
        tag = self._expect_ident("struct tag")
        self.expect("{")
        members: list[AstNode] = []
        while not self.check("}"):
            base = self.parse_type_specifier()
            while True:
                members.append(self.parse_declarator_as(NodeKind.VAR_DECL, base))
                if not self.match(","):
                    break
            self.expect(";")
        close = self.expect("}")
        semi = self.expect(";")
        node = AstNode(NodeKind.STRUCT_DECL, Span(start, semi.span.end), members, name=tag.lexeme)
        return node

    def parse_external_decl(self) -> AstNode:
        base = self.parse_type_specifier()
        decl = self.parse_declarator_as(NodeKind.VAR_DECL, base)
        if self.check("("):
            return self.parse_function_rest(decl)
        # global variable(s)
        start = decl.span.start
        decls = [decl]
        self._maybe_initializer(decl)
        while self.match(","):
            d = self.parse_declarator_as(NodeKind.VAR_DECL, base)
            self._maybe_initializer(d)
            decls.append(d)
        semi = self.expect(";")
        for d in decls:
            self.declare(d.name, d)
        return AstNode(NodeKind.DECL_STMT, Span(start, semi.span.end), decls)

    def parse_function_rest(self, head: AstNode) -> AstNode:
        self.expect("(")
        params: list[AstNode] = []
        if not self.check(")"):
            if self.check("void") and self.check(")", 1):
                self.advance()
            else:
                while True:
                    pbase = self.parse_type_specifier()
                    params.append(self.parse_declarator_as(NodeKind.PARAM_DECL, pbase))
                    if not self.match(","):
                        break
        self.expect(")")
        fn = AstNode(NodeKind.FUNCTION_DEF, head.span, list(params),
                     name=head.name, type_info=head.type_info)
        self.declare(fn.name, fn)
        if self.match(";"):
            last = params[-1].span.end if params else head.span.end
            fn.span = Span(head.span.start, last)
            return fn
        self.push_scope()
        for p in params:
            self.declare(p.name, p)
        body = self.parse_compound()
        self.pop_scope()
        fn.children.append(body)
        fn.span = Span(head.span.start, body.span.end)
        return fn

    # ------------------------------------------------------------------
    # types and declarators
    # ------------------------------------------------------------------
    def starts_type(self, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t is not None and t.kind is TokenKind.KEYWORD and t.lexeme in _TYPE_KEYWORDS

    def parse_type_specifier(self) -> TypeInfo:
        const = False
        base: str | None = None
        tag: str | None = None
        while True:
            t = self.peek()
            if t is None:
                raise self._err_eof("expected type")
            if t.lexeme == "const":
                const = True
                self.advance()
                continue
            if t.lexeme == "struct":
                self.advance()
                tag = self._expect_ident("struct tag").lexeme
                base = "struct"
                continue
            if t.lexeme in ("int", "float", "double", "char", "void"):
                base = t.lexeme
                self.advance()
                continue
            break
        if base is None:
            t = self.peek()
            raise self._err(t, f"expected type, found {t.lexeme!r}")
        return TypeInfo(base=base, struct_tag=tag, is_const=const)

    def parse_declarator_as(self, kind: NodeKind, base: TypeInfo) -> AstNode:
        """Parse ``*... name [dims]...`` and attach the composed type."""
        depth = 0
        ptr_const = False
        start = None
        while self.check("*"):
            tok = self.advance()
            start = start or tok.span.start
            depth += 1
            if self.match("const"):
                ptr_const = True
        name_tok = self._expect_ident("declarator name")
        start = start if start is not None else name_tok.span.start
        dims: list[int | None] = []
        end = name_tok.span.end
        while self.check("["):
            self.advance()
            if self.check("]"):
                dims.append(None)
            else:
                dims.append(self._const_int_expr())
            end = self.expect("]").span.end
        # A leading const with a pointer declarator qualifies the pointee.
        is_const = base.is_const and depth == 0
        pointee_const = base.is_const and depth > 0
        ti = TypeInfo(base=base.base, struct_tag=base.struct_tag, pointer_depth=depth,
                      array_dims=tuple(dims), is_const=is_const or ptr_const,
                      pointee_const=pointee_const)
        return AstNode(kind, Span(start, end), [], name=name_tok.lexeme, type_info=ti)

    def _expect_ident(self, what: str) -> Token:
        t = self.peek()
        if t is None:
            raise self._err_eof(f"expected {what}")
        if t.kind is not TokenKind.IDENT:
            raise self._err(t, f"expected {what}, found {t.lexeme!r}")
        return self.advance()

    def _const_int_expr(self) -> int:
        """Fold a constant integer expression (array dimensions)."""
        expr = self.parse_expr()
        val = fold_int(expr)
        if val is None:
            raise self._err_at_node(expr, "array dimension is not an integer constant")
        return val

    def _err_at_node(self, node: AstNode, msg: str) -> ParseError:
        return ParseError.at(self.src, node.span.start, msg)

    def _maybe_initializer(self, decl: AstNode) -> None:
        if self.match("="):
            decl.children.append(self.parse_initializer())
            decl.span = Span(decl.span.start, decl.children[-1].span.end)

    def parse_initializer(self) -> AstNode:
        if self.check("{"):
            start = self.advance().span.start
            elems: list[AstNode] = []
            if not self.check("}"):
                while True:
                    elems.append(self.parse_initializer())
                    if not self.match(","):
                        break
            end = self.expect("}").span.end
            return AstNode(NodeKind.INIT_LIST, Span(start, end), elems)
        return self.parse_assignment()

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------
    def parse_compound(self) -> AstNode:
        open_tok = self.expect("{")
        self.push_scope()
        stmts: list[AstNode] = []
        while not self.check("}"):
            if self.at_end():
                raise self._err_eof("unterminated block")
            stmts.append(self.parse_statement())
        close = self.advance()
        self.pop_scope()
        return AstNode(NodeKind.COMPOUND_STMT, Span(open_tok.span.start, close.span.end), stmts)

    def parse_statement(self) -> AstNode:
        t = self.peek()
        if t is None:
            raise self._err_eof("expected statement")
        if t.kind is TokenKind.PRAGMA:
            return self.parse_pragma_stmt()
        if t.lexeme == "{":
            return self.parse_compound()
        if t.lexeme == ";":
            tok = self.advance()
            return AstNode(NodeKind.EXPR_STMT, tok.span, [])
        if t.lexeme == "if":
            return self.parse_if()
        if t.lexeme == "switch":
            return self.parse_switch()
        if t.lexeme == "for":
            return self.parse_for()
        if t.lexeme == "while":
            return self.parse_while()
        if t.lexeme == "do":
            return self.parse_do()
        if t.lexeme == "return":
            start = self.advance().span.start
            expr = None
            if not self.check(";"):
                expr = self.parse_expr()
            semi = self.expect(";")
            return AstNode(NodeKind.RETURN_STMT, Span(start, semi.span.end),
                           [expr] if expr else [])
        if t.lexeme == "break":
            start = self.advance().span.start
            semi = self.expect(";")
            return AstNode(NodeKind.BREAK_STMT, Span(start, semi.span.end), [])
        if t.lexeme == "continue":
            start = self.advance().span.start
            semi = self.expect(";")
            return AstNode(NodeKind.CONTINUE_STMT, Span(start, semi.span.end), [])
        if t.lexeme in ("case", "default"):
            return self.parse_case_label()
        if t.lexeme == "goto":
            raise self._unsupported(t, "goto unsupported")
        if self.starts_type():
            return self.parse_decl_stmt()
        expr = self.parse_expr()
        semi = self.expect(";")
        return AstNode(NodeKind.EXPR_STMT, Span(expr.span.start, semi.span.end), [expr])

    def parse_pragma_stmt(self) -> AstNode:
        tok = self.advance()
        info = parse_omp_pragma(tok.lexeme, self.src.path, tok.line)
        if info is None:
            self.warnings.append(Diagnostic(self.src.path, tok.line, 1, "warning",
                                            f"non-OpenMP pragma ignored: {tok.lexeme}"))
            return self.parse_statement()
        node = AstNode(NodeKind.OMP_DIRECTIVE, tok.span, [], omp=info)
        if info.kind in STANDALONE_KINDS:
            return node
        stmt = self.parse_statement()
        node.children.append(stmt)
        node.span = Span(tok.span.start, stmt.span.end)
        return node

    def parse_decl_stmt(self) -> AstNode:
        base = self.parse_type_specifier()
        decls: list[AstNode] = []
        while True:
            d = self.parse_declarator_as(NodeKind.VAR_DECL, base)
            self._maybe_initializer(d)
            self.declare(d.name, d)
            decls.append(d)
            if not self.match(","):
                break
        semi = self.expect(";")
        return AstNode(NodeKind.DECL_STMT, Span(decls[0].span.start, semi.span.end), decls)

    def parse_if(self) -> AstNode:
        start = self.advance().span.start
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_statement()
        children = [cond, then]
        end = then.span.end
        if self.match("else"):
            els = self.parse_statement()
            children.append(els)
            end = els.span.end
        return AstNode(NodeKind.IF_STMT, Span(start, end), children)

    def parse_switch(self) -> AstNode:
        start = self.advance().span.start
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_compound()
        return AstNode(NodeKind.SWITCH_STMT, Span(start, body.span.end), [cond, body])

    def parse_case_label(self) -> AstNode:
        t = self.advance()
        if t.lexeme == "case":
            expr = self.parse_expr()
            val = fold_int(expr)
            if val is None:
                raise self._err_at_node(expr, "case label is not an integer constant")
            colon = self.expect(":")
            return AstNode(NodeKind.CASE_LABEL, Span(t.span.start, colon.span.end),
                           [], value=val)
        colon = self.expect(":")
        return AstNode(NodeKind.CASE_LABEL, Span(t.span.start, colon.span.end), [])

    def parse_for(self) -> AstNode:
        start = self.advance().span.start
        self.expect("(")
        self.push_scope()
        if self.check(";"):
            init: AstNode = AstNode(NodeKind.EMPTY, self.advance().span, [])
        elif self.starts_type():
            init = self.parse_decl_stmt()
        else:
            expr = self.parse_expr()
            semi = self.expect(";")
            init = AstNode(NodeKind.EXPR_STMT, Span(expr.span.start, semi.span.end), [expr])
        if self.check(";"):
            cond: AstNode = AstNode(NodeKind.EMPTY, self.peek().span, [])
        else:
            cond = self.parse_expr()
        self.expect(";")
        if self.check(")"):
            inc: AstNode = AstNode(NodeKind.EMPTY, self.peek().span, [])
        else:
            inc = self.parse_expr()
        self.expect(")")
        body = self.parse_statement()
        self.pop_scope()
        return AstNode(NodeKind.FOR_STMT, Span(start, body.span.end),
                       [init, cond, inc, body])

    def parse_while(self) -> AstNode:
        start = self.advance().span.start
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_statement()
        return AstNode(NodeKind.WHILE_STMT, Span(start, body.span.end), [cond, body])

    def parse_do(self) -> AstNode:
        start = self.advance().span.start
        body = self.parse_statement()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        semi = self.expect(";")
        return AstNode(NodeKind.DO_STMT, Span(start, semi.span.end), [body, cond])

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------
    def parse_expr(self) -> AstNode:
        return self.parse_assignment()

    def parse_assignment(self) -> AstNode:
        lhs = self.parse_logical_or()
        t = self.peek()
        if t is not None and t.kind is TokenKind.PUNCT and t.lexeme in _ASSIGN_OPS:
            op = self.advance().lexeme
            if lhs.kind not in (NodeKind.DECL_REF, NodeKind.ARRAY_SUBSCRIPT,
                                NodeKind.MEMBER_ACCESS, NodeKind.UNARY_OP):
                raise self._err_at_node(lhs, "assignment target is not an lvalue")
            if lhs.kind is NodeKind.UNARY_OP and lhs.op != "*":
                raise self._err_at_node(lhs, "assignment target is not an lvalue")
            rhs = self.parse_assignment()
            return AstNode(NodeKind.ASSIGN_OP, Span(lhs.span.start, rhs.span.end),
                           [lhs, rhs], op=op)
        if t is not None and t.lexeme == "?":
            raise self._unsupported(t, "conditional operator unsupported")
        return lhs

    def _binary_chain(self, sub, ops: set[str]) -> AstNode:
        lhs = sub()
        while True:
            t = self.peek()
            if t is None or t.kind is not TokenKind.PUNCT or t.lexeme not in ops:
                return lhs
            op = self.advance().lexeme
            rhs = sub()
            lhs = AstNode(NodeKind.BINARY_OP, Span(lhs.span.start, rhs.span.end),
                          [lhs, rhs], op=op)

    def parse_logical_or(self) -> AstNode:
        return self._binary_chain(self.parse_logical_and, {"||"})

    def parse_logical_and(self) -> AstNode:
        return self._binary_chain(self.parse_equality, {"&&"})

    def parse_equality(self) -> AstNode:
        return self._binary_chain(self.parse_relational, {"==", "!="})

    def parse_relational(self) -> AstNode:
        return self._binary_chain(self.parse_additive, {"<", ">", "<=", ">="})

    def parse_additive(self) -> AstNode:
        return self._binary_chain(self.parse_multiplicative, {"+", "-"})

    def parse_multiplicative(self) -> AstNode:
        return self._binary_chain(self.parse_unary, {"*", "/", "%"})

    def parse_unary(self) -> AstNode:
        t = self.peek()
        if t is None:
            raise self._err_eof("expected expression")
        if t.kind is TokenKind.PUNCT and t.lexeme in ("!", "-", "+", "*", "&", "++", "--"):
            op_tok = self.advance()
            operand = self.parse_unary()
            return AstNode(NodeKind.UNARY_OP, Span(op_tok.span.start, operand.span.end),
                           [operand], op=op_tok.lexeme)
        if t.lexeme == "(" and self.starts_type(1):
            open_tok = self.advance()
            base = self.parse_type_specifier()
            depth = 0
            while self.match("*"):
                depth += 1
            self.expect(")")
            operand = self.parse_unary()
            ti = TypeInfo(base=base.base, struct_tag=base.struct_tag,
                          pointer_depth=depth, is_const=base.is_const)
            return AstNode(NodeKind.CAST, Span(open_tok.span.start, operand.span.end),
                           [operand], type_info=ti)
        return self.parse_postfix()

    def parse_postfix(self) -> AstNode:
        node = self.parse_primary()
        while True:
            t = self.peek()
            if t is None or t.kind is TokenKind.PRAGMA:
                return node
            if t.lexeme == "[":
                self.advance()
                index = self.parse_expr()
                close = self.expect("]")
                node = AstNode(NodeKind.ARRAY_SUBSCRIPT,
                               Span(node.span.start, close.span.end), [node, index])
                continue
            if t.lexeme == "(":
                if node.kind is not NodeKind.DECL_REF:
                    raise self._unsupported(t, "indirect calls unsupported")
                self.advance()
                args: list[AstNode] = []
                if not self.check(")"):
                    while True:
                        args.append(self.parse_assignment())
                        if not self.match(","):
                            break
                close = self.expect(")")
                callee = node.name
                node = AstNode(NodeKind.CALL, Span(node.span.start, close.span.end),
                               args, name=callee)
                continue
            if t.lexeme == "." or t.lexeme == "->":
                op = self.advance().lexeme
                member = self._expect_ident("member name")
                node = AstNode(NodeKind.MEMBER_ACCESS,
                               Span(node.span.start, member.span.end),
                               [node], name=member.lexeme, op=op)
                continue
            if t.lexeme in ("++", "--"):
                op_tok = self.advance()
                node = AstNode(NodeKind.UNARY_OP, Span(node.span.start, op_tok.span.end),
                               [node], op=op_tok.lexeme, postfix=True)
                continue
            return node

    def parse_primary(self) -> AstNode:
        t = self.peek()
        if t is None:
            raise self._err_eof("expected expression")
        if t.kind is TokenKind.INT:
            self.advance()
            return AstNode(NodeKind.INT_LITERAL, t.span, [], value=t.value)
        if t.kind is TokenKind.FLOAT:
            self.advance()
            return AstNode(NodeKind.FLOAT_LITERAL, t.span, [], value=t.value)
        if t.kind is TokenKind.STRING:
            self.advance()
            return AstNode(NodeKind.STRING_LITERAL, t.span, [], value=t.value)
        if t.kind is TokenKind.IDENT:
            self.advance()
            node = AstNode(NodeKind.DECL_REF, t.span, [], name=t.lexeme)
            target = self.lookup(t.lexeme)
            if target is not None and target.kind in (NodeKind.VAR_DECL, NodeKind.PARAM_DECL):
                node.decl = target
                node.type_info = target.type_info
            elif target is None and not self.check("("):
                node.unresolved_global = True
            return node
        if t.lexeme == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self._err(t, f"expected expression, found {t.lexeme!r}")


def fold_int(node: AstNode, env: dict[str, int] | None = None) -> int | None:
    """Fold an integer-constant expression; env supplies named bindings."""
    if node.kind is NodeKind.INT_LITERAL:
        return int(node.value)
    if node.kind is NodeKind.DECL_REF and env and node.name in env:
        return env[node.name]
    if node.kind is NodeKind.UNARY_OP and node.op == "-" and not node.postfix:
        v = fold_int(node.children[0], env)
        return None if v is None else -v
    if node.kind is NodeKind.UNARY_OP and node.op == "+" and not node.postfix:
        return fold_int(node.children[0], env)
    if node.kind is NodeKind.BINARY_OP:
        a = fold_int(node.children[0], env)
        b = fold_int(node.children[1], env)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0:
                return None
            q = abs(a) // abs(b)  # C division truncates toward zero
            return q if (a >= 0) == (b >= 0) else -q
        if node.op == "%":
            if b == 0:
                return None
            q = abs(a) // abs(b)
            q = q if (a >= 0) == (b >= 0) else -q
            return a - b * q
        if node.op == "<":
            return int(a < b)
        if node.op == "<=":
            return int(a <= b)
        if node.op == ">":
            return int(a > b)
        if node.op == ">=":
            return int(a >= b)
        if node.op == "==":
            return int(a == b)
        if node.op == "!=":
            return int(a != b)
        if node.op == "&&":
            return int(bool(a) and bool(b))
        if node.op == "||":
            return int(bool(a) or bool(b))
    if node.kind is NodeKind.UNARY_OP and node.op == "!" and not node.postfix:
        v = fold_int(node.children[0], env)
        return None if v is None else int(not v)
    return None


def parse(src: SourceFile, pre: Preprocessed | None = None) -> tuple[AstNode, list[Diagnostic]]:
    """Parse a source file into a TranslationUnit; returns (tree, warnings)."""
    if pre is None:
        pre = expand_defines(src)
    p = Parser(src, pre.tokens)
    tu = p.parse_translation_unit()
    return tu, pre.warnings + p.warnings
