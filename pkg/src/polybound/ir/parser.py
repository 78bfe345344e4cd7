"""Parser and printer for the rule-based input format.

Accepted shape (whitespace insensitive, UTF-8)::

    (GOAL COMPLEXITY)
    (STARTTERM (FUNCTIONSYMBOLS l0))
    (VAR x1 x2)
    (RULES
      l0(x1,x2) -> l1(x1,x2)
      l1(x1,x2) -> l1(x1-1,x2) :|: x1 > 0 && !(x2 < 0)
    )

The i-th right-hand side expression updates the i-th declared variable.
Guards support ``&&``, ``||``, ``!`` and the relations < > <= >= = !=;
negation is eliminated and every relation is normalized to atoms ``p > 0``
with integer coefficients.  Transitions are named t0, t1, ... in order of
appearance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    NEGATED_REL,
    And,
    Atom,
    Formula,
    Or,
    TRUE,
    mk_and,
    mk_or,
    normalize_atom,
)
from .poly import Polynomial
from .program import Program, Transition


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int


_SYMBOLS = [
    "->", ":|:", "&&", "||", "<=", ">=", "!=",
    "(", ")", ",", "<", ">", "=", "!", "+", "-", "*", "/", "^",
]


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# Small guard AST kept until negations are pushed to the leaves.
@dataclass
class _Rel:
    lhs: Polynomial
    rel: str
    rhs: Polynomial


@dataclass
class _Not:
    sub: object


@dataclass
class _Junction:
    op: str  # "and" | "or"
    parts: list


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind:
            want = what or kind
            raise ParseError(f"expected {want}, found {tok.value!r}", tok.line, tok.col)
        return tok

    def expect_keyword(self, word: str) -> None:
        tok = self.expect("ident", word)
        if tok.value != word:
            raise ParseError(f"expected {word}, found {tok.value!r}", tok.line, tok.col)

    # -- top level -----------------------------------------------------

    def program(self) -> Program:
        self.expect("(")
        self.expect_keyword("GOAL")
        self.expect_keyword("COMPLEXITY")
        self.expect(")")
        self.expect("(")
        self.expect_keyword("STARTTERM")
        self.expect("(")
        self.expect_keyword("FUNCTIONSYMBOLS")
        init = self.expect("ident").value
        self.expect(")")
        self.expect(")")
        self.expect("(")
        self.expect_keyword("VAR")
        variables: list[str] = []
        while self.peek().kind == "ident":
            tok = self.next()
            if tok.value in variables:
                raise ParseError(f"duplicate variable {tok.value}", tok.line, tok.col)
            variables.append(tok.value)
        if not variables:
            tok = self.peek()
            raise ParseError("empty variable declaration", tok.line, tok.col)
        self.expect(")")
        self.expect("(")
        self.expect_keyword("RULES")
        transitions: list[Transition] = []
        locs: set[str] = {init}
        while self.peek().kind == "ident":
            transitions.append(self.rule(f"t{len(transitions)}", tuple(variables), init))
            locs.add(transitions[-1].src)
            locs.add(transitions[-1].tgt)
        self.expect(")")
        self.expect("eof", "end of input")
        if not transitions:
            raise ParseError("no rules", 1, 1)
        return Program(tuple(variables), frozenset(locs), init, tuple(transitions))

    def rule(self, tid: str, variables: tuple[str, ...], init: str) -> Transition:
        src_tok = self.expect("ident", "location")
        self.expect("(")
        for i, v in enumerate(variables):
            tok = self.expect("ident", "variable")
            if tok.value != v:
                raise ParseError(
                    f"left-hand side must list the declared variables; "
                    f"expected {v}, found {tok.value}",
                    tok.line,
                    tok.col,
                )
            if i + 1 < len(variables):
                self.expect(",")
        self.expect(")")
        self.expect("->")
        tgt_tok = self.expect("ident", "location")
        if tgt_tok.value == init:
            raise ParseError("rule targets the start symbol", tgt_tok.line, tgt_tok.col)
        self.expect("(")
        update: dict[str, Polynomial] = {}
        for i, v in enumerate(variables):
            tok = self.peek()
            rhs = self.poly(variables)
            if not rhs.is_integral():
                raise ParseError(
                    f"non-integer coefficient in update of {v}", tok.line, tok.col
                )
            update[v] = rhs
            if i + 1 < len(variables):
                self.expect(",")
        self.expect(")")
        guard: Formula = TRUE
        if self.peek().kind == ":|:":
            self.next()
            guard = self.guard(variables)
        return Transition(tid, src_tok.value, guard, update, tgt_tok.value)

    # -- guards ----------------------------------------------------------

    def guard(self, variables: tuple[str, ...]) -> Formula:
        ast = self.disj(variables)
        return _to_formula(ast, negated=False)

    def disj(self, variables) -> object:
        parts = [self.conj(variables)]
        while self.peek().kind == "||":
            self.next()
            parts.append(self.conj(variables))
        return parts[0] if len(parts) == 1 else _Junction("or", parts)

    def conj(self, variables) -> object:
        parts = [self.lit(variables)]
        while self.peek().kind == "&&":
            self.next()
            parts.append(self.lit(variables))
        return parts[0] if len(parts) == 1 else _Junction("and", parts)

    def lit(self, variables) -> object:
        if self.peek().kind == "!":
            self.next()
            return _Not(self.lit(variables))
        if self.peek().kind == "(":
            # Either a parenthesized sub-formula or a parenthesized
            # polynomial; decide by scanning for a relation before the
            # matching close paren at depth 0.
            if self._paren_is_formula():
                self.next()
                sub = self.disj(variables)
                self.expect(")")
                return sub
        tok = self.peek()
        lhs = self.poly(variables)
        rel_tok = self.next()
        if rel_tok.kind not in ("<", ">", "<=", ">=", "=", "!="):
            raise ParseError(
                f"expected relation, found {rel_tok.value!r}", rel_tok.line, rel_tok.col
            )
        rhs = self.poly(variables)
        for side, p in (("left", lhs), ("right", rhs)):
            if not p.is_integral():
                raise ParseError(
                    f"non-integer coefficient in guard ({side} side)",
                    tok.line,
                    tok.col,
                )
        return _Rel(lhs, rel_tok.kind, rhs)

    def _paren_is_formula(self) -> bool:
        depth = 0
        for tok in self.tokens[self.pos :]:
            if tok.kind == "(":
                depth += 1
            elif tok.kind == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif depth >= 1 and tok.kind in ("<", ">", "<=", ">=", "=", "!=", "&&", "||"):
                return True
            elif tok.kind == "eof":
                break
        return False

    # -- polynomial expressions -------------------------------------------

    def poly(self, variables) -> Polynomial:
        result = self.term(variables)
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.term(variables)
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self, variables) -> Polynomial:
        result = self.factor(variables)
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            rhs = self.factor(variables)
            if op == "*":
                result = result * rhs
            else:
                tok = self.peek()
                if not rhs.is_const or rhs.const_value() == 0:
                    raise ParseError(
                        "division only by nonzero integer constants", tok.line, tok.col
                    )
                result = result.scale(Fraction(1) / rhs.const_value())
        return result

    def factor(self, variables) -> Polynomial:
        tok = self.peek()
        if tok.kind == "-":
            self.next()
            return -self.factor(variables)
        if tok.kind == "+":
            self.next()
            return self.factor(variables)
        base = self.atom_expr(variables)
        while self.peek().kind == "^":
            self.next()
            exp_tok = self.expect("int", "integer exponent")
            base = base ** int(exp_tok.value)
        return base

    def atom_expr(self, variables) -> Polynomial:
        tok = self.next()
        if tok.kind == "int":
            return Polynomial.const(int(tok.value))
        if tok.kind == "ident":
            if tok.value not in variables:
                raise ParseError(f"unknown variable {tok.value}", tok.line, tok.col)
            return Polynomial.var(tok.value)
        if tok.kind == "(":
            inner = self.poly(variables)
            self.expect(")")
            return inner
        raise ParseError(f"expected expression, found {tok.value!r}", tok.line, tok.col)


def _to_formula(ast, negated: bool) -> Formula:
    if isinstance(ast, _Not):
        return _to_formula(ast.sub, not negated)
    if isinstance(ast, _Rel):
        rel = NEGATED_REL[ast.rel] if negated else ast.rel
        return normalize_atom(ast.lhs, rel, ast.rhs)
    assert isinstance(ast, _Junction)
    parts = [_to_formula(p, negated) for p in ast.parts]
    conjunctive = (ast.op == "and") != negated
    return mk_and(parts) if conjunctive else mk_or(parts)


def parse_program(text: str) -> Program:
    return _Parser(tokenize(text)).program()


# -- printing ---------------------------------------------------------------


def print_program(p: Program) -> str:
    lines = [
        "(GOAL COMPLEXITY)",
        f"(STARTTERM (FUNCTIONSYMBOLS {p.init}))",
        "(VAR " + " ".join(p.vars) + ")",
        "(RULES",
    ]
    for t in p.transitions:
        lhs = f"{t.src}(" + ",".join(p.vars) + ")"
        rhs = f"{t.tgt}(" + ",".join(str(t.update[v]) for v in p.vars) + ")"
        line = f"  {lhs} -> {rhs}"
        if t.guard != TRUE:
            line += " :|: " + _print_guard(t.guard)
        lines.append(line)
    lines.append(")")
    return "\n".join(lines) + "\n"


def _print_guard(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.poly} > 0"
    if isinstance(f, And):
        return " && ".join(
            f"({_print_guard(c)})" if isinstance(c, Or) else _print_guard(c)
            for c in f.children
        )
    return " || ".join(_print_guard(c) for c in f.children)
