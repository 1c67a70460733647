"""Concrete syntax for hybrid programs.

Grammar accepted by the parser (statements are ';'-separated, `//` starts a
line comment)::

    unit    : decl* program
    decl    : IDENT ':=' NUMBER               (scalar initial value)
            | IDENT ':=' '{' NUMBER (',' NUMBER)* '}'   (variability listing)
    program : stmt (';' stmt)*
    stmt    : IDENT ':=' expr
            | IDENT '\\'' '=' expr (',' IDENT '\\'' '=' expr)* 'for' expr
            | 'if' bexpr 'then' block 'else' block
            | 'while' bexpr 'do' '{' program '}'
    block   : '{' program '}' | stmt
    bexpr   : band ('||' band)*
    band    : bnot ('&&' bnot)*
    bnot    : '!' bnot | batom
    batom   : 'tt' | 'ff' | '(' bexpr ')' | expr RELOP expr
    expr    : term (('+'|'-') term)*
    term    : unary (('*'|'/') unary)*
    unary   : '-' unary | primary
    primary : NUMBER | 'pi' | 'euler' | FUNC '(' expr (',' expr)* ')'
            | IDENT | '(' expr ')'

Variability listings (`x := {1, 2, 3}`) are only legal in the leading
declaration section.  Scalar declarations stay in the program body as well
(re-running an initial assignment consumes no time), so pretty-printing a
program and re-parsing it reproduces the same tree.

Surface comparisons `<`, `>`, `>=`, `==`, `!=` and unary minus are rewritten
away by `desugar`; after it only `Leq`/`And`/`Or`/`Not`/`BTrue`/`BFalse`
remain on the boolean side.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

__all__ = [
    "Loc", "Expr", "Var", "Const", "Apply",
    "BoolExpr", "Leq", "Cmp", "And", "Or", "Not", "BTrue", "BFalse",
    "Atomic", "Assign", "Diff", "Program", "Atom", "Seq", "If", "While",
    "VarList", "SourceUnit", "ParseError", "ArityError",
    "parse", "parse_program", "parse_expression", "parse_boolean",
    "desugar", "desugar_program", "desugar_bool", "desugar_expr",
    "pretty", "pretty_unit", "pretty_expr", "pretty_bool",
    "ordered_vars", "expr_vars", "FUNCTIONS",
]

# function symbol -> arity; '-' is both unary and binary
FUNCTIONS = {
    "+": 2, "-": (1, 2), "*": 2, "/": 2,
    "sqrt": 1, "exp": 1, "ln": 1, "sin": 1, "cos": 1, "tan": 1,
    "min": 2, "max": 2, "pow": 2,
}
NAMED_FUNCS = ("sqrt", "exp", "ln", "sin", "cos", "tan", "min", "max", "pow")
KEYWORDS = ("if", "then", "else", "while", "do", "for", "tt", "ff")
CONSTANTS = {"pi": math.pi, "euler": math.e}
RESERVED = set(KEYWORDS) | set(NAMED_FUNCS) | set(CONSTANTS)


@dataclass(frozen=True)
class Loc:
    line: int
    col: int
    start: int
    end: int


def _meta():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Const:
    value: float
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple
    loc: Loc | None = _meta()
    src: str | None = _meta()


Expr = Var | Const | Apply


@dataclass(frozen=True)
class Leq:
    lhs: Expr
    rhs: Expr
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Cmp:
    """Surface comparison ('<', '>', '>=', '==', '!='); removed by desugar."""

    op: str
    lhs: Expr
    rhs: Expr
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class And:
    lhs: "BoolExpr"
    rhs: "BoolExpr"
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Or:
    lhs: "BoolExpr"
    rhs: "BoolExpr"
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class BTrue:
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class BFalse:
    loc: Loc | None = _meta()
    src: str | None = _meta()


BoolExpr = Leq | Cmp | And | Or | Not | BTrue | BFalse


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Diff:
    """Differential statement: pairs of (variable, right-hand side), run
    for the duration given by `duration` (evaluated once, at entry)."""

    pairs: tuple  # tuple[(str, Expr), ...]
    duration: Expr
    loc: Loc | None = _meta()
    src: str | None = _meta()


Atomic = Assign | Diff


@dataclass(frozen=True)
class Atom:
    atomic: Atomic
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class Seq:
    first: "Program"
    rest: "Program"
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: "Program"
    orelse: "Program"
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class While:
    cond: BoolExpr
    body: "Program"
    loc: Loc | None = _meta()
    src: str | None = _meta()


Program = Atom | Seq | If | While


@dataclass(frozen=True)
class VarList:
    """Variability listing `x := {v1, v2, ...}` in the declaration section."""

    var: str
    values: tuple  # tuple[float, ...]
    loc: Loc | None = _meta()
    src: str | None = _meta()


@dataclass(frozen=True)
class SourceUnit:
    declarations: tuple  # tuple[Assign | VarList, ...]
    body: Program
    source: str = field(default="", compare=False, repr=False)


# ---------------------------------------------------------------------------
# Tokenizer


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, pos: int,
                 expected: tuple = ()):
        suffix = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at {line}:{col}{suffix}")
        self.message = message
        self.line = line
        self.col = col
        self.pos = pos
        self.expected = tuple(expected)


class ArityError(ParseError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r\n]+)
  | (?P<COMMENT>//[^\n]*)
  | (?P<NUMBER>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>:=|==|!=|<=|>=|\|\||&&|[+\-*/(){},;<>=!'])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER | IDENT | KEYWORD | OP | EOF
    text: str
    line: int
    col: int
    pos: int


def tokenize(text: str) -> list:
    toks = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, col, i)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("WS", "COMMENT"):
            if kind == "IDENT" and s in KEYWORDS:
                kind = "KEYWORD"
            toks.append(Token(kind, s, line, col, i))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    toks.append(Token("EOF", "", line, col, n))
    return toks


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("OP", "KEYWORD")

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"unexpected token {self.peek().text!r}", (repr(text),))
        return self.advance()

    def fail(self, message: str, expected: tuple = ()):
        t = self.peek()
        shown = t.text if t.kind != "EOF" else "end of input"
        raise ParseError(message.replace("''", f"{shown!r}"), t.line, t.col, t.pos, expected)

    def span(self, start_tok: Token, end_pos: int | None = None) -> tuple:
        end = end_pos if end_pos is not None else self.toks[self.pos - 1].pos + len(
            self.toks[self.pos - 1].text)
        loc = Loc(start_tok.line, start_tok.col, start_tok.pos, end)
        return loc, self.text[start_tok.pos:end]

    # -- expressions

    def expression(self) -> Expr:
        start = self.peek()
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            loc, src = self.span(start)
            e = Apply(op, (e, rhs), loc=loc, src=src)
        return e

    def term(self) -> Expr:
        start = self.peek()
        e = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            rhs = self.unary()
            loc, src = self.span(start)
            e = Apply(op, (e, rhs), loc=loc, src=src)
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            start = self.advance()
            arg = self.unary()
            loc, src = self.span(start)
            if isinstance(arg, Const):
                return Const(-arg.value, loc=loc, src=src)
            return Apply("-", (arg,), loc=loc, src=src)
        return self.primary()

    def primary(self) -> Expr:
        t = self.peek()
        if t.kind == "NUMBER":
            self.advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError("numeric literal out of range", t.line, t.col, t.pos)
            loc, src = self.span(t)
            return Const(value, loc=loc, src=src)
        if t.kind == "IDENT":
            if t.text in CONSTANTS:
                self.advance()
                loc, src = self.span(t)
                return Const(CONSTANTS[t.text], loc=loc, src=src)
            if t.text in NAMED_FUNCS:
                self.advance()
                self.eat("(")
                args = [self.expression()]
                while self.at(","):
                    self.advance()
                    args.append(self.expression())
                self.eat(")")
                loc, src = self.span(t)
                want = FUNCTIONS[t.text]
                if len(args) != want:
                    raise ArityError(
                        f"the function '{t.text}' expects {want} argument(s), "
                        f"got {len(args)}", t.line, t.col, t.pos)
                return Apply(t.text, tuple(args), loc=loc, src=src)
            self.advance()
            loc, src = self.span(t)
            return Var(t.text, loc=loc, src=src)
        if self.at("("):
            self.advance()
            e = self.expression()
            self.eat(")")
            return e
        self.fail("unexpected token '' in expression",
                  ("a number", "a variable", "'('"))

    # -- boolean expressions

    def boolean(self) -> BoolExpr:
        start = self.peek()
        b = self.b_and()
        while self.at("||"):
            self.advance()
            rhs = self.b_and()
            loc, src = self.span(start)
            b = Or(b, rhs, loc=loc, src=src)
        return b

    def b_and(self) -> BoolExpr:
        start = self.peek()
        b = self.b_not()
        while self.at("&&"):
            self.advance()
            rhs = self.b_not()
            loc, src = self.span(start)
            b = And(b, rhs, loc=loc, src=src)
        return b

    def b_not(self) -> BoolExpr:
        if self.at("!"):
            start = self.advance()
            arg = self.b_not()
            loc, src = self.span(start)
            return Not(arg, loc=loc, src=src)
        return self.b_atom()

    def b_atom(self) -> BoolExpr:
        t = self.peek()
        if self.at("tt"):
            self.advance()
            loc, src = self.span(t)
            return BTrue(loc=loc, src=src)
        if self.at("ff"):
            self.advance()
            loc, src = self.span(t)
            return BFalse(loc=loc, src=src)
        if self.at("("):
            # '(' may open a parenthesised boolean or an arithmetic operand;
            # try the boolean reading first and rewind on failure.
            saved = self.pos
            try:
                self.advance()
                b = self.boolean()
                self.eat(")")
                return b
            except ParseError:
                self.pos = saved
        return self.comparison()

    def comparison(self) -> BoolExpr:
        start = self.peek()
        lhs = self.expression()
        t = self.peek()
        if t.text not in ("<=", "<", ">", ">=", "==", "!="):
            self.fail("unexpected token '' in condition",
                      ("'<='", "'<'", "'>'", "'>='", "'=='", "'!='"))
        self.advance()
        rhs = self.expression()
        loc, src = self.span(start)
        if t.text == "<=":
            return Leq(lhs, rhs, loc=loc, src=src)
        return Cmp(t.text, lhs, rhs, loc=loc, src=src)

    # -- statements

    def statement(self) -> Program:
        t = self.peek()
        if self.at("if"):
            self.advance()
            cond = self.boolean()
            self.eat("then")
            then = self.block()
            self.eat("else")
            orelse = self.block()
            loc, src = self.span(t)
            return If(cond, then, orelse, loc=loc, src=src)
        if self.at("while"):
            self.advance()
            cond = self.boolean()
            self.eat("do")
            self.eat("{")
            body = self.statements()
            self.eat("}")
            loc, src = self.span(t)
            return While(cond, body, loc=loc, src=src)
        if t.kind == "IDENT":
            if t.text in RESERVED:
                self.fail(f"reserved name {t.text!r} cannot start a statement")
            name = self.advance().text
            if self.at("'"):
                return self.differential(t, name)
            self.eat(":=")
            e = self.expression()
            loc, src = self.span(t)
            return Atom(Assign(name, e, loc=loc, src=src), loc=loc, src=src)
        self.fail("unexpected token '' at statement start",
                  ("a variable", "'if'", "'while'"))

    def differential(self, start: Token, first_var: str) -> Program:
        pairs = []
        seen = set()
        name = first_var
        while True:
            if name in seen:
                self.fail(f"variable {name!r} bound twice in a differential statement")
            seen.add(name)
            self.eat("'")
            self.eat("=")
            pairs.append((name, self.expression()))
            if not self.at(","):
                break
            self.advance()
            t = self.peek()
            if t.kind != "IDENT" or t.text in RESERVED:
                self.fail("expected a variable after ',' in differential statement",
                          ("a variable",))
            name = self.advance().text
        self.eat("for")
        duration = self.expression()
        loc, src = self.span(start)
        return Atom(Diff(tuple(pairs), duration, loc=loc, src=src), loc=loc, src=src)

    def block(self) -> Program:
        if self.at("{"):
            self.advance()
            p = self.statements()
            self.eat("}")
            return p
        return self.statement()

    def statements(self) -> Program:
        stmts = [self.statement()]
        while self.at(";"):
            self.advance()
            if self.at("}") or self.peek().kind == "EOF":
                break  # tolerate a trailing ';'
            stmts.append(self.statement())
        p = stmts[-1]
        for s in reversed(stmts[:-1]):
            p = Seq(s, p, loc=s.loc, src=s.src)
        return p

    # -- declarations and the whole unit

    def varlist(self) -> VarList:
        start = self.peek()
        name = self.advance().text
        self.eat(":=")
        self.eat("{")
        values = [self.number()]
        while self.at(","):
            self.advance()
            values.append(self.number())
        self.eat("}")
        loc, src = self.span(start)
        return VarList(name, tuple(values), loc=loc, src=src)

    def number(self) -> float:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        t = self.peek()
        if t.kind != "NUMBER":
            self.fail("expected a numeric literal", ("a number",))
        self.advance()
        v = float(t.text)
        return -v if neg else v

    def _varlist_ahead(self) -> bool:
        return (self.peek().kind == "IDENT"
                and self.peek(1).text == ":="
                and self.peek(2).text == "{")

    def unit(self) -> SourceUnit:
        declarations = []
        body_stmts = []
        listed = set()
        # leading declarations: variability listings and literal assignments
        while True:
            if self._varlist_ahead():
                if self.peek().text in RESERVED:
                    self.fail(f"reserved name {self.peek().text!r} cannot be declared")
                vl = self.varlist()
                if vl.var in listed:
                    raise ParseError(
                        f"variable {vl.var!r} has more than one variability listing",
                        vl.loc.line, vl.loc.col, vl.loc.start)
                listed.add(vl.var)
                declarations.append(vl)
                if self.at(";"):
                    self.advance()
                    continue
                break
            stmt = None
            saved = self.pos
            if self.peek().kind == "IDENT" and self.peek().text not in RESERVED \
                    and self.peek(1).text == ":=":
                stmt = self.statement()
            if stmt is not None and isinstance(stmt, Atom) \
                    and isinstance(stmt.atomic, Assign) \
                    and isinstance(stmt.atomic.expr, Const):
                # a literal initial value: recorded as a declaration and kept
                # in the body (it costs no time to re-run)
                declarations.append(stmt.atomic)
                body_stmts.append(stmt)
                if self.at(";"):
                    self.advance()
                    continue
                break
            self.pos = saved
            break
        # the rest of the program
        if self.peek().kind != "EOF":
            rest = self.statements()
            body_stmts.append(rest)
        if self.peek().kind != "EOF":
            self.fail("unexpected token '' after program end", ("';'", "end of input"))
        if not body_stmts:
            t = self.peek()
            raise ParseError("program body is empty", t.line, t.col, t.pos)
        body = body_stmts[-1]
        for s in reversed(body_stmts[:-1]):
            body = Seq(s, body, loc=s.loc, src=s.src)
        return SourceUnit(tuple(declarations), body, source=self.text)


def parse(text: str) -> SourceUnit:
    """Parse a full source unit (declarations followed by the program body)."""
    return _Parser(text).unit()


def parse_program(text: str) -> Program:
    """Parse `text` as a bare program, with no declaration extraction."""
    p = _Parser(text)
    body = p.statements()
    if p.peek().kind != "EOF":
        p.fail("unexpected token '' after program end", ("';'", "end of input"))
    return body


def parse_expression(text: str) -> Expr:
    p = _Parser(text)
    e = p.expression()
    if p.peek().kind != "EOF":
        p.fail("unexpected token '' after expression")
    return e


def parse_boolean(text: str) -> BoolExpr:
    p = _Parser(text)
    b = p.boolean()
    if p.peek().kind != "EOF":
        p.fail("unexpected token '' after condition")
    return b


# ---------------------------------------------------------------------------
# Desugaring


def desugar_expr(e: Expr) -> Expr:
    if isinstance(e, (Var, Const)):
        return e
    if e.fn == "-" and len(e.args) == 1:
        arg = desugar_expr(e.args[0])
        if isinstance(arg, Const):
            return Const(-arg.value, loc=e.loc, src=e.src)
        zero = Const(0.0, loc=e.loc, src=e.src)
        return Apply("-", (zero, arg), loc=e.loc, src=e.src)
    return Apply(e.fn, tuple(desugar_expr(a) for a in e.args), loc=e.loc, src=e.src)


def desugar_bool(b: BoolExpr) -> BoolExpr:
    if isinstance(b, (BTrue, BFalse)):
        return b
    if isinstance(b, Leq):
        return Leq(desugar_expr(b.lhs), desugar_expr(b.rhs), loc=b.loc, src=b.src)
    if isinstance(b, Cmp):
        lhs, rhs = desugar_expr(b.lhs), desugar_expr(b.rhs)
        loc, src = b.loc, b.src
        if b.op == ">=":
            return Leq(rhs, lhs, loc=loc, src=src)
        if b.op == ">":
            return Not(Leq(lhs, rhs, loc=loc, src=src), loc=loc, src=src)
        if b.op == "<":
            return Not(Leq(rhs, lhs, loc=loc, src=src), loc=loc, src=src)
        eq = And(Leq(lhs, rhs, loc=loc, src=src),
                 Leq(rhs, lhs, loc=loc, src=src), loc=loc, src=src)
        if b.op == "==":
            return eq
        return Not(eq, loc=loc, src=src)  # '!='
    if isinstance(b, And):
        return And(desugar_bool(b.lhs), desugar_bool(b.rhs), loc=b.loc, src=b.src)
    if isinstance(b, Or):
        return Or(desugar_bool(b.lhs), desugar_bool(b.rhs), loc=b.loc, src=b.src)
    return Not(desugar_bool(b.arg), loc=b.loc, src=b.src)


def desugar_program(p: Program) -> Program:
    if isinstance(p, Atom):
        a = p.atomic
        if isinstance(a, Assign):
            a2 = Assign(a.var, desugar_expr(a.expr), loc=a.loc, src=a.src)
        else:
            pairs = tuple((x, desugar_expr(e)) for x, e in a.pairs)
            a2 = Diff(pairs, desugar_expr(a.duration), loc=a.loc, src=a.src)
        return Atom(a2, loc=p.loc, src=p.src)
    if isinstance(p, Seq):
        return Seq(desugar_program(p.first), desugar_program(p.rest), loc=p.loc, src=p.src)
    if isinstance(p, If):
        return If(desugar_bool(p.cond), desugar_program(p.then),
                  desugar_program(p.orelse), loc=p.loc, src=p.src)
    return While(desugar_bool(p.cond), desugar_program(p.body), loc=p.loc, src=p.src)


def desugar(unit: SourceUnit) -> SourceUnit:
    """Rewrite surface comparisons and unary minus into the core language."""
    return SourceUnit(unit.declarations, desugar_program(unit.body), source=unit.source)


# ---------------------------------------------------------------------------
# Pretty-printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt(value: float) -> str:
    return repr(float(value))


def pretty_expr(e: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return _fmt(e.value)
    if e.fn in _PREC and len(e.args) == 2:
        prec = _PREC[e.fn]
        lhs = pretty_expr(e.args[0], prec, False)
        rhs = pretty_expr(e.args[1], prec, True)
        s = f"{lhs} {e.fn} {rhs}"
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({s})"
        return s
    if e.fn == "-" and len(e.args) == 1:
        return f"-({pretty_expr(e.args[0])})"
    args = ", ".join(pretty_expr(a) for a in e.args)
    return f"{e.fn}({args})"


_BPREC = {"||": 1, "&&": 2}


def pretty_bool(b: BoolExpr, parent_prec: int = 0) -> str:
    if isinstance(b, BTrue):
        return "tt"
    if isinstance(b, BFalse):
        return "ff"
    if isinstance(b, Leq):
        return f"{pretty_expr(b.lhs)} <= {pretty_expr(b.rhs)}"
    if isinstance(b, Cmp):
        return f"{pretty_expr(b.lhs)} {b.op} {pretty_expr(b.rhs)}"
    if isinstance(b, Not):
        return f"!({pretty_bool(b.arg)})"
    op = "&&" if isinstance(b, And) else "||"
    prec = _BPREC[op]
    s = f"{pretty_bool(b.lhs, prec)} {op} {pretty_bool(b.rhs, prec + 1)}"
    if prec < parent_prec:
        return f"({s})"
    return s


def pretty(p: Program) -> str:
    """Render a program; `parse_program(pretty(p)) == p` for canonical
    (right-nested) trees."""
    if isinstance(p, Atom):
        a = p.atomic
        if isinstance(a, Assign):
            return f"{a.var} := {pretty_expr(a.expr)}"
        eqs = ", ".join(f"{x}' = {pretty_expr(e)}" for x, e in a.pairs)
        return f"{eqs} for {pretty_expr(a.duration)}"
    if isinstance(p, Seq):
        return f"{pretty(p.first)} ; {pretty(p.rest)}"
    if isinstance(p, If):
        return (f"if {pretty_bool(p.cond)} then {{ {pretty(p.then)} }} "
                f"else {{ {pretty(p.orelse)} }}")
    return f"while {pretty_bool(p.cond)} do {{ {pretty(p.body)} }}"


def pretty_unit(unit: SourceUnit) -> str:
    """Render a unit: variability listings first, then the body (scalar
    declarations reappear through the body, where the parser keeps them)."""
    lines = []
    for d in unit.declarations:
        if isinstance(d, VarList):
            vals = ", ".join(_fmt(v) for v in d.values)
            lines.append(f"{d.var} := {{{vals}}}")
    lines.append(pretty(unit.body))
    return " ;\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Variable inventory


def expr_vars(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    out = set()
    for a in e.args:
        out |= expr_vars(a)
    return out


def _bool_vars(b: BoolExpr, out: list):
    if isinstance(b, (BTrue, BFalse)):
        return
    if isinstance(b, (Leq, Cmp)):
        _expr_vars_ordered(b.lhs, out)
        _expr_vars_ordered(b.rhs, out)
    elif isinstance(b, Not):
        _bool_vars(b.arg, out)
    else:
        _bool_vars(b.lhs, out)
        _bool_vars(b.rhs, out)


def _expr_vars_ordered(e: Expr, out: list):
    if isinstance(e, Var):
        out.append(e.name)
    elif isinstance(e, Apply):
        for a in e.args:
            _expr_vars_ordered(a, out)


def _program_vars(p: Program, out: list):
    if isinstance(p, Atom):
        a = p.atomic
        if isinstance(a, Assign):
            out.append(a.var)
            _expr_vars_ordered(a.expr, out)
        else:
            for x, e in a.pairs:
                out.append(x)
                _expr_vars_ordered(e, out)
            _expr_vars_ordered(a.duration, out)
    elif isinstance(p, Seq):
        _program_vars(p.first, out)
        _program_vars(p.rest, out)
    elif isinstance(p, If):
        _bool_vars(p.cond, out)
        _program_vars(p.then, out)
        _program_vars(p.orelse, out)
    else:
        _bool_vars(p.cond, out)
        _program_vars(p.body, out)


def ordered_vars(unit: SourceUnit) -> list:
    """All variable names in first-occurrence order (declarations, then body)."""
    seen = []
    for d in unit.declarations:
        name = d.var
        if name not in seen:
            seen.append(name)
    raw: list = []
    _program_vars(unit.body, raw)
    for name in raw:
        if name not in seen:
            seen.append(name)
    return seen
