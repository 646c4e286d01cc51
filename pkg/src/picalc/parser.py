"""ASCII concrete syntax for agents, residuals and ``.pi`` definition files.

Grammar, loosest to tightest::

    agent  := par ('+' par)*
    par    := unary ('|' unary)*
    unary  := '0' | 'tau' '.' unary | a '(' x ')' '.' unary | a '!' b '.' unary
            | '[' a '=' b ']' unary | '[' a '!=' b ']' unary
            | '(' '^' x ')' unary | '!' unary | '(' agent ')' | DEF

Channel names match ``[a-z][A-Za-z0-9_']*`` (``tau`` is a keyword); ``DEF`` is
an upper-case identifier bound in a definitions file.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional

from .nominal import fresh_name, intern_name, is_reserved
from .syntax import (
    NIL,
    Agent,
    Bang,
    Input,
    Match,
    Mismatch,
    Nil,
    Output,
    Par,
    Res,
    Sum,
    Tau,
    all_names,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: tuple = ()):
        self.span = span
        self.message = message or "syntax error"
        self.expected = tuple(expected)
        super().__init__(self.render())

    def render(self, src: Optional[str] = None) -> str:
        s = f"{self.span.line}:{self.span.column}: {self.message}"
        if self.expected:
            s += f" (expected {', '.join(self.expected)})"
        if src is not None:
            line = src.splitlines()[self.span.line - 1] if src.splitlines() else ""
            s += f"\n  {line}\n  {' ' * (self.span.column - 1)}^"
        return s


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, DEF, SYM, ZERO, TAU, EOF
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<name>[a-z][A-Za-z0-9_']*)"
    r"|(?P<def>[A-Z][A-Za-z0-9_']*)"
    r"|(?P<zero>0)"
    r"|(?P<sym>!=|[().\[\]=!+|^])"
)


def _span(src: str, start: int, end: int) -> SourceSpan:
    line = src.count("\n", 0, start) + 1
    col = start - (src.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, col)


def tokenize(src: str) -> list[Token]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            ch = src[pos]
            why = "reserved atom" if ch == "#" else f"unexpected character {ch!r}"
            raise ParseError(_span(src, pos, pos + 1), why)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind == "name":
                kind = "TAU" if text == "tau" else "NAME"
            toks.append(Token(kind.upper(), text, _span(src, m.start(), m.end())))
        pos = m.end()
    toks.append(Token("EOF", "", _span(src, len(src), len(src))))
    return toks


class _Parser:
    def __init__(self, src: str, defs: Mapping[str, Agent]):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.defs = defs

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, msg: str, *expected: str):
        raise ParseError(self.tok.span, msg, expected)

    def eat(self, text: str) -> Token:
        t = self.tok
        if t.text != text or t.kind in ("NAME", "DEF"):
            got = t.text or "end of input"
            self.fail(f"unexpected {got!r}", repr(text))
        self.i += 1
        return t

    def name(self) -> str:
        t = self.tok
        if t.kind != "NAME":
            got = t.text or "end of input"
            self.fail(f"unexpected {got!r}", "name")
        self.i += 1
        return intern_name(t.text)

    def agent(self) -> Agent:
        p = self.par()
        while self.tok.text == "+" and self.tok.kind == "SYM":
            self.i += 1
            p = Sum(p, self.par())
        return p

    def par(self) -> Agent:
        p = self.unary()
        while self.tok.text == "|" and self.tok.kind == "SYM":
            self.i += 1
            p = Par(p, self.unary())
        return p

    def unary(self) -> Agent:
        t = self.tok
        if t.kind == "ZERO":
            self.i += 1
            return NIL
        if t.kind == "TAU":
            self.i += 1
            self.eat(".")
            return Tau(self.unary())
        if t.kind == "DEF":
            self.i += 1
            if t.text not in self.defs:
                raise ParseError(t.span, f"undefined agent {t.text!r}")
            return self.defs[t.text]
        if t.kind == "NAME":
            a = self.name()
            nxt = self.tok
            if nxt.text == "(":
                self.i += 1
                x = self.name()
                self.eat(")")
                self.eat(".")
                return Input(a, x, self.unary())
            if nxt.text == "!":
                self.i += 1
                b = self.name()
                self.eat(".")
                return Output(a, b, self.unary())
            self.fail(f"unexpected {nxt.text or 'end of input'!r} after name", "'('", "'!'")
        if t.text == "[":
            self.i += 1
            a = self.name()
            op = self.tok.text
            if op not in ("=", "!="):
                self.fail(f"unexpected {op or 'end of input'!r}", "'='", "'!='")
            self.i += 1
            b = self.name()
            self.eat("]")
            cont = self.unary()
            return Match(a, b, cont) if op == "=" else Mismatch(a, b, cont)
        if t.text == "(":
            if self.peek().text == "^":
                self.i += 2
                x = self.name()
                self.eat(")")
                return Res(x, self.unary())
            self.i += 1
            p = self.agent()
            self.eat(")")
            return p
        if t.text == "!":
            self.i += 1
            return Bang(self.unary())
        self.fail(f"unexpected {t.text or 'end of input'!r}", "agent")


def parse_agent(src: str, defs: Optional[Mapping[str, Agent]] = None) -> Agent:
    p = _Parser(src, defs or {})
    out = p.agent()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p.tok.text!r}", "'+'", "'|'", "end of input")
    return out


_DEF_RE = re.compile(r"\s*([A-Z][A-Za-z0-9_']*)\s*=")


def parse_defs(text: str, defs: Optional[Mapping[str, Agent]] = None) -> dict[str, Agent]:
    """Parse ``NAME = <agent>;`` definitions; ``#`` starts a comment.

    Definitions are non-recursive abbreviations: a body may only mention
    names defined earlier.
    """
    out = dict(defs or {})
    # blank out comments but keep offsets so error spans stay accurate
    clean = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    pos = 0
    while True:
        while pos < len(clean) and clean[pos].isspace():
            pos += 1
        if pos >= len(clean):
            return out
        m = _DEF_RE.match(clean, pos)
        if not m:
            raise ParseError(_span(text, pos, pos + 1), "expected a definition", ("NAME = agent;",))
        name = m.group(1)
        end = clean.find(";", m.end())
        if end < 0:
            raise ParseError(_span(text, len(text), len(text)), f"unterminated definition of {name}", ("';'",))
        body = clean[m.end():end]
        try:
            out[name] = parse_agent(body, out)
        except ParseError as e:
            off = m.end() + e.span.start
            raise ParseError(_span(text, off, off + e.span.end - e.span.start), e.message, e.expected) from None
        pos = end + 1


# ---------------------------------------------------------------------------
# printing


def _printable(p: Agent) -> Agent:
    names = all_names(p)
    reserved = sorted((n for n in names if is_reserved(n)), key=lambda n: int(n[1:]) if n[1:].isdigit() else -1)
    if not reserved:
        return p
    taken = {n for n in names if not is_reserved(n)}
    ren = {}
    for n in reserved:
        ren[n] = fresh_name(taken, "x")
        taken.add(ren[n])
    return p.map_names(lambda n: ren.get(n, n))


def _fmt(p: Agent) -> str:
    def atom(q: Agent) -> str:
        s = _fmt(q)
        return f"({s})" if isinstance(q, (Sum, Par)) else s

    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Tau):
        return f"tau.{atom(p.cont)}"
    if isinstance(p, Input):
        return f"{p.chan}({p.bind}).{atom(p.cont)}"
    if isinstance(p, Output):
        return f"{p.chan}!{p.msg}.{atom(p.cont)}"
    if isinstance(p, Match):
        return f"[{p.left}={p.right}]{atom(p.cont)}"
    if isinstance(p, Mismatch):
        return f"[{p.left}!={p.right}]{atom(p.cont)}"
    if isinstance(p, Res):
        return f"(^{p.bind}){atom(p.cont)}"
    if isinstance(p, Bang):
        return f"!{atom(p.cont)}"
    if isinstance(p, (Sum, Par)):
        op, same = (" + ", Sum) if isinstance(p, Sum) else (" | ", Par)
        left = _fmt(p.left) if isinstance(p.left, same) else atom(p.left)
        return f"{left}{op}{atom(p.right)}"
    raise TypeError(p)


def print_agent(p: Agent) -> str:
    return _fmt(_printable(p))


def print_action(act) -> str:
    from . import semantics as S

    if isinstance(act, S.TauA):
        return "tau"
    if isinstance(act, S.OutputA):
        return f"{act.chan}!{act.msg}"
    if isinstance(act, S.InputE):
        return f"{act.chan}?{act.msg}"
    raise TypeError(act)


def print_residual(r) -> str:
    from . import semantics as S
    from . import weak as W

    def bound(text: str, bind: str, deriv: Agent) -> str:
        # keep the binder and derivative printable under one renaming
        q = _printable(Res(bind, deriv))
        return f"{text.format(q.bind)} -> {_fmt(q.cont)}"

    if isinstance(r, S.Bound):
        pat = "{}({{}})" if isinstance(r.subj, S.InputS) else "{}!({{}})"
        return bound(pat.format(r.subj.chan), r.bind, r.deriv)
    if isinstance(r, S.Free):
        return f"{print_action(r.act)} -> {print_agent(r.deriv)}"
    if isinstance(r, S.BoundE):
        return bound(f"{r.chan}!({{}})", r.bind, r.deriv)
    if isinstance(r, S.FreeE):
        return f"{print_action(r.act)} -> {print_agent(r.deriv)}"
    if isinstance(r, W.WFree):
        return f"{print_action(r.act)} -> {print_agent(r.deriv)}"
    if isinstance(r, W.WBoundOut):
        return bound(f"{r.chan}!({{}})", r.bind, r.deriv)
    if isinstance(r, W.WInput):
        q = _printable(Res(r.bind, r.mid))
        mid = _fmt(q.cont)
        mid = f"({mid})" if isinstance(q.cont, (Sum, Par)) else mid
        return f"{r.chan}({q.bind})@{mid}"
    if isinstance(r, W.WeakInputStep):
        q = _printable(Res(r.bind, Par(r.mid, r.deriv)))
        mid, der = q.cont.left, q.cont.right
        mid_s = f"({_fmt(mid)})" if isinstance(mid, (Sum, Par)) else _fmt(mid)
        return f"{r.received}:{r.chan}({q.bind})@{mid_s} -> {_fmt(der)}"
    raise TypeError(r)
