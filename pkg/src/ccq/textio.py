from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .errors import CcqSyntaxError, NonPositiveCopyNumber, SourceSpan
from .evaluator import BagDatabase
from .query import Atom, Const, Query, RawQuery, Term, Var, format_value, validate, value_sort_key

GRAMMAR_VERSION = "1"

PUNCT = {"(", ")", ",", ";", "{", "}", "."}


@dataclass(frozen=True)
class Token:
    kind: str  # VAR, IDENT, INT, STR, PUNCT, ARROW, EOF
    text: str
    value: object
    span: SourceSpan


def tokenize(text: str, file: str = "<input>") -> Iterator[Token]:
    i, line, col = 0, 1, 1
    n = len(text)

    def span() -> SourceSpan:
        return SourceSpan(file, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = span()
        if text.startswith("<-", i):
            yield Token("ARROW", "<-", None, start)
            i, col = i + 2, col + 2
            continue
        if ch in PUNCT:
            yield Token("PUNCT", ch, None, start)
            i, col = i + 1, col + 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            lex = text[i:j]
            yield Token("INT", lex, int(lex), start)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            lex = text[i:j]
            kind = "IDENT" if lex[0].islower() else "VAR"
            yield Token(kind, lex, lex, start)
            col += j - i
            i = j
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise CcqSyntaxError("unterminated quoted constant", start, "'")
                c = text[j]
                if c == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if c == "'":
                    j += 1
                    break
                buf.append(c)
                j += 1
            yield Token("STR", text[i:j], "".join(buf), start)
            col += j - i
            i = j
            continue
        raise CcqSyntaxError(f"unexpected character {ch!r}", start)
    yield Token("EOF", "", None, SourceSpan(file, line, col))


class _Parser:
    def __init__(self, text: str, file: str):
        self.toks = list(tokenize(text, file))
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def fail(self, expected: str) -> None:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise CcqSyntaxError(f"expected {expected}, found {found}", t.span, expected)

    def punct(self, ch: str) -> Token:
        t = self.tok
        if t.kind != "PUNCT" or t.text != ch:
            self.fail(repr(ch))
        self.pos += 1
        return t

    def at(self, ch: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.text == ch

    def term(self) -> Term:
        t = self.tok
        if t.kind == "VAR":
            self.pos += 1
            return Var(t.text)
        if t.kind in ("IDENT", "INT", "STR"):
            self.pos += 1
            return Const(t.value)  # type: ignore[arg-type]
        self.fail("a term")
        raise AssertionError

    def const(self) -> Const:
        t = self.tok
        if t.kind in ("IDENT", "INT", "STR"):
            self.pos += 1
            return Const(t.value)  # type: ignore[arg-type]
        self.fail("a constant")
        raise AssertionError

    def var(self) -> Var:
        t = self.tok
        if t.kind != "VAR":
            self.fail("a variable")
        self.pos += 1
        return Var(t.text)

    def seq(self, item, close: str) -> list:
        out = []
        if self.at(close):
            return out
        out.append(item())
        while self.at(","):
            self.pos += 1
            out.append(item())
        return out

    def atom(self) -> Atom:
        t = self.tok
        if t.kind != "IDENT":
            self.fail("a predicate name")
        self.pos += 1
        self.punct("(")
        args = self.seq(self.term, ")") if not self.at(";") else []
        cv = None
        if self.at(";"):
            self.pos += 1
            cv = self.var()
        self.punct(")")
        return Atom(t.text, tuple(args), cv)

    def query(self) -> Query:
        t = self.tok
        if t.kind != "VAR":
            self.fail("a query name starting with an uppercase letter")
        self.pos += 1
        self.punct("(")
        head = self.seq(self.term, ")")
        self.punct(")")
        if self.tok.kind != "ARROW":
            self.fail("'<-'")
        self.pos += 1
        body = [self.atom()]
        mvars: list[Var] = []
        while True:
            self.punct(",")
            if self.at("{"):
                self.pos += 1
                mvars = self.seq(self.var, "}")
                self.punct("}")
                break
            body.append(self.atom())
        self.punct(".")
        return validate(RawQuery(t.text, tuple(head), tuple(body), tuple(mvars), t.span))

    def fact(self) -> tuple[str, tuple, int]:
        t = self.tok
        if t.kind != "IDENT":
            self.fail("a predicate name")
        self.pos += 1
        self.punct("(")
        args = self.seq(self.const, ")") if not self.at(";") else []
        copies = 1
        if self.at(";"):
            self.pos += 1
            c = self.tok
            if c.kind != "INT":
                self.fail("a copy number")
            self.pos += 1
            copies = c.value  # type: ignore[assignment]
            if copies < 1:
                raise NonPositiveCopyNumber(f"copy number {copies} must be positive", c.span)
        self.punct(")")
        self.punct(".")
        return t.text, tuple(a.value for a in args), copies


def parse_queries(text: str, file: str = "<input>") -> list[Query]:
    p = _Parser(text, file)
    out = []
    while p.tok.kind != "EOF":
        out.append(p.query())
    return out


def parse_query(text: str, file: str = "<input>") -> Query:
    p = _Parser(text, file)
    q = p.query()
    if p.tok.kind != "EOF":
        p.fail("end of input")
    return q


def parse_database(text: str, file: str = "<input>") -> BagDatabase:
    p = _Parser(text, file)
    facts: dict[tuple[str, tuple], int] = {}
    while p.tok.kind != "EOF":
        pred, args, copies = p.fact()
        facts[(pred, args)] = facts.get((pred, args), 0) + copies
    return BagDatabase(facts)


def print_query(q: Query) -> str:
    head = ",".join(str(t) for t in q.head)
    body = ", ".join(str(a) for a in q.body)
    ms = ",".join(str(v) for v in q.mvars)
    return f"{q.name}({head}) <- {body}, {{{ms}}}."


def format_fact(pred: str, args: tuple, copies: int) -> str:
    inner = ",".join(format_value(v) for v in args)
    if copies != 1:
        inner += f";{copies}"
    return f"{pred}({inner})."


def print_database(d: BagDatabase) -> str:
    items = sorted(d.facts.items(), key=lambda kv: (kv[0][0], tuple(value_sort_key(v) for v in kv[0][1])))
    return "\n".join(format_fact(p, a, c) for (p, a), c in items) + ("\n" if items else "")


def format_tuple(t: tuple) -> str:
    return "(" + ",".join(format_value(v) for v in t) + ")"


def print_verdict(v) -> str:
    return json.dumps(v.to_json(), indent=2)
