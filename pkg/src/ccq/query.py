"""Query AST for copy-sensitive conjunctive queries.

A query is ``Name(head) <- body, {M}`` where ``body`` is a bag of atoms and
``M`` lists the multiset variables. Atoms carrying a copy variable range over
the copies of a database fact; the rest are plain relational atoms.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

from .errors import (
    CopyVarReuse,
    EmptyCondition,
    MNotNondistinguished,
    MissingCopyVarInM,
    SourceSpan,
    UnsafeHead,
)


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Union[str, int]

    def __str__(self) -> str:
        return format_value(self.value)


Term = Union[Var, Const]


def format_value(value: Union[str, int]) -> str:
    """Render a constant so that the text-io lexer reads it back unchanged."""
    if isinstance(value, int):
        return str(value)
    if value and value[0].islower() and all(ch.isalnum() or ch == "_" for ch in value):
        return value
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def value_sort_key(value: Union[str, int]) -> tuple:
    # integers before symbols so mixed tuples still sort deterministically
    return (0, value, "") if isinstance(value, int) else (1, 0, value)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]
    copy_var: Var | None = None

    @property
    def is_copy(self) -> bool:
        return self.copy_var is not None

    @property
    def arity(self) -> int:
        return len(self.args)

    def template(self) -> "Atom":
        if self.copy_var is None:
            return self
        return Atom(self.predicate, self.args)

    def variables(self) -> Iterator[Var]:
        for t in self.args:
            if isinstance(t, Var):
                yield t
        if self.copy_var is not None:
            yield self.copy_var

    def rename(self, mapping: dict[Var, Term]) -> "Atom":
        args = tuple(mapping.get(t, t) if isinstance(t, Var) else t for t in self.args)
        cv = self.copy_var
        if cv is not None:
            cv = mapping.get(cv, cv)
        return Atom(self.predicate, args, cv)

    def __str__(self) -> str:
        inner = ",".join(str(t) for t in self.args)
        if self.copy_var is not None:
            inner += ";" + str(self.copy_var)
        return f"{self.predicate}({inner})"


class QueryClass(str, enum.Enum):
    SET = "Set"
    BAG = "Bag"
    BAGSET = "BagSet"
    GENERAL = "General"


def _unique(items: Iterable) -> tuple:
    seen: dict = {}
    for it in items:
        seen.setdefault(it, None)
    return tuple(seen)


@dataclass(frozen=True)
class Query:
    name: str
    head: tuple[Term, ...]
    body: tuple[Atom, ...]
    mvars: tuple[Var, ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check(self)

    @cached_property
    def variables(self) -> tuple[Var, ...]:
        """All variables, first-occurrence order (head first, then body)."""
        found = [t for t in self.head if isinstance(t, Var)]
        for a in self.body:
            found.extend(a.variables())
        return _unique(found)

    @cached_property
    def head_vars(self) -> tuple[Var, ...]:
        return _unique(t for t in self.head if isinstance(t, Var))

    @cached_property
    def copy_vars(self) -> tuple[Var, ...]:
        return tuple(a.copy_var for a in self.body if a.copy_var is not None)

    @cached_property
    def noncopy_mvars(self) -> tuple[Var, ...]:
        cs = set(self.copy_vars)
        return tuple(v for v in self.mvars if v not in cs)

    @cached_property
    def set_vars(self) -> tuple[Var, ...]:
        skip = set(self.head_vars) | set(self.mvars)
        return tuple(v for v in self.variables if v not in skip)

    @cached_property
    def constants(self) -> tuple[Const, ...]:
        found = [t for t in self.head if isinstance(t, Const)]
        for a in self.body:
            found.extend(t for t in a.args if isinstance(t, Const))
        return _unique(found)

    @property
    def copy_atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in self.body if a.is_copy)

    @property
    def relational_atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in self.body if not a.is_copy)

    @property
    def arity(self) -> int:
        return len(self.head)

    def with_body(self, body: Iterable[Atom], mvars: Iterable[Var] | None = None) -> "Query":
        return Query(self.name, self.head, tuple(body), self.mvars if mvars is None else tuple(mvars))

    def rename(self, mapping: dict[Var, Var], name: str | None = None) -> "Query":
        head = tuple(mapping.get(t, t) if isinstance(t, Var) else t for t in self.head)
        return Query(
            name or self.name,
            head,
            tuple(a.rename(mapping) for a in self.body),
            tuple(mapping.get(v, v) for v in self.mvars),
        )

    def __str__(self) -> str:
        from .textio import print_query

        return print_query(self)


@dataclass(frozen=True)
class RawQuery:
    name: str
    head: tuple[Term, ...]
    body: tuple[Atom, ...]
    mvars: tuple[Var, ...]
    span: SourceSpan | None = None


def validate(raw: RawQuery) -> Query:
    return Query(raw.name, tuple(raw.head), tuple(raw.body), tuple(raw.mvars), raw.span)


def _check(q: Query) -> None:
    span = q.span
    if not q.body:
        raise EmptyCondition(f"query {q.name} has an empty condition", span)
    body_vars: set[Var] = set()
    for a in q.body:
        body_vars.update(t for t in a.args if isinstance(t, Var))
    copy_seen: set[Var] = set()
    for a in q.body:
        cv = a.copy_var
        if cv is None:
            continue
        if cv in copy_seen:
            raise CopyVarReuse(f"copy variable {cv} occurs in more than one atom", span)
        copy_seen.add(cv)
    clash = copy_seen & (body_vars | set(t for t in q.head if isinstance(t, Var)))
    if clash:
        v = sorted(clash)[0]
        raise CopyVarReuse(f"copy variable {v} also occurs in an argument position", span)
    for t in q.head:
        if isinstance(t, Var) and t not in body_vars:
            raise UnsafeHead(f"head variable {t} does not occur in the condition", span)
    head_vars = {t for t in q.head if isinstance(t, Var)}
    if len(set(q.mvars)) != len(q.mvars):
        raise MNotNondistinguished("multiset variable listed twice", span)
    for v in q.mvars:
        if v in head_vars:
            raise MNotNondistinguished(f"head variable {v} cannot be a multiset variable", span)
        if v not in body_vars and v not in copy_seen:
            raise MNotNondistinguished(f"multiset variable {v} does not occur in the condition", span)
    missing = [v for v in q.copy_vars if v not in set(q.mvars)]
    if missing:
        raise MissingCopyVarInM(f"copy variable {missing[0]} is not listed in M", span)


def classify(q: Query) -> QueryClass:
    if not q.mvars:
        return QueryClass.SET
    if not q.set_vars:
        if all(a.is_copy for a in q.body):
            return QueryClass.BAG
        if not any(a.is_copy for a in q.body):
            return QueryClass.BAGSET
    return QueryClass.GENERAL


def scale_signature(q: Query) -> tuple[int, int, int]:
    return (len(q.head), len(q.copy_vars), len(q.noncopy_mvars))
