from __future__ import annotations

from dataclasses import dataclass

from .query import Atom, Query, Var


def canonical(q: Query) -> Query:
    return q.with_body(dict.fromkeys(q.body))


def template_set(q: Query) -> tuple[Atom, ...]:
    return tuple(dict.fromkeys(a.template() for a in q.body if a.is_copy))


def regularized(q: Query) -> Query:
    templates = set(template_set(q))
    return q.with_body(a for a in canonical(q).body if a.is_copy or a not in templates)


def deregularized(q: Query) -> Query:
    r = regularized(q)
    return r.with_body(r.body + template_set(q))


def fresh_names(taken: set[str], prefix: str = "K"):
    k = 1
    while True:
        name = f"{prefix}{k}"
        if name not in taken:
            taken.add(name)
            yield Var(name)
        k += 1


def copy_enhanced(q: Query) -> Query:
    names = fresh_names({v.name for v in q.variables})
    body, added = [], []
    for a in q.body:
        if a.is_copy:
            body.append(a)
        else:
            v = next(names)
            added.append(v)
            body.append(Atom(a.predicate, a.args, v))
    return q.with_body(body, q.mvars + tuple(added))


@dataclass(frozen=True)
class SubgoalClasses:
    """Partition of the regularized condition used by the database family.

    ``copy_classes[j]`` lists the copy-sensitive subgoals sharing the j-th
    template, in source order; ``reps`` holds one subgoal per class in the
    order the classes first appear in the condition.
    """

    query: Query
    relational: tuple[Atom, ...]
    copy_classes: tuple[tuple[Atom, ...], ...]
    reps: tuple[Atom, ...]

    @property
    def w(self) -> int:
        return len(self.copy_classes)

    @property
    def v(self) -> int:
        return len(self.relational)

    def class_index(self, atom: Atom) -> int | None:
        """Zero-based copy class of a copy-sensitive subgoal, or None for relational ones."""
        for j, cls in enumerate(self.copy_classes):
            if atom in cls:
                return j
        return None

    def classes(self) -> list[tuple[Atom, ...]]:
        out = []
        for r in self.reps:
            j = self.class_index(r)
            out.append((r,) if j is None else self.copy_classes[j])
        return out


def representative_subgoals(q: Query) -> SubgoalClasses:
    r = regularized(q)
    by_template: dict[Atom, list[Atom]] = {}
    reps: list[Atom] = []
    relational: list[Atom] = []
    for a in r.body:
        if a.is_copy:
            t = a.template()
            if t not in by_template:
                by_template[t] = []
                reps.append(a)
            by_template[t].append(a)
        else:
            relational.append(a)
            reps.append(a)
    return SubgoalClasses(r, tuple(relational), tuple(tuple(c) for c in by_template.values()), tuple(reps))
