"""Structural mappings between queries.

Every mapping sends the terms of ``source`` to the terms of ``target``;
constants are fixed and never stored in the map. The search is a plain
backtracking over source atoms, always expanding the atom with the fewest
remaining target candidates, and each complete candidate is re-verified with
the same checker that ``check_mapping`` uses.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import SearchBudgetExceeded
from .query import Atom, Const, Query, Term, Var
from .transforms import canonical


class Kind(str, enum.Enum):
    HOM = "Hom"
    CM = "CM"
    GCM = "GCM"
    MHOM = "MultisetHom"
    CVM = "CVM"
    SCVM = "SCVM"
    ISO = "Iso"


CLI_KINDS = {
    "cm": Kind.CM,
    "gcm": Kind.GCM,
    "mhom": Kind.MHOM,
    "cvm": Kind.CVM,
    "scvm": Kind.SCVM,
    "iso": Kind.ISO,
}


@dataclass(frozen=True, eq=False)
class TermMapping:
    source: Query
    target: Query
    map: Mapping[Var, Term]
    kind: Kind

    def image(self, t: Term) -> Term:
        return t if isinstance(t, Const) else self.map[t]

    def key(self) -> frozenset:
        return frozenset(self.map.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TermMapping) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "source": self.source.name,
            "target": self.target.name,
            "map": {str(v): str(self.map[v]) for v in self.source.variables if v in self.map},
        }


def equivalence_compatible(a: Query, b: Query) -> bool:
    return (
        len(a.head) == len(b.head)
        and len(a.copy_vars) == len(b.copy_vars)
        and len(a.noncopy_mvars) == len(b.noncopy_mvars)
    )


def _img(phi: Mapping[Var, Term], t: Term) -> Term:
    return t if isinstance(t, Const) else phi[t]


def explain(kind: Kind, phi: Mapping[Var, Term], src: Query, tgt: Query) -> str | None:
    """Return the first violated condition for ``kind``, or None when all hold."""
    missing = [v for v in src.variables if v not in phi]
    if missing:
        return f"mapping is undefined on {missing[0]}"
    tgt_terms = set(tgt.variables) | set(tgt.constants)
    for v in src.variables:
        t = phi[v]
        if isinstance(t, Var) and t not in tgt_terms:
            return f"{v} is mapped to {t}, which is not a term of {tgt.name}"
    if kind is not Kind.HOM:
        if len(src.head) != len(tgt.head):
            return "head arities differ"
        for k, (s, t) in enumerate(zip(src.head, tgt.head)):
            if _img(phi, s) != t:
                return f"head position {k + 1}: {s} maps to {_img(phi, s)}, expected {t}"
    tgt_set = set(tgt.body)
    if kind in (Kind.HOM, Kind.CM, Kind.GCM, Kind.MHOM):
        for a in src.body:
            if a.rename(phi) not in tgt_set:
                return f"image {a.rename(phi)} of subgoal {a} is not in the target condition"
        if kind is Kind.MHOM:
            m_tgt = set(tgt.mvars)
            seen: dict[Term, Var] = {}
            for v in src.mvars:
                t = phi[v]
                if t not in m_tgt:
                    return f"multiset variable {v} maps to {t}, outside the target M"
                if t in seen:
                    return f"multiset variables {seen[t]} and {v} share the image {t}"
                seen[t] = v
        return None
    if kind in (Kind.CVM, Kind.SCVM):
        if kind is Kind.SCVM and not equivalence_compatible(src, tgt):
            return "the pair is not equivalence-compatible"
        img_copy = {phi[v] for v in src.copy_vars}
        if img_copy != set(tgt.copy_vars):
            return "image of the copy variables is not exactly the target copy variables"
        img_nc = {phi[v] for v in src.noncopy_mvars}
        lacking = [v for v in tgt.noncopy_mvars if v not in img_nc]
        if lacking:
            return f"target multiset noncopy variable {lacking[0]} is not covered"
        templates = {a.template() for a in tgt.body}
        for a in src.body:
            b = a.rename(phi)
            if a.is_copy:
                if b not in tgt_set:
                    return f"image {b} of copy-sensitive subgoal {a} is not a target subgoal"
            elif b not in templates:
                return f"image {b} of relational subgoal {a} has no target counterpart"
        return None
    if kind is Kind.ISO:
        vals = [phi[v] for v in src.variables]
        if any(not isinstance(t, Var) for t in vals):
            return "a variable is mapped to a constant"
        if len(set(vals)) != len(vals) or set(vals) != set(tgt.variables):
            return "mapping is not a bijection between the variables"
        if {phi[v] for v in src.mvars} != set(tgt.mvars):
            return "multiset variables are not mapped onto the target M"
        if Counter(a.rename(phi) for a in src.body) != Counter(tgt.body):
            return "conditions are not mapped onto each other"
        return None
    raise ValueError(kind)


def check_mapping(m: TermMapping) -> bool:
    return explain(m.kind, m.map, m.source, m.target) is None


def explain_mapping(m: TermMapping) -> str | None:
    return explain(m.kind, m.map, m.source, m.target)


class _Search:
    def __init__(self, kind: Kind, src: Query, tgt: Query, budget: int | None):
        self.kind = kind
        self.src = src
        self.tgt = tgt
        self.budget = budget
        self.nodes = 0
        self.loose = kind in (Kind.CVM, Kind.SCVM)
        self.injective = kind is Kind.ISO
        by_key: dict[tuple[str, int, bool], list[Atom]] = {}
        for b in dict.fromkeys(tgt.body):
            by_key.setdefault((b.predicate, b.arity, b.is_copy), []).append(b)
        if self.loose:
            loose: dict[tuple[str, int], list[Atom]] = {}
            for b in dict.fromkeys(tgt.body):
                key = (b.predicate, b.arity)
                lst = loose.setdefault(key, [])
                if all(x.args != b.args for x in lst):
                    lst.append(b)
            self.loose_index = loose
        self.index = by_key
        self.src_atoms = list(dict.fromkeys(src.body))
        self.m_src = set(src.mvars)
        self.m_tgt = set(tgt.mvars)

    def tick(self) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise SearchBudgetExceeded(f"mapping search exceeded {self.budget} nodes")

    def bind(self, env: dict, rev: dict, s: Term, t: Term) -> bool:
        if isinstance(s, Const):
            return s == t
        cur = env.get(s)
        if cur is not None:
            return cur == t
        if self.injective:
            if not isinstance(t, Var) or t in rev:
                return False
            rev[t] = s
        if self.kind is Kind.MHOM and s in self.m_src:
            if t not in self.m_tgt or t in rev:
                return False
            rev[t] = s
        env[s] = t
        return True

    def unify(self, a: Atom, b: Atom, env: dict, rev: dict) -> tuple[dict, dict] | None:
        env2, rev2 = dict(env), dict(rev)
        for s, t in zip(a.args, b.args):
            if not self.bind(env2, rev2, s, t):
                return None
        if a.is_copy and not self.bind(env2, rev2, a.copy_var, b.copy_var):  # type: ignore[arg-type]
            return None
        return env2, rev2

    def candidates(self, a: Atom, env: dict, rev: dict) -> list[tuple[dict, dict]]:
        if self.loose and not a.is_copy:
            pool = self.loose_index.get((a.predicate, a.arity), [])
        else:
            pool = self.index.get((a.predicate, a.arity, a.is_copy), [])
        out = []
        for b in pool:
            r = self.unify(a, b, env, rev)
            if r is not None:
                out.append(r)
        return out

    def run(self) -> Iterator[dict]:
        env: dict = {}
        rev: dict = {}
        if self.kind is not Kind.HOM:
            if len(self.src.head) != len(self.tgt.head):
                return
            for s, t in zip(self.src.head, self.tgt.head):
                if not self.bind(env, rev, s, t):
                    return
        seen: set = set()
        for phi in self._go(env, rev, frozenset(range(len(self.src_atoms)))):
            key = frozenset(phi.items())
            if key in seen:
                continue
            seen.add(key)
            if explain(self.kind, phi, self.src, self.tgt) is None:
                yield phi

    def _go(self, env: dict, rev: dict, remaining: frozenset) -> Iterator[dict]:
        self.tick()
        if not remaining:
            yield env
            return
        best = None
        best_cands: list = []
        for i in sorted(remaining):
            c = self.candidates(self.src_atoms[i], env, rev)
            if best is None or len(c) < len(best_cands):
                best, best_cands = i, c
                if not c:
                    return
        rest = remaining - {best}
        for env2, rev2 in best_cands:
            yield from self._go(env2, rev2, rest)


def enumerate_mappings(kind: Kind, src: Query, tgt: Query, budget: int | None = None) -> Iterator[TermMapping]:
    if kind is Kind.SCVM and not equivalence_compatible(src, tgt):
        return
    for phi in _Search(kind, src, tgt, budget).run():
        yield TermMapping(src, tgt, dict(phi), kind)


def find_mapping(kind: Kind, src: Query, tgt: Query, budget: int | None = None) -> TermMapping | None:
    if kind is Kind.ISO and (
        len(src.body) != len(tgt.body) or len(src.variables) != len(tgt.variables)
    ):
        return None
    for m in enumerate_mappings(kind, src, tgt, budget):
        return m
    return None


def enumerate_gcms(src: Query, tgt: Query, budget: int | None = None) -> Iterator[TermMapping]:
    return enumerate_mappings(Kind.GCM, src, tgt, budget)


def check_isomorphic(q1: Query, q2: Query, mode: str = "bag", budget: int | None = None) -> bool:
    if mode == "bagset":
        q1, q2 = canonical(q1), canonical(q2)
    elif mode != "bag":
        raise ValueError(f"unknown isomorphism mode {mode!r}")
    return find_mapping(Kind.ISO, q1, q2, budget) is not None
