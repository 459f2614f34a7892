from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

from .errors import EnumerationBudgetExceeded, NonDistinctHead, ScaleMismatch
from .evaluator import BagDatabase
from .mappings import Kind, TermMapping, check_mapping, equivalence_compatible
from .query import Atom, Const, Query, Term, Var, scale_signature
from .transforms import SubgoalClasses, representative_subgoals

DEFAULT_ASSOCIATION_BUDGET = 10**7
FRESH_PREFIX = "#a"


@dataclass(frozen=True)
class Monomial:
    """Product of N-variables; ``exponents`` maps the 1-based index j of N_j to its power."""

    exponents: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def of(labels: Sequence[int]) -> "Monomial":
        counts: dict[int, int] = {}
        for j in labels:
            if j:
                counts[j] = counts.get(j, 0) + 1
        return Monomial(tuple(sorted(counts.items())))

    def evaluate(self, n: Sequence[int]) -> int:
        return prod(n[j - 1] ** e for j, e in self.exponents)

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        return "*".join(f"N{j}" if e == 1 else f"N{j}^{e}" for j, e in self.exponents)


def label(j: int) -> str:
    """Render a copy-signature entry: 0 stands for the constant 1, j for N_j."""
    return "1" if j == 0 else f"N{j}"


@dataclass(frozen=True)
class DbFamilySpec:
    query: Query
    base: Query
    classes: SubgoalClasses
    nu0: dict[Term, object]
    noncopy: tuple[Var, ...]
    nu_copy: dict[Var, int]
    t_star: tuple

    @property
    def reps(self) -> tuple[Atom, ...]:
        return self.classes.reps

    @property
    def m(self) -> int:
        return len(self.noncopy)

    @property
    def w(self) -> int:
        return self.classes.w

    @property
    def size(self) -> int:
        return self.m + self.w

    def dom_label(self, t: Term) -> int:
        if isinstance(t, Var) and t in self.noncopy:
            return self.noncopy.index(t) + 1
        return 0


def _fresh_values(avoid: set) -> Iterator[str]:
    for k in itertools.count():
        v = f"{FRESH_PREFIX}{k}"
        if v not in avoid:
            yield v


def family_spec(q: Query) -> DbFamilySpec:
    hv = [t for t in q.head if isinstance(t, Var)]
    if len(set(hv)) != len(hv):
        raise NonDistinctHead(f"query {q.name} repeats a head variable", q.span)
    classes = representative_subgoals(q)
    base = classes.query
    fresh = _fresh_values({c.value for c in q.constants})
    nu0: dict[Term, object] = {}
    for v in list(base.head_vars) + list(base.set_vars):
        nu0[v] = next(fresh)
    for c in base.constants:
        nu0[c] = c.value
    m = len(base.noncopy_mvars)
    nu_copy: dict[Var, int] = {}
    for k, cls in enumerate(classes.copy_classes):
        for a in cls:
            nu_copy[a.copy_var] = m + k + 1  # type: ignore[index]
    t_star = tuple(nu0[t] for t in base.head)
    return DbFamilySpec(q, base, classes, nu0, base.noncopy_mvars, nu_copy, t_star)


@dataclass(frozen=True)
class FamilyDatabase:
    db: BagDatabase
    psi: dict[tuple, Atom]
    nu_inv: dict[object, Term]
    t_star: tuple
    n: tuple[int, ...]

    def atoms(self) -> list[tuple[str, tuple, int, Atom]]:
        return [(p, args, c, self.psi[(p, args)]) for (p, args), c in self.db.facts.items()]


def build_family_database(fspec: DbFamilySpec, n: Sequence[int]) -> FamilyDatabase:
    n = tuple(n)
    if len(n) != fspec.size:
        raise ValueError(f"expected {fspec.size} entries in n, got {len(n)}")
    if any(x < 1 for x in n):
        raise ValueError("entries of n must be positive")
    used = set(fspec.nu0.values()) | {c.value for c in fspec.query.constants}
    fresh = _fresh_values(used)
    nu_inv: dict[object, Term] = {}
    for t, val in fspec.nu0.items():
        nu_inv[val] = t
    domains = []
    for j, y in enumerate(fspec.noncopy):
        dom = [next(fresh) for _ in range(n[j])]
        for val in dom:
            nu_inv[val] = y
        domains.append(dom)
    facts: dict[tuple, int] = {}
    psi: dict[tuple, Atom] = {}
    for combo in itertools.product(*domains):
        env: dict[Term, object] = dict(fspec.nu0)
        env.update(zip(fspec.noncopy, combo))
        for rep in fspec.reps:
            key = (rep.predicate, tuple(env[t] for t in rep.args))
            k = fspec.classes.class_index(rep)
            copies = 1 if k is None else n[fspec.m + k]
            if key not in facts:
                psi[key] = rep
            facts[key] = max(facts.get(key, 0), copies)
    return FamilyDatabase(BagDatabase(facts), psi, nu_inv, fspec.t_star, n)


def build_database(fspec: DbFamilySpec, n: Sequence[int]) -> BagDatabase:
    return build_family_database(fspec, n).db


@dataclass(frozen=True)
class MonomialClass:
    atom_signature: tuple[Atom, ...]
    noncopy_signature: tuple[Term, ...]
    copy_signature: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    thetas: tuple[dict, ...]
    tuples: frozenset

    def key(self) -> tuple:
        return (self.atom_signature, self.noncopy_signature, self.copy_signature)


def analyzed_order(q: Query) -> tuple[Atom, ...]:
    return q.copy_atoms + q.relational_atoms


def _match(a: Atom, args: tuple, env: dict) -> dict | None:
    out = env
    for t, v in zip(a.args, args):
        if isinstance(t, Const):
            if t.value != v or type(t.value) is not type(v):
                return None
            continue
        cur = out.get(t)
        if cur is None:
            if out is env:
                out = dict(env)
            out[t] = v
        elif cur != v or type(cur) is not type(v):
            return None
    return out


def enumerate_monomial_classes(
    fspec: DbFamilySpec,
    analyzed: Query,
    n: Sequence[int],
    budget: int | None = DEFAULT_ASSOCIATION_BUDGET,
) -> list[MonomialClass]:
    if not equivalence_compatible(fspec.query, analyzed):
        raise ScaleMismatch(
            f"scale signatures {scale_signature(fspec.query)} and {scale_signature(analyzed)} differ"
        )
    fam = build_family_database(fspec, n)
    atoms = fam.atoms()
    by_key: dict[tuple[str, int], list[int]] = {}
    for i, (p, args, _, _) in enumerate(atoms):
        by_key.setdefault((p, len(args)), []).append(i)
    subgoals = analyzed_order(analyzed)
    start: dict = {}
    for t, val in zip(analyzed.head, fam.t_star):
        if isinstance(t, Const):
            if t.value != val:
                return []
        elif start.setdefault(t, val) != val:
            return []
    r = len(analyzed.copy_atoms)
    ync = analyzed.noncopy_mvars
    groups: dict[tuple, list] = {}
    counter = [0]

    def go(k: int, env: dict, chosen: list[int]) -> None:
        counter[0] += 1
        if budget is not None and counter[0] > budget:
            raise EnumerationBudgetExceeded(f"more than {budget} association steps")
        if k == len(subgoals):
            record(env, tuple(chosen))
            return
        a = subgoals[k]
        for i in by_key.get((a.predicate, a.arity), []):
            env2 = _match(a, atoms[i][1], env)
            if env2 is not None:
                chosen.append(i)
                go(k + 1, env2, chosen)
                chosen.pop()

    def record(env: dict, chosen: tuple[int, ...]) -> None:
        psi_a = tuple(atoms[i][3] for i in chosen)
        phi_n = tuple(fam.nu_inv[env[y]] for y in ync)
        phi_c = []
        for j in range(r):
            rep = atoms[chosen[j]][3]
            cls = fspec.classes.class_index(rep)
            phi_c.append(0 if cls is None else fspec.m + cls + 1)
        key = (psi_a, phi_n, tuple(phi_c))
        base = (fam.t_star, tuple(env[y] for y in ync))
        ranges = [range(1, atoms[chosen[j]][2] + 1) for j in range(r)]
        contributed = {base + (c,) for c in itertools.product(*ranges)}
        entry = groups.get(key)
        if entry is None:
            groups[key] = entry = [[], [], set()]
        entry[0].append(chosen)
        entry[1].append(env)
        entry[2] |= contributed

    go(0, start, [])
    return [
        MonomialClass(k[0], k[1], k[2], tuple(e[0]), tuple(e[1]), frozenset(e[2]))
        for k, e in groups.items()
    ]


def multiplicity_monomial(c: MonomialClass, fspec: DbFamilySpec) -> Monomial:
    labels = [fspec.dom_label(t) for t in c.noncopy_signature] + list(c.copy_signature)
    return Monomial.of(labels)


def class_cardinality_check(c: MonomialClass, fspec: DbFamilySpec, n: Sequence[int]) -> bool:
    return len(c.tuples) == multiplicity_monomial(c, fspec).evaluate(n)


def wave(fspec: DbFamilySpec) -> Monomial:
    labels = list(range(1, fspec.m + 1)) + [fspec.nu_copy[v] for v in fspec.base.copy_vars]
    return Monomial.of(labels)


def _scvm_from_member(
    fspec: DbFamilySpec, fam_nu_inv: dict, analyzed: Query, c: MonomialClass, theta: dict
) -> TermMapping | None:
    mu: dict[Var, Term] = {}
    for v in analyzed.variables:
        if v in theta:
            mu[v] = fam_nu_inv[theta[v]]
    seen: dict[int, int] = {}
    for a, lab in zip(analyzed.copy_atoms, c.copy_signature):
        if lab == 0:
            return None
        cls = fspec.classes.copy_classes[lab - fspec.m - 1]
        pos = seen.get(lab, 0)
        if pos >= len(cls):
            return None
        seen[lab] = pos + 1
        mu[a.copy_var] = cls[pos].copy_var  # type: ignore[index,assignment]
    m = TermMapping(analyzed, fspec.query, mu, Kind.SCVM)
    return m if check_mapping(m) else None


def wave_class_scvm(
    fspec: DbFamilySpec,
    analyzed: Query,
    budget: int | None = DEFAULT_ASSOCIATION_BUDGET,
) -> TermMapping | None:
    # classes are the same for every n, so the all-ones member suffices
    n = (1,) * fspec.size
    fam = build_family_database(fspec, n)
    target = wave(fspec)
    for c in enumerate_monomial_classes(fspec, analyzed, n, budget):
        if multiplicity_monomial(c, fspec) != target:
            continue
        for theta in c.thetas:
            m = _scvm_from_member(fspec, fam.nu_inv, analyzed, c, theta)
            if m is not None:
                return m
    return None
