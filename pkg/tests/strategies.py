"""Random query and database generators shared by the property tests.

Everything is driven by ``random.Random`` so that the acceptance suite can use
fixed seeds and hypothesis can drive the same generators through integer seeds.
"""
from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from ccq.evaluator import BagDatabase
from ccq.query import Atom, Const, Query, QueryClass, Var

PREDICATES = {"p": 2, "r": 1}
VARS = [Var(n) for n in ("X", "Y", "Z", "W")]


def _atom(rng: random.Random, pool: list[Var], const_rate: float) -> Atom:
    pred = rng.choice(sorted(PREDICATES))
    args = tuple(
        Const(1) if rng.random() < const_rate else rng.choice(pool) for _ in range(PREDICATES[pred])
    )
    return Atom(pred, args)


def random_query(
    rng: random.Random,
    max_atoms: int = 3,
    max_vars: int = 4,
    copy_rate: float = 0.5,
    const_rate: float = 0.05,
    kind: QueryClass | None = None,
    name: str = "Q",
) -> Query:
    """A valid query with at most ``max_atoms`` subgoals over at most ``max_vars`` argument variables."""
    while True:
        pool = VARS[: rng.randint(1, max_vars)]
        body = [_atom(rng, pool, const_rate) for _ in range(rng.randint(1, max_atoms))]
        if kind is QueryClass.SET or kind is QueryClass.BAGSET:
            copy_flags = [False] * len(body)
        elif kind is QueryClass.BAG:
            copy_flags = [True] * len(body)
        else:
            copy_flags = [rng.random() < copy_rate for _ in body]
        cvars = []
        for k, flag in enumerate(copy_flags):
            if flag:
                body[k] = Atom(body[k].predicate, body[k].args, Var(f"I{k + 1}"))
                cvars.append(body[k].copy_var)
        used = list(dict.fromkeys(t for a in body for t in a.args if isinstance(t, Var)))
        head = [v for v in used if rng.random() < 0.4]
        rest = [v for v in used if v not in head]
        if kind is QueryClass.SET:
            mvars: list[Var] = []
            if cvars:
                continue
        elif kind in (QueryClass.BAG, QueryClass.BAGSET):
            mvars = rest + cvars
        else:
            mvars = [v for v in rest if rng.random() < 0.5] + cvars
        q = Query(name, tuple(head), tuple(body), tuple(mvars))
        if kind is not None and kind is not QueryClass.GENERAL:
            from ccq.query import classify

            if classify(q) is not kind:
                continue
        return q


def alpha_rename(q: Query, rng: random.Random, name: str = "R") -> Query:
    names = [v.name for v in q.variables]
    fresh = [f"V{k}" for k in range(len(names))]
    rng.shuffle(fresh)
    return q.rename({Var(a): Var(b) for a, b in zip(names, fresh)}, name)


def shuffle_body(q: Query, rng: random.Random) -> Query:
    body = list(q.body)
    rng.shuffle(body)
    return q.with_body(body)


def mutate(q: Query, rng: random.Random, name: str = "M") -> Query:
    """A nearby variant: drop an atom, rename one occurrence apart, or relax M."""
    choice = rng.randrange(4)
    body = list(q.body)
    mvars = list(q.mvars)
    if choice == 0 and len(body) > 1:
        k = rng.randrange(len(body))
        gone = body.pop(k)
        if gone.copy_var is not None:
            mvars.remove(gone.copy_var)
    elif choice == 1:
        k = rng.randrange(len(body))
        a = body[k]
        pos = [i for i, t in enumerate(a.args) if isinstance(t, Var)]
        if pos:
            i = rng.choice(pos)
            args = list(a.args)
            args[i] = Var("F")
            body[k] = Atom(a.predicate, tuple(args), a.copy_var)
    elif choice == 2:
        nc = [v for v in mvars if v not in set(q.copy_vars)]
        if nc:
            mvars.remove(rng.choice(nc))
    else:
        copies = [k for k, a in enumerate(body) if a.is_copy]
        if copies:
            k = rng.choice(copies)
            mvars.remove(body[k].copy_var)
            body[k] = body[k].template()
    body_vars = {t for a in body for t in a.args if isinstance(t, Var)}
    head = tuple(t for t in q.head if t in body_vars)
    try:
        return Query(name, head, tuple(body), tuple(v for v in mvars if v in body_vars or v in {a.copy_var for a in body}))
    except Exception:
        return q.rename({}, name)


def random_database(
    rng: random.Random,
    preds: dict[str, int] = PREDICATES,
    adom: int = 3,
    max_copy: int = 3,
    density: float = 0.5,
    extra_values: tuple = (),
) -> BagDatabase:
    dom = list(range(1, adom + 1)) + list(extra_values)
    facts = {}
    for p, k in sorted(preds.items()):
        for args in itertools.product(dom, repeat=k):
            if rng.random() < density:
                facts[(p, args)] = rng.randint(1, max_copy)
    return BagDatabase(facts)


def unregularized(q: Query, rng: random.Random) -> Query:
    """Pad the condition with duplicated relational atoms and copy templates."""
    extra = [a for a in q.relational_atoms if rng.random() < 0.7]
    extra += [a.template() for a in q.copy_atoms if rng.random() < 0.7]
    if not extra and q.body:
        extra = [q.body[0].template()]
    body = list(q.body) + extra
    rng.shuffle(body)
    return q.with_body(body)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def queries(draw, **kw) -> Query:
    return random_query(random.Random(draw(seeds)), **kw)


@st.composite
def query_and_db(draw, **kw):
    rng = random.Random(draw(seeds))
    q = random_query(rng, **kw)
    return q, random_database(rng)
