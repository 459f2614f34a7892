from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from math import prod
from typing import Iterator, Mapping, Union

from .errors import ArityMismatch
from .query import Atom, Const, Query, Var

Value = Union[str, int]
Fact = tuple[str, tuple]
AnswerBag = dict[tuple, int]


@dataclass(frozen=True)
class BagDatabase:
    """Consolidated bag database: each ground atom appears once with its copy number."""

    facts: Mapping[Fact, int]
    _by_pred: dict = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        idx: dict[tuple[str, int], list[tuple[tuple, int]]] = defaultdict(list)
        for (p, args), n in self.facts.items():
            if n < 1:
                raise ValueError(f"copy number of {p}{args} must be positive")
            idx[(p, len(args))].append((args, n))
        object.__setattr__(self, "facts", dict(self.facts))
        object.__setattr__(self, "_by_pred", dict(idx))

    def matching(self, pred: str, arity: int) -> list[tuple[tuple, int]]:
        return self._by_pred.get((pred, arity), [])

    def adom(self) -> set:
        return {v for (_, args) in self.facts for v in args}

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts.items())


def _bind(atom: Atom, args: tuple, env: dict) -> dict | None:
    new = None
    for t, v in zip(atom.args, args):
        if isinstance(t, Const):
            if t.value != v or type(t.value) is not type(v):
                return None
            continue
        cur = env.get(t) if new is None else new.get(t, env.get(t))
        if cur is None:
            if new is None:
                new = {}
            new[t] = v
        elif cur != v or type(cur) is not type(v):
            return None
    if new is None:
        return env
    out = dict(env)
    out.update(new)
    return out


def noncopy_matches(q: Query, d: BagDatabase) -> Iterator[tuple[dict, tuple[int, ...]]]:
    """Bindings of the argument variables, with the copy number matched by each atom."""
    atoms = q.body
    counts: list[int] = [0] * len(atoms)

    def go(k: int, env: dict) -> Iterator[tuple[dict, tuple[int, ...]]]:
        if k == len(atoms):
            yield env, tuple(counts)
            return
        a = atoms[k]
        for args, n in d.matching(a.predicate, a.arity):
            env2 = _bind(a, args, env)
            if env2 is None:
                continue
            counts[k] = n
            yield from go(k + 1, env2)

    yield from go(0, {})


def satisfying_assignments(q: Query, d: BagDatabase) -> Iterator[dict[Var, Value]]:
    """Enumerate Γ(Q,D); copy variables run over 1..N of their matched fact."""
    copy_pos = [(i, a.copy_var) for i, a in enumerate(q.body) if a.is_copy]
    for env, counts in noncopy_matches(q, d):
        if not copy_pos:
            yield dict(env)
            continue
        ranges = [range(1, counts[i] + 1) for i, _ in copy_pos]
        for combo in itertools.product(*ranges):
            g = dict(env)
            for (_, cv), c in zip(copy_pos, combo):
                g[cv] = c
            yield g


def _union_size(boxes: set[tuple[int, ...]]) -> int:
    if len(boxes) == 1:
        return prod(next(iter(boxes)))
    maximal = [b for b in boxes if not any(o != b and all(x <= y for x, y in zip(b, o)) for o in boxes)]
    if len(maximal) == 1:
        return prod(maximal[0])
    pts = set()
    for b in maximal:
        pts.update(itertools.product(*(range(1, n + 1) for n in b)))
    return len(pts)


def _head_value(t, env):
    return t.value if isinstance(t, Const) else env[t]


def evaluate(q: Query, d: BagDatabase) -> AnswerBag:
    """Combined-semantics answer: count distinct restrictions to head plus M per head tuple."""
    copy_idx = [i for i, a in enumerate(q.body) if a.is_copy]
    noncopy = q.noncopy_mvars
    boxes: dict[tuple, set] = defaultdict(set)
    for env, counts in noncopy_matches(q, d):
        head = tuple(_head_value(t, env) for t in q.head)
        key = (head, tuple(env[v] for v in noncopy))
        boxes[key].add(tuple(counts[i] for i in copy_idx))
    out: AnswerBag = defaultdict(int)
    for (head, _), bs in boxes.items():
        out[head] += _union_size(bs)
    return dict(out)


def multiplicity(q: Query, d: BagDatabase, t: tuple) -> int:
    if len(t) != len(q.head):
        raise ArityMismatch(f"tuple of length {len(t)} for a query of arity {len(q.head)}")
    return evaluate(q, d).get(tuple(t), 0)


def bag_leq(a: AnswerBag, b: AnswerBag) -> bool:
    return all(n <= b.get(t, 0) for t, n in a.items())
