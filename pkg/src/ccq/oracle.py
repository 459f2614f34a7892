"""Brute-force falsification of equivalence claims.

Two searches are offered. ``counterexample_family`` walks the structured
database family of the first query and probes a single tuple;
``falsify_random`` draws small bag databases from a fixed 64-bit linear
congruential generator (multiplier 6364136223846793005, increment
1442695040888963407, modulus 2**64, output = high 32 bits of the state) so the
sample stream is identical on every platform. Neither search can prove
equivalence: finding nothing only means nothing was found.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .evaluator import BagDatabase, evaluate, multiplicity
from .query import Query, value_sort_key
from .wave import build_database, family_spec

LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Counterexample:
    database: BagDatabase
    tuple: tuple
    mult1: int
    mult2: int
    n: tuple[int, ...] | None = None
    sample: int | None = None

    def verify(self, q1: Query, q2: Query) -> bool:
        # answer bags rather than multiplicity(), since head arities may differ
        m1 = evaluate(q1, self.database).get(self.tuple, 0)
        m2 = evaluate(q2, self.database).get(self.tuple, 0)
        return (m1, m2) == (self.mult1, self.mult2) and m1 != m2


class Lcg:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next32(self) -> int:
        self.state = (LCG_A * self.state + LCG_C) & MASK64
        return self.state >> 32

    def below(self, k: int) -> int:
        return (self.next32() * k) >> 32


def n_vectors(size: int, n_max: int) -> Iterator[tuple[int, ...]]:
    """All vectors over 1..n_max, ordered by max-norm, then lexicographically."""
    if size == 0:
        yield ()
        return
    for top in range(1, n_max + 1):
        for v in itertools.product(range(1, top + 1), repeat=size):
            if max(v) == top:
                yield v


def counterexample_family(q1: Query, q2: Query, n_max: int) -> Counterexample | None:
    fspec = family_spec(q1)
    for n in n_vectors(fspec.size, n_max):
        d = build_database(fspec, n)
        m1 = multiplicity(q1, d, fspec.t_star)
        m2 = multiplicity(q2, d, fspec.t_star)
        if m1 != m2:
            return Counterexample(d, fspec.t_star, m1, m2, n=n)
    return None


def signature(q1: Query, q2: Query) -> list[tuple[str, int]]:
    return sorted({(a.predicate, a.arity) for q in (q1, q2) for a in q.body})


def domain(q1: Query, q2: Query, adom_size: int) -> list:
    vals: dict = {v: None for v in range(1, adom_size + 1)}
    for q in (q1, q2):
        for c in q.constants:
            vals.setdefault(c.value, None)
    return sorted(vals, key=value_sort_key)


def random_databases(
    preds: Sequence[tuple[str, int]], dom: Sequence, max_copy: int, seed: int
) -> Iterator[BagDatabase]:
    rng = Lcg(seed)
    candidates = [(p, args) for p, k in preds for args in itertools.product(dom, repeat=k)]
    while True:
        facts = {}
        for key in candidates:
            if rng.next32() >> 31:
                facts[key] = rng.below(max_copy) + 1
        yield BagDatabase(facts)


def first_difference(q1: Query, q2: Query, d: BagDatabase) -> Counterexample | None:
    a, b = evaluate(q1, d), evaluate(q2, d)
    if a == b:
        return None
    diff = [t for t in set(a) | set(b) if a.get(t, 0) != b.get(t, 0)]
    t = min(diff, key=lambda x: (len(x), tuple(value_sort_key(v) for v in x)))
    return Counterexample(d, t, a.get(t, 0), b.get(t, 0))


def _check_chunk(args) -> tuple[int, Counterexample] | None:
    q1, q2, start, dbs = args
    for k, d in enumerate(dbs):
        ce = first_difference(q1, q2, d)
        if ce is not None:
            return start + k, ce
    return None


def falsify_random(
    q1: Query,
    q2: Query,
    samples: int,
    adom_size: int,
    max_copy: int,
    seed: int,
    include: Iterable[BagDatabase] = (),
    jobs: int = 1,
) -> Counterexample | None:
    dbs = list(include)
    gen = random_databases(signature(q1, q2), domain(q1, q2, adom_size), max_copy, seed)
    dbs.extend(itertools.islice(gen, samples))
    if jobs <= 1:
        found = _check_chunk((q1, q2, 0, dbs))
    else:
        size = max(1, -(-len(dbs) // (jobs * 4)))
        chunks = [(q1, q2, i, dbs[i : i + size]) for i in range(0, len(dbs), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = [h for h in pool.map(_check_chunk, chunks) if h is not None]
        found = min(hits, key=lambda h: h[0]) if hits else None
    if found is None:
        return None
    idx, ce = found
    return Counterexample(ce.database, ce.tuple, ce.mult1, ce.mult2, sample=idx)
