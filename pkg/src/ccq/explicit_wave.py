"""Explicit-wave classification.

Membership is in co-NP; the full check enumerates every GCM of the
copy-enhanced query into itself, so it is exponential in the worst case.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ExplicitWaveBudgetExceeded
from .mappings import TermMapping, enumerate_gcms
from .query import Atom, Query, Var
from .transforms import copy_enhanced


@dataclass(frozen=True)
class WaveWitness:
    """Two GCMs agreeing on M_noncopy that send ``subgoal`` to different templates."""

    permutation: tuple[tuple[Var, Var], ...]
    mu1: TermMapping
    mu2: TermMapping
    subgoal: Atom

    def to_json(self) -> dict:
        return {
            "permutation": {str(a): str(b) for a, b in self.permutation},
            "mu1": self.mu1.to_json(),
            "mu2": self.mu2.to_json(),
            "subgoal": str(self.subgoal),
            "images": [str(self.subgoal.rename(self.mu1.map)), str(self.subgoal.rename(self.mu2.map))],
        }


def has_self_join(q: Query) -> bool:
    preds = [a.predicate for a in q.body]
    return len(set(preds)) != len(preds)


def fast_explicit_wave(q: Query) -> bool | None:
    copies = q.copy_atoms
    if len(copies) <= 1:
        return True
    set_vars = set(q.set_vars)
    if not any(set_vars.intersection(a.args) for a in copies):
        return True
    if not has_self_join(q):
        return True
    return None


def implicit_wave_witness(q: Query, budget: int | None = None, node_budget: int | None = None) -> WaveWitness | None:
    if len(q.copy_atoms) <= 1:
        return None
    ce = copy_enhanced(q)
    noncopy = q.noncopy_mvars
    target = set(noncopy)
    originals = q.copy_atoms
    # per-permutation: first GCM seen, and the template each original subgoal went to
    groups: dict[tuple, tuple[TermMapping, list[Atom]]] = {}
    count = 0
    for mu in enumerate_gcms(ce, ce, node_budget):
        count += 1
        if budget is not None and count > budget:
            raise ExplicitWaveBudgetExceeded(f"more than {budget} GCMs enumerated")
        images = [mu.map[v] for v in noncopy]
        if set(images) != target or len(set(images)) != len(images):
            continue
        perm = tuple(zip(noncopy, images))
        templates = [a.rename(mu.map).template() for a in originals]
        seen = groups.get(perm)
        if seen is None:
            groups[perm] = (mu, templates)
            continue
        first, first_templates = seen
        for s, t0, t1 in zip(originals, first_templates, templates):
            if t0 != t1:
                return WaveWitness(perm, first, mu, s)
    return None


def is_explicit_wave(
    q: Query,
    use_fast_path: bool = True,
    budget: int | None = None,
    node_budget: int | None = None,
) -> bool:
    if use_fast_path and fast_explicit_wave(q):
        return True
    return implicit_wave_witness(q, budget, node_budget) is None
