from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ClassMismatch, NonDistinctHead
from .explicit_wave import is_explicit_wave
from .mappings import Kind, TermMapping, check_isomorphic, enumerate_gcms, equivalence_compatible, find_mapping
from .oracle import Counterexample, counterexample_family, falsify_random
from .query import Query, QueryClass, classify
from .textio import format_fact, format_tuple
from .transforms import copy_enhanced


class Answer(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Reason(str, enum.Enum):
    SCALE_MISMATCH = "ScaleMismatch"
    CVM_BOTH_WAYS = "CvmBothWays"
    CVM_ONE_WAY = "CvmOneWay"
    EXPLICIT_WAVE_NO_CVM = "ExplicitWaveNoCvm"
    IMPLICIT_WAVE_INCONCLUSIVE = "ImplicitWaveInconclusive"
    NO_GCM_COPY_ENHANCED = "NoGcmCopyEnhanced"
    ISOMORPHISM_TEST = "IsomorphismTest"


@dataclass(frozen=True)
class Verdict:
    question: str
    answer: Answer
    reason: Reason
    witnesses: tuple[TermMapping, ...] = ()
    counterexample: Counterexample | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        ce = None
        if self.counterexample is not None:
            c = self.counterexample
            ce = {
                "database": [format_fact(p, a, n) for (p, a), n in c.database],
                "tuple": format_tuple(c.tuple),
                "mult1": c.mult1,
                "mult2": c.mult2,
            }
        out = {
            "question": self.question,
            "answer": self.answer.value,
            "reason": self.reason.value,
            "witnesses": [m.to_json() for m in self.witnesses],
            "counterexample": ce,
        }
        out.update(self.details)
        return out


def compatible(q1: Query, q2: Query, mode: str = "containment") -> bool:
    if mode == "equivalence":
        return equivalence_compatible(q1, q2)
    if mode != "containment":
        raise ValueError(f"unknown compatibility mode {mode!r}")
    return (
        len(q1.head) == len(q2.head)
        and len(q1.copy_vars) <= len(q2.copy_vars)
        and len(q1.noncopy_mvars) <= len(q2.noncopy_mvars)
    )


@dataclass(frozen=True)
class OracleOptions:
    n_max: int = 3
    samples: int = 500
    adom_size: int = 3
    max_copy: int = 3
    seed: int = 0
    jobs: int = 1


def _oracle(q1: Query, q2: Query, opts: OracleOptions) -> Counterexample | None:
    for a, b, swap in ((q1, q2, False), (q2, q1, True)):
        try:
            ce = counterexample_family(a, b, opts.n_max)
        except NonDistinctHead:
            continue
        if ce is not None:
            if swap:
                ce = Counterexample(ce.database, ce.tuple, ce.mult2, ce.mult1, n=ce.n)
            return ce
    return falsify_random(q1, q2, opts.samples, opts.adom_size, opts.max_copy, opts.seed, jobs=opts.jobs)


def decide_equivalence(
    q1: Query,
    q2: Query,
    oracle: bool = False,
    budget: int | None = None,
    oracle_options: OracleOptions | None = None,
) -> Verdict:
    q = "Equivalence"
    if not equivalence_compatible(q1, q2):
        return Verdict(q, Answer.NO, Reason.SCALE_MISMATCH)
    ew1 = is_explicit_wave(q1, node_budget=budget)
    ew2 = is_explicit_wave(q2, node_budget=budget)
    fwd = find_mapping(Kind.CVM, q2, q1, budget)
    bwd = find_mapping(Kind.CVM, q1, q2, budget)
    details = {"explicit_wave": [ew1, ew2]}
    if fwd is not None and bwd is not None:
        return Verdict(q, Answer.YES, Reason.CVM_BOTH_WAYS, (fwd, bwd), details=details)
    found = tuple(m for m in (fwd, bwd) if m is not None)
    if ew1 and ew2:
        return Verdict(q, Answer.NO, Reason.EXPLICIT_WAVE_NO_CVM, found, details=details)
    if oracle:
        ce = _oracle(q1, q2, oracle_options or OracleOptions())
        if ce is not None:
            return Verdict(q, Answer.NO, Reason.IMPLICIT_WAVE_INCONCLUSIVE, found, ce, details)
    return Verdict(q, Answer.UNKNOWN, Reason.IMPLICIT_WAVE_INCONCLUSIVE, found, details=details)


_CLASSICAL = (QueryClass.SET, QueryClass.BAG, QueryClass.BAGSET)


def decide_equivalence_classical(q1: Query, q2: Query, budget: int | None = None) -> Verdict:
    c1, c2 = classify(q1), classify(q2)
    if c1 != c2 or c1 not in _CLASSICAL:
        raise ClassMismatch(f"classical test needs two Set, Bag or BagSet queries, got {c1.value} and {c2.value}")
    q = "Equivalence"
    if c1 is QueryClass.SET:
        a = find_mapping(Kind.CM, q2, q1, budget)
        b = find_mapping(Kind.CM, q1, q2, budget)
        if a is not None and b is not None:
            return Verdict(q, Answer.YES, Reason.CVM_BOTH_WAYS, (a, b))
        return Verdict(q, Answer.NO, Reason.EXPLICIT_WAVE_NO_CVM, tuple(m for m in (a, b) if m is not None))
    mode = "bag" if c1 is QueryClass.BAG else "bagset"
    same = check_isomorphic(q1, q2, mode, budget)
    return Verdict(q, Answer.YES if same else Answer.NO, Reason.ISOMORPHISM_TEST)


def check_containment(q1: Query, q2: Query, budget: int | None = None) -> Verdict:
    """Is q1 contained in q2? YES on a CVM q2 -> q1, NO when a necessary condition fails."""
    q = "Containment"
    if not compatible(q1, q2, "containment"):
        return Verdict(q, Answer.NO, Reason.SCALE_MISMATCH)
    m = find_mapping(Kind.CVM, q2, q1, budget)
    if m is not None:
        return Verdict(q, Answer.YES, Reason.CVM_ONE_WAY, (m,))
    if next(iter(enumerate_gcms(copy_enhanced(q2), copy_enhanced(q1), budget)), None) is None:
        return Verdict(q, Answer.NO, Reason.NO_GCM_COPY_ENHANCED)
    return Verdict(q, Answer.UNKNOWN, Reason.CVM_ONE_WAY)
