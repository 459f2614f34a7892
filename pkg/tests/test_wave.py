import random

import pytest

from ccq.errors import EnumerationBudgetExceeded, NonDistinctHead, ScaleMismatch
from ccq.evaluator import multiplicity
from ccq.mappings import check_mapping
from ccq.query import Var
from ccq.textio import parse_query
from ccq.wave import (
    Monomial,
    build_database,
    build_family_database,
    class_cardinality_check,
    enumerate_monomial_classes,
    family_spec,
    multiplicity_monomial,
    wave,
    wave_class_scvm,
)
from conftest import fixture_queries
from strategies import random_query


def rename_db(d, names):
    return {(p, tuple(names.get(v, v) for v in args)): n for (p, args), n in d.facts.items()}


def signature_table(fspec, classes):
    return sorted(
        (
            tuple(str(a) for a in c.atom_signature),
            tuple(str(t) for t in c.noncopy_signature),
            tuple(c.copy_signature),
            str(multiplicity_monomial(c, fspec)),
        )
        for c in classes
    )


def test_family_spec_ex5_1(fx):
    fspec = family_spec(fx("ex5_1_Q.ccq"))
    assert (fspec.m, fspec.w) == (1, 1)
    assert fspec.nu0 == {Var("X1"): "#a0", Var("X2"): "#a1"}
    assert fspec.t_star == ("#a0",)


def test_family_spec_ex4_1(fx):
    fspec = family_spec(fx("ex4_1_Q.ccq"))
    assert (fspec.m, fspec.w, fspec.size) == (2, 2, 4)
    assert list(fspec.nu0) == [Var("X1"), Var("X2"), Var("X3")]


def test_boolean_and_nondistinct():
    assert family_spec(parse_query("Q() <- p(X), {}.")).t_star == ()
    with pytest.raises(NonDistinctHead):
        family_spec(parse_query("Q(X,X) <- p(X), {}."))


def test_fresh_constants_avoid_query_constants():
    fspec = family_spec(parse_query("Q(X) <- p(X,'#a0'), {}."))
    assert fspec.t_star == ("#a1",)


def test_build_database_ex5_1(fx):
    d = build_database(family_spec(fx("ex5_1_Q.ccq")), [2, 3])
    got = rename_db(d, {"#a0": "a", "#a1": "b", "#a2": "c", "#a3": "d"})
    assert got == {("p", ("a", "c")): 1, ("p", ("a", "b")): 3, ("p", ("a", "d")): 1}


def test_build_database_ex4_1(fx):
    d = build_database(family_spec(fx("ex4_1_Q.ccq")), [1, 2, 3, 5])
    got = rename_db(d, {"#a0": "a", "#a1": "b", "#a2": "c", "#a3": "e", "#a4": "f", "#a5": "g"})
    assert got == {
        ("r", ("a", "e", "f", "b")): 3,
        ("r", ("a", "e", "g", "b")): 3,
        ("r", ("a", "e", "f", "c")): 5,
        ("r", ("a", "e", "g", "c")): 5,
    }
    assert multiplicity(fx("ex4_1_Q.ccq"), d, ("#a0",)) == 50


def test_ones_on_set_query_is_canonical_database():
    q = parse_query("Q(X) <- e(X,Y), e(Y,Z), e(X,Y), {}.")
    d = build_database(family_spec(q), [])
    # [DERIVED] freeze each variable into its own constant
    assert d.facts == {("e", ("#a0", "#a1")): 1, ("e", ("#a1", "#a2")): 1}


def test_classes_ex5_1_qpp(fx):
    fspec = family_spec(fx("ex5_1_Q.ccq"))
    classes = enumerate_monomial_classes(fspec, fx("ex5_1_Qpp.ccq"), [2, 3])
    h1, h2 = "p(X1,Y1)", "p(X1,X2;Y2)"
    assert signature_table(fspec, classes) == sorted(
        [
            ((h1, h1), ("Y1",), (0,), "N1"),
            ((h1, h2), ("Y1",), (0,), "N1"),
            ((h2, h1), ("X2",), (2,), "N2"),
            ((h2, h2), ("X2",), (2,), "N2"),
        ]
    )
    sizes = {(tuple(map(str, c.atom_signature))): len(c.tuples) for c in classes}
    assert sizes[(h1, h1)] == 2
    assert sizes[(h2, h2)] == 3
    assert all(class_cardinality_check(c, fspec, [2, 3]) for c in classes)
    assert wave_class_scvm(fspec, fx("ex5_1_Qpp.ccq")) is None


def test_classes_ex5_1_q(fx):
    fspec = family_spec(fx("ex5_1_Q.ccq"))
    monos = sorted(str(multiplicity_monomial(c, fspec)) for c in enumerate_monomial_classes(fspec, fspec.query, [2, 3]))
    assert monos == ["1", "N1", "N1*N2", "N2"]
    assert str(wave(fspec)) == "N1*N2"


def test_classes_ex4_1(fx):
    q = fx("ex4_1_Q.ccq")
    fspec = family_spec(q)
    classes = enumerate_monomial_classes(fspec, q, [1, 2, 3, 5])
    assert len(classes) == 4
    assert all(tuple(map(str, c.noncopy_signature)) == ("Y1", "Y2") for c in classes)
    assert sorted(c.copy_signature for c in classes) == [(3, 3), (3, 4), (4, 3), (4, 4)]
    sizes = sorted(len(c.tuples) for c in classes)
    assert sizes == [18, 30, 30, 50]
    assert all(class_cardinality_check(c, fspec, [1, 2, 3, 5]) for c in classes)
    assert str(wave(fspec)) == "N1*N2*N3*N4"


def test_single_atom_one_class():
    q = parse_query("Q(X) <- p(X;I), {I}.")
    fspec = family_spec(q)
    assert len(enumerate_monomial_classes(fspec, q, [1])) == 1


def test_monomial_values():
    assert str(Monomial.of([0, 0])) == "1"
    assert Monomial.of([]).evaluate([]) == 1
    assert Monomial.of([1, 3, 3]).evaluate([2, 9, 5]) == 50
    assert str(Monomial.of([3, 1, 3])) == "N1*N3^2"


def test_wave_empty_m():
    assert str(wave(family_spec(parse_query("Q(X) <- p(X,Y), {}.")))) == "1"


def test_scvm_ex5_1(fx):
    fspec = family_spec(fx("ex5_1_Q.ccq"))
    m = wave_class_scvm(fspec, fx("ex5_1_Qp.ccq"))
    assert m is not None and check_mapping(m)
    assert m.map[Var("X3")] in (Var("X2"), Var("Y1"))


def test_scale_mismatch(fx):
    fspec = family_spec(fx("ex5_1_Q.ccq"))
    with pytest.raises(ScaleMismatch):
        enumerate_monomial_classes(fspec, fx("qc.ccq"), [1, 1])


def test_enumeration_budget(fx):
    fspec = family_spec(fx("ex4_1_Q.ccq"))
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_monomial_classes(fspec, fspec.query, [2, 2, 2, 2], budget=3)


def eligible():
    out = []
    for q in fixture_queries():
        try:
            out.append((q, family_spec(q)))
        except NonDistinctHead:
            pass
    return out


def test_generative_assignment_and_cardinality_on_fixtures():
    rng = random.Random(2)
    for q, fspec in eligible():
        for _ in range(2):
            n = [rng.randint(1, 3) for _ in range(fspec.size)]
            fam = build_family_database(fspec, n)
            assert multiplicity(q, fam.db, fspec.t_star) >= 1
            classes = enumerate_monomial_classes(fspec, q, n)
            assert all(class_cardinality_check(c, fspec, n) for c in classes)
            union = set().union(*(c.tuples for c in classes))
            assert len(union) == multiplicity(q, fam.db, fspec.t_star)


def test_i_independence_on_fixtures():
    for q, fspec in eligible():
        a = enumerate_monomial_classes(fspec, q, [1] * fspec.size)
        b = enumerate_monomial_classes(fspec, q, [2] * fspec.size)
        assert {c.key() for c in a} == {c.key() for c in b}


def test_self_wave_random():
    rng = random.Random(17)
    for _ in range(100):
        q = random_query(rng)
        fspec = family_spec(q)
        m = wave_class_scvm(fspec, q)
        assert m is not None and check_mapping(m), str(q)
