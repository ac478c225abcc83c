import random

import pytest

from generators import PairGenerator, random_dag_signature
from posets import closed_dags, poset_signature
from mglex.prelude import standard_signature
from mglex.reduction import normalize
from mglex.syntax import parse_term, parse_type
from mglex.subtyping import (
    ARROW_COCO,
    FORALL_ELIM_LEFT,
    FORALL_INTRO,
    IDENTITY,
    SubtypeDerivation,
    check_coherence,
    check_derivation,
    coercion_term,
    coercive_apply,
    collapse_coercions,
    default_universe,
    derive_subtype,
    enumerate_derivations,
)
from mglex.terms import Base, Forall, check_type


@pytest.fixture
def sig():
    return standard_signature(
        {"a", "b", "c"},
        {"p": parse_type("c -> t", sorts={"c", "t"}), "u": parse_type("a", sorts={"a"})},
        [("a", "b", "f"), ("b", "c", "g"), ("a", "c", "h")],
    )


def _check(sig, s, t, **kw):
    s, t = parse_type(s, sig), parse_type(t, sig)
    d = derive_subtype(sig, s, t, **kw)
    assert d is not None and check_derivation(sig, d)
    c = coercion_term(d)
    assert c.is_linear()
    assert check_type(sig, {c.source_var.name: s}, c.term) == t
    return d, c


@pytest.mark.parametrize(
    "s, t, coercion",
    [
        ("a", "a", "x"),
        ("a", "b", "f x"),
        ("a", "c", "h x"),
        ("c -> a", "a -> c", "lam z1:a. h (x (h z1))"),
        ("b -> a", "b -> b", "lam z1:b. f (x z1)"),
        ("c -> t", "a -> t", "lam z1:a. x (h z1)"),
        ("a", "Pi X. c", "Lam X. h x"),
    ],
)
def test_coercion_terms(sig, s, t, coercion):
    _, c = _check(sig, s, t)
    assert normalize(c.term) == parse_term(coercion, sig, env={"x": parse_type(s, sig)})


@pytest.mark.parametrize("s, t", [("c", "a"), ("b", "a"), ("a -> b", "b -> b"), ("a -> b", "Pi X. X -> b")])
def test_underivable(sig, s, t):
    assert derive_subtype(sig, parse_type(s, sig), parse_type(t, sig)) is None


def test_forall_elimination_both_ways(sig):
    d, c = _check(sig, "Pi X. X -> a", "b -> c")
    d2, c2 = _check(sig, "Pi X. X -> a", "b -> c", alternative_elim=True)
    assert d2.rule == FORALL_ELIM_LEFT and d.rule != FORALL_ELIM_LEFT
    assert normalize(c.term) == normalize(c2.term)


def test_arrow_rule_premises_order(sig):
    d, _ = _check(sig, "c -> a", "a -> c")
    assert d.rule == ARROW_COCO
    cod, dom = d.premises
    assert cod.conclusion == (Base("a"), Base("c"))
    assert dom.conclusion == (Base("a"), Base("c"))


def test_check_derivation_rejects_bad_trees(sig):
    a, b = Base("a"), Base("b")
    assert not check_derivation(sig, SubtypeDerivation(IDENTITY, a, b))
    bad_intro = SubtypeDerivation(FORALL_INTRO, a, Forall("X", b), (SubtypeDerivation(IDENTITY, a, a),))
    assert not check_derivation(sig, bad_intro)


def test_coercive_apply(sig):
    p = parse_term("p", sig)
    u = parse_term("u", sig)
    assert normalize(coercive_apply(sig, p, u)) == parse_term("p (h u)", sig)
    assert coercive_apply(sig, parse_term("lam y:b. y", sig), parse_term("p", sig)) is None


def test_collapse_coercions(sig):
    t = parse_term("g (f x)", sig, env={"x": Base("a")})
    assert collapse_coercions(t, sig) == parse_term("h x", sig, env={"x": Base("a")})


def test_default_universe(sig):
    uni = default_universe(sig, 4)
    assert len(uni) == 3 * 3
    assert Forall("X1", Forall("X2", Base("c"))) in uni


def test_random_pairs_sound_and_linear():
    rng = random.Random(5)
    count = 0
    for _ in range(12):
        dag = random_dag_signature(rng)
        gen = PairGenerator(rng, dag)
        for _ in range(10):
            s, t = gen.pair()
            d = derive_subtype(dag, s, t)
            assert d is not None and check_derivation(dag, d)
            c = coercion_term(d)
            assert c.is_linear() and check_type(dag, {c.source_var.name: s}, c.term) == t
            count += 1
    assert count == 120


def test_dp_matches_enumeration():
    for edges in closed_dags(3):
        dag = poset_signature(3, edges)
        for depth in (1, 2, 3, 4):
            report = check_coherence(dag, depth)
            for pair in report.pairs:
                ds = list(enumerate_derivations(dag, Base(pair.source), Base(pair.target), depth))
                assert len(ds) == pair.derivations
                assert all(d.height <= depth and check_derivation(dag, d) for d in ds)
                normal = sorted({str(normalize(coercion_term(d).term)) for d in ds})
                assert normal == pair.normal_forms


def test_witness_choice_does_not_change_coercions():
    for edges in closed_dags(3):
        dag = poset_signature(3, edges)
        sorts = [Base(f"s{i}") for i in range(3)]
        one = check_coherence(dag, 4)
        many = check_coherence(dag, 4, witnesses=sorts)
        assert [p.coercions for p in one.pairs] == [p.coercions for p in many.pairs]
        assert all(m.derivations >= o.derivations for o, m in zip(one.pairs, many.pairs))


def test_coherence_closed_graph(sig):
    report = check_coherence(sig, 5)
    assert report.coherent and not report.flagged
    by_pair = {(p.source, p.target): p for p in report.pairs}
    assert by_pair[("a", "c")].coercions == ["h x"]
    assert set(by_pair[("a", "c")].normal_forms) == {"h x", "g (f x)"}
    assert report.to_dict()["coherent"] is True


def test_diamond_without_composite_is_incoherent():
    dag = standard_signature(
        {"a", "b", "c", "d"},
        {},
        [("a", "b", "f"), ("b", "d", "g"), ("a", "c", "h"), ("c", "d", "k")],
        require_closed=False,
    )
    report = check_coherence(dag, 3)
    assert not report.coherent
    [flag] = report.flagged
    assert (flag.source, flag.target) == ("a", "d")
    assert flag.coercions == ["g (f x)", "k (h x)"]
    assert "incoherent" in report.to_text()


def test_depth_must_be_positive(sig):
    with pytest.raises(ValueError):
        check_coherence(sig, 0)
