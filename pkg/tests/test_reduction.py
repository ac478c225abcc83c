import random

import pytest

from generators import TermGenerator
from mglex.errors import NormalizationLimit, NotNormal
from mglex.prelude import standard_signature
from mglex.reduction import (
    contract,
    eta_long,
    head_decompose,
    is_normal,
    is_redex,
    normalize,
    reductions,
    step,
    unfold_definitions,
)
from mglex.syntax import parse_term
from mglex.terms import Arrow, Base, Lam, Var, check_type


@pytest.fixture
def sig():
    e, t = Base("e"), Base("t")
    return standard_signature(
        {"e"},
        {"a": e, "b": e, "p": Arrow(e, t), "r": Arrow(e, Arrow(e, t)), "ev": Arrow(Arrow(e, t), t)},
    )


@pytest.mark.parametrize(
    "text, normal",
    [
        ("(lam x:e. x) a", "a"),
        ("(lam x:e. lam y:e. r x y) a b", "r a b"),
        ("(Lam X. lam x:X. x) {e} a", "a"),
        ("(lam f:e -> t. f a) (lam y:e. p y)", "p a"),
        ("(lam x:e. lam y:e. r y x) b", "lam y:e. r y b"),
        ("(Lam X. lam f:X -> X. lam z:X. f (f z)) {e -> t} (lam g:e -> t. g) p", "p"),
    ],
)
@pytest.mark.parametrize("strategy", ["lo", "ri"])
def test_normal_forms(sig, text, normal, strategy):
    out = normalize(parse_term(text, sig), strategy=strategy)
    assert out == parse_term(normal, sig)
    assert is_normal(out)


def test_no_capture_during_beta(sig):
    # (lam x. lam y. r x y) y  must not capture the free y
    e = Base("e")
    t = parse_term("(lam x:e. lam y:e. r x y) y", sig, env={"y": e})
    out = normalize(t)
    assert isinstance(out, Lam) and out.var != "y"
    assert out.body.fn.arg == Var("y", e)


def test_redex_and_contract(sig):
    t = parse_term("(lam x:e. p x) a", sig)
    assert is_redex(t)
    assert contract(t) == parse_term("p a", sig)
    assert step(parse_term("p a", sig)) is None


def test_strategies_differ_in_path_not_result(sig):
    t = parse_term("(lam x:e. (lam y:e. p y) x) ((lam z:e. z) a)", sig)
    lo = list(reductions(t, "lo"))
    ri = list(reductions(t, "ri"))
    assert lo[1] != ri[1]
    assert lo[-1] == ri[-1] == parse_term("p a", sig)


def test_step_limit(sig):
    t = parse_term("(lam x:e. (lam y:e. (lam z:e. p z) y) x) a", sig)
    with pytest.raises(NormalizationLimit):
        normalize(t, max_steps=1)
    assert normalize(t, max_steps=3) == parse_term("p a", sig)


def test_unknown_strategy(sig):
    with pytest.raises(ValueError):
        normalize(parse_term("a", sig), strategy="outermost")


def test_definitions_unfold():
    e, t = Base("e"), Base("t")
    base = standard_signature({"e"}, {"p": Arrow(e, t), "q": Arrow(e, t)})
    sig = base.extend(definitions={"q": parse_term("lam x:e. not (p x)", base)})
    term = parse_term("q", sig)
    assert unfold_definitions(term, sig) == parse_term("lam x:e. not (p x)", sig)
    assert normalize(parse_term("lam y:e. q y", sig), sig) == parse_term("lam y:e. not (p y)", sig)


def test_eta_long(sig):
    out = eta_long(parse_term("ev p", sig))
    assert out == parse_term("ev (lam x:e. p x)", sig)
    assert eta_long(parse_term("r", sig)) == parse_term("lam x:e. lam y:e. r x y", sig)
    with pytest.raises(NotNormal):
        eta_long(parse_term("(lam x:e. x) a", sig))


def test_head_decompose(sig):
    t = parse_term("lam x:e. r x a", sig)
    nf = head_decompose(t)
    assert nf.binders == (("lam", "x", Base("e")),)
    assert nf.head.name == "r" and len(nf.args) == 2
    assert nf.reassemble() == t
    poly = parse_term("forall{e} (lam x:e. p x)", sig)
    nf = head_decompose(poly)
    assert nf.args[0] == Base("e")
    with pytest.raises(NotNormal):
        head_decompose(parse_term("(lam x:e. x) a", sig))


def test_random_terms_normalize_consistently():
    gen = TermGenerator(random.Random(2024))
    for _ in range(200):
        term, ty = gen.term(150)
        lo = normalize(term, strategy="lo")
        ri = normalize(term, strategy="ri")
        assert lo == ri
        assert check_type(gen.sig, {}, lo) == ty
        assert is_normal(lo)


def test_copredication_and_reduces():
    from mglex.fixtures import fixture_lexicon

    sig = fixture_lexicon("towns").signature
    out = normalize(parse_term("Land{Pl}{P} vast voted", sig), sig)
    want = "Lam X. lam x:X. lam f:X -> Pl. lam g:X -> P. and (vast (f x)) (voted (g x))"
    assert out == parse_term(want, sig)
    nf = head_decompose(out)
    assert [b[0] for b in nf.binders] == ["Lam", "lam", "lam", "lam"]
    assert nf.head.name == "and" and len(nf.args) == 2


def test_eta_long_bare_quantifier(sig):
    out = eta_long(parse_term("forall", sig))
    assert out == parse_term("Lam A. lam P:A -> t. forall{A} (lam x:A. P x)", sig)
    assert check_type(sig, {}, out) == sig.constants["forall"]
    assert is_normal(out)
