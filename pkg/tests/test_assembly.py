import json

import pytest

from mglex.assembly import (
    Leaf,
    Node,
    Use,
    assemble,
    copredication_slots,
    enforce_rigidity,
    instantiate,
    leaves,
    load_tree,
    oracle_readings,
    rigidity_ok,
    tree_from_json,
    tree_to_json,
)
from mglex.errors import ParseError, UnknownWord
from mglex.fixtures import LEXICONS, fixture_lexicon, fixture_trees
from mglex.lexicon import FLEXIBLE, RIGID
from mglex.logic import format_formula, term_to_formula
from mglex.syntax import parse_term, parse_type
from mglex.terms import App, check_type

ALL_TREES = [(name, stem) for name in LEXICONS for stem in sorted(fixture_trees(name))]


def readings(name, stem):
    lex = fixture_lexicon(name)
    return lex, assemble(lex, fixture_trees(name)[stem].tree)


def rendered(lex, rs):
    return [format_formula(term_to_formula(r.logical_form, lex.signature)) for r in rs]


@pytest.mark.parametrize("name, stem", ALL_TREES)
def test_expected_reading_counts(name, stem):
    doc = fixture_trees(name)[stem]
    lex = fixture_lexicon(name)
    assert len(assemble(lex, doc.tree)) == doc.expected_readings


@pytest.mark.parametrize("name, stem", ALL_TREES)
def test_assemble_agrees_with_oracle(name, stem):
    lex = fixture_lexicon(name)
    tree = fixture_trees(name)[stem].tree
    fast = {(r.logical_form, r.trace) for r in assemble(lex, tree)}
    slow = {(r.logical_form, r.trace) for r in oracle_readings(lex, tree)}
    assert fast == slow


def test_some_club_defeated_leeds():
    lex, rs = readings("montague", "some_club_defeated_leeds")
    [r] = rs
    assert r.logical_form == parse_term("exists{e} (lam x:e. and (club x) (defeated x Leeds))", lex.signature)
    assert rendered(lex, rs) == ["∃x:e (club(x) ∧ defeated(x, Leeds))"]
    assert r.trace == () and r.presuppositions == ()


@pytest.mark.parametrize(
    "stem, form, trace",
    [
        ("liverpool_is_vast", "vast (t3 Liverpool)", {"t3"}),
        ("liverpool_is_vast_and_voted", "and (vast (t3 Liverpool)) (voted (t2 Liverpool))", {"t2", "t3"}),
        ("liverpool_won", "won (t1 Liverpool)", {"t1"}),
        ("liverpool_won_and_won", "and (won (t1 Liverpool)) (won (t1 Liverpool))", {"t1"}),
        ("book_heavy_and_boring", "and (heavy (b1 War_and_Peace)) (boring (b2 War_and_Peace))", {"b1", "b2"}),
    ],
)
def test_towns_readings(stem, form, trace):
    lex, rs = readings("towns", stem)
    [r] = rs
    assert r.logical_form == parse_term(form, lex.signature)
    assert r.labels == trace


@pytest.mark.parametrize("stem", ["liverpool_voted_and_won", "liverpool_is_vast_voted_and_won"])
def test_rigid_sense_blocks_copredication(stem):
    _, rs = readings("towns", stem)
    assert rs == []


def test_trace_names_occurrences():
    _, [r] = readings("towns", "liverpool_is_vast_and_voted")
    assert r.trace == (("Liverpool@3", "t2"), ("Liverpool@3", "t3"))


def test_deverbal_senses():
    lex, [r] = readings("deverbals", "the_signature_took_one_minute_and_was_illegible")
    assert r.labels == {"event", "result"}
    _, rs = readings("deverbals", "the_building_took_three_months_and_was_painted_white")
    assert rs == []


def test_fictive_motion():
    lex, [r] = readings("fictive_motion", "gr3_descends")
    assert r.labels == {"as_path", "travelled"}
    assert rendered(lex, [r]) == ["∀y:mover (follows(y, as_path(GR3)) → descends(y))"]
    _, [plain] = readings("fictive_motion", "paul_descends_for_two_hours")
    assert plain.trace == ()


def test_rigidity_rules():
    flex = Use("w@0", "a", FLEXIBLE)
    rig = Use("w@0", "r", RIGID)
    assert rigidity_ok([flex, Use("w@0", "id", FLEXIBLE)])
    assert rigidity_ok([rig, rig])
    assert not rigidity_ok([rig, flex])
    assert not rigidity_ok([rig, Use("w@0", "s", RIGID)])
    other = Use("v@1", "a", FLEXIBLE)
    assert enforce_rigidity([(rig, other), (rig, flex)]) == [(rig, other)]


def test_copredication_slots():
    lex = fixture_lexicon("towns")
    sig = lex.signature
    land = lex.entry("and").type
    town = parse_type("T", sig)
    # after Land{Pl}{P} P Q the remaining type takes an entity and two slots
    rest = parse_type("Pi X. X -> (X -> Pl) -> (X -> P) -> t", sig)
    assert copredication_slots(rest, town) == [parse_type("Pl", sig), parse_type("P", sig)]
    assert copredication_slots(land, town) == []
    assert copredication_slots(parse_type("T -> t", sig), town) == []


def test_instantiate_keeps_open_binders():
    sig = fixture_lexicon("towns").signature
    land, vast = sig.const("Land"), sig.const("vast")
    fn, wrap = instantiate(land, land.type, vast.type)
    out = wrap(App(fn, vast))
    want = "Pi B. (B -> t) -> Pi X. X -> (X -> Pl) -> (X -> B) -> t"
    assert check_type(sig, {}, out) == parse_type(want, sig)
    assert instantiate(vast, vast.type, parse_type("T", sig)) is None


def test_unknown_word():
    lex = fixture_lexicon("towns")
    with pytest.raises(UnknownWord):
        assemble(lex, Node(Leaf("sings"), Leaf("Liverpool")))


def test_tree_json_round_trip(tmp_path):
    tree = Node(Leaf("won"), Leaf("Liverpool"))
    assert tree_from_json(tree_to_json(tree)) == tree
    assert leaves(Node(Node(Leaf("a"), Leaf("b")), Leaf("c"))) == ["a", "b", "c"]
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"tree": tree_to_json(tree), "sentence": "Liverpool won."}))
    doc = load_tree(str(path))
    assert doc.tree == tree and doc.sentence == "Liverpool won."
    assert load_tree(tree_to_json(tree)).tree == tree


@pytest.mark.parametrize("bad", [{"fn": "a"}, {"fn": "a", "arg": 3}, [], {"tree": {"arg": "x"}}])
def test_bad_trees(bad):
    with pytest.raises(ParseError):
        load_tree(bad)
