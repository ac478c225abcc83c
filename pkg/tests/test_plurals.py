import pytest

from mglex.assembly import assemble
from mglex.errors import MissingPrerequisite
from mglex.fixtures import fixture_lexicon, fixture_trees
from mglex.plurals import OPERATOR_DEFINITIONS, OPERATOR_TYPES, OPERATORS, install_plural_operators
from mglex.prelude import standard_signature
from mglex.reduction import normalize
from mglex.syntax import parse_term, parse_type
from mglex.terms import Base, check_type

COUNTS = {
    "keith_met": 0,
    "keith_and_john_met": 1,
    "the_student_met": 0,
    "the_students_met": 1,
    "the_committee_met": 1,
    "the_committees_met": 3,
    "the_students_wrote_a_paper": 1,
    "the_students_wrote_three_papers": 1,
}


@pytest.fixture(scope="module")
def sig():
    return install_plural_operators(standard_signature({"h", "N"}, {"k": Base("h")}))


def test_operator_list():
    assert OPERATORS == ("q", "star", "sharp", "c", "card")
    assert set(OPERATOR_DEFINITIONS) == set(OPERATORS) - {"card"}


@pytest.mark.parametrize("name", sorted(OPERATOR_TYPES))
def test_operator_types(sig, name):
    want = parse_type(OPERATOR_TYPES[name], sig)
    assert sig.constants[name] == want
    if name in OPERATOR_DEFINITIONS:
        body = sig.definitions[name]
        assert check_type(sig, {}, body) == want


def test_sharp_premises_are_symmetric(sig):
    ty = sig.constants["sharp"]
    r, s = ty.body.dom, ty.body.cod.dom
    assert r == s


def test_install_is_idempotent(sig):
    assert install_plural_operators(sig) == sig


@pytest.mark.parametrize("sorts, consts", [({"h"}, {}), (set(), {})])
def test_missing_prerequisites(sorts, consts):
    base = standard_signature(sorts, consts)
    with pytest.raises(MissingPrerequisite):
        install_plural_operators(base)


def test_q_unfolds_to_equality(sig):
    t = parse_term("q{h} k k", sig)
    assert normalize(t, sig) == parse_term("eq{h} k k", sig)


def test_star_distributes(sig):
    ext = sig.extend(constants={"P": parse_type("h -> t", sig), "Q": parse_type("h -> t", sig)})
    t = parse_term("star{h} P Q", ext)
    assert normalize(t, ext) == parse_term("forall{h} (lam x:h. implies (Q x) (P x))", ext)


@pytest.mark.parametrize("stem, count", sorted(COUNTS.items()))
def test_golden_counts(stem, count):
    lex = fixture_lexicon("plurals")
    assert len(assemble(lex, fixture_trees("plurals")[stem].tree)) == count


def test_committees_readings_are_labelled():
    lex = fixture_lexicon("plurals")
    rs = assemble(lex, fixture_trees("plurals")["the_committees_met"].tree)
    assert [r.labels for r in rs] == [{"covering"}, {"distributive"}, {"union"}]
