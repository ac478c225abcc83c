"""Operators for plurals and a cardinality constant, defined in System F."""

from __future__ import annotations

from .errors import MissingPrerequisite
from .prelude import EQUALITY
from .syntax import parse_term, parse_type
from .terms import Signature

NATURALS = "N"

OPERATOR_TYPES = {
    "q": "Pi α. α -> α -> t",
    "star": "Pi α. (α -> t) -> (α -> t) -> t",
    "sharp": "Pi α. ((α -> t) -> t) -> ((α -> t) -> t) -> t",
    "c": "Pi α. ((α -> t) -> t) -> (α -> t) -> t",
    "card": "Pi α. (α -> t) -> N",
}

# q: an individual as the property of being it; star: distributivity;
# sharp: restricted distributivity; c: coverings.
OPERATOR_DEFINITIONS = {
    "q": "Lam α. lam x:α. lam y:α. eq{α} x y",
    "star": "Lam α. lam P:α -> t. lam Q:α -> t. forall{α} (lam x:α. implies (Q x) (P x))",
    "sharp": (
        "Lam α. lam R:(α -> t) -> t. lam S:(α -> t) -> t. "
        "forall{α -> t} (lam P:α -> t. implies (S P) (R P))"
    ),
    "c": (
        "Lam α. lam R:(α -> t) -> t. lam P:α -> t. forall{α} (lam x:α. implies (P x) "
        "(exists{α -> t} (lam Q:α -> t. and (Q x) "
        "(and (forall{α} (lam y:α. implies (Q y) (P y))) (R Q)))))"
    ),
}

OPERATORS = tuple(OPERATOR_TYPES)


def install_plural_operators(sig: Signature) -> Signature:
    """Extend ``sig`` with q, star, sharp, c and card.

    Needs the polymorphic equality and a sort ``N`` of natural numbers.
    Installing twice gives an equal signature.
    """
    missing = []
    if EQUALITY not in sig.constants:
        missing.append(EQUALITY)
    if NATURALS not in sig.sorts:
        missing.append(NATURALS)
    if missing:
        raise MissingPrerequisite(f"plural operators need {', '.join(missing)}")
    types = {name: parse_type(text, sig) for name, text in OPERATOR_TYPES.items()}
    with_types = sig.extend(constants=types)
    defs = {name: parse_term(text, with_types) for name, text in OPERATOR_DEFINITIONS.items()}
    return with_types.extend(definitions=defs)
