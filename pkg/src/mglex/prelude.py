"""Built-in constants every signature starts from.

Connectives, the polymorphic quantifiers, the Hilbert-style operators, a
polymorphic equality and the polymorphic conjunction used for copredication.
"""

from .syntax import parse_term, parse_type
from .terms import PROP, Signature

_TYPES = {
    "and": "t -> t -> t",
    "or": "t -> t -> t",
    "implies": "t -> t -> t",
    "not": "t -> t",
    "forall": "Pi α. (α -> t) -> t",
    "exists": "Pi α. (α -> t) -> t",
    "iota": "Pi α. (α -> t) -> α",
    "eps": "Pi α. (α -> t) -> α",
    "eta": "Pi α. (α -> t) -> α",
    "tau": "Pi α. (α -> t) -> α",
    "most": "Pi α. (α -> t) -> α",
    "eq": "Pi α. α -> α -> t",
    "Land": "Pi α. Pi β. (α -> t) -> (β -> t) -> Pi ξ. ξ -> (ξ -> α) -> (ξ -> β) -> t",
}

CONNECTIVES = ("and", "or", "implies")
NEGATION = "not"
QUANTIFIERS = ("forall", "exists")
HILBERT = ("iota", "eps", "eta", "tau")
GENERALIZED = ("most",)
EQUALITY = "eq"
POLY_AND = "Land"

POLY_AND_DEFINITION = (
    "Lam α. Lam β. lam P:α -> t. lam Q:β -> t. Lam ξ. lam x:ξ. lam f:ξ -> α. lam g:ξ -> β. "
    "and (P (f x)) (Q (g x))"
)


def prelude_types() -> dict:
    return {name: parse_type(text, sorts={PROP}) for name, text in _TYPES.items()}


def standard_signature(
    sorts=(),
    constants=None,
    base_coercions=(),
    definitions=None,
    require_closed=True,
) -> Signature:
    """A Signature holding the built-in constants plus the given declarations."""
    base = Signature.build({PROP}, prelude_types(), (), {}, require_closed=False)
    consts = prelude_types()
    consts.update(constants or {})
    defs = {POLY_AND: parse_term(POLY_AND_DEFINITION, base)}
    defs.update(definitions or {})
    return Signature.build(sorts, consts, base_coercions, defs, require_closed)


BUILTIN_NAMES = frozenset(_TYPES)
