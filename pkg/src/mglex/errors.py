"""Exception hierarchy shared by every layer of the package."""


class MglexError(Exception):
    """Base class for all errors raised by mglex."""

    code = "error"


class ParseError(MglexError):
    code = "parse_error"


class TypeCheckError(MglexError):
    code = "type_error"


class UnknownConstant(TypeCheckError):
    def __init__(self, name):
        super().__init__(f"unknown constant {name!r}")
        self.name = name


class UnboundVariable(TypeCheckError):
    def __init__(self, name):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class UnknownSort(TypeCheckError):
    def __init__(self, name):
        super().__init__(f"unknown sort {name!r}")
        self.name = name


class ApplicationMismatch(TypeCheckError):
    """A function was applied to an argument of the wrong type.

    This is the type mismatch that meaning assembly tries to repair.
    """

    def __init__(self, expected, got, detail=""):
        self.expected = expected
        self.got = got
        msg = f"expected {expected}, got {got}"
        if detail:
            msg = f"{detail}: {msg}"
        super().__init__(msg)


class EscapingTypeVariable(TypeCheckError):
    def __init__(self, tvar, var):
        super().__init__(
            f"type variable {tvar!r} occurs free in the type of free variable {var!r}"
        )
        self.tvar = tvar
        self.var = var


class InvalidSignature(MglexError):
    code = "signature_error"


class NotNormal(MglexError):
    code = "not_normal"


class NormalizationLimit(MglexError):
    code = "limit_error"


class TypeErrorInEntry(TypeCheckError):
    def __init__(self, word, detail):
        super().__init__(f"entry {word!r}: {detail}")
        self.word = word
        self.detail = detail


class DuplicateWord(MglexError):
    code = "lexicon_error"

    def __init__(self, word):
        super().__init__(f"duplicate entry for {word!r}")
        self.word = word


class UnknownWord(MglexError):
    code = "lexicon_error"

    def __init__(self, word):
        super().__init__(f"word {word!r} is not in the lexicon")
        self.word = word


class NonLogicalHead(MglexError):
    code = "logic_error"


class MissingPrerequisite(MglexError):
    code = "signature_error"
