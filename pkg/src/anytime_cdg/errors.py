"""Exception types. Every error carries a short machine-readable ``code``."""


class CDGError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def __str__(self):
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class GrammarError(CDGError):
    """Raised by the grammar loader.

    ``code`` is one of SYNTAX_ERROR, UNDECLARED_SYMBOL, BAD_RELIABILITY,
    NONLOCAL_FORMULA. ``line``/``column`` are 1-based when known.
    """

    def __init__(self, code, message, line=None, column=None):
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)

    def at(self, line, column):
        return GrammarError(self.code, self.message, line, column)


class UnknownForm(CDGError, KeyError):
    code = "UNKNOWN_FORM"


class InconsistentNetwork(CDGError):
    code = "INCONSISTENT"


class MalformedTree(CDGError):
    code = "MALFORMED_TREE"


class EmptyDomain(CDGError):
    """Licensing left some node without values; ``network`` is kept for diagnosis."""

    code = "EMPTY_DOMAIN"

    def __init__(self, message, network=None, nodes=()):
        super().__init__(message)
        self.network = network
        self.nodes = tuple(nodes)


class TooLarge(CDGError):
    code = "TOO_LARGE"


class QualityDomainError(CDGError, ValueError):
    code = "DOMAIN_ERROR"


class NoAmbiguousNode(CDGError):
    code = "NO_AMBIGUOUS_NODE"


class NoApplicableConstraint(CDGError):
    code = "NO_APPLICABLE_CONSTRAINT"


class MissingParam(CDGError, KeyError):
    code = "MISSING_PARAM"


class ModeMismatch(CDGError):
    code = "MODE_MISMATCH"


class DuplicateId(CDGError):
    code = "DUPLICATE_ID"


class UnsortedEvents(CDGError, ValueError):
    code = "UNSORTED_EVENTS"
