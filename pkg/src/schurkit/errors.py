"""Exception hierarchy shared by every schurkit module."""


class SchurError(Exception):
    """Base class for all schurkit errors."""


class InvalidSpec(SchurError):
    pass


class TooLarge(SchurError):
    """An operation refused because the input exceeds its configured bound."""


class InvalidInput(SchurError):
    pass


class InvalidMultiplier(SchurError):
    pass


class SRingAxiomError(SchurError):
    """A partition fails one of the S-ring axioms.

    ``classes`` holds the indices (into the submitted class list) of the
    classes that witness the violation.
    """

    def __init__(self, message, classes=()):
        super().__init__(message)
        self.classes = tuple(classes)


class MissingIdentityClass(SRingAxiomError):
    pass


class NotInverseClosed(SRingAxiomError):
    pass


class NotMultiplicativelyClosed(SRingAxiomError):
    pass


class NotASection(SchurError):
    pass


class InternalInvariantFailure(SchurError):
    """A computed object violates a property that must always hold."""


class IncompatibleSection(SchurError):
    pass


class QuotientMismatch(SchurError):
    pass


class NotAutomorphism(SchurError):
    pass


class NotWellDefined(SchurError):
    pass


class OutOfRange(SchurError):
    pass


class NoWitnessFound(SchurError):
    pass


class UndefinedRadical(SchurError):
    pass


class InvalidConnectionSet(SchurError):
    pass


class BudgetExceeded(SchurError):
    """A backtracking search ran past its node budget."""

    def __init__(self, message, nodes=0):
        super().__init__(message)
        self.nodes = nodes
