"""Exception types shared across the package."""


class NanophraseError(ValueError):
    """Base class for all errors raised by this package."""


class NonGauss(NanophraseError):
    """A letter does not occur exactly twice."""


class UnknownSymbol(NanophraseError):
    """A projection target (or letter) is not declared."""


class PhraseSyntaxError(NanophraseError):
    """Malformed phrase or triple text.

    ``position`` is the character offset of the offending token, when known.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class IndexOutOfRange(NanophraseError, IndexError):
    pass


class InvalidTriple(NanophraseError):
    pass


class EmptyAlpha(NanophraseError):
    pass


class StaleSite(NanophraseError):
    """A move site does not match the phrase it is applied to."""


class SNotEmpty(NanophraseError):
    pass


class SNotDiagonal(NanophraseError):
    pass


class MixedTriple(NanophraseError):
    """Group elements from different triples were combined."""


class MalformedSupport(NanophraseError):
    pass


class SideConditionViolated(NanophraseError):
    pass


class ComponentNotEmpty(NanophraseError):
    pass


class UnitFactorization(NanophraseError):
    pass


class FactorOutOfRange(NanophraseError, IndexError):
    pass


class PrimeTriple(NanophraseError):
    """The invariant is trivial for prime triples and is refused."""


class BudgetRefused(NanophraseError):
    pass
