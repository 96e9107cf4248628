"""Exception types raised across the package."""

from __future__ import annotations


class DiracPolarError(Exception):
    """Base class for every error raised by diracpolar."""


class NonRealBilinear(DiracPolarError, ValueError):
    pass


class SingularSpinor(DiracPolarError, ValueError):
    """The spinor has Theta^2 + Phi^2 ~ 0 and admits no polar form."""


class InvalidPolarData(DiracPolarError, ValueError):
    pass


class NotSpinGroup(DiracPolarError, ValueError):
    pass


class ParseError(DiracPolarError, ValueError):
    """Malformed field expression.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class OutOfDomain(DiracPolarError, ValueError):
    pass


class DegenerateTetrad(DiracPolarError, ValueError):
    pass


class NotKilling(DiracPolarError, ValueError):
    pass


class NotWeaklyInvariant(DiracPolarError, ValueError):
    pass


class InvalidScenario(DiracPolarError, ValueError):
    pass
