"""Error hierarchy shared by the whole package.

Every failure carries a machine-readable ``code`` so the CLI can map it to an
exit code, plus optional detail fields (source span, offending term, expected
and actual forms) that the reporting layer prints when present.
"""

from __future__ import annotations


class PiModuloError(Exception):
    code = "error"

    def __init__(self, message, *, span=None, term=None, expected=None, actual=None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.term = term
        self.expected = expected
        self.actual = actual

    def __str__(self):
        parts = [self.message]
        if self.span is not None:
            parts.insert(0, f"{self.span}:")
        if self.term is not None:
            parts.append(f"term: {self.term}")
        if self.expected is not None:
            parts.append(f"expected: {self.expected}")
        if self.actual is not None:
            parts.append(f"actual: {self.actual}")
        return " ".join(parts)


class ParseError(PiModuloError):
    code = "parse"


class UnboundVariable(PiModuloError):
    code = "unbound-variable"


class NotAFunction(PiModuloError):
    code = "not-a-function"


class DomainMismatch(PiModuloError):
    code = "domain-mismatch"


class IllegalSort(PiModuloError):
    code = "illegal-sort"


class TypeMismatch(PiModuloError):
    code = "type-mismatch"


class DuplicateName(PiModuloError):
    code = "duplicate-name"


class NotBetaNormal(PiModuloError):
    code = "not-beta-normal"


class NonAlgebraicLhs(PiModuloError):
    code = "non-algebraic-lhs"


class FuelError(PiModuloError):
    """Raised when a typing-level operation runs out of reduction fuel."""

    code = "fuel-exhausted"


class SizeTooLargeForExhaustive(PiModuloError):
    code = "size-too-large"


class SizeLimitExceeded(PiModuloError):
    code = "size-limit"


class UnenumerableUnion(PiModuloError):
    """A semantic value over the symbolic universe E was demanded pointwise."""

    code = "unenumerable-union"
