"""Exception hierarchy shared by every module of the package."""


class EigenlabError(ValueError):
    """Base class for all validation failures raised by eigenlab."""


class NegativeEntry(EigenlabError):
    pass


class SizeCapExceeded(EigenlabError):
    pass


class NotAState(EigenlabError):
    pass


class NotHermitian(EigenlabError):
    pass


class NotPSD(EigenlabError):
    pass


class DimMismatch(EigenlabError):
    pass


class ShapeMismatch(EigenlabError):
    pass


class BadSpectrum(EigenlabError):
    pass


class TraceMismatch(EigenlabError):
    pass


class SpanDeficient(EigenlabError):
    pass


class NotFaithful(EigenlabError):
    pass


class BadDim(EigenlabError):
    pass


class NotInvariant(EigenlabError):
    pass


class NotUnital(EigenlabError):
    pass


class BadArgs(EigenlabError):
    pass


class WindowOutOfRange(EigenlabError):
    pass


class ParseError(EigenlabError):
    """Malformed list or matrix file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
