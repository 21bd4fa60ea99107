"""Exception hierarchy."""


class OptosteerError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(OptosteerError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class NotStable(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class StepTooLarge(NumericalError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class NotSymmetric(NumericalError, ValueError):
    pass


class NotPSD(NumericalError, ValueError):
    pass


class SpectrumNotReal(NumericalError):
    pass


class SingularXBlock(NumericalError):
    pass


class NotHermitian(NumericalError, ValueError):
    pass


class Unphysical(NumericalError):
    """The covariance matrix violates the uncertainty relation."""


class ParseError(OptosteerError, ValueError):
    """Malformed config or covariance-matrix file."""

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
            if lineno is not None:
                where += f"{lineno}:"
            where += " "
        super().__init__(where + message)


class UnknownPredicate(OptosteerError, KeyError):
    pass


class UnknownColumn(OptosteerError, KeyError):
    pass
