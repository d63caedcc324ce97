"""Exception hierarchy shared by all mbarnes modules."""


class MBError(Exception):
    """Base class for every error raised by mbarnes."""


class ParseError(MBError):
    def __init__(self, message, pos=None):
        self.message = message
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}")


class UnassignedSymbolError(MBError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"symbol {name!r} has no value in the assignment")

    def __str__(self):
        return self.args[0]


class SingularBaseError(MBError):
    """A power base evaluates to (numerically) zero."""


class PoleError(MBError):
    """A gamma function is evaluated at a nonpositive integer."""


class ShapeMismatch(MBError):
    """An integrand does not fit a lemma template."""


class ConstraintViolation(ShapeMismatch):
    """The template fits except for a linear constraint; ``residual`` is the difference."""

    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(message)


class NoMatch(MBError):
    def __init__(self, reasons):
        self.reasons = dict(reasons)
        lines = [f"{rule}: {why}" for rule, why in self.reasons.items()]
        super().__init__("no lemma matches:\n  " + "\n  ".join(lines))


class StripError(MBError):
    """No admissible straight contour, or the abscissa lies outside it."""


class PinchError(MBError):
    """A pole lies on (or within 1e-8 of) the integration line."""


class DivergenceError(MBError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class RefinementError(MBError):
    """Quadrature could not reach the requested tolerance."""
