"""Exception hierarchy shared by the library modules and the commands."""


class LabError(Exception):
    """Base class; ``exit_code`` is what the command line reports."""

    exit_code = 4

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class InvalidInput(LabError, ValueError):
    exit_code = 3


class DomainError(InvalidInput):
    """Gauge evaluated outside its declared domain."""


class InvalidInterval(InvalidInput):
    pass


class UnsupportedGauge(InvalidInput):
    pass


class PartialDomain(InvalidInput):
    """Disc reaches the boundary of the curve family's domain."""


class NoPoint(InvalidInput):
    pass


class NotInAsymptoticRegime(InvalidInput):
    pass


class NotStolz(InvalidInput):
    pass


class SingularPoint(InvalidInput):
    pass


class BoundViolation(LabError):
    exit_code = 2


class HypothesisFail(BoundViolation):
    pass


class NumericFailure(LabError):
    exit_code = 4
