"""Exception hierarchy.

``DomainVerdict`` subclasses are mathematical outcomes (the input is outside
the regime an operation handles); the CLI maps them to exit status 2.
Everything else derived from ``AlmostRedError`` is an input problem.
"""


class AlmostRedError(Exception):
    pass


class InvalidInput(AlmostRedError, ValueError):
    pass


class NonFinite(InvalidInput):
    pass


class InsufficientDepth(InvalidInput):
    pass


class OutsideStrip(InvalidInput):
    pass


class SingularMatrix(InvalidInput):
    pass


class NotMultiple(InvalidInput):
    pass


class InvalidConfig(InvalidInput):
    pass


class UnknownCommand(InvalidInput):
    pass


class DomainVerdict(AlmostRedError):
    """A structured mathematical verdict rather than a malformed input."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update({k: _plain(v) for k, v in self.details.items()})
        return out


class NoConvergence(DomainVerdict):
    pass


class CoincidentDirections(DomainVerdict):
    pass


class WeakHyperbolicity(DomainVerdict):
    pass


class DegenerateRadius(DomainVerdict):
    pass


class NonConstantTwist(DomainVerdict):
    pass


class NotNearRotation(DomainVerdict):
    pass


class SmallDivisor(DomainVerdict):
    pass


class WindingObstruction(DomainVerdict):
    pass


class WeakSymmetricAngle(DomainVerdict):
    pass


class DomainError(DomainVerdict):
    pass


def _plain(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if hasattr(v, "tolist"):
        return v.tolist()
    return v
