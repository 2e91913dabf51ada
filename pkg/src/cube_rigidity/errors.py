"""Exception hierarchy shared by the library and the CLI.

Every error carries a stable machine-readable ``code`` (the class name).
``ValidationError`` subclasses mean the input violated a precondition
(CLI exit code 2); ``RefusalError`` subclasses mean the input was valid
but the computation was declined (CLI exit code 3).
"""

from __future__ import annotations


class CubeRigidityError(Exception):
    code = "CubeRigidityError"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


class ValidationError(CubeRigidityError):
    pass


class RefusalError(CubeRigidityError):
    pass


class DisconnectedGraph(ValidationError):
    pass


class NonpositiveMeasure(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class DuplicateVertex(ValidationError):
    pass


class UnknownVertex(ValidationError):
    pass


class NotAnEdge(ValidationError):
    pass


class NonUnitMeasure(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class MalformedGraph(ValidationError):
    pass


class DomainMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class SpectralMismatch(ValidationError):
    pass


class NotDistanceTwo(ValidationError):
    pass


class DegreeExceedsLevel(ValidationError):
    pass


class NonpositiveK(ValidationError):
    pass


class GraphTooLarge(RefusalError):
    pass


class TooLargeForExact(RefusalError):
    pass


class NotAHypercube(RefusalError):
    pass


class SingularRestrictionMap(RefusalError):
    pass
