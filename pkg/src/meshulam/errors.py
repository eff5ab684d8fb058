"""Exception hierarchy shared by every module of the package."""


class MeshulamError(Exception):
    """Base class for all errors raised by this package."""


class MalformedSpec(MeshulamError, ValueError):
    pass


class NotPrimePower(MeshulamError, ValueError):
    pass


class ShapeMismatch(MeshulamError, ValueError):
    pass


class LevelMismatch(MeshulamError, ValueError):
    pass


class OutOfRange(MeshulamError, ValueError):
    pass


class GroupTooLarge(MeshulamError):
    pass


class SingularTransform(MeshulamError, ValueError):
    pass


class BadSizes(MeshulamError, ValueError):
    pass


class SideConditionViolated(MeshulamError, ValueError):
    pass


class UnsupportedGroup(MeshulamError):
    pass


class NotDiagonalForm(MeshulamError, ValueError):
    pass


class FullRank(MeshulamError):
    pass


class EmptyRowSet(MeshulamError, ValueError):
    pass


class InvariantViolation(MeshulamError):
    """A proven mathematical property failed at runtime.

    ``payload`` carries a JSON-serialisable counterexample.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}
