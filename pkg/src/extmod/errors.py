"""Exception hierarchy shared by all modules."""


class ExtmodError(Exception):
    """Base class for every error raised by this package."""


class LengthMismatch(ExtmodError, ValueError):
    pass


class SpecMismatch(ExtmodError, ValueError):
    pass


class InvalidWeights(ExtmodError, ValueError):
    pass


class NotExtensionDatum(ExtmodError, ValueError):
    pass


class IndexNotInI(ExtmodError, ValueError):
    pass


class NotPositive(ExtmodError, ValueError):
    pass


class NotEffective(ExtmodError, ValueError):
    pass


class PowerOutOfRange(ExtmodError, ValueError):
    pass


class NotInjective(ExtmodError, ValueError):
    pass


class WrongCase(ExtmodError, ValueError):
    pass


class ConditionsFailed(ExtmodError):
    def __init__(self, failed):
        self.failed = tuple(failed)
        super().__init__("conditions failed: " + ", ".join(self.failed))


class InternalError(ExtmodError, RuntimeError):
    pass


class MalformedRepresentation(ExtmodError, ValueError):
    pass
