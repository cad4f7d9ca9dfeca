"""Exception hierarchy shared by the engine, the settings layer and the CLI."""


class AromaKitError(Exception):
    """Base class for every domain error raised by aromakit."""


class ForestSyntaxError(AromaKitError):
    """Raised when a forest string does not follow the grammar.

    Args:
        message: What went wrong
        position: Offset in the input string where parsing stopped
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ForestLabelError(AromaKitError):
    """Covertex labels are duplicated, missing, or collide."""


class GradeError(AromaKitError):
    """An operation received forms of the wrong or of mixed (n, p) grade."""


class PreconditionError(AromaKitError):
    """An operator precondition does not hold for the given input."""


class InconsistentSystemError(AromaKitError):
    """A linear system has no solution."""


class VerificationError(AromaKitError):
    """A property check or certificate failed."""


class ConfigError(AromaKitError):
    """Settings or input payloads could not be validated."""
