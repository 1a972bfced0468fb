"""This module contains the exceptions raised by pshlab.

Operational errors derive from :class:`PshlabError` directly. Mathematical
failures (a field violating a hypothesis a construction needs) derive from
:class:`MathematicalFailure` and carry a witness which can be re-evaluated.
"""

from typing import Optional, Sequence


class PshlabError(Exception):
    """Base class of all errors raised by pshlab."""


### EXPRESSIONS ###
# region
class DslSyntaxError(PshlabError):
    def __init__(self, message: str, source: str, position: int):
        """Raised if a DSL text does not conform to the grammar.

        Args:
            message (str): What went wrong.
            source (str): The complete DSL text.
            position (int): The character offset of the offending token.
        """
        self.source = source
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} (at position {position})\n{source}\n{pointer}")


class UnboundParameterError(PshlabError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"The parameter '${name}' is not bound.")


class DomainError(PshlabError):
    def __init__(self, node, reason: str, point: Optional[Sequence[float]] = None):
        """Raised if a node is evaluated outside of its domain.

        Args:
            node: The offending expression node.
            reason (str): A short description, e.g. "ln of non-positive value".
            point (Sequence[float], optional): The first offending point. Defaults to None.
        """
        self.node = node
        self.reason = reason
        self.point = None if point is None else tuple(float(c) for c in point)
        at = "" if self.point is None else f" at {self.point}"
        super().__init__(f"{reason} in node '{node.op}'{at}.")


class OrderLimitError(PshlabError):
    pass


class ExpressionTooLarge(PshlabError):
    pass


# endregion

### GEOMETRY ###
# region
class DegenerateGradientError(PshlabError):
    def __init__(self, point: Sequence[float]):
        self.point = tuple(float(c) for c in point)
        super().__init__(f"The gradient of the defining function vanishes at {self.point}.")


class PreconditionError(PshlabError):
    pass


class OffBoundaryError(PreconditionError):
    def __init__(self, point: Sequence[float], value: float, tol: float):
        self.point = tuple(float(c) for c in point)
        self.value = float(value)
        super().__init__(
            f"Point {self.point} is not on the boundary (|r| = {abs(value):.3e} > {tol:.1e})."
        )


class ProjectionError(PshlabError):
    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class NormalizationError(PshlabError):
    pass


class EmptySampleError(PshlabError):
    pass


class DegenerateInputError(PshlabError):
    pass


class CurveBranchError(PshlabError):
    pass


class UnknownGalleryError(PshlabError):
    pass


class ConfigError(PshlabError):
    pass


# endregion

### MATHEMATICAL FAILURES ###
# region
class MathematicalFailure(PshlabError):
    def __init__(self, message: str, point: Sequence[float], value: float):
        self.point = tuple(float(c) for c in point)
        self.value = float(value)
        super().__init__(f"{message} Witness {self.point} with value {self.value:.6e}.")


class StrictType4Violation(MathematicalFailure):
    pass


class TypeExceeds4(MathematicalFailure):
    pass


# endregion
