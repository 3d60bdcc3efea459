"""Exception types shared across the engine."""

from __future__ import annotations


class AccessControlError(Exception):
    """Base class for every error raised by this package."""


class RvsSyntaxError(AccessControlError):
    """Malformed resource value specification text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ForestFormatError(AccessControlError):
    """Tree-definition document does not match the documented schema."""


class DuplicateSiblingError(ForestFormatError):
    """Two children of the same node share a name."""


class EmptyActionSetError(ForestFormatError):
    """A tree definition declares no actions."""


class RvsValidationError(AccessControlError):
    """A resource value specification does not fit the declared trees.

    ``segment_index`` is the zero-based index of the first offending segment
    (-1 when the problem is not tied to a particular segment).
    """

    def __init__(self, message: str, segment_index: int = -1):
        super().__init__(message)
        self.segment_index = segment_index


class UnknownTreeError(RvsValidationError):
    pass


class UnknownNodeError(RvsValidationError):
    pass


class NotAChildError(RvsValidationError):
    pass


class AmbiguousRootError(RvsValidationError):
    pass


class UndeclaredActionError(AccessControlError):
    """An action name is not in the application's declared action set."""


class TreeMismatchError(AccessControlError):
    """Built-in difference helpers got specs from two different trees."""


class MalformedIntervalError(AccessControlError):
    """An interval-annotated value does not parse as ``lo-hi``."""


class UnsoundCustomFunctionError(AccessControlError):
    """A custom difference function returned values outside the need."""


class UnknownApplicationError(AccessControlError):
    """No forest / registration exists for the named application."""


class NotFoundError(AccessControlError):
    """Lookup by id failed."""


class PermissionFunctionError(AccessControlError):
    """An application permission function misbehaved; callers fail closed."""


class SelectorSyntaxError(AccessControlError):
    """Malformed extended CSS selector."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class TemplateSyntaxError(AccessControlError):
    """Malformed resource value string specification."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class WebConfigFormatError(AccessControlError):
    """Web mapping configuration does not match the documented schema."""


class ExtractionError(AccessControlError):
    """Runtime value extraction from a DOM snapshot failed."""


class ServiceConfigError(AccessControlError):
    """Service configuration file is unusable."""
