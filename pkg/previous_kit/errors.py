"""Toolkit error hierarchy.

Every error carries the process exit status the CLI reports for it:
1 for domain errors, 2 for I/O or format errors.
"""


class ToolkitError(Exception):
    """Base toolkit error."""

    exit_code = 1

    def __init__(self, message, exit_code=None, payload=None):
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload

    def to_dict(self):
        """Convert error to dictionary."""
        rv = {'error': self.message}
        if self.payload:
            rv['details'] = self.payload
        return rv


class FormatError(ToolkitError):
    """Malformed input file."""
    exit_code = 2


class NetworkParseError(FormatError):
    """Network document could not be parsed."""


class ValidationError(ToolkitError):
    """Network violates structural invariants."""


class ShapeError(ToolkitError):
    """Shape inference failed.

    `rule` names the violated validation rule.
    """

    def __init__(self, message, rule='nonpositive-dim', layer=None):
        super().__init__(message, payload={'rule': rule, 'layer': layer})
        self.rule = rule
        self.layer = layer


class CycleError(ToolkitError):
    """Layer graph contains a cycle."""

    def __init__(self, members):
        self.members = list(members)
        super().__init__(f"cycle detected: {' -> '.join(self.members)}", payload={'members': self.members})


class MetricsOverflowError(ToolkitError):
    """A layer count does not fit in 64 bits."""


class ConfigurationError(ToolkitError):
    """Invalid generator or device parameters."""


class ProfilingError(ToolkitError):
    """Profiling artifacts are inconsistent."""


class TraceTooShortError(ProfilingError):
    """Power trace ends before the schedule does."""


class BurstNotFoundError(ProfilingError):
    """No burst found within the slack window."""


class WindowError(ProfilingError):
    """Sample window cannot be integrated."""


class FitError(ToolkitError):
    """Regression could not be fitted."""


class ModelMismatchError(ToolkitError):
    """Model applied to a layer of another kind."""


class MissingModelError(ToolkitError):
    """Bundle has no model for a layer kind."""
