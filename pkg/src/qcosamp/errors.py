"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class QCoSampError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    kind = "error"


class ValidationError(QCoSampError, ValueError):
    """Input violates a documented precondition or file schema."""

    exit_code = 2
    kind = "schema"


class RangeError(ValidationError, IndexError):
    """A qubit index, basis index or register value is out of range."""


class UnsupportedModeError(ValidationError):
    """An encoding mode is not valid for the requested operation."""


class OutOfRangeError(ValidationError):
    """A Fourier coefficient pair lies outside the reachable disk."""


class GuardrailError(QCoSampError):
    """A request exceeds the desk-scale resource limits."""

    exit_code = 3
    kind = "guardrail"


class NumericalInvariantError(QCoSampError):
    """A numerical identity that must hold by construction was violated."""

    exit_code = 4
    kind = "invariant"
    kind = "invariant"
