"""Exception hierarchy shared by the analysis, synthesis and I/O layers."""

from __future__ import annotations


class NtlError(Exception):
    """Base class for every error raised by ntlf."""


class InvalidArgumentError(NtlError, ValueError):
    """An argument violates a documented precondition."""


class OutOfRangeError(InvalidArgumentError):
    """A normalized width falls outside the microstrip model's validity window."""


class UnreachableImpedanceError(InvalidArgumentError):
    """No width inside the validity window produces the requested impedance."""

    def __init__(self, z_target: float, interval: tuple[float, float]):
        self.z_target = z_target
        self.interval = interval
        lo, hi = interval
        super().__init__(
            f"impedance {z_target:g} ohm is unreachable; "
            f"achievable interval is [{lo:.6g}, {hi:.6g}] ohm"
        )


class InsufficientGridError(InvalidArgumentError):
    """The frequency grid has no sample inside a band that must be checked."""


class SingularNetworkError(NtlError, ArithmeticError):
    """The S-parameter denominator vanished."""


class ConfigError(NtlError):
    """Base class for job configuration problems."""


class ConfigParseError(ConfigError):
    """The configuration document does not follow the schema."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ConfigValidationError(ConfigError):
    """The configuration parsed but its values break an invariant."""
