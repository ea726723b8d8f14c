"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class ContractError(RuntimeError):
    """A caller violated an operation's precondition."""


class DomainError(ValueError):
    """An argument lies outside the mathematically valid domain."""


class NumericError(ArithmeticError):
    """Non-finite values where finite ones are required."""


class NotReadyError(RuntimeError):
    """Requested data is not available yet (e.g. replay buffer too small)."""


class CheckpointError(RuntimeError):
    """Checkpoint file is missing, corrupt, or inconsistent with the config."""
