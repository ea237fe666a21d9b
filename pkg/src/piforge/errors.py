"""Exception types raised by piforge."""


class PiForgeError(Exception):
    """Base class for all piforge errors."""


class ContractError(PiForgeError, ValueError):
    """An operation was called outside its contract (bad magnifier, negative operand...)."""


class BudgetError(PiForgeError, ValueError):
    """The requested computation cannot be given a provable error budget."""


class ConfigurationError(PiForgeError, ValueError):
    """A user-supplied configuration is inconsistent (e.g. too few guard digits)."""


class CheckpointError(PiForgeError):
    """A checkpoint file is corrupt or belongs to a different run."""
