"""Exception types raised by the simulator."""

import numpy as np


class ConfigError(ValueError):
    """Invalid scenario or search configuration."""


class DomainError(ValueError):
    """Input outside the domain of a physical model (zero distance, zero channel, ...)."""


class ContractError(ValueError):
    """Array shapes or power constraints do not match the operation's contract."""


class SingularChannelError(np.linalg.LinAlgError):
    """Effective channel is rank deficient, so zero-forcing is undefined."""


class SearchRefused(RuntimeError):
    """Exhaustive search space exceeds the configured limit."""
