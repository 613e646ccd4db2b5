class ConfigurationError(ValueError):
    """Invalid experiment or sampling parameters."""


class ContractViolation(ValueError):
    """A caller broke an operation's precondition (bad coordinate, blocked goal, ...)."""
