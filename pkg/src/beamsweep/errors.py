"""Exception types mapped to CLI exit codes (config -> 1, contract -> 2)."""


class ConfigError(ValueError):
    """Caller-supplied configuration or input is invalid."""


class ContractViolation(RuntimeError):
    """An internal consistency requirement was broken."""
