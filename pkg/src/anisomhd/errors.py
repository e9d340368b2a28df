"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value; the message names the offending key."""


class VacuumProximityError(RuntimeError):
    """min(density) dropped to or below 0.1; the small-data regime is lost."""


class CFLViolationError(RuntimeError):
    """Time step too large for the advective CFL estimate."""
