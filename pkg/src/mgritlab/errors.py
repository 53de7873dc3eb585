"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run configuration is inconsistent or out of range."""


class ParseError(ConfigError):
    """A config file could not be parsed.

    Carries the offending line number and key so callers can point at the
    exact spot in the file.
    """

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DimensionError(ValueError):
    """Array shapes or component counts do not match."""


class PhysicalStateError(ValueError):
    """A state leaves the model's admissible set (e.g. negative depth,
    density, or pressure)."""
