"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    pass


class ResolutionError(ValueError):
    """Quadrature too coarse for the requested number of modes."""


class DomainError(ValueError):
    """A free-energy derivative was requested outside its domain."""


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.message = message
        self.key = key
        self.line = line


class SolverError(RuntimeError):
    """Time integration failed; ``last_state`` is the last valid state, if any."""

    def __init__(self, message, last_state=None, residual=None):
        super().__init__(message)
        self.last_state = last_state
        self.residual = residual


class SingularStateError(SolverError):
    pass
