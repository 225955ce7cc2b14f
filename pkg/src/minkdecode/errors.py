"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a contract: domain, shape, parity, or file format."""


class DataFormatError(ValidationError):
    """A data file is malformed. Message names the file and line."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class SolverError(RuntimeError):
    """Root solver failed to converge; carries the last iterate and residual."""

    def __init__(self, message: str, last_iterate: float, residual: float):
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__(
            f"{message} (last iterate {last_iterate!r}, residual {residual!r})"
        )
