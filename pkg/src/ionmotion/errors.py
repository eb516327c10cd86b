class DomainError(ValueError):
    """An argument lies outside the domain of a physical formula."""


class TruncationError(ArithmeticError):
    """Population leaked into the top of the truncated Fock space."""

    def __init__(self, message, leakage=None, suggested_dim=None):
        super().__init__(message)
        self.leakage = leakage
        self.suggested_dim = suggested_dim


class IntegrationError(RuntimeError):
    """The fixed-step integrator failed to converge under step halving."""


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path
