"""Exception types shared across the package."""


class AddCombError(Exception):
    """Base class for all package errors."""


class EmptySet(AddCombError, ValueError):
    pass


class DimensionMismatch(AddCombError, ValueError):
    pass


class ResourceLimit(AddCombError, RuntimeError):
    """Raised when an exact computation would exceed its work budget."""

    def __init__(self, what: str, max_n: int | None = None, detail: str = ""):
        msg = f"{what} exceeds the work budget"
        if max_n is not None:
            msg += f" (feasible max n = {max_n})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.max_n = max_n


class DegenerateAgreement(AddCombError, ValueError):
    pass


class FormatError(AddCombError, ValueError):
    """Malformed `.fn`, `.set` or quadratic-form JSON input."""

    def __init__(self, msg: str, line: int | None = None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line
