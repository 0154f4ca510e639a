"""Exception types shared across the package."""


class CgLabError(Exception):
    """Base class for all cglab errors."""


class DimensionMismatchError(CgLabError):
    """Operands have incompatible shapes."""


class NotPositiveDefiniteError(CgLabError):
    """A matrix required to be strictly positive definite is not."""


class HermitianContractError(CgLabError):
    """Input violates the Hermitian-symmetry tolerance."""


class NumericalError(CgLabError):
    """An iterative numerical procedure failed to converge; carries diagnostics."""


class NotConvergedError(CgLabError):
    """A residual threshold was never reached; carries the final ratio."""

    def __init__(self, message: str, final_ratio: float):
        super().__init__(message)
        self.final_ratio = final_ratio


class InvalidSpecError(CgLabError):
    """A parameter object fails its own validity constraints."""


class DomainError(CgLabError):
    """A scalar argument lies outside a function's mathematical domain."""


class FitError(CgLabError):
    """Least-squares design is singular or otherwise unusable."""


class PlanParseError(CgLabError):
    """A plan or result file is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
