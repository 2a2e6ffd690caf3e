"""Exception hierarchy for stepcat."""


class StepcatError(Exception):
    pass


class DomainError(StepcatError, ValueError):
    """Argument outside the domain of a formula (negative, non-finite, ...)."""


class ClassificationError(StepcatError, TypeError):
    """Schedule carries the wrong classification tag for an operation."""


class CertificateError(StepcatError):
    """A certificate identity failed; indicates a construction bug."""


class ConsistencyError(StepcatError):
    """Two independent constructions of the same object disagree."""


class ConjectureViolation(StepcatError):
    """Midpoint-split sums disagree with the full dynamic program."""

    def __init__(self, n, midpoint, full):
        self.n = n
        self.midpoint = midpoint
        self.full = full
        super().__init__(
            f"midpoint split disagrees with full DP at n={n}: {midpoint!r} vs {full!r}"
        )


class RangeError(StepcatError, ValueError):
    """A sum table does not cover the requested index range."""


class TightnessError(StepcatError):
    """Worst-case Huber run did not attain the bound."""


class DivergenceError(StepcatError, FloatingPointError):
    def __init__(self, index, message="non-finite value or gradient"):
        self.index = index
        super().__init__(f"{message} at iterate {index}")


class CapabilityError(StepcatError):
    """Oracle lacks data (e.g. minimizer) needed for a computation."""
