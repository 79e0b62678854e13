"""Exception types shared across the library."""


class PreconditionViolated(ValueError):
    """An argument fails the defining condition of the requested operation."""


class NoSquareRoot(ValueError):
    """Modular square root requested for a quadratic non-residue."""


class NotSquarefree(ValueError):
    """Input has a repeated prime factor where a squarefree value is required."""


class CompositeResidualFactor(RuntimeError):
    """Factorization gave up with a composite cofactor left over."""


class NotSplit(ValueError):
    """Rational prime does not split in the requested extension."""


class NotCoprime(ValueError):
    """Symbol numerator shares a factor with the modulus."""


class NoNegativeNormUnit(ValueError):
    """The real quadratic field has no unit of norm -1."""


class LocalObstruction(ValueError):
    """A ternary form has no nontrivial zero over some completion."""

    def __init__(self, place, message=None):
        self.place = place
        super().__init__(message or f"no nontrivial solution over the completion at {place}")


class HeightExceeded(RuntimeError):
    """Solution search exhausted its height bound."""


class IterationLimitExceeded(RuntimeError):
    """An iterative routine hit its safety cap."""


class OutOfScopeM(ValueError):
    """The unit-index verdict is only defined for the two largest split counts."""


class TheoryViolation(RuntimeError):
    """A numeric fact the underlying theory guarantees failed to hold.

    Raised instead of silently producing wrong output; scan drivers catch
    these, record them per prime, and surface them in reports.
    """


class NoDecomposition(TheoryViolation):
    """No kernel vector yields a globally solvable two-block splitting of d."""


class NormalizationFailed(TheoryViolation):
    """A ternary solution could not be brought to the normalized shape."""


class NonRealSymbolProduct(TheoryViolation):
    """A quartic-symbol product that must be real came out imaginary."""
