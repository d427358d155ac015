"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class DomainError(ValueError):
    """Input violates a mathematical precondition (e.g. not Hermitian)."""


class NumericalError(RuntimeError):
    """A numerical routine failed (overflow, loss of precision, no convergence)."""


class PostselectionError(RuntimeError):
    """Requested measurement outcome has (numerically) zero probability."""


class OrthogonalStatesError(RuntimeError):
    """The scaling denominator <psi1|O'|psi2> vanishes; pick a different O'."""


class ExceptionalPointError(RuntimeError):
    """Eigenvalues/eigenvectors coalesce; the biorthogonal construction breaks down."""


class PreparationError(RuntimeError):
    """The initial state has no component on the targeted eigenstate."""


class DilationValidityError(RuntimeError):
    """M(t) - I lost positive definiteness; eta0/b need adjusting."""


class AmbiguousBranchError(RuntimeError):
    """A phase increment sits exactly on the branch cut; increase the sampling density."""


class PhaseBoundaryError(ValueError):
    """Parameters sit on (or too close to) a topological phase boundary."""
