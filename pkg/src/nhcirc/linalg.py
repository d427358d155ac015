"""Dense complex small-matrix primitives.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)`` with
``complex128`` entries.  Only small dimensions (d <= 8) are needed by the
rest of the package; ``expm`` has a closed-form fast path for d = 2 since
two-level propagators dominate the runtime of the sweep pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, NumericalError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULIS = {"I": SIGMA_0, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

# Norm threshold above which exp(m) overflows double precision.
_EXPM_NORM_LIMIT = 700.0


def as_square(m) -> np.ndarray:
    """Validate and return ``m`` as a square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


# Frobenius norm throughout: cheap, and an upper bound on the spectral norm,
# so tolerance checks stay conservative.
def _scale(a: np.ndarray) -> float:
    return max(np.linalg.norm(a), 1.0)


def is_hermitian(m, tol: float = 1e-10) -> bool:
    a = as_square(m)
    return np.linalg.norm(a - a.conj().T) <= tol * _scale(a)


def is_unitary(m, tol: float = 1e-10) -> bool:
    a = as_square(m)
    return np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])) <= tol * _scale(a)


def is_positive_definite(m, tol: float = 1e-10) -> bool:
    a = as_square(m)
    if not is_hermitian(a, tol):
        return False
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return w.min() > -tol * _scale(a)


@dataclass
class EigenDecomposition:
    """Right eigenpairs sorted by descending Im, ties by descending Re.

    ``vectors[:, i]`` is the unit-norm right eigenvector of ``values[i]``.
    ``degenerate`` flags a pair of eigenvalues closer than
    ``degeneracy_tol * ||m||``; callers decide whether that is an
    exceptional point.
    """

    values: np.ndarray
    vectors: np.ndarray
    degenerate: bool

    def pairs(self):
        return [(self.values[i], self.vectors[:, i]) for i in range(len(self.values))]


def eig(m, degeneracy_tol: float = 1e-9, residual_tol: float = 1e-12) -> EigenDecomposition:
    """Eigendecomposition with a deterministic eigenvalue ordering."""
    a = as_square(m)
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.lexsort((-w.real, -w.imag))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    scale = _scale(a)
    resid = np.linalg.norm(a @ v - v * w, axis=0).max()
    if resid > residual_tol * scale:
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds {residual_tol:.1e}*||m||")
    dists = np.abs(w[:, None] - w[None, :])[np.triu_indices(len(w), k=1)]
    degenerate = bool(len(dists) and dists.min() < degeneracy_tol * scale)
    return EigenDecomposition(values=w, vectors=v, degenerate=degenerate)


def _expm_2x2(a: np.ndarray) -> np.ndarray:
    # exp(mu*I + A) with A traceless: A^2 = s^2 I, so
    # exp = e^mu (cosh(s) I + sinh(s)/s A).
    mu = a.trace() / 2
    b = a - mu * np.eye(2)
    s2 = b[0, 0] ** 2 + b[0, 1] * b[1, 0]
    s = np.sqrt(s2)
    if abs(s) < 1e-4:
        # series for sinh(s)/s, accurate to ~1e-16 at |s| = 1e-4
        sinhc = 1.0 + s2 / 6.0 + s2 * s2 / 120.0
        cosh = 1.0 + s2 / 2.0 + s2 * s2 / 24.0
    else:
        sinhc = np.sinh(s) / s
        cosh = np.cosh(s)
    return np.exp(mu) * (cosh * np.eye(2) + sinhc * b)


def expm(m) -> np.ndarray:
    """Matrix exponential ``e^m`` for small dense complex matrices."""
    a = as_square(m)
    norm = np.linalg.norm(a)
    if not np.isfinite(norm) or norm > _EXPM_NORM_LIMIT:
        raise NumericalError(f"expm overflow risk: ||m|| = {norm:.3e}")
    if a.shape[0] == 1:
        return np.exp(a)
    if a.shape[0] == 2:
        return _expm_2x2(a)
    return scipy.linalg.expm(a)


def sqrtm_pd(m, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a Hermitian positive-definite matrix."""
    a = as_square(m)
    scale = _scale(a)
    if np.linalg.norm(a - a.conj().T) > tol * scale:
        raise DomainError("sqrtm_pd requires a Hermitian matrix")
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    if w.min() < -tol * scale:
        raise DomainError(f"sqrtm_pd requires positive definiteness; min eigenvalue {w.min():.3e}")
    s = v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return (s + s.conj().T) / 2
