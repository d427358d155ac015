"""Nonreciprocal SSH model: Bloch / non-Bloch Hamiltonians and analytic oracles.

The two-band Hamiltonian is ``H = d . sigma`` with a complex field d.
Under periodic boundaries d is a function of the real momentum k; under
open boundaries the momentum circle is replaced by the generalized
Brillouin zone ``beta = r e^{ik}`` with r set by the hopping asymmetry.
All energies are in units of the inter-cell hopping t2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExceptionalPointError, PhaseBoundaryError
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class SSHParams:
    """Hopping parameters t1 +- delta (intra-cell) and t2 (inter-cell)."""

    t1: float
    delta: float
    t2: float = 1.0
    bc: str = "pbc"

    def __post_init__(self):
        if self.t2 <= 0:
            raise DomainError("t2 must be positive")
        if self.bc not in ("pbc", "obc"):
            raise DomainError(f"bc must be 'pbc' or 'obc', got {self.bc!r}")
        if self.bc == "obc" and abs(abs(self.t1) - abs(self.delta)) < 1e-12:
            raise DomainError("open boundaries require |t1| != |delta| (finite GBZ radius)")


@dataclass(frozen=True)
class DVector:
    dx: complex
    dy: complex
    dz: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.dz])

    def dot(self) -> complex:
        return self.dx**2 + self.dy**2 + self.dz**2

    def matrix(self) -> np.ndarray:
        return self.dx * SIGMA_X + self.dy * SIGMA_Y + self.dz * SIGMA_Z


def d_bloch(k: float, p: SSHParams) -> DVector:
    """d(k) = (t1 + t2 cos k, t2 sin k - i delta, 0)."""
    return DVector(
        dx=p.t1 + p.t2 * np.cos(k),
        dy=p.t2 * np.sin(k) - 1j * p.delta,
    )


def gbz_radius(p: SSHParams) -> float:
    """GBZ radius r = sqrt|(t1+delta)/(t1-delta)|."""
    if abs(abs(p.t1) - abs(p.delta)) < 1e-12:
        raise DomainError("GBZ radius degenerate: |t1| == |delta|")
    return float(np.sqrt(abs((p.t1 + p.delta) / (p.t1 - p.delta))))


def d_nonbloch(k: float, p: SSHParams) -> DVector:
    """d(beta) with beta = r e^{ik} on the generalized Brillouin zone."""
    beta = gbz_radius(p) * np.exp(1j * k)
    return DVector(
        dx=p.t1 + (beta + 1 / beta) * p.t2 / 2,
        dy=(beta - 1 / beta) * p.t2 / (2j) - 1j * p.delta,
    )


def d_vector(k: float, p: SSHParams) -> DVector:
    return d_bloch(k, p) if p.bc == "pbc" else d_nonbloch(k, p)


def hamiltonian(k: float, p: SSHParams) -> np.ndarray:
    return d_vector(k, p).matrix()


def band_energy(d: DVector) -> complex:
    """Upper-band energy +sqrt(d.d), principal branch (Re >= 0)."""
    return complex(np.sqrt(d.dot()))


def analytic_texture(d: DVector, ep_tol: float = 1e-12) -> np.ndarray:
    """Biorthogonal spin texture n = d / sqrt(d.d) for the upper band.

    Principal complex square root (Re >= 0); the branch choice flips n as a
    whole and cancels in every exported ratio (phi, winding).
    """
    dd = d.dot()
    scale = max(float(np.abs(d.as_array()).max()), 1.0)
    if abs(dd) <= ep_tol * scale**2:
        raise ExceptionalPointError("d.d = 0: exceptional point")
    return d.as_array() / np.sqrt(dd)


def expected_winding(p: SSHParams, boundary_tol: float = _BOUNDARY_TOL) -> float:
    """Phase-regime classification (0, 1/2 or 1) from the hopping parameters."""
    t1, dl, t2 = abs(p.t1), abs(p.delta), abs(p.t2)
    if p.bc == "pbc":
        if abs(t1 + dl - t2) < boundary_tol or abs(abs(t1 - dl) - t2) < boundary_tol:
            raise PhaseBoundaryError("parameters on a Bloch phase boundary")
        if t1 + dl < t2:
            return 1.0
        if abs(t1 - dl) < t2:
            return 0.5
        return 0.0
    if abs(abs(p.t1**2 - p.delta**2) - p.t2**2) < boundary_tol:
        raise PhaseBoundaryError("parameters on the non-Bloch phase boundary")
    return 1.0 if abs(p.t1**2 - p.delta**2) < p.t2**2 else 0.0
