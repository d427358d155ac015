"""Shot-based estimation of multi-qubit product observables.

A single-qubit Hermitian observable is split as ``d.sigma + d0*I``; a
basis-change rotation maps ``d.sigma`` onto ``|d| sigma_z`` so the
observable reduces to counting 0/1 outcomes per qubit.  Product
observables over a register are estimated from joint bitstring counts.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, as_square, expm, is_hermitian
from .statevector import StateVector

_ZERO_TOL = 1e-12


@dataclass
class ObservableDecomposition:
    """Pauli coefficients of a 2x2 Hermitian observable."""

    d_vec: np.ndarray
    d0: float

    @property
    def d_norm(self) -> float:
        return float(np.linalg.norm(self.d_vec))


def decompose(obs, tol: float = 1e-10) -> ObservableDecomposition:
    """Pauli decomposition d_i = Tr(obs sigma_i)/2, d0 = Tr(obs)/2."""
    a = as_square(obs)
    if a.shape != (2, 2):
        raise DomainError("decompose expects a 2x2 observable")
    if not is_hermitian(a, tol):
        raise DomainError("observable is not Hermitian")
    d = np.array(
        [
            np.trace(a @ SIGMA_X).real / 2,
            np.trace(a @ SIGMA_Y).real / 2,
            np.trace(a @ SIGMA_Z).real / 2,
        ]
    )
    return ObservableDecomposition(d_vec=d, d0=float(np.trace(a).real / 2))


def rotation_for(dec: ObservableDecomposition) -> np.ndarray:
    """Unitary U with U (d.sigma) U^dag = |d| sigma_z.

    Counterclockwise rotation by theta = arccos(d_hat . z_hat) about the
    axis d_hat x z_hat.  For d antiparallel to z the axis is degenerate and
    is fixed to +y.
    """
    if dec.d_norm <= _ZERO_TOL:
        raise DomainError("rotation undefined for a pure-identity observable")
    dhat = dec.d_vec / dec.d_norm
    cos_theta = np.clip(dhat[2], -1.0, 1.0)
    theta = math.acos(cos_theta)
    if theta < 1e-14:
        return np.eye(2, dtype=complex)
    axis = np.cross(dhat, [0.0, 0.0, 1.0])
    if np.linalg.norm(axis) < 1e-14:  # d parallel to -z
        axis = np.array([0.0, 1.0, 0.0])
    else:
        axis = axis / np.linalg.norm(axis)
    gen = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return expm(-0.5j * theta * gen)


def shot_expectation(
    state: StateVector,
    obs_per_qubit,
    shots: int,
    seed: int,
    factored: bool = False,
) -> tuple[float, float]:
    """Estimate <psi| O_0 x ... x O_{n-1} |psi> from sampled bitstrings.

    Each qubit is rotated into the sigma_z eigenbasis of its observable and
    the register is sampled once.  The default estimator forms the per-shot
    product of ``d*(+-1) + d0`` over qubits from joint bitstrings, which is
    exact for correlated registers; ``factored=True`` instead multiplies the
    per-qubit marginal means (the product formula of the counting protocol,
    exact only for product-form outcome statistics).

    Returns (estimate, standard error).
    """
    decs = [decompose(o) for o in obs_per_qubit]
    if len(decs) != state.n_qubits:
        raise DomainError("need one observable per qubit")
    rotated = state
    for q, dec in enumerate(decs):
        if dec.d_norm > _ZERO_TOL:
            rotated = rotated.apply_matrix(rotation_for(dec), (q,))
    res = StateVector(state.n_qubits, rotated.amplitudes).sample(shots, seed)

    if factored:
        est, var = 1.0, 0.0
        for q, dec in enumerate(decs):
            n0, n1 = res.marginals[q]
            mean_z = (n0 - n1) / shots
            factor = dec.d_norm * mean_z + dec.d0
            var_z = max(1.0 - mean_z**2, 0.0) / shots
            # first-order error propagation through the product
            var = var * factor**2 + (dec.d_norm**2 * var_z) * est**2 + var * dec.d_norm**2 * var_z
            est *= factor
        return est, math.sqrt(var)

    values, weights = [], []
    for bits, count in res.counts.items():
        v = 1.0
        for q, dec in enumerate(decs):
            sign = 1.0 if bits[q] == "0" else -1.0
            v *= dec.d_norm * sign + dec.d0
        values.append(v)
        weights.append(count)
    values = np.asarray(values)
    weights = np.asarray(weights, dtype=float)
    mean = float(np.sum(weights * values) / shots)
    if shots > 1:
        var = float(np.sum(weights * (values - mean) ** 2) / (shots - 1))
        stderr = math.sqrt(var / shots)
    else:
        stderr = 0.0
    return mean, stderr
