"""Unitary dilation of nonunitary 2-level dynamics.

The nonunitary evolution under ``H' = alpha*H - i*b*I`` is embedded into
unitary dynamics of a Hermitian two-block Hamiltonian
``Hcal(t) = Lambda(t) (x) I + Gamma(t) (x) sigma_z`` on system + ancilla.
The system trajectory is recovered by rotating the ancilla and
postselecting |0>.

Composite ordering: dilated index = 2*system_index + ancilla_bit
(system (x) ancilla).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DilationValidityError, DomainError, NumericalError
from . import linalg
from .linalg import SIGMA_0, SIGMA_Z, expm, sqrtm_pd


@dataclass
class DilationParams:
    eta0: float
    b: float
    alpha: complex = 1.0 + 0j
    t_final: float = 10.0
    steps: int = 10_000

    def __post_init__(self):
        if self.eta0 <= 0:
            raise DomainError("eta0 must be positive")
        if self.steps < 10:
            raise DomainError("need at least 10 steps")
        if self.t_final <= 0:
            raise DomainError("t_final must be positive")
        self.alpha = complex(self.alpha)


@dataclass
class DilationSchedule:
    """Per-step dilation operators on a uniform time grid."""

    times: np.ndarray
    lam: np.ndarray  # (n, d, d) Lambda(t)
    gam: np.ndarray  # (n, d, d) Gamma(t)
    m: np.ndarray  # (n, d, d) M(t)
    eta: np.ndarray  # (n, d, d)
    hcal: np.ndarray  # (n, 2d, 2d) dilated Hamiltonian
    hermiticity_residuals: np.ndarray
    min_eigs: np.ndarray  # smallest eigenvalue of M(t) - I per step
    valid: bool = field(default=True)

    def write_csv(self, path, header: str | None = None):
        paulis = [SIGMA_0, linalg.SIGMA_X, linalg.SIGMA_Y, SIGMA_Z]
        with open(path, "w") as fh:
            if header:
                fh.write(f"# {header}\n")
            fh.write(
                "t,Lambda_0,Lambda_x,Lambda_y,Lambda_z,"
                "Gamma_0,Gamma_x,Gamma_y,Gamma_z,minEig(M-I)\n"
            )
            for j, t in enumerate(self.times):
                lam_c = [np.trace(self.lam[j] @ s).real / 2 for s in paulis]
                gam_c = [np.trace(self.gam[j] @ s).real / 2 for s in paulis]
                row = [t, *lam_c, *gam_c, self.min_eigs[j]]
                fh.write(",".join(f"{x:.17e}" for x in row) + "\n")


def _eta_dot(eta: np.ndarray, m_dot: np.ndarray) -> np.ndarray:
    # dM/dt = eta deta/dt + deta/dt eta; solve the Sylvester equation in the
    # eigenbasis of the Hermitian eta.
    w, v = np.linalg.eigh((eta + eta.conj().T) / 2)
    b = v.conj().T @ m_dot @ v
    denom = w[:, None] + w[None, :]
    return v @ (b / denom) @ v.conj().T


def _assemble(h: np.ndarray, p: DilationParams, times: np.ndarray, derivative: str):
    """Evaluate M, eta, Lambda, Gamma, Hcal on an arbitrary uniform time grid."""
    d = h.shape[0]
    hp = p.alpha * h - 1j * p.b * np.eye(d)
    hp_dag = hp.conj().T
    n = len(times)
    dt = times[1] - times[0] if n > 1 else p.t_final / p.steps

    m0_scale = 1.0 + p.eta0**2
    step_g = expm(-1j * hp_dag * dt)
    g = expm(-1j * hp_dag * times[0])
    m = np.empty((n, d, d), dtype=complex)
    for j in range(n):
        mj = m0_scale * (g @ g.conj().T)
        m[j] = (mj + mj.conj().T) / 2
        g = step_g @ g

    eye = np.eye(d)
    min_eigs = np.empty(n)
    eta = np.empty_like(m)
    for j in range(n):
        a = m[j] - eye
        min_eigs[j] = np.linalg.eigvalsh(a).min()
        if min_eigs[j] <= 0:
            raise DilationValidityError(
                f"M(t) - I loses positive definiteness at t = {times[j]:.6g} "
                f"(min eigenvalue {min_eigs[j]:.3e}); adjust eta0/b"
            )
        eta[j] = sqrtm_pd(a)

    eta_dot = np.empty_like(eta)
    if derivative == "analytic":
        for j in range(n):
            m_dot = -1j * (hp_dag @ m[j] - m[j] @ hp)
            eta_dot[j] = _eta_dot(eta[j], m_dot)
    elif derivative == "fd":
        if n < 3:
            raise DomainError("finite-difference derivative needs at least 3 grid points")
        eta_dot[1:-1] = (eta[2:] - eta[:-2]) / (2 * dt)
        eta_dot[0] = (eta[1] - eta[0]) / dt
        eta_dot[-1] = (eta[-1] - eta[-2]) / dt
    else:
        raise DomainError(f"unknown derivative scheme {derivative!r}")

    lam = np.empty_like(m)
    gam = np.empty_like(m)
    hcal = np.empty((n, 2 * d, 2 * d), dtype=complex)
    residuals = np.empty(n)
    for j in range(n):
        m_inv = np.linalg.inv(m[j])
        lam[j] = (hp + (1j * eta_dot[j] + eta[j] @ hp) @ eta[j]) @ m_inv
        gam[j] = 1j * (hp @ eta[j] - eta[j] @ hp - 1j * eta_dot[j]) @ m_inv
        hcal[j] = np.kron(lam[j], SIGMA_0) + np.kron(gam[j], SIGMA_Z)
        residuals[j] = np.linalg.norm(hcal[j] - hcal[j].conj().T)
    return lam, gam, m, eta, hcal, residuals, min_eigs


def build_schedule(h, p: DilationParams, derivative: str = "analytic") -> DilationSchedule:
    """Dilation operators for H'(t) = alpha*H - i*b*I on the [0, T] grid.

    ``derivative`` selects how d(eta)/dt is computed: ``"analytic"`` solves
    the Sylvester equation fed by the closed-form dM/dt (machine-precision
    Hermiticity of the dilated Hamiltonian), ``"fd"`` uses central finite
    differences on the grid (residual scales with the step squared).
    """
    a = linalg.as_square(h)
    times = np.linspace(0.0, p.t_final, p.steps + 1)
    lam, gam, m, eta, hcal, residuals, min_eigs = _assemble(a, p, times, derivative)
    return DilationSchedule(
        times=times,
        lam=lam,
        gam=gam,
        m=m,
        eta=eta,
        hcal=hcal,
        hermiticity_residuals=residuals,
        min_eigs=min_eigs,
    )


@dataclass
class DilatedRun:
    times: np.ndarray
    states: np.ndarray  # (n, d) postselected, unit norm
    success_probs: np.ndarray

    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2


# ancilla rotations: X/Y(theta) = exp(-i theta sigma_{x,y} / 2)
def _ancilla_rot(theta: float, axis) -> np.ndarray:
    return expm(-0.5j * theta * axis)


def run_dilated(
    psi0, h, p: DilationParams, derivative: str = "analytic"
) -> DilatedRun:
    """Unitary dilated evolution with per-grid-time ancilla readout.

    The ancilla starts in |0>, is rotated by Y(2*arctan(eta0)) then X(pi/2)
    onto (|-> + eta0 |+>)/sqrt(1+eta0^2); each step applies
    exp(-i Hcal(t_mid) dt); at every grid time X(-pi/2) maps |->,|+> onto
    |0>,|1> and projecting the ancilla on |0> recovers the system state.
    """
    a = linalg.as_square(h)
    d = a.shape[0]
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi.size != d:
        raise DomainError("initial state dimension mismatch")
    psi = psi / np.linalg.norm(psi)

    times = np.linspace(0.0, p.t_final, p.steps + 1)
    dt = times[1] - times[0]
    mid_times = times[:-1] + dt / 2
    _, _, _, _, hcal_mid, _, _ = _assemble(a, p, mid_times, derivative)

    theta = 2.0 * math.atan(p.eta0)
    anc = _ancilla_rot(math.pi / 2, linalg.SIGMA_X) @ _ancilla_rot(theta, linalg.SIGMA_Y) @ np.array([1.0, 0.0])
    readout = np.kron(np.eye(d), _ancilla_rot(-math.pi / 2, linalg.SIGMA_X))

    state = np.kron(psi, anc)
    states = np.empty((p.steps + 1, d), dtype=complex)
    probs = np.empty(p.steps + 1)

    def _postselect(dilated, j):
        rotated = readout @ dilated
        proj = rotated[0::2]  # ancilla bit 0
        prob = float(np.linalg.norm(proj) ** 2)
        if prob < 1e-12:
            raise NumericalError(f"postselection probability {prob:.3e} at t = {times[j]:.6g}")
        states[j] = proj / math.sqrt(prob)
        probs[j] = prob

    _postselect(state, 0)
    for j in range(p.steps):
        hj = (hcal_mid[j] + hcal_mid[j].conj().T) / 2
        w, v = np.linalg.eigh(hj)
        state = v @ (np.exp(-1j * w * dt) * (v.conj().T @ state))
        _postselect(state, j + 1)
    return DilatedRun(times=times, states=states, success_probs=probs)
