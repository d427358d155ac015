"""Nonunitary evolution and dual-eigenstate preparation.

A non-Hermitian Hamiltonian with a complex spectrum amplifies the
eigencomponent with the largest imaginary eigenvalue part, so long-time
evolution projects an initial state onto that eigenstate.  Evolving under
the rotated pair (alpha*H, -conj(alpha)*H^dag) prepares the right and left
eigenstates of the same targeted eigenvalue simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    ExceptionalPointError,
    PreparationError,
)
from . import linalg


@dataclass
class EvolutionResult:
    """Renormalized trajectory under exp(-iHt).

    ``log_norms[j]`` is the log of the accumulated norm-growth factor, so the
    unnormalized state is ``exp(log_norms[j]) * states[j]``.
    """

    times: np.ndarray
    states: np.ndarray  # (len(times), dim), each row unit norm
    populations: np.ndarray  # (len(times), dim)
    log_norms: np.ndarray
    fidelities: np.ndarray | None = None  # |<target|psi(t)>|^2 when a target is given

    def write_csv(self, path, header: str | None = None):
        dim = self.states.shape[1]
        with open(path, "w") as fh:
            if header:
                fh.write(f"# {header}\n")
            cols = ["t"] + [f"pop_{i}" for i in range(dim)] + ["fidelity", "norm_factor_log"]
            fh.write(",".join(cols) + "\n")
            for j, t in enumerate(self.times):
                fid = self.fidelities[j] if self.fidelities is not None else float("nan")
                pops = ",".join(f"{p:.17e}" for p in self.populations[j])
                fh.write(f"{t:.17e},{pops},{fid:.17e},{self.log_norms[j]:.17e}\n")


@dataclass
class DualPair:
    """Right/left eigenstates of the same eigenvalue, unit-normalized."""

    psi_r: np.ndarray
    psi_l: np.ndarray
    eigenvalue: complex
    overlap: complex  # <psi_l|psi_r>


def evolve(h, psi0, t_final: float, steps: int, target=None) -> EvolutionResult:
    """Evolve psi0 under exp(-iHt) on a uniform grid, renormalizing per step."""
    a = linalg.as_square(h)
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi.size != a.shape[0]:
        raise DimensionError("state dimension does not match the Hamiltonian")
    if t_final <= 0 or steps < 1:
        raise DomainError("need t_final > 0 and steps >= 1")
    if target is not None:
        target = np.asarray(target, dtype=complex).reshape(-1)
        target = target / np.linalg.norm(target)

    dt = t_final / steps
    prop = linalg.expm(-1j * a * dt)
    times = np.linspace(0.0, t_final, steps + 1)
    states = np.empty((steps + 1, psi.size), dtype=complex)
    log_norms = np.empty(steps + 1)
    log_norm = np.log(np.linalg.norm(psi))
    psi = psi / np.linalg.norm(psi)
    states[0] = psi
    log_norms[0] = log_norm
    for j in range(1, steps + 1):
        psi = prop @ psi
        nrm = np.linalg.norm(psi)
        log_norm += np.log(nrm)
        psi = psi / nrm
        states[j] = psi
        log_norms[j] = log_norm
    populations = np.abs(states) ** 2
    fidelities = None
    if target is not None:
        fidelities = np.abs(states @ target.conj()) ** 2
    return EvolutionResult(times, states, populations, log_norms, fidelities)


def select_alpha(e_plus: complex, e_minus: complex) -> complex:
    """Unit-modulus alpha maximizing Im{alpha*(e_plus - e_minus)}."""
    gap = e_plus - e_minus
    if abs(gap) < 1e-12:
        raise ExceptionalPointError("degenerate eigenvalues: cannot select alpha")
    return 1j * np.conj(gap) / abs(gap)


def prepare_dual_pair(
    h,
    t_final: float,
    steps: int = 1,
    alpha: complex | str = "auto",
    psi0=None,
) -> tuple[DualPair, EvolutionResult, EvolutionResult]:
    """Prepare right/left eigenstates by long-time evolution under the rotated pair.

    The right branch evolves under ``alpha*H``, the left under
    ``-conj(alpha)*H^dag``; both branches grow toward the eigenvalue with the
    largest Im{alpha*E}.  ``alpha="auto"`` (2x2 only) picks the rotation that
    maximizes the imaginary gap.  The initial state defaults to |0>.
    """
    a = linalg.as_square(h)
    dec = linalg.eig(a)
    if dec.degenerate:
        raise ExceptionalPointError("coalescing eigenvalues (exceptional point)")
    if isinstance(alpha, str):
        if alpha != "auto":
            raise DomainError(f"unknown alpha policy {alpha!r}")
        if a.shape[0] != 2:
            raise DomainError("alpha='auto' is only defined for 2x2 Hamiltonians")
        alpha = select_alpha(dec.values[0], dec.values[1])
    alpha = complex(alpha)

    rotated = alpha * dec.values
    order = np.argsort(-rotated.imag)
    target_idx = order[0]
    scale = max(np.abs(dec.values).max(), 1.0)
    if a.shape[0] > 1 and rotated.imag[order[0]] - rotated.imag[order[1]] < 1e-9 * scale:
        raise ExceptionalPointError("Im{alpha*E} is not uniquely maximal")
    energy = complex(dec.values[target_idx])
    v_r = dec.vectors[:, target_idx]

    dec_l = linalg.eig(a.conj().T)
    idx_l = int(np.argmin(np.abs(dec_l.values - np.conj(energy))))
    v_l = dec_l.vectors[:, idx_l]

    if psi0 is None:
        psi0 = np.zeros(a.shape[0], dtype=complex)
        psi0[0] = 1.0
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if abs(np.vdot(v_l, psi0)) < 1e-12:
        raise PreparationError("initial state has no weight on the targeted eigenstate")

    res_r = evolve(alpha * a, psi0, t_final, steps, target=v_r)
    res_l = evolve(-np.conj(alpha) * a.conj().T, psi0, t_final, steps, target=v_l)
    psi_r = res_r.states[-1]
    psi_l = res_l.states[-1]
    pair = DualPair(
        psi_r=psi_r,
        psi_l=psi_l,
        eigenvalue=energy,
        overlap=complex(np.vdot(psi_l, psi_r)),
    )
    return pair, res_r, res_l
