"""Swap-test circuit for generalized expectation values.

The circuit interferes two n-qubit states through an ancilla-controlled
register swap; ancilla-assisted product expectations then yield the complex
ratio ``<psi1|O|psi2> / <psi1|O'|psi2>`` component by component.

Register layout: qubits [0, n) hold system A (psi1), [n, 2n) hold system B
(psi2), qubit 2n is the ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionError, DomainError, OrthogonalStatesError
from .linalg import PAULIS, SIGMA_0, SIGMA_X, SIGMA_Y, as_square
from .statevector import GateOp, StateVector
from .readout import shot_expectation

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass
class GenExpResult:
    """Complex ratio estimate with per-component standard errors."""

    value: complex
    stderr: complex
    mode: str  # "exact" | "sampled"


_HADAMARD_GATES: dict[int, GateOp] = {}


def build_swap_test_state(psi1: StateVector, psi2: StateVector) -> StateVector:
    """Interfered state (|psi1,psi2,0> + |psi2,psi1,1>)/sqrt(2) on 2n+1 qubits."""
    if psi1.n_qubits != psi2.n_qubits:
        raise DomainError("input states must have the same qubit count")
    n = psi1.n_qubits
    gate = _HADAMARD_GATES.get(n)
    if gate is None:
        gate = _HADAMARD_GATES.setdefault(n, GateOp(HADAMARD, (2 * n,)))
    state = psi1.tensor(psi2).tensor(StateVector.zero(1))
    state = state.apply(gate)
    return state.controlled_register_swap(2 * n, range(n), range(n, 2 * n))


def _per_qubit_list(ops, n: int, name: str) -> list[np.ndarray]:
    mats = [as_square(o) for o in ops]
    if len(mats) != n:
        raise DimensionError(f"{name} must provide one 2x2 factor per qubit ({n})")
    return mats


def generalized_expectation(
    psi1: StateVector,
    psi2: StateVector,
    obs,
    obs_prime=None,
    shots: int | None = None,
    seed: int = 0,
    factored: bool = False,
) -> GenExpResult:
    """Complex ratio <psi1|O|psi2> / <psi1|O'|psi2> through the swap-test circuit.

    ``obs``/``obs_prime`` are per-qubit lists of 2x2 Hermitian factors;
    ``obs_prime`` defaults to the identity on every qubit.  With ``shots``
    unset the three underlying product expectations are evaluated exactly;
    otherwise each is estimated from an independent ``shots``-sized sample
    (seed stream derived from ``seed``) and the standard errors are
    propagated through the ratio.
    """
    return generalized_expectation_batch(
        psi1, psi2, [obs], obs_prime, shots=shots, seed=seed, factored=factored
    )[0]


def generalized_expectation_batch(
    psi1: StateVector,
    psi2: StateVector,
    obs_sets,
    obs_prime=None,
    shots: int | None = None,
    seed: int = 0,
    factored: bool = False,
) -> list[GenExpResult]:
    """Several generalized expectations sharing one O' and one circuit state.

    All readouts reuse the same interfered state |Psi_2|, mirroring the lab
    procedure where each observable only changes the basis rotation before
    counting.  In sampled mode the shared denominator is estimated once and
    each numerator gets its own seeds from the stream.
    """
    n = psi1.n_qubits
    o_lists = [_per_qubit_list(obs, n, "obs") for obs in obs_sets]
    op_list = _per_qubit_list(
        obs_prime if obs_prime is not None else [SIGMA_0] * n, n, "obs_prime"
    )
    psi = build_swap_test_state(psi1, psi2)
    ops_den = op_list + op_list + [SIGMA_X]

    if shots is None:
        den = psi.expectation(ops_den)
        if abs(den) < 1e-12:
            raise OrthogonalStatesError("<psi1|O'|psi2> vanishes; choose a different O'")
        out = []
        for o_list in o_lists:
            ex = psi.expectation(o_list + op_list + [SIGMA_X])
            ey = psi.expectation(o_list + op_list + [SIGMA_Y])
            out.append(GenExpResult(value=complex(ex, ey) / den, stderr=0j, mode="exact"))
        return out

    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(2 * len(o_lists) + 1)]
    den, sd = shot_expectation(psi, ops_den, shots, seeds[-1], factored=factored)
    if abs(den) < 3 * sd or abs(den) < 1e-12:
        raise OrthogonalStatesError(
            f"denominator {den:.3e} consistent with zero (stderr {sd:.3e}); "
            "choose a different O'"
        )
    out = []
    for i, o_list in enumerate(o_lists):
        ex, sx = shot_expectation(psi, o_list + op_list + [SIGMA_X], shots, seeds[2 * i], factored=factored)
        ey, sy = shot_expectation(psi, o_list + op_list + [SIGMA_Y], shots, seeds[2 * i + 1], factored=factored)
        err_re = math.hypot(sx / den, ex * sd / den**2)
        err_im = math.hypot(sy / den, ey * sd / den**2)
        out.append(
            GenExpResult(
                value=complex(ex, ey) / den, stderr=complex(err_re, err_im), mode="sampled"
            )
        )
    return out


def parse_observable_lines(lines) -> list[np.ndarray]:
    """Observable description: per qubit a named Pauli or 2x2 entries row-major.

    Matrix entries may be four complex literals (``1+0j``) or eight real
    numbers (re/im pairs).
    """
    ops = []
    for raw in lines:
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if len(tokens) == 1:
            name = tokens[0].upper()
            if name.startswith("SIGMA_"):
                name = name[len("SIGMA_"):] or name
            if name == "0":
                name = "I"
            if name not in PAULIS:
                raise DomainError(f"unknown Pauli name {tokens[0]!r}")
            ops.append(PAULIS[name])
        elif len(tokens) == 4:
            ops.append(np.array([complex(t) for t in tokens]).reshape(2, 2))
        elif len(tokens) == 8:
            vals = [float(t) for t in tokens]
            ops.append(
                np.array([complex(vals[i], vals[i + 1]) for i in range(0, 8, 2)]).reshape(2, 2)
            )
        else:
            raise DomainError(f"cannot parse observable line {raw!r}")
    return ops


def load_observables(path) -> list[np.ndarray]:
    with open(path) as fh:
        return parse_observable_lines(fh)
