"""Exact n-qubit statevector engine.

Conventions (fixed project-wide):

* qubit 0 is the *most significant* bit of the basis-state label, so the
  amplitude of ``|b0 b1 ... b_{n-1}>`` lives at index
  ``b0*2^{n-1} + ... + b_{n-1}``;
* every stochastic operation takes an explicit integer seed and is
  bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, NumericalError, PostselectionError
from . import linalg

_NORM_TOL = 1e-10


@dataclass
class GateOp:
    """A unitary acting on an ordered tuple of target qubits.

    The first target corresponds to the most significant bit of the gate
    matrix index, consistent with the global qubit convention.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self):
        self.matrix = linalg.as_square(self.matrix)
        self.targets = tuple(self.targets)
        dim = self.matrix.shape[0]
        if dim != 2 ** len(self.targets):
            raise DimensionError(
                f"gate dimension {dim} does not match {len(self.targets)} target(s)"
            )
        if not linalg.is_unitary(self.matrix, _NORM_TOL):
            raise DomainError("gate matrix is not unitary")


def _apply_matrix(amps: np.ndarray, n: int, mat: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    """Apply an arbitrary (not necessarily unitary) matrix on target qubits."""
    k = len(targets)
    t = amps.reshape([2] * n)
    t = np.moveaxis(t, targets, range(k))
    t = (mat @ t.reshape(2**k, -1)).reshape([2] * k + [2] * (n - k))
    t = np.moveaxis(t, range(k), targets)
    return np.ascontiguousarray(t).reshape(-1)


@dataclass
class SampleResult:
    """Joint bitstring counts plus per-qubit marginals from one sampling run."""

    shots: int
    seed: int
    counts: dict[str, int]
    marginals: list[tuple[int, int]]

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(f"shots {self.shots} seed {self.seed}\n")
            for bits in sorted(self.counts):
                fh.write(f"{bits} {self.counts[bits]}\n")

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            header = fh.readline().split()
            shots, seed = int(header[1]), int(header[3])
            counts = {}
            n = 0
            for line in fh:
                bits, c = line.split()
                counts[bits] = int(c)
                n = len(bits)
        marg = _marginals_from_counts(counts, n)
        return cls(shots=shots, seed=seed, counts=counts, marginals=marg)


def _marginals_from_counts(counts: dict[str, int], n_qubits: int) -> list[tuple[int, int]]:
    marg = []
    for q in range(n_qubits):
        n0 = sum(c for bits, c in counts.items() if bits[q] == "0")
        n1 = sum(c for bits, c in counts.items() if bits[q] == "1")
        marg.append((n0, n1))
    return marg


@dataclass
class StateVector:
    """Amplitudes of an n-qubit register."""

    n_qubits: int
    amplitudes: np.ndarray
    normalized: bool = field(default=True)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_qubits < 1:
            raise DimensionError("need at least one qubit")
        if self.amplitudes.size != 2**self.n_qubits:
            raise DimensionError(
                f"expected {2**self.n_qubits} amplitudes, got {self.amplitudes.size}"
            )
        if self.normalized and abs(self.norm() - 1.0) > _NORM_TOL:
            raise DomainError(f"state is not normalized: |psi| = {self.norm():.12f}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, bits: str) -> "StateVector":
        if len(bits) != n_qubits:
            raise DimensionError("bitstring length mismatch")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(n_qubits, amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(
            self.n_qubits + other.n_qubits,
            np.kron(self.amplitudes, other.amplitudes),
            normalized=self.normalized and other.normalized,
        )

    # -- basics ------------------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()

    def _check_targets(self, targets):
        if len(set(targets)) != len(targets):
            raise IndexError(f"duplicate target qubits: {targets}")
        for q in targets:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"qubit {q} out of range for {self.n_qubits} qubits")

    # -- operations --------------------------------------------------------

    def apply(self, gate: GateOp) -> "StateVector":
        self._check_targets(gate.targets)
        amps = _apply_matrix(self.amplitudes, self.n_qubits, gate.matrix, gate.targets)
        return StateVector(self.n_qubits, amps, normalized=self.normalized)

    def apply_matrix(self, matrix, targets) -> "StateVector":
        """Apply a general (possibly nonunitary) matrix; result is unnormalized."""
        self._check_targets(tuple(targets))
        mat = linalg.as_square(matrix)
        if mat.shape[0] != 2 ** len(targets):
            raise DimensionError("matrix dimension does not match target count")
        amps = _apply_matrix(self.amplitudes, self.n_qubits, mat, tuple(targets))
        return StateVector(self.n_qubits, amps, normalized=False)

    def controlled_register_swap(self, control: int, reg_a, reg_b) -> "StateVector":
        """Swap registers A and B conditioned on the control qubit being |1>."""
        reg_a, reg_b = tuple(reg_a), tuple(reg_b)
        if len(reg_a) != len(reg_b):
            raise IndexError("registers must have equal length")
        all_targets = (control,) + reg_a + reg_b
        self._check_targets(all_targets)
        n = self.n_qubits
        idx = np.arange(2**n)
        cmask = (idx >> (n - 1 - control)) & 1
        swapped = idx.copy()
        for a, b in zip(reg_a, reg_b):
            sa, sb = n - 1 - a, n - 1 - b
            diff = ((swapped >> sa) & 1) ^ ((swapped >> sb) & 1)
            swapped ^= (diff << sa) | (diff << sb)
        source = np.where(cmask == 1, swapped, idx)
        return StateVector(n, self.amplitudes[source], normalized=self.normalized)

    def expectation(self, per_qubit_ops) -> float:
        """<psi| O_0 x O_1 x ... |psi> for one 2x2 Hermitian factor per qubit."""
        ops = [linalg.as_square(o) for o in per_qubit_ops]
        if len(ops) != self.n_qubits:
            raise DimensionError(f"need one operator per qubit ({self.n_qubits})")
        for o in ops:
            if o.shape != (2, 2):
                raise DimensionError("expectation factors must be 2x2")
            if not linalg.is_hermitian(o):
                raise DomainError("expectation factor is not Hermitian")
        phi = self.amplitudes
        for q, o in enumerate(ops):
            if o[0, 0] == 1 and o[1, 1] == 1 and o[0, 1] == 0 and o[1, 0] == 0:
                continue  # identity factor
            phi = _apply_matrix(phi, self.n_qubits, o, (q,))
        val = np.vdot(self.amplitudes, phi)
        if abs(val.imag) > 1e-10 * max(abs(val), 1.0):
            raise NumericalError(f"expectation has imaginary residue {val.imag:.3e}")
        return float(val.real)

    def sample(self, shots: int, seed: int) -> SampleResult:
        """Draw i.i.d. bitstrings from |amplitude|^2; deterministic given seed."""
        if shots < 1:
            raise DomainError("shots must be >= 1")
        rng = np.random.default_rng(seed)
        hits = rng.multinomial(shots, self.probabilities())
        counts = {
            format(i, f"0{self.n_qubits}b"): int(c) for i, c in enumerate(hits) if c > 0
        }
        return SampleResult(
            shots=shots,
            seed=seed,
            counts=counts,
            marginals=_marginals_from_counts(counts, self.n_qubits),
        )

    def postselect(self, qubit: int, outcome: int) -> tuple["StateVector", float]:
        """Project a qubit onto |outcome> and renormalize."""
        self._check_targets((qubit,))
        if outcome not in (0, 1):
            raise DomainError("outcome must be 0 or 1")
        n = self.n_qubits
        idx = np.arange(2**n)
        keep = ((idx >> (n - 1 - qubit)) & 1) == outcome
        proj = np.where(keep, self.amplitudes, 0.0)
        prob = float(np.linalg.norm(proj) ** 2)
        if prob < 1e-14:
            raise PostselectionError(
                f"outcome {outcome} on qubit {qubit} has probability {prob:.3e}"
            )
        return StateVector(n, proj / np.sqrt(prob)), prob

    # -- file format -------------------------------------------------------

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"nqubits {self.n_qubits}\n")
            for a in self.amplitudes:
                fh.write(f"{a.real:.17e} {a.imag:.17e}\n")

    @classmethod
    def load(cls, path) -> "StateVector":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 2 or header[0] != "nqubits":
                raise DomainError(f"bad state file header in {path}")
            n = int(header[1])
            amps = np.array(
                [complex(float(re), float(im)) for re, im in (ln.split() for ln in fh)]
            )
        return cls(n, amps)
