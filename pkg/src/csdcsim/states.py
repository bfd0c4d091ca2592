"""Dense statevector simulation of small labeled-qubit registers.

Conventions used throughout the package:

* Qubit 0 of a register is the most significant bit of the amplitude
  index, so the amplitude at index ``i`` belongs to the basis string
  ``format(i, f"0{n}b")`` read left to right.
* Computational outcome 0 means |0>, outcome 1 means |1>.  Diagonal
  outcome 0 means |+> = (|0>+|1>)/sqrt(2), outcome 1 means |->.
* Measuring removes the measured qubit(s) from the register, because
  the protocol never reuses a measured photon.  ``collapse_qubit`` is
  the one exception: it models measure-and-resend, leaving the qubit
  behind in the sampled eigenstate.
* Bell outcomes are stated against ordered pairs: PSI_PLUS on (a, b)
  is (|0_a 1_b> + |1_a 0_b>)/sqrt(2), and likewise for the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12

_SQRT_HALF = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class QubitId:
    """Label for one photon: its triplet number and its role in that triplet.

    The protocol uses roles "h" (home), "t" (travel), "c1".."ck"
    (control, one per controller) and "e" (eavesdropper ancilla); the
    simulator itself accepts any role string.
    """

    triplet: int
    role: str

    def __str__(self) -> str:
        return f"{self.role}{self.triplet}"


class Gate(Enum):
    """Single-qubit operations used by the protocol."""

    IDENTITY = "I"
    PAULI_X = "X"
    MINUS_I_PAULI_Y = "-iY"
    PAULI_Z = "Z"
    HADAMARD = "H"

    @property
    def matrix(self) -> np.ndarray:
        return _GATE_MATRICES[self]


def _frozen(rows) -> np.ndarray:
    arr = np.array(rows, dtype=complex)
    arr.flags.writeable = False
    return arr


_GATE_MATRICES = {
    Gate.IDENTITY: _frozen([[1, 0], [0, 1]]),
    Gate.PAULI_X: _frozen([[0, 1], [1, 0]]),
    Gate.MINUS_I_PAULI_Y: _frozen([[0, -1], [1, 0]]),
    Gate.PAULI_Z: _frozen([[1, 0], [0, -1]]),
    Gate.HADAMARD: _frozen([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]]),
}

for _gate, _m in _GATE_MATRICES.items():
    assert np.allclose(_m.conj().T @ _m, np.eye(2)), _gate


class MeasurementBasis(Enum):
    COMPUTATIONAL = "Z"
    DIAGONAL = "X"

    @property
    def vectors(self) -> np.ndarray:
        """Rows are the outcome eigenvectors, outcome 0 first."""
        return _BASIS_VECTORS[self]


_BASIS_VECTORS = {
    MeasurementBasis.COMPUTATIONAL: _frozen([[1, 0], [0, 1]]),
    MeasurementBasis.DIAGONAL: _frozen([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]]),
}


class BellOutcome(Enum):
    PSI_PLUS = "PSI+"
    PSI_MINUS = "PSI-"
    PHI_PLUS = "PHI+"
    PHI_MINUS = "PHI-"

    @property
    def vector(self) -> np.ndarray:
        """Amplitudes over the two-bit index of the ordered pair."""
        return _BELL_MATRIX[_BELL_INDEX[self]]


BELL_OUTCOMES: tuple[BellOutcome, ...] = tuple(BellOutcome)

# Rows follow BELL_OUTCOMES order; columns are |00>, |01>, |10>, |11>.
_BELL_MATRIX = _frozen(
    [
        [0, _SQRT_HALF, _SQRT_HALF, 0],
        [0, _SQRT_HALF, -_SQRT_HALF, 0],
        [_SQRT_HALF, 0, 0, _SQRT_HALF],
        [_SQRT_HALF, 0, 0, -_SQRT_HALF],
    ]
)
_BELL_INDEX = {outcome: k for k, outcome in enumerate(BELL_OUTCOMES)}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over an ordered register of labeled qubits."""

    qubits: tuple[QubitId, ...]
    amps: np.ndarray

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError("duplicate qubit ids in register")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << len(qubits):
            raise ValueError(
                f"amplitude length {amps.shape[0]} does not match {len(qubits)} qubit(s)"
            )
        norm = float(np.linalg.norm(amps))
        if norm <= ATOL:
            raise ValueError("state vector has zero norm")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def index_of(self, qubit: QubitId) -> int:
        try:
            return self.qubits.index(qubit)
        except ValueError:
            raise ValueError(f"qubit {qubit} is not in this register") from None

    def amplitude(self, bits: str) -> complex:
        """Amplitude of the computational basis string (qubit 0 leftmost)."""
        if len(bits) != self.num_qubits or set(bits) - {"0", "1"}:
            raise ValueError(f"expected a {self.num_qubits}-bit string, got {bits!r}")
        return complex(self.amps[int(bits, 2)]) if bits else complex(self.amps[0])


def make_state(qubits: Iterable[QubitId], amplitudes: Sequence[complex]) -> StateVector:
    """Build a normalized state; rejects zero vectors and length mismatches."""
    return StateVector(tuple(qubits), np.asarray(amplitudes, dtype=complex))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if set(a.qubits) & set(b.qubits):
        raise ValueError("tensor operands share qubit ids")
    return StateVector(a.qubits + b.qubits, np.kron(a.amps, b.amps))


def reorder(state: StateVector, new_order: Sequence[QubitId]) -> StateVector:
    """Permute the register; the amplitude layout follows the new order."""
    new_order = tuple(new_order)
    if set(new_order) != set(state.qubits) or len(new_order) != state.num_qubits:
        raise ValueError("new order must be a permutation of the register")
    perm = [state.index_of(q) for q in new_order]
    psi = state.amps.reshape([2] * state.num_qubits).transpose(perm)
    return StateVector(new_order, psi.reshape(-1))


def apply_gate(state: StateVector, gate: Gate, target: QubitId) -> StateVector:
    j = state.index_of(target)
    n = state.num_qubits
    psi = np.moveaxis(state.amps.reshape([2] * n), j, 0)
    psi = np.tensordot(gate.matrix, psi, axes=([1], [0]))
    psi = np.moveaxis(psi, 0, j)
    return StateVector(state.qubits, psi.reshape(-1))


def apply_cnot(state: StateVector, control: QubitId, target: QubitId) -> StateVector:
    if control == target:
        raise ValueError("control and target must differ")
    i, j = state.index_of(control), state.index_of(target)
    n = state.num_qubits
    psi = np.moveaxis(state.amps.reshape([2] * n), (i, j), (0, 1))
    out = psi.copy()
    out[1, 0] = psi[1, 1]
    out[1, 1] = psi[1, 0]
    out = np.moveaxis(out, (0, 1), (i, j))
    return StateVector(state.qubits, out.reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> for states over the identical ordered register."""
    if a.qubits != b.qubits:
        raise ValueError("inner product requires identical registers")
    return complex(np.vdot(a.amps, b.amps))


def _partition(state: StateVector, targets: Sequence[QubitId]) -> tuple[np.ndarray, tuple[QubitId, ...]]:
    """Reshape to (2**k, rest) with the k targets as leading axes."""
    idx = [state.index_of(q) for q in targets]
    n = state.num_qubits
    moved = np.moveaxis(state.amps.reshape([2] * n), idx, range(len(idx)))
    remaining = tuple(q for q in state.qubits if q not in targets)
    return moved.reshape(1 << len(idx), -1), remaining


def _sample(rng: np.random.Generator, probs: Sequence[float]) -> int:
    """Born sampling; a branch with exactly zero probability is never chosen."""
    r = float(rng.random())
    acc = 0.0
    last = -1
    for k, p in enumerate(probs):
        if p <= 0.0:
            continue
        acc += p
        last = k
        if r < acc:
            return k
    if last < 0:
        raise ValueError("no branch has positive probability")
    return last


def _branch_probs(branches: np.ndarray) -> list[float]:
    return [float(np.real(np.vdot(row, row))) for row in branches]


def measure_qubit(
    state: StateVector,
    target: QubitId,
    basis: MeasurementBasis,
    rng: np.random.Generator,
) -> tuple[int, StateVector]:
    """Projective measurement; the measured qubit leaves the register."""
    mat, remaining = _partition(state, (target,))
    branches = basis.vectors.conj() @ mat
    k = _sample(rng, _branch_probs(branches))
    return k, StateVector(remaining, branches[k])


def collapse_qubit(
    state: StateVector,
    target: QubitId,
    basis: MeasurementBasis,
    rng: np.random.Generator,
) -> tuple[int, StateVector]:
    """Measure-and-resend: the qubit stays, reset to the sampled eigenstate."""
    j = state.index_of(target)
    mat, _ = _partition(state, (target,))
    branches = basis.vectors.conj() @ mat
    k = _sample(rng, _branch_probs(branches))
    eig = basis.vectors[k]
    post = np.outer(eig, branches[k]).reshape([2] * state.num_qubits)
    post = np.moveaxis(post, 0, j)
    return k, StateVector(state.qubits, post.reshape(-1))


def measure_bell(
    state: StateVector,
    pair: tuple[QubitId, QubitId],
    rng: np.random.Generator,
) -> tuple[BellOutcome, StateVector]:
    """Bell measurement on the ordered pair; both qubits leave the register."""
    a, b = pair
    if a == b:
        raise ValueError("bell pair must be two distinct qubits")
    mat, remaining = _partition(state, (a, b))
    branches = _BELL_MATRIX.conj() @ mat
    k = _sample(rng, _branch_probs(branches))
    return BELL_OUTCOMES[k], StateVector(remaining, branches[k])
