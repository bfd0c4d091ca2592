"""Eavesdropping models for the travel-photon channel.

Two independent routes to the detection probability are kept on
purpose: ``detection_oracle`` enumerates every branch of the attacked
checking round exactly (over plain arrays, not the simulator's state
machinery), while ``estimate_detection`` runs full Monte Carlo
sessions.  Tests require the two to agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .states import (
    MeasurementBasis,
    QubitId,
    StateVector,
    apply_cnot,
    collapse_qubit,
    make_state,
    tensor,
)
from .protocol import ProtocolConfig, Session

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class BasisStrategy(Enum):
    """How an intercepting eavesdropper picks her measurement basis."""

    RANDOM = "random"  # fresh uniform choice of Z or X per photon
    ALWAYS_Z = "z"
    ALWAYS_X = "x"


@dataclass(frozen=True)
class EveTap:
    """What the eavesdropper did to one travel photon in transit."""

    triplet: int
    basis: str | None = None
    outcome: int | None = None
    probe: str | None = None

    def detail(self) -> str:
        if self.probe is not None:
            return f"triplet={self.triplet} probe={self.probe}"
        return f"triplet={self.triplet} basis={self.basis} outcome={self.outcome}"


@dataclass(frozen=True)
class NoAttack:
    """Identity tap: the channel is untouched."""

    label: str = "none"

    def tap(self, qubit: QubitId, state: StateVector, rng: np.random.Generator):
        return state, None


@dataclass(frozen=True)
class InterceptResend:
    """Measure each travel photon in flight and forward the eigenstate."""

    strategy: BasisStrategy = BasisStrategy.RANDOM
    label: str = "intercept-resend"

    def tap(self, qubit: QubitId, state: StateVector, rng: np.random.Generator):
        if self.strategy is BasisStrategy.ALWAYS_Z:
            basis = MeasurementBasis.COMPUTATIONAL
        elif self.strategy is BasisStrategy.ALWAYS_X:
            basis = MeasurementBasis.DIAGONAL
        else:
            basis = (
                MeasurementBasis.COMPUTATIONAL
                if int(rng.integers(0, 2)) == 0
                else MeasurementBasis.DIAGONAL
            )
        outcome, post = collapse_qubit(state, qubit, basis, rng)
        return post, EveTap(qubit.triplet, basis=basis.value, outcome=outcome)


@dataclass(frozen=True)
class EntangleMeasure:
    """Couple an ancilla to each travel photon with a controlled-NOT.

    The ancilla is read out only after the relevant announcements: in
    the announced basis for checked triplets, and as a Bell measurement
    on ancilla pairs for encoding groups.
    """

    label: str = "entangle-measure"

    def tap(self, qubit: QubitId, state: StateVector, rng: np.random.Generator):
        ancilla = QubitId(qubit.triplet, "e")
        grown = tensor(state, make_state((ancilla,), [1.0, 0.0]))
        grown = apply_cnot(grown, qubit, ancilla)
        return grown, EveTap(qubit.triplet, probe="cnot")


AttackModel = NoAttack | InterceptResend | EntangleMeasure


def attack_cell_label(attack: AttackModel | None) -> str:
    """Stable row label for sweep output."""
    if attack is None or isinstance(attack, NoAttack):
        return "none"
    if isinstance(attack, InterceptResend):
        return f"intercept-resend:{attack.strategy.value}"
    return "entangle-measure"


# --- exact detection analysis -------------------------------------------
# Plain-array enumeration, deliberately independent of the StateVector
# machinery the sessions run on.  Qubit order inside a triplet vector is
# (home, travel, control..., ancilla?), travel at axis 1.

_H = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]])


def _ghz_vector(parties: int) -> np.ndarray:
    vec = np.zeros(1 << parties)
    vec[0] = vec[-1] = _SQRT_HALF
    return vec


def _apply_single(vec: np.ndarray, total: int, axis: int, matrix: np.ndarray) -> np.ndarray:
    psi = np.moveaxis(vec.reshape([2] * total), axis, 0)
    psi = np.tensordot(matrix, psi, axes=([1], [0]))
    return np.moveaxis(psi, 0, axis).reshape(-1)


def _cnot_vector(vec: np.ndarray, total: int, control: int, target: int) -> np.ndarray:
    psi = np.moveaxis(vec.reshape([2] * total), (control, target), (0, 1)).copy()
    flipped = psi[1, [1, 0]]
    psi[1] = flipped
    return np.moveaxis(psi, (0, 1), (control, target)).reshape(-1)


def _project_travel(vec: np.ndarray, total: int, eigvec: np.ndarray) -> tuple[float, np.ndarray]:
    """Project the travel qubit (axis 1) onto the eigenvector, keeping it."""
    psi = np.moveaxis(vec.reshape([2] * total), 1, 0)
    component = np.tensordot(eigvec.conj(), psi, axes=([0], [0]))
    prob = float(np.sum(np.abs(component) ** 2))
    if prob <= 0.0:
        return 0.0, vec
    post = np.tensordot(eigvec, component, axes=0) / math.sqrt(prob)
    return prob, np.moveaxis(post, 0, 1).reshape(-1)


def _violation_probability(vec: np.ndarray, parties: int, total: int, diagonal: bool) -> float:
    """Probability the coincidence rule fails when all parties measure.

    Extra (non-party) qubits such as a probe ancilla are marginalized.
    """
    work = vec
    if diagonal:
        for axis in range(parties):
            work = _apply_single(work, total, axis, _H)
    probs = np.abs(work.reshape(1 << parties, -1)) ** 2
    per_outcome = probs.sum(axis=1)
    violating = 0.0
    for bits in range(1 << parties):
        if diagonal:
            fails = bin(bits).count("1") % 2 == 1
        else:
            fails = bits not in (0, (1 << parties) - 1)
        if fails:
            violating += float(per_outcome[bits])
    return violating


_EIGENVECTORS = {
    "z": (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    "x": (np.array([_SQRT_HALF, _SQRT_HALF]), np.array([_SQRT_HALF, -_SQRT_HALF])),
}


def detection_oracle(attack: AttackModel | None, parties: int = 3) -> float:
    """Exact per-checked-triplet violation probability for an attack.

    Enumerates the eavesdropper's basis choice and outcome, then the
    uniformly chosen checking basis, then every party-outcome branch.
    """
    if parties < 3:
        raise ValueError("the protocol needs at least 3 parties")
    if attack is None or isinstance(attack, NoAttack):
        return 0.0

    ghz = _ghz_vector(parties)
    branches: list[tuple[float, np.ndarray, int]] = []  # weight, vector, total qubits
    if isinstance(attack, InterceptResend):
        if attack.strategy is BasisStrategy.RANDOM:
            chosen = (("z", 0.5), ("x", 0.5))
        elif attack.strategy is BasisStrategy.ALWAYS_Z:
            chosen = (("z", 1.0),)
        else:
            chosen = (("x", 1.0),)
        for basis, weight in chosen:
            for eigvec in _EIGENVECTORS[basis]:
                prob, post = _project_travel(ghz, parties, eigvec)
                if prob > 0.0:
                    branches.append((weight * prob, post, parties))
    elif isinstance(attack, EntangleMeasure):
        probed = np.kron(ghz, np.array([1.0, 0.0]))
        probed = _cnot_vector(probed, parties + 1, 1, parties)
        branches.append((1.0, probed, parties + 1))
    else:
        raise ValueError(f"unknown attack model {attack!r}")

    total_violation = 0.0
    for weight, vec, total in branches:
        for diagonal in (False, True):
            total_violation += (
                weight * 0.5 * _violation_probability(vec, parties, total, diagonal)
            )
    return total_violation


def abort_probability(attack: AttackModel | None, checked_triplets: int, parties: int = 3) -> float:
    """Chance that at least one of k independent checked triplets trips."""
    p = detection_oracle(attack, parties)
    return 1.0 - (1.0 - p) ** checked_triplets


# --- Monte Carlo estimate over full sessions ------------------------------


@dataclass(frozen=True)
class DetectionStats:
    attack: str
    trials: int
    checked_triplets: int
    violations: int
    detection_rate: float
    aborts: int
    abort_rate: float
    decoded_bits_total: int
    decoded_bits_correct: int
    eve_information: float | None = None

    @property
    def decode_accuracy(self) -> float:
        if self.decoded_bits_total == 0:
            return float("nan")
        return self.decoded_bits_correct / self.decoded_bits_total


def _trial_seed(base_seed: int, trial: int) -> int:
    return int(
        np.random.SeedSequence(entropy=(base_seed, trial)).generate_state(1, np.uint64)[0]
    )


def _trial_message(base_seed: int, trial: int, capacity: int) -> str:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(base_seed, trial, 1)))
    return "".join(str(int(b)) for b in rng.integers(0, 2, size=capacity))


def estimate_detection(config: ProtocolConfig, trials: int) -> DetectionStats:
    """Run independent sessions with derived seeds and random messages."""
    if trials < 1:
        raise ValueError("trials must be positive")
    checked = violations = aborts = 0
    bits_total = bits_correct = 0
    for trial in range(trials):
        cfg = replace(
            config,
            seed=_trial_seed(config.seed, trial),
            message_bits=_trial_message(config.seed, trial, config.capacity_bits),
        )
        result = Session(cfg).run()
        checked += result.checked_triplets
        violations += result.violations
        if not result.completed:
            aborts += 1
        else:
            bits_total += len(cfg.message_bits)
            bits_correct += sum(
                1 for a, b in zip(result.decoded_bits, cfg.message_bits) if a == b
            )
    eve_info = (
        eve_group_information() if isinstance(config.attack, EntangleMeasure) else None
    )
    return DetectionStats(
        attack=attack_cell_label(config.attack),
        trials=trials,
        checked_triplets=checked,
        violations=violations,
        detection_rate=violations / checked if checked else 0.0,
        aborts=aborts,
        abort_rate=aborts / trials,
        decoded_bits_total=bits_total,
        decoded_bits_correct=bits_correct,
        eve_information=eve_info,
    )


# --- what the probe actually learns ---------------------------------------


def eve_group_information() -> float:
    """Mutual information (bits per group) between the message chunk and
    everything the entangling probe sees: the announced travel-pair Bell
    outcome plus her own ancilla-pair Bell outcome.

    After the controller round each probed triplet is a three-qubit GHZ
    state on (home, travel, ancilla) up to the announced parity sign, so
    the value does not depend on the party count; it is identical for
    every controller-parity pattern, which is asserted by enumeration.
    """
    from .bases import EncodingOp, bell_state_vector, ghz_state_vector
    from .states import BELL_OUTCOMES, apply_gate, inner_product, reorder

    h1, t1, e1 = QubitId(1, "h"), QubitId(1, "t"), QubitId(1, "e")
    h2, t2, e2 = QubitId(2, "h"), QubitId(2, "t"), QubitId(2, "e")

    values = []
    for p1 in (0, 1):
        for p2 in (0, 1):
            triplet1 = ghz_state_vector(1 if p1 == 0 else 2, (h1, t1, e1))
            triplet2 = ghz_state_vector(1 if p2 == 0 else 2, (h2, t2, e2))
            base = tensor(triplet1, triplet2)
            joint: dict[tuple, float] = {}
            for op in EncodingOp:
                encoded = apply_gate(base, op.gate, t1)
                for s in BELL_OUTCOMES:
                    for r in BELL_OUTCOMES:
                        for e in BELL_OUTCOMES:
                            basis = tensor(
                                tensor(
                                    bell_state_vector(s, (t1, t2)),
                                    bell_state_vector(r, (h1, h2)),
                                ),
                                bell_state_vector(e, (e1, e2)),
                            )
                            amp = inner_product(reorder(basis, encoded.qubits), encoded)
                            prob = abs(amp) ** 2
                            if prob > 1e-15:
                                key = (op, s, e)
                                joint[key] = joint.get(key, 0.0) + 0.25 * prob
            marginal: dict[tuple, float] = {}
            for (op, s, e), p in joint.items():
                marginal[(s, e)] = marginal.get((s, e), 0.0) + p
            info = sum(
                p * math.log2(p / (0.25 * marginal[(s, e)]))
                for (op, s, e), p in joint.items()
            )
            values.append(info)
    if max(values) - min(values) > 1e-9:
        raise AssertionError("probe information should not depend on parities")
    return values[0]
