"""Multi-party secure direct communication session engine.

One session moves through numbered phases, recorded in the transcript
under these wire labels:

    S1   receiver prepares one GHZ state per triplet and distributes the
         travel sequence to the sender and one control sequence to each
         controller (an eavesdropper taps travel photons in transit)
    S2   receipt confirmations; consecutive triplet pairs become groups
    S3   sender partitions the groups into checking and encoding sets
    S4   per checked triplet: sender picks a basis at random, measures
         and announces; everyone else measures in the same basis and
         replies; any coincidence violation aborts the session
    S5   controllers rotate (Hadamard) and measure their control
         photons of the encoding groups
    S6   controllers broadcast their outcome lists
    S7   sender encodes two message bits per group on the first travel
         photon and Bell-measures each travel pair
    S8   sender announces the Bell results
    S9   receiver Bell-measures each home pair and decodes
    S11  session complete

A reverse transfer (S10 in the numbering) is a fresh session with the
sender and receiver roles exchanged; ``ProtocolConfig.sender`` and
``.receiver`` accept any two distinct party names, and the remaining
parties act as controllers.

Randomness: every draw comes from one master seed through a named
substream per party (ALICE, BOB, CTRL1..k, then EVE, spawn keys 0..),
so changing one party's behavior never shifts another party's draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, ClassVar, Sequence

import numpy as np

from .bases import DecodeKey, EncodingOp, default_decode_table
from .states import (
    BellOutcome,
    Gate,
    MeasurementBasis,
    QubitId,
    StateVector,
    apply_gate,
    make_state,
    measure_bell,
    measure_qubit,
    tensor,
)
from .transcript import TranscriptRecord, format_transcript

if TYPE_CHECKING:  # pragma: no cover
    from .attacks import AttackModel

ALICE = "ALICE"
BOB = "BOB"
EVE = "EVE"

MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """Rejected configuration; maps to a usage error at the CLI."""


class InternalError(RuntimeError):
    """A simulator invariant broke; maps to exit code 4 at the CLI."""


class Phase(Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"
    S7 = "S7"
    S8 = "S8"
    S9 = "S9"
    S10 = "S10"
    S11 = "S11"
    ABORTED = "ABORT"

    @property
    def order(self) -> int:
        return 99 if self is Phase.ABORTED else int(self.value[1:])


def roster_names(party_count: int) -> tuple[str, ...]:
    """Fixed actor names: ALICE, BOB, then CTRL1..CTRL(party_count - 2)."""
    return (ALICE, BOB) + tuple(f"CTRL{j}" for j in range(1, party_count - 1))


def coincidence_ok(basis: MeasurementBasis, bits: Sequence[int]) -> bool:
    """Checking rule: computational outcomes must all agree, diagonal
    outcomes must have even parity."""
    if basis is MeasurementBasis.COMPUTATIONAL:
        return len(set(bits)) == 1
    parity = 0
    for b in bits:
        parity ^= b
    return parity == 0


def triplet_parity(controller_bits: Sequence[int]) -> int:
    """XOR of all controller outcomes for one triplet."""
    parity = 0
    for b in controller_bits:
        parity ^= b
    return parity


@dataclass(frozen=True)
class ProtocolConfig:
    """Complete description of one session; validated on construction."""

    triplet_count: int
    message_bits: str
    party_count: int = 3
    check_fraction: float = 0.5
    attack: "AttackModel | None" = None
    seed: int = 0
    sender: str = BOB
    receiver: str = ALICE

    def __post_init__(self) -> None:
        if self.triplet_count <= 0 or self.triplet_count % 2 != 0:
            raise ConfigError(f"triplet count must be a positive even integer, got {self.triplet_count}")
        if self.party_count < 3:
            raise ConfigError(f"party count must be at least 3, got {self.party_count}")
        if not (0.0 < self.check_fraction < 1.0):
            raise ConfigError(f"check fraction must lie strictly between 0 and 1, got {self.check_fraction}")
        if not (0 <= self.seed <= MAX_SEED):
            raise ConfigError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if set(self.message_bits) - {"0", "1"}:
            raise ConfigError("message must be a string of 0s and 1s")
        names = self.roster
        if self.sender not in names or self.receiver not in names:
            raise ConfigError(f"sender and receiver must be members of {names}")
        if self.sender == self.receiver:
            raise ConfigError("sender and receiver must be distinct parties")
        if self.encoding_group_count < 1:
            raise ConfigError(
                f"no encoding groups remain: {self.group_count} group(s) with "
                f"{self.checking_group_count} reserved for checking"
            )
        if len(self.message_bits) != self.capacity_bits:
            raise ConfigError(
                f"message length {len(self.message_bits)} does not match the "
                f"session capacity of {self.capacity_bits} bit(s) "
                f"({self.encoding_group_count} encoding group(s), 2 bits each)"
            )

    @property
    def roster(self) -> tuple[str, ...]:
        return roster_names(self.party_count)

    @property
    def controllers(self) -> tuple[str, ...]:
        """Controller parties for this run, in roster order."""
        return tuple(p for p in self.roster if p not in (self.sender, self.receiver))

    @property
    def group_count(self) -> int:
        return self.triplet_count // 2

    @property
    def checking_group_count(self) -> int:
        return math.ceil(self.check_fraction * self.group_count)

    @property
    def encoding_group_count(self) -> int:
        return self.group_count - self.checking_group_count

    @property
    def capacity_bits(self) -> int:
        return 2 * self.encoding_group_count


@dataclass
class GroupState:
    """Bookkeeping for one pair of consecutive triplets."""

    index: int
    triplets: tuple[int, int]
    kind: str | None = None  # "checking" | "encoding"
    parities: tuple[int, int] | None = None
    sender_bell: BellOutcome | None = None
    receiver_bell: BellOutcome | None = None
    encoded_bits: str | None = None
    decoded_bits: str | None = None


# --- classical channel -------------------------------------------------
# Broadcast messages are authenticated: the eavesdropper reads them but
# cannot alter or suppress them.  Each carries a session-wide sequence
# number assigned at broadcast time.


@dataclass
class Receipt:
    ACTION: ClassVar[str] = "RECEIPT"
    seq: int
    party: str
    count: int

    def detail(self) -> str:
        return f"party={self.party} count={self.count}"


@dataclass
class GroupSelection:
    ACTION: ClassVar[str] = "GROUP_SELECTION"
    seq: int
    checking: tuple[int, ...]
    encoding: tuple[int, ...]

    def detail(self) -> str:
        return (
            f"checking={','.join(map(str, self.checking))} "
            f"encoding={','.join(map(str, self.encoding))}"
        )


@dataclass
class CheckAnnounce:
    ACTION: ClassVar[str] = "CHECK_ANNOUNCE"
    seq: int
    triplet: int
    basis: MeasurementBasis
    outcome: int

    def detail(self) -> str:
        return f"triplet={self.triplet} basis={self.basis.value} outcome={self.outcome}"


@dataclass
class CheckReply:
    ACTION: ClassVar[str] = "CHECK_REPLY"
    seq: int
    party: str
    triplet: int
    basis: MeasurementBasis
    outcome: int

    def detail(self) -> str:
        return (
            f"party={self.party} triplet={self.triplet} "
            f"basis={self.basis.value} outcome={self.outcome}"
        )


@dataclass
class CheckVerdict:
    ACTION: ClassVar[str] = "CHECK_VERDICT"
    seq: int
    passed: bool
    checked: int
    violations: int

    def detail(self) -> str:
        verdict = "pass" if self.passed else "abort"
        return f"verdict={verdict} checked={self.checked} violations={self.violations}"


@dataclass
class ControllerOutcomes:
    ACTION: ClassVar[str] = "CONTROLLER_OUTCOMES"
    seq: int
    party: str
    outcomes: tuple[tuple[int, int], ...]  # (triplet, bit)

    def detail(self) -> str:
        listed = ",".join(f"{t}:{b}" for t, b in self.outcomes)
        return f"party={self.party} outcomes={listed}"


@dataclass
class BellAnnounce:
    ACTION: ClassVar[str] = "BELL_ANNOUNCE"
    seq: int
    group: int
    outcome: BellOutcome

    def detail(self) -> str:
        return f"group={self.group} outcome={self.outcome.value}"


@dataclass
class Abort:
    ACTION: ClassVar[str] = "ABORT"
    seq: int
    reason: str
    triplet: int

    def detail(self) -> str:
        return f"reason={self.reason} triplet={self.triplet}"


ClassicalMessage = (
    Receipt
    | GroupSelection
    | CheckAnnounce
    | CheckReply
    | CheckVerdict
    | ControllerOutcomes
    | BellAnnounce
    | Abort
)


@dataclass(frozen=True)
class SessionResult:
    config: ProtocolConfig = field(repr=False)
    completed: bool
    decoded_bits: str | None
    match: bool
    checked_triplets: int
    violations: int
    abort_triplet: int | None
    records: tuple[TranscriptRecord, ...] = field(repr=False)

    @property
    def transcript_text(self) -> str:
        return format_transcript(self.records)


class Session:
    """Drives one protocol run; all state lives on the instance."""

    def __init__(self, config: ProtocolConfig) -> None:
        self.config = config
        stream_names = config.roster + (EVE,)
        self._rngs = {
            name: np.random.default_rng(
                np.random.SeedSequence(entropy=config.seed, spawn_key=(i,))
            )
            for i, name in enumerate(stream_names)
        }
        self.records: list[TranscriptRecord] = []
        self.messages: list[ClassicalMessage] = []
        self._seq = 0
        self._msg_seq = 0
        self.phase = Phase.S1
        # disentangled subsystems, merged lazily when a joint operation
        # spans two of them
        self._pool: list[StateVector | None] = []
        self._where: dict[QubitId, int] = {}
        self._created: set[QubitId] = set()
        self._measured: set[QubitId] = set()
        self.groups: list[GroupState] = []
        self._check_bases: dict[int, MeasurementBasis] = {}
        self.eve_taps: list = []
        self.checked_triplets = 0
        self.violations = 0
        self.abort_triplet: int | None = None
        self.decoded_bits: str | None = None

        cfg = config
        self._role_holder = {"h": cfg.receiver, "t": cfg.sender}
        for j, name in enumerate(cfg.controllers, start=1):
            self._role_holder[f"c{j}"] = name

    # -- transcript and channel helpers ---------------------------------

    def _advance(self, phase: Phase) -> None:
        if phase.order < self.phase.order:
            raise InternalError(f"phase regression {self.phase.value} -> {phase.value}")
        if phase is Phase.ABORTED and self.phase is not Phase.S4:
            raise InternalError("sessions abort only from the checking phase")
        self.phase = phase

    def _emit(self, actor: str, action: str, detail: str) -> None:
        self._seq += 1
        self.records.append(
            TranscriptRecord(self._seq, self.phase.value, actor, action, detail)
        )

    def _broadcast(self, actor: str, message_type, /, **fields) -> ClassicalMessage:
        self._msg_seq += 1
        message = message_type(seq=self._msg_seq, **fields)
        self.messages.append(message)
        self._emit(actor, message.ACTION, message.detail())
        return message

    # -- quantum register pool -------------------------------------------

    def _add_state(self, state: StateVector) -> None:
        slot = len(self._pool)
        self._pool.append(state)
        for q in state.qubits:
            self._where[q] = slot
        self._created.update(state.qubits)

    def _slot_of(self, qubit: QubitId) -> int:
        slot = self._where.get(qubit)
        if slot is None:
            raise InternalError(f"qubit {qubit} is absent (never created or already measured)")
        return slot

    def _replace(self, slot: int, state: StateVector | None) -> None:
        self._pool[slot] = state
        if state is not None:
            for q in state.qubits:
                self._where[q] = slot

    def _merge(self, qubits: Sequence[QubitId]) -> int:
        slots = []
        for q in qubits:
            s = self._slot_of(q)
            if s not in slots:
                slots.append(s)
        target = slots[0]
        state = self._pool[target]
        for s in slots[1:]:
            state = tensor(state, self._pool[s])
            self._pool[s] = None
        self._replace(target, state)
        return target

    def _apply(self, gate: Gate, qubit: QubitId) -> None:
        slot = self._slot_of(qubit)
        self._replace(slot, apply_gate(self._pool[slot], gate, qubit))

    def _measure(self, qubit: QubitId, basis: MeasurementBasis, party: str) -> int:
        if qubit in self._measured:
            raise InternalError(f"qubit {qubit} measured twice")
        slot = self._slot_of(qubit)
        outcome, post = measure_qubit(self._pool[slot], qubit, basis, self._rngs[party])
        del self._where[qubit]
        self._measured.add(qubit)
        self._replace(slot, post if post.num_qubits else None)
        return outcome

    def _measure_bell_pair(self, pair: tuple[QubitId, QubitId], party: str) -> BellOutcome:
        for q in pair:
            if q in self._measured:
                raise InternalError(f"qubit {q} measured twice")
        slot = self._merge(pair)
        outcome, post = measure_bell(self._pool[slot], pair, self._rngs[party])
        for q in pair:
            del self._where[q]
            self._measured.add(q)
        self._replace(slot, post if post.num_qubits else None)
        return outcome

    # -- qubit naming ------------------------------------------------------

    def _triplet_qubits(self, n: int) -> tuple[QubitId, ...]:
        roles = ["h", "t"] + [f"c{j}" for j in range(1, self.config.party_count - 1)]
        return tuple(QubitId(n, role) for role in roles)

    def _held_qubit(self, party: str, triplet: int) -> QubitId:
        for role, holder in self._role_holder.items():
            if holder == party:
                return QubitId(triplet, role)
        raise InternalError(f"party {party} holds no qubit")

    # -- protocol phases ---------------------------------------------------

    def prepare_and_distribute(self) -> None:
        cfg = self.config
        self._emit(
            cfg.receiver,
            "PREPARE",
            f"triplets={cfg.triplet_count} parties={cfg.party_count} groups={cfg.group_count}",
        )
        for n in range(1, cfg.triplet_count + 1):
            qubits = self._triplet_qubits(n)
            amps = np.zeros(1 << len(qubits))
            amps[0] = amps[-1] = 1.0
            self._add_state(make_state(qubits, amps))

        self._emit(
            cfg.receiver, "SEND", f"to={cfg.sender} sequence=travel count={cfg.triplet_count}"
        )
        attack = cfg.attack
        if attack is not None:
            for n in range(1, cfg.triplet_count + 1):
                travel = QubitId(n, "t")
                slot = self._slot_of(travel)
                state, record = attack.tap(travel, self._pool[slot], self._rngs[EVE])
                new_qubits = set(state.qubits) - set(self._pool[slot].qubits)
                self._replace(slot, state)
                self._created.update(new_qubits)
                if record is not None:
                    self.eve_taps.append(record)
                    self._emit(EVE, "TAP", record.detail())
        for ctrl in cfg.controllers:
            self._emit(
                cfg.receiver, "SEND", f"to={ctrl} sequence=control count={cfg.triplet_count}"
            )

        self._advance(Phase.S2)
        for party in (cfg.sender,) + cfg.controllers:
            self._broadcast(party, Receipt, party=party, count=cfg.triplet_count)
        self.groups = [
            GroupState(index=k, triplets=(2 * k - 1, 2 * k))
            for k in range(1, cfg.group_count + 1)
        ]

    def select_groups(self) -> None:
        cfg = self.config
        self._advance(Phase.S3)
        order = self._rngs[cfg.sender].permutation(cfg.group_count) + 1
        checking = tuple(sorted(int(g) for g in order[: cfg.checking_group_count]))
        encoding = tuple(sorted(int(g) for g in order[cfg.checking_group_count :]))
        for group in self.groups:
            group.kind = "checking" if group.index in checking else "encoding"
        self._broadcast(cfg.sender, GroupSelection, checking=checking, encoding=encoding)

    def _checking_groups(self) -> list[GroupState]:
        return [g for g in self.groups if g.kind == "checking"]

    def _encoding_groups(self) -> list[GroupState]:
        return [g for g in self.groups if g.kind == "encoding"]

    def run_check(self) -> bool:
        """Measure every checked triplet and compare; abort on any violation.

        All checked photons are consumed even after a violation, so the
        per-triplet violation rate is well defined for statistics.
        """
        cfg = self.config
        self._advance(Phase.S4)
        for group in self._checking_groups():
            for n in group.triplets:
                basis = (
                    MeasurementBasis.COMPUTATIONAL
                    if int(self._rngs[cfg.sender].integers(0, 2)) == 0
                    else MeasurementBasis.DIAGONAL
                )
                self._check_bases[n] = basis
                bits = [self._measure(QubitId(n, "t"), basis, cfg.sender)]
                self._broadcast(
                    cfg.sender, CheckAnnounce, triplet=n, basis=basis, outcome=bits[0]
                )
                for party in (cfg.receiver,) + cfg.controllers:
                    outcome = self._measure(self._held_qubit(party, n), basis, party)
                    bits.append(outcome)
                    self._broadcast(
                        party, CheckReply, party=party, triplet=n, basis=basis, outcome=outcome
                    )
                self.checked_triplets += 1
                if not coincidence_ok(basis, bits):
                    self.violations += 1
                    if self.abort_triplet is None:
                        self.abort_triplet = n

        # a probe ancilla is read out only after the bases are public
        for group in self._checking_groups():
            for n in group.triplets:
                ancilla = QubitId(n, "e")
                if ancilla in self._where:
                    outcome = self._measure(ancilla, self._check_bases[n], EVE)
                    self._emit(
                        EVE,
                        "ANCILLA_MEASURE",
                        f"triplet={n} basis={self._check_bases[n].value} outcome={outcome}",
                    )

        passed = self.violations == 0
        self._broadcast(
            cfg.sender,
            CheckVerdict,
            passed=passed,
            checked=self.checked_triplets,
            violations=self.violations,
        )
        if not passed:
            self._broadcast(
                cfg.sender, Abort, reason="check_failed", triplet=self.abort_triplet
            )
            self._advance(Phase.ABORTED)
        return passed

    def controller_round(self) -> None:
        cfg = self.config
        self._advance(Phase.S5)
        bits: dict[tuple[str, int], int] = {}
        for j, ctrl in enumerate(cfg.controllers, start=1):
            for group in self._encoding_groups():
                for n in group.triplets:
                    qubit = QubitId(n, f"c{j}")
                    self._apply(Gate.HADAMARD, qubit)
                    outcome = self._measure(qubit, MeasurementBasis.COMPUTATIONAL, ctrl)
                    bits[(ctrl, n)] = outcome
                    self._emit(ctrl, "HADAMARD_MEASURE", f"triplet={n} outcome={outcome}")

        self._advance(Phase.S6)
        encoding_triplets = [n for g in self._encoding_groups() for n in g.triplets]
        for ctrl in cfg.controllers:
            self._broadcast(
                ctrl,
                ControllerOutcomes,
                party=ctrl,
                outcomes=tuple((n, bits[(ctrl, n)]) for n in encoding_triplets),
            )
        for group in self._encoding_groups():
            group.parities = tuple(
                triplet_parity([bits[(ctrl, n)] for ctrl in cfg.controllers])
                for n in group.triplets
            )

    def encode_and_announce(self) -> None:
        cfg = self.config
        self._advance(Phase.S7)
        encoding = self._encoding_groups()
        for i, group in enumerate(encoding):
            chunk = cfg.message_bits[2 * i : 2 * i + 2]
            op = EncodingOp.from_bits(chunk)
            group.encoded_bits = chunk
            first, second = group.triplets
            self._apply(op.gate, QubitId(first, "t"))
            self._emit(
                cfg.sender, "ENCODE", f"group={group.index} bits={chunk} op={op.name}"
            )
            outcome = self._measure_bell_pair(
                (QubitId(first, "t"), QubitId(second, "t")), cfg.sender
            )
            group.sender_bell = outcome
            self._emit(
                cfg.sender,
                "BELL_MEASURE",
                f"group={group.index} pair=t{first},t{second} outcome={outcome.value}",
            )

        self._advance(Phase.S8)
        for group in encoding:
            self._broadcast(
                cfg.sender, BellAnnounce, group=group.index, outcome=group.sender_bell
            )

    def receiver_decode(self) -> str:
        cfg = self.config
        self._advance(Phase.S9)
        table = default_decode_table()
        decoded_parts: list[str] = []
        for group in self._encoding_groups():
            first, second = group.triplets
            outcome = self._measure_bell_pair(
                (QubitId(first, "h"), QubitId(second, "h")), cfg.receiver
            )
            group.receiver_bell = outcome
            self._emit(
                cfg.receiver,
                "BELL_MEASURE",
                f"group={group.index} pair=h{first},h{second} outcome={outcome.value}",
            )
            key = DecodeKey(
                group.parities[0], group.parities[1], group.sender_bell, outcome
            )
            try:
                bits = table.decode(key)
            except KeyError as exc:  # the table is total; this cannot happen
                raise InternalError(f"no decode entry for {key}") from exc
            group.decoded_bits = bits
            self._emit(
                cfg.receiver,
                "DECODE",
                f"group={group.index} parities={group.parities[0]}{group.parities[1]} "
                f"sender={group.sender_bell.value} receiver={outcome.value} bits={bits}",
            )
            decoded_parts.append(bits)

        for group in self._encoding_groups():
            first, second = group.triplets
            pair = (QubitId(first, "e"), QubitId(second, "e"))
            if pair[0] in self._where and pair[1] in self._where:
                outcome = self._measure_bell_pair(pair, EVE)
                self._emit(
                    EVE,
                    "ANCILLA_BELL",
                    f"group={group.index} pair=e{first},e{second} outcome={outcome.value}",
                )

        self.decoded_bits = "".join(decoded_parts)
        self._advance(Phase.S11)
        self._emit(cfg.receiver, "COMPLETE", f"decoded={self.decoded_bits}")
        return self.decoded_bits

    # -- driver -----------------------------------------------------------

    def unmeasured_qubits(self) -> set[QubitId]:
        return set(self._where)

    def _check_conservation(self) -> None:
        alive = set(self._where)
        if alive & self._measured or (alive | self._measured) != self._created:
            raise InternalError("qubit conservation violated")

    def run(self) -> SessionResult:
        self.prepare_and_distribute()
        self.select_groups()
        passed = self.run_check()
        if passed:
            self.controller_round()
            self.encode_and_announce()
            self.receiver_decode()
        self._check_conservation()
        return SessionResult(
            config=self.config,
            completed=passed,
            decoded_bits=self.decoded_bits,
            match=passed and self.decoded_bits == self.config.message_bits,
            checked_triplets=self.checked_triplets,
            violations=self.violations,
            abort_triplet=self.abort_triplet,
            records=tuple(self.records),
        )


def run_session(config: ProtocolConfig) -> SessionResult:
    return Session(config).run()


def derived_config(config: ProtocolConfig, **changes) -> ProtocolConfig:
    """dataclasses.replace with revalidation, kept next to the dataclass."""
    return replace(config, **changes)
