"""Executable state machines for the semiquantum protocol rounds.

Alice sends N = ceil(8n(1+delta)) qubits, each uniformly a Z- or X-basis
bit.  Bob, limited to classical operations, either reflects a qubit
untouched (CTRL) or measures it in Z and resends the outcome (SIFT); in the
HADAMARD_BOB variant he additionally applies a Hadamard to each resent
qubit on a fair coin.  Alice then announces her Z positions, Bob his SIFT
positions, and the round distills:

- CTRL bits: reflected qubits Alice measures in the basis she sent,
  giving per-basis disturbance estimates;
- TEST bits: n random Z-SIFT positions whose round-trip error Alice
  checks against her sent bits (Bob's values for them are published);
- INFO bits: the first n remaining Z-SIFT positions, the raw key;
- DISCARD: everything else (X-SIFT bits carry no shared information).

The round aborts when a measured CTRL or TEST error rate strictly exceeds
its threshold.  An eavesdropper attacks the forward leg only (ONE_WAY,
flipping with probability D) or both legs (TWO_WAY, flipping each transit
with probability p, observed by Alice as D = 2p(1-p)); AUTO picks whichever
of the two wins at the configured disturbance.  Everything is deterministic
given (seed, run index): each run owns a derived RNG stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytic import crossover_disturbance, p_from_D
from .channel import CombinationMode, derive_rng, posterior_match
from .errors import DomainError, InsufficientBitsError


class Variant(Enum):
    CLASSICAL_BOB = "classical"
    HADAMARD_BOB = "hadamard"


class Basis(Enum):
    Z = "Z"
    X = "X"


class BobAction(Enum):
    CTRL = "CTRL"
    SIFT = "SIFT"


class Role(Enum):
    CTRL = "CTRL"
    TEST = "TEST"
    INFO = "INFO"
    DISCARD = "DISCARD"


class AbortReason(Enum):
    NONE = "NONE"
    CTRL_Z = "CTRL_Z"
    CTRL_X = "CTRL_X"
    TEST = "TEST"


def _check_half_open(value: float, name: str) -> float:
    if not 0.0 <= value <= 0.5:
        raise DomainError(f"{name} must lie in [0, 0.5], got {value!r}")
    return float(value)


@dataclass(frozen=True)
class EveNone:
    """No eavesdropper on either leg."""


@dataclass(frozen=True)
class EveOneWay:
    """Forward-leg-only attack: flips with probability `disturbance` and
    guesses with advantage sqrt(D(1-D))."""

    disturbance: float

    def __post_init__(self) -> None:
        _check_half_open(self.disturbance, "disturbance")

    @property
    def advantage(self) -> float:
        return math.sqrt(self.disturbance * (1.0 - self.disturbance))


@dataclass(frozen=True)
class EveTwoWay:
    """Both-legs attack: flips each transit with probability
    `flip_probability` (Alice observes D = 2p(1-p)) and combines the two
    per-transit guesses under `mode`."""

    flip_probability: float
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS

    def __post_init__(self) -> None:
        _check_half_open(self.flip_probability, "flip_probability")

    @classmethod
    def at_disturbance(
        cls, D: float, mode: CombinationMode = CombinationMode.PAPER_WEIGHTS
    ) -> "EveTwoWay":
        return cls(flip_probability=p_from_D(D), mode=mode)

    @property
    def disturbance(self) -> float:
        p = self.flip_probability
        return 2.0 * p * (1.0 - p)

    @property
    def advantage(self) -> float:
        p = self.flip_probability
        return math.sqrt(p * (1.0 - p))


@dataclass(frozen=True)
class EveAuto:
    """Pick the stronger of ONE_WAY/TWO_WAY for the target disturbance."""

    disturbance: float
    mode: CombinationMode = CombinationMode.PAPER_WEIGHTS

    def __post_init__(self) -> None:
        _check_half_open(self.disturbance, "disturbance")


EveStrategy = EveNone | EveOneWay | EveTwoWay | EveAuto


def choose_strategy(
    D: float, mode: CombinationMode = CombinationMode.PAPER_WEIGHTS
) -> EveOneWay | EveTwoWay:
    """TWO_WAY below the crossover disturbance, ONE_WAY at or above it."""
    D = _check_half_open(D, "D")
    if D < crossover_disturbance():
        return EveTwoWay.at_disturbance(D, mode)
    return EveOneWay(D)


def resolve_strategy(eve: EveStrategy) -> EveNone | EveOneWay | EveTwoWay:
    """Collapse AUTO to its concrete choice; other strategies pass through."""
    if isinstance(eve, EveAuto):
        return choose_strategy(eve.disturbance, eve.mode)
    return eve


@dataclass(frozen=True)
class ProtocolConfig:
    variant: Variant
    n: int
    delta: float = 1.0
    ctrl_threshold_z: float = 0.11
    ctrl_threshold_x: float = 0.11
    test_threshold: float = 0.11
    eve: EveStrategy = field(default_factory=EveNone)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n!r}")
        if self.delta < 0:
            raise DomainError(f"delta must be >= 0, got {self.delta!r}")
        for name in ("ctrl_threshold_z", "ctrl_threshold_x", "test_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed!r}")

    @property
    def N(self) -> int:
        """Number of qubits Alice sends: ceil(8 n (1 + delta))."""
        return math.ceil(8 * self.n * (1.0 + self.delta))


def expected_sifted_count(config: ProtocolConfig) -> float:
    """Expected number of Z-SIFT positions: N/4 (two fair coins)."""
    return config.N / 4.0


@dataclass(frozen=True)
class TranscriptEntry:
    index: int
    alice_basis: Basis
    alice_bit: int
    bob_action: BobAction
    hadamard_applied: bool
    bob_outcome: int | None
    forward_flip: bool
    backward_flip: bool
    alice_final_outcome: int | None
    eve_forward_guess: int | None
    eve_backward_guess: int | None
    role: Role


@dataclass(frozen=True)
class RunResult:
    """Summary of one protocol round.

    Rates come with their raw counts so aggregation across runs can merge
    counts instead of averaging rates.  Info strings are None when the run
    aborted (the protocol stops before distilling a key), as is
    eve_accuracy.
    """

    aborted: bool
    abort_reason: AbortReason
    ctrl_error_z: float
    ctrl_error_x: float
    test_error: float
    ctrl_count_z: int
    ctrl_count_x: int
    ctrl_errors_z: int
    ctrl_errors_x: int
    test_errors: int
    z_sift_count: int
    role_counts: dict[Role, int]
    alice_info: np.ndarray | None
    bob_info: np.ndarray | None
    eve_info_guesses: np.ndarray | None
    eve_accuracy: float | None
    transcript: list[TranscriptEntry] | None


def run_protocol(
    config: ProtocolConfig, run_index: int = 0, keep_transcript: bool = False
) -> RunResult:
    """Execute one protocol round; deterministic in (config.seed, run_index)."""
    if run_index < 0:
        raise DomainError(f"run_index must be non-negative, got {run_index!r}")
    rng = derive_rng(config.seed, run_index)
    strategy = resolve_strategy(config.eve)
    N, n = config.N, config.n
    hadamard_variant = config.variant is Variant.HADAMARD_BOB

    # Fixed draw order; every random array is drawn before derived values.
    basis_is_x = rng.integers(0, 2, N, dtype=np.uint8)
    alice_bit = rng.integers(0, 2, N, dtype=np.uint8)
    sift = rng.integers(0, 2, N, dtype=np.uint8)
    if hadamard_variant:
        hadamard_applied = (rng.integers(0, 2, N, dtype=np.uint8) & sift).astype(bool)
    else:
        hadamard_applied = np.zeros(N, dtype=bool)
    bob_x_outcome = rng.integers(0, 2, N, dtype=np.uint8)

    forward_flip = np.zeros(N, dtype=np.uint8)
    backward_flip = np.zeros(N, dtype=np.uint8)
    guess_fwd: np.ndarray | None = None
    guess_bwd: np.ndarray | None = None

    if isinstance(strategy, EveOneWay):
        forward_flip = (rng.random(N) < strategy.disturbance).astype(np.uint8)
        eps1 = strategy.advantage
        fwd_ok = rng.random(N) < 0.5 + eps1
        guess_fwd = np.where(fwd_ok, alice_bit, 1 - alice_bit).astype(np.uint8)
    elif isinstance(strategy, EveTwoWay):
        p = strategy.flip_probability
        eps = strategy.advantage
        forward_flip = (rng.random(N) < p).astype(np.uint8)
        backward_flip = (rng.random(N) < p).astype(np.uint8)
        if strategy.mode is CombinationMode.PAPER_WEIGHTS:
            # Formula replay: equal-weight match/mismatch with the match
            # posterior taken at the effective backward advantage (halved
            # when Bob's fair Hadamard coin blinds half the resends).
            eps2_eff = eps / 2.0 if hadamard_variant else eps
            match = rng.random(N) < 0.5
            p_ok = np.where(match, posterior_match(eps, eps2_eff), 0.5 + eps)
            correct = rng.random(N) < p_ok
            guess_fwd = np.where(correct, alice_bit, 1 - alice_bit).astype(np.uint8)
            guess_bwd = np.where(match, guess_fwd, 1 - guess_fwd).astype(np.uint8)
        else:
            fwd_ok = rng.random(N) < 0.5 + eps
            u_bwd = rng.random(N)
            guess_fwd = np.where(fwd_ok, alice_bit, 1 - alice_bit).astype(np.uint8)
            # Backward truth: the bit riding the return leg (Bob's resend on
            # SIFT positions, the forward-flipped qubit on CTRL positions).
            truth_bwd_sift = np.where(
                basis_is_x == 0, alice_bit ^ forward_flip, bob_x_outcome
            )
            truth_bwd = np.where(
                sift == 1, truth_bwd_sift, alice_bit ^ forward_flip
            ).astype(np.uint8)
            adv_bwd = np.where(hadamard_applied, 0.0, eps)
            bwd_ok = u_bwd < 0.5 + adv_bwd
            guess_bwd = np.where(bwd_ok, truth_bwd, 1 - truth_bwd).astype(np.uint8)

    # Bob's SIFT outcome: the forward-flipped bit for Z sends; a fresh fair
    # coin for X sends (a Z measurement of an X state is uniform).
    bob_outcome = np.where(basis_is_x == 0, alice_bit ^ forward_flip, bob_x_outcome)
    bob_outcome = bob_outcome.astype(np.uint8)

    roundtrip_err = (forward_flip ^ backward_flip).astype(bool)
    ctrl_mask = sift == 0
    ctrl_z = ctrl_mask & (basis_is_x == 0)
    ctrl_x = ctrl_mask & (basis_is_x == 1)
    ctrl_count_z = int(ctrl_z.sum())
    ctrl_count_x = int(ctrl_x.sum())
    ctrl_errors_z = int(roundtrip_err[ctrl_z].sum())
    ctrl_errors_x = int(roundtrip_err[ctrl_x].sum())
    ctrl_error_z = ctrl_errors_z / ctrl_count_z if ctrl_count_z else 0.0
    ctrl_error_x = ctrl_errors_x / ctrl_count_x if ctrl_count_x else 0.0

    z_sift_idx = np.flatnonzero((basis_is_x == 0) & (sift == 1))
    z_sift_count = int(z_sift_idx.size)
    if z_sift_count < 2 * n:
        raise InsufficientBitsError(
            f"only {z_sift_count} Z-SIFT bits for n={n} TEST plus n INFO; "
            "increase delta"
        )
    test_idx = rng.choice(z_sift_idx, size=n, replace=False)
    remaining = np.setdiff1d(z_sift_idx, test_idx)  # sorted ascending
    info_idx = remaining[:n]

    # TEST check: Alice measures the returned TEST qubits (in the
    # Hadamard-corrected basis when applicable) and compares with the bits
    # she sent, seeing the round-trip error rate.
    test_errors = int(roundtrip_err[test_idx].sum())
    test_error = test_errors / n

    if isinstance(strategy, EveNone):
        # Null-guesser baseline so accuracy is defined without an attacker.
        eve_info_guesses = rng.integers(0, 2, n, dtype=np.uint8)
    else:
        # Combination rule: agreement keeps the bit, disagreement keeps the
        # forward guess; either way the INFO guess is the forward guess.
        eve_info_guesses = guess_fwd[info_idx]

    alice_info = alice_bit[info_idx].copy()
    bob_info = bob_outcome[info_idx].copy()
    eve_accuracy = float((eve_info_guesses == alice_info).mean())

    if ctrl_error_z > config.ctrl_threshold_z:
        abort_reason = AbortReason.CTRL_Z
    elif ctrl_error_x > config.ctrl_threshold_x:
        abort_reason = AbortReason.CTRL_X
    elif test_error > config.test_threshold:
        abort_reason = AbortReason.TEST
    else:
        abort_reason = AbortReason.NONE
    aborted = abort_reason is not AbortReason.NONE

    roles = np.full(N, 3, dtype=np.uint8)  # DISCARD
    roles[ctrl_mask] = 0
    roles[test_idx] = 1
    roles[info_idx] = 2
    role_order = (Role.CTRL, Role.TEST, Role.INFO, Role.DISCARD)
    role_counts = {
        role: int((roles == code).sum()) for code, role in enumerate(role_order)
    }

    transcript: list[TranscriptEntry] | None = None
    if keep_transcript:
        transcript = _build_transcript(
            strategy=strategy,
            basis_is_x=basis_is_x,
            alice_bit=alice_bit,
            sift=sift,
            hadamard_applied=hadamard_applied,
            bob_outcome=bob_outcome,
            forward_flip=forward_flip,
            backward_flip=backward_flip,
            guess_fwd=guess_fwd,
            guess_bwd=guess_bwd,
            roles=roles,
            role_order=role_order,
        )

    return RunResult(
        aborted=aborted,
        abort_reason=abort_reason,
        ctrl_error_z=ctrl_error_z,
        ctrl_error_x=ctrl_error_x,
        test_error=test_error,
        ctrl_count_z=ctrl_count_z,
        ctrl_count_x=ctrl_count_x,
        ctrl_errors_z=ctrl_errors_z,
        ctrl_errors_x=ctrl_errors_x,
        test_errors=test_errors,
        z_sift_count=z_sift_count,
        role_counts=role_counts,
        alice_info=None if aborted else alice_info,
        bob_info=None if aborted else bob_info,
        eve_info_guesses=None if aborted else eve_info_guesses,
        eve_accuracy=None if aborted else eve_accuracy,
        transcript=transcript,
    )


def _build_transcript(
    *,
    strategy,
    basis_is_x,
    alice_bit,
    sift,
    hadamard_applied,
    bob_outcome,
    forward_flip,
    backward_flip,
    guess_fwd,
    guess_bwd,
    roles,
    role_order,
) -> list[TranscriptEntry]:
    entries = []
    two_way = isinstance(strategy, EveTwoWay)
    eavesdrops = not isinstance(strategy, EveNone)
    for i in range(alice_bit.size):
        role = role_order[roles[i]]
        is_sift = bool(sift[i])
        alice_final = (
            int(alice_bit[i] ^ forward_flip[i] ^ backward_flip[i])
            if role in (Role.CTRL, Role.TEST)
            else None
        )
        entries.append(
            TranscriptEntry(
                index=i,
                alice_basis=Basis.X if basis_is_x[i] else Basis.Z,
                alice_bit=int(alice_bit[i]),
                bob_action=BobAction.SIFT if is_sift else BobAction.CTRL,
                hadamard_applied=bool(hadamard_applied[i]),
                bob_outcome=int(bob_outcome[i]) if is_sift else None,
                forward_flip=bool(forward_flip[i]),
                backward_flip=bool(backward_flip[i]),
                alice_final_outcome=alice_final,
                eve_forward_guess=int(guess_fwd[i]) if eavesdrops else None,
                eve_backward_guess=int(guess_bwd[i]) if two_way else None,
                role=role,
            )
        )
    return entries


TRANSCRIPT_COLUMNS = (
    "index",
    "alice_basis",
    "alice_bit",
    "bob_action",
    "hadamard_applied",
    "bob_outcome",
    "forward_flip",
    "backward_flip",
    "alice_final_outcome",
    "eve_forward_guess",
    "eve_backward_guess",
    "role",
)


def transcript_csv(entries: list[TranscriptEntry]) -> str:
    """Render a transcript as CSV; absent values become empty fields."""

    def bit(value: int | None) -> str:
        return "" if value is None else str(value)

    def boolean(value: bool) -> str:
        return "true" if value else "false"

    lines = [",".join(TRANSCRIPT_COLUMNS)]
    for e in entries:
        lines.append(
            ",".join(
                (
                    str(e.index),
                    e.alice_basis.value,
                    str(e.alice_bit),
                    e.bob_action.value,
                    boolean(e.hadamard_applied),
                    bit(e.bob_outcome),
                    boolean(e.forward_flip),
                    boolean(e.backward_flip),
                    bit(e.alice_final_outcome),
                    bit(e.eve_forward_guess),
                    bit(e.eve_backward_guess),
                    e.role.value,
                )
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PublicAnnouncements:
    """Everything broadcast on the classical channel, i.e. Eve-readable."""

    z_positions: tuple[int, ...]
    sift_positions: tuple[int, ...]
    test_positions: tuple[int, ...]
    bob_test_values: tuple[int, ...]
    hadamard_positions: tuple[int, ...]


def public_announcements(
    entries: list[TranscriptEntry], variant: Variant
) -> PublicAnnouncements:
    """Assemble the public view of a round from its transcript.

    Hadamard placement is published only for TEST bits (Bob reveals it so
    Alice can measure those returns in the right basis); for INFO bits it
    stays secret, which is the Hadamard variant's entire point.
    """
    z_positions = tuple(e.index for e in entries if e.alice_basis is Basis.Z)
    sift_positions = tuple(e.index for e in entries if e.bob_action is BobAction.SIFT)
    test = [e for e in entries if e.role is Role.TEST]
    hadamard_positions: tuple[int, ...] = ()
    if variant is Variant.HADAMARD_BOB:
        hadamard_positions = tuple(e.index for e in test if e.hadamard_applied)
    return PublicAnnouncements(
        z_positions=z_positions,
        sift_positions=sift_positions,
        test_positions=tuple(e.index for e in test),
        bob_test_values=tuple(e.bob_outcome for e in test),
        hadamard_positions=hadamard_positions,
    )
