"""Bit-level probabilistic model of the eavesdropped channels.

Each transit of a qubit through the attacker is reduced to two classical
effects: the carried bit flips with probability p (binary symmetric
channel), and the attacker records a guess of the carried bit that is
correct with probability 1/2 + eps, eps = sqrt(p(1-p)).  Guess correctness
is sampled independently of whether the flip occurred; the closed forms in
`analytic` assume exactly this factorisation.

Forward and backward guesses are reconciled by a fixed rule: agreeing
guesses are kept, disagreeing ones are resolved in favour of the forward
guess (the backward guess is discarded), and a missing backward guess
degenerates to the forward one.  Note the rule's output is always the
forward guess; what distinguishes the two shipped sampling models is the
joint law of (match, correctness):

- PAPER_WEIGHTS: match and mismatch each occur with probability 1/2, and
  the combined guess is correct with probability posterior_match(eps1, eps2)
  on a match and 1/2 + eps1 on a mismatch.  This replays the closed-form
  average pe_two_way_avg exactly.
- INDEPENDENT: the two guesses are independent Bernoulli draws against the
  same truth.  A match then has probability 1/2 + 2*eps1*eps2, and the
  combined success rate is exactly 1/2 + eps1 (see
  enumerate_independent_success) — a documented divergence from the
  equal-weight average.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .analytic import posterior_match
from .errors import DomainError


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class CombinationMode(Enum):
    """Joint law used when sampling forward/backward guess pairs."""

    PAPER_WEIGHTS = "paper"
    INDEPENDENT = "independent"


@dataclass(frozen=True)
class DirectionalObservation:
    """One per-transit guess with the advantage that produced it."""

    direction: Direction
    guess: int
    advantage: float

    def __post_init__(self) -> None:
        if self.guess not in (0, 1):
            raise DomainError(f"guess must be a bit, got {self.guess!r}")
        if not 0.0 <= self.advantage <= 0.5:
            raise DomainError(f"advantage must lie in [0, 0.5], got {self.advantage!r}")


def derive_rng(seed: int, *stream_key: int) -> np.random.Generator:
    """Deterministic generator for (master seed, stream indices...).

    Distinct keys give statistically independent streams; the same key
    always reproduces the same stream.
    """
    if seed < 0 or any(k < 0 for k in stream_key):
        raise DomainError("seed and stream keys must be non-negative integers")
    return np.random.default_rng([int(seed), *map(int, stream_key)])


def _check_half(value: float, name: str) -> float:
    if not 0.0 <= value <= 0.5:
        raise DomainError(f"{name} must lie in [0, 0.5], got {value!r}")
    return float(value)


def sample_flip(p: float, rng: np.random.Generator, size: int | None = None):
    """Draw flip indicators: 1 with probability p. Scalar or vector."""
    p = _check_half(p, "p")
    if size is None:
        return int(rng.random() < p)
    return (rng.random(size) < p).astype(np.uint8)


def sample_guess(truth, eps: float, rng: np.random.Generator, size: int | None = None):
    """Draw guesses that equal `truth` with probability 1/2 + eps."""
    eps = _check_half(eps, "eps")
    if size is None:
        correct = rng.random() < 0.5 + eps
        return int(truth) if correct else 1 - int(truth)
    correct = rng.random(size) < 0.5 + eps
    truth = np.asarray(truth, dtype=np.uint8)
    return np.where(correct, truth, 1 - truth).astype(np.uint8)


def combine_guesses(
    forward: DirectionalObservation,
    backward: DirectionalObservation | None = None,
) -> int:
    """Reconcile per-direction guesses: keep agreement, else trust forward."""
    if backward is None or backward.guess == forward.guess:
        return forward.guess
    return forward.guess


def sample_combined_correct(
    eps1: float,
    eps2: float,
    mode: CombinationMode,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Sample (combined-guess correct, guesses matched) pairs.

    Returns booleans (or boolean arrays of length `size`) under the joint
    law selected by `mode`; see the module docstring for the two laws.
    """
    eps1 = _check_half(eps1, "eps1")
    eps2 = _check_half(eps2, "eps2")
    n = 1 if size is None else size
    if mode is CombinationMode.PAPER_WEIGHTS:
        match = rng.random(n) < 0.5
        p_correct = np.where(match, posterior_match(eps1, eps2), 0.5 + eps1)
        correct = rng.random(n) < p_correct
    elif mode is CombinationMode.INDEPENDENT:
        fwd_ok = rng.random(n) < 0.5 + eps1
        bwd_ok = rng.random(n) < 0.5 + eps2
        match = fwd_ok == bwd_ok
        correct = fwd_ok  # the rule always outputs the forward guess
    else:
        raise DomainError(f"unknown combination mode {mode!r}")
    if size is None:
        return bool(correct[0]), bool(match[0])
    return correct, match


def enumerate_independent_success(eps1: float, eps2: float) -> float:
    """Exact success rate of the combination rule under independent guesses.

    Enumerates the four (forward correct?, backward correct?) outcomes for
    both truth values, pushing each pair through combine_guesses.  Equals
    1/2 + eps1 identically, because the rule always keeps the forward guess.
    """
    eps1 = _check_half(eps1, "eps1")
    eps2 = _check_half(eps2, "eps2")
    total = 0.0
    for truth in (0, 1):
        for fwd_ok, prob_f in ((True, 0.5 + eps1), (False, 0.5 - eps1)):
            for bwd_ok, prob_b in ((True, 0.5 + eps2), (False, 0.5 - eps2)):
                forward = DirectionalObservation(
                    Direction.FORWARD, truth if fwd_ok else 1 - truth, eps1
                )
                backward = DirectionalObservation(
                    Direction.BACKWARD, truth if bwd_ok else 1 - truth, eps2
                )
                combined = combine_guesses(forward, backward)
                total += 0.5 * prob_f * prob_b * (combined == truth)
    return total


def backward_advantage_hadamard(p: float, bob_applied_hadamard: bool) -> float:
    """Backward-guess advantage of a Z-basis measurement against one resend.

    Zero when Bob Hadamard-transformed the resent qubit (the measurement is
    then uninformative), sqrt(p(1-p)) otherwise; a fair Hadamard coin thus
    halves the average advantage.
    """
    p = _check_half(p, "p")
    if bob_applied_hadamard:
        return 0.0
    return float(np.sqrt(p * (1.0 - p)))
