"""Dense statevector oracle for the attack's round-trip behaviour.

A symmetric incoherent attack entangles each transiting qubit with a fresh
two-qubit probe pair:

    |0> -> sqrt(1-p)|E00>|0> + sqrt(p)|E01>|1>
    |1> -> sqrt(p)|E10>|0> + sqrt(1-p)|E11>|1>

This module realises that map on at most 5 qubits (two probe pairs plus the
signal) with plain complex amplitude vectors, so the bit-level channel model
used elsewhere can be checked against exact amplitude arithmetic: a full
round trip acts on the signal as a binary symmetric channel with error
probability 2p(1-p), whether Bob reflects (CTRL) or measures and resends
(SIFT).

Conventions: qubit 0 is the most significant bit of a basis index; probe
qubits come first and the signal qubit is always last, so a fresh probe pair
is inserted directly before the signal.  Probe labels map to the four
two-qubit computational basis states, which are orthonormal; that
orthogonality is what kills the interference cross terms in the cascaded
probabilities below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    InvalidCollapseError,
    UnsupportedInputError,
)

MAX_QUBITS = 5
NORM_TOL = 1e-10

# roundtrip_error modes
SIFT = "SIFT"
CTRL = "CTRL"

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable unit-norm amplitude vector over 1..5 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        size = amps.size
        if amps.ndim != 1 or size < 2 or size & (size - 1):
            raise DimensionError(f"amplitude vector length {size} is not 2^k")
        if size > 2**MAX_QUBITS:
            raise DimensionError(f"more than {MAX_QUBITS} qubits")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f"state norm^2 = {norm_sq!r} is not 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1


def basis_state(*bits: int) -> PureState:
    """Computational basis state |b0 b1 ... >, qubit 0 most significant."""
    if not bits or any(b not in (0, 1) for b in bits):
        raise DomainError(f"bits must be 0/1, got {bits!r}")
    amps = np.zeros(2 ** len(bits), dtype=np.complex128)
    index = 0
    for b in bits:
        index = index * 2 + b
    amps[index] = 1.0
    return PureState(amps)


@dataclass(frozen=True)
class ProbeBasis:
    """Assignment of probe labels (i, j) to two-qubit basis states.

    `states[2i + j]` is the basis index holding label Eij; any permutation
    of (0, 1, 2, 3) keeps the four probe states mutually orthonormal.
    """

    states: tuple[int, int, int, int] = (0, 1, 2, 3)

    def __post_init__(self) -> None:
        if sorted(self.states) != [0, 1, 2, 3]:
            raise DomainError(f"probe assignment {self.states!r} is not a permutation")

    def index(self, i: int, j: int) -> int:
        return self.states[2 * i + j]

    def vector(self, i: int, j: int) -> np.ndarray:
        vec = np.zeros(4, dtype=np.complex128)
        vec[self.index(i, j)] = 1.0
        return vec


DEFAULT_PROBES = ProbeBasis()


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 0.5:
        raise DomainError(f"p must lie in [0, 0.5], got {p!r}")
    return float(p)


def apply_interaction(
    input_bit_state: PureState, p: float, probes: ProbeBasis = DEFAULT_PROBES
) -> PureState:
    """Entangle a basis-state signal qubit with a fresh probe pair.

    Returns the 3-qubit state [probe pair, signal].  Only basis inputs are
    accepted; the protocol never feeds the attack a superposed signal
    directly (superpositions arise downstream and are handled by
    `extend_interaction`).
    """
    p = _check_p(p)
    if input_bit_state.num_qubits != 1:
        raise DimensionError("signal input must be a single qubit")
    amps = input_bit_state.amplitudes
    small = min(abs(amps[0]), abs(amps[1]))
    if small**2 > 1e-12:
        raise UnsupportedInputError("signal input must be a computational basis state")
    bit = int(abs(amps[1]) > abs(amps[0]))
    phase = amps[bit]
    out = np.zeros(8, dtype=np.complex128)
    if bit == 0:
        out[probes.index(0, 0) * 2 + 0] = phase * np.sqrt(1.0 - p)
        out[probes.index(0, 1) * 2 + 1] = phase * np.sqrt(p)
    else:
        out[probes.index(1, 0) * 2 + 0] = phase * np.sqrt(p)
        out[probes.index(1, 1) * 2 + 1] = phase * np.sqrt(1.0 - p)
    return PureState(out)


def extend_interaction(
    state: PureState, p: float, probes: ProbeBasis = DEFAULT_PROBES
) -> PureState:
    """Apply the interaction to the signal of a 3-qubit state, linearly,
    with a fresh primed probe pair inserted before the signal (-> 5 qubits)."""
    p = _check_p(p)
    if state.num_qubits != 3:
        raise DimensionError("extend_interaction expects a 3-qubit state")
    amps = state.amplitudes.reshape(4, 2)  # [old probe pair, signal]
    out = np.zeros((4, 4, 2), dtype=np.complex128)
    out[:, probes.index(0, 0), 0] += amps[:, 0] * np.sqrt(1.0 - p)
    out[:, probes.index(0, 1), 1] += amps[:, 0] * np.sqrt(p)
    out[:, probes.index(1, 0), 0] += amps[:, 1] * np.sqrt(p)
    out[:, probes.index(1, 1), 1] += amps[:, 1] * np.sqrt(1.0 - p)
    return PureState(out.reshape(32))


def measure_signal_marginal(state: PureState, signal_index: int) -> tuple[float, float]:
    """Born-rule marginal (prob0, prob1) of one qubit."""
    k = state.num_qubits
    if not 0 <= signal_index < k:
        raise DimensionError(f"qubit index {signal_index} out of range for {k} qubits")
    grid = state.amplitudes.reshape([2] * k)
    other_axes = tuple(i for i in range(k) if i != signal_index)
    probs = np.sum(np.abs(grid) ** 2, axis=other_axes)
    return float(probs[0]), float(probs[1])


def collapse_and_resend(state: PureState, outcome: int) -> PureState:
    """Project the signal (last qubit) onto `outcome` and renormalize.

    Models a SIFT step: the measured signal collapses and the same basis
    value is sent onward, leaving a product of the old probes with |outcome>.
    """
    if state.num_qubits != 3:
        raise DimensionError("collapse_and_resend expects a 3-qubit state")
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome!r}")
    amps = state.amplitudes.reshape(4, 2).copy()
    prob = float(np.sum(np.abs(amps[:, outcome]) ** 2))
    if prob < 1e-12:
        raise InvalidCollapseError(f"outcome {outcome} has probability {prob!r}")
    amps[:, 1 - outcome] = 0.0
    amps /= np.sqrt(prob)
    return PureState(amps.reshape(8))


def hadamard(state: PureState, qubit_index: int) -> PureState:
    """Apply the Hadamard transform to one qubit."""
    k = state.num_qubits
    if not 0 <= qubit_index < k:
        raise DimensionError(f"qubit index {qubit_index} out of range for {k} qubits")
    grid = state.amplitudes.reshape([2] * k)
    grid = np.tensordot(_HADAMARD, grid, axes=([1], [qubit_index]))
    grid = np.moveaxis(grid, 0, qubit_index)
    return PureState(grid.reshape(2**k))


def roundtrip_error(p: float, mode: str) -> float:
    """Signal-flip probability over a full round trip, from amplitudes.

    CTRL: the entangled qubit is reflected and suffers the interaction a
    second time.  SIFT: the signal is measured, a fresh qubit carrying the
    outcome is sent back, and the return leg suffers the interaction; the
    error is taken relative to the original bit, averaged over outcomes.
    Both reduce to 2p(1-p).
    """
    p = _check_p(p)
    if mode not in (SIFT, CTRL):
        raise DomainError(f"mode must be {SIFT!r} or {CTRL!r}, got {mode!r}")
    forward = apply_interaction(basis_state(0), p)
    if mode == CTRL:
        returned = extend_interaction(forward, p)
        _, prob_flip = measure_signal_marginal(returned, 4)
        return prob_flip
    error = 0.0
    outcome_probs = measure_signal_marginal(forward, 2)
    for outcome, weight in enumerate(outcome_probs):
        if weight < 1e-12:
            continue
        resent = extend_interaction(collapse_and_resend(forward, outcome), p)
        probs = measure_signal_marginal(resent, 4)
        error += weight * probs[1]  # final bit != original 0
    return error
