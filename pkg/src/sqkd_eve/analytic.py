"""Closed-form success probabilities for eavesdropping on a semiquantum
key-distribution channel.

All quantities are parametrised by the disturbance D observed by Alice,
i.e. the round-trip error rate she measures on CTRL and TEST bits.  A
symmetric incoherent attack that flips each transit with probability p
induces D = 2p(1-p), and the attacker's per-transit guessing advantage is

    eps = sqrt(p(1-p)) = sqrt(D/2).

Success probabilities (prob. of guessing one raw key bit correctly):

    pe_one_way(D)          = 1/2 + sqrt(D(1-D))          attack forward leg only
    pe_two_way_match(D)    = 1/2 + sqrt(D/2)/(1/2 + D)   both legs, guesses agree
    pe_two_way_mismatch(D) = 1/2 + sqrt(D/2)             both legs, guesses differ
    pe_two_way_avg(D)      = equal-weight average of the two cases
    pe_two_way_match_H(D), pe_two_way_avg_H(D)
                             same, against a Bob who applies a Hadamard to
                             half of his resent qubits (backward advantage
                             halves to eps/2)

Advantages are success probabilities minus 1/2.  The two-way average
beats the one-way attack only below the crossover disturbance
D* ~ 0.0877, located by `crossover_disturbance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

# Domain caps: D = 2p(1-p) <= 1/2, p <= 1/2 w.l.o.g., eps = sqrt(p(1-p)) <= 1/2.
MAX_DISTURBANCE = 0.5
MAX_FLIP_PROBABILITY = 0.5
MAX_ADVANTAGE = 0.5

# Bracket and tolerance for the crossover root search.
_CROSSOVER_BRACKET = (1e-6, 0.4999)
_CROSSOVER_TOL = 1e-10


def _check_unit_half(value: float, name: str) -> float:
    if not 0.0 <= value <= 0.5:
        raise DomainError(f"{name} must lie in [0, 0.5], got {value!r}")
    return float(value)


def p_from_D(D: float) -> float:
    """Per-transit flip probability p solving D = 2p(1-p), smaller root."""
    D = _check_unit_half(D, "D")
    return 0.5 * (1.0 - math.sqrt(1.0 - 2.0 * D))


def D_from_p(p: float) -> float:
    """Disturbance D = 2p(1-p) induced by per-transit flip probability p."""
    p = _check_unit_half(p, "p")
    return 2.0 * p * (1.0 - p)


def eps_from_p(p: float) -> float:
    """Per-transit guessing advantage eps = sqrt(p(1-p))."""
    p = _check_unit_half(p, "p")
    return math.sqrt(p * (1.0 - p))


@dataclass(frozen=True)
class DisturbanceParams:
    """Consistent (D, p, eps) triple for one symmetric attack strength.

    Invariants D = 2p(1-p) and eps = sqrt(p(1-p)) are validated to 1e-12
    at construction; build via `from_disturbance` or `from_flip_probability`.
    """

    D: float
    p: float
    eps: float

    def __post_init__(self) -> None:
        _check_unit_half(self.D, "D")
        _check_unit_half(self.p, "p")
        _check_unit_half(self.eps, "eps")
        if abs(self.D - 2.0 * self.p * (1.0 - self.p)) > 1e-12:
            raise DomainError(f"inconsistent pair D={self.D!r}, p={self.p!r}")
        if abs(self.eps - math.sqrt(self.p * (1.0 - self.p))) > 1e-12:
            raise DomainError(f"inconsistent pair p={self.p!r}, eps={self.eps!r}")

    @classmethod
    def from_disturbance(cls, D: float) -> "DisturbanceParams":
        p = p_from_D(D)
        return cls(D=float(D), p=p, eps=math.sqrt(p * (1.0 - p)))

    @classmethod
    def from_flip_probability(cls, p: float) -> "DisturbanceParams":
        p = _check_unit_half(p, "p")
        return cls(D=2.0 * p * (1.0 - p), p=p, eps=math.sqrt(p * (1.0 - p)))


def pe_one_way(D: float) -> float:
    """Success probability of the forward-leg-only attack: 1/2 + sqrt(D(1-D))."""
    D = _check_unit_half(D, "D")
    return 0.5 + math.sqrt(D * (1.0 - D))


def posterior_match(eps1: float, eps2: float) -> float:
    """Success probability given two agreeing guesses with advantages eps1, eps2.

    Equals the Bayesian posterior of the agreed value:
    1/2 + (eps1 + eps2) / (1 + 4 eps1 eps2).  Reduces to 1/2 + eps1 when
    the second observation carries no information (eps2 = 0).
    """
    eps1 = _check_unit_half(eps1, "eps1")
    eps2 = _check_unit_half(eps2, "eps2")
    return 0.5 + (eps1 + eps2) / (1.0 + 4.0 * eps1 * eps2)


def pe_two_way_match(D: float) -> float:
    """Two-leg attack, agreeing guesses: 1/2 + sqrt(D/2)/(1/2 + D)."""
    D = _check_unit_half(D, "D")
    return 0.5 + math.sqrt(D / 2.0) / (0.5 + D)


def pe_two_way_mismatch(D: float) -> float:
    """Two-leg attack, disagreeing guesses (keep forward): 1/2 + sqrt(D/2)."""
    D = _check_unit_half(D, "D")
    return 0.5 + math.sqrt(D / 2.0)


def pe_two_way_avg(D: float) -> float:
    """Two-leg attack averaged over match/mismatch at weight 1/2 each:
    1/2 + sqrt(D/2)(3 + 2D) / (2(1 + 2D))."""
    D = _check_unit_half(D, "D")
    return 0.5 + math.sqrt(D / 2.0) * (3.0 + 2.0 * D) / (2.0 * (1.0 + 2.0 * D))


def pe_backward_hadamard(p: float) -> float:
    """Backward-leg success against a Bob who Hadamards half his resends:
    1/2 + sqrt(p(1-p))/2 (the advantage survives only on the plain half)."""
    p = _check_unit_half(p, "p")
    return 0.5 + math.sqrt(p * (1.0 - p)) / 2.0


def pe_two_way_match_H(D: float) -> float:
    """Two-leg attack vs Hadamard Bob, agreeing guesses:
    1/2 + 3 sqrt(D/2) / (2 + 2D)  (match posterior with eps2 halved)."""
    D = _check_unit_half(D, "D")
    return 0.5 + 3.0 * math.sqrt(D / 2.0) / (2.0 + 2.0 * D)


def pe_two_way_avg_H(D: float) -> float:
    """Two-leg attack vs Hadamard Bob, match/mismatch averaged:
    1/2 + sqrt(D/2)(5 + 2D) / (4 + 4D)."""
    D = _check_unit_half(D, "D")
    return 0.5 + math.sqrt(D / 2.0) * (5.0 + 2.0 * D) / (4.0 + 4.0 * D)


@lru_cache(maxsize=1)
def crossover_disturbance() -> float:
    """Disturbance D* where the averaged two-way attack stops beating the
    one-way attack, i.e. the root of pe_two_way_avg(D) - pe_one_way(D).

    Bracketing bisection on [1e-6, 0.4999]; the bracket must show a sign
    change.  The root satisfies (3 + 2D*)^2 = 8(1 - D*)(1 + 2D*)^2 and is
    ~0.0877.
    """

    def gap(D: float) -> float:
        return pe_two_way_avg(D) - pe_one_way(D)

    lo, hi = _CROSSOVER_BRACKET
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0.0) == (g_hi > 0.0):
        raise RuntimeError("crossover bracket lost its sign change")
    while hi - lo > _CROSSOVER_TOL:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CurvePoint:
    """All closed-form success probabilities and advantages at one D."""

    d: float
    pe1: float
    a1: float
    pe2_match: float
    a2_match: float
    pe2_mismatch: float
    a2_mismatch: float
    pe2_avg: float
    a2_avg: float
    pe2_match_h: float
    a2_match_h: float
    pe2_avg_h: float
    a2_avg_h: float


def curve_point(D: float) -> CurvePoint:
    """Evaluate every closed form at one disturbance value."""
    D = _check_unit_half(D, "D")
    pe1 = pe_one_way(D)
    match = pe_two_way_match(D)
    mismatch = pe_two_way_mismatch(D)
    avg = pe_two_way_avg(D)
    match_h = pe_two_way_match_H(D)
    avg_h = pe_two_way_avg_H(D)
    return CurvePoint(
        d=D,
        pe1=pe1, a1=pe1 - 0.5,
        pe2_match=match, a2_match=match - 0.5,
        pe2_mismatch=mismatch, a2_mismatch=mismatch - 0.5,
        pe2_avg=avg, a2_avg=avg - 0.5,
        pe2_match_h=match_h, a2_match_h=match_h - 0.5,
        pe2_avg_h=avg_h, a2_avg_h=avg_h - 0.5,
    )


def sample_curve(d_min: float, d_max: float, steps: int) -> list[CurvePoint]:
    """Evaluate the closed forms on a uniform grid of `steps` points over
    [d_min, d_max], endpoints included."""
    d_min = _check_unit_half(d_min, "d_min")
    d_max = _check_unit_half(d_max, "d_max")
    if d_min >= d_max:
        raise DomainError(f"need d_min < d_max, got [{d_min!r}, {d_max!r}]")
    if steps < 2:
        raise DomainError(f"need steps >= 2, got {steps!r}")
    width = d_max - d_min
    return [curve_point(d_min + width * i / (steps - 1)) for i in range(steps)]
