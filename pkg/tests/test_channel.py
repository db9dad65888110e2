"""Channel model tests: sampling laws, the combination rule, and the exact
divergence between the two combination modes."""

import math

import numpy as np
import pytest

from sqkd_eve.analytic import pe_backward_hadamard, pe_two_way_avg, posterior_match
from sqkd_eve.channel import (
    CombinationMode,
    Direction,
    DirectionalObservation,
    backward_advantage_hadamard,
    combine_guesses,
    derive_rng,
    enumerate_independent_success,
    sample_combined_correct,
    sample_flip,
    sample_guess,
)
from sqkd_eve.errors import DomainError

TRIALS = 10**6


def obs(direction, guess, advantage=0.3):
    return DirectionalObservation(direction, guess, advantage)


class TestDerivedStreams:
    def test_same_key_same_stream(self):
        a = derive_rng(42, 7).random(16)
        b = derive_rng(42, 7).random(16)
        assert np.array_equal(a, b)

    def test_different_run_index_different_stream(self):
        a = derive_rng(42, 0).random(16)
        b = derive_rng(42, 1).random(16)
        assert not np.array_equal(a, b)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            derive_rng(-1)


class TestSampleFlip:
    def test_never_flips_at_zero(self):
        rng = derive_rng(0)
        assert not sample_flip(0.0, rng, size=10**4).any()

    def test_fair_coin(self):
        mean = sample_flip(0.5, derive_rng(1), size=TRIALS).mean()
        assert abs(mean - 0.5) <= 0.002

    def test_low_rate(self):
        mean = sample_flip(0.1, derive_rng(2), size=TRIALS).mean()
        assert abs(mean - 0.1) <= 0.001  # 3 sigma ~ 0.0009

    def test_scalar_form(self):
        assert sample_flip(0.0, derive_rng(3)) == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_flip(0.7, derive_rng(0))

    def test_cascade_matches_roundtrip_rate(self):
        # two independent transits: exact enumeration ...
        p = 0.1
        exact = p * (1 - p) + (1 - p) * p
        assert exact == pytest.approx(2 * p * (1 - p), abs=1e-15)
        # ... and empirically
        rng = derive_rng(4)
        flips = sample_flip(p, rng, size=TRIALS) ^ sample_flip(p, rng, size=TRIALS)
        sigma3 = 3 * math.sqrt(exact * (1 - exact) / TRIALS)
        assert abs(flips.mean() - exact) <= sigma3


class TestSampleGuess:
    def test_certain(self):
        guesses = sample_guess(np.ones(100, dtype=np.uint8), 0.5, derive_rng(5), 100)
        assert guesses.all()

    def test_uninformative(self):
        truth = np.zeros(TRIALS, dtype=np.uint8)
        rate = (sample_guess(truth, 0.0, derive_rng(6), TRIALS) == truth).mean()
        assert abs(rate - 0.5) <= 0.002

    def test_advantage(self):
        truth = derive_rng(7).integers(0, 2, TRIALS).astype(np.uint8)
        rate = (sample_guess(truth, 0.3, derive_rng(8), TRIALS) == truth).mean()
        assert abs(rate - 0.8) <= 0.002

    def test_scalar_form(self):
        assert sample_guess(1, 0.5, derive_rng(9)) == 1

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_guess(0, 0.6, derive_rng(0))


class TestCombineRule:
    def test_agreement(self):
        assert combine_guesses(obs(Direction.FORWARD, 0), obs(Direction.BACKWARD, 0)) == 0
        assert combine_guesses(obs(Direction.FORWARD, 1), obs(Direction.BACKWARD, 1)) == 1

    def test_disagreement_keeps_forward(self):
        assert combine_guesses(obs(Direction.FORWARD, 1), obs(Direction.BACKWARD, 0)) == 1
        assert combine_guesses(obs(Direction.FORWARD, 0), obs(Direction.BACKWARD, 1)) == 0

    def test_absent_backward(self):
        assert combine_guesses(obs(Direction.FORWARD, 1)) == 1

    def test_observation_validation(self):
        with pytest.raises(DomainError):
            DirectionalObservation(Direction.FORWARD, 2, 0.1)
        with pytest.raises(DomainError):
            DirectionalObservation(Direction.FORWARD, 0, 0.7)


class TestPaperWeightsSampling:
    def test_reproduces_average_closed_form(self):
        for d, seed in [(0.05, 10), (0.1, 11)]:
            eps = math.sqrt(d / 2)
            correct, _ = sample_combined_correct(
                eps, eps, CombinationMode.PAPER_WEIGHTS, derive_rng(seed), TRIALS
            )
            expected = pe_two_way_avg(d)
            sigma3 = 3 * math.sqrt(expected * (1 - expected) / TRIALS)
            assert abs(correct.mean() - expected) <= sigma3

    def test_match_rate_is_half(self):
        _, match = sample_combined_correct(
            0.2, 0.2, CombinationMode.PAPER_WEIGHTS, derive_rng(12), TRIALS
        )
        assert abs(match.mean() - 0.5) <= 0.002

    def test_match_conditional_rate_is_posterior(self):
        eps = math.sqrt(0.05)
        correct, match = sample_combined_correct(
            eps, eps, CombinationMode.PAPER_WEIGHTS, derive_rng(13), TRIALS
        )
        rate = correct[match].mean()
        expected = posterior_match(eps, eps)
        assert abs(rate - expected) <= 3 * math.sqrt(
            expected * (1 - expected) / match.sum()
        )


class TestIndependentSampling:
    def test_enumeration_is_exactly_forward_rate(self):
        eps_grid = [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
        for eps1 in eps_grid:
            for eps2 in eps_grid:
                assert enumerate_independent_success(eps1, eps2) == pytest.approx(
                    0.5 + eps1, abs=1e-12
                )

    def test_sampling_matches_enumeration(self):
        correct, _ = sample_combined_correct(
            0.3, 0.2, CombinationMode.INDEPENDENT, derive_rng(14), TRIALS
        )
        assert abs(correct.mean() - 0.8) <= 3 * math.sqrt(0.8 * 0.2 / TRIALS)

    def test_match_rate_exceeds_half(self):
        # independent guesses agree with probability 1/2 + 2*eps1*eps2
        eps1, eps2 = 0.3, 0.2
        _, match = sample_combined_correct(
            eps1, eps2, CombinationMode.INDEPENDENT, derive_rng(15), TRIALS
        )
        expected = 0.5 + 2 * eps1 * eps2
        assert abs(match.mean() - expected) <= 3 * math.sqrt(
            expected * (1 - expected) / TRIALS
        )

    def test_modes_diverge(self):
        # the two joint laws produce measurably different success rates
        d = 0.1
        eps = math.sqrt(d / 2)
        assert pe_two_way_avg(d) - (0.5 + eps) > 0.07


class TestBackwardAdvantageHadamard:
    def test_hadamard_blinds(self):
        assert backward_advantage_hadamard(0.1, True) == 0.0
        assert backward_advantage_hadamard(0.5, True) == 0.0

    def test_plain_resend(self):
        assert backward_advantage_hadamard(0.1, False) == pytest.approx(0.3, abs=1e-12)

    def test_fair_coin_average_matches_closed_form(self):
        p = 0.1
        rng = derive_rng(16)
        hadamards = rng.integers(0, 2, TRIALS).astype(bool)
        adv = np.where(hadamards, 0.0, backward_advantage_hadamard(p, False))
        truth = rng.integers(0, 2, TRIALS).astype(np.uint8)
        correct = rng.random(TRIALS) < 0.5 + adv
        expected = pe_backward_hadamard(p)
        assert expected == 0.65
        assert abs(correct.mean() - expected) <= 0.002

    def test_domain(self):
        with pytest.raises(DomainError):
            backward_advantage_hadamard(0.9, False)


class TestDeterminism:
    def test_identical_seeds_identical_streams(self):
        a = sample_flip(0.3, derive_rng(99, 1), size=1000)
        b = sample_flip(0.3, derive_rng(99, 1), size=1000)
        assert np.array_equal(a, b)

    def test_combined_sampling_deterministic(self):
        kwargs = dict(size=1000)
        a, am = sample_combined_correct(
            0.2, 0.1, CombinationMode.PAPER_WEIGHTS, derive_rng(7, 3), **kwargs
        )
        b, bm = sample_combined_correct(
            0.2, 0.1, CombinationMode.PAPER_WEIGHTS, derive_rng(7, 3), **kwargs
        )
        assert np.array_equal(a, b) and np.array_equal(am, bm)
