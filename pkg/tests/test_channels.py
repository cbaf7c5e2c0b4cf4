#!/usr/bin/env python
"""Tests for the channels on diagonal states."""

import itertools
import math
import unittest

import numpy as np

# Sets up shared fixtures and helpers
import testutils as tu

from hbacsim import channels, state
from hbacsim.error import ChannelError, IndexRangeError

BATH = state.BathSpec(0.1)
NOE_RATIO = math.exp(4 * math.atanh(0.1))


class TestPermutation(unittest.TestCase):
    def test_identity(self):
        s = state.DiagonalState(tu.POST_REFRESH)
        np.testing.assert_array_equal(channels.apply_permutation(s, range(4)).p, s.p)

    def test_compression_swap(self):
        s = state.DiagonalState(tu.POST_REFRESH)
        out = channels.apply_permutation(s, [0, 2, 1, 3])
        np.testing.assert_array_equal(out.p, tu.POST_SORT)

    def test_multiset_invariant(self):
        rng = np.random.default_rng(1)
        s = tu.random_state(rng, 4)
        out = channels.apply_permutation(s, rng.permutation(16))
        np.testing.assert_array_equal(np.sort(out.p), np.sort(s.p))

    def test_not_bijective(self):
        s = state.maximally_mixed(2)
        with self.assertRaises(ChannelError):
            channels.apply_permutation(s, [0, 0, 1, 2])
        with self.assertRaises(ChannelError):
            channels.apply_permutation(s, [0, 1, 2])


class TestSortStep(unittest.TestCase):
    def test_sorted_unchanged(self):
        s = state.DiagonalState([0.4, 0.3, 0.2, 0.1])
        np.testing.assert_array_equal(channels.sort_step(s).p, s.p)

    def test_compression(self):
        out = channels.sort_step(state.DiagonalState(tu.POST_REFRESH))
        np.testing.assert_array_equal(out.p, tu.POST_SORT)
        self.assertEqual(state.qubit_polarization(out, 1), 0.0)

    def test_exhaustive_argmax(self):
        rng = np.random.default_rng(2)
        s = tu.random_state(rng, 2)
        best = state.qubit_polarization(channels.sort_step(s), 0)
        for perm in itertools.permutations(range(4)):
            pol = state.qubit_polarization(channels.apply_permutation(s, perm), 0)
            self.assertLessEqual(pol, best + 1e-15)

    def test_sampled_argmax(self):
        rng = np.random.default_rng(3)
        s = tu.random_state(rng, 3)
        best = state.qubit_polarization(channels.sort_step(s), 0)

        # Vectorized: population p[k] lands on perm[k], whose top bit sets the sign.
        perms = np.array([rng.permutation(8) for _ in range(10**4)])
        signs = np.where(perms < 4, 1.0, -1.0)
        pols = (signs * s.p[None, :]).sum(axis=1)
        self.assertLessEqual(pols.max(), best + 1e-15)


class TestRefreshReset(unittest.TestCase):
    def test_polarizes_reset_qubit(self):
        out = channels.refresh_reset(state.maximally_mixed(2), 1, BATH)
        np.testing.assert_allclose(out.p, tu.POST_REFRESH, atol=1e-15)

    def test_uncorrelated_unchanged(self):
        s = state.tensor(state.DiagonalState([0.7, 0.3]), state.thermal_qubit(BATH))
        np.testing.assert_allclose(channels.refresh_reset(s, 1, BATH).p, s.p, atol=1e-14)

    def test_drops_correlations(self):
        out = channels.refresh_reset(state.DiagonalState([0.5, 0.0, 0.0, 0.5]), 1, BATH)
        np.testing.assert_allclose(out.p, tu.POST_REFRESH, atol=1e-15)
        self.assertEqual(state.qubit_polarization(out, 0), 0.0)

    def test_single_qubit(self):
        out = channels.refresh_reset(state.DiagonalState([1.0, 0.0]), 0, BATH)
        np.testing.assert_allclose(out.p, [0.55, 0.45], atol=1e-15)

    def test_several_qubits(self):
        out = channels.refresh_resets(state.maximally_mixed(3), [2, 1], BATH)
        np.testing.assert_allclose(
            state.polarizations(out), [0.0, 0.1, 0.1], atol=1e-15
        )

    def test_index_range(self):
        with self.assertRaises(IndexRangeError):
            channels.refresh_reset(state.maximally_mixed(2), 2, BATH)


class TestStateReset(unittest.TestCase):
    def test_equalization(self):
        s = state.DiagonalState([0.4, 0.3, 0.2, 0.1])
        out = channels.state_reset(s, 0, 3, 1.0)
        np.testing.assert_allclose(out.p, [0.25, 0.3, 0.2, 0.25], atol=1e-15)

    def test_doubled_boltzmann_ratio(self):
        out = channels.state_reset(state.maximally_mixed(2), 0, 3, NOE_RATIO)
        self.assertAlmostEqual(NOE_RATIO, 1.49384, delta=2e-5)
        np.testing.assert_allclose(out.p, [0.29950, 0.25, 0.25, 0.20050], atol=1e-5)
        self.assertAlmostEqual(out.p[0] / out.p[3], NOE_RATIO, delta=1e-12)

    def test_others_untouched(self):
        rng = np.random.default_rng(4)
        s = tu.random_state(rng, 3)
        out = channels.state_reset(s, 2, 5, 3.0)
        for k in (0, 1, 3, 4, 6, 7):
            self.assertEqual(out.p[k], s.p[k])

    def test_empty_pair(self):
        s = state.DiagonalState([0.5, 0.5, 0.0, 0.0])
        out = channels.state_reset(s, 2, 3, 2.0)
        np.testing.assert_array_equal(out.p, s.p)

    def test_errors(self):
        s = state.maximally_mixed(2)
        with self.assertRaises(ChannelError):
            channels.state_reset(s, 1, 1, 2.0)
        with self.assertRaises(ChannelError):
            channels.state_reset(s, 0, 3, 0.0)
        with self.assertRaises(IndexRangeError):
            channels.state_reset(s, 0, 4, 2.0)


class TestSaturate(unittest.TestCase):
    def test_balanced_unchanged(self):
        s = state.DiagonalState(tu.POST_SORT)
        np.testing.assert_array_equal(channels.saturate(s, 1).p, s.p)

    def test_pairwise_average(self):
        s = state.DiagonalState([0.29950, 0.25, 0.25, 0.20050])
        out = channels.saturate(s, 1)
        np.testing.assert_allclose(out.p, [0.27475, 0.27475, 0.22525, 0.22525], atol=1e-15)
        self.assertAlmostEqual(state.qubit_polarization(out, 0), 0.0990, delta=1e-12)

    def test_zeroes_polarization(self):
        rng = np.random.default_rng(6)
        for n in range(1, 6):
            s = tu.random_state(rng, n)
            for q in range(n):
                self.assertLessEqual(
                    abs(state.qubit_polarization(channels.saturate(s, q), q)), 1e-15
                )

    def test_commutes(self):
        rng = np.random.default_rng(8)
        s = tu.random_state(rng, 3)
        a = channels.saturate(channels.saturate(s, 0), 2)
        b = channels.saturate(channels.saturate(s, 2), 0)
        np.testing.assert_allclose(a.p, b.p, atol=1e-15)

    def test_index_range(self):
        with self.assertRaises(IndexRangeError):
            channels.saturate(state.maximally_mixed(2), 5)


class TestProtocolSteps(unittest.TestCase):
    def test_compose_first_ppa_round(self):
        steps = [channels.Reset((1,), BATH), channels.Sort()]
        out = channels.apply_steps(state.maximally_mixed(2), steps)
        np.testing.assert_allclose(out.p, tu.POST_SORT, atol=1e-15)

    def test_compose_noe_round(self):
        steps = [channels.StateReset(0, 3, NOE_RATIO), channels.Saturate(1)]
        out = channels.apply_steps(state.maximally_mixed(2), steps)
        self.assertAlmostEqual(state.qubit_polarization(out, 0), 0.2 / 2.02, delta=1e-14)

    def test_permute_step(self):
        step = channels.Permute([0, 2, 1, 3])
        out = step.apply(state.DiagonalState(tu.POST_REFRESH))
        np.testing.assert_array_equal(out.p, tu.POST_SORT)

    def test_invalid_steps(self):
        with self.assertRaises(ChannelError):
            channels.Reset((), BATH)
        with self.assertRaises(ChannelError):
            channels.StateReset(1, 1, 2.0)
        with self.assertRaises(ChannelError):
            channels.StateReset(0, 3, -1.0)
        with self.assertRaises(ChannelError):
            channels.Permute([1, 1])


if __name__ == "__main__":
    unittest.main()
