import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cfminmax.channel import (channel_vector, db_to_linear, draw_channels, linear_to_db,
                              noise_variance, path_loss_dB, sample_shadowing,
                              sample_small_scale, shadow_covariance, shadowing_factor)
from cfminmax.network import make_layout

N_DRAWS = 10_000


def _pl_reference(d, f):
    return -36.7 * math.log10(d) - 22.7 * math.log10(f)


class TestPathLoss:
    def test_100m(self):
        assert path_loss_dB(100.0, 1.9) == pytest.approx(-79.7276, abs=1e-3)
        assert path_loss_dB(100.0, 1.9) == pytest.approx(_pl_reference(100.0, 1.9), rel=1e-14)

    def test_unit_distance_and_frequency(self):
        assert path_loss_dB(1.0, 1.0) == 0.0

    def test_10m(self):
        assert path_loss_dB(10.0, 1.9) == pytest.approx(-43.0276, abs=1e-3)

    def test_nonpositive_distance(self):
        with pytest.raises(ValueError):
            path_loss_dB(0.0)

    @given(st.floats(1.0, 1e4), st.floats(1.0, 1e4))
    def test_monotone_in_distance(self, a, b):
        if a < b:
            assert path_loss_dB(a) >= path_loss_dB(b)


class TestShadowCovariance:
    def test_entries(self):
        cov = shadow_covariance(distances=np.array([[0.0, 9.0], [9.0, 0.0]]), r0=9.0)
        assert cov[0, 0] == pytest.approx(16.0)
        assert cov[0, 1] == pytest.approx(8.0)

    def test_wrapped_positions(self):
        cov = shadow_covariance(np.array([[0.0, 0.0], [991.0, 0.0]]), side_length=1000.0)
        assert cov[0, 1] == pytest.approx(8.0)

    def test_factor_reproduces(self, rng):
        P = rng.uniform(0, 50, size=(6, 2))
        cov = shadow_covariance(P)
        L = shadowing_factor(cov)
        np.testing.assert_allclose(L @ L.T, cov, atol=1e-9)

    def test_singular_factor(self):
        cov = shadow_covariance(distances=np.zeros((3, 3)))
        L = shadowing_factor(cov)
        np.testing.assert_allclose(L @ L.T, cov, atol=1e-9)

    def test_indefinite_rejected(self):
        with pytest.raises(ArithmeticError):
            shadowing_factor(np.array([[1.0, 0.0], [0.0, -1.0]]))


class TestShadowSampling:
    def test_independent_variance(self):
        z = sample_shadowing(16 * np.eye(3), np.random.default_rng(1), n_aps=N_DRAWS)
        assert np.all(np.abs(z.var(axis=1) / 16 - 1) < 0.15)

    def test_correlated_pair(self):
        cov = shadow_covariance(distances=np.array([[0.0, 9.0], [9.0, 0.0]]))
        z = sample_shadowing(cov, np.random.default_rng(2), n_aps=N_DRAWS)
        assert np.cov(z)[0, 1] == pytest.approx(8.0, rel=0.15)

    def test_zero_covariance(self, rng):
        np.testing.assert_array_equal(sample_shadowing(np.zeros((3, 3)), rng), 0.0)


class TestSmallScale:
    def test_energy_and_mean(self):
        g = sample_small_scale(4, np.random.default_rng(5), size=N_DRAWS)
        assert g.shape == (N_DRAWS, 4)
        assert np.mean(np.sum(np.abs(g) ** 2, axis=1)) == pytest.approx(4.0, rel=0.05)
        # each real/imag part has variance 1/2
        sem = np.sqrt(0.5 / N_DRAWS)
        assert np.all(np.abs(g.mean(axis=0).real) < 3 * sem)
        assert np.all(np.abs(g.mean(axis=0).imag) < 3 * sem)

    def test_deterministic(self):
        a = sample_small_scale(4, np.random.default_rng(8))
        b = sample_small_scale(4, np.random.default_rng(8))
        np.testing.assert_array_equal(a, b)

    def test_rejects_zero_antennas(self, rng):
        with pytest.raises(ValueError):
            sample_small_scale(0, rng)


class TestChannelVector:
    def test_identity(self, rng):
        g = sample_small_scale(3, rng)
        np.testing.assert_array_equal(channel_vector(1.0, g), g)

    def test_zero(self, rng):
        np.testing.assert_array_equal(channel_vector(0.0, sample_small_scale(3, rng)), 0)

    def test_amplitude_scaling(self):
        out = channel_vector(4.0, np.array([1, 0, 0, 0], dtype=complex))
        np.testing.assert_array_equal(out, [2, 0, 0, 0])

    def test_negative_beta(self):
        with pytest.raises(ValueError):
            channel_vector(-1.0, np.ones(2, dtype=complex))

    def test_mean_gain(self):
        beta = 3e-9
        g = sample_small_scale(4, np.random.default_rng(11), size=N_DRAWS)
        h = channel_vector(beta, g)
        assert np.mean(np.sum(np.abs(h) ** 2, axis=1)) == pytest.approx(4 * beta, rel=0.05)


@given(st.floats(-300.0, 300.0))
def test_db_roundtrip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_noise_variance():
    assert noise_variance(20e6, 9.0, -174.0) == pytest.approx(20e6 * 10 ** -19.5, rel=1e-14)


def test_cross_ap_shadowing_uncorrelated():
    cov = shadow_covariance(distances=np.array([[0.0, 9.0], [9.0, 0.0]]))
    z = sample_shadowing(cov, np.random.default_rng(4), n_aps=2 * N_DRAWS)
    z = z.reshape(2, N_DRAWS, 2)
    # user 0 at AP 0 vs user 0 at AP 1; the estimator's std is about 16/sqrt(n)
    c = np.mean(z[0, :, 0] * z[0, :, 1])
    assert abs(c) < 3 * 16 / np.sqrt(N_DRAWS)


def test_draw_channels_shapes(rng):
    lay = make_layout(5, 3, 1000.0, rng)
    ch = draw_channels(lay, 2, rng, slot_index=7)
    assert ch.h.shape == (3, 5, 2)
    assert ch.large_scale.beta_dB.shape == (3, 5)
    assert ch.slot_index == 7
    assert np.all(ch.gains() > 0)
