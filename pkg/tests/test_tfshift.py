import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import crandn, gauss, rel, shift, shift_matrix, stft as stft_loop

from owtf.errors import DimensionMismatchError, InvalidGridError
from owtf.grid import MixedNormParams, polynomial_weight, unit_weight
from owtf.tfshift import (
    adjoint_shifts,
    all_shifts,
    as_signal,
    gaussian_window,
    m1v_norm,
    mod_norm,
    stft,
    tf_shift,
    tf_shift_matrix,
)

# Frozen from the loop oracle: sum_z |V_phi0 phi0(z)| and the poly:1 weighted version.
GAUSS_M1 = {8: 15.522112529091766, 15: 29.967846331831712}
GAUSS_M1V_POLY1_15 = 88.76799727905653


def test_as_signal_validation():
    with pytest.raises(DimensionMismatchError):
        as_signal(np.ones((2, 2)))
    with pytest.raises(InvalidGridError):
        as_signal(np.ones(1))
    with pytest.raises(DimensionMismatchError):
        as_signal(np.ones(4), 5)


@pytest.mark.parametrize("z", [(0, 0), (1, 0), (0, 1), (3, 5), (-2, 9)])
def test_tf_shift_matches_definition(rng, z):
    psi = crandn(rng, 7)
    assert np.allclose(tf_shift(z, psi), shift(z[0] % 7, z[1] % 7, psi), atol=1e-14)
    assert np.allclose(tf_shift_matrix(z, 7), shift_matrix(z[0] % 7, z[1] % 7, 7), atol=1e-14)


def test_composition_law():
    N = 9
    for z, w in [((1, 2), (3, 4)), ((5, 7), (8, 1)), ((0, 3), (2, 0))]:
        lhs = tf_shift_matrix(z, N) @ tf_shift_matrix(w, N)
        rhs = np.exp(-2j * np.pi * w[1] * z[0] / N) * tf_shift_matrix((z[0] + w[0], z[1] + w[1]), N)
        assert np.allclose(lhs, rhs, atol=1e-13)


def test_adjoint_formula():
    N = 8
    for k, l in [(1, 1), (3, 6), (7, 2)]:
        P = tf_shift_matrix((k, l), N)
        assert np.allclose(P.conj().T, np.exp(-2j * np.pi * k * l / N) * tf_shift_matrix((-k, -l), N), atol=1e-13)
        assert np.allclose(P.conj().T @ P, np.eye(N), atol=1e-13)


@pytest.mark.parametrize("N", [2, 5, 6])
def test_batched_shifts_match_matrices(rng, N):
    psi = crandn(rng, N)
    adj, fwd = adjoint_shifts(psi), all_shifts(psi)
    for k in range(N):
        for l in range(N):
            P = tf_shift_matrix((k, l), N)
            assert np.allclose(adj[k, l], P.conj().T @ psi, atol=1e-13)
            assert np.allclose(fwd[k, l], P @ psi, atol=1e-13)


@pytest.mark.parametrize("N", [2, 5, 8])
def test_stft_matches_loop(rng, N):
    psi, phi = crandn(rng, N), crandn(rng, N)
    assert rel(stft(psi, phi), stft_loop(psi, phi)) < 1e-13


def test_stft_grid_mismatch():
    with pytest.raises(DimensionMismatchError):
        stft(np.ones(4), np.ones(5))


@settings(max_examples=40, deadline=None)
@given(N=st.integers(2, 24), seed=st.integers(0, 2**32 - 1))
def test_moyal_property(N, seed):
    rng = np.random.default_rng(seed)
    psi, phi = crandn(rng, N), crandn(rng, N)
    total = np.sum(np.abs(stft(psi, phi)) ** 2)
    assert total == pytest.approx(N * np.linalg.norm(psi) ** 2 * np.linalg.norm(phi) ** 2, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 16), seed=st.integers(0, 2**32 - 1), k=st.integers(0, 40), l=st.integers(0, 40))
def test_stft_covariance(N, seed, k, l):
    # V_phi(pi(k, l) psi)(z) = e^{-2 pi i k (z_l - l) / N} V_phi psi(z - (k, l))
    rng = np.random.default_rng(seed)
    psi, phi = crandn(rng, N), crandn(rng, N)
    V = stft(psi, phi)
    Vs = stft(tf_shift((k, l), psi), phi)
    zl = np.arange(N)[None, :]
    expected = np.exp(-2j * np.pi * k * (zl - l) / N) * np.roll(V, (k, l), axis=(0, 1))
    assert rel(Vs, expected) < 1e-10


class TestGaussian:
    @pytest.mark.parametrize("N", [2, 3, 8, 15, 33, 64])
    def test_matches_loop_and_is_normalized(self, N):
        g = gaussian_window(N)
        assert np.allclose(g, gauss(N), atol=1e-15)
        assert np.linalg.norm(g) == pytest.approx(1.0, rel=1e-15)
        assert np.allclose(g, g[-np.arange(N) % N])

    @pytest.mark.parametrize("N", [5, 8, 15, 33])
    def test_fourier_invariance(self, N):
        # the periodized Gaussian of width sqrt(N) is fixed by the unitary DFT
        g = gaussian_window(N)
        assert np.allclose(np.fft.fft(g) / np.sqrt(N), g, atol=1e-12)

    def test_cache_not_mutable(self):
        g = gaussian_window(6)
        g[0] = 5
        assert gaussian_window(6)[0] != 5

    @pytest.mark.parametrize("N", [8, 15])
    def test_frozen_m1_norm(self, N):
        assert m1v_norm(gaussian_window(N), unit_weight(N)) == pytest.approx(GAUSS_M1[N], rel=1e-12)

    def test_frozen_weighted_m1_norm(self):
        assert m1v_norm(gaussian_window(15), polynomial_weight(15, 1.0)) == pytest.approx(GAUSS_M1V_POLY1_15, rel=1e-12)


class TestModNorm:
    @pytest.mark.parametrize("N", [8, 27])
    def test_l2_identity(self, rng, N):
        psi = crandn(rng, N)
        assert mod_norm(psi, MixedNormParams.unweighted(2, 2, N)) == pytest.approx(
            math.sqrt(N) * np.linalg.norm(psi), rel=1e-10)

    def test_weight_increases_norm(self, rng):
        psi = crandn(rng, 9)
        plain = mod_norm(psi, MixedNormParams.unweighted(1, 1, 9))
        weighted = mod_norm(psi, MixedNormParams(1, 1, polynomial_weight(9, 1.0).as_moderate()))
        assert weighted > plain

    def test_grid_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            mod_norm(crandn(rng, 5), MixedNormParams.unweighted(2, 2, 6))
