import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import centered, crandn, cyclic_convolve as conv_loop, mixed_norm as mixed_loop

from owtf.errors import DimensionMismatchError, InvalidGridError, SpecError
from owtf.grid import (
    MODERATE,
    MixedNormParams,
    PhaseGrid,
    WeightGrid,
    centered_rep,
    check_submultiplicative,
    conjugate_exponent,
    cyclic_convolve,
    mixed_norm,
    moderate_constant,
    moderate_constant_pair,
    parse_exponent,
    parse_weight,
    polynomial_weight,
    reflect,
    translate,
    unit_weight,
)
from owtf.io import write_array

EXPONENTS = [1.0, 1.5, 2.0, 3.0, math.inf]


class TestPhaseGrid:
    @pytest.mark.parametrize("bad", [0, 1, -3, 2.5, True])
    def test_rejects_bad_sides(self, bad):
        with pytest.raises(InvalidGridError):
            PhaseGrid(bad)

    def test_group_law(self):
        g = PhaseGrid(7)
        assert g.add((5, 6), (4, 3)) == (2, 2)
        assert g.sub((1, 0), (3, 5)) == (5, 2)
        assert g.neg((0, 3)) == (0, 4)
        assert len(list(g.points())) == 49
        assert g.odd and not PhaseGrid(8).odd

    @pytest.mark.parametrize("N", [2, 7, 8, 15])
    def test_centered_rep_matches_loop(self, N):
        got = centered_rep(np.arange(-N, 2 * N), N)
        want = [centered(t, N) for t in range(-N, 2 * N)]
        assert list(got) == want
        assert np.all(np.abs(got) <= N // 2)


class TestWeights:
    def test_unit_weight(self):
        w = unit_weight(6)
        assert w.label == "one" and w.symmetric and np.all(w.values == 1)

    def test_values_are_frozen(self):
        w = polynomial_weight(5, 1.0)
        with pytest.raises(ValueError):
            w.values[0, 0] = 3.0

    @pytest.mark.parametrize("bad", [np.zeros((4, 4)), -np.ones((4, 4)), np.full((4, 4), np.inf)])
    def test_rejects_non_positive(self, bad):
        with pytest.raises(ValueError):
            WeightGrid(bad)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            WeightGrid(np.ones((3, 4)))

    def test_polynomial_values(self):
        w = polynomial_weight(9, 2.0)
        assert w.values[0, 0] == 1.0
        assert w.values[8, 1] == pytest.approx(3.0)  # (-1, 1): 1 + 1 + 1
        assert w.symmetric

    def test_symmetry_flag(self):
        assert polynomial_weight(8, 1.0).symmetric
        assert polynomial_weight(9, 1.0).symmetric
        c = centered_rep(np.arange(8), 8)
        assert not WeightGrid(np.exp(0.1 * c)[:, None] * np.ones((1, 8))).symmetric

    def test_parse_weight(self, tmp_path):
        assert parse_weight("one", 5).label == "one"
        assert parse_weight("poly:1.5", 5).label == "poly:1.5"
        path = tmp_path / "w.owtf"
        write_array(path, 2 * np.ones((5, 5)))
        assert np.all(parse_weight(f"file:{path}", 5).values == 2)
        with pytest.raises(DimensionMismatchError):
            parse_weight(f"file:{path}", 6)
        for bad in ("poly:x", "exp:1", ""):
            with pytest.raises(SpecError):
                parse_weight(bad, 5)

    def test_reciprocal_and_moderate(self):
        w = polynomial_weight(5, 1.0)
        assert np.allclose(w.reciprocal().values * w.values, 1)
        assert w.as_moderate().kind == MODERATE


class TestSubmultiplicative:
    def test_unit_weight_passes(self):
        res = check_submultiplicative(unit_weight(8))
        assert res.passed and res.worst_ratio == 1.0

    @pytest.mark.parametrize("N", [8, 15])
    def test_polynomial_weight_fails_on_grid(self, N):
        # (1 + |z|^2)^{1/2} at z1 = z2 = (0, 1): sqrt(5) / 2 > 1. Loop oracle agrees.
        res = check_submultiplicative(polynomial_weight(N, 1.0))
        assert not res.passed
        assert res.worst_ratio == pytest.approx(math.sqrt(5) / 2, rel=1e-15)
        assert res.worst_pair == ((0, 1), (0, 1))

    def test_exponential_type_weight_passes(self):
        # e^{|c_k| + |c_l|} is submultiplicative because |c(a+b)| <= |c(a)| + |c(b)|
        N = 9
        c = np.abs(centered_rep(np.arange(N), N))
        w = WeightGrid(np.exp(0.3 * (c[:, None] + c[None, :])))
        assert check_submultiplicative(w).passed

    def test_moderate_constant_matches_loop(self):
        N = 7
        m = polynomial_weight(N, 2.0, MODERATE)
        v = polynomial_weight(N, 1.0)
        best = max(
            m.values[(a + c) % N, (b + d) % N] / (v.values[a, b] * m.values[c, d])
            for a in range(N) for b in range(N) for c in range(N) for d in range(N)
        )
        C, (z1, z2) = moderate_constant_pair(m, v)
        assert C == pytest.approx(best, rel=1e-14)
        s = ((z1[0] + z2[0]) % N, (z1[1] + z2[1]) % N)
        assert m.values[s] / (v.values[z1] * m.values[z2]) == pytest.approx(C, rel=1e-14)

    def test_moderate_constant_of_reciprocal(self):
        v = polynomial_weight(9, 1.0)
        assert moderate_constant(v.reciprocal(), v) >= 1.0

    def test_mismatched_grids(self):
        with pytest.raises(DimensionMismatchError):
            moderate_constant(unit_weight(4), unit_weight(5))


class TestMixedNorms:
    def test_parse_exponent(self):
        assert parse_exponent("inf") == math.inf
        assert parse_exponent("∞") == math.inf
        assert parse_exponent("1.5") == 1.5
        assert parse_exponent(2) == 2.0

    @pytest.mark.parametrize("p,q", [(1, math.inf), (math.inf, 1), (2, 2), (4, 4 / 3)])
    def test_conjugate(self, p, q):
        assert conjugate_exponent(p) == pytest.approx(q)

    @pytest.mark.parametrize("p", [0.5, float("nan")])
    def test_rejects_small_exponents(self, p):
        with pytest.raises(ValueError):
            MixedNormParams(p, 2, unit_weight(4))

    @pytest.mark.parametrize("p", EXPONENTS)
    @pytest.mark.parametrize("q", EXPONENTS)
    def test_matches_loop(self, rng, p, q):
        N = 6
        F = crandn(rng, N, N)
        m = polynomial_weight(N, 1.0, MODERATE)
        assert mixed_norm(F, MixedNormParams(p, q, m)) == pytest.approx(mixed_loop(F, p, q, m.values), rel=1e-13)

    def test_inner_index_is_k(self):
        # mass in one row k = 0 spread over l: inner L^1 over k sees single entries
        F = np.zeros((4, 4))
        F[0, :] = 1.0
        assert mixed_norm(F, MixedNormParams.unweighted(1, math.inf, 4)) == 1.0
        assert mixed_norm(F, MixedNormParams.unweighted(math.inf, 1, 4)) == 4.0

    def test_extreme_magnitudes(self):
        F = np.full((5, 5), 1e200)
        assert mixed_norm(F, MixedNormParams.unweighted(3, 3, 5)) == pytest.approx(1e200 * 25 ** (1 / 3))
        assert mixed_norm(np.zeros((5, 5)), MixedNormParams.unweighted(2, 2, 5)) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            mixed_norm(np.ones((4, 4)), MixedNormParams.unweighted(2, 2, 5))

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        p=st.sampled_from(EXPONENTS),
        q=st.sampled_from(EXPONENTS),
        c=st.floats(-5, 5, allow_nan=False),
    )
    def test_norm_axioms(self, seed, p, q, c):
        rng = np.random.default_rng(seed)
        N = 5
        params = MixedNormParams(p, q, polynomial_weight(N, 1.0, MODERATE))
        F, G = crandn(rng, N, N), crandn(rng, N, N)
        nF, nG = mixed_norm(F, params), mixed_norm(G, params)
        assert mixed_norm(c * F, params) == pytest.approx(abs(c) * nF, rel=1e-12, abs=1e-300)
        assert mixed_norm(F + G, params) <= (nF + nG) * (1 + 1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from(EXPONENTS), q=st.sampled_from(EXPONENTS))
    def test_holder_duality(self, seed, p, q):
        rng = np.random.default_rng(seed)
        N = 5
        params = MixedNormParams(p, q, polynomial_weight(N, 1.0, MODERATE))
        F, G = crandn(rng, N, N), crandn(rng, N, N)
        assert abs(np.sum(F * G)) <= mixed_norm(F, params) * mixed_norm(G, params.dual()) * (1 + 1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), k=st.integers(-10, 10), l=st.integers(-10, 10),
           p=st.sampled_from(EXPONENTS), q=st.sampled_from(EXPONENTS))
    def test_unweighted_norm_is_translation_invariant(self, seed, k, l, p, q):
        F = crandn(np.random.default_rng(seed), 6, 6)
        params = MixedNormParams.unweighted(p, q, 6)
        assert mixed_norm(translate(F, (k, l)), params) == pytest.approx(mixed_norm(F, params), rel=1e-13)


class TestFieldOps:
    def test_translate_convention(self, rng):
        F = crandn(rng, 5, 5)
        T = translate(F, (2, 4))
        for a in range(5):
            for b in range(5):
                assert T[a, b] == F[(a - 2) % 5, (b - 4) % 5]

    def test_reflect(self, rng):
        F = crandn(rng, 6, 6)
        R = reflect(F)
        assert all(R[a, b] == F[-a % 6, -b % 6] for a in range(6) for b in range(6))
        assert np.array_equal(reflect(R), F)

    def test_cyclic_convolve_matches_loop(self, rng):
        F, G = crandn(rng, 5, 5), crandn(rng, 5, 5)
        assert np.allclose(cyclic_convolve(F, G), conv_loop(F, G), atol=1e-12)
        real = cyclic_convolve(F.real, G.real)
        assert np.isrealobj(real)

    def test_cyclic_convolve_shape_check(self):
        with pytest.raises(DimensionMismatchError):
            cyclic_convolve(np.ones((3, 3)), np.ones((4, 4)))
