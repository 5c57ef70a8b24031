import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_unit
from scopelab.errors import ValidationError
from scopelab.identities import (enumerate_perm_states, ghz_family, mixture_identity,
                                 random_identity_check, verify_sum_identities)
from scopelab.measures import degree_of_entanglement, degree_of_superposition

H = math.sqrt(0.5)


def _positive(rng, n):
    return np.abs(random_unit(rng, n, complex_=False)) + 0.0


class TestEnumeration:
    def test_qubits(self):
        reps = enumerate_perm_states((H, H), (H, H))
        assert [r.permutation for r in reps] == [(0, 1), (1, 0)]
        assert all(r.entanglement == pytest.approx(0.5) for r in reps)

    def test_qutrits_uniform(self):
        reps = enumerate_perm_states(np.full(3, 3 ** -0.5), np.full(3, 3 ** -0.5))
        assert len(reps) == 6
        assert all(r.entanglement == pytest.approx(1, abs=1e-12) for r in reps)

    def test_lexicographic(self, rng):
        reps = enumerate_perm_states(_positive(rng, 4), _positive(rng, 4))
        assert [r.permutation for r in reps] == list(itertools.permutations(range(4)))

    def test_hand_computed_entry(self):
        a, b = np.array([0.6, 0.8]), np.array([0.8, 0.6])
        cross = enumerate_perm_states(a, b)[1]
        c = np.array([0.6 * 0.6, 0.8 * 0.8])
        assert cross.beta == pytest.approx(np.sum(c ** 2))
        assert cross.alpha == pytest.approx(c[0] * c[1])

    def test_matches_measure(self, rng):
        for r in enumerate_perm_states(_positive(rng, 4), _positive(rng, 4)):
            assert r.entanglement == pytest.approx(degree_of_entanglement(r.branch_coeffs),
                                                   abs=1e-12)

    def test_cap(self):
        with pytest.raises(ValidationError, match="cap"):
            enumerate_perm_states(np.full(8, 8 ** -0.5), np.full(8, 8 ** -0.5))
        assert len(enumerate_perm_states(np.full(3, 3 ** -0.5), np.full(3, 3 ** -0.5),
                                         max_n=3)) == 6

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            enumerate_perm_states((H, H), np.full(3, 3 ** -0.5))


class TestSumIdentities:
    @pytest.mark.parametrize("n, beta", [(2, 1.0), (3, 2.0), (4, 6.0)])
    def test_constants(self, rng, n, beta):
        a, b = _positive(rng, n), _positive(rng, n)
        rep = verify_sum_identities(a, b)
        assert rep.sum_beta == pytest.approx(beta, abs=1e-12)
        eps = degree_of_superposition(a) * degree_of_superposition(b)
        assert rep.sum_alpha == pytest.approx(2 * math.factorial(n - 2) * eps, abs=1e-12)
        assert rep.max_abs_residual <= 1e-12

    def test_brute_force_oracle(self, rng):
        # recompute the sums straight from the definitions
        a, b = _positive(rng, 5), _positive(rng, 5)
        total_beta = total_alpha = 0.0
        for perm in itertools.permutations(range(5)):
            c = a * b[list(perm)]
            total_beta += np.sum(c ** 2)
            total_alpha += (np.sum(c) ** 2 - np.sum(c ** 2)) / 2
        rep = verify_sum_identities(a, b)
        assert rep.sum_beta == pytest.approx(total_beta, abs=1e-12)
        assert rep.sum_alpha == pytest.approx(total_alpha, abs=1e-12)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_random_draws(self, n):
        rep = random_identity_check(n, trials=100, seed=n)
        assert rep.trials == 100
        assert rep.max_abs_residual <= 1e-10

    def test_zero_coefficient(self):
        rep = verify_sum_identities((1, 0, 0), np.full(3, 3 ** -0.5))
        assert rep.max_abs_residual <= 1e-12

    def test_complex_inputs_use_moduli(self, rng):
        a = random_unit(rng, 3)
        b = random_unit(rng, 3)
        assert verify_sum_identities(a, b).max_abs_residual <= 1e-12


class TestMaximality:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_uniform_point(self, n):
        u = np.full(n, n ** -0.5)
        reps = enumerate_perm_states(u, u)
        assert all(abs(r.entanglement - (n - 1) / 2) <= 1e-12 for r in reps)
        for i in range(n):
            v = u.copy()
            v[i] += 1e-3
            v /= np.linalg.norm(v)
            worst = min(r.entanglement for r in enumerate_perm_states(v, u))
            assert worst < (n - 1) / 2

    def test_four_by_four(self):
        reps = enumerate_perm_states(np.full(4, 0.5), np.full(4, 0.5))
        assert len(reps) == 24
        for r in reps:
            assert (r.alpha, r.beta, r.entanglement) == pytest.approx((3 / 8, 1 / 4, 3 / 2),
                                                                      abs=1e-12)


class TestGHZ:
    @pytest.mark.parametrize("m, want", [(2, 1 / 4), (3, 1 / 8), (5, 1 / 32)])
    def test_uniform(self, m, want):
        reports, e = ghz_family([(H, H)] * m)
        assert len(reports) == 2 ** (m - 1)
        assert e == pytest.approx(want, abs=1e-12)

    def test_three_party_states(self):
        reports, _ = ghz_family([(H, H)] * 3)
        assert [r.pattern for r in reports] == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
        assert all(r.entanglement == pytest.approx(0.5) for r in reports)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.01, math.pi / 2 - 0.01), min_size=2, max_size=6))
    def test_product_of_superpositions(self, angles):
        parties = [(math.cos(t), math.sin(t)) for t in angles]
        _, e = ghz_family(parties)
        assert e == pytest.approx(math.prod(degree_of_superposition(p) for p in parties),
                                  abs=1e-12)

    def test_zero_coefficient(self):
        assert ghz_family([(1, 0), (H, H)])[1] == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            ghz_family([(H, H)])
        with pytest.raises(ValidationError):
            ghz_family([(H, H), (0.6, 0.8, 0.0)])


class TestMixture:
    def test_equal(self):
        assert mixture_identity(0.5, 0.5, 0.5, 0.5) == pytest.approx((0.5, 0.5))

    def test_degenerate(self):
        lhs, rhs = mixture_identity(0.3, 0.1, 1.0, 0.0)
        assert lhs == pytest.approx(0.3) and rhs == pytest.approx(0.3)

    @settings(max_examples=500, deadline=None)
    @given(st.floats(0, 5), st.floats(0, 5), st.floats(0, 1))
    def test_identity(self, e_d, e_c, p1):
        if e_d + e_c == 0:
            return
        lhs, rhs = mixture_identity(e_d, e_c, p1, 1 - p1)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, e_d + e_c)

    @pytest.mark.parametrize("args", [(0, 0, 0.5, 0.5), (-1, 1, 0.5, 0.5), (1, 1, 0.7, 0.7)])
    def test_validation(self, args):
        with pytest.raises(ValidationError):
            mixture_identity(*args)
