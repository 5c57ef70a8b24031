import math

import numpy as np
import pytest
from scipy.linalg import logm

from helpers import random_density, random_unit
from scopelab import numerics as nu
from scopelab.relent import (relative_entropy, relative_entropy_of_entanglement,
                             separable_from_params)
from scopelab.states import bell_state, build_family


def _scipy_relative_entropy(rho, sigma):
    return float(np.trace(rho @ (logm(rho) - logm(sigma))).real) / math.log(2)


def test_relative_entropy_matches_scipy(rng):
    for _ in range(5):
        rho, sigma = random_density(rng, 4), random_density(rng, 4)
        assert relative_entropy(rho, sigma) == pytest.approx(
            _scipy_relative_entropy(rho, sigma), abs=1e-9)


def test_relative_entropy_support():
    rho = np.diag([0.5, 0.5])
    assert relative_entropy(rho, np.diag([1.0, 0.0])) == math.inf
    assert relative_entropy(np.diag([1.0, 0.0]), rho) == pytest.approx(1.0)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-14)


def test_parameterized_states_are_separable(rng):
    for k in (1, 3, 8):
        sigma = separable_from_params(rng.normal(size=5 * k), k)
        assert np.trace(sigma).real == pytest.approx(1, abs=1e-12)
        assert nu.eigvalsh(sigma)[0] >= -1e-12
        assert nu.eigvalsh(nu.partial_transpose(sigma, (2, 2), 0))[0] >= -1e-12


def test_schmidt_state_against_oracle():
    psi = np.array([0.6, 0, 0, 0.8])
    res = relative_entropy_of_entanglement(np.outer(psi, psi))
    want = -(0.36 * math.log2(0.36) + 0.64 * math.log2(0.64))
    assert res.value == pytest.approx(want, rel=0.02)
    assert res.value >= want - 1e-9  # upper bound on the infimum
    assert res.value == pytest.approx(relative_entropy(np.outer(psi, psi), res.sigma), abs=1e-12)


def test_certificate_is_separable():
    res = relative_entropy_of_entanglement(bell_state(), budget=4000)
    assert res.evaluations <= 4000
    assert nu.eigvalsh(nu.partial_transpose(res.sigma, (2, 2), 0))[0] >= -1e-10
    assert res.value == pytest.approx(1.0, rel=0.02)


def test_separable_inputs_reach_zero():
    for rho in (np.eye(4) / 4,
                build_family("separable", weights=(0.5, 0.5), locals_a=[(1, 0), (0, 1)],
                             locals_b=[(1, 0), (0, 1)]).matrix):
        res = relative_entropy_of_entanglement(rho)
        assert res.value <= 1e-6


def test_deterministic_for_seed(rng):
    psi = random_unit(rng, 4)
    rho = np.outer(psi, psi.conj())
    a = relative_entropy_of_entanglement(rho, budget=3000, seed=4)
    b = relative_entropy_of_entanglement(rho, budget=3000, seed=4)
    assert a.value == b.value
    assert np.array_equal(a.sigma, b.sigma)


def test_rejects_wrong_size():
    with pytest.raises(ValueError):
        relative_entropy_of_entanglement(np.eye(3) / 3)
