import numpy as np
import pytest

from tentropy._validation import NEG_INF
from tentropy.dynamics import Measure, build_system, cycle_decomposition, cycle_measure, mix
from tentropy.errors import NotInvariant
from tentropy.transfer import from_weights, log_spectral_radius_cycles, tilt
from tentropy.varprinciple import (
    check_definition_equivalence,
    check_variational_principle,
    legendre_dual_tau,
)

from conftest import random_operator


def test_vp_mixed(mixed):
    rep = check_variational_principle(mixed, np.zeros(4))
    assert rep.lam == pytest.approx(np.log(2))
    assert [v for _, v in rep.per_cycle] == pytest.approx([0.0, np.log(2)])
    assert rep.gap == 0.0 and rep.passed
    assert rep.best_measure == [0, 0, 0, 1]


def test_vp_mixed_tilted(mixed):
    rep = check_variational_principle(mixed, [0, 0, 0, -2.0])
    assert rep.lam == 0.0
    assert rep.best_measure == [0.5, 0.5, 0, 0]
    assert rep.passed


def test_vp_identity_map():
    T = from_weights(build_system([0, 1]), [1.0, 1.0])
    rep = check_variational_principle(T, [0.3, 0.7])
    assert rep.lam == 0.7
    assert rep.best_measure == [0, 1]
    assert rep.per_cycle[1][1] == 0.7  # mu(phi) = 0.7, tau = 0
    assert rep.passed


def test_vp_all_neg_inf():
    T = from_weights(build_system([1, 0]), [0.0, 1.0])
    rep = check_variational_principle(T, [0.1, 0.2])
    assert rep.lam == NEG_INF and rep.best_value == NEG_INF
    assert rep.gap == 0.0 and rep.passed


def test_vp_random():
    rng = np.random.default_rng(1)
    for _ in range(30):
        T = random_operator(rng, 15, zero_prob=0.1)
        rep = check_variational_principle(T, rng.uniform(-1, 1, T.size), mixtures=30)
        assert rep.passed, rep


def test_tilt_coherence():
    rng = np.random.default_rng(2)
    for _ in range(50):
        T = random_operator(rng, 12, zero_prob=0.1)
        phi, psi = rng.uniform(-1, 1, T.size), rng.uniform(-1, 1, T.size)
        a = log_spectral_radius_cycles(T, phi).log_radius
        b = log_spectral_radius_cycles(tilt(T, psi), phi - psi).log_radius
        assert (b == NEG_INF) if a == NEG_INF else b == pytest.approx(a, abs=1e-12)


def test_equivalence_examples(mixed, three_cycle):
    rep = check_definition_equivalence(mixed, [0, 0, 0, 1.0], n_max=3, n_random=8)
    assert rep.passed
    assert rep.old_value == pytest.approx(np.log(2), abs=1e-9)
    assert rep.new_value == pytest.approx(np.log(2), abs=1e-12)
    rep = check_definition_equivalence(three_cycle, np.full(3, 1 / 3), n_max=3, n_random=8)
    assert rep.passed and rep.new_value == pytest.approx(1.0)
    assert rep.max_dominance_violation <= 1e-9


def test_equivalence_requires_invariance(mixed):
    with pytest.raises(NotInvariant):
        check_definition_equivalence(mixed, [0, 0, 1.0, 0])


def test_equivalence_neg_inf():
    T = from_weights(build_system([1, 0, 2]), [1.0, 0.0, 1.0])
    rep = check_definition_equivalence(T, [0.5, 0.5, 0], n_max=2, n_random=3)
    assert rep.old_value == NEG_INF and rep.new_value == NEG_INF and rep.passed


def test_legendre_examples(mixed):
    rep = legendre_dual_tau(mixed, [0, 0, 0, 1.0])
    assert rep.exact == pytest.approx(np.log(2))
    assert rep.agreed
    mu = mix([Measure([0.5, 0.5, 0, 0]), Measure([0, 0, 0, 1.0])], [0.5, 0.5])
    rep = legendre_dual_tau(mixed, mu)
    assert rep.exact == pytest.approx(0.5 * np.log(2))
    assert rep.exact == pytest.approx(0.34657359027997264)
    assert abs(rep.numeric - rep.exact) <= 1e-3
    # any objective value upper-bounds the infimum
    assert rep.numeric >= rep.exact - 1e-12


def test_legendre_unit_weights():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 10))
        T = from_weights(build_system(rng.integers(0, n, n)), np.ones(n))
        cycles = cycle_decomposition(T.system)
        mu = mix([cycle_measure(T.system, c) for c in cycles], rng.dirichlet(np.ones(len(cycles))))
        rep = legendre_dual_tau(T, mu)
        assert rep.exact == 0.0
        assert abs(rep.numeric) <= 1e-3


def test_legendre_neg_inf():
    T = from_weights(build_system([1, 0, 2]), [1.0, 0.0, 1.0])
    rep = legendre_dual_tau(T, [0.25, 0.25, 0.5])
    assert rep.value == NEG_INF and rep.numeric == NEG_INF
    # a zero-weight cycle that mu does not charge leaves the value finite
    rep = legendre_dual_tau(T, [0, 0, 1.0])
    assert rep.value == 0.0 and rep.agreed


def test_legendre_requires_invariance(mixed):
    with pytest.raises(NotInvariant):
        legendre_dual_tau(mixed, [0, 0, 1.0, 0])


def test_legendre_objective_trace_nonincreasing(mixed):
    rep = legendre_dual_tau(mixed, [0.3, 0.3, 0, 0.4])
    assert np.all(np.diff(rep.trace) <= 0)
