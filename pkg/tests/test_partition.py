import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tentropy.dynamics import FiniteSystem, build_system
from tentropy.errors import NotAPartition
from tentropy.partition import (
    PartitionOfUnity,
    hat_partition,
    join,
    oscillation_refinement,
    oscillations,
    pullback_join,
    random_partition,
    singleton_partition,
    unit_partition,
    validate,
)
from tentropy.transfer import from_weights, power_apply

from conftest import random_operator


def as_rows(P):
    return sorted(map(tuple, P.elements.tolist()))


def check_partition(P):
    assert np.all(P.elements >= 0)
    assert np.all(np.any(P.elements != 0, axis=1))
    np.testing.assert_allclose(P.elements.sum(axis=0), 1.0, rtol=0, atol=1e-10)


def test_singletons():
    S = singleton_partition(build_system([0, 0, 0]))
    assert as_rows(S) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert np.array_equal(S.elements.sum(axis=0), np.ones(3))
    assert len(S) == 3


def test_validate_examples():
    assert len(validate([[0.5, 0.5], [0.5, 0.5]])) == 2
    with pytest.raises(NotAPartition) as err:
        validate([[1, 0], [0, 0.9]])
    assert err.value.point == 1 and err.value.total == pytest.approx(0.9)
    P = validate([[1, 1], [0, 0]])
    assert len(P) == 1 and as_rows(P) == [(1.0, 1.0)]


def test_validate_clamps_tiny_negatives():
    P = validate([[1.0 + 1e-12, 0.5], [-1e-12, 0.5]], tol=1e-10)
    assert np.all(P.elements >= 0)
    with pytest.raises(NotAPartition):
        validate([[1.1, 0.5], [-0.1, 0.5]], tol=1e-10)


def test_join_examples():
    sys_ = build_system([0, 1])
    S = singleton_partition(sys_)
    D = validate([[0.5, 0.5], [0.5, 0.5]])
    assert as_rows(join(D, unit_partition(sys_))) == as_rows(D)
    assert as_rows(join(S, S)) == as_rows(S)
    J = join(D, S)
    assert len(J) == 4
    assert as_rows(J) == [(0, 0.5), (0, 0.5), (0.5, 0), (0.5, 0)]


def test_pullback_join_examples():
    sys_ = build_system([1, 0, 3, 3])
    S = singleton_partition(sys_)
    D = random_partition(sys_, 3, seed=1)
    assert as_rows(pullback_join(sys_, D, unit_partition(sys_), 2)) == as_rows(D)
    ident = build_system([0, 1, 2, 3])
    E = random_partition(ident, 2, seed=2)
    Di = random_partition(ident, 3, seed=3)
    np.testing.assert_allclose(np.array(as_rows(pullback_join(ident, Di, E, 1))),
                               np.array(as_rows(join(Di, E))))
    # deterministic alpha: 1_y * 1_h(alpha y) is nonzero only for h = alpha(y)
    assert as_rows(pullback_join(sys_, S, S, 1)) == as_rows(S)


def test_oscillation_refinement_level_sets():
    T = from_weights(build_system([1, 0, 3, 3]), [1.0, 1.0, 1.0, 2.0])
    E = oscillation_refinement(T, unit_partition(4), 1, 0.5)
    # A1 = (1, 1, 0, 3): one element per level set {0, 1}, {2}, {3}
    assert as_rows(E) == [(0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0)]
    assert oscillations(T, unit_partition(4), E, 1).max() == 0.0


def test_oscillation_refinement_constant():
    T = from_weights(build_system([1, 2, 0]), [2.0, 2.0, 2.0])
    E = oscillation_refinement(T, unit_partition(3), 3, 0.1)
    assert len(E) == 1


def test_hat_partition_sums_to_one():
    rng = np.random.default_rng(1)
    for eps in (0.5, 0.1, 0.01):
        v = rng.uniform(-3, 7, 40)
        F = hat_partition(v, eps)
        np.testing.assert_allclose(F.sum(axis=0), 1.0, atol=1e-12)
        assert np.all(F >= 0)
        for row in F:
            vals = v[row > 0]
            assert vals.max() - vals.min() < eps


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_oscillation_bound_random(eps):
    rng = np.random.default_rng(int(eps * 1000))
    for _ in range(20):
        T = random_operator(rng, 7, zero_prob=0.1)
        D = random_partition(T.system, int(rng.integers(1, 4)), seed=int(rng.integers(1 << 30)))
        for n in (1, 2, 3):
            E = oscillation_refinement(T, D, n, eps)
            check_partition(E)
            assert np.all(oscillations(T, D, E, n) < eps)


def test_random_partition_k1():
    P = random_partition(build_system([0, 0, 1]), 1, seed=4)
    assert as_rows(P) == [(1, 1, 1)]


def test_random_partition_sums_and_determinism():
    sys_ = FiniteSystem(np.array([0, 0, 1, 2, 2]))
    for seed in range(100):
        P = random_partition(sys_, 4, seed=seed)
        np.testing.assert_allclose(P.elements.sum(axis=0), 1.0, rtol=0, atol=1e-12)
        assert np.array_equal(P.elements, random_partition(sys_, 4, seed=seed).elements)
    assert not np.array_equal(random_partition(sys_, 4, seed=0).elements,
                              random_partition(sys_, 4, seed=1).elements)


def test_partition_rejects_bad_input():
    with pytest.raises(NotAPartition):
        PartitionOfUnity(np.array([[0.5, 0.5]]))
    with pytest.raises(NotAPartition):
        PartitionOfUnity(np.zeros((2, 2)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(1, 5), st.integers(1, 5), st.integers(1, 4),
       st.integers(0, 2**31))
def test_join_sizes_and_sums(n, k1, k2, steps, seed):
    rng = np.random.default_rng(seed)
    sys_ = FiniteSystem(rng.integers(0, n, n))
    D = random_partition(sys_, k1, seed=seed)
    E = random_partition(sys_, k2, seed=seed + 1)
    for P in (join(D, E), pullback_join(sys_, D, E, steps)):
        check_partition(P)
        assert len(P) <= len(D) * len(E)


def test_pullback_identity_on_operators():
    # A^n(g * h o alpha^n) = h * A^n g, the step used to collapse the pullback join
    rng = np.random.default_rng(8)
    for _ in range(20):
        T = random_operator(rng, 8)
        D = random_partition(T.system, 2, seed=1)
        E = random_partition(T.system, 3, seed=2)
        for n in (1, 2, 3):
            for g in D.elements:
                for h in E.elements:
                    lhs = power_apply(T, n, g * T.system.compose(h, n))
                    np.testing.assert_allclose(lhs, h * power_apply(T, n, g), rtol=1e-12,
                                               atol=1e-14)
