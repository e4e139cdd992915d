"""Partitions of unity on a finite phase space.

A partition is stored as a ``(k, N)`` array whose rows are nonnegative and sum
to the all-ones vector. Identically zero rows are always dropped.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import frozen
from .errors import NotAPartition
from .transfer import power_apply

SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PartitionOfUnity:
    elements: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.elements, dtype=np.float64)
        if E.ndim != 2 or E.shape[1] == 0:
            raise ValueError(f"partition must be a (k, N) array, got shape {E.shape}")
        E = E[np.any(E != 0.0, axis=1)]
        if E.shape[0] == 0:
            raise NotAPartition(0, 0.0)
        if np.any(E < 0):
            k, x = np.unravel_index(np.argmin(E), E.shape)
            raise NotAPartition(int(x), float(E[k, x]), reason="negative")
        total = E.sum(axis=0)
        x = int(np.argmax(np.abs(total - 1.0)))
        if abs(total[x] - 1.0) > SUM_TOL:
            raise NotAPartition(x, float(total[x]))
        object.__setattr__(self, "elements", frozen(E))

    @property
    def size(self):
        return int(self.elements.shape[1])

    def __len__(self):
        return int(self.elements.shape[0])

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"PartitionOfUnity(k={len(self)}, N={self.size})"


def _n_points(system_or_n):
    return system_or_n if isinstance(system_or_n, (int, np.integer)) else system_or_n.size


def singleton_partition(system):
    return PartitionOfUnity(np.eye(_n_points(system)))


def unit_partition(system):
    return PartitionOfUnity(np.ones((1, _n_points(system))))


def validate(D, tol=1e-10):
    """Accept a candidate list of functions as a partition of unity.

    Entries in ``[-tol, 0)`` are clamped to zero; anything more negative, or a
    pointwise sum more than ``tol`` away from 1, raises :class:`NotAPartition`
    naming the worst point.
    """
    E = np.array([np.asarray(g, dtype=np.float64) for g in D])
    if E.ndim != 2:
        raise ValueError("partition elements must be equal-length vectors")
    if np.any(E < -tol):
        k, x = np.unravel_index(np.argmin(E), E.shape)
        raise NotAPartition(int(x), float(E[k, x]), reason="negative")
    E = np.where(E < 0, 0.0, E)
    total = E.sum(axis=0)
    x = int(np.argmax(np.abs(total - 1.0)))
    if abs(total[x] - 1.0) > tol:
        raise NotAPartition(x, float(total[x]))
    return PartitionOfUnity(E)


def _product_rows(A, B):
    prod = (A[:, None, :] * B[None, :, :]).reshape(-1, A.shape[1])
    return prod[np.any(prod != 0.0, axis=1)]


def join(D, E):
    """Common refinement: all pointwise products ``d * e``."""
    if D.size != E.size:
        raise ValueError("partitions live on different phase spaces")
    return PartitionOfUnity(_product_rows(D.elements, E.elements))


def pullback_join(system, D, E, n):
    """Partition of the functions ``g * (h o alpha^n)`` for ``g in D``, ``h in E``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if D.size != system.size or E.size != system.size:
        raise ValueError("partitions live on different phase spaces")
    pulled = E.elements[:, system.iterate(n)]
    return PartitionOfUnity(_product_rows(D.elements, pulled))


def hat_partition(values, eps):
    """Piecewise-linear hats on a grid of pitch ``eps/2`` covering ``values``.

    Row ``i`` is the hat centred on ``a + i*eps/2`` evaluated at ``values``;
    every point lights up at most two neighbouring hats, with barycentric
    weights, so the rows sum to one. A point lies in the support of hat ``i``
    only if it is within ``eps/2`` of its centre, which keeps the spread of
    ``values`` over any support below ``eps``.
    """
    values = np.asarray(values, dtype=np.float64)
    a, b = float(values.min()), float(values.max())
    if b - a < eps:
        return np.ones((1, values.shape[0]))
    h = eps / 2.0
    u = (values - a) / h
    j = np.floor(u).astype(np.int64)
    frac = u - j
    n_hats = int(j.max()) + 2
    F = np.zeros((n_hats, values.shape[0]))
    cols = np.arange(values.shape[0])
    F[j, cols] = 1.0 - frac
    F[j + 1, cols] += frac
    return F[np.any(F != 0.0, axis=1)]


def oscillation_refinement(T, D, n, eps):
    """A partition ``E`` on whose supports every ``A^n g`` (``g in D``) varies by < eps.

    Each ``A^n g`` is composed with a hat partition of its range; the results
    are joined over ``g``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    E = np.ones((1, T.size))
    for g in D.elements:
        E = _product_rows(E, hat_partition(power_apply(T, n, g), eps))
    return PartitionOfUnity(E)


def oscillations(T, D, E, n):
    """Matrix of ``sup - inf`` of ``A^n g`` over ``supp h`` for every pair."""
    out = np.zeros((len(D), len(E)))
    for i, g in enumerate(D.elements):
        v = power_apply(T, n, g)
        for j, h in enumerate(E.elements):
            vals = v[h > 0]
            out[i, j] = vals.max() - vals.min()
    return out


def random_partition(system, k, seed=None):
    """``k`` functions drawn pointwise uniformly from the (k-1)-simplex."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = _n_points(system)
    rng = np.random.default_rng(seed)
    if k == 1:
        return unit_partition(n)
    E = rng.dirichlet(np.ones(k), size=n).T
    # each column is a single simplex sample; renormalise away the last-ulp drift
    E = E / E.sum(axis=0)
    return PartitionOfUnity(E)
