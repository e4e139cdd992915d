"""Finite dynamical systems ``(X, alpha)`` and their invariant measures.

The phase space is ``X = {0, ..., N-1}`` and ``alpha`` is stored as an
integer array with ``alpha[y]`` the image of ``y``. Continuous functions on a
finite discrete space are plain length-``N`` vectors, so a measure acts on a
function by a dot product.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_vector, frozen
from .errors import BadCoefficients, InvalidMeasure, NotACycle, NotInvariant, OutOfRange

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha)
        if alpha.ndim != 1 or alpha.shape[0] == 0:
            raise ValueError("alpha must be a non-empty one-dimensional index array")
        if alpha.dtype.kind == "f":
            if not np.all(np.isfinite(alpha)) or np.any(alpha != np.round(alpha)):
                raise ValueError("alpha entries must be integers")
        elif alpha.dtype.kind not in "iu":
            raise ValueError(f"alpha must hold integers, got dtype {alpha.dtype}")
        n = alpha.shape[0]
        bad = np.flatnonzero((alpha < 0) | (alpha >= n))
        if bad.size:
            i = int(bad[0])
            raise OutOfRange(i, alpha[i].item(), n)
        object.__setattr__(self, "alpha", frozen(alpha.astype(np.int64)))

    @property
    def size(self):
        return int(self.alpha.shape[0])

    def iterate(self, n):
        """Index array of ``alpha^n`` (``n >= 0``)."""
        out = np.arange(self.size)
        for _ in range(n):
            out = self.alpha[out]
        return out

    def compose(self, f, n=1):
        """The function ``f o alpha^n``."""
        return np.asarray(f)[self.iterate(n)]

    def __eq__(self, other):
        return isinstance(other, FiniteSystem) and np.array_equal(self.alpha, other.alpha)

    def __hash__(self):
        return hash(self.alpha.tobytes())

    def __repr__(self):
        return f"FiniteSystem(alpha={self.alpha.tolist()})"


@dataclass(frozen=True, eq=False)
class Cycle:
    """A periodic orbit listed in dynamical order, starting at its smallest point."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        if isinstance(other, Cycle):
            return self.points == other.points
        if isinstance(other, (list, tuple)):
            return self.points == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return f"Cycle({list(self.points)})"


@dataclass(frozen=True, eq=False)
class Measure:
    """Probability vector on ``X``; ``mu(f)`` integrates a function."""

    weights: np.ndarray

    def __post_init__(self):
        w = as_vector(self.weights, name="measure")
        if not np.all(np.isfinite(w)):
            raise InvalidMeasure("measure weights must be finite")
        if np.any(w < 0):
            i = int(np.argmin(w))
            raise InvalidMeasure(f"measure weight at point {i} is negative ({w[i]})")
        total = float(w.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidMeasure(f"measure weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", frozen(w))

    @property
    def size(self):
        return int(self.weights.shape[0])

    def __call__(self, f):
        return float(self.weights @ np.asarray(f, dtype=np.float64))

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __eq__(self, other):
        other = getattr(other, "weights", other)
        return np.array_equal(self.weights, np.asarray(other, dtype=np.float64))

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"Measure({self.weights.tolist()})"


def as_measure(mu, size=None):
    if not isinstance(mu, Measure):
        mu = Measure(mu)
    if size is not None and mu.size != size:
        raise InvalidMeasure(f"measure has length {mu.size}, expected {size}")
    return mu


def build_system(alpha):
    return FiniteSystem(np.asarray(alpha))


def cycle_decomposition(system):
    """All periodic orbits of ``alpha``, ordered by their smallest point.

    Standard three-colour walk over the functional graph: every walk ends
    either on a point already classified or on a point of the current path,
    in which case the tail of the path from that point is a new cycle.
    """
    alpha = system.alpha
    n = system.size
    state = np.zeros(n, dtype=np.int8)  # 0 unseen, 1 on current path, 2 done
    cycles = []
    for start in range(n):
        if state[start]:
            continue
        path = []
        x = start
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = int(alpha[x])
        if state[x] == 1:
            loop = path[path.index(x):]
            k = loop.index(min(loop))
            cycles.append(Cycle(loop[k:] + loop[:k]))
        for p in path:
            state[p] = 2
    cycles.sort(key=lambda c: c.points[0])
    return cycles


def periodic_points(system):
    return sorted(p for c in cycle_decomposition(system) for p in c)


def check_cycle(system, cycle):
    pts = tuple(cycle.points if isinstance(cycle, Cycle) else cycle)
    if not pts:
        raise NotACycle("empty cycle")
    if len(set(pts)) != len(pts):
        raise NotACycle(f"{list(pts)} repeats a point")
    n = system.size
    for i, p in enumerate(pts):
        if not 0 <= p < n:
            raise NotACycle(f"point {p} is outside the phase space")
        nxt = pts[(i + 1) % len(pts)]
        if system.alpha[p] != nxt:
            raise NotACycle(f"alpha({p}) = {system.alpha[p]}, not {nxt}")
    k = pts.index(min(pts))
    return Cycle(pts[k:] + pts[:k])


def cycle_measure(system, cycle):
    """Uniform probability on the points of ``cycle``."""
    cycle = check_cycle(system, cycle)
    w = np.zeros(system.size)
    w[list(cycle.points)] = 1.0 / len(cycle)
    return Measure(w)


def pushforward(system, mu):
    w = np.asarray(getattr(mu, "weights", mu), dtype=np.float64)
    return Measure(np.bincount(system.alpha, weights=w, minlength=system.size))


def is_invariant(system, mu, tol=1e-9):
    mu = as_measure(mu, system.size)
    image = np.bincount(system.alpha, weights=mu.weights, minlength=system.size)
    return bool(np.max(np.abs(image - mu.weights)) <= tol)


def mix(measures, coeffs):
    """Convex combination ``sum_i coeffs[i] * measures[i]``."""
    coeffs = as_vector(coeffs, len(measures), name="coeffs")
    if np.any(coeffs < 0) or abs(coeffs.sum() - 1.0) > MASS_TOL:
        raise BadCoefficients(f"coefficients {coeffs.tolist()} are not a probability vector")
    stack = np.array([np.asarray(getattr(m, "weights", m), dtype=np.float64) for m in measures])
    return Measure(coeffs @ stack)


def invariant_coordinates(system, mu, tol=1e-9):
    """Write an invariant ``mu`` as ``sum_C p_C * cycle_measure(C)``.

    Returns ``(cycles, p)``. Raises :class:`NotInvariant` when ``mu`` is not
    within ``tol`` of that convex hull.
    """
    mu = as_measure(mu, system.size)
    cycles = cycle_decomposition(system)
    p = np.array([mu.weights[list(c.points)].sum() for c in cycles])
    rebuilt = np.zeros(system.size)
    for c, pc in zip(cycles, p):
        rebuilt[list(c.points)] = pc / len(c)
    resid = float(np.max(np.abs(rebuilt - mu.weights)))
    if resid > tol:
        raise NotInvariant(f"measure is not alpha-invariant (residual {resid:.3g} > {tol:g})")
    return cycles, p
