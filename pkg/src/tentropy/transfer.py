"""Transfer operators on a finite system and their log spectral radius.

On a finite discrete space the homological identity ``A((f o alpha) g) = f Ag``
forces the matrix of ``A`` to live on the graph of ``alpha``: the only
freedom left is one nonnegative weight per point,

    (Ag)(x) = sum_{y : alpha(y) = x} w(y) g(y).

Everything here works with that ``(alpha, w)`` form.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import NEG_INF, as_finite_vector, as_vector, ext_mean, frozen, safe_log
from .dynamics import Cycle, FiniteSystem, cycle_decomposition
from .errors import NegativeEntry, NegativeWeight, NonPositiveMass, SupportViolation


@dataclass(frozen=True, eq=False)
class TransferOperator:
    system: FiniteSystem
    weight: np.ndarray

    def __post_init__(self):
        w = as_vector(self.weight, self.system.size, name="weight")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        neg = np.flatnonzero(w < 0)
        if neg.size:
            raise NegativeWeight(int(neg[0]), float(w[neg[0]]))
        object.__setattr__(self, "weight", frozen(w))

    @property
    def size(self):
        return self.system.size

    @property
    def alpha(self):
        return self.system.alpha

    def __call__(self, g):
        return apply(self, g)

    def to_matrix(self):
        n = self.size
        B = np.zeros((n, n))
        B[self.alpha, np.arange(n)] = self.weight
        return B

    def __repr__(self):
        return f"TransferOperator(alpha={self.alpha.tolist()}, weight={self.weight.tolist()})"


@dataclass(frozen=True)
class SpectralResult:
    log_radius: float
    method: str
    witness_cycle: Optional[Cycle] = None
    iterations: int = 0
    converged: bool = True


def from_weights(system, w):
    return TransferOperator(system, w)


def from_matrix(system, B, tol=1e-9):
    """Recover ``(alpha, w)`` from a matrix, rejecting anything off the graph of alpha."""
    n = system.size
    B = np.asarray(B, dtype=np.float64)
    if B.shape != (n, n):
        raise ValueError(f"matrix has shape {B.shape}, expected {(n, n)}")
    rows, cols = np.nonzero(B < -tol)
    if rows.size:
        r, c = int(rows[0]), int(cols[0])
        raise NegativeEntry(r, c, float(B[r, c]))
    off = B.copy()
    off[system.alpha, np.arange(n)] = 0.0
    rows, cols = np.nonzero(off > tol)
    if rows.size:
        k = int(np.argmax(off[rows, cols]))
        r, c = int(rows[k]), int(cols[k])
        raise SupportViolation(r, c, float(B[r, c]))
    w = np.clip(B[system.alpha, np.arange(n)], 0.0, None)
    return TransferOperator(system, w)


def from_measure_space(system, m):
    """Adjoint of the composition operator ``g -> g o alpha`` on ``L^1(X, m)``.

    ``(Af)(x) m(x) = sum_{alpha(y)=x} m(y) f(y)``, so ``w(y) = m(y) / m(alpha(y))``.
    With an invariant mass vector this is a conditional expectation (``A1 = 1``).
    """
    m = as_vector(m, system.size, name="mass")
    bad = np.flatnonzero(~(m > 0))
    if bad.size:
        raise NonPositiveMass(int(bad[0]), float(m[bad[0]]))
    return TransferOperator(system, m / m[system.alpha])


def apply(T, g):
    g = as_vector(g, T.size, name="g")
    return np.bincount(T.alpha, weights=T.weight * g, minlength=T.size)


def orbit_weights(T, n):
    """Closed form of ``A^n`` on indicators: ``A^n 1_y = W[y] * 1_{alpha^n(y)}``.

    Returns ``(endpoints, W)`` with ``W[y] = prod_{j<n} w(alpha^j y)``.
    """
    pos = np.arange(T.size)
    W = np.ones(T.size)
    for _ in range(n):
        W = W * T.weight[pos]
        pos = T.alpha[pos]
    return pos, W


def power_apply(T, n, g):
    if n < 1:
        raise ValueError("n must be a positive integer")
    g = as_vector(g, T.size, name="g")
    nz = np.flatnonzero(g)
    if nz.size == 1 and g[nz[0]] == 1.0:
        y = int(nz[0])
        out = np.zeros(T.size)
        W, x = 1.0, y
        for _ in range(n):
            W *= T.weight[x]
            x = int(T.alpha[x])
        out[x] = W
        return out
    out = g
    for _ in range(n):
        out = apply(T, out)
    return out


def power_matrix(T, n):
    """Matrix of ``A^n``; column ``y`` is ``A^n 1_y``."""
    ends, W = orbit_weights(T, n)
    out = np.zeros((T.size, T.size))
    out[ends, np.arange(T.size)] = W
    return out


def tilt(T, phi):
    """The operator ``f -> A(e^phi f)``: weights pick up a factor ``e^phi``."""
    phi = as_finite_vector(phi, T.size, name="potential")
    return TransferOperator(T.system, T.weight * np.exp(phi))


def log_weights(T, phi=None):
    lw = safe_log(T.weight)
    if phi is not None:
        lw = lw + as_finite_vector(phi, T.size, name="potential")
    return lw


def cycle_means(T, phi=None, cycles=None):
    """Average of ``phi + ln w`` over each cycle (``-inf`` if any weight vanishes)."""
    if cycles is None:
        cycles = cycle_decomposition(T.system)
    lw = log_weights(T, phi)
    return cycles, [ext_mean(lw[list(c.points)]) for c in cycles]


def log_spectral_radius_cycles(T, phi=None):
    """Exact ``lambda(phi)`` as the maximum cycle mean of ``phi + ln w``.

    Each connected component of a functional graph holds exactly one cycle and
    every long path winds around it, so the maximum mean cycle reduces to a
    scan over the cycle decomposition. Ties go to the cycle with the smaller
    leading point.
    """
    cycles, means = cycle_means(T, phi)
    best = 0
    for i, v in enumerate(means):
        if v > means[best]:
            best = i
    return SpectralResult(means[best], "cycles", cycles[best], len(cycles))


def log_spectral_radius_power(T, phi=None, squarings=20, tol=1e-3):
    """``(1/2^k) ln ||A_phi^(2^k)||`` by repeated squaring with sup-norm rescaling.

    For a positive operator ``||A^n|| = ||A^n 1||_inf``, the maximum row sum.
    The log of every rescaling factor is accumulated so nothing overflows.
    ``converged`` reports whether the last two estimates differ by at most ``tol``.
    """
    if squarings < 1:
        raise ValueError("squarings must be >= 1")
    op = T if phi is None else tilt(T, phi)
    M = op.to_matrix()
    log_scale = 0.0
    prev = None
    est = NEG_INF
    for k in range(1, squarings + 1):
        s = M.sum(axis=1).max()
        if s == 0.0:
            return SpectralResult(NEG_INF, "power", None, squarings, True)
        M = M / s
        log_scale += np.log(s)
        M = M @ M
        log_scale *= 2.0
        norm = M.sum(axis=1).max()
        if norm == 0.0:
            return SpectralResult(NEG_INF, "power", None, squarings, True)
        prev, est = est, float((log_scale + np.log(norm)) / 2.0**k)
    converged = prev is not None and prev != NEG_INF and abs(est - prev) <= tol
    return SpectralResult(est, "power", None, squarings, bool(converged or squarings == 1))
