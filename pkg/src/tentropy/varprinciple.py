"""End-to-end checks tying t-entropy to the log spectral radius.

* ``check_variational_principle``: ``lambda(phi) = max_mu (mu(phi) + tau(mu))``
  over invariant ``mu``.
* ``check_definition_equivalence``: the sup-over-m and plug-in infima agree
  for invariant measures.
* ``legendre_dual_tau``: recover ``tau(mu)`` as ``inf_phi (lambda(phi) - mu(phi))``.
"""

from dataclasses import dataclass, field
from typing import Optional

import math

import numpy as np

from ._validation import NEG_INF, as_finite_vector, ext_close, ext_sub
from .dynamics import (
    Measure,
    as_measure,
    cycle_decomposition,
    cycle_measure,
    invariant_coordinates,
    is_invariant,
    mix,
)
from .entropy import (
    NEW,
    ORIGINAL,
    best_of,
    evaluate_grid,
    tau,
    tau_cycle_closed_form,
    tau_invariant_closed_form,
)
from .errors import NotInvariant
from .transfer import log_spectral_radius_cycles


@dataclass
class VPReport:
    lam: float
    best_value: float
    best_measure: Measure
    gap: float
    per_cycle: list
    max_excess: float
    passed: bool
    witness_cycle: object = None


@dataclass
class EquivReport:
    old_value: float
    new_value: float
    witness_old: tuple
    witness_new: tuple
    max_dominance_violation: float
    evaluations: int
    passed: bool


@dataclass
class LegendreReport:
    value: float
    exact: Optional[float]
    numeric: float
    iterations: int
    agreed: bool
    trace: list = field(default_factory=list, repr=False)


def _invariant_tau(T, mu, tol=1e-9, fallback=None):
    """Closed form over the cycle decomposition; full search if that is unavailable."""
    try:
        return tau_invariant_closed_form(T, mu, tol)
    except NotInvariant:
        if fallback is None:
            raise
        return tau(T, mu, **fallback).tau


def _score(mu, phi, t):
    return NEG_INF if t == NEG_INF else mu(phi) + t


def check_variational_principle(T, phi=None, tol=1e-8, mixtures=100, seed=0):
    """Compare ``lambda(phi)`` with ``mu(phi) + tau(mu)`` over the invariant polytope.

    ``tau`` is that of the untilted operator; the potential enters through
    ``lambda`` and ``mu(phi)`` only. Vertices (cycle measures) are scanned
    exhaustively and ``mixtures`` random interior points test the upper bound.
    """
    phi = np.zeros(T.size) if phi is None else as_finite_vector(phi, T.size, "potential")
    spec = log_spectral_radius_cycles(T, phi)
    lam = spec.log_radius
    cycles = cycle_decomposition(T.system)
    vertices = [cycle_measure(T.system, c) for c in cycles]
    per_cycle = []
    best_i = 0
    for i, (c, mu) in enumerate(zip(cycles, vertices)):
        v = _score(mu, phi, tau_cycle_closed_form(T, c))
        per_cycle.append((c, v))
        if v > per_cycle[best_i][1]:
            best_i = i
    best_value = per_cycle[best_i][1]
    excess = max(ext_sub(v, lam) for _, v in per_cycle)

    rng = np.random.default_rng(seed)
    for _ in range(mixtures):
        p = rng.dirichlet(np.ones(len(cycles)))
        mu = mix(vertices, p / p.sum())
        v = _score(mu, phi, _invariant_tau(T, mu))
        excess = max(excess, ext_sub(v, lam))

    gap = ext_sub(lam, best_value)
    passed = abs(gap) <= tol and excess <= tol
    return VPReport(lam, best_value, vertices[best_i], gap, per_cycle, excess, passed,
                    spec.witness_cycle)


def check_definition_equivalence(T, mu, n_max=4, n_random=32, ks=None, seed=0, tol=1e-6,
                                 invariant_tol=1e-9, solver_tol=1e-12, max_iter=100_000):
    """Infimum of ``tau_n / n`` versus infimum of ``tau'_n / n`` on the same grid.

    Only meaningful for invariant measures; anything else raises
    :class:`~tentropy.errors.NotInvariant`.
    """
    mu = as_measure(mu, T.size)
    if not is_invariant(T.system, mu, invariant_tol):
        raise NotInvariant("definition equivalence is only claimed for invariant measures")
    evals = evaluate_grid(T, mu, n_max, n_random, ks, seed, (NEW, ORIGINAL),
                          solver_tol, max_iter, stop_at_neg_inf=False)
    ev_old, old = best_of(evals, ORIGINAL)
    ev_new, new = best_of(evals, NEW)
    worst = 0.0
    for ev in evals:
        worst = max(worst, ext_sub(ev.new, ev.old))
    return EquivReport(
        old_value=float(old),
        new_value=float(new),
        witness_old=(ev_old.n, ev_old.label),
        witness_new=(ev_new.n, ev_new.label),
        max_dominance_violation=worst,
        evaluations=len(evals),
        passed=ext_close(old, new, tol),
    )


def legendre_dual_tau(T, mu, iters=10_000, tol=1e-3, invariant_tol=1e-9):
    """``inf_phi (lambda(phi) - mu(phi))`` two ways.

    The exact path reads ``sum_C p_C * mean_C(ln w)`` off the cycle
    decomposition of ``mu``. The numeric path runs subgradient descent on the
    convex piecewise-linear objective (subgradient: witness-cycle measure minus
    ``mu``) with step ``1/sqrt(k)`` from ``phi = 0``, and reports the smallest
    objective seen at the iterates and at their running average.

    If ``mu`` charges a cycle carrying a zero weight, the infimum is ``-inf``
    and the objective is unbounded below along ``-phi`` off that cycle; the
    numeric path then reports ``-inf`` without iterating.
    """
    mu = as_measure(mu, T.size)
    cycles, p = invariant_coordinates(T.system, mu, invariant_tol)
    P = np.zeros((len(cycles), T.size))
    for i, c in enumerate(cycles):
        P[i, list(c.points)] = 1.0 / len(c)
    a = np.array([tau_cycle_closed_form(T, c) for c in cycles])
    charged = p > 0
    if np.any(a[charged] == NEG_INF):
        return LegendreReport(NEG_INF, NEG_INF, NEG_INF, 0, True)
    exact = float(p[charged] @ a[charged])

    # Cycles are disjoint, so every iterate has the form phi = b*mu - sum_C c_C u_C
    # (u_C the uniform measure on C, read as a vector). Track (c, b) and the
    # cycle averages s_C = u_C . phi = -c_C/L_C + b*q_C instead of phi itself.
    finite = a > NEG_INF
    Pf, af = P[finite], a[finite]
    L = np.array([len(c) for c, f in zip(cycles, finite) if f], dtype=np.float64)
    w = mu.weights
    q = Pf @ w
    ww = float(w @ w)

    # plain floats: the number of cycles is small and numpy call overhead dominates
    q, af, inv_L = q.tolist(), af.tolist(), (1.0 / L).tolist()
    n_c = len(af)

    def objective(c, b):
        top = max(b * q[i] - c[i] * inv_L[i] + af[i] for i in range(n_c))
        return top - (b * ww - sum(ci * qi for ci, qi in zip(c, q)))

    c = [0.0] * n_c
    b = 0.0
    c_avg = [0.0] * n_c
    b_avg = 0.0
    cq = 0.0  # running c . q
    best = np.inf
    trace = []
    for k in range(1, iters + 1):
        j, top = 0, -np.inf
        for i in range(n_c):
            v = b * q[i] - c[i] * inv_L[i] + af[i]
            if v > top:
                j, top = i, v
        best = min(best, top - (b * ww - cq))
        eta = 1.0 / math.sqrt(k)
        c[j] += eta
        cq += eta * q[j]
        b += eta
        for i in range(n_c):
            c_avg[i] += (c[i] - c_avg[i]) / k
        b_avg += (b - b_avg) / k
        if k % 1000 == 0:
            trace.append(best)
    numeric = float(min(best, objective(c, b), objective(c_avg, b_avg)))
    return LegendreReport(exact, exact, numeric, iters, abs(numeric - exact) <= tol, trace)
