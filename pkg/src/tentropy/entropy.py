"""t-entropy of a measure with respect to a transfer operator.

Two inner quantities are computed for a partition of unity ``D`` and a time
``n``:

* ``tau_prime_n``: ``sum_g mu(g) ln(mu(A^n g) / mu(g))`` (measure plugged in
  for itself; valid shortcut for invariant ``mu``);
* ``tau_n_sup``: the same sum with ``mu(A^n g)`` replaced by ``m(A^n g)`` and
  maximised over probability vectors ``m``.

``tau`` takes the infimum of either one, divided by ``n``, over a finite search
family of ``(n, D)`` pairs. Conventions: a summand with ``mu(g) = 0`` is zero,
and a summand with ``mu(g) > 0`` but ``A^n g = 0`` sends everything to ``-inf``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import NEG_INF, as_vector, ext_mean, safe_log, xlog_ratio
from .dynamics import Measure, as_measure, check_cycle, invariant_coordinates, is_invariant
from .partition import PartitionOfUnity, pullback_join, random_partition, singleton_partition
from .transfer import power_matrix

NEW = "new"
ORIGINAL = "original"


@dataclass
class SimplexSolveReport:
    argmax: Measure
    value: float
    iterations: int
    final_improvement: float
    converged: bool = True
    history: list = field(default_factory=list, repr=False)
    gap_bound: float = 0.0


@dataclass
class TEntropyResult:
    tau: float
    best_n: int
    best_partition: PartitionOfUnity
    best_label: str
    definition: str
    best_m: Optional[Measure] = None
    evaluations: int = 0


@dataclass
class Evaluation:
    """One ``(n, D)`` grid point; values are un-normalised (not divided by n)."""

    n: int
    label: str
    partition: PartitionOfUnity
    new: Optional[float] = None
    old: Optional[float] = None
    argmax: Optional[Measure] = None


def _images(T, D, n):
    # rows are A^n g for g in D
    return D.elements @ power_matrix(T, n).T


def tau_prime_n(T, mu, D, n):
    mu = as_measure(mu, T.size)
    mass = D.elements @ mu.weights
    return xlog_ratio(mass, _images(T, D, n) @ mu.weights, mass)


def _log_objective(c, V, m):
    Vm = V @ m
    with np.errstate(divide="ignore"):
        return float(c @ np.log(Vm)), Vm


def simplex_log_maximize(c, V, tol=1e-12, max_iter=100_000, accelerate=True):
    """Maximise ``F(m) = sum_g c_g ln(m . v_g)`` over probability vectors ``m``.

    Multiplicative (EM) update ``m(x) <- m(x) r(x)`` with
    ``r(x) = sum_g c_g v_g(x) / (m . v_g)``, started from the uniform point.
    By concavity ``max F - F(m) <= max_x r(x) - 1``, so the run stops once that
    certificate (``gap_bound``) is at most ``tol``.

    With ``accelerate`` each iteration takes two EM steps and tries the
    squared extrapolation of Varadhan and Roland (SQUAREM) from them. The
    extrapolated point is kept only when it beats the second EM step, so the
    objective never decreases either way. Coordinates stay strictly positive,
    which is needed because a zero coordinate is never revived.
    """
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    c = as_vector(c, V.shape[0], name="coefficients")
    if np.any(c < 0) or abs(c.sum() - 1.0) > 1e-12:
        raise ValueError("coefficients must be a probability vector")
    if np.any(V < 0):
        raise ValueError("vectors must be entrywise nonnegative")
    n = V.shape[1]
    m = np.full(n, 1.0 / n)
    keep = c > 0
    c, V = c[keep], V[keep]
    if np.any(~np.any(V > 0, axis=1)):
        return SimplexSolveReport(Measure(m), NEG_INF, 0, 0.0, True, [NEG_INF], 0.0)

    def em(m, Vm):
        r = (c / Vm) @ V
        m_new = m * r
        return m_new / m_new.sum(), r

    f, Vm = _log_objective(c, V, m)
    history = [f]
    gain = np.inf
    it = 0
    while True:
        m1, r = em(m, Vm)
        bound = max(float(r.max()) - 1.0, 0.0)
        if bound <= tol or it >= max_iter:
            break
        it += 1
        f_new, Vm_new = _log_objective(c, V, m1)
        m_new = m1
        if accelerate:
            m2, _ = em(m1, Vm_new)
            f2, Vm2 = _log_objective(c, V, m2)
            if f2 >= f_new:
                m_new, f_new, Vm_new = m2, f2, Vm2
                d1 = m1 - m
                d2 = m2 - m1 - d1
                n2 = float(np.linalg.norm(d2))
                if n2 > 0:
                    step = min(-1.0, -float(np.linalg.norm(d1)) / n2)
                    m3 = m - 2 * step * d1 + step * step * d2
                    m3 = np.maximum(m3, 1e-3 * m2)
                    m3 /= m3.sum()
                    f3, Vm3 = _log_objective(c, V, m3)
                    if f3 > f2:
                        m_new, f_new, Vm_new = m3, f3, Vm3
        gain = f_new - f
        if gain < 0:
            # roundoff at the optimum; keep the better iterate
            break
        m, Vm, f = m_new, Vm_new, f_new
        history.append(f)
    return SimplexSolveReport(Measure(m), f, it, float(gain), bool(bound <= tol), history,
                              bound)


def tau_n_sup(T, mu, D, n, tol=1e-12, max_iter=100_000):
    """Original inner quantity: ``sup_m sum_g mu(g) ln(m(A^n g) / mu(g))``.

    Terms with ``mu(g) = 0`` are dropped; the retained coefficients are
    rescaled to sum to one for the solver and the objective is scaled back.
    """
    mu = as_measure(mu, T.size)
    mass = D.elements @ mu.weights
    keep = mass > 0
    c = mass[keep]
    s = float(c.sum())
    report = simplex_log_maximize(c / s, _images(T, D, n)[keep], tol=tol, max_iter=max_iter)
    if report.value == NEG_INF:
        return report
    entropy_term = float(c @ np.log(c))
    report.value = s * report.value - entropy_term
    report.history = [s * h - entropy_term for h in report.history]
    return report


def partition_family(system, n, n_random=32, ks=None, seed=0):
    """Search family for the infimum over partitions at time ``n``.

    Singletons, ``n_random`` random fractional partitions (sizes cycling
    through ``ks``, default ``(2, 3, N)``) and the pullback join of singletons.
    Random members depend on ``seed`` and their index only, so they are the
    same at every ``n``.
    """
    N = system.size
    ks = (2, 3, N) if ks is None else tuple(ks)
    S = singleton_partition(system)
    family = [("singletons", S)]
    for i in range(n_random):
        k = ks[i % len(ks)]
        family.append((f"random[{i}](k={k})", random_partition(system, k, seed=(seed, i))))
    family.append((f"pullback(singletons,singletons,{n})", pullback_join(system, S, S, n)))
    return family


def evaluate_grid(T, mu, n_max=6, n_random=32, ks=None, seed=0, definitions=(NEW,),
                  solver_tol=1e-12, max_iter=100_000, stop_at_neg_inf=True):
    """Evaluate the requested inner quantities on every ``(n, D)`` of the family."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mu = as_measure(mu, T.size)
    out = []
    for n in range(1, n_max + 1):
        for label, D in partition_family(T.system, n, n_random, ks, seed):
            ev = Evaluation(n, label, D)
            if NEW in definitions:
                ev.new = tau_prime_n(T, mu, D, n)
            if ORIGINAL in definitions:
                rep = tau_n_sup(T, mu, D, n, tol=solver_tol, max_iter=max_iter)
                ev.old, ev.argmax = rep.value, rep.argmax
            out.append(ev)
            if stop_at_neg_inf and NEG_INF in (ev.new, ev.old):
                return out
    return out


def best_of(evaluations, definition):
    """Minimum of ``value / n``; ties keep the earliest (smaller n, then family order)."""
    attr = "new" if definition == NEW else "old"
    best, best_val = None, None
    for ev in evaluations:
        v = getattr(ev, attr) / ev.n
        if best is None or v < best_val:
            best, best_val = ev, v
    return best, best_val


def tau(T, mu, n_max=6, n_random=32, ks=None, seed=0, invariant_tol=1e-9,
        definition="auto", solver_tol=1e-12, max_iter=100_000):
    """t-entropy of ``mu`` by search over ``n <= n_max`` and a partition family.

    ``definition="auto"`` uses the plug-in form for invariant measures and the
    sup-over-m form otherwise; ``"new"`` or ``"original"`` forces one.
    """
    mu = as_measure(mu, T.size)
    if definition == "auto":
        definition = NEW if is_invariant(T.system, mu, invariant_tol) else ORIGINAL
    if definition not in (NEW, ORIGINAL):
        raise ValueError(f"unknown definition {definition!r}")
    evals = evaluate_grid(T, mu, n_max, n_random, ks, seed, (definition,),
                          solver_tol, max_iter)
    ev, value = best_of(evals, definition)
    return TEntropyResult(
        tau=float(value),
        best_n=ev.n,
        best_partition=ev.partition,
        best_label=ev.label,
        definition=definition,
        best_m=ev.argmax,
        evaluations=len(evals),
    )


def tau_cycle_closed_form(T, cycle):
    """t-entropy of the uniform measure on ``cycle``: the mean of ``ln w`` over it."""
    cycle = check_cycle(T.system, cycle)
    return ext_mean(safe_log(T.weight[list(cycle.points)]))


def tau_invariant_closed_form(T, mu, tol=1e-9):
    """``sum_C p_C * tau(cycle_measure(C))`` for ``mu = sum_C p_C cycle_measure(C)``.

    Raises :class:`~tentropy.errors.NotInvariant` if ``mu`` is not invariant.
    """
    cycles, p = invariant_coordinates(T.system, mu, tol)
    total = 0.0
    for c, pc in zip(cycles, p):
        if pc <= 0:
            continue
        v = tau_cycle_closed_form(T, c)
        if v == NEG_INF:
            return NEG_INF
        total += pc * v
    return float(total)
