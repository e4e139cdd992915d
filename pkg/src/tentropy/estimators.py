"""scikit-learn style wrappers.

Both transformers are configured with a system (``alpha``, ``weights``) and
map one row per sample to one number:

* :class:`LogSpectralRadius` turns potentials ``phi`` into ``lambda(phi)``;
* :class:`TEntropy` turns probability vectors ``mu`` into ``tau(mu)``.

They follow the usual ``fit``/``transform``/``get_params`` protocol, so they
can sit inside a :class:`sklearn.pipeline.Pipeline` or be cloned.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dynamics import FiniteSystem, cycle_decomposition
from .entropy import tau, tau_invariant_closed_form
from .errors import NotInvariant
from .transfer import TransferOperator, log_spectral_radius_cycles, log_spectral_radius_power


def _build_operator(alpha, weights):
    if alpha is None or weights is None:
        raise ValueError("both alpha and weights must be set before fit")
    system = FiniteSystem(np.asarray(alpha))
    return TransferOperator(system, np.asarray(weights, dtype=np.float64))


class _OperatorTransformer(TransformerMixin, BaseEstimator):

    def fit(self, X=None, y=None):
        self.operator_ = _build_operator(self.alpha, self.weights)
        self.cycles_ = cycle_decomposition(self.operator_.system)
        self.n_features_in_ = self.operator_.size
        if X is not None:
            self._check_rows(X)
        return self

    def _check_rows(self, X):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_}"
            )
        return X

    def get_feature_names_out(self, input_features=None):
        return np.array([self._output_name], dtype=object)


class LogSpectralRadius(_OperatorTransformer):
    """Log spectral radius of the tilted operator for each potential row.

    Parameters
    ----------
    alpha, weights : array-like of shape (n_points,)
        The map and the transfer weights.
    method : {"cycles", "power"}
        Exact maximum-cycle-mean engine or rescaled repeated squaring.
    squarings : int
        Budget for the power engine.
    """

    _output_name = "log_spectral_radius"

    def __init__(self, alpha=None, weights=None, method="cycles", squarings=20):
        self.alpha = alpha
        self.weights = weights
        self.method = method
        self.squarings = squarings

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = self._check_rows(X)
        if self.method == "cycles":
            vals = [log_spectral_radius_cycles(self.operator_, phi).log_radius for phi in X]
        elif self.method == "power":
            vals = [log_spectral_radius_power(self.operator_, phi, self.squarings).log_radius
                    for phi in X]
        else:
            raise ValueError(f"unknown method {self.method!r}")
        return np.asarray(vals, dtype=np.float64).reshape(-1, 1)


class TEntropy(_OperatorTransformer):
    """t-entropy of each measure row.

    With ``method="closed_form"`` invariant measures are scored through their
    cycle decomposition and anything else falls back to the search; with
    ``method="search"`` every row goes through the ``(n, D)`` search.
    """

    _output_name = "t_entropy"

    def __init__(self, alpha=None, weights=None, method="closed_form", n_max=6,
                 n_random=32, seed=0, invariant_tol=1e-9, definition="auto"):
        self.alpha = alpha
        self.weights = weights
        self.method = method
        self.n_max = n_max
        self.n_random = n_random
        self.seed = seed
        self.invariant_tol = invariant_tol
        self.definition = definition

    def _score(self, mu):
        if self.method == "closed_form":
            try:
                return tau_invariant_closed_form(self.operator_, mu, self.invariant_tol)
            except NotInvariant:
                pass
        elif self.method != "search":
            raise ValueError(f"unknown method {self.method!r}")
        return tau(self.operator_, mu, n_max=self.n_max, n_random=self.n_random,
                   seed=self.seed, invariant_tol=self.invariant_tol,
                   definition=self.definition).tau

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = self._check_rows(X)
        return np.asarray([self._score(mu) for mu in X], dtype=np.float64).reshape(-1, 1)
