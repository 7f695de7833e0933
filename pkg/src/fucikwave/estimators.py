"""scikit-learn style wrappers.

``FucikRegionClassifier.fit`` traces C_k and D_k; ``predict`` labels points of
the (a, b) plane.  ``NonhomogeneousSolver.fit`` solves one forced problem and
``predict`` evaluates the solution at (s, t) points.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .curves import Region, classify, default_r_grid, trace
from .dual import Side
from .maximizer import MaximizerConfig
from .nonhomog import solve
from .spectral import TruncationSpec, basis_for


def _trunc(m_max, n_max):
    return TruncationSpec.from_bounds(int(m_max), int(n_max))


class FucikRegionClassifier(ClassifierMixin, BaseEstimator):
    """Classify (a, b) against the curves through the k-th eigenvalue.

    ``fit`` ignores its data arguments beyond validation; the curves depend
    only on the hyperparameters.
    """

    def __init__(self, k=1, eps_lower=(0.1, 0.1), eps_upper=(0.1, 0.1), m_max=16, n_max=16,
                 r_max=100.0, n_r=40, n_starts=8, seed=0, band=1e-4):
        self.k = k
        self.eps_lower = eps_lower
        self.eps_upper = eps_upper
        self.m_max = m_max
        self.n_max = n_max
        self.r_max = r_max
        self.n_r = n_r
        self.n_starts = n_starts
        self.seed = seed
        self.band = band

    def fit(self, X=None, y=None):
        if X is not None:
            check_array(X, ensure_min_features=2)
        trunc = _trunc(self.m_max, self.n_max)
        mcfg = MaximizerConfig(n_starts=self.n_starts, seed=self.seed)
        grid = default_r_grid(self.r_max, self.n_r)
        self.curve_c_ = trace(self.k, Side.LOWER, grid, mcfg=mcfg, trunc=trunc,
                              eps=tuple(self.eps_lower))
        self.curve_d_ = trace(self.k, Side.UPPER, grid, mcfg=mcfg, trunc=trunc,
                              eps=tuple(self.eps_upper))
        self.classes_ = np.array([r.value for r in Region])
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, ["curve_c_", "curve_d_"])
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError(f"expected (a, b) pairs, got {X.shape[1]} columns")
        return np.array([classify(float(a), float(b), self.curve_c_, self.curve_d_,
                                  self.band).value for a, b in X])


class NonhomogeneousSolver(BaseEstimator):
    """Weak solution of the forced problem at fixed (a, b); predicts ``u0(s, t)``."""

    def __init__(self, k=1, side="lower", a=0.5, b=0.5, p="zero", eps=(0.1, 0.1),
                 m_max=16, n_max=16, n_starts=4, seed=0):
        self.k = k
        self.side = side
        self.a = a
        self.b = b
        self.p = p
        self.eps = eps
        self.m_max = m_max
        self.n_max = n_max
        self.n_starts = n_starts
        self.seed = seed

    def fit(self, X=None, y=None):
        if X is not None:
            check_array(X)
        trunc = _trunc(self.m_max, self.n_max)
        self.result_ = solve(self.p, float(self.a), float(self.b), self.k, self.side,
                             mcfg=MaximizerConfig(seed=self.seed), trunc=trunc,
                             eps=tuple(self.eps), n_starts=self.n_starts)
        self.u0_ = self.result_.u0
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """``u0`` at rows ``(s, t)``, by direct summation of the retained modes."""
        check_is_fitted(self, "u0_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError(f"expected (s, t) pairs, got {X.shape[1]} columns")
        return basis_for(self.u0_.trunc).evaluate(self.u0_.coeffs, X[:, 0], X[:, 1])

    def score(self, X=None, y=None):
        """Negative of the largest weak residual (higher is better)."""
        check_is_fitted(self, "result_")
        return -max(self.result_.weak_residuals + self.result_.kernel_residuals)
