"""scikit-learn style front end.

The system is a constructor parameter (like a kernel); ``X`` is always one or
more rows of initial failures, either 0/1 arrays with one column per entity
or collections of labels.

>>> sim = CascadeSimulator(system).fit()          # doctest: +SKIP
>>> sim.transform([{"a2", "a3"}])                 # doctest: +SKIP
>>> EntityHardener(system, budget=1).fit({"a2", "a3"}).hardened_   # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cascade import final_failed_mask
from .exact import (DEFAULT_MAX_SUBSETS, EnhInstance, SolveReport, TehInstance, solve_enh_exact,
                    solve_teh_exact)
from .heuristics import solve_enh_heuristic, solve_teh_heuristic
from .restricted import (solve_enh_case1, solve_enh_case2_maxcov, solve_teh_case1,
                         solve_teh_case2_setcover)
from .validation import check_failure_matrix, check_labels, check_system, mask_row, row_mask

ENH_METHODS = {
    "exact": solve_enh_exact,
    "heuristic": solve_enh_heuristic,
    "case1": solve_enh_case1,
    "case2": solve_enh_case2_maxcov,
}
TEH_METHODS = {
    "exact": solve_teh_exact,
    "heuristic": solve_teh_heuristic,
    "case1": solve_teh_case1,
    "case2": solve_teh_case2_setcover,
}


def solve_enh(inst: EnhInstance, method: str = "exact", max_subsets: int = DEFAULT_MAX_SUBSETS) -> SolveReport:
    if method not in ENH_METHODS:
        raise ValueError(f"unknown ENH method {method!r}; choose from {sorted(ENH_METHODS)}")
    if method == "exact":
        return solve_enh_exact(inst, max_subsets=max_subsets)
    return ENH_METHODS[method](inst)


def solve_teh(inst: TehInstance, method: str = "exact", max_subsets: int = DEFAULT_MAX_SUBSETS) -> SolveReport:
    if method not in TEH_METHODS:
        raise ValueError(f"unknown TEH method {method!r}; choose from {sorted(TEH_METHODS)}")
    if method == "exact":
        return solve_teh_exact(inst, max_subsets=max_subsets)
    return TEH_METHODS[method](inst)


def _final_matrix(system, X, hardened_mask=0):
    rows = check_failure_matrix(X, system)
    n = len(system)
    out = np.zeros_like(rows)
    for r, row in enumerate(rows):
        out[r] = mask_row(final_failed_mask(system, row_mask(row), hardened_mask), n)
    return out


class CascadeSimulator(TransformerMixin, BaseEstimator):
    """Maps rows of initial failures to steady-state failures."""

    def __init__(self, system=None, hardened=()):
        self.system = system
        self.hardened = hardened

    def fit(self, X=None, y=None):
        system = check_system(self.system)
        self.hardened_ = check_labels(system, self.hardened, "hardened")
        self.n_features_in_ = len(system)
        return self

    def transform(self, X):
        check_is_fitted(self, "hardened_")
        return _final_matrix(self.system, X, self.system.mask(self.hardened_))


class _Hardener(BaseEstimator):
    def _seed(self, X):
        rows = check_failure_matrix(X, self.system)
        if rows.shape[0] != 1:
            raise ValueError("fit expects exactly one initial-failure set")
        return self.system.decode(row_mask(rows[0]))

    def predict(self, X):
        """Steady-state failures for each row of ``X`` with the fitted plan applied."""
        check_is_fitted(self, "hardened_")
        return _final_matrix(self.system, X, self.system.mask(self.hardened_))

    def _store(self, report: SolveReport):
        self.report_ = report
        self.hardened_ = report.hardened
        self.protected_ = report.protected
        self.n_features_in_ = len(self.system)
        return self


class EntityHardener(_Hardener):
    """Choose at most ``budget`` entities to harden, maximising protected entities."""

    def __init__(self, system=None, budget=1, method="exact", max_subsets=DEFAULT_MAX_SUBSETS):
        self.system = system
        self.budget = budget
        self.method = method
        self.max_subsets = max_subsets

    def fit(self, X, y=None):
        check_system(self.system)
        inst = EnhInstance(self.system, self._seed(X), int(self.budget))
        return self._store(solve_enh(inst, self.method, self.max_subsets))


class TargetedHardener(_Hardener):
    """Smallest hardening set that keeps every entity in ``protect`` operational."""

    def __init__(self, system=None, protect=(), method="exact", max_subsets=DEFAULT_MAX_SUBSETS):
        self.system = system
        self.protect = protect
        self.method = method
        self.max_subsets = max_subsets

    def fit(self, X, y=None):
        check_system(self.system)
        protect = check_labels(self.system, self.protect, "protect")
        inst = TehInstance(self.system, self._seed(X), protect)
        return self._store(solve_teh(inst, self.method, self.max_subsets))
