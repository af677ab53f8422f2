"""scikit-learn style wrapper around the solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_params, check_positions, check_rule
from .solver import DEFAULT_BUDGET_MB, solve


class BuildingNimSolver(BaseEstimator):
    """Solve BN(n_tokens, n_stacks) once and answer queries from the table.

    ``fit`` ignores its arguments and builds the table. ``predict`` returns
    ``"N"``/``"P"`` labels for building positions; ``transform`` returns their
    Grundy values and needs ``grundy=True``.

    >>> est = BuildingNimSolver(n_tokens=6, n_stacks=3).fit()
    >>> est.predict(["0,0,0;ξ=6"]).tolist()
    ['P']
    """

    def __init__(self, n_tokens=10, n_stacks=5, rule="normal", grundy=False, budget_mb=DEFAULT_BUDGET_MB):
        self.n_tokens = n_tokens
        self.n_stacks = n_stacks
        self.rule = rule
        self.grundy = grundy
        self.budget_mb = budget_mb

    def fit(self, X=None, y=None):
        params = check_params(self.n_tokens, self.n_stacks)
        rule = check_rule(self.rule)
        self.table_ = solve(params, rule, bool(self.grundy), budget_mb=self.budget_mb)
        self.params_ = params
        self.root_outcome_ = str(self.table_.root_outcome())
        self.n_entries_ = self.table_.n_entries()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "table_")
        positions = check_positions(X, self.params_)
        return np.array([str(self.table_.outcome_of(b)) for b in positions], dtype="<U1")

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "table_")
        positions = check_positions(X, self.params_)
        return np.array([self.table_.grundy_of(b) for b in positions], dtype=np.int64).reshape(-1, 1)

    def best_moves(self, X) -> list:
        check_is_fitted(self, "table_")
        return [self.table_.best_moves(b) for b in check_positions(X, self.params_)]
