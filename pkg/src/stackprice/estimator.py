"""Scikit-learn style facade over the pricing engine.

``fit`` takes an instance in place of a feature matrix and learns the
leader's optimal prices; ``predict`` returns the followers' responses to
those prices.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import StructuralError
from .model import leader_profit
from .pricing import best_response_profile, optimal_pricing, price_of_positivity
from .validation import check_cap, check_instance, check_mode, check_prices


class StackelbergPricer(BaseEstimator):
    """Leader-optimal pricing.

    Parameters
    ----------
    mode : {"free", "nonnegative"}
        Whether prices may be negative.
    profile_cap : int or None
        Refuse instances with more strategy profiles than this.
    """

    def __init__(self, mode="free", profile_cap=None):
        self.mode = mode
        self.profile_cap = profile_cap

    def fit(self, X, y=None):
        instance = check_instance(X)
        solution = optimal_pricing(instance, check_mode(self.mode), cap=check_cap(self.profile_cap))
        self.instance_ = instance
        self.solution_ = solution
        self.prices_ = solution.prices
        self.profile_ = solution.profile
        self.profit_ = solution.profit
        return self

    def _prices_for(self, X):
        instance = self.instance_ if X is None else check_instance(X)
        try:
            return instance, check_prices(instance, self.prices_)
        except StructuralError as exc:
            raise StructuralError(f"fitted prices do not fit this instance: {exc}") from None

    def predict(self, X=None):
        """Per-follower choice index (``None`` for no purchase) under the fitted prices."""
        check_is_fitted(self, "prices_")
        instance, prices = self._prices_for(X)
        return list(best_response_profile(instance, prices))

    def score(self, X=None, y=None):
        """Leader profit from the fitted prices on ``X`` (the training instance by default)."""
        check_is_fitted(self, "prices_")
        instance, prices = self._prices_for(X)
        return leader_profit(instance, best_response_profile(instance, prices), prices)


class PopEstimator(BaseEstimator):
    """Computes both optima and the price of positivity of an instance."""

    def __init__(self, profile_cap=None):
        self.profile_cap = profile_cap

    def fit(self, X, y=None):
        instance = check_instance(X)
        self.report_ = price_of_positivity(instance, profile_cap=check_cap(self.profile_cap))
        self.pop_ = self.report_.pop
        return self
