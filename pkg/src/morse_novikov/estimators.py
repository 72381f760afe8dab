"""scikit-learn style wrappers around the exact and numerical engines.

The estimators follow the usual conventions: constructor arguments are
hyperparameters only (so ``get_params``/``set_params``/``clone`` work), all
learned state ends with an underscore, and methods that need a fitted model
raise ``NotFittedError`` otherwise.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chords import MARGINAL_TOL, MATCH_TOL, find_chords
from .complex import TwistedComplex, twist
from .exceptions import UsageError
from .genfun import DEFAULT_FIBER_GRID, fiber_critical_points
from .novikov import DEFAULT_PRIMES, novikov_numbers
from .smooth import DEFAULT_DEDUPE, DEFAULT_TOL, critical_points, d_beta
from .validation import check_mode, check_points, check_positive_int, check_primes, check_tolerance


class NovikovHomology(BaseEstimator):
    """Novikov numbers of a twisted complex.

    ``fit`` accepts a :class:`TwistedComplex` or a ``(SimplicialComplex,
    Cocycle)`` pair.  After fitting, ``betti_`` holds the ranks and
    ``profile_`` the full report object.
    """

    def __init__(self, mode="symbolic", trials=5, seed=0, primes=DEFAULT_PRIMES):
        self.mode = mode
        self.trials = trials
        self.seed = seed
        self.primes = primes

    def fit(self, X, y=None):
        check_mode(self.mode)
        trials = check_positive_int(self.trials, "trials")
        primes = check_primes(self.primes)
        if isinstance(X, tuple) and len(X) == 2:
            X = twist(*X)
        if not isinstance(X, TwistedComplex):
            raise UsageError("fit expects a twisted complex or a (complex, cocycle) pair")
        self.profile_ = novikov_numbers(X, self.mode, trials, self.seed, primes)
        self.betti_ = np.array(self.profile_.betti, dtype=int)
        self.torsion_lower_ = (
            None if self.profile_.torsion_lower is None else np.array(self.profile_.torsion_lower, dtype=int)
        )
        self.euler_ = self.profile_.euler
        return self

    def predict(self, X=None):
        """Novikov numbers of the fitted complex (``X`` is ignored)."""
        check_is_fitted(self, "betti_")
        return self.betti_.copy()


class BetaCriticalPoints(BaseEstimator, TransformerMixin):
    """beta-critical points of a trigonometric function on a flat torus.

    ``fit(f, beta)`` runs the seeded Newton search.  ``transform`` evaluates
    the Lichnerowicz derivative ``d_beta f`` at base points, one row each.
    """

    def __init__(self, grid=None, tol=DEFAULT_TOL, dedupe_radius=DEFAULT_DEDUPE):
        self.grid = grid
        self.tol = tol
        self.dedupe_radius = dedupe_radius

    def _check(self):
        if self.grid is not None:
            check_positive_int(self.grid, "grid", minimum=2)
        check_tolerance(self.tol)
        check_tolerance(self.dedupe_radius, "dedupe_radius")

    def fit(self, f, beta):
        self._check()
        result = critical_points(f, beta, self.grid, self.tol, self.dedupe_radius)
        self._store(result, f, beta)
        return self

    def _store(self, result, f, beta):
        self.result_ = result
        self.function_ = f
        self.beta_ = beta
        self.points_ = result.locations()
        self.indices_ = np.array([-1 if p.index is None else p.index for p in result.points], dtype=int)
        self.counts_ = np.array(result.counts(), dtype=int)
        self.is_beta_morse_ = result.beta_morse

    def transform(self, X):
        check_is_fitted(self, "result_")
        X = check_points(X, self.beta_.n)
        return np.array([d_beta(self.function_, self.beta_, x) for x in X])

    def predict(self, X):
        """Index of the nearest critical point for each row of ``X`` (``-1``
        when the point is farther than the dedupe radius from every one)."""
        check_is_fitted(self, "result_")
        X = check_points(X, self.points_.shape[1])
        out = np.full(len(X), -1, dtype=int)
        if not len(self.points_):
            return out
        for i, x in enumerate(X):
            diff = np.abs(self.points_ - x) % (2 * np.pi)
            diff = np.minimum(diff, 2 * np.pi - diff)
            dist = np.linalg.norm(diff, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= self.dedupe_radius:
                out[i] = self.indices_[j]
        return out


class FiberCriticalPoints(BetaCriticalPoints):
    """beta-critical points of a generating function on ``T^n x R^m``."""

    def __init__(self, grid=None, fiber_grid=DEFAULT_FIBER_GRID, tol=DEFAULT_TOL, dedupe_radius=DEFAULT_DEDUPE):
        super().__init__(grid, tol, dedupe_radius)
        self.fiber_grid = fiber_grid

    def fit(self, F, beta):
        self._check()
        check_positive_int(self.fiber_grid, "fiber_grid")
        result = fiber_critical_points(F, beta, self.grid, self.fiber_grid, self.tol, self.dedupe_radius)
        self._store(result, F, beta)
        self.counts_ = np.array(result.counts(F.n + F.m), dtype=int)
        self.index_shift_ = F.index_shift
        return self

    def transform(self, X):
        raise UsageError("transform is defined for base functions; use the generating function directly")

    def predict(self, X):
        # fiber coordinates are not periodic, so only the base part wraps
        check_is_fitted(self, "result_")
        X = check_points(X, self.points_.shape[1] if len(self.points_) else self.function_.dim)
        out = np.full(len(X), -1, dtype=int)
        n = self.function_.n
        for i, x in enumerate(X):
            if not len(self.points_):
                break
            diff = np.abs(self.points_ - x)
            base = diff[:, :n] % (2 * np.pi)
            diff[:, :n] = np.minimum(base, 2 * np.pi - base)
            dist = np.linalg.norm(diff, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= self.dedupe_radius:
                out[i] = self.indices_[j]
        return out


class ChordDetector(BaseEstimator):
    """Liouville chords between two generating-function Lagrangians.

    ``fit(F1, F2, beta)`` stores the pair; ``predict(ts)`` returns the chord
    count for each length in ``ts``.  ``chords_`` keeps the full sets.
    """

    def __init__(self, grid=None, fiber_grid=DEFAULT_FIBER_GRID, tol=DEFAULT_TOL, match_tol=MATCH_TOL,
                 marginal_tol=MARGINAL_TOL):
        self.grid = grid
        self.fiber_grid = fiber_grid
        self.tol = tol
        self.match_tol = match_tol
        self.marginal_tol = marginal_tol

    def fit(self, F1, F2, beta):
        if self.grid is not None:
            check_positive_int(self.grid, "grid", minimum=2)
        check_positive_int(self.fiber_grid, "fiber_grid")
        for name in ("tol", "match_tol", "marginal_tol"):
            check_tolerance(getattr(self, name), name)
        self.pair_ = (F1, F2)
        self.beta_ = beta
        self.chords_ = {}
        return self

    def chords(self, t):
        check_is_fitted(self, "pair_")
        t = float(t)
        if t not in self.chords_:
            F1, F2 = self.pair_
            self.chords_[t] = find_chords(F1, F2, self.beta_, t, grid=self.grid, fiber_grid=self.fiber_grid,
                                          tol=self.tol, match_tol=self.match_tol,
                                          marginal_tol=self.marginal_tol)
        return self.chords_[t]

    def predict(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.array([self.chords(t).count for t in ts], dtype=int)

    def predict_essential(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.array([self.chords(t).essential_count() for t in ts], dtype=int)
