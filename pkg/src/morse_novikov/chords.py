"""Liouville chords between generating-function Lagrangians.

Chords of length ``t`` from ``L_F1`` to ``L_F2`` are the beta-critical points
of the difference function ``F2(x, xi2) - e^t F1(x, xi1)``.  Two solvers
compute them:

1. Newton on the difference function (the generic beta-critical engine);
2. the split system ``d_xi1 F1 = 0``, ``d_xi2 F2 = 0``,
   ``d_beta F2 = e^t d_beta F1`` solved by bracketing root finding on the
   circle with no fiber, and by MINPACK's hybrid method otherwise.

Both always run; their point sets must agree.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .exceptions import HypothesisError, SolverDisagreementError, UsageError
from .genfun import DEFAULT_FIBER_GRID, lagrangian_min_value
from .novikov import NovikovProfile
from .smooth import (
    DEFAULT_DEDUPE,
    DEFAULT_DEGENERACY,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    TWO_PI,
    BetaForm,
    PulledBackForm,
    _distance,
    check_class,
    dedupe,
    default_grid,
    find_beta_critical,
    grid_seeds,
    torus_profile,
)

MARGINAL_TOL = 1e-9
MATCH_TOL = 1e-6
SECOND_PATH_GRID = 32
SECOND_PATH_FIBER_GRID = 5
SAMPLES_1D = 2048


class HypothesisWarning(UserWarning):
    """A theorem hypothesis failed; the affected flags are suppressed."""


class DifferenceFunction:
    """``Delta(x, xi1, xi2) = F2(x, xi2) - e^t F1(x, xi1)``."""

    def __init__(self, F1, F2, t):
        if F1.n != F2.n:
            raise UsageError("generating functions live over different bases")
        self.F1, self.F2, self.t = F1, F2, float(t)
        self.n = F1.n
        self.m1, self.m2 = F1.m, F2.m
        self.m = self.m1 + self.m2
        self.scale = math.exp(self.t)

    @property
    def dim(self):
        return self.n + self.m

    @property
    def index_shift(self):
        """Negative-definite dimension at infinity: ``p2 + (m1 - p1)``."""
        return self.F2.index_shift + (self.m1 - self.F1.index_shift)

    def _parts(self, z):
        z = np.asarray(z, dtype=float)
        x = z[..., : self.n]
        xi1 = z[..., self.n: self.n + self.m1]
        xi2 = z[..., self.n + self.m1:]
        return np.concatenate([x, xi1], axis=-1), np.concatenate([x, xi2], axis=-1)

    def value(self, z):
        z1, z2 = self._parts(z)
        return self.F2.value(z2) - self.scale * self.F1.value(z1)

    def gradient(self, z):
        z1, z2 = self._parts(z)
        g1, g2 = self.F1.gradient(z1), self.F2.gradient(z2)
        n = self.n
        return np.concatenate([g2[..., :n] - self.scale * g1[..., :n], -self.scale * g1[..., n:], g2[..., n:]], axis=-1)

    def hessian(self, z):
        z1, z2 = self._parts(z)
        H1, H2 = self.F1.hessian(z1), self.F2.hessian(z2)
        n, m1 = self.n, self.m1
        N = self.dim
        H = np.zeros(H1.shape[:-2] + (N, N))
        e = self.scale
        i1 = list(range(n)) + list(range(n, n + m1))
        i2 = list(range(n)) + list(range(n + m1, N))
        H[..., np.ix_(i1, i1)[0], np.ix_(i1, i1)[1]] -= e * H1
        H[..., np.ix_(i2, i2)[0], np.ix_(i2, i2)[1]] += H2
        return H


@dataclass(frozen=True)
class ChordRecord:
    x: tuple
    xi1: tuple
    xi2: tuple
    t: float
    value: float
    orientation: str
    essential: bool | None
    index: int | None

    @property
    def point(self):
        return self.x + self.xi1 + self.xi2

    def to_dict(self):
        return {
            "x": list(self.x),
            "xi1": list(self.xi1),
            "xi2": list(self.xi2),
            "t": self.t,
            "value": self.value,
            "orientation": self.orientation,
            "essential": self.essential,
            "index": self.index,
        }


def essential_flag(t, value, tol=MARGINAL_TOL):
    """Weak sign rule; ``None`` marks a marginal value within ``tol`` of 0."""
    if abs(value) <= tol:
        return None
    return bool((t >= 0 and value >= 0) or (t <= 0 and value <= 0))


def orientation(t):
    return "positive" if t >= 0 else "negative"


def _seeds(D, grid, fiber_grid, offset):
    sizes = [grid] * D.n + [fiber_grid] * D.m
    lows = [0.0] * D.n + [-D.F1.radius] * D.m1 + [-D.F2.radius] * D.m2
    highs = [TWO_PI] * D.n + [D.F1.radius] * D.m1 + [D.F2.radius] * D.m2
    return grid_seeds(sizes, lows, highs, offset)


def _periodic(D):
    return np.array([True] * D.n + [False] * D.m)


def _split_residual(D, beta, z):
    """Residual of the split system at points ``z`` (batched)."""
    z1, z2 = D._parts(z)
    n = D.n
    g1, g2 = D.F1.gradient(z1), D.F2.gradient(z2)
    b = beta.coefficients(z[..., :n])
    db1 = g1[..., :n] - D.F1.value(z1)[..., None] * b
    db2 = g2[..., :n] - D.F2.value(z2)[..., None] * b
    return np.concatenate([g1[..., n:], g2[..., n:], db2 - D.scale * db1], axis=-1)


def _second_path_1d(D, beta, tol, samples):
    """Bracketing on the circle: zeros of ``d_beta F2 - e^t d_beta F1``."""
    th = np.linspace(0.0, TWO_PI, samples + 1)
    s = _split_residual(D, beta, th[:, None])[:, 0]

    def fun(v):
        return float(_split_residual(D, beta, np.array([[v]]))[0, 0])

    roots = []
    for i in range(samples):
        a, b = s[i], s[i + 1]
        if a == 0.0:
            roots.append(th[i])
        elif a * b < 0:
            roots.append(optimize.brentq(fun, th[i], th[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    pts = np.mod(np.array(roots), TWO_PI).reshape(-1, 1)
    res = np.abs(_split_residual(D, beta, pts)[:, 0]) if len(pts) else np.zeros(0)
    keep = res <= max(tol, 1e-10)
    return pts[keep], res[keep]


def _second_path_root(D, beta, tol, grid, fiber_grid):
    seeds = _seeds(D, grid, fiber_grid, offset=0.25)
    periodic = _periodic(D)
    found = []
    for s in seeds:
        sol = optimize.root(lambda z: _split_residual(D, beta, z[None, :])[0], s, method="hybr",
                            options={"xtol": 1e-14})
        z = sol.x.copy()
        z[: D.n] = np.mod(z[: D.n], TWO_PI)
        r = np.linalg.norm(_split_residual(D, beta, z[None, :])[0])
        if r <= max(tol, 1e-10):
            found.append(z)
    pts = np.array(found).reshape(-1, D.dim)
    res = np.linalg.norm(_split_residual(D, beta, pts), axis=1) if len(pts) else np.zeros(0)
    return dedupe(pts, res, DEFAULT_DEDUPE, periodic)


def _match(a, b, periodic, tol):
    if len(a) != len(b):
        return False
    used = set()
    for p in a:
        d = _distance(b, p, periodic) if len(b) else np.array([])
        j = next((int(k) for k in np.argsort(d) if int(k) not in used), None)
        if j is None or d[j] > tol:
            return False
        used.add(j)
    return True


@dataclass
class ChordSet:
    records: list
    t: float
    beta_morse: bool
    positive: bool | None
    paths_agree: bool
    params: dict

    @property
    def count(self):
        return len(self.records)

    def essential_count(self):
        return sum(1 for r in self.records if r.essential)

    def points(self):
        return np.array([r.point for r in self.records]).reshape(len(self.records), -1)

    def to_dict(self):
        return {
            "t": self.t,
            "count": self.count,
            "essential_count": self.essential_count(),
            "beta_morse": self.beta_morse,
            "positivity_ok": self.positive,
            "paths_agree": self.paths_agree,
            "marginal": sum(1 for r in self.records if r.essential is None),
            "chords": [r.to_dict() for r in self.records],
            "params": dict(self.params),
        }


def check_positivity(F1, F2, grid=None, fiber_grid=DEFAULT_FIBER_GRID):
    """Both generating functions positive at their sampled fiber-critical points."""
    lo1 = lagrangian_min_value(F1, grid, fiber_grid)
    lo2 = lagrangian_min_value(F2, grid, fiber_grid)
    return lo1 > 0 and lo2 > 0, (lo1, lo2)


def find_chords(F1, F2, beta: BetaForm, t, grid=None, fiber_grid=DEFAULT_FIBER_GRID, tol=DEFAULT_TOL,
                dedupe_radius=DEFAULT_DEDUPE, degeneracy=DEFAULT_DEGENERACY, max_iter=DEFAULT_MAX_ITER,
                match_tol=MATCH_TOL, marginal_tol=MARGINAL_TOL, second_grid=SECOND_PATH_GRID,
                second_fiber_grid=SECOND_PATH_FIBER_GRID, check_positive=True):
    """Chords of length ``t``, cross-checked by two independent solvers."""
    D = DifferenceFunction(F1, F2, t)
    if beta.n != D.n:
        raise UsageError("form and generating functions have different base dimensions")
    grid = default_grid(D.n) if grid is None else int(grid)
    form = PulledBackForm(beta, D.m)
    periodic = _periodic(D)
    first = find_beta_critical(D, form, _seeds(D, grid, fiber_grid, 0.0), periodic, tol, dedupe_radius,
                               degeneracy, max_iter)
    p1 = first.locations()
    if D.n == 1 and D.m == 0:
        p2, r2 = _second_path_1d(D, beta, tol, SAMPLES_1D)
        p2, r2 = dedupe(p2, r2, dedupe_radius, periodic)
    else:
        p2, r2 = _second_path_root(D, beta, tol, second_grid, second_fiber_grid)
    agree = _match(p1, p2, periodic, match_tol) and _match(p2, p1, periodic, match_tol)
    if not agree:
        raise SolverDisagreementError(
            f"chord solvers disagree at t={t}: {len(p1)} vs {len(p2)} points",
            p1.tolist(), p2.tolist(),
        )
    positive = None
    if check_positive:
        positive, lows = check_positivity(F1, F2, grid, fiber_grid)
        if not positive:
            warnings.warn(f"generating functions are not positive on their Lagrangians (minima {lows}); "
                          "essential flags suppressed", HypothesisWarning, stacklevel=2)
    records = []
    for p in first.points:
        z = np.array(p.location)
        v = float(D.value(z))
        ess = essential_flag(D.t, v, marginal_tol) if positive is not False else None
        records.append(ChordRecord(
            x=tuple(z[: D.n]), xi1=tuple(z[D.n: D.n + D.m1]), xi2=tuple(z[D.n + D.m1:]),
            t=D.t, value=v, orientation=orientation(D.t), essential=ess, index=p.index,
        ))
    params = {"grid": grid, "fiber_grid": fiber_grid, "tol": tol, "dedupe_radius": dedupe_radius,
              "degeneracy": degeneracy, "max_iter": max_iter, "match_tol": match_tol,
              "marginal_tol": marginal_tol, "second_grid": second_grid,
              "second_fiber_grid": second_fiber_grid}
    return ChordSet(records, D.t, first.beta_morse, positive, agree, params)


def same_point_sets(a: ChordSet, b: ChordSet, tol=MATCH_TOL):
    """Compare base/fiber points of two chord sets, swapping fibers for the dual."""
    if a.count != b.count:
        return False
    if not a.count:
        return True
    pa = np.array([r.x + r.xi1 + r.xi2 for r in a.records])
    pb = np.array([r.x + r.xi2 + r.xi1 for r in b.records])
    n = len(a.records[0].x)
    periodic = np.array([True] * n + [False] * (pa.shape[1] - n))
    return _match(pa, pb, periodic, tol)


# inequalities --------------------------------------------------------------


def _profile_for(beta, profile):
    if profile is not None:
        check_class(beta, profile)
        return profile, "given"
    profile, tc = torus_profile(beta)
    return profile, "model" if tc is not None else "vanishing"


def verify_prop14_total(F1, F2, beta: BetaForm, t, profile: NovikovProfile | None = None, chords=None, **kw):
    """Check ``#chords of length t >= sum_i b_i``."""
    profile, source = _profile_for(beta, profile)
    chords = chords or find_chords(F1, F2, beta, t, **kw)
    bound = profile.total
    return {
        "clause": "prop14",
        "ok": bool(chords.beta_morse and chords.count >= bound),
        "hypothesis_ok": chords.beta_morse,
        "count": chords.count,
        "bound": bound,
        "betti_novikov": list(profile.betti),
        "profile_source": source,
        "chords": chords.to_dict(),
    }


def _arcs(fun, samples, tol):
    """Zeros of a periodic scalar function on the circle, with a regularity check.

    Returns ``(roots, regular)``.
    """
    th = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    v = fun(th)
    roots = []
    for i in range(samples):
        a, b = v[i], v[(i + 1) % samples]
        lo = th[i]
        hi = th[i] + TWO_PI / samples
        if a == 0.0 or a * b < 0:
            roots.append(optimize.brentq(lambda s: float(fun(np.array([s]))[0]), lo, hi, xtol=1e-14)
                         if a != 0.0 else lo)
    regular = True
    h = 1e-6
    for r in roots:
        slope = (fun(np.array([r + h]))[0] - fun(np.array([r - h]))[0]) / (2 * h)
        if abs(slope) <= tol:
            regular = False
    # near-tangencies that do not cross: local minima of |v| close to zero
    av = np.abs(v)
    for i in range(samples):
        if av[i] <= av[i - 1] and av[i] <= av[(i + 1) % samples] and v[i - 1] * v[(i + 1) % samples] > 0:
            res = optimize.minimize_scalar(lambda s: abs(float(fun(np.array([s]))[0])),
                                           bounds=(th[i] - TWO_PI / samples, th[i] + TWO_PI / samples),
                                           method="bounded", options={"xatol": 1e-12})
            if res.fun <= tol:
                regular = False
    return np.mod(np.array(roots), TWO_PI), regular


def essential_chords_1d(F1, F2, beta: BetaForm, t, samples=SAMPLES_1D, tol=1e-8, chords=None, **kw):
    """Essential chord bound on the circle with no fiber variables.

    For ``t <= 0`` the relevant set is ``{Delta <= 0}``, for ``t > 0`` it is
    ``{Delta >= 0}`` (the dual description).  A whole circle contributes the
    Novikov numbers of the class, a union of ``c`` proper arcs contributes
    ``c`` (the class is exact on each arc).
    """
    if beta.n != 1 or F1.m or F2.m:
        raise UsageError("the sublevel bound is implemented for the circle without fiber variables")
    D = DifferenceFunction(F1, F2, t)
    sign = -1.0 if D.t <= 0 else 1.0

    def fun(th):
        return D.value(np.asarray(th)[:, None])

    roots, regular = _arcs(fun, samples, tol)
    if not regular:
        raise HypothesisError(f"0 is not a regular value of the difference function at t={t}")
    if len(roots) == 0:
        inside = sign * float(fun(np.array([0.0]))[0]) >= 0
        if inside:
            profile, _ = torus_profile(beta)
            region, bound = "circle", profile.total
        else:
            region, bound = "empty", 0
        arcs = 0
    else:
        arcs = len(roots) // 2
        region, bound = "arcs", arcs
    chords = chords or find_chords(F1, F2, beta, t, **kw)
    ess = [r for r in chords.records if r.essential]
    return {
        "clause": "prop14_essential",
        "ok": bool(chords.beta_morse and len(ess) >= bound),
        "hypothesis_ok": chords.beta_morse,
        "t": D.t,
        "region": region,
        "arcs": arcs,
        "boundary_points": [float(r) for r in np.sort(roots)],
        "bound": bound,
        "essential_count": len(ess),
        "chords": chords.to_dict(),
    }


# sweeps --------------------------------------------------------------------


def sweep(F1, F2, beta: BetaForm, t_range=(-0.5, 0.5), samples=101, refine_depth=12, **kw):
    """Chord counts over a uniform ``t`` grid, bisecting where counts change.

    Every evaluation runs both solvers.  Transitions are bracketed to width
    ``(t_hi - t_lo) / (samples - 1) / 2^refine_depth``.
    """
    lo, hi = map(float, t_range)
    if samples < 2 or hi <= lo:
        raise UsageError("sweep needs at least two samples on a nonempty range")
    ts = [lo + (hi - lo) * i / (samples - 1) for i in range(samples)]
    cache = {}

    def count(t):
        if t not in cache:
            cache[t] = find_chords(F1, F2, beta, t, **kw)
        return cache[t]

    rows = [count(t) for t in ts]
    transitions = []
    for a, b in zip(ts, ts[1:]):
        ca, cb = cache[a].count, cache[b].count
        if ca == cb:
            continue
        x, y = a, b
        for _ in range(refine_depth):
            mid = 0.5 * (x + y)
            try:
                cm = count(mid).count
            except SolverDisagreementError:
                # solvers can split on an almost degenerate pair; keep bisecting towards it
                break
            if cm == ca:
                x = mid
            else:
                y = mid
        transitions.append({"t_low": x, "t_high": y, "count_low": ca, "count_high": cb})
    return {
        "t": ts,
        "counts": [r.count for r in rows],
        "essential_counts": [r.essential_count() for r in rows],
        "beta_morse": [r.beta_morse for r in rows],
        "paths_agree": all(r.paths_agree for r in rows),
        "transitions": transitions,
    }
