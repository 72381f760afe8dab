"""Generating functions quadratic at infinity over the flat torus.

``F(x, xi) = Q(xi) + bump(|xi| / R) * sum_c T_c(x) * xi^{j_c}`` where
``Q(xi) = sum eps_i xi_i^2`` with ``eps_i = +-1`` and ``bump`` is the C^2
quintic cutoff, equal to 1 on ``[0, 1/2]`` and 0 on ``[1, inf)``.  Outside
the ball of radius ``R`` the function is exactly ``Q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import UsageError
from .smooth import (
    DEFAULT_DEDUPE,
    DEFAULT_DEGENERACY,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    TWO_PI,
    BetaForm,
    CriticalPointSet,
    PulledBackForm,
    TorusFunction,
    check_class,
    default_grid,
    find_beta_critical,
    grid_seeds,
    torus_profile,
)

DEFAULT_FIBER_GRID = 17


def bump(s):
    """Quintic smoothstep cutoff and its first two derivatives in ``s``."""
    s = np.asarray(s, dtype=float)
    u = np.clip(2.0 * s - 1.0, 0.0, 1.0)
    inside = (s > 0.5) & (s < 1.0)
    S = u**3 * (10 - 15 * u + 6 * u * u)
    dS = 30 * u * u * (1 - u) ** 2
    ddS = 60 * u * (1 - u) * (1 - 2 * u)
    b = 1.0 - S
    db = np.where(inside, -2.0 * dS, 0.0)
    ddb = np.where(inside, -4.0 * ddS, 0.0)
    return b, db, ddb


@dataclass(frozen=True)
class Coupling:
    """One term ``T(x) * xi^exps`` of the compactly supported part."""

    trig: TorusFunction
    exps: tuple

    def monomial(self, xi):
        """Value, gradient and Hessian of ``xi^exps``."""
        m = len(self.exps)
        e = np.array(self.exps, dtype=float)
        batch = xi.shape[:-1]
        val = np.ones(batch)
        for i in range(m):
            if self.exps[i]:
                val = val * xi[..., i] ** self.exps[i]
        grad = np.zeros(batch + (m,))
        hess = np.zeros(batch + (m, m))
        for i in range(m):
            if not self.exps[i]:
                continue
            gi = e[i] * _pow(xi[..., i], self.exps[i] - 1)
            for k in range(m):
                if k != i:
                    gi = gi * _pow(xi[..., k], self.exps[k])
            grad[..., i] = gi
            for j in range(m):
                if j == i:
                    if self.exps[i] < 2:
                        continue
                    hij = e[i] * (e[i] - 1) * _pow(xi[..., i], self.exps[i] - 2)
                    for k in range(m):
                        if k != i:
                            hij = hij * _pow(xi[..., k], self.exps[k])
                else:
                    if not self.exps[j]:
                        continue
                    hij = e[i] * e[j] * _pow(xi[..., i], self.exps[i] - 1) * _pow(xi[..., j], self.exps[j] - 1)
                    for k in range(m):
                        if k not in (i, j):
                            hij = hij * _pow(xi[..., k], self.exps[k])
                hess[..., i, j] = hij
        return val, grad, hess


def _pow(v, k):
    return np.ones_like(v) if k == 0 else v**k


class GeneratingFunction:
    """``Q(xi) + bump(|xi|/R) * sum of couplings`` on ``T^n x R^m``."""

    def __init__(self, n, signs, radius, couplings=()):
        self.n = int(n)
        self.signs = tuple(int(s) for s in signs)
        if any(s not in (1, -1) for s in self.signs):
            raise UsageError("quadratic signs must be +1 or -1")
        self.m = len(self.signs)
        self.radius = float(radius)
        if self.radius <= 0:
            raise UsageError("coupling radius must be positive")
        self.couplings = tuple(couplings)
        for c in self.couplings:
            if c.trig.n != self.n or len(c.exps) != self.m or any(e < 0 for e in c.exps):
                raise UsageError("coupling does not match the base and fiber dimensions")

    @classmethod
    def from_function(cls, f: TorusFunction, signs=(), radius=4.0):
        """``Q(xi) + bump(|xi|/R) f(x)``: the fiber-degenerate family."""
        return cls(f.n, signs, radius, [Coupling(f, (0,) * len(signs))])

    @property
    def dim(self):
        return self.n + self.m

    @property
    def index_shift(self):
        """Negative-definite dimension of ``Q``."""
        return sum(1 for s in self.signs if s < 0)

    def with_signs(self, signs):
        return GeneratingFunction(self.n, signs, self.radius, self.couplings)

    def scaled(self, c):
        """``c * F`` for ``c > 0``; still quadratic at infinity, with form ``c Q``."""
        return ScaledFunction(self, c)

    def _split(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., : self.n], z[..., self.n:]

    def _bump(self, xi):
        r = np.linalg.norm(xi, axis=-1)
        b, db, ddb = bump(r / self.radius)
        return r, b, db / self.radius, ddb / self.radius**2

    def value(self, z):
        x, xi = self._split(z)
        out = (xi * xi) @ np.array(self.signs, dtype=float) if self.m else np.zeros(x.shape[:-1])
        if self.couplings:
            _, b, _, _ = self._bump(xi) if self.m else (None, 1.0, 0, 0)
            acc = 0.0
            for c in self.couplings:
                p, _, _ = c.monomial(xi)
                acc = acc + c.trig.value(x) * p
            out = out + b * acc
        return out

    def _bump_derivs(self, xi):
        """Gradient and Hessian of ``bump(|xi|/R)`` in ``xi``."""
        r, b, db, ddb = self._bump(xi)
        safe = np.where(r > 0, r, 1.0)
        u = xi / safe[..., None]
        grad = db[..., None] * u
        eye = np.eye(self.m)
        outer = u[..., :, None] * u[..., None, :]
        hess = ddb[..., None, None] * outer + (db / safe)[..., None, None] * (eye - outer)
        return b, grad, hess

    def gradient(self, z):
        x, xi = self._split(z)
        batch = x.shape[:-1]
        gx = np.zeros(batch + (self.n,))
        gxi = 2.0 * xi * np.array(self.signs, dtype=float) if self.m else np.zeros(batch + (0,))
        if self.couplings:
            if self.m:
                b, db, _ = self._bump_derivs(xi)
            else:
                b, db = np.ones(batch), np.zeros(batch + (0,))
            for c in self.couplings:
                p, dp, _ = c.monomial(xi)
                T = c.trig.value(x)
                gx = gx + (b * p)[..., None] * c.trig.gradient(x)
                gxi = gxi + T[..., None] * (p[..., None] * db + b[..., None] * dp)
        return np.concatenate([gx, gxi], axis=-1)

    def hessian(self, z):
        x, xi = self._split(z)
        batch = x.shape[:-1]
        n, m = self.n, self.m
        H = np.zeros(batch + (n + m, n + m))
        if m:
            H[..., n:, n:] += 2.0 * np.diag(np.array(self.signs, dtype=float))
        if not self.couplings:
            return H
        if m:
            b, db, hb = self._bump_derivs(xi)
        else:
            b, db, hb = np.ones(batch), np.zeros(batch + (0,)), np.zeros(batch + (0, 0))
        for c in self.couplings:
            p, dp, hp = c.monomial(xi)
            T, dT, hT = c.trig.value(x), c.trig.gradient(x), c.trig.hessian(x)
            bp = b * p
            dbp = p[..., None] * db + b[..., None] * dp
            hbp = (p[..., None, None] * hb + db[..., :, None] * dp[..., None, :]
                   + dp[..., :, None] * db[..., None, :] + b[..., None, None] * hp)
            H[..., :n, :n] += bp[..., None, None] * hT
            cross = dT[..., :, None] * dbp[..., None, :]
            H[..., :n, n:] += cross
            H[..., n:, :n] += np.swapaxes(cross, -1, -2)
            H[..., n:, n:] += T[..., None, None] * hbp
        return H

    def fiber_gradient(self, z):
        return self.gradient(z)[..., self.n:]

    def __repr__(self):
        return f"GeneratingFunction(n={self.n}, signs={self.signs}, R={self.radius}, couplings={len(self.couplings)})"


class ScaledFunction:
    """``c * F`` for a positive constant ``c``."""

    def __init__(self, base, c):
        if c <= 0:
            raise UsageError("rescaling constant must be positive")
        self.base = base
        self.c = float(c)
        self.n, self.m, self.radius, self.signs = base.n, base.m, base.radius, base.signs

    @property
    def dim(self):
        return self.base.dim

    @property
    def index_shift(self):
        return self.base.index_shift

    def value(self, z):
        return self.c * self.base.value(z)

    def gradient(self, z):
        return self.c * self.base.gradient(z)

    def hessian(self, z):
        return self.c * self.base.hessian(z)


def fiber_seeds(F, grid=None, fiber_grid=DEFAULT_FIBER_GRID, offset=0.0):
    grid = default_grid(F.n) if grid is None else int(grid)
    sizes = [grid] * F.n + [fiber_grid] * F.m
    lows = [0.0] * F.n + [-F.radius] * F.m
    highs = [TWO_PI] * F.n + [F.radius] * F.m
    return grid_seeds(sizes, lows, highs, offset)


@dataclass
class FiberCriticalSet(CriticalPointSet):
    outside_radius: tuple = ()

    @property
    def consistent(self):
        return not self.outside_radius

    def to_dict(self):
        out = super().to_dict()
        out["outside_radius"] = [list(p) for p in self.outside_radius]
        return out


def fiber_critical_points(F, beta: BetaForm, grid=None, fiber_grid=DEFAULT_FIBER_GRID, tol=DEFAULT_TOL,
                          dedupe_radius=DEFAULT_DEDUPE, degeneracy=DEFAULT_DEGENERACY,
                          max_iter=DEFAULT_MAX_ITER):
    """beta-critical points of ``F`` on ``T^n x R^m`` with ``beta`` pulled back
    from the base; indices are taken in all ``n + m`` variables."""
    if beta.n != F.n:
        raise UsageError("form and generating function have different base dimensions")
    seeds = fiber_seeds(F, grid, fiber_grid)
    periodic = np.array([True] * F.n + [False] * F.m)
    form = PulledBackForm(beta, F.m)
    params = {"grid": default_grid(F.n) if grid is None else int(grid), "fiber_grid": fiber_grid, "tol": tol,
              "dedupe_radius": dedupe_radius, "degeneracy": degeneracy, "max_iter": max_iter}
    res = find_beta_critical(F, form, seeds, periodic, tol, dedupe_radius, degeneracy, max_iter, params)
    outside = tuple(
        tuple(p.location) for p in res.points if np.linalg.norm(p.location[F.n:]) > F.radius
    )
    return FiberCriticalSet(res.points, res.beta_morse, res.dim, res.seeds, res.converged, res.params, outside)


def verify_theorem1(F, beta: BetaForm, profile=None, result=None, **kw):
    """Check ``#Crit_j(F) >= b_(j - p)`` with ``p`` the index of ``Q``."""
    if profile is not None:
        check_class(beta, profile)
        source = "given"
    else:
        profile, tc = torus_profile(beta)
        source = "model" if tc is not None else "vanishing"
    result = result or fiber_critical_points(F, beta, **kw)
    p = F.index_shift
    counts = result.counts(F.n + F.m)
    bound = [profile.betti_at(j - p) for j in range(F.n + F.m + 1)]
    holds = [c >= b for c, b in zip(counts, bound)]
    hyp = result.beta_morse and getattr(result, "consistent", True)
    return {
        "clause": "thm1",
        "ok": bool(hyp and all(holds)),
        "hypothesis_ok": bool(hyp),
        "index_shift": p,
        "counts": list(counts),
        "bound": bound,
        "holds": holds,
        "alternating_sum": result.alternating_sum() if result.dim == F.n + F.m else None,
        "profile_source": source,
        "critical_points": result.to_dict(),
    }


def lagrangian_min_value(F, grid=None, fiber_grid=DEFAULT_FIBER_GRID, tol=1e-11, max_iter=DEFAULT_MAX_ITER):
    """Smallest value of ``F`` over sampled fiber-critical points ``d_xi F = 0``.

    For each base sample the fiber equation is solved by Newton from the
    fiber seed box; with no fiber the function is simply sampled.
    """
    grid = default_grid(F.n) if grid is None else int(grid)
    base = grid_seeds([grid] * F.n, [0.0] * F.n, [TWO_PI] * F.n)
    if F.m == 0:
        return float(np.min(F.value(base)))
    fib = grid_seeds([fiber_grid] * F.m, [-F.radius] * F.m, [F.radius] * F.m)
    z = np.concatenate([np.repeat(base, len(fib), axis=0), np.tile(fib, (len(base), 1))], axis=1)
    n = F.n
    done = np.zeros(len(z), dtype=bool)
    for _ in range(max_iter):
        g = F.gradient(z)[:, n:]
        done |= np.linalg.norm(g, axis=1) <= tol
        act = ~done
        if not act.any():
            break
        H = F.hessian(z[act])[:, n:, n:]
        det = np.linalg.det(H)
        ok = np.abs(det) > 1e-14
        idx = np.nonzero(act)[0][ok]
        step = np.linalg.solve(H[ok], g[act][ok][:, :, None])[:, :, 0]
        z[idx, n:] -= step
    vals = F.value(z[done])
    return float(np.min(vals)) if len(vals) else float("inf")
