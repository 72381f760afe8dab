"""beta-critical points of trigonometric functions on flat tori.

Points of the torus are angle vectors ``x`` in ``[0, 2*pi)^n``.  A closed
1-form is ``beta = sum a_j dx_j + dh`` with ``h`` a trigonometric
polynomial; its period over the j-th coordinate loop is ``2*pi*a_j`` and a
local primitive on the universal cover is ``g(x) = <a, x> + h(x)``.

A beta-critical point of ``f`` is a zero of ``df - f*beta``.  Its index is
the Morse index of ``exp(-g) f`` there, read off from the symmetric matrix
``Hess f - f*(beta beta^T + Dbeta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ClassMismatchError, DegenerateCriticalPointError, UsageError

TWO_PI = 2.0 * np.pi

DEFAULT_TOL = 1e-12
DEFAULT_DEDUPE = 1e-6
DEFAULT_DEGENERACY = 1e-8
DEFAULT_MAX_ITER = 50


def default_grid(n):
    if n == 1:
        return 256
    if n == 2:
        return 128
    return 16


class TorusFunction:
    """``f(x) = sum amp * cos(<k, x> + phase)`` over integer frequencies ``k``."""

    def __init__(self, n, terms=()):
        self.n = int(n)
        freqs, amps, phases = [], [], []
        for k, amp, phase in terms:
            k = tuple(int(v) for v in k)
            if len(k) != self.n:
                raise UsageError(f"frequency {k} does not have {self.n} entries")
            freqs.append(k)
            amps.append(float(amp))
            phases.append(float(phase))
        self.freqs = np.array(freqs, dtype=float).reshape(-1, self.n)
        self.amps = np.array(amps, dtype=float)
        self.phases = np.array(phases, dtype=float)

    @classmethod
    def constant(cls, n, c):
        return cls(n, [((0,) * n, c, 0.0)])

    @classmethod
    def sine(cls, n, k, amp=1.0):
        """``amp * sin(<k, x>)``."""
        return cls(n, [(k, amp, -np.pi / 2)])

    @property
    def terms(self):
        return [
            (tuple(int(v) for v in k), float(a), float(p))
            for k, a, p in zip(self.freqs, self.amps, self.phases)
        ]

    def __add__(self, other):
        if not isinstance(other, TorusFunction) or other.n != self.n:
            return NotImplemented
        return TorusFunction(self.n, self.terms + other.terms)

    def scale(self, c):
        return TorusFunction(self.n, [(k, c * a, p) for k, a, p in self.terms])

    def _phase(self, x):
        return x @ self.freqs.T + self.phases

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.cos(self._phase(x)) @ self.amps

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return -(np.sin(self._phase(x)) * self.amps) @ self.freqs

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        w = -np.cos(self._phase(x)) * self.amps
        return np.einsum("...t,ti,tj->...ij", w, self.freqs, self.freqs)

    def __repr__(self):
        return f"TorusFunction(n={self.n}, terms={len(self.amps)})"


class ConformalFunction:
    """``exp(u) * f`` for torus functions ``u`` and ``f``."""

    def __init__(self, u: TorusFunction, f):
        if u.n != f.n:
            raise UsageError("gauge and function live on different tori")
        self.n = f.n
        self.u = u
        self.f = f

    def value(self, x):
        return np.exp(self.u.value(x)) * self.f.value(x)

    def gradient(self, x):
        e = np.exp(self.u.value(x))[..., None]
        return e * (self.f.value(x)[..., None] * self.u.gradient(x) + self.f.gradient(x))

    def hessian(self, x):
        e = np.exp(self.u.value(x))[..., None, None]
        fu, gu, hu = self.f.value(x)[..., None, None], self.u.gradient(x), self.u.hessian(x)
        gf, hf = self.f.gradient(x), self.f.hessian(x)
        outer = lambda a, b: a[..., :, None] * b[..., None, :]  # noqa: E731
        return e * (fu * (outer(gu, gu) + hu) + outer(gu, gf) + outer(gf, gu) + hf)


@dataclass(frozen=True)
class BetaForm:
    """``beta = sum a_j dx_j + dh`` on the n-torus."""

    a: tuple
    exact: TorusFunction | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if self.exact is not None and self.exact.n != len(self.a):
            raise UsageError("exact part and constant part have different dimensions")

    @property
    def n(self):
        return len(self.a)

    @property
    def periods(self):
        """Integrals over the coordinate loops, in units of ``2*pi``."""
        return self.a

    def is_integral(self, tol=1e-12):
        return all(abs(v - round(v)) <= tol for v in self.a)

    def is_exact(self):
        return not any(self.a)

    def coefficients(self, x):
        x = np.asarray(x, dtype=float)
        out = np.broadcast_to(np.array(self.a), x.shape).copy()
        if self.exact is not None:
            out += self.exact.gradient(x)
        return out

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        if self.exact is None:
            return np.zeros(x.shape + (self.n,))
        return self.exact.hessian(x)

    def primitive(self, x, base):
        """Local primitive ``g(x) - g(base)`` along the straight segment."""
        x = np.asarray(x, dtype=float)
        g = (x - base) @ np.array(self.a)
        if self.exact is not None:
            g = g + self.exact.value(x) - self.exact.value(np.asarray(base, dtype=float))
        return g

    def gauge(self, u: TorusFunction):
        """``beta + du``."""
        h = u if self.exact is None else self.exact + u
        return BetaForm(self.a, h)


class PulledBackForm:
    """A base form viewed on ``base x fiber``: no components along the fiber."""

    def __init__(self, beta: BetaForm, fiber_dim):
        self.beta = beta
        self.m = int(fiber_dim)
        self.n = beta.n + self.m

    def coefficients(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        out[..., : self.beta.n] = self.beta.coefficients(x[..., : self.beta.n])
        return out

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (self.n,))
        nb = self.beta.n
        out[..., :nb, :nb] = self.beta.jacobian(x[..., :nb])
        return out


def d_beta(f, beta, x):
    """``df(x) - f(x) beta(x)``."""
    return f.gradient(x) - f.value(x)[..., None] * beta.coefficients(x)


def reduced_matrix(f, beta, x):
    """Symmetric part of ``Hess f - f (beta beta^T + Dbeta)``."""
    b = beta.coefficients(x)
    fv = f.value(x)[..., None, None]
    A = f.hessian(x) - fv * (b[..., :, None] * b[..., None, :] + beta.jacobian(x))
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def reduce_index(f, beta, x, degeneracy=DEFAULT_DEGENERACY):
    """Number of negative eigenvalues of the reduced matrix at ``x``."""
    eig = np.linalg.eigvalsh(reduced_matrix(f, beta, np.asarray(x, dtype=float)))
    if np.min(np.abs(eig)) <= degeneracy:
        raise DegenerateCriticalPointError(f"eigenvalue {eig[np.argmin(np.abs(eig))]:.3e} is within {degeneracy} of 0")
    return int(np.sum(eig < 0))


def finite_difference_hessian(f, beta, x, step=1e-5, periodic_dims=None):
    """Central-difference Hessian of ``exp(-g) f`` in the chart centred at ``x``,
    with ``g`` normalised to vanish at ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    base_beta = beta.beta if isinstance(beta, PulledBackForm) else beta
    nb = base_beta.n

    def phi(y):
        g = base_beta.primitive(y[..., :nb], x[:nb])
        return np.exp(-g) * f.value(y)

    H = np.empty((n, n))
    E = np.eye(n) * step
    for i in range(n):
        for j in range(i, n):
            pts = np.stack([x + E[i] + E[j], x + E[i] - E[j], x - E[i] + E[j], x - E[i] - E[j]])
            v = phi(pts)
            H[i, j] = H[j, i] = (v[0] - v[1] - v[2] + v[3]) / (4 * step * step)
    return H


@dataclass(frozen=True)
class BetaCriticalPoint:
    location: tuple
    index: int | None
    residual: float
    det: float
    min_abs_eigenvalue: float

    def to_dict(self):
        return {
            "location": [float(v) for v in self.location],
            "index": self.index,
            "residual": float(self.residual),
            "det": float(self.det),
            "min_abs_eigenvalue": float(self.min_abs_eigenvalue),
        }


@dataclass
class CriticalPointSet:
    points: list
    beta_morse: bool
    dim: int
    seeds: int
    converged: int
    params: dict = field(default_factory=dict)

    def counts(self, dim=None):
        dim = self.dim if dim is None else dim
        c = [0] * (dim + 1)
        for p in self.points:
            if p.index is not None:
                c[p.index] += 1
        return tuple(c)

    def locations(self):
        return np.array([p.location for p in self.points]).reshape(-1, self.dim)

    def alternating_sum(self):
        return sum((-1) ** j * c for j, c in enumerate(self.counts()))

    def to_dict(self):
        return {
            "points": [p.to_dict() for p in self.points],
            "counts": list(self.counts()),
            "beta_morse": self.beta_morse,
            "seeds": self.seeds,
            "converged": self.converged,
            "params": dict(self.params),
        }


def grid_seeds(sizes, lows, highs, offset=0.0):
    """Cell-centred (or shifted by ``offset`` cells) tensor grid."""
    axes = []
    for s, lo, hi in zip(sizes, lows, highs):
        h = (hi - lo) / s
        axes.append(lo + (np.arange(s) + 0.5 + offset) * h)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _wrap(x, periodic):
    x = x.copy()
    x[:, periodic] = np.mod(x[:, periodic], TWO_PI)
    return x


def _distance(a, b, periodic):
    d = np.abs(a - b)
    d[..., periodic] = np.minimum(d[..., periodic], TWO_PI - d[..., periodic])
    return np.max(d, axis=-1)


def newton_solve(f, beta, seeds, periodic, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Vectorized Newton iteration on ``df - f beta``; returns converged points
    and their residual norms."""
    x = np.array(seeds, dtype=float)
    alive = np.ones(len(x), dtype=bool)
    done = np.zeros(len(x), dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(alive & ~done)[0]
        if not len(idx):
            break
        xs = x[idx]
        fv = f.value(xs)
        gf = f.gradient(xs)
        b = beta.coefficients(xs)
        G = gf - fv[:, None] * b
        res = np.linalg.norm(G, axis=1)
        conv = res <= tol
        done[idx[conv]] = True
        work = ~conv
        if not work.any():
            break
        idx, xs, G = idx[work], xs[work], G[work]
        fv, gf, b = fv[work], gf[work], b[work]
        J = f.hessian(xs) - b[:, :, None] * gf[:, None, :] - fv[:, None, None] * beta.jacobian(xs)
        det = np.linalg.det(J)
        ok = np.isfinite(det) & (np.abs(det) > 1e-14)
        alive[idx[~ok]] = False
        idx, xs, G, J = idx[ok], xs[ok], G[ok], J[ok]
        if len(idx):
            step = np.linalg.solve(J, G[:, :, None])[:, :, 0]
            x[idx] = _wrap(xs - step, periodic)
    # final residual check for points converged on the last step
    idx = np.nonzero(alive & ~done)[0]
    if len(idx):
        res = np.linalg.norm(d_beta(f, beta, x[idx]), axis=1)
        done[idx[res <= tol]] = True
    pts = x[done]
    res = np.linalg.norm(d_beta(f, beta, pts), axis=1) if len(pts) else np.zeros(0)
    return pts, res


def dedupe(points, residuals, radius, periodic):
    """Cluster converged points; keep the lowest-residual member of each new cluster.

    Points are processed in lexicographic order so the output is
    independent of seed order.
    """
    if not len(points):
        return points, residuals
    order = np.lexsort(points.T[::-1])
    pts, res = points[order], residuals[order]
    keep_pts, keep_res = [], []
    for p, r in zip(pts, res):
        if keep_pts:
            d = _distance(np.array(keep_pts), p, periodic)
            j = int(np.argmin(d))
            if d[j] <= radius:
                if r < keep_res[j]:
                    keep_pts[j], keep_res[j] = p, r
                continue
        keep_pts.append(p)
        keep_res.append(r)
    return np.array(keep_pts), np.array(keep_res)


def classify(f, beta, points, residuals, degeneracy=DEFAULT_DEGENERACY):
    out = []
    morse = True
    if len(points):
        A = reduced_matrix(f, beta, points)
        eigs = np.linalg.eigvalsh(A)
        for p, r, e in zip(points, residuals, eigs):
            m = float(np.min(np.abs(e)))
            if m <= degeneracy:
                morse = False
                idx = None
            else:
                idx = int(np.sum(e < 0))
            out.append(BetaCriticalPoint(tuple(float(v) for v in p), idx, float(r), float(np.prod(e)), m))
    out.sort(key=lambda q: q.location)
    return out, morse


def find_beta_critical(f, beta, seeds, periodic, tol=DEFAULT_TOL, dedupe_radius=DEFAULT_DEDUPE,
                       degeneracy=DEFAULT_DEGENERACY, max_iter=DEFAULT_MAX_ITER, params=None):
    """Newton from every seed, deduplication and index classification."""
    pts, res = newton_solve(f, beta, seeds, periodic, tol, max_iter)
    converged = len(pts)
    pts, res = dedupe(pts, res, dedupe_radius, periodic)
    points, morse = classify(f, beta, pts, res, degeneracy)
    return CriticalPointSet(points, morse, seeds.shape[1], len(seeds), converged, dict(params or {}))


def critical_points(f, beta: BetaForm, grid=None, tol=DEFAULT_TOL, dedupe_radius=DEFAULT_DEDUPE,
                    degeneracy=DEFAULT_DEGENERACY, max_iter=DEFAULT_MAX_ITER):
    """All beta-critical points of ``f`` reached from a uniform seed grid."""
    n = beta.n
    if f.n != n:
        raise UsageError("function and form live on tori of different dimension")
    grid = default_grid(n) if grid is None else int(grid)
    seeds = grid_seeds([grid] * n, [0.0] * n, [TWO_PI] * n)
    periodic = np.ones(n, dtype=bool)
    params = {"grid": grid, "tol": tol, "dedupe_radius": dedupe_radius, "degeneracy": degeneracy,
              "max_iter": max_iter}
    return find_beta_critical(f, beta, seeds, periodic, tol, dedupe_radius, degeneracy, max_iter, params)


def check_index_oracle(f, beta, point, step=1e-5, rtol=1e-3):
    """Compare the reduced matrix with a finite-difference Hessian of ``exp(-g) f``.

    At a critical point the two agree up to the factor ``exp(-g(x)) = 1`` in
    the centred chart.  Returns ``(agree, index_fd, relative_error)``.
    """
    x = np.asarray(point.location if hasattr(point, "location") else point, dtype=float)
    A = reduced_matrix(f, beta, x)
    H = finite_difference_hessian(f, beta, x, step)
    eig = np.linalg.eigvalsh(0.5 * (H + H.T))
    idx = int(np.sum(eig < 0))
    scale = max(np.linalg.norm(A), 1e-300)
    err = float(np.linalg.norm(H - A) / scale)
    agree = err <= rtol and idx == int(np.sum(np.linalg.eigvalsh(A) < 0))
    return agree, idx, err


# profiles of the model torus -------------------------------------------------


def torus_profile(beta: BetaForm, mode="symbolic", trials=5, seed=0):
    """Novikov profile of the CW torus carrying the class of ``beta``.

    Integral period vectors use the combinatorial model directly.  Any other
    nonzero class on a torus has vanishing Novikov homology, so the all-zero
    profile is returned (``None`` marks that no complex was used).
    """
    from .novikov import novikov_numbers, vanishing_profile

    n = beta.n
    if not beta.is_integral():
        return vanishing_profile(n), None
    a = tuple(int(round(v)) for v in beta.a)
    tc = torus_model(a)
    return novikov_numbers(tc, mode, trials, seed, primes=()), tc


def torus_model(a):
    """CW model of the n-torus (n = 1, 2) with one variable and periods ``a``."""
    from . import models

    if len(a) == 1:
        return models.circle_cw((a[0],))
    if len(a) == 2:
        return models.torus_cw((a[0],), (a[1],))
    raise UsageError("combinatorial torus models exist for n = 1 and n = 2 only")


def check_class(beta: BetaForm, profile):
    if not beta.is_integral():
        raise ClassMismatchError(
            f"period vector {beta.a} is not integral; compare against the vanishing profile instead"
        )
    if len(profile.betti) != beta.n + 1:
        raise ClassMismatchError(f"profile has {len(profile.betti)} degrees, torus has {beta.n + 1}")
    model, _ = torus_profile(beta)
    if tuple(model.betti) != tuple(profile.betti):
        raise ClassMismatchError(
            f"complex has Novikov numbers {list(profile.betti)} but the model torus for periods "
            f"{beta.a} has {list(model.betti)}"
        )


def verify_theorem31(f, beta: BetaForm, profile=None, result: CriticalPointSet | None = None, **kw):
    """Check ``#Crit_j >= b_j`` and the vanishing alternating sum.

    With ``profile`` given the period vector must be integral; without it
    the profile of the matching model torus (or the vanishing one) is used.
    """
    if profile is not None:
        check_class(beta, profile)
        source = "given"
    else:
        profile, tc = torus_profile(beta)
        source = "model" if tc is not None else "vanishing"
    result = result or critical_points(f, beta, **kw)
    counts = result.counts()
    bound = [profile.betti_at(j) for j in range(beta.n + 1)]
    holds = [c >= b for c, b in zip(counts, bound)]
    alt = result.alternating_sum()
    return {
        "clause": "thm31",
        "ok": bool(result.beta_morse and all(holds) and alt == 0),
        "hypothesis_ok": result.beta_morse,
        "counts": list(counts),
        "bound": bound,
        "holds": holds,
        "alternating_sum": alt,
        "profile_source": source,
        "critical_points": result.to_dict(),
    }
