"""Novikov numbers, torsion lower bounds, window homology and local systems.

Everything here is a rank computation on the twisted boundary of a
:class:`~morse_novikov.complex.TwistedComplex`:

* Novikov numbers are ranks over the rational function field ``QQ(t1..tr)``;
* prime-field ranks over ``GF(p)(t1..tr)`` give certified lower bounds for
  torsion generators;
* the window complex is the integer chain complex of a finite stack of
  translates of the fundamental domain, relative to its negative end.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .complex import SimplicialComplex, TwistedComplex, Cocycle, twist
from .exactalg import (
    GF,
    QQ,
    LaurentPoly,
    SparseMatrix,
    field_rank,
    rank_fraction_field,
    snf_integer,
    snf_univariate,
    specialize,
)
from .exactalg.rank import random_point
from .exceptions import ResourceCapError, UsageError

DEFAULT_PRIMES = (2, 3, 5, 7)
DEFAULT_CELL_CAP = 20000


@dataclass
class NovikovProfile:
    """Per-degree Novikov numbers with prime-field ranks and torsion bounds.

    ``betti_prime[p]`` holds the homology ranks over ``GF(p)(t)``;
    ``torsion_lower`` is ``None`` when the cocycle has more than one variable.
    """

    betti: tuple
    cell_counts: tuple
    euler: int
    nvars: int
    boundary_ranks: tuple = ()
    betti_prime: dict = field(default_factory=dict)
    boundary_ranks_prime: dict = field(default_factory=dict)
    torsion_lower: tuple | None = None
    rational_factors: tuple | None = None
    certificates: tuple = ()

    def __post_init__(self):
        if sum((-1) ** i * b for i, b in enumerate(self.betti)) != self.euler:
            raise ArithmeticError("Euler identity fails: rank computation is inconsistent")
        for p, ranks in self.betti_prime.items():
            if any(b > q for b, q in zip(self.betti, ranks)):
                raise ArithmeticError(f"Novikov number exceeds the GF({p}) rank")

    def betti_at(self, i):
        return self.betti[i] if 0 <= i < len(self.betti) else 0

    @property
    def total(self):
        return sum(self.betti)

    def to_dict(self):
        out = {
            "betti_novikov": list(self.betti),
            "cell_counts": list(self.cell_counts),
            "euler": self.euler,
            "nvars": self.nvars,
            "boundary_ranks": list(self.boundary_ranks),
            "betti_prime": {str(p): list(v) for p, v in sorted(self.betti_prime.items())},
            "torsion_lower": None if self.torsion_lower is None else list(self.torsion_lower),
            "certificates": [c.to_dict() for c in self.certificates],
        }
        if self.rational_factors is not None:
            out["rational_torsion"] = [
                {"degree": d, "factors": list(fs)} for d, fs in self.rational_factors
            ]
        return out


def vanishing_profile(dim):
    """Profile with every Novikov number zero (cell data left empty)."""
    return NovikovProfile(tuple([0] * (dim + 1)), (), 0, 0)


def _prime_matrix(m: SparseMatrix, p):
    ring = GF(p)
    return m.map(lambda v: v.change_ring(ring))


def _betti_from_ranks(cells, ranks):
    # ranks[d] = rank of d_d for d = 0..dim+1 (zero at both ends)
    return tuple(cells[i] - ranks[i] - ranks[i + 1] for i in range(len(cells)))


def _rank_vector(tc: TwistedComplex, rank_of):
    return [0] + [rank_of(d, tc.boundary(d)) for d in range(1, tc.dim + 1)] + [0]


def _primitive_integer(poly: LaurentPoly):
    """Integer representative with coprime coefficients and positive leading coefficient."""
    den = 1
    for c in poly._terms.values():
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = {e: int(Fraction(c) * den) for e, c in poly._terms.items()}
    g = 0
    for c in ints.values():
        g = gcd(g, c)
    return LaurentPoly({e: c // g for e, c in ints.items()}, poly.nvars)


def _rational_torsion(tc: TwistedComplex):
    """Non-unit invariant factors of each boundary over ``QQ[t, 1/t]``.

    A factor whose primitive integer form has leading coefficient one is a
    unit after inverting every monic Laurent polynomial, so it does not
    survive in the localization; all others are flagged as not certified.
    """
    out = []
    for d in range(1, tc.dim + 1):
        m = tc.boundary(d)
        if m.is_zero():
            continue
        facs = []
        for f in snf_univariate(m):
            if f.is_unit():
                continue
            prim = _primitive_integer(f)
            _, lc = prim.leading_term()
            dies = lc in (1, -1)
            facs.append({
                "factor": str(f),
                "integer_form": str(prim),
                "dies_in_localization": dies,
                "certified": dies,
            })
        if facs:
            # a factor of d_d is torsion of H_{d-1}
            out.append((d - 1, tuple(facs)))
    return tuple(out)


def novikov_numbers(tc: TwistedComplex, mode="symbolic", trials=5, seed=0, primes=DEFAULT_PRIMES):
    """Novikov profile of ``tc``.

    ``b_i = c_i - rank d_i - rank d_(i+1)`` over ``QQ(t1..tr)``.  When
    ``primes`` is nonempty the same ranks are taken over ``GF(p)(t1..tr)``;
    for at most one variable these give torsion lower bounds.
    """
    primes = tuple(sorted(set(int(p) for p in (primes or ()))))
    certs = []

    def rational_rank(d, m):
        cert = rank_fraction_field(m, mode=mode, trials=trials, seed=None if seed is None else seed + d)
        certs.append(cert)
        return cert.rank

    ranks = _rank_vector(tc, rational_rank)
    betti = _betti_from_ranks(tc.cell_counts, ranks)
    betti_prime, ranks_prime = {}, {}
    for p in primes:
        rp = _rank_vector(tc, lambda d, m: rank_fraction_field(_prime_matrix(m, p)).rank)
        ranks_prime[p] = tuple(rp[1:-1])
        betti_prime[p] = _betti_from_ranks(tc.cell_counts, rp)
    torsion = None
    factors = None
    if tc.nvars <= 1 and primes:
        torsion = tuple(
            max(ranks[i + 1] - ranks_prime[p][i] if i < tc.dim else 0 for p in primes)
            for i in range(tc.dim + 1)
        )
    if tc.nvars == 1:
        factors = _rational_torsion(tc)
    return NovikovProfile(
        betti=betti,
        cell_counts=tc.cell_counts,
        euler=tc.euler_characteristic(),
        nvars=tc.nvars,
        boundary_ranks=tuple(ranks[1:-1]),
        betti_prime=betti_prime,
        boundary_ranks_prime=ranks_prime,
        torsion_lower=torsion,
        rational_factors=factors,
        certificates=tuple(certs),
    )


def torsion_lower_bounds(tc: TwistedComplex, primes=DEFAULT_PRIMES):
    """Certified lower bounds on torsion generator counts per degree.

    The bound in degree ``i`` is the largest drop, over the given primes, of
    the rank of ``d_(i+1)`` from ``QQ(t)`` to ``GF(p)(t)``: every unit of rank
    lost mod ``p`` is a cycle that is a boundary only up to a multiple of
    ``p``.
    """
    if tc.nvars > 1:
        raise UsageError("torsion bounds are only supported for a single variable")
    if not primes:
        raise UsageError("need at least one prime")
    return novikov_numbers(tc, primes=primes).torsion_lower


# window complexes -----------------------------------------------------------


def _cell_shifts(tc: TwistedComplex):
    """Per-cell monomial shifts making every boundary exponent nonpositive."""
    r = tc.nvars
    shifts = [[(0,) * r] * tc.cell_counts[0]]
    for d in range(1, tc.dim + 1):
        cols = tc.boundary(d).col_dicts()
        level = []
        for col in cols:
            c = None
            for row, poly in col.items():
                hi = poly.max_exponents()
                cand = tuple(a - b for a, b in zip(shifts[d - 1][row], hi))
                c = cand if c is None else tuple(min(x, y) for x, y in zip(c, cand))
            level.append(c if c is not None else (0,) * r)
        shifts.append(level)
    return shifts


@dataclass
class WindowComplex:
    """Relative integer chain complex of a box of translates.

    Cells are pairs (base cell, translate ``lam`` in ``[-k, k]^r``); boundary
    terms that would land on a translate with a coordinate below ``-k`` are
    the negative end and are quotiented out.
    """

    radius: int
    nvars: int
    base_cell_counts: tuple
    cell_counts: tuple
    ranks: tuple
    torsion: tuple

    @property
    def multiplicity(self):
        return (2 * self.radius + 1) ** self.nvars

    def to_dict(self):
        return {
            "k": self.radius,
            "multiplicity": self.multiplicity,
            "cell_counts": list(self.cell_counts),
            "ranks": list(self.ranks),
            "torsion": [list(t) for t in self.torsion],
        }


def _translates(k, r):
    if r == 0:
        return [()]
    out = []
    for rest in _translates(k, r - 1):
        for x in range(-k, k + 1):
            out.append(rest + (x,))
    return out


def window_matrices(tc: TwistedComplex, radius, cap_cells=DEFAULT_CELL_CAP):
    if radius < 0:
        raise UsageError("window radius must be nonnegative")
    r = tc.nvars
    if r < 1:
        raise UsageError("window complexes need a cocycle with at least one variable")
    mult = (2 * radius + 1) ** r
    total = mult * sum(tc.cell_counts)
    if total > cap_cells:
        raise ResourceCapError(f"window of radius {radius} needs {total} cells, cap is {cap_cells}")
    shifts = _cell_shifts(tc)
    lams = _translates(radius, r)
    lam_index = {lam: i for i, lam in enumerate(lams)}
    mats = []
    for d in range(1, tc.dim + 1):
        cols = tc.boundary(d).col_dicts()
        rows_base = tc.cell_counts[d - 1]
        entries = {}
        for j, col in enumerate(cols):
            for row, poly in col.items():
                base = tuple(a - b for a, b in zip(shifts[d][j], shifts[d - 1][row]))
                for e, c in poly.items():
                    off = tuple(x + y for x, y in zip(base, e))  # all <= 0
                    for li, lam in enumerate(lams):
                        tgt = tuple(x + y for x, y in zip(lam, off))
                        if min(tgt) < -radius:
                            continue
                        key = (lam_index[tgt] * rows_base + row, li * len(cols) + j)
                        entries[key] = entries.get(key, 0) + int(c)
        mats.append(SparseMatrix(rows_base * mult, len(cols) * mult, entries))
    return mats, mult


def window_homology(source, z: Cocycle | None = None, radius=1, cap_cells=DEFAULT_CELL_CAP) -> WindowComplex:
    """Integer homology ranks of the radius-``radius`` window.

    ``source`` is a :class:`SimplicialComplex` together with a cocycle ``z`` or
    an already twisted complex.
    """
    tc = _as_twisted(source, z)
    mats, mult = window_matrices(tc, radius, cap_cells)
    cells = tuple(c * mult for c in tc.cell_counts)
    snfs = [()] + [snf_integer(m) for m in mats] + [()]
    ranks = tuple(cells[i] - len(snfs[i]) - len(snfs[i + 1]) for i in range(len(cells)))
    torsion = tuple(tuple(f for f in snfs[i + 1] if abs(f) > 1) for i in range(len(cells)))
    return WindowComplex(radius, tc.nvars, tc.cell_counts, cells, ranks, torsion)


def verify_window(source, z=None, radii=(0, 1, 2), profile=None, cap_cells=DEFAULT_CELL_CAP):
    """Check ``(2k+1)^r * b_i <= rank H_i(window_k, negative end)`` for each radius."""
    tc = _as_twisted(source, z)
    profile = profile or novikov_numbers(tc, primes=())
    rows = []
    ok = True
    for k in radii:
        w = window_homology(tc, radius=k, cap_cells=cap_cells)
        bound = [w.multiplicity * b for b in profile.betti]
        holds = all(b <= r for b, r in zip(bound, w.ranks))
        ok &= holds
        rows.append({**w.to_dict(), "bound": bound, "holds": holds})
    return {"clause": "window", "ok": ok, "betti_novikov": list(profile.betti), "window": rows}


# local systems --------------------------------------------------------------


def _exact_point(point):
    out = []
    for v in point:
        if isinstance(v, float):
            v = Fraction(v)
        elif not isinstance(v, (int, Fraction)):
            v = Fraction(v)
        if v == 0:
            raise UsageError("local system point has a zero coordinate")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class LocalSystemRanks:
    point: tuple
    homology: tuple
    cohomology: tuple

    def to_dict(self):
        return {"point": [str(p) for p in self.point], "homology": list(self.homology),
                "cohomology": list(self.cohomology)}


def local_system_ranks(tc: TwistedComplex, point) -> LocalSystemRanks:
    """Betti numbers of the rank-one local system ``t_j -> point_j``.

    Floats are converted to the rationals they represent exactly, so every
    rank is computed without rounding.  Cohomology uses the transposed
    matrices, whose ranks agree.
    """
    if not hasattr(point, "__len__"):
        point = (point,)
    point = _exact_point(point)
    if len(point) != tc.nvars:
        raise UsageError(f"point has {len(point)} coordinates, complex has {tc.nvars} variables")
    ranks = _rank_vector(tc, lambda d, m: field_rank(specialize(m, point), QQ))
    co = _rank_vector(tc, lambda d, m: field_rank(specialize(m, point).T, QQ))
    return LocalSystemRanks(point, _betti_from_ranks(tc.cell_counts, ranks), _betti_from_ranks(tc.cell_counts, co))


def compare_local_system(tc: TwistedComplex, profile: NovikovProfile | None = None, seed=0, points=2):
    """Compare ranks at ``points`` random rational points with the symbolic profile.

    A disagreeing point is retried once with a fresh point, since ranks only
    drop on a finite bad locus.
    """
    profile = profile or novikov_numbers(tc, primes=())
    rng = random.Random(seed)
    results = []
    for _ in range(points):
        attempt = []
        for _ in range(2):
            ls = local_system_ranks(tc, random_point(rng, tc.nvars))
            attempt.append(ls)
            if ls.homology == profile.betti:
                break
        results.append(attempt)
    ok = all(a[-1].homology == profile.betti for a in results)
    return {
        "ok": ok,
        "betti_novikov": list(profile.betti),
        "points": [[ls.to_dict() for ls in a] for a in results],
    }


# comparisons -------------------------------------------------------------


def _as_twisted(source, z=None) -> TwistedComplex:
    if isinstance(source, TwistedComplex):
        return source
    if isinstance(source, SimplicialComplex):
        if z is None:
            raise UsageError("a simplicial complex needs a cocycle")
        return twist(source, z)
    raise UsageError(f"expected a complex, got {type(source).__name__}")


def verify_prop26(source, z=None, mode="symbolic", trials=5, seed=0):
    """Check ``b_i(z) <= b_i(0)`` in every degree."""
    tc = _as_twisted(source, z)
    twisted = novikov_numbers(tc, mode, trials, seed, primes=())
    base = novikov_numbers(tc.untwisted(), mode, trials, seed, primes=())
    holds = [a <= b for a, b in zip(twisted.betti, base.betti)]
    return {
        "clause": "prop26",
        "ok": all(holds),
        "betti_novikov": list(twisted.betti),
        "betti_untwisted": list(base.betti),
        "holds": holds,
        "certificates": [c.to_dict() for c in twisted.certificates + base.certificates],
    }
