"""Ranks over fraction fields of Laurent polynomial rings.

Symbolic ranks use fraction-free elimination: unit pivots (signed monomials)
are eliminated first with ordinary row operations, which stay inside the
Laurent ring, and the remainder is reduced with Bareiss' one-step
fraction-free scheme.  Specialized ranks substitute random positive rationals
and take the maximum base-field rank over the trials.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from ..exceptions import UsageError
from .laurent import LaurentPoly
from .matrix import SparseMatrix
from .rings import QQ, ZZ, Ring

MODES = ("symbolic", "specialized")
POINT_RANGE = 10**6


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    method: str
    trials: int = 0
    seed: object = None
    ring: str = "QQ"

    def __post_init__(self):
        if self.method not in MODES:
            raise UsageError(f"unknown rank method {self.method!r}")
        if self.method == "specialized" and self.trials < 1:
            raise UsageError("specialized certificates need at least one trial")
        if self.method == "symbolic" and self.trials != 0:
            raise UsageError("symbolic certificates carry no trials")

    def to_dict(self):
        return asdict(self)


def matrix_ring(m: SparseMatrix):
    """Infer ``(nvars, ring)`` from the polynomial entries of ``m``."""
    nvars, ring = None, None
    for _, v in m.items():
        if isinstance(v, LaurentPoly):
            if nvars is None:
                nvars, ring = v.nvars, v.ring
            elif (v.nvars, v.ring) != (nvars, ring):
                raise UsageError("matrix mixes polynomial rings")
    return (0 if nvars is None else nvars), (QQ if ring is None else ring)


def _as_poly_rows(m: SparseMatrix, nvars, ring):
    rows = {}
    for (i, j), v in m.items():
        if not isinstance(v, LaurentPoly):
            v = LaurentPoly.constant(v, nvars, ring)
        elif v.ring != ring:
            v = v.change_ring(ring)
        if v:
            rows.setdefault(i, {})[j] = v
    return rows


def _pick_pivot(rows, eligible):
    """Sparsity-greedy pivot: fewest nonzeros in the column, ties by column
    index, then fewest nonzeros in the row, ties by row index."""
    col_count = {}
    for r in rows.values():
        for j in r:
            col_count[j] = col_count.get(j, 0) + 1
    best = None
    for i, r in rows.items():
        for j, v in r.items():
            if eligible(v):
                key = (col_count[j], j, len(r), i)
                if best is None or key < best:
                    best = key
    if best is None:
        return None
    return best[3], best[1]


def _eliminate_units(rows):
    rank = 0
    while True:
        piv = _pick_pivot(rows, LaurentPoly.is_unit)
        if piv is None:
            return rank
        r, c = piv
        prow = rows.pop(r)
        p = prow.pop(c)
        inv = p ** -1
        for i in list(rows):
            row = rows[i]
            a = row.pop(c, None)
            if a is None:
                continue
            f = a * inv
            for j, v in prow.items():
                w = row.get(j)
                w = -(f * v) if w is None else w - f * v
                if w:
                    row[j] = w
                else:
                    row.pop(j, None)
            if not row:
                del rows[i]
        rank += 1


def _bareiss(rows, nvars, ring):
    rank = 0
    prev = LaurentPoly.one(nvars, ring)
    while rows:
        piv = _pick_pivot(rows, bool)
        if piv is None:
            break
        r, c = piv
        prow = rows.pop(r)
        p = prow.pop(c)
        prev_is_one = prev == 1
        for i in list(rows):
            row = rows[i]
            a = row.pop(c, None)
            new = {}
            keys = set(row) | set(prow) if a is not None else set(row)
            for j in keys:
                w = row.get(j)
                val = p * w if w is not None else None
                if a is not None and j in prow:
                    t = a * prow[j]
                    val = -t if val is None else val - t
                if val is None or not val:
                    continue
                if not prev_is_one:
                    val = val.exact_div(prev)
                new[j] = val
            if new:
                rows[i] = new
            else:
                del rows[i]
        prev = p
        rank += 1
    return rank


def symbolic_rank(m: SparseMatrix) -> int:
    nvars, ring = matrix_ring(m)
    ring = ring.fraction_field()
    rows = _as_poly_rows(m, nvars, ring)
    rank = _eliminate_units(rows)
    return rank + _bareiss(rows, nvars, ring)


def field_rank(m: SparseMatrix, ring: Ring = QQ) -> int:
    """Rank of a matrix with scalar entries over ``QQ`` or ``GF(p)``."""
    if ring == ZZ:
        ring = QQ
    rows = {}
    for (i, j), v in m.items():
        v = ring.coerce(v)
        if v:
            rows.setdefault(i, {})[j] = v
    return _scalar_rank(rows, ring)


def _scalar_rank(rows, ring):
    norm = ring.normalize
    rank = 0
    while rows:
        piv = _pick_pivot(rows, bool)
        if piv is None:
            break
        r, c = piv
        prow = rows.pop(r)
        p = prow.pop(c)
        for i in list(rows):
            row = rows[i]
            a = row.pop(c, None)
            if a is None:
                continue
            f = ring.div(a, p)
            for j, v in prow.items():
                w = norm(row.get(j, 0) - f * v)
                if w:
                    row[j] = w
                else:
                    row.pop(j, None)
            if not row:
                del rows[i]
        rank += 1
    return rank


def specialize(m: SparseMatrix, point):
    """Substitute ``point`` for the variables of every polynomial entry."""
    return m.map(lambda v: v.evaluate(point) if isinstance(v, LaurentPoly) else v)


def random_point(rng: random.Random, nvars):
    return tuple(
        Fraction(rng.randint(1, POINT_RANGE), rng.randint(1, POINT_RANGE)) for _ in range(nvars)
    )


def specialized_rank(m: SparseMatrix, trials=5, seed=0):
    """Maximum over ``trials`` random rational specializations; returns
    ``(rank, per_trial_ranks)``."""
    nvars, ring = matrix_ring(m)
    if ring.kind == "GF":
        raise UsageError("specialized ranks need characteristic zero coefficients")
    rng = random.Random(seed)
    ranks = []
    for _ in range(trials):
        pt = random_point(rng, nvars)
        ranks.append(field_rank(specialize(m, pt), QQ))
    return max(ranks), ranks


def rank_fraction_field(m: SparseMatrix, mode="symbolic", trials=5, seed=0) -> RankCertificate:
    """Rank of ``m`` over the fraction field of its Laurent coefficient ring.

    Prime-field matrices are always ranked symbolically: random points of a
    small field hit the bad locus far too often.
    """
    if mode not in MODES:
        raise UsageError(f"mode must be one of {MODES}, got {mode!r}")
    _, ring = matrix_ring(m)
    ring_name = str(ring.fraction_field())
    if mode == "specialized" and ring.kind != "GF":
        if trials < 1:
            raise UsageError("trials must be at least 1")
        rank, _ = specialized_rank(m, trials, seed)
        return RankCertificate(rank, "specialized", trials, seed, ring_name)
    return RankCertificate(symbolic_rank(m), "symbolic", 0, None, ring_name)
