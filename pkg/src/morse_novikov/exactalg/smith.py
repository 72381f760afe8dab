"""Smith normal forms over ZZ and over univariate Laurent rings K[t, 1/t]."""

from __future__ import annotations

from fractions import Fraction

from ..exceptions import UsageError
from .laurent import LaurentPoly
from .matrix import SparseMatrix
from .rings import QQ, ZZ


class _IntOps:
    zero = 0
    one = 1

    @staticmethod
    def norm(a):
        return abs(a)

    @staticmethod
    def divmod(a, b):
        return divmod(a, b)

    @staticmethod
    def normal_unit(a):
        """Return ``u`` with ``u * a`` the canonical associate."""
        return -1 if a < 0 else 1


class _PolyOps:
    """Polynomials with nonnegative exponents over a field, as univariate LaurentPoly."""

    def __init__(self, ring):
        self.ring = ring
        self.zero = LaurentPoly.zero(1, ring)
        self.one = LaurentPoly.one(1, ring)

    @staticmethod
    def norm(a):
        return max(e for (e,) in a._terms)

    def divmod(self, a, b):
        return poly_divmod(a, b)

    def normal_unit(self, a):
        _, lc = a.leading_term()
        return LaurentPoly.constant(self.ring.div(1, lc), 1, self.ring)


def poly_divmod(a: LaurentPoly, b: LaurentPoly):
    """Euclidean division of univariate polynomials (exponents >= 0) over a field."""
    ring = a.ring
    (db,), cb = b.leading_term()
    bterms = list(b._terms.items())
    norm = ring.normalize
    rem = dict(a._terms)
    quot = {}
    while rem:
        (er,) = max(rem)
        if er < db:
            break
        c = ring.div(rem[(er,)], cb)
        quot[(er - db,)] = c
        for (e,), v in bterms:
            k = (e + er - db,)
            w = norm(rem.get(k, 0) - c * v)
            if w:
                rem[k] = w
            else:
                rem.pop(k, None)
    return LaurentPoly._raw(quot, 1, ring), LaurentPoly._raw(rem, 1, ring)


def _identity(n, ops):
    return [[ops.one if i == j else ops.zero for j in range(n)] for i in range(n)]


def _smith_dense(A, ops, track=False):
    """Diagonalize ``A`` in place by unimodular row/column operations.

    Returns ``(U, V)`` with ``U * A_original * V == A_final`` when
    ``track`` is set (else ``(None, None)``).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m, ops) if track else None
    V = _identity(n, ops) if track else None

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            if track:
                U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            if track:
                for row in V:
                    row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        rs, rd = A[src], A[dst]
        for k in range(n):
            if rs[k]:
                rd[k] = rd[k] - q * rs[k]
        if track:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] = ud[k] - q * us[k]

    def add_col(dst, src, q):
        for row in A:
            if row[src]:
                row[dst] = row[dst] - q * row[src]
        if track:
            for row in V:
                if row[src]:
                    row[dst] = row[dst] - q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                if row[j]:
                    nv = ops.norm(row[j])
                    if best is None or nv < best[0]:
                        best = (nv, i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q, _ = ops.divmod(A[i][t], A[t][t])
                    add_row(i, t, q)
                    if A[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q, _ = ops.divmod(A[t][j], A[t][t])
                    add_col(j, t, q)
                    if A[t][j]:
                        changed = True
            if changed:
                best = (ops.norm(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and ops.norm(A[i][t]) < best[0]:
                        best = (ops.norm(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and ops.norm(A[t][j]) < best[0]:
                        best = (ops.norm(A[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j]:
                        _, r = ops.divmod(A[i][j], A[t][t])
                        if r:
                            bad = i
                            break
                if bad is not None:
                    break
            if bad is None:
                break
            # row_t += row_bad, then keep reducing
            add_row(t, bad, -ops.one)
        u = ops.normal_unit(A[t][t])
        if u != ops.one:
            A[t] = [u * x if x else x for x in A[t]]
            if track:
                U[t] = [u * x if x else x for x in U[t]]
    return U, V


def _dense_int(m: SparseMatrix):
    A = [[0] * m.cols for _ in range(m.rows)]
    for (i, j), v in m.items():
        if isinstance(v, LaurentPoly):
            if not v.is_constant():
                raise UsageError("snf_integer needs scalar integer entries")
            v = v.constant_term()
        if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
            raise UsageError(f"non-integer entry {v!r}")
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise UsageError(f"non-integer entry {v}")
            v = v.numerator
        A[i][j] = int(v)
    return A


def snf_integer(m: SparseMatrix):
    """Nonzero invariant factors ``d1 | d2 | ...`` of an integer matrix."""
    A = _dense_int(m)
    _smith_dense(A, _IntOps)
    return tuple(A[i][i] for i in range(min(m.rows, m.cols)) if A[i][i])


def smith_form_integer(m: SparseMatrix):
    """Return ``(U, D, V)`` as SparseMatrix with ``U @ m @ V == D`` and U, V unimodular."""
    A = _dense_int(m)
    U, V = _smith_dense(A, _IntOps, track=True)
    return SparseMatrix.from_dense(U) if U else SparseMatrix(0, 0), SparseMatrix(m.rows, m.cols, {
        (i, j): v for i, r in enumerate(A) for j, v in enumerate(r)
    }), SparseMatrix.from_dense(V) if V else SparseMatrix(0, 0)


def normalize_univariate(p: LaurentPoly) -> LaurentPoly:
    """Canonical associate in K[t, 1/t]: zero minimal exponent, leading coefficient 1."""
    if not p:
        return p
    (lo,) = p.min_exponents()
    _, lc = p.leading_term()
    return p.shift((-lo,)).scale(p.ring.div(1, lc))


def snf_univariate(m: SparseMatrix):
    """Nonzero invariant factors over ``K[t, 1/t]`` for ``K = QQ`` or ``GF(p)``.

    Integer matrices are read over ``QQ``.  Each factor is normalized to zero
    minimal exponent and leading coefficient 1.
    """
    ring = None
    for _, v in m.items():
        if isinstance(v, LaurentPoly):
            if v.nvars != 1:
                raise UsageError("snf_univariate needs univariate entries (multivariate torsion is out of scope)")
            if ring is None:
                ring = v.ring
            elif v.ring != ring:
                raise UsageError("matrix mixes coefficient rings")
    ring = (ring or QQ)
    if ring == ZZ:
        ring = QQ
    entries = {}
    for k, v in m.items():
        if not isinstance(v, LaurentPoly):
            v = LaurentPoly.constant(v, 1, ring)
        entries[k] = v.change_ring(ring) if v.ring != ring else v
    shift = 0
    for v in entries.values():
        (lo,) = v.min_exponents()
        shift = max(shift, -lo)
    ops = _PolyOps(ring)
    A = [[ops.zero] * m.cols for _ in range(m.rows)]
    for (i, j), v in entries.items():
        A[i][j] = v.shift((shift,))
    _smith_dense(A, ops)
    return tuple(normalize_univariate(A[i][i]) for i in range(min(m.rows, m.cols)) if A[i][i])
