"""Small standard complexes: circles, tori, the genus-2 surface, RP^3.

CW models are given by their twisted boundaries.  For surfaces these are the
abelianized Fox derivatives of the standard relator, with ``A = t^z(a)``
for a generator ``a`` of the fundamental group.
"""

from __future__ import annotations

from .complex import Cocycle, ExplicitComplex, SimplicialComplex
from .exactalg import ZZ, LaurentPoly, SparseMatrix
from .exceptions import UsageError


def _vec(w):
    if isinstance(w, int):
        return (w,)
    return tuple(int(x) for x in w)


def _t(w, nvars):
    return LaurentPoly.monomial(w, 1, ZZ) if nvars else LaurentPoly.one(0, ZZ)


def _c(c, nvars):
    return LaurentPoly.constant(c, nvars, ZZ)


def circle(weight=1, n=3):
    """The n-cycle with ``weight`` on edge (0, 1) and zero elsewhere."""
    if n < 3:
        raise UsageError("a simplicial circle needs at least 3 vertices")
    w = _vec(weight)
    k = SimplicialComplex.from_maximal(n, [(i, (i + 1) % n) for i in range(n)])
    z = {e: (0,) * len(w) for e in k.edges}
    z[(0, 1)] = w
    return k, Cocycle(len(w), z)


def seven_vertex_torus():
    """Minimal triangulation of the torus: triangles {i, i+1, i+3}, {i, i+2, i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_maximal(7, tris)


def torus_cocycle(step1, step2):
    """Cocycle on the 7-vertex torus assigning ``step1`` to a +1 step and
    ``step2`` to a +2 step (so a +3 step gets their sum).

    The values are vectors of a common length r.
    """
    a, b = _vec(step1), _vec(step2)
    if len(a) != len(b):
        raise UsageError("step weights must have the same length")
    phi = {1: a, 2: b, 3: tuple(x + y for x, y in zip(a, b))}
    k = seven_vertex_torus()
    z = {}
    for u, v in k.edges:
        d = (v - u) % 7
        z[(u, v)] = phi[d] if d <= 3 else tuple(-x for x in phi[7 - d])
    return Cocycle(len(a), z)


def torus_cw(a=(1,), b=(0,)):
    """One vertex, two loops ``a``, ``b``, one square attached along ``aba^-1b^-1``."""
    a, b = _vec(a), _vec(b)
    r = len(a)
    A, B = _t(a, r), _t(b, r)
    one = _c(1, r)
    d1 = SparseMatrix(1, 2, {(0, 0): A - one, (0, 1): B - one})
    d2 = SparseMatrix(2, 1, {(0, 0): one - B, (1, 0): A - one})
    return ExplicitComplex((1, 2, 1), [d1, d2], r, {"kind": "torus_cw", "periods": [a, b]})


def genus2_cw(a1=(1,), b1=(0,), a2=(0,), b2=(0,)):
    """One vertex, four loops, one octagon along ``[a1, b1][a2, b2]``."""
    gens = [_vec(x) for x in (a1, b1, a2, b2)]
    r = len(gens[0])
    if any(len(g) != r for g in gens):
        raise UsageError("generator weights must have the same length")
    A1, B1, A2, B2 = (_t(g, r) for g in gens)
    one = _c(1, r)
    d1 = SparseMatrix(1, 4, {(0, j): g - one for j, g in enumerate((A1, B1, A2, B2))})
    d2 = SparseMatrix(4, 1, {(0, 0): one - B1, (1, 0): A1 - one, (2, 0): one - B2, (3, 0): A2 - one})
    return ExplicitComplex((1, 4, 1), [d1, d2], r, {"kind": "genus2_cw", "periods": gens})


def rp3(nvars=1):
    """Projective 3-space with one cell per degree; boundaries 0, 2, 0."""
    d1 = SparseMatrix(1, 1)
    d2 = SparseMatrix(1, 1, {(0, 0): _c(2, nvars)})
    d3 = SparseMatrix(1, 1)
    return ExplicitComplex((1, 1, 1, 1), [d1, d2, d3], nvars, {"kind": "rp3"})


def multiplication_complex(n=2, nvars=1):
    """A 0-cell and a 1-cell whose boundary is ``n`` times the 0-cell."""
    d1 = SparseMatrix(1, 1, {(0, 0): _c(n, nvars)})
    return ExplicitComplex((1, 1), [d1], nvars, {"kind": "multiplication", "n": n})


def point(nvars=1):
    return ExplicitComplex((1,), [], nvars, {"kind": "point"})


def interval(nvars=1):
    one = _c(1, nvars)
    d1 = SparseMatrix(2, 1, {(0, 0): -one, (1, 0): one})
    return ExplicitComplex((2, 1), [d1], nvars, {"kind": "interval"})


def circle_cw(weight=1):
    """One vertex and one loop of period ``weight``."""
    w = _vec(weight)
    r = len(w)
    d1 = SparseMatrix(1, 1, {(0, 0): _t(w, r) - _c(1, r)})
    return ExplicitComplex((1, 1), [d1], r, {"kind": "circle_cw", "period": w})
