"""Seeded random instances: small simplicial complexes with integral cocycles.

Vertices are random points on the circle or the flat 2-torus; a set of at
most four vertices spans a simplex when its points are pairwise within 1/4
in every coordinate.  Such a set has a consistent short lift, so the wrap
numbers of its edges satisfy the cocycle condition and represent the class
of the coordinate forms ``dx_j`` (pulled back to the nerve).
"""

from __future__ import annotations

import random
from itertools import combinations

from .complex import Cocycle, SimplicialComplex, coboundary_gauge

CLOSE = 0.25


def _close(p, q):
    return all(abs(((a - b + 0.5) % 1.0) - 0.5) < CLOSE for a, b in zip(p, q))


def _connected(n, edges):
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for v in adj[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def random_complex(rng: random.Random, max_simplices=40, max_dim=3, torus_dim=None):
    """Return ``(complex, points)``; the complex is connected and of
    dimension at most ``max_dim`` with at most ``max_simplices`` simplices."""
    while True:
        dim = torus_dim or rng.choice((1, 2))
        n = rng.randint(4, 9) if dim == 1 else rng.randint(5, 10)
        pts = [tuple(rng.random() for _ in range(dim)) for _ in range(n)]
        simplices = [(v,) for v in range(n)]
        for size in range(2, max_dim + 2):
            for s in combinations(range(n), size):
                if all(_close(pts[a], pts[b]) for a, b in combinations(s, 2)):
                    simplices.append(s)
        simplices = simplices[:max_simplices]
        edges = [s for s in simplices if len(s) == 2]
        if not _connected(n, edges):
            continue
        keep = set(simplices)
        # truncation keeps lower dimensions first, so faces are always present
        return SimplicialComplex(n, keep), pts


def wrap_cocycle(k: SimplicialComplex, pts, combo=None):
    """Integer wrap numbers of the short lifts, mixed by the integer matrix
    ``combo`` (rows = new variables, columns = torus coordinates)."""
    dim = len(pts[0])
    if combo is None:
        combo = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    weights = {}
    for u, v in k.edges:
        wrap = [-round(b - a) for a, b in zip(pts[u], pts[v])]
        weights[(u, v)] = tuple(sum(c * w for c, w in zip(row, wrap)) for row in combo)
    return Cocycle(len(combo), weights)


def random_instance(rng: random.Random, max_simplices=40, max_rank=2):
    """A connected complex with a random valid cocycle of rank 1 or 2.

    The class is a random integer combination of the torus coordinates (zero
    combinations included, giving an exact cocycle), shifted by a random
    coboundary.
    """
    k, pts = random_complex(rng, max_simplices)
    dim = len(pts[0])
    r = rng.randint(1, max_rank)
    combo = [[rng.choice((-1, 0, 0, 1, 2)) for _ in range(dim)] for _ in range(r)]
    z = wrap_cocycle(k, pts, combo)
    potential = {v: tuple(rng.randint(-2, 2) for _ in range(r)) for v in range(k.n_vertices)}
    return k, coboundary_gauge(z, potential)


def random_gauge(rng: random.Random, k: SimplicialComplex, rank):
    return {v: tuple(rng.randint(-3, 3) for _ in range(rank)) for v in range(k.n_vertices)}


# smooth instances -------------------------------------------------------------


def random_trig_function(rng: random.Random, n=2, harmonics=4, max_freq=1, amp=1.0, offset=0.0):
    """A random trigonometric polynomial on the n-torus.

    Frequencies are drawn from ``[-max_freq, max_freq]^n`` (the constant mode
    excluded), amplitudes from ``[0.2, 1] * amp`` and phases uniformly; a
    constant ``offset`` is added last.
    """
    from .smooth import TorusFunction

    terms = []
    while len(terms) < harmonics:
        k = tuple(rng.randint(-max_freq, max_freq) for _ in range(n))
        if any(k):
            terms.append((k, amp * rng.uniform(0.2, 1.0), rng.uniform(0.0, 6.283185307179586)))
    if offset:
        terms.append(((0,) * n, offset, 0.0))
    return TorusFunction(n, terms)
