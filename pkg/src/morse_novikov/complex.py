"""Finite cell complexes with an integral 1-cocycle and their twisted boundary.

The twisted boundary is the boundary operator of the cover on which the
cocycle becomes exact, written over ``ZZ[t1^±, ..., tr^±]`` with one lift of
each cell as basis.  Lifts are chosen from vertex heights along a spanning
tree: a simplex sits with its minimal vertex at that vertex's height.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .exactalg import ZZ, LaurentPoly, SparseMatrix
from .exceptions import UsageError, ValidationError

MAX_COCYCLE_RANK = 4


class SimplicialComplex:
    """Abstract simplicial complex on vertices ``0 .. n_vertices - 1``.

    ``simplices[d]`` is the sorted tuple of d-simplices, each a sorted vertex
    tuple; orientation is increasing vertex order.  Construction validates
    closure under faces.
    """

    def __init__(self, n_vertices, simplices):
        self.n_vertices = int(n_vertices)
        by_dim = {}
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise ValidationError(f"simplex {s} repeats a vertex")
            if any(not 0 <= v < self.n_vertices for v in s):
                raise ValidationError(f"simplex {s} uses a vertex outside 0..{self.n_vertices - 1}")
            by_dim.setdefault(len(s) - 1, set()).add(s)
        by_dim.setdefault(0, set()).update((v,) for v in range(self.n_vertices))
        top = max(by_dim)
        self.simplices = tuple(tuple(sorted(by_dim.get(d, ()))) for d in range(top + 1))
        self._index = [{s: i for i, s in enumerate(level)} for level in self.simplices]
        missing = []
        for d in range(1, top + 1):
            for s in self.simplices[d]:
                for face in combinations(s, d):
                    if face not in self._index[d - 1]:
                        missing.append((s, face))
        if missing:
            raise ValidationError(
                f"complex is not closed under faces ({len(missing)} missing faces)",
                [f"{s} lacks face {f}" for s, f in missing[:20]],
            )

    @classmethod
    def from_maximal(cls, n_vertices, simplices):
        """Close a list of simplices under taking faces."""
        out = set()
        for s in simplices:
            s = tuple(sorted(s))
            for k in range(1, len(s) + 1):
                out.update(combinations(s, k))
        return cls(n_vertices, out)

    @property
    def dim(self):
        return len(self.simplices) - 1

    @property
    def cell_counts(self):
        return tuple(len(level) for level in self.simplices)

    @property
    def edges(self):
        return self.simplices[1] if self.dim >= 1 else ()

    @property
    def triangles(self):
        return self.simplices[2] if self.dim >= 2 else ()

    def index(self, simplex):
        simplex = tuple(sorted(simplex))
        return self._index[len(simplex) - 1][simplex]

    def euler_characteristic(self):
        return sum((-1) ** d * n for d, n in enumerate(self.cell_counts))

    def neighbors(self):
        adj = {v: [] for v in range(self.n_vertices)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for v in adj:
            adj[v].sort()
        return adj

    def boundary_matrix(self, d):
        """Untwisted integer boundary ``C_d -> C_{d-1}``."""
        rows = len(self.simplices[d - 1]) if 0 < d <= self.dim + 1 else 0
        cols = len(self.simplices[d]) if 0 <= d <= self.dim else 0
        entries = {}
        if 1 <= d <= self.dim:
            idx = self._index[d - 1]
            for j, s in enumerate(self.simplices[d]):
                for i in range(d + 1):
                    entries[(idx[s[:i] + s[i + 1:]], j)] = (-1) ** i
        return SparseMatrix(rows, cols, entries)

    def relabel(self, perm):
        """Image under the vertex bijection ``v -> perm[v]``."""
        return SimplicialComplex(self.n_vertices, [tuple(perm[v] for v in s) for level in self.simplices for s in level])

    def __repr__(self):
        return f"SimplicialComplex(cells={self.cell_counts})"


@dataclass(frozen=True)
class Cocycle:
    """Integer vector weights on oriented edges; ``weights`` is keyed by
    ``(u, v)`` with ``u < v`` and reversing an edge negates its weight."""

    rank: int
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.rank <= MAX_COCYCLE_RANK:
            raise UsageError(f"cocycle rank must be in 0..{MAX_COCYCLE_RANK}, got {self.rank}")
        clean = {}
        for (u, v), w in self.weights.items():
            w = tuple(int(x) for x in w)
            if len(w) != self.rank:
                raise UsageError(f"weight {w} on edge ({u}, {v}) does not have {self.rank} entries")
            if u == v:
                raise UsageError(f"loop edge ({u}, {u})")
            if u > v:
                u, v, w = v, u, tuple(-x for x in w)
            if (u, v) in clean and clean[(u, v)] != w:
                raise UsageError(f"conflicting weights on edge ({u}, {v})")
            clean[(u, v)] = w
        object.__setattr__(self, "weights", clean)

    @classmethod
    def zero(cls, complex_, rank=1):
        return cls(rank, {e: (0,) * rank for e in complex_.edges})

    def weight(self, u, v):
        if u < v:
            return self.weights[(u, v)]
        return tuple(-x for x in self.weights[(v, u)])

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.weights

    def is_zero(self):
        return not any(any(w) for w in self.weights.values())

    def relabel(self, perm):
        return Cocycle(self.rank, {(perm[u], perm[v]): w for (u, v), w in self.weights.items()})

    def __add__(self, other):
        if other.rank != self.rank:
            raise UsageError("cocycle rank mismatch")
        keys = set(self.weights) | set(other.weights)
        zero = (0,) * self.rank
        return Cocycle(self.rank, {
            k: tuple(a + b for a, b in zip(self.weights.get(k, zero), other.weights.get(k, zero)))
            for k in keys
        })


@dataclass(frozen=True)
class CocycleReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def _check_weights_present(k: SimplicialComplex, z: Cocycle):
    missing = [e for e in k.edges if e not in z.weights]
    if missing:
        raise UsageError(f"cocycle has no weight on edges {missing[:10]}")
    extra = [e for e in z.weights if e not in k._index[1]] if k.dim >= 1 else list(z.weights)
    if extra:
        raise UsageError(f"cocycle weights on edges not in the complex: {extra[:10]}")


def validate_cocycle(k: SimplicialComplex, z: Cocycle) -> CocycleReport:
    """Check ``z(uv) + z(vw) - z(uw) = 0`` on every 2-simplex ``[uvw]``."""
    _check_weights_present(k, z)
    bad = []
    for u, v, w in k.triangles:
        a, b, c = z.weights[(u, v)], z.weights[(v, w)], z.weights[(u, w)]
        if any(x + y - s for x, y, s in zip(a, b, c)):
            bad.append((u, v, w))
    return CocycleReport(not bad, tuple(bad))


def vertex_heights(k: SimplicialComplex, z: Cocycle, root=None, tree="bfs"):
    """Integrate ``z`` along a spanning tree of the 1-skeleton.

    The tree is grown from ``root`` (default: vertex 0) visiting neighbours in
    index order, breadth-first by default or depth-first with
    ``tree="dfs"``.
    """
    _check_weights_present(k, z)
    if k.n_vertices == 0:
        return {}
    root = 0 if root is None else int(root)
    adj = k.neighbors()
    h = {root: (0,) * z.rank}
    if tree == "bfs":
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in h:
                    h[v] = tuple(a + b for a, b in zip(h[u], z.weight(u, v)))
                    queue.append(v)
    elif tree == "dfs":
        stack = [root]
        while stack:
            u = stack[-1]
            nxt = next((v for v in adj[u] if v not in h), None)
            if nxt is None:
                stack.pop()
                continue
            h[nxt] = tuple(a + b for a, b in zip(h[u], z.weight(u, nxt)))
            stack.append(nxt)
    else:
        raise UsageError(f"tree must be 'bfs' or 'dfs', got {tree!r}")
    if len(h) != k.n_vertices:
        raise UsageError("1-skeleton is disconnected; heights need a connected complex")
    return h


class TwistedComplex:
    """Chain complex of free modules over ``ZZ[t1^±..tr^±]``.

    ``boundaries[d - 1]`` is the matrix of ``C_d -> C_{d-1}`` for
    ``d = 1 .. dim``.  The constructor checks shapes; :meth:`validate`
    checks that consecutive boundaries compose to zero.
    """

    def __init__(self, cell_counts, boundaries, nvars, provenance=None, labels=None, validate=True):
        self.cell_counts = tuple(int(c) for c in cell_counts)
        self.nvars = int(nvars)
        self.boundaries = tuple(boundaries)
        self.provenance = dict(provenance or {})
        self.labels = labels
        if len(self.boundaries) != max(len(self.cell_counts) - 1, 0):
            raise UsageError("need one boundary matrix per positive degree")
        for d, m in enumerate(self.boundaries, start=1):
            if m.shape != (self.cell_counts[d - 1], self.cell_counts[d]):
                raise UsageError(f"boundary {d} has shape {m.shape}, expected "
                                 f"{(self.cell_counts[d - 1], self.cell_counts[d])}")
            for _, v in m.items():
                if not isinstance(v, LaurentPoly) or v.nvars != self.nvars:
                    raise UsageError(f"boundary {d} has an entry outside ZZ[t^±] in {self.nvars} variables")
        if validate:
            self.validate()

    @property
    def dim(self):
        return len(self.cell_counts) - 1

    def boundary(self, d):
        """Matrix of ``C_d -> C_{d-1}``; zero outside ``1..dim``."""
        if 1 <= d <= self.dim:
            return self.boundaries[d - 1]
        rows = self.cell_counts[d - 1] if 1 <= d <= self.dim + 1 else 0
        cols = self.cell_counts[d] if 0 <= d <= self.dim else 0
        return SparseMatrix(rows, cols)

    def composition_defects(self):
        bad = []
        for d in range(2, self.dim + 1):
            prod = self.boundaries[d - 2] @ self.boundaries[d - 1]
            if not prod.is_zero():
                bad.append((d, prod.nnz))
        return bad

    def validate(self):
        bad = self.composition_defects()
        if bad:
            raise ValidationError(
                "twisted boundary does not square to zero",
                [f"d_{d - 1} d_{d} has {n} nonzero entries" for d, n in bad],
            )
        return self

    def euler_characteristic(self):
        return sum((-1) ** d * n for d, n in enumerate(self.cell_counts))

    def specialize_to_one(self):
        """Integer matrices obtained from ``t_j -> 1``."""
        return [m.map(LaurentPoly.specialize_to_one) for m in self.boundaries]

    def untwisted(self):
        """The same cells with every variable set to one (the base complex)."""
        mats = [m.map(lambda v: LaurentPoly.constant(v.specialize_to_one(), self.nvars, v.ring))
                for m in self.boundaries]
        return TwistedComplex(self.cell_counts, mats, self.nvars,
                              {**self.provenance, "untwisted": True}, self.labels, validate=False)

    def extend_vars(self, nvars, positions=None):
        mats = [m.map(lambda v: v.extend_vars(nvars, positions)) for m in self.boundaries]
        return type(self)(self.cell_counts, mats, nvars, self.provenance, self.labels, validate=False)

    def __repr__(self):
        return f"{type(self).__name__}(cells={self.cell_counts}, nvars={self.nvars})"


class ExplicitComplex(TwistedComplex):
    """A CW complex given directly by its twisted boundary matrices."""


def _mono(exps, sign, nvars):
    return LaurentPoly.monomial(exps, sign, ZZ) if nvars else LaurentPoly.constant(sign, 0, ZZ)


def twist(k: SimplicialComplex, z: Cocycle, heights=None, tree="bfs", root=None) -> TwistedComplex:
    """Twisted boundary of ``k`` for the cocycle ``z``.

    The coefficient of face ``tau`` in the boundary of ``sigma`` is
    ``±t^(height of anchor(tau) inside sigma's lift - h(anchor(tau)))``,
    anchors being minimal vertices.
    """
    report = validate_cocycle(k, z)
    if not report.ok:
        raise ValidationError("cocycle condition fails", [f"triangle {t}" for t in report.violations])
    h = heights if heights is not None else vertex_heights(k, z, root=root, tree=tree)
    r = z.rank
    mats = []
    for d in range(1, k.dim + 1):
        idx = k._index[d - 1]
        entries = {}
        for j, s in enumerate(k.simplices[d]):
            a = s[0]
            ha = h[a]
            for i in range(d + 1):
                face = s[:i] + s[i + 1:]
                if i == 0:
                    b = s[1]
                    lifted = tuple(x + y for x, y in zip(ha, z.weight(a, b)))
                else:
                    b = a
                    lifted = ha
                exps = tuple(x - y for x, y in zip(lifted, h[b]))
                entries[(idx[face], j)] = _mono(exps, (-1) ** i, r)
        mats.append(SparseMatrix(len(k.simplices[d - 1]), len(k.simplices[d]), entries))
    prov = {"kind": "simplicial", "tree": tree if heights is None else "given",
            "root": 0 if root is None else root, "anchor": "minimal vertex"}
    return TwistedComplex(k.cell_counts, mats, r, prov, labels=k.simplices)


def coboundary_gauge(z: Cocycle, potential) -> Cocycle:
    """``z'(uv) = z(uv) + potential(v) - potential(u)``."""
    zero = (0,) * z.rank
    out = {}
    for (u, v), w in z.weights.items():
        pu = tuple(potential.get(u, zero)) if isinstance(potential, dict) else tuple(potential[u])
        pv = tuple(potential.get(v, zero)) if isinstance(potential, dict) else tuple(potential[v])
        out[(u, v)] = tuple(x + b - a for x, a, b in zip(w, pu, pv))
    return Cocycle(z.rank, out)


def product(a: TwistedComplex, b: TwistedComplex) -> ExplicitComplex:
    """Cellular product with the graded Leibniz boundary.

    Cells of degree ``n`` are pairs ``(sigma, tau)`` with
    ``dim sigma + dim tau = n``, ordered by ``dim sigma`` then by the
    indices of ``sigma`` and ``tau``.
    """
    if a.nvars != b.nvars:
        raise UsageError(
            f"factors use {a.nvars} and {b.nvars} variables; extend one factor with extend_vars first"
        )
    nvars = a.nvars
    top = a.dim + b.dim
    cells = [[] for _ in range(top + 1)]
    for i, ca in enumerate(a.cell_counts):
        for j, cb in enumerate(b.cell_counts):
            for x in range(ca):
                for y in range(cb):
                    cells[i + j].append((i, x, j, y))
    index = [{c: n for n, c in enumerate(level)} for level in cells]
    cols_a = [a.boundary(i).col_dicts() for i in range(a.dim + 1)]
    cols_b = [b.boundary(j).col_dicts() for j in range(b.dim + 1)]
    mats = []
    for n in range(1, top + 1):
        entries = {}
        for col, (i, x, j, y) in enumerate(cells[n]):
            if i >= 1:
                for xf, coef in cols_a[i][x].items():
                    key = (index[n - 1][(i - 1, xf, j, y)], col)
                    entries[key] = entries[key] + coef if key in entries else coef
            if j >= 1:
                sign = -1 if i % 2 else 1
                for yf, coef in cols_b[j][y].items():
                    key = (index[n - 1][(i, x, j - 1, yf)], col)
                    term = coef if sign == 1 else -coef
                    entries[key] = entries[key] + term if key in entries else term
        mats.append(SparseMatrix(len(cells[n - 1]), len(cells[n]), entries))
    prov = {"kind": "product", "factors": [a.provenance, b.provenance]}
    return ExplicitComplex([len(level) for level in cells], mats, nvars, prov, labels=cells, validate=True)
