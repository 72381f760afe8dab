"""Readers and writers for the line-oriented complex files.

Simplicial files::

    simplicial
    dim 2
    simplex 2: 0 1 2
    cocycle 1: 0 1 -> 1

Listed simplices are closed under faces; vertices are ``0 .. max index``.
Every edge needs a ``cocycle`` line unless there are none at all, in which
case the cocycle is zero with no variables.

Explicit files::

    explicit
    cells: 1 4 1
    boundary 1: 0 0 t1 - 1

An optional ``vars r`` line fixes the number of variables; otherwise it is
the largest variable index used.  ``#`` starts a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .complex import Cocycle, ExplicitComplex, SimplicialComplex, TwistedComplex, twist
from .exactalg import ZZ, SparseMatrix, parse_laurent
from .exceptions import ParseError, UsageError, ValidationError


def _lines(text):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _ints(tokens, n):
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", n) from None


_DIRECTIVE = re.compile(r"^([a-z_]+)\s*(-?\d+)?\s*(:)?\s*(.*)$")


def _split(line, n):
    m = _DIRECTIVE.match(line)
    if not m:
        raise ParseError(f"cannot read {line!r}", n)
    return m.group(1), m.group(2), m.group(3) is not None, m.group(4)


def parse_complex(text):
    """Parse a complex file into ``("simplicial", (complex, cocycle))`` or
    ``("explicit", ExplicitComplex)``."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty complex file")
    n0, header = lines[0]
    if header == "simplicial":
        return "simplicial", _parse_simplicial(lines[1:])
    if header == "explicit":
        return "explicit", _parse_explicit(lines[1:])
    raise ParseError(f"unknown header {header!r} (expected 'simplicial' or 'explicit')", n0)


def _parse_simplicial(lines):
    dim = None
    simplices = []
    weights = {}
    rank = None
    for n, line in lines:
        key, num, colon, rest = _split(line, n)
        if key == "dim" and num is not None and not colon and not rest:
            if dim is not None:
                raise ParseError("duplicate dim line", n)
            dim = int(num)
        elif key == "simplex" and num is not None and colon:
            d = int(num)
            verts = _ints(rest.split(), n)
            if len(verts) != d + 1:
                raise ParseError(f"simplex {d} needs {d + 1} vertices, got {len(verts)}", n)
            if any(v < 0 for v in verts) or len(set(verts)) != len(verts):
                raise ParseError("vertices must be distinct nonnegative integers", n)
            simplices.append(tuple(sorted(verts)))
        elif key == "cocycle" and num is not None and colon:
            r = int(num)
            if rank is None:
                rank = r
            elif r != rank:
                raise ParseError(f"cocycle rank {r} differs from earlier rank {rank}", n)
            if "->" not in rest:
                raise ParseError("cocycle line needs 'u v -> k1 .. kr'", n)
            lhs, rhs = rest.split("->", 1)
            uv = _ints(lhs.split(), n)
            w = _ints(rhs.split(), n)
            if len(uv) != 2 or len(w) != r:
                raise ParseError(f"cocycle line needs two vertices and {r} weights", n)
            u, v = uv
            if u == v:
                raise ParseError("cocycle edge is a loop", n)
            if u > v:
                u, v, w = v, u, [-x for x in w]
            if (u, v) in weights and weights[(u, v)] != tuple(w):
                raise ParseError(f"conflicting weights for edge ({u}, {v})", n)
            weights[(u, v)] = tuple(w)
        else:
            raise ParseError(f"unknown directive {line!r}", n)
    if dim is None:
        raise ParseError("missing 'dim N' line")
    if not simplices:
        raise ParseError("no simplices listed")
    nverts = max(max(s) for s in simplices) + 1
    closed = set()
    for s in simplices:
        for k in range(1, len(s) + 1):
            closed.update(combinations(s, k))
    k = SimplicialComplex(nverts, closed)
    if k.dim != dim:
        raise ValidationError(f"declared dim {dim} but the simplices have dimension {k.dim}")
    if rank is None:
        z = Cocycle(0, {e: () for e in k.edges})
    else:
        missing = [e for e in k.edges if e not in weights]
        if missing:
            raise UsageError(f"cocycle has no weight for edges {missing[:10]}")
        extra = [e for e in weights if e not in set(k.edges)]
        if extra:
            raise ParseError(f"cocycle weight on edges that are not in the complex: {extra[:10]}")
        z = Cocycle(rank, weights)
    return k, z


def _parse_explicit(lines):
    cells = None
    nvars = None
    raw = []
    for n, line in lines:
        key, num, colon, rest = _split(line, n)
        if key == "cells" and num is None and colon:
            if cells is not None:
                raise ParseError("duplicate cells line", n)
            cells = _ints(rest.split(), n)
            if not cells or any(c < 0 for c in cells):
                raise ParseError("cell counts must be nonnegative", n)
        elif key == "vars" and num is not None and not colon and not rest:
            nvars = int(num)
        elif key == "boundary" and num is not None and colon:
            parts = rest.split(None, 2)
            if len(parts) != 3:
                raise ParseError("boundary line needs 'row col poly'", n)
            row, col = _ints(parts[:2], n)
            raw.append((n, int(num), row, col, parts[2]))
        else:
            raise ParseError(f"unknown directive {line!r}", n)
    if cells is None:
        raise ParseError("missing 'cells:' line")
    polys = []
    for n, d, row, col, text in raw:
        try:
            p = parse_laurent(text, ring=ZZ)
        except ParseError as exc:
            raise ParseError(str(exc), n) from None
        except UsageError as exc:
            raise ParseError(str(exc), n) from None
        polys.append((n, d, row, col, p))
    used = max([p.nvars for *_, p in polys], default=0)
    if nvars is None:
        nvars = used
    elif used > nvars:
        raise ParseError(f"polynomials use {used} variables but 'vars {nvars}' was declared")
    dim = len(cells) - 1
    entries = {d: {} for d in range(1, dim + 1)}
    for n, d, row, col, p in polys:
        if not 1 <= d <= dim:
            raise ParseError(f"boundary degree {d} outside 1..{dim}", n)
        if not (0 <= row < cells[d - 1] and 0 <= col < cells[d]):
            raise ParseError(f"entry ({row}, {col}) outside a {cells[d - 1]}x{cells[d]} matrix", n)
        p = p.extend_vars(nvars) if p.nvars != nvars else p
        if (row, col) in entries[d]:
            raise ParseError(f"duplicate entry ({row}, {col}) in boundary {d}", n)
        entries[d][(row, col)] = p
    mats = [SparseMatrix(cells[d - 1], cells[d], entries[d]) for d in range(1, dim + 1)]
    return ExplicitComplex(cells, mats, nvars, {"kind": "explicit"})


def load_complex(path) -> TwistedComplex:
    """Read a complex file and return its twisted complex."""
    kind, data = parse_complex(Path(path).read_text())
    if kind == "simplicial":
        k, z = data
        return twist(k, z)
    return data


def format_simplicial(k: SimplicialComplex, z: Cocycle | None = None) -> str:
    """Serialize a simplicial complex (maximal simplices only) and cocycle."""
    simplices = set(s for level in k.simplices for s in level)
    maximal = sorted(
        (s for s in simplices if not any(set(s) < set(t) for t in simplices if len(t) == len(s) + 1)),
        key=lambda s: (len(s), s),
    )
    out = ["simplicial", f"dim {k.dim}"]
    out += [f"simplex {len(s) - 1}: " + " ".join(map(str, s)) for s in maximal]
    if z is not None and z.rank:
        for (u, v) in k.edges:
            out.append(f"cocycle {z.rank}: {u} {v} -> " + " ".join(map(str, z.weights[(u, v)])))
    return "\n".join(out) + "\n"


def format_explicit(tc: TwistedComplex, declare_vars=True) -> str:
    out = ["explicit", "cells: " + " ".join(map(str, tc.cell_counts))]
    if declare_vars:
        out.append(f"vars {tc.nvars}")
    for d in range(1, tc.dim + 1):
        for (i, j), v in sorted(tc.boundary(d).items()):
            out.append(f"boundary {d}: {i} {j} {v}")
    return "\n".join(out) + "\n"


# function files -------------------------------------------------------------

_PI_NUMBER = re.compile(
    r"^([+-])?(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)(?:\*?(pi))?|(pi))(?:/(\d+(?:\.\d*)?))?$"
)


def parse_real(token, n=None):
    """A float, optionally a multiple of ``pi``: ``-1.5``, ``pi/2``, ``-3*pi/4``."""
    m = _PI_NUMBER.match(token.strip())
    if not m:
        raise ParseError(f"cannot read number {token!r}", n)
    sign, num, pi1, pi2, den = m.groups()
    v = float(num) if num else 1.0
    if pi1 or pi2:
        v *= math.pi
    if den:
        d = float(den)
        if d == 0:
            raise ParseError("division by zero", n)
        v /= d
    return -v if sign == "-" else v


@dataclass
class FunctionSpec:
    """Parsed function file: a torus function, a generating function or a pair."""

    kind: str
    n: int
    beta: object
    function: object = None
    first: object = None
    second: object = None

    @property
    def generating(self):
        """The file's function viewed as a generating function (no fiber if plain)."""
        from .genfun import GeneratingFunction

        if isinstance(self.function, GeneratingFunction):
            return self.function
        return GeneratingFunction.from_function(self.function)


class _Block:
    def __init__(self):
        self.fiber = None
        self.signs = None
        self.radius = None
        self.terms = []
        self.couplings = []

    @property
    def is_generating(self):
        return self.fiber is not None or self.signs is not None or self.radius is not None or bool(self.couplings)


def parse_function_file(text) -> FunctionSpec:
    from .genfun import Coupling, GeneratingFunction
    from .smooth import BetaForm, TorusFunction

    n = None
    a = None
    exact = []
    blocks = {0: _Block()}
    current = 0

    def trig_term(tokens, ln):
        if n is None:
            raise ParseError("'torus n' must come before terms", ln)
        if len(tokens) != n + 2:
            raise ParseError(f"term needs {n} frequencies, amplitude and phase", ln)
        k = _ints(tokens[:n], ln)
        return (tuple(k), parse_real(tokens[n], ln), parse_real(tokens[n + 1], ln))

    for ln, line in _lines(text):
        head, _, rest = line.partition(":")
        words = head.split()
        key = words[0]
        b = blocks[current]
        if key == "torus" and len(words) == 2 and not _:
            if n is not None:
                raise ParseError("duplicate torus line", ln)
            n = _ints(words[1:], ln)[0]
            if n < 1:
                raise ParseError("torus dimension must be positive", ln)
        elif key == "lagrangian" and len(words) == 2 and not _:
            idx = _ints(words[1:], ln)[0]
            if idx not in (1, 2) or idx in blocks:
                raise ParseError("lagrangian blocks are 'lagrangian 1' then 'lagrangian 2'", ln)
            if blocks[0].terms or blocks[0].couplings or blocks[0].is_generating:
                raise ParseError("function data before the first lagrangian block", ln)
            blocks[idx] = _Block()
            current = idx
        elif key == "fiber" and len(words) == 2 and not _:
            b.fiber = _ints(words[1:], ln)[0]
            if b.fiber < 0:
                raise ParseError("fiber dimension must be nonnegative", ln)
        elif key == "radius" and len(words) == 2 and not _:
            b.radius = parse_real(words[1], ln)
        elif key == "quadratic" and len(words) == 1 and _:
            b.signs = _ints(rest.split(), ln)
            if any(s not in (1, -1) for s in b.signs):
                raise ParseError("quadratic entries must be +1 or -1", ln)
        elif key == "term" and len(words) == 1 and _:
            b.terms.append(trig_term(rest.split(), ln))
        elif key == "coupling" and len(words) == 1 and _:
            trig, sep, mono = rest.partition(";")
            if not sep:
                raise ParseError("coupling line needs 'k.. amp phase ; j1 .. jm'", ln)
            b.couplings.append((trig_term(trig.split(), ln), _ints(mono.split(), ln), ln))
        elif key == "beta" and len(words) == 1 and _:
            if n is None:
                raise ParseError("'torus n' must come before beta", ln)
            vals = [parse_real(x, ln) for x in rest.split()]
            if len(vals) != n:
                raise ParseError(f"beta needs {n} entries", ln)
            a = vals
        elif key == "beta_exact" and len(words) == 1 and _:
            exact.append(trig_term(rest.split(), ln))
        else:
            raise ParseError(f"unknown directive {line!r}", ln)
    if n is None:
        raise ParseError("missing 'torus n' line")
    if a is None:
        a = [0.0] * n
    beta = BetaForm(tuple(a), TorusFunction(n, exact) if exact else None)

    def build(block: _Block):
        if not block.is_generating:
            if not block.terms:
                raise ParseError("function has no terms")
            return TorusFunction(n, block.terms)
        signs = block.signs if block.signs is not None else []
        m = block.fiber if block.fiber is not None else len(signs)
        if len(signs) != m:
            raise ParseError(f"quadratic has {len(signs)} entries but fiber dimension is {m}")
        radius = block.radius if block.radius is not None else 4.0
        couplings = []
        if block.terms:
            couplings.append(Coupling(TorusFunction(n, block.terms), (0,) * m))
        for term, mono, ln in block.couplings:
            if len(mono) != m or any(e < 0 for e in mono):
                raise ParseError(f"coupling needs {m} nonnegative exponents", ln)
            couplings.append(Coupling(TorusFunction(n, [term]), tuple(mono)))
        try:
            return GeneratingFunction(n, signs, radius, couplings)
        except UsageError as exc:
            raise ParseError(str(exc)) from None

    if len(blocks) > 1:
        if set(blocks) != {0, 1, 2}:
            raise ParseError("a pair file needs both 'lagrangian 1' and 'lagrangian 2'")
        return FunctionSpec("pair", n, beta, first=build(blocks[1]), second=build(blocks[2]))
    f = build(blocks[0])
    kind = "function" if isinstance(f, TorusFunction) else "genfun"
    return FunctionSpec(kind, n, beta, function=f)


def load_function_file(path) -> FunctionSpec:
    return parse_function_file(Path(path).read_text())
