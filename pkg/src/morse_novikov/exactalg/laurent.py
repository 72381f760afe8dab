"""Sparse multivariate Laurent polynomials over ZZ, QQ or GF(p)."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from ..exceptions import ParseError, UsageError
from .rings import QQ, ZZ, Ring


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


class LaurentPoly:
    """An immutable Laurent polynomial in ``t1 .. t_nvars``.

    Terms are a mapping from integer exponent tuples (entries may be negative)
    to nonzero coefficients of ``ring``.  Scalars mix freely with polynomials
    in arithmetic; two polynomials must agree on ``nvars`` and ``ring``.

    >>> t = LaurentPoly.variable(0, nvars=1)
    >>> (t - 1) * (t + 1)
    LaurentPoly('t1^2 - 1', nvars=1, ring=QQ)
    """

    __slots__ = ("nvars", "ring", "_terms", "_hash")

    def __init__(self, terms=None, nvars=1, ring=QQ):
        if nvars < 0:
            raise UsageError("nvars must be nonnegative")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise UsageError(f"exponent {exps} does not have {nvars} entries")
            c = ring.coerce(coeff)
            if c:
                c = ring.normalize(clean.get(exps, 0) + c)
                if c:
                    clean[exps] = c
                else:
                    clean.pop(exps, None)
        self.nvars = nvars
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, nvars, ring):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, nvars=1, ring=QQ):
        return cls._raw({}, nvars, ring)

    @classmethod
    def constant(cls, c, nvars=1, ring=QQ):
        c = ring.coerce(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars, ring)

    @classmethod
    def one(cls, nvars=1, ring=QQ):
        return cls.constant(1, nvars, ring)

    @classmethod
    def monomial(cls, exps, coeff=1, ring=QQ):
        exps = tuple(int(e) for e in exps)
        c = ring.coerce(coeff)
        return cls._raw({exps: c} if c else {}, len(exps), ring)

    @classmethod
    def variable(cls, index, nvars=1, ring=QQ):
        exps = [0] * nvars
        exps[index] = 1
        return cls.monomial(exps, 1, ring)

    # basic queries --------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_term(self):
        return self._terms.get((0,) * self.nvars, 0)

    def is_monomial(self):
        return len(self._terms) == 1

    def is_unit(self):
        """Units of the Laurent ring are monomials with a unit coefficient."""
        if len(self._terms) != 1:
            return False
        return self.ring.is_unit(next(iter(self._terms.values())))

    def min_exponents(self):
        if not self._terms:
            raise ValueError("zero polynomial has no support")
        return tuple(min(e[j] for e in self._terms) for j in range(self.nvars))

    def max_exponents(self):
        if not self._terms:
            raise ValueError("zero polynomial has no support")
        return tuple(max(e[j] for e in self._terms) for j in range(self.nvars))

    def leading_term(self):
        """Lexicographically largest (exponent, coefficient) pair."""
        e = max(self._terms)
        return e, self._terms[e]

    # coercion -------------------------------------------------------------

    def _coerce_other(self, other):
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise UsageError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            if other.ring != self.ring:
                raise UsageError(f"base ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Rational)):
            return LaurentPoly.constant(other, self.nvars, self.ring)
        return NotImplemented

    def change_ring(self, ring: Ring):
        terms = {}
        for e, c in self._terms.items():
            c = ring.coerce(c)
            if c:
                terms[e] = c
        return LaurentPoly._raw(terms, self.nvars, ring)

    def extend_vars(self, nvars, positions=None):
        """Embed into a ring with ``nvars`` variables.

        ``positions[j]`` is the new index of old variable ``j`` (default: keep
        the first ``self.nvars`` slots).
        """
        if positions is None:
            positions = list(range(self.nvars))
        if len(positions) != self.nvars or any(not 0 <= p < nvars for p in positions):
            raise UsageError("invalid variable embedding")
        terms = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for j, p in enumerate(positions):
                ne[p] += e[j]
            terms[tuple(ne)] = c
        return LaurentPoly._raw(terms, nvars, self.ring)

    # arithmetic -----------------------------------------------------------

    def __neg__(self):
        norm = self.ring.normalize
        return LaurentPoly._raw({e: norm(-c) for e, c in self._terms.items()}, self.nvars, self.ring)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        norm = self.ring.normalize
        terms = dict(self._terms)
        for e, c in other._terms.items():
            s = norm(terms.get(e, 0) + c)
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return LaurentPoly._raw(terms, self.nvars, self.ring)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPoly._raw({}, self.nvars, self.ring)
        if len(a) < len(b):
            a, b = b, a
        norm = self.ring.normalize
        terms = {}
        get = terms.get
        if self.nvars == 1:
            for (ea,), ca in a.items():
                for (eb,), cb in b.items():
                    k = (ea + eb,)
                    terms[k] = get(k, 0) + ca * cb
        else:
            for ea, ca in a.items():
                for eb, cb in b.items():
                    k = _add_exp(ea, eb)
                    terms[k] = get(k, 0) + ca * cb
        out = {}
        for e, c in terms.items():
            c = norm(c)
            if c:
                out[e] = c
        return LaurentPoly._raw(out, self.nvars, self.ring)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.ring.coerce(c)
        if not c:
            return LaurentPoly._raw({}, self.nvars, self.ring)
        norm = self.ring.normalize
        return LaurentPoly._raw({e: norm(v * c) for e, v in self._terms.items()}, self.nvars, self.ring)

    def shift(self, exps):
        """Multiply by the monomial ``t^exps``."""
        exps = tuple(exps)
        return LaurentPoly._raw({_add_exp(e, exps): c for e, c in self._terms.items()}, self.nvars, self.ring)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_unit():
                raise ArithmeticError("negative powers only exist for units")
            (e, c), = self._terms.items()
            inv = self.ring.div(1, c)
            return LaurentPoly.monomial(tuple(-x for x in e), 1, self.ring).scale(inv) ** (-n)
        result = LaurentPoly.one(self.nvars, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, other):
        """Return ``q`` with ``q * other == self``; raise ``ArithmeticError`` otherwise.

        Lexicographic long division.  Every quotient exponent must sit in the
        box spanned by the exponent ranges of ``self`` and ``other`` (Newton
        polytopes add under multiplication), which also bounds the loop.
        """
        other = self._coerce_other(other)
        if not other._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self._terms:
            return self
        ring = self.ring
        if len(other._terms) == 1:
            (eb, cb), = other._terms.items()
            terms = {_sub_exp(e, eb): ring.div(c, cb) for e, c in self._terms.items()}
            return LaurentPoly._raw(terms, self.nvars, ring)
        lo = _sub_exp(self.min_exponents(), other.min_exponents())
        hi = _sub_exp(self.max_exponents(), other.max_exponents())
        eb, cb = other.leading_term()
        bterms = list(other._terms.items())
        norm = ring.normalize
        rem = dict(self._terms)
        quot = {}
        while rem:
            er = max(rem)
            qe = _sub_exp(er, eb)
            if any(q < l or q > h for q, l, h in zip(qe, lo, hi)):
                raise ArithmeticError("polynomial is not divisible")
            qc = ring.div(rem[er], cb)
            quot[qe] = qc
            for e, c in bterms:
                k = _add_exp(e, qe)
                v = norm(rem.get(k, 0) - qc * c)
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return LaurentPoly._raw(quot, self.nvars, ring)

    def divides(self, other):
        try:
            other.exact_div(self)
        except ArithmeticError:
            return False
        return True

    # evaluation -----------------------------------------------------------

    def evaluate(self, point):
        """Substitute field elements for every variable (no zero coordinates)."""
        if len(point) != self.nvars:
            raise UsageError(f"point has {len(point)} coordinates, expected {self.nvars}")
        ring = self.ring
        vals = [ring.fraction_field().coerce(v) for v in point]
        if any(not v for v in vals):
            raise UsageError("substitution point has a zero coordinate")
        if ring.kind == "GF":
            p = ring.p
            total = 0
            for e, c in self._terms.items():
                term = c
                for v, k in zip(vals, e):
                    term = term * pow(v, k, p) % p
                total += term
            return total % p
        total = 0
        for e, c in self._terms.items():
            term = Fraction(c)
            for v, k in zip(vals, e):
                if k:
                    term *= Fraction(v) ** k
            total += term
        return ring.fraction_field().normalize(Fraction(total))

    def specialize_to_one(self):
        """Image under ``t_j -> 1`` (sum of coefficients)."""
        return self.ring.normalize(sum(self._terms.values()))

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            try:
                return self._terms == LaurentPoly.constant(other, self.nvars, self.ring)._terms
            except UsageError:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.ring, frozenset(self._terms.items())))
        return self._hash

    # formatting -----------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                f"t{j + 1}" if k == 1 else f"t{j + 1}^{k}" for j, k in enumerate(e) if k
            )
            neg = self.ring.kind != "GF" and c < 0
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append(("-" if neg else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"LaurentPoly({str(self)!r}, nvars={self.nvars}, ring={self.ring})"


# parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(t\d+)|(\^)|(\*)|(/)|([+-]))")


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} in polynomial {text!r}")
        num, var, caret, star, slash, sign = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif var is not None:
            tokens.append(("var", int(var[1:])))
        elif caret:
            tokens.append(("^", None))
        elif star:
            tokens.append(("*", None))
        elif slash:
            tokens.append(("/", None))
        else:
            tokens.append(("sign", -1 if sign == "-" else 1))
        pos = m.end()
    return tokens


def parse_laurent(text, nvars=None, ring=QQ):
    """Parse the textual syntax ``-3/2*t1^2*t2^-1 + 1``.

    ``nvars`` defaults to the largest variable index that appears.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError(f"empty polynomial {text!r}")
    i = 0
    terms = []

    def expect_int():
        nonlocal i
        sign = 1
        if i < len(tokens) and tokens[i][0] == "sign":
            sign = tokens[i][1]
            i += 1
        if i >= len(tokens) or tokens[i][0] != "num":
            raise ParseError(f"expected an integer exponent in {text!r}")
        val = tokens[i][1]
        i += 1
        return sign * val

    while i < len(tokens):
        sign = 1
        if tokens[i][0] == "sign":
            sign = tokens[i][1]
            i += 1
        elif terms:
            raise ParseError(f"missing operator between terms in {text!r}")
        coeff = Fraction(sign)
        exps = {}
        need_factor = True
        while i < len(tokens):
            kind, val = tokens[i]
            if need_factor:
                if kind == "num":
                    i += 1
                    num = val
                    if i < len(tokens) and tokens[i][0] == "/":
                        i += 1
                        if i >= len(tokens) or tokens[i][0] != "num":
                            raise ParseError(f"bad rational coefficient in {text!r}")
                        den = tokens[i][1]
                        i += 1
                        if den == 0:
                            raise ParseError(f"zero denominator in {text!r}")
                        coeff *= Fraction(num, den)
                    else:
                        coeff *= num
                elif kind == "var":
                    i += 1
                    if val < 1:
                        raise ParseError(f"variables are numbered from t1 in {text!r}")
                    power = 1
                    if i < len(tokens) and tokens[i][0] == "^":
                        i += 1
                        power = expect_int()
                    exps[val] = exps.get(val, 0) + power
                else:
                    raise ParseError(f"expected a coefficient or variable in {text!r}")
                need_factor = False
            elif kind == "*":
                i += 1
                need_factor = True
            else:
                break
        if need_factor:
            raise ParseError(f"dangling operator in {text!r}")
        terms.append((coeff, exps))

    used = max((max(e) for _, e in terms if e), default=0)
    if nvars is None:
        nvars = used
    elif used > nvars:
        raise ParseError(f"variable t{used} exceeds declared count {nvars}")
    out = {}
    for coeff, exps in terms:
        key = tuple(exps.get(j + 1, 0) for j in range(nvars))
        out[key] = out.get(key, 0) + coeff
    if ring == ZZ and any(Fraction(c).denominator != 1 for c in out.values()):
        raise ParseError(f"non-integral coefficient over ZZ in {text!r}")
    return LaurentPoly(out, nvars=nvars, ring=ring)
