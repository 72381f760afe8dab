"""Coefficient rings: the integers, the rationals and prime fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

from ..exceptions import UsageError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Ring:
    """A base ring for Laurent polynomial coefficients.

    ``kind`` is one of ``"ZZ"``, ``"QQ"`` or ``"GF"``; ``p`` is the
    characteristic for prime fields and 0 otherwise.  Rational coefficients
    are stored as ``int`` when integral and as ``Fraction`` otherwise, prime
    field coefficients as ints in ``range(p)``.
    """

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise UsageError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF" and not _is_prime(self.p):
            raise UsageError(f"GF({self.p}): characteristic must be prime")
        if self.kind != "GF" and self.p != 0:
            raise UsageError("characteristic only applies to prime fields")

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    @property
    def characteristic(self) -> int:
        return self.p

    def __str__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    def coerce(self, c):
        """Map a Python scalar into this ring's canonical representation."""
        if isinstance(c, bool):
            c = int(c)
        if self.kind == "GF":
            if isinstance(c, Integral):
                return int(c) % self.p
            if isinstance(c, Rational):
                den = int(c.denominator) % self.p
                if den == 0:
                    raise UsageError(f"{c} has no image in GF({self.p})")
                return int(c.numerator) * pow(den, -1, self.p) % self.p
            raise UsageError(f"cannot coerce {c!r} into GF({self.p})")
        if isinstance(c, Integral):
            return int(c)
        if isinstance(c, Rational):
            if c.denominator == 1:
                return int(c.numerator)
            if self.kind == "ZZ":
                raise UsageError(f"non-integral coefficient {c} over ZZ")
            return Fraction(c)
        raise UsageError(f"cannot coerce {c!r} into {self}")

    def normalize(self, c):
        """Cheap canonicalisation of results of ``+``/``*`` on coerced values."""
        if self.kind == "GF":
            return c % self.p
        if type(c) is Fraction and c.denominator == 1:
            return c.numerator
        return c

    def div(self, a, b):
        """Exact quotient ``a / b``; raises ``ArithmeticError`` when impossible."""
        if not b:
            raise ZeroDivisionError("division by zero in ring " + str(self))
        if self.kind == "GF":
            return a * pow(b, -1, self.p) % self.p
        if self.kind == "ZZ":
            q, r = divmod(a, b)
            if r:
                raise ArithmeticError(f"{a} is not divisible by {b} over ZZ")
            return q
        q = Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def is_unit(self, c) -> bool:
        if self.kind == "ZZ":
            return c in (1, -1)
        return c != 0

    def fraction_field(self) -> "Ring":
        return QQ if self.kind == "ZZ" else self


ZZ = Ring("ZZ")
QQ = Ring("QQ")


def GF(p: int) -> Ring:
    return Ring("GF", int(p))
