"""Exact arithmetic and sparse linear algebra over ZZ, QQ, GF(p) and Laurent rings."""

from .laurent import LaurentPoly, parse_laurent
from .matrix import SparseMatrix
from .rank import (
    RankCertificate,
    field_rank,
    rank_fraction_field,
    specialize,
    specialized_rank,
    symbolic_rank,
)
from .rings import GF, QQ, ZZ, Ring
from .smith import normalize_univariate, smith_form_integer, snf_integer, snf_univariate


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact product; both factors must share variable count and base ring."""
    if not isinstance(a, LaurentPoly) or not isinstance(b, LaurentPoly):
        raise TypeError("laurent_mul expects two LaurentPoly values")
    return a * b


__all__ = [
    "GF",
    "QQ",
    "ZZ",
    "LaurentPoly",
    "RankCertificate",
    "Ring",
    "SparseMatrix",
    "field_rank",
    "laurent_mul",
    "normalize_univariate",
    "parse_laurent",
    "rank_fraction_field",
    "smith_form_integer",
    "snf_integer",
    "snf_univariate",
    "specialize",
    "specialized_rank",
    "symbolic_rank",
]
