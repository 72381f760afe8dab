import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from morse_novikov.exactalg import (
    GF,
    QQ,
    ZZ,
    LaurentPoly,
    SparseMatrix,
    laurent_mul,
    parse_laurent,
    rank_fraction_field,
    smith_form_integer,
    snf_integer,
    snf_univariate,
    specialized_rank,
    symbolic_rank,
)
from morse_novikov.exceptions import ParseError, UsageError

T = LaurentPoly.variable(0, 1)


def P(text, nvars=None, ring=QQ):
    return parse_laurent(text, nvars=nvars, ring=ring)


# strategies -----------------------------------------------------------------


def polys(nvars=2, max_terms=4, lo=-2, hi=2):
    exps = st.tuples(*[st.integers(lo, hi)] * nvars)
    return st.dictionaries(exps, st.integers(-5, 5), max_size=max_terms).map(
        lambda d: LaurentPoly(d, nvars, ZZ)
    )


def to_sympy(p: LaurentPoly, syms):
    expr = sympy.Integer(0)
    for e, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return expr


# laurent polynomials --------------------------------------------------------


def test_difference_of_squares():
    assert laurent_mul(T - 1, T + 1) == T ** 2 - 1


def test_unit_law():
    a = P("3*t1^2 - t1^-1 + 5")
    assert laurent_mul(a, LaurentPoly.one(1)) == a


def test_two_variable_difference_of_squares():
    a = P("t1 + t2^-1", 2)
    b = P("t1 - t2^-1", 2)
    assert laurent_mul(a, b) == P("t1^2 - t2^-2", 2)


def test_mismatched_variable_count_is_usage_error():
    with pytest.raises(UsageError):
        laurent_mul(P("t1", 1), P("t1", 2))


def test_mismatched_ring_is_usage_error():
    with pytest.raises(UsageError):
        laurent_mul(P("t1 + 1", 1, GF(3)), P("t1 + 1", 1, GF(5)))


def test_no_zero_coefficients_stored():
    p = LaurentPoly({(1,): 2, (0,): 0, (-1,): 0}, 1)
    assert len(p) == 1
    assert (T - T).is_zero()


def test_parse_round_trip():
    p = P("-3/2*t1^2*t2^-1 + 1", 2)
    assert p.terms[(2, -1)] == Fraction(-3, 2)
    assert p.terms[(0, 0)] == 1
    assert P(str(p), 2) == p


@pytest.mark.parametrize("bad", ["t1^", "3*", "t0", "t1 ++ 2", "x1", "1/0"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        P(bad, 1)


def test_gf_sign_collapse():
    assert P("t1 - 1", 1, GF(2)) == P("t1 + 1", 1, GF(2))


def test_evaluate_integer_poly_at_rational():
    p = P("t1^2 - t1^-1", 1, ZZ)
    assert p.evaluate((Fraction(1, 2),)) == Fraction(1, 4) - 2


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + (-a) == LaurentPoly.zero(2, ZZ)


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_product_support_is_minkowski_sum_of_supports(a, b):
    # the product's support is contained in the Minkowski sum, and the
    # extreme (lexicographically largest) exponent always survives
    prod = a * b
    mink = {tuple(x + y for x, y in zip(e, f)) for e in a.terms for f in b.terms}
    assert set(prod.terms) <= mink
    if a and b:
        assert max(prod.terms) == max(mink)


@settings(max_examples=40, deadline=None)
@given(polys(nvars=1), polys(nvars=1))
def test_multiplication_matches_sympy(a, b):
    t = sympy.Symbol("t")
    assert sympy.expand(to_sympy(a * b, [t]) - to_sympy(a, [t]) * to_sympy(b, [t])) == 0


# ranks ----------------------------------------------------------------------


def test_rank_single_nonzero_row():
    m = SparseMatrix.from_dense([[T - 1, 0], [0, 0]])
    assert rank_fraction_field(m).rank == 1


def test_rank_circle_boundary():
    # columns e01, e12, e20 of the twisted 3-cycle; determinant t - 1
    m = SparseMatrix.from_dense([[-1, 0, T], [1, -1, 0], [0, 1, -1]])
    cert = rank_fraction_field(m)
    assert cert.rank == 3
    assert cert.method == "symbolic" and cert.trials == 0


def test_specialized_certificate_records_seed():
    m = SparseMatrix.from_dense([[-1, 0, T], [1, -1, 0], [0, 1, -1]])
    cert = rank_fraction_field(m, mode="specialized", trials=5, seed=11)
    assert cert.rank == 3
    assert cert.trials == 5 and cert.seed == 11


def test_rank_over_prime_field_differs_for_two():
    m = SparseMatrix.from_dense([[LaurentPoly.constant(2, 1, ZZ)]])
    assert symbolic_rank(m) == 1
    assert symbolic_rank(m.map(lambda v: v.change_ring(GF(2)))) == 0


def _random_poly_matrix(rng, rows, cols, nvars, deg, density=0.6):
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                terms = {tuple(rng.randint(-1, deg) for _ in range(nvars)): rng.randint(-3, 3)
                         for _ in range(rng.randint(1, 3))}
                p = LaurentPoly(terms, nvars, QQ)
                if p:
                    entries[(i, j)] = p
    return SparseMatrix(rows, cols, entries)


def _low_rank_matrix(rng, n, nvars, deg):
    # product of n x k and k x n factors: rank at most k over Q(t)
    k = rng.randint(1, n - 1)
    a = _random_poly_matrix(rng, n, k, nvars, deg // 2 or 1, 0.8)
    b = _random_poly_matrix(rng, k, n, nvars, deg // 2 or 1, 0.8)
    return a @ b


def _sympy_rank(m: SparseMatrix, nvars):
    syms = sympy.symbols(f"t1:{nvars + 1}")
    dense = [[to_sympy(m.get(i, j, LaurentPoly.zero(nvars)), syms) if m.get(i, j) else 0
              for j in range(m.cols)] for i in range(m.rows)]
    # clear negative powers row-wise so that the rank is taken over polynomials
    M = sympy.Matrix(dense)
    M = M.applyfunc(lambda e: sympy.cancel(e * sympy.prod([s ** 2 for s in syms])))
    return M.rank(simplify=True)


@pytest.mark.parametrize("seed", range(6))
def test_symbolic_rank_matches_sympy(seed):
    rng = random.Random(seed)
    nvars = 1 + seed % 2
    m = _low_rank_matrix(rng, 4, nvars, 2) if seed % 3 == 0 else _random_poly_matrix(rng, 4, 4, nvars, 2)
    assert symbolic_rank(m) == _sympy_rank(m, nvars)


@pytest.mark.parametrize("seed", range(10))
def test_specialized_equals_symbolic_on_random_4x4(seed):
    rng = random.Random(100 + seed)
    m = _low_rank_matrix(rng, 4, 2, 2) if seed % 2 else _random_poly_matrix(rng, 4, 4, 2, 2)
    assert specialized_rank(m, trials=5, seed=seed)[0] == symbolic_rank(m)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.integers(2, 6), st.integers(1, 3))
def test_specialized_never_exceeds_symbolic(seed, n, deg):
    rng = random.Random(seed)
    m = _low_rank_matrix(rng, n, 1, deg) if seed % 2 else _random_poly_matrix(rng, n, n, 1, deg)
    sym = symbolic_rank(m)
    for trial in range(5):
        assert specialized_rank(m, trials=1, seed=seed + trial)[0] <= sym
    assert specialized_rank(m, trials=5, seed=seed)[0] == sym


# smith forms ----------------------------------------------------------------


def test_snf_univariate_examples():
    m = SparseMatrix.from_dense([[T - 1, 0], [0, 2]])
    assert snf_univariate(m) == (LaurentPoly.one(1), T - 1)
    assert snf_univariate(SparseMatrix.identity(2)) == (LaurentPoly.one(1), LaurentPoly.one(1))
    t2 = LaurentPoly.variable(0, 1, GF(2))
    assert snf_univariate(SparseMatrix.from_dense([[t2 - 1]])) == (t2 + 1,)


def test_snf_univariate_rejects_multivariate():
    with pytest.raises(UsageError):
        snf_univariate(SparseMatrix.from_dense([[P("t1 + t2", 2)]]))


def test_snf_univariate_normalizes_monomial_factor():
    # t^-3 (2t^2 - 2) normalizes to t^2 - 1
    m = SparseMatrix.from_dense([[P("2*t1^-1 - 2*t1^-3", 1)]])
    assert snf_univariate(m) == (T ** 2 - 1,)


def _unimodular(rng, n, ring=QQ):
    u = SparseMatrix.identity(n, LaurentPoly.one(1, ring))
    for _ in range(4):
        i, j = rng.sample(range(n), 2)
        c = LaurentPoly({(rng.randint(-1, 1),): rng.randint(-2, 2)}, 1, ring)
        e = {(k, k): LaurentPoly.one(1, ring) for k in range(n)}
        if c:
            e[(i, j)] = c
        u = SparseMatrix(n, n, e) @ u
    return u


@pytest.mark.parametrize("seed", range(8))
def test_snf_univariate_invariant_under_unimodular_operations(seed):
    rng = random.Random(seed)
    m = _random_poly_matrix(rng, 3, 3, 1, 2)
    u, v = _unimodular(rng, 3), _unimodular(rng, 3)
    assert snf_univariate(u @ m @ v) == snf_univariate(m)
    assert len(snf_univariate(m)) == symbolic_rank(m)


@pytest.mark.parametrize("seed", range(6))
def test_snf_univariate_product_matches_determinant(seed):
    rng = random.Random(50 + seed)
    m = _random_poly_matrix(rng, 3, 3, 1, 2, density=0.9)
    factors = snf_univariate(m)
    t = sympy.Symbol("t1")
    det = sympy.Matrix(3, 3, lambda i, j: to_sympy(m.get(i, j, LaurentPoly.zero(1)), [t])
                       if m.get(i, j) else 0).det()
    det = sympy.factor(sympy.cancel(det))
    if len(factors) < 3:
        assert det == 0
        return
    prod = sympy.Integer(1)
    for f in factors:
        prod *= to_sympy(f, [t])
    # equal up to a unit c*t^k of Q[t, 1/t]
    ratio = sympy.cancel(det / prod)
    num, den = sympy.fraction(ratio)
    assert sympy.Poly(num, t).is_monomial and sympy.Poly(den, t).is_monomial


def test_snf_integer_examples():
    assert snf_integer(SparseMatrix.from_dense([[2, 0], [0, 3]])) == (1, 6)
    assert snf_integer(SparseMatrix.zeros(3, 2)) == ()
    assert snf_integer(SparseMatrix.identity(2)) == (1, 1)


def test_snf_integer_rejects_polynomials():
    with pytest.raises(UsageError):
        snf_integer(SparseMatrix.from_dense([[T]]))


int_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_snf_integer_matches_sympy_and_divides(rows):
    m = SparseMatrix.from_dense(rows)
    factors = snf_integer(m)
    for a, b in zip(factors, factors[1:]):
        assert b % a == 0
    assert all(f > 0 for f in factors)
    from sympy.matrices.normalforms import smith_normal_form

    ref = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    diag = [abs(int(ref[i, i])) for i in range(min(ref.shape)) if ref[i, i] != 0]
    assert list(factors) == diag


@settings(max_examples=40, deadline=None)
@given(int_matrices)
def test_snf_integer_transforms_multiply_back(rows):
    m = SparseMatrix.from_dense(rows)
    U, D, V = smith_form_integer(m)
    assert U @ m @ V == D
    assert abs(sympy.Matrix(U.to_dense()).det()) == 1
    assert abs(sympy.Matrix(V.to_dense()).det()) == 1
