import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morse_novikov import models
from morse_novikov.complex import (
    Cocycle,
    SimplicialComplex,
    TwistedComplex,
    coboundary_gauge,
    product,
    twist,
    validate_cocycle,
    vertex_heights,
)
from morse_novikov.exactalg import ZZ, LaurentPoly, SparseMatrix
from morse_novikov.exceptions import UsageError, ValidationError
from morse_novikov.random_models import random_gauge, random_instance

T = LaurentPoly.variable(0, 1, ZZ)
ONE = LaurentPoly.one(1, ZZ)


def triangle():
    return SimplicialComplex.from_maximal(3, [(0, 1, 2)])


def three_cycle_weights(a, b, c):
    """Weights given on e01, e12, e20 as in the usual picture of the cycle."""
    return Cocycle(1, {(0, 1): (a,), (1, 2): (b,), (2, 0): (c,)})


# simplicial complexes --------------------------------------------------------


def test_closure_is_required():
    with pytest.raises(ValidationError):
        SimplicialComplex(3, [(0, 1, 2)])


def test_from_maximal_adds_faces():
    k = triangle()
    assert k.cell_counts == (3, 3, 1)
    assert k.euler_characteristic() == 1


def test_seven_vertex_torus_counts():
    k = models.seven_vertex_torus()
    assert k.cell_counts == (7, 21, 14)
    assert k.euler_characteristic() == 0


# cocycles --------------------------------------------------------------------


def test_reversing_an_edge_negates_the_weight():
    z = Cocycle(2, {(2, 0): (1, -3)})
    assert z.weight(0, 2) == (-1, 3)
    assert z.weight(2, 0) == (1, -3)


def test_conflicting_weights_rejected():
    with pytest.raises(UsageError):
        Cocycle(1, {(0, 1): (1,), (1, 0): (1,)})


def test_rank_limit():
    with pytest.raises(UsageError):
        Cocycle(5, {})


def test_validate_cocycle_examples():
    k = triangle()
    good = Cocycle(1, {(0, 1): (1,), (1, 2): (1,), (0, 2): (2,)})
    assert validate_cocycle(k, good).ok
    bad = Cocycle(1, {(0, 1): (1,), (1, 2): (1,), (0, 2): (0,)})
    report = validate_cocycle(k, bad)
    assert not report.ok
    assert report.violations == ((0, 1, 2),)


def test_hollow_cycle_accepts_any_weights():
    k, _ = models.circle(1)
    assert validate_cocycle(k, three_cycle_weights(5, -2, 7)).ok


def test_missing_weight_is_usage_error():
    k, _ = models.circle(1)
    with pytest.raises(UsageError):
        validate_cocycle(k, Cocycle(1, {(0, 1): (1,)}))


# heights and twisting ---------------------------------------------------------


def test_heights_depth_first_tree():
    # the tree {e01, e12} gives h = (0, 1, 1)
    k, _ = models.circle(1)
    h = vertex_heights(k, three_cycle_weights(1, 0, 0), tree="dfs")
    assert h == {0: (0,), 1: (1,), 2: (1,)}


def test_heights_breadth_first_tree():
    # the BFS tree from vertex 0 is {e01, e02}
    k, _ = models.circle(1)
    h = vertex_heights(k, three_cycle_weights(1, 0, 0))
    assert h == {0: (0,), 1: (1,), 2: (0,)}


def test_heights_zero_weights():
    k = models.seven_vertex_torus()
    h = vertex_heights(k, Cocycle.zero(k, 2))
    assert all(v == (0, 0) for v in h.values())


def test_heights_on_a_tree_reproduce_path_sums():
    k = SimplicialComplex.from_maximal(4, [(0, 1), (1, 2), (1, 3)])
    z = Cocycle(1, {(0, 1): (2,), (1, 2): (-5,), (1, 3): (4,)})
    assert vertex_heights(k, z) == {0: (0,), 1: (2,), 2: (-3,), 3: (6,)}
    tc = twist(k, z)
    assert all(v.is_constant() for _, v in tc.boundary(1).items())


def test_disconnected_skeleton_rejected():
    k = SimplicialComplex.from_maximal(4, [(0, 1), (2, 3)])
    with pytest.raises(UsageError):
        vertex_heights(k, Cocycle.zero(k))


def test_twisted_three_cycle_boundary():
    k, _ = models.circle(1)
    tc = twist(k, three_cycle_weights(1, 0, 0), tree="dfs")
    d1 = tc.boundary(1)
    # columns are (0,1), (0,2), (1,2); the e20 column of the usual picture is
    # t v0 - v2, and e02 = -e20 lifted one sheet down gives t^-1 v2 - v0
    assert [d1.get(i, 0) for i in range(3)] == [-ONE, ONE, 0]
    assert [d1.get(i, 2) for i in range(3)] == [0, -ONE, ONE]
    assert [d1.get(i, 1) for i in range(3)] == [-ONE, 0, T ** -1]


def test_zero_weights_give_ordinary_boundary():
    k = models.seven_vertex_torus()
    tc = twist(k, Cocycle.zero(k))
    for d in (1, 2):
        assert tc.boundary(d).map(lambda v: v.constant_term()) == k.boundary_matrix(d)


def test_provenance_records_tree():
    k, z = models.circle(1)
    assert twist(k, z).provenance["tree"] == "bfs"
    assert twist(k, z, tree="dfs").provenance["tree"] == "dfs"


def test_explicit_complex_checks_square_zero():
    d1 = SparseMatrix.from_dense([[T - 1]])
    d2 = SparseMatrix.from_dense([[ONE]])
    with pytest.raises(ValidationError):
        TwistedComplex((1, 1, 1), [d1, d2], 1)


@pytest.mark.parametrize("seed", range(30))
def test_random_twists_square_to_zero_and_specialize(seed):
    rng = random.Random(seed)
    k, z = random_instance(rng)
    tc = twist(k, z)
    assert tc.composition_defects() == []
    for d, m in enumerate(tc.specialize_to_one(), start=1):
        assert m == k.boundary_matrix(d)


def test_gauge_example():
    z = three_cycle_weights(1, 0, 0)
    g = coboundary_gauge(z, {0: (0,), 1: (-1,), 2: (-1,)})
    assert (g.weight(0, 1), g.weight(1, 2), g.weight(2, 0)) == ((0,), (0,), (1,))


def test_zero_gauge_is_identity():
    z = three_cycle_weights(1, 2, 3)
    assert coboundary_gauge(z, {v: (0,) for v in range(3)}) == z


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_gauged_cocycles_stay_valid(seed):
    rng = random.Random(seed)
    k, z = random_instance(rng)
    g = coboundary_gauge(z, random_gauge(rng, k, z.rank))
    assert validate_cocycle(k, g).ok


# products --------------------------------------------------------------------


def test_interval_squared_is_a_square():
    sq = product(models.interval(), models.interval())
    assert sq.cell_counts == (4, 4, 1)
    assert sq.euler_characteristic() == 1


def test_circle_times_point_keeps_boundary():
    c = models.circle_cw((1,))
    prod = product(c, models.point(1))
    assert prod.cell_counts == c.cell_counts
    assert prod.boundary(1) == c.boundary(1)


def test_rp3_times_genus2_counts():
    prod = product(models.rp3(), models.genus2_cw())
    assert prod.cell_counts == (1, 5, 6, 6, 5, 1)
    assert prod.composition_defects() == []


def test_product_variable_mismatch():
    with pytest.raises(UsageError):
        product(models.circle_cw((1,)), models.torus_cw((1, 0), (0, 1)))


@pytest.mark.parametrize("a,b", [
    (models.rp3(), models.genus2_cw()),
    (models.torus_cw(), models.circle_cw((1,))),
    (models.circle_cw((2,)), models.genus2_cw()),
])
def test_product_euler_is_multiplicative(a, b):
    prod = product(a, b)
    assert prod.euler_characteristic() == a.euler_characteristic() * b.euler_characteristic()
