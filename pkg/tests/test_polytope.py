from fractions import Fraction

import pytest

from exoflop.cone import Cone
from exoflop.fan import divisor_polytope
from exoflop.fixtures import ASPINWALL_VERTICES, M_FRAK_62, XI_62, example62, sigma_62
from exoflop.polytope import (
    Polytope,
    UnboundedPolytopeError,
    cayley_polytope,
    height_one_points,
    is_integrally_closed,
    is_saturated,
    lattice_points,
    support_polytope,
)

REEVE = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)]


def test_unit_square():
    P = Polytope.from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sorted(lattice_points(P)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert P.dim == 2 and P.is_lattice_polytope()


def test_triple_p2_triangle_has_ten_points():
    assert len(lattice_points(Polytope.from_vertices([(0, 0), (3, 0), (0, 3)]))) == 10


def test_rational_segment():
    P = Polytope.from_vertices([(Fraction(1, 2),), (Fraction(5, 2),)])
    assert lattice_points(P) == [(1,), (2,)]
    assert not P.is_lattice_polytope()


def test_unbounded_is_rejected():
    with pytest.raises(UnboundedPolytopeError):
        Polytope.from_inequalities([((1, 0), 0), ((0, 1), 0)], 2)


def test_h_representation():
    P = Polytope.from_inequalities([((1, 0), 0), ((0, 1), 0), ((-1, -1), 2)], 2)
    assert len(lattice_points(P)) == 6


def test_aspinwall_support_is_saturated():
    xi = lattice_points(Polytope.from_vertices(ASPINWALL_VERTICES))
    assert len(xi) == 31
    assert is_saturated(xi)


def test_gap_is_not_saturated():
    assert not is_saturated([(0, 0), (2, 0)])
    assert is_saturated([(0, 0), (1, 0), (2, 0)])


def test_reeve_simplex_is_not_integrally_closed():
    ok, witness = is_integrally_closed(Polytope.from_vertices(REEVE))
    assert not ok
    assert witness == ((1, 1, 1), 2)


def test_unimodular_simplex_is_integrally_closed():
    assert is_integrally_closed(Polytope.from_vertices([(0, 0), (1, 0), (0, 1)])) == (True, None)


def test_cayley_of_two_segments():
    seg = Polytope.from_vertices([(0,), (1,)])
    C = cayley_polytope([seg, seg])
    assert sorted(lattice_points(C)) == [(0, 0, 1), (0, 1, 0), (1, 0, 1), (1, 1, 0)]


def test_cayley_of_the_bundle_divisors_is_the_potential_support():
    m = example62().model
    parts = [divisor_polytope(m.base, D) for D in m.divisors]
    assert set(lattice_points(cayley_polytope(parts))) == set(XI_62)


def test_support_polytope_of_sigma_1():
    P = support_polytope(sigma_62(1, 2, 3, 4, 11, 12), M_FRAK_62)
    assert P.dim == 4 and len(P.vertices) == 6


def test_height_one_points_of_orthant():
    assert sorted(height_one_points(Cone.orthant(2), (1, 1))) == [(0, 1), (1, 0)]
