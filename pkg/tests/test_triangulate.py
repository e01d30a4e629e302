from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from exoflop.arith import determinant, rank
from exoflop.cone import Cone, cones_equal
from exoflop.fan import Fan, is_simplicial, is_subfan, support
from exoflop.fixtures import ASPINWALL_ADDED_CONE, RHO, aspinwall, example62, sigma_62
from exoflop.triangulate import (
    DegenerateConfigurationError,
    NotRegularError,
    PointConfig,
    RegularTriangulation,
    TriangulationError,
    boundary_fan,
    conical_certificate,
    covers_cone,
    default_mbar,
    extend_triangulation,
    find_regularity_weights,
    lower_hull_subdivision,
    pulling_refinement,
    regular_triangulation,
    semiprojective_fan,
)

from oracles import hull_volume

# corners in cyclic order
SQUARE = PointConfig([(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)], (0, 0, 1))
OUTER_INNER = [(0, 0), (6, 0), (0, 6), (1, 1), (4, 1), (1, 4)]
MOTHER = PointConfig([p + (1,) for p in OUTER_INNER], (0, 0, 1))
TWISTED = [
    [(3, 4, 5), (0, 1, 4), (1, 2, 5), (0, 2, 3), (0, 3, 4), (1, 4, 5), (2, 3, 5)],
    [(3, 4, 5), (0, 1, 3), (1, 2, 4), (0, 2, 5), (1, 3, 4), (2, 4, 5), (0, 3, 5)],
]


def volume(cfg, cell):
    return abs(determinant([cfg.points[i] for i in cell]))


def test_points_must_lie_on_the_hyperplane():
    with pytest.raises(TriangulationError):
        PointConfig([(0, 1), (1, 2)], (0, 1))
    with pytest.raises(TriangulationError):
        PointConfig([(0, 1), (0, 1)], (0, 1))


def test_from_rays_scales_onto_the_hyperplane():
    cfg = PointConfig.from_rays([(1, 0), (1, 2)], (1, 1))
    assert cfg.points == ((Fraction(1), Fraction(0)), (Fraction(1, 3), Fraction(2, 3)))


def test_square_zero_weights_is_one_cell():
    sub = lower_hull_subdivision(SQUARE, [0, 0, 0, 0])
    assert sub.cells == ((0, 1, 2, 3),) and not sub.is_triangulation


def test_square_alternating_weights_cut_a_diagonal():
    sub = lower_hull_subdivision(SQUARE, [0, 1, 0, 1])
    assert sub.is_triangulation
    assert sub.cells == ((0, 1, 2), (0, 2, 3))
    assert lower_hull_subdivision(SQUARE, [1, 0, 1, 0]).cells == ((0, 1, 3), (1, 2, 3))


def test_segment_midpoint_is_used():
    seg = PointConfig([(0, 1), (2, 1), (1, 1)], (0, 1))
    sub = lower_hull_subdivision(seg, [1, 1, 0])
    assert sub.cells == ((0, 2), (1, 2)) and sub.is_triangulation
    assert not lower_hull_subdivision(seg, [0, 0, 0]).is_triangulation


def test_weights_must_be_nonnegative():
    with pytest.raises(TriangulationError):
        lower_hull_subdivision(SQUARE, [0, -1, 0, 0])


def test_degenerate_configuration():
    line = PointConfig([(0, 0, 1), (1, 0, 1), (2, 0, 1)], (0, 0, 1))
    with pytest.raises(DegenerateConfigurationError):
        lower_hull_subdivision(line, [0, 1, 0])


def test_single_simplex_gets_zero_weights():
    cfg = PointConfig([(0, 0, 1), (1, 0, 1), (0, 1, 1)], (0, 0, 1))
    assert find_regularity_weights(cfg, [(0, 1, 2)]) == (0, 0, 0)


def test_both_square_diagonals_are_regular():
    for cells in ([(0, 1, 2), (0, 2, 3)], [(0, 1, 3), (1, 2, 3)]):
        w = find_regularity_weights(SQUARE, cells)
        assert w is not None
        assert lower_hull_subdivision(SQUARE, w).cells == tuple(sorted(cells))


def test_twisted_triangulations_are_not_regular():
    for cells in TWISTED:
        assert sum(volume(MOTHER, c) for c in cells) == 36
        assert find_regularity_weights(MOTHER, cells) is None
        with pytest.raises(NotRegularError):
            regular_triangulation(MOTHER, cells)


def test_mother_configuration_has_regular_triangulations():
    sub = lower_hull_subdivision(MOTHER, [0, 3, 7, 1, 2, 5])
    assert sub.is_triangulation
    w = find_regularity_weights(MOTHER, sub.cells)
    assert lower_hull_subdivision(MOTHER, w).cells == sub.cells


def test_non_simplex_cells_are_rejected():
    with pytest.raises(TriangulationError):
        find_regularity_weights(SQUARE, [(0, 1, 2, 3)])


def test_extension_by_known_points_is_trivial():
    T = regular_triangulation(SQUARE, [(0, 1, 2), (0, 2, 3)])
    E = extend_triangulation(T, [(1, 0, 1)])
    assert E.cells == T.cells and E.weights == T.weights and E.log == ()


def test_center_of_square_is_case_one():
    T = regular_triangulation(SQUARE, [(0, 1, 2), (0, 2, 3)])
    E = extend_triangulation(T, [(Fraction(1, 2), Fraction(1, 2), 1)])
    assert E.cells == T.cells
    (step,) = E.log
    assert step.case == 1 and step.weight == 1 + max(T.weights)
    assert E.verify()


def test_outside_point_is_case_two():
    tri = PointConfig([(0, 0, 1), (1, 0, 1), (0, 1, 1)], (0, 0, 1))
    T = regular_triangulation(tri, [(0, 1, 2)])
    E = extend_triangulation(T, [(1, 1, 1)])
    assert E.log[0].case == 2
    assert E.cells == ((0, 1, 2), (1, 2, 3))
    assert E.verify() and covers_cone(E)


def test_extension_must_stay_in_span():
    cfg = PointConfig([(0, 0, 1), (1, 0, 1)], (0, 0, 1))
    T = RegularTriangulation(cfg, ((0, 1),), (0, 0))
    with pytest.raises(DegenerateConfigurationError):
        extend_triangulation(T, [(0, 1, 1)])


def test_aspinwall_extension_adds_one_simplex():
    m = aspinwall().model
    cfg = PointConfig.from_rays(m.bundle.rays, (0, 0, 0, 1))
    T0 = regular_triangulation(cfg, m.bundle.max_cones)
    T = extend_triangulation(T0, [(-1, 0, 0, 1)])
    assert set(T0.cells) <= set(T.cells)
    added = [frozenset(T.config.points[i] for i in c) for c in T.cells if c not in T0.cells]
    assert added == [frozenset(tuple(Fraction(x) for x in v) for v in ASPINWALL_ADDED_CONE)]
    assert T.log[0].case == 2


def test_conical_certificate_scales():
    T = regular_triangulation(SQUARE, [(0, 1, 2), (0, 2, 3)])
    assert conical_certificate(T).scale == 1
    half = RegularTriangulation(SQUARE, ((0, 1, 2), (0, 2, 3)), (0, Fraction(1, 2), 0, Fraction(1, 2)))
    assert half.verify()
    cert = conical_certificate(half)
    assert cert.scale == 2 and cert.ray_values == (0, 1, 0, 1)
    assert cert.verify([(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)])


def test_pulling_refinement_of_a_square():
    vecs = [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    assert pulling_refinement(vecs, (0, 1, 2, 3), [0, 1, 2, 3]) == [(0, 1, 2), (0, 2, 3)]
    assert pulling_refinement(vecs, (0, 1, 2, 3), [1, 0, 2, 3]) == [(0, 1, 3), (1, 2, 3)]


def test_semiprojective_fan_trivial_case():
    F = Fan([(1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2)])
    res = semiprojective_fan(Cone.orthant(2), F)
    assert res.fan == F
    assert res.insertion_order == ()


def test_semiprojective_fan_aspinwall():
    m = aspinwall().model
    sp = Cone(list(m.bundle.rays) + [(-1, 0, 0, 1)], 4)
    res = semiprojective_fan(sp, m.bundle)
    assert res.mbar == (0, 0, 0, 6)
    assert len(res.fan.max_cones) == len(m.bundle.max_cones) + 1
    assert res.certificate.verify(res.fan.rays)


def test_semiprojective_fan_on_sigma_one_bundle():
    m = example62().model
    sp = sigma_62(*range(1, 9))
    res = semiprojective_fan(sp, m.bundle)
    assert len(res.fan.rays) == 10
    assert set(res.fan.rays) == {RHO[i] for i in (1, 2, 3, 4, 5, 6, 7, 8, 11, 12)}
    assert is_simplicial(res.fan) and is_subfan(m.bundle, res.fan)
    assert cones_equal(support(res.fan), sp)


def test_default_mbar_is_interior():
    sp = sigma_62(*range(1, 9))
    mb = default_mbar(sp)
    assert all(sum(a * b for a, b in zip(mb, u)) > 0 for u in sp.rays)


def test_semiprojective_fan_rejects_escaping_subfan():
    F = Fan([(1, 0), (-1, 1)], [(0, 1)])
    with pytest.raises(TriangulationError):
        semiprojective_fan(Cone.orthant(2), F)


def test_boundary_fan_blows_up_a_point():
    vecs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1), (-1, 0, 0)]
    fan, unused = boundary_fan(vecs)
    assert unused == () and len(fan.max_cones) == 6 and is_simplicial(fan)


def test_boundary_fan_drops_interior_points():
    fan, unused = boundary_fan([(1, 0), (0, 1), (-3, -2), (-1, -1)])
    assert unused == (3,) and len(fan.max_cones) == 3


@st.composite
def extension_instances(draw):
    n = draw(st.integers(2, 4))
    coord = st.integers(-2, 2)
    point = st.tuples(*[coord] * (n - 1)).map(lambda p: p + (1,))
    base = draw(st.lists(point, min_size=n, max_size=n + 2, unique=True))
    new = draw(st.lists(point, min_size=1, max_size=3, unique=True))
    weights = draw(st.lists(st.integers(0, 30), min_size=len(base), max_size=len(base)))
    return n, base, new, weights


@settings(max_examples=100, deadline=None, derandomize=True)
@given(extension_instances())
def test_extension_postconditions(data):
    n, base, new, weights = data
    assume(rank(base) == n)
    mbar = (0,) * (n - 1) + (1,)
    cfg = PointConfig(base, mbar)
    sub = lower_hull_subdivision(cfg, weights)
    assume(sub.is_triangulation)
    w0 = find_regularity_weights(cfg, sub.cells)
    assert w0 is not None
    T0 = RegularTriangulation(cfg, sub.cells, w0)
    T = extend_triangulation(T0, new)
    # every old simplex survives, with the same vertices
    assert set(T0.cells) <= set(T.cells)
    assert T.config.points[:len(base)] == cfg.points
    # the weights certify the output
    assert T.verify()
    assert all(len(c) == n for c in T.cells)
    # the simplices tile the hull of all points: volumes add up
    total = sum(volume(T.config, c) for c in T.cells)
    assert total == hull_volume([p[:-1] for p in T.config.points])
    assert covers_cone(T)

