from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from satellite_hfk.beta_curve import pattern_beta, winding_number
from satellite_hfk.torus_geometry import (
    EdgePath,
    GeometryError,
    common_triangle,
    compare_strands,
    delta_sign,
    edge_points,
    edge_triangles,
    edge_vertices,
    order_strands,
    path_from_polyline,
    point_in_polygon,
    polyline_crossings,
    shared_vertex,
    signed_area,
    triangle_edges,
    triangle_vertices,
    vertex_point,
)

F = Fraction
cells = st.tuples(st.integers(-5, 5), st.integers(-5, 5))


def test_punctures():
    assert vertex_point(("w", 2, -1)) == (F(9, 4), F(-5, 8))
    assert vertex_point(("z", 0, 0)) == (F(3, 4), F(5, 8))
    assert edge_points((1, 0, 0)) == ((F(1, 4), F(3, 8)), (F(3, 4), F(5, 8)))


@given(cells)
def test_triangles_tile_the_unit_cell(cell):
    k, l = cell
    area = sum(abs(signed_area([vertex_point(v) for v in triangle_vertices((t, k, l))])) for t in range(1, 5))
    assert area == 1


@given(cells, st.integers(1, 4))
def test_triangle_sides_join_its_vertices(cell, t):
    tri = (t, *cell)
    verts = set(triangle_vertices(tri))
    for e in triangle_edges(tri):
        assert set(edge_vertices(e)) <= verts
        assert tri in edge_triangles(e)


@given(cells, st.integers(1, 6))
def test_each_edge_borders_two_distinct_triangles(cell, t):
    e = (t, *cell)
    a, b = edge_triangles(e)
    assert a != b
    assert e in triangle_edges(a) and e in triangle_edges(b)


def test_common_triangle_and_shared_vertex():
    assert common_triangle((1, 0, 0), (6, 0, 0)) == (1, 0, 0)
    assert common_triangle((1, 0, 0), (1, 0, 0)) is None
    assert common_triangle((1, 0, 0), (5, 3, 3)) is None
    assert shared_vertex((1, 0, 0), (3, 0, 0)) == ("w", 0, 0)
    with pytest.raises(GeometryError):
        shared_vertex((3, 0, 0), (3, 5, 5))


def horizontal_line():
    return path_from_polyline([(F(0), F(1, 2)), (F(1), F(1, 2))], (1, 0))


def test_horizontal_line_crosses_one_delta_arc_left_to_right():
    path = horizontal_line()
    deltas = [t for t in range(len(path)) if path.edge_at(t)[0] == 1]
    assert len(deltas) == 1
    assert delta_sign(path, deltas[0]) == 1
    assert winding_number(path) == 1


def test_vertical_line_crosses_one_delta_arc_right_to_left():
    path = path_from_polyline([(F(1, 2), F(0)), (F(1, 2), F(1))], (0, 1))
    assert [path.edge_at(t) for t in range(len(path)) if path.edge_at(t)[0] == 1] == [(1, 0, 0)]
    assert winding_number(path) == -1


def test_polyline_rejects_punctures():
    with pytest.raises(GeometryError):
        polyline_crossings([(F(0), F(0)), (F(1, 2), F(3, 4))])
    with pytest.raises(GeometryError):
        path_from_polyline([(F(0), F(1, 2)), (F(1), F(1, 2))], (0, 1))


def test_tighten_removes_backtracks():
    path = horizontal_line()
    e = path.edges[0]
    f = path.edges[1]
    padded = EdgePath(path.edges[:1] + (f, f) + path.edges[1:], path.period)
    assert padded.tighten() == path
    with pytest.raises(GeometryError):
        EdgePath((e, e), (0, 0)).tighten()


def test_edge_at_is_periodic():
    path = horizontal_line()
    n = len(path)
    for t in range(-2 * n, 2 * n):
        a, b = path.edge_at(t), path.edge_at(t + n)
        assert (b[0], b[1] - a[1], b[2] - a[2]) == (a[0], 1, 0)


def test_polygon_helpers():
    square = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
    assert signed_area(square) == 1
    assert signed_area(square[::-1]) == -1
    assert point_in_polygon((F(1, 2), F(1, 2)), square) == 1
    assert point_in_polygon((F(1, 2), F(1, 2)), square[::-1]) == -1
    assert point_in_polygon((F(2), F(1, 2)), square) == 0


def test_strand_order_is_antisymmetric_and_total():
    beta = pattern_beta(0, 2)
    by_edge = {}
    for t in range(-len(beta), 2 * len(beta)):
        by_edge.setdefault(beta.edge_at(t), []).append(t)
    checked = 0
    for e, ts in by_edge.items():
        if len(ts) < 2:
            continue
        for x in ts:
            for y in ts:
                if x != y:
                    assert compare_strands(beta, x, beta, y) == -compare_strands(beta, y, beta, x) != 0
                    checked += 1
        order = order_strands([(beta, t) for t in ts])
        ranked = [ts[i] for i in order]
        assert all(compare_strands(beta, a, beta, b) == -1 for a, b in zip(ranked, ranked[1:]))
    assert checked > 0
