import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvem.mesh import (MeshError, gen_degenerate_strip, gen_nonconvex_strip,
                        gen_triangle6_perturbed, gen_triangle6_structured, is_simple,
                        mesh_io_read, mesh_io_write, polygon_geometry, rect_predicates,
                        single_element_mesh, six_noded_triangle, validate)
from shvem.quadrature import signed_area


def _invariants(m):
    validate(m)
    for e in range(m.n_elements):
        xy = m.coords(e)
        assert signed_area(xy) > 0
        assert is_simple(xy)
    # every node is used
    assert set(m.elements.ravel().tolist()) == set(range(m.n_nodes))


def _reflex_count(xy):
    n = len(xy)
    c = 0
    for i in range(n):
        a, b, d = xy[i - 1], xy[i], xy[(i + 1) % n]
        cross = (b[0] - a[0]) * (d[1] - b[1]) - (b[1] - a[1]) * (d[0] - b[0])
        c += cross < -1e-12
    return c


def _min_aspect(m):
    out = []
    for e in range(m.n_elements):
        g = m.geometry(e)
        out.append(g.area / g.diameter ** 2)
    return min(out)


def test_single_cell_diagonal_counts():
    m = gen_triangle6_structured(1, 1, split="diagonal")
    assert m.n_elements == 2
    # 4 corners, 4 side midpoints, 1 diagonal midpoint
    assert m.n_nodes == 9


def test_cross_counts():
    m = gen_triangle6_structured(2, 1, ((0, 2), (0, 1)), split="cross")
    assert m.n_elements == 8


@given(st.integers(1, 5), st.integers(1, 5), st.sampled_from(["diagonal", "cross"]),
       st.sampled_from(["up", "down"]))
def test_structured_invariants(nx, ny, split, diag):
    m = gen_triangle6_structured(nx, ny, ((0, 3), (-1, 1)), split, diag)
    _invariants(m)
    assert m.total_area() == pytest.approx(6.0)
    per = 2 if split == "diagonal" else 4
    assert m.n_elements == per * nx * ny
    n_vert = (nx + 1) * (ny + 1) + (nx * ny if split == "cross" else 0)
    n_edges = n_vert + m.n_elements - 1  # Euler, one face
    assert m.n_nodes == n_vert + n_edges


def test_boundary_tags_cover_perimeter():
    m = gen_triangle6_structured(3, 2, ((0, 3), (0, 2)))
    for tag, n_edges in (("left", 4), ("right", 4), ("bottom", 6), ("top", 6)):
        assert len(m.edges_with_tag(tag)) == n_edges
    assert not m.edges_with_tag("free")


def test_perturbed_zero_magnitude_is_identity():
    base = gen_triangle6_structured(3, 3, split="cross")
    assert gen_triangle6_perturbed(base, 0.0, 3) == base


def test_perturbed_deterministic_and_valid():
    base = gen_triangle6_structured(10, 10, split="cross")
    a = gen_triangle6_perturbed(base, 0.2, 1)
    b = gen_triangle6_perturbed(base, 0.2, 1)
    assert a == b
    assert a != base
    _invariants(a)
    # boundary untouched
    bnd = np.unique(np.concatenate([a.nodes_with_tag(t) for t in ("left", "right",
                                                                  "top", "bottom")]))
    np.testing.assert_array_equal(a.nodes[bnd], base.nodes[bnd])


def test_perturbed_rejects_big_magnitude():
    with pytest.raises(MeshError):
        gen_triangle6_perturbed(gen_triangle6_structured(2, 2, split="cross"), 0.7)


def test_degenerate_half_is_cross():
    a = gen_degenerate_strip(4, 2, 8.0, 1.0, 0.5)
    b = gen_triangle6_structured(4, 2, ((0, 8.0), (0, 1.0)), "cross")
    np.testing.assert_allclose(a.nodes, b.nodes, atol=1e-15)
    np.testing.assert_array_equal(a.elements, b.elements)


def test_degenerate_counts_and_aspect():
    assert gen_degenerate_strip(8, 1, 32.0, 1.0, 0.9).n_elements == 32
    aspects = [_min_aspect(gen_degenerate_strip(4, 1, 4.0, 1.0, c)) for c in (0.6, 0.8, 0.95)]
    assert aspects[0] > aspects[1] > aspects[2]


def test_nonconvex_strip():
    flat = gen_nonconvex_strip(6, 2, 6.0, 1.0, 0.0)
    assert all(_reflex_count(flat.coords(e)) == 0 for e in range(flat.n_elements))
    m = gen_nonconvex_strip(6, 2, 6.0, 1.0, 0.3)
    _invariants(m)
    assert any(_reflex_count(m.coords(e)) > 0 for e in range(m.n_elements))
    assert m.total_area() == pytest.approx(6.0)


def test_geometry_regular_hexagon():
    t = np.arange(6) * np.pi / 3
    g = polygon_geometry(np.c_[np.cos(t), np.sin(t)])
    assert g.area == pytest.approx(3 * np.sqrt(3) / 2)
    np.testing.assert_allclose(g.centroid, 0, atol=1e-15)
    assert g.diameter == pytest.approx(2.0)


def test_geometry_right_triangle():
    g = single_element_mesh(six_noded_triangle((0, 0), (1, 0), (0, 1))).geometry(0)
    assert g.area == pytest.approx(0.5)
    np.testing.assert_allclose(g.centroid, [1 / 3, 1 / 3])


def test_io_roundtrip(tmp_path):
    m = gen_triangle6_structured(1, 1)
    p = tmp_path / "m.json"
    mesh_io_write(m, p)
    assert mesh_io_read(p) == m


def _write(tmp_path, data):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    return p


def test_io_rejects_five_node_element(tmp_path):
    data = {"nodes": [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], "elements": [[0, 1, 2, 3, 4]]}
    with pytest.raises(MeshError, match="element arity"):
        mesh_io_read(_write(tmp_path, data))


def test_io_rejects_clockwise(tmp_path):
    xy = six_noded_triangle((0, 0), (0, 1), (1, 0))
    with pytest.raises(MeshError, match="orientation"):
        mesh_io_read(_write(tmp_path, {"nodes": xy.tolist(), "elements": [list(range(6))]}))


def test_io_rejects_dangling_and_garbage(tmp_path):
    xy = six_noded_triangle((0, 0), (1, 0), (0, 1))
    with pytest.raises(MeshError, match="dangling"):
        mesh_io_read(_write(tmp_path, {"nodes": xy.tolist(), "elements": [[0, 1, 2, 3, 4, 9]]}))
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    with pytest.raises(MeshError):
        mesh_io_read(p)


def test_rect_predicates():
    pr = rect_predicates(0, 2, 0, 1)
    assert pr["left"](0, 0.5) and pr["top"](1, 1) and not pr["right"](1.9, 0.5)
