"""Six-noded polygonal meshes: data model, generators and JSON interchange.

Every element is stored as the counter-clockwise cycle of its six vertices.
For six-noded triangles this interleaves corners and midside nodes
``(v0, m01, v1, m12, v2, m20)``, so triangles and hexagons share one
representation.  Local edge ``k`` runs from local node ``k`` to ``k+1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .quadrature import polygon_centroid, signed_area


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class ElementGeometry:
    centroid: np.ndarray
    diameter: float
    area: float
    ell0: float


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray                 # (N, 2)
    elements: np.ndarray              # (E, 6)
    boundary: tuple = ()              # ((elem, local_edge, tag), ...)
    _geom: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        nodes.setflags(write=False)
        elements.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "boundary",
                           tuple((int(e), int(k), str(t)) for e, k, t in self.boundary))

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def coords(self, e: int) -> np.ndarray:
        return self.nodes[self.elements[e]]

    def geometry(self, e: int) -> ElementGeometry:
        g = self._geom.get(e)
        if g is None:
            g = polygon_geometry(self.coords(e))
            self._geom[e] = g
        return g

    def edges_with_tag(self, tag: str):
        return [(e, k) for e, k, t in self.boundary if t == tag]

    def nodes_with_tag(self, tag: str) -> np.ndarray:
        ids = set()
        for e, k in self.edges_with_tag(tag):
            conn = self.elements[e]
            ids.add(int(conn[k]))
            ids.add(int(conn[(k + 1) % 6]))
        return np.array(sorted(ids), dtype=np.int64)

    def h_max(self) -> float:
        return max(self.geometry(e).diameter for e in range(self.n_elements))

    def total_area(self) -> float:
        return sum(self.geometry(e).area for e in range(self.n_elements))

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.elements, other.elements)
                and self.boundary == other.boundary)

    __hash__ = None


def polygon_geometry(xy) -> ElementGeometry:
    xy = np.asarray(xy, dtype=float)
    A = signed_area(xy)
    c = polygon_centroid(xy)
    diff = xy[:, None, :] - xy[None, :, :]
    h = float(np.sqrt((diff ** 2).sum(-1)).max())
    ell0 = float(np.hypot(*(xy - c).T).min())
    return ElementGeometry(c, h, A, ell0)


def element_geometry(mesh: Mesh, e: int) -> ElementGeometry:
    return mesh.geometry(e)


# ---------------------------------------------------------------------------
# validation


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def is_simple(xy) -> bool:
    n = len(xy)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_intersect(xy[i], xy[(i + 1) % n], xy[j], xy[(j + 1) % n]):
                return False
    return True


def check_element(mesh: Mesh, e: int):
    conn = mesh.elements[e]
    if len(conn) != 6:
        raise MeshError(f"element {e}: element arity {len(conn)} != 6")
    if len(set(conn.tolist())) != 6:
        raise MeshError(f"element {e}: repeated node index")
    if conn.min() < 0 or conn.max() >= mesh.n_nodes:
        raise MeshError(f"element {e}: dangling node index")
    xy = mesh.nodes[conn]
    if signed_area(xy) <= 0.0:
        raise MeshError(f"element {e}: orientation is not counter-clockwise")
    if not is_simple(xy):
        raise MeshError(f"element {e}: polygon is self-intersecting")


def validate(mesh: Mesh) -> Mesh:
    if not np.all(np.isfinite(mesh.nodes)):
        raise MeshError("non-finite node coordinates")
    if mesh.elements.ndim != 2 or mesh.elements.shape[1] != 6:
        raise MeshError("element arity must be 6")
    for e in range(mesh.n_elements):
        check_element(mesh, e)
    edges = {}
    for e, conn in enumerate(mesh.elements.tolist()):
        for k in range(6):
            a, b = conn[k], conn[(k + 1) % 6]
            if (a, b) in edges:
                raise MeshError(f"element {e}: edge ({a},{b}) has the same orientation twice")
            edges[(a, b)] = (e, k)
    for e, k, _ in mesh.boundary:
        conn = mesh.elements[e]
        a, b = int(conn[k]), int(conn[(k + 1) % 6])
        if (b, a) in edges:
            raise MeshError(f"element {e}: tagged edge {k} is interior")
    return mesh


def boundary_edges(elements) -> list:
    """(element, local edge) pairs whose reverse edge belongs to no element."""
    elements = np.asarray(elements)
    directed = set()
    for conn in elements.tolist():
        for k in range(6):
            directed.add((conn[k], conn[(k + 1) % 6]))
    out = []
    for e, conn in enumerate(elements.tolist()):
        for k in range(6):
            a, b = conn[k], conn[(k + 1) % 6]
            if (b, a) not in directed:
                out.append((e, k))
    return out


def tag_boundary(nodes, elements, predicates: Mapping[str, Callable]) -> tuple:
    """Tag boundary edges with the first predicate accepting the edge midpoint.

    Predicates receive ``(x, y)`` of the segment midpoint.  Untagged boundary
    edges get the tag ``"free"``.
    """
    nodes = np.asarray(nodes)
    tags = []
    for e, k in boundary_edges(elements):
        a = nodes[elements[e][k]]
        b = nodes[elements[e][(k + 1) % 6]]
        mx, my = 0.5 * (a + b)
        tag = "free"
        for name, pred in predicates.items():
            if pred(mx, my):
                tag = name
                break
        tags.append((e, k, tag))
    return tuple(tags)


def retag(mesh: Mesh, predicates: Mapping[str, Callable]) -> Mesh:
    return Mesh(mesh.nodes, mesh.elements,
                tag_boundary(mesh.nodes, mesh.elements, predicates))


def rect_predicates(x0, x1, y0, y1, tol=1e-9):
    s = tol * max(x1 - x0, y1 - y0)
    return {
        "left": lambda x, y: abs(x - x0) < s,
        "right": lambda x, y: abs(x - x1) < s,
        "bottom": lambda x, y: abs(y - y0) < s,
        "top": lambda x, y: abs(y - y1) < s,
    }


# ---------------------------------------------------------------------------
# generators


class _NodePool:
    """Deduplicates nodes created from parametric keys."""

    def __init__(self, mapping):
        self.mapping = mapping
        self.index = {}
        self.coords = []

    def get(self, key):
        # keys are exact rationals scaled to integers
        i = self.index.get(key)
        if i is None:
            i = len(self.coords)
            self.index[key] = i
            self.coords.append(self.mapping(key))
        return i


def _six_noded_triangle(pool, a, b, c):
    """Connectivity of a six-noded triangle from three integer parameter keys."""
    mid = lambda p, q: ((p[0] + q[0]) // 2, (p[1] + q[1]) // 2)
    return [pool.get(a), pool.get(mid(a, b)), pool.get(b),
            pool.get(mid(b, c)), pool.get(c), pool.get(mid(c, a))]


def _structured_tris(nx, ny, split, mapping, diagonal="up", center=None):
    """Build six-noded triangles on an nx-by-ny grid of parameter cells.

    Parameter coordinates use an integer lattice with spacing 4 per cell so
    that midside points and centre points have exact integer keys.  The
    ``mapping`` receives ``(i/4nx, j/4ny)`` in the unit square.
    """
    R = 4
    pool = _NodePool(lambda k: mapping(k[0] / (R * nx), k[1] / (R * ny)))
    elems = []
    for j in range(ny):
        for i in range(nx):
            p00 = (R * i, R * j)
            p10 = (R * (i + 1), R * j)
            p11 = (R * (i + 1), R * (j + 1))
            p01 = (R * i, R * (j + 1))
            if split == "diagonal":
                if diagonal == "up":
                    elems.append(_six_noded_triangle(pool, p00, p10, p11))
                    elems.append(_six_noded_triangle(pool, p00, p11, p01))
                else:
                    elems.append(_six_noded_triangle(pool, p00, p10, p01))
                    elems.append(_six_noded_triangle(pool, p10, p11, p01))
            elif split == "cross":
                pc = (R * i + R // 2, R * j + R // 2)
                elems.append(_six_noded_triangle(pool, p00, p10, pc))
                elems.append(_six_noded_triangle(pool, p10, p11, pc))
                elems.append(_six_noded_triangle(pool, p11, p01, pc))
                elems.append(_six_noded_triangle(pool, p01, p00, pc))
            else:
                raise ValueError(f"unknown split {split!r}")
    return np.array(pool.coords), np.array(elems, dtype=np.int64), pool


def rectangle_map(domain):
    (x0, x1), (y0, y1) = domain
    if not (x1 > x0 and y1 > y0):
        raise MeshError("degenerate domain")
    return lambda s, t: (x0 + (x1 - x0) * s, y0 + (y1 - y0) * t)


def gen_triangle6_structured(nx: int, ny: int, domain=((0.0, 1.0), (0.0, 1.0)),
                             split: str = "diagonal", diagonal: str = "up",
                             predicates=None) -> Mesh:
    """Six-noded triangles on a rectangle.

    ``split="diagonal"`` cuts every cell into two right triangles (``diagonal``
    chooses the lower-left to upper-right cut, ``"up"``, or the other one,
    ``"down"``); ``split="cross"`` cuts along both diagonals.
    """
    if nx < 1 or ny < 1:
        raise MeshError("nx and ny must be >= 1")
    mapping = rectangle_map(domain)
    nodes, elems, _ = _structured_tris(nx, ny, split, mapping, diagonal)
    (x0, x1), (y0, y1) = domain
    preds = rect_predicates(x0, x1, y0, y1) if predicates is None else predicates
    return Mesh(nodes, elems, tag_boundary(nodes, elems, preds))


def gen_mapped(nx: int, ny: int, mapping, predicates, split="diagonal",
               diagonal="up") -> Mesh:
    """Six-noded elements on the image of the unit square under ``mapping``.

    Every node, midside nodes included, is the image of its parameter point,
    so curved boundaries are followed to third order.  Elements on a curved
    map are hexagons with nearly straight sides.
    """
    nodes, elems, _ = _structured_tris(nx, ny, split, mapping, diagonal)
    return validate(Mesh(nodes, elems, tag_boundary(nodes, elems, predicates)))


def _interior_free_nodes(mesh: Mesh, candidates) -> np.ndarray:
    on_boundary = set()
    for e, k in boundary_edges(mesh.elements):
        conn = mesh.elements[e]
        on_boundary.add(int(conn[k]))
        on_boundary.add(int(conn[(k + 1) % 6]))
    return np.array([i for i in candidates if i not in on_boundary], dtype=np.int64)


def _centre_nodes(mesh: Mesh):
    """Nodes shared by four corner slots of cross-split cells (quad centres)."""
    corners = mesh.elements[:, 0::2]
    counts = np.bincount(corners.ravel(), minlength=mesh.n_nodes)
    # boundary grid vertices can also be corners of 4 elements; drop them
    cand = [i for i in range(mesh.n_nodes) if counts[i] == 4]
    return _interior_free_nodes(mesh, cand).tolist()


def gen_triangle6_perturbed(base: Mesh, magnitude: float, seed: int = 0,
                            movable=None, max_tries: int = 50) -> Mesh:
    """Randomly displace interior vertices of a six-noded triangle mesh.

    By default the movable vertices are the cell centres of a cross-split
    mesh.  Each moved vertex is shifted by a uniform offset in
    ``[-magnitude, magnitude] * h_local`` per coordinate, and the midside
    nodes of its incident edges are re-centred so elements stay straight
    sided.  Boundary nodes never move.
    """
    if not 0.0 <= magnitude < 0.5:
        raise MeshError("magnitude must lie in [0, 0.5)")
    if magnitude == 0.0:
        return base
    rng = np.random.default_rng(seed)
    cand = _centre_nodes(base) if movable is None else list(movable)
    free = _interior_free_nodes(base, cand)
    # local size: smallest diameter among elements touching the vertex
    hloc = np.full(base.n_nodes, np.inf)
    for e in range(base.n_elements):
        h = base.geometry(e).diameter
        conn = base.elements[e]
        hloc[conn] = np.minimum(hloc[conn], h)
    nodes = base.nodes.copy()
    elems = base.elements
    for i in free:
        for attempt in range(max_tries):
            trial = nodes.copy()
            trial[i] = base.nodes[i] + (rng.uniform(-1.0, 1.0, 2) * magnitude * hloc[i])
            _recentre_midsides(trial, elems, i)
            touched = np.nonzero((elems == i).any(axis=1))[0]
            if all(signed_area(trial[elems[e]]) > 0 and is_simple(trial[elems[e]])
                   for e in touched):
                nodes = trial
                break
        else:
            raise MeshError(f"could not perturb node {i} without tangling")
    mesh = Mesh(nodes, elems, base.boundary)
    return validate(mesh)


def _recentre_midsides(nodes, elems, vertex):
    for conn in elems:
        for k in (0, 2, 4):
            a, m, b = conn[k], conn[k + 1], conn[(k + 2) % 6]
            if vertex in (a, b):
                nodes[m] = 0.5 * (nodes[a] + nodes[b])


def gen_degenerate_strip(M: int, N: int, length: float, height: float,
                         collapse: float = 0.95) -> Mesh:
    """Cross-split strip whose cell centres sit at ``collapse`` of the cell height.

    ``collapse=0.5`` is the ordinary cross split; as ``collapse`` approaches 1
    the top triangle of each cell degenerates into a sliver.
    """
    if not 0.0 < collapse < 1.0:
        raise MeshError("collapse must lie in (0, 1)")
    base = gen_triangle6_structured(M, N, ((0.0, length), (0.0, height)), "cross")
    hy = height / N
    nodes = base.nodes.copy()
    for i in _centre_nodes(base):
        j = np.floor(nodes[i, 1] / hy)
        nodes[i, 1] = (j + collapse) * hy
    elems = base.elements
    for i in _centre_nodes(base):
        _recentre_midsides(nodes, elems, i)
    mesh = Mesh(nodes, elems, base.boundary)
    validate(mesh)
    if min(mesh.geometry(e).area for e in range(mesh.n_elements)) <= 0.0:
        raise MeshError("collapse produced a zero-area element")
    return mesh


def gen_nonconvex_strip(M: int, N: int, length: float, height: float,
                        distortion: float = 0.3) -> Mesh:
    """Strip of hexagons built on an M-by-N grid of cells.

    Each cell is the hexagon (bottom-left, bottom-right, right-mid, top-right,
    top-left, left-mid).  Mid nodes on interior vertical lines are pushed
    horizontally by ``distortion * cell width`` with alternating sign, which
    makes every other column of cells nonconvex and its neighbours convex.
    """
    if not 0.0 <= distortion < 0.5:
        raise MeshError("distortion must lie in [0, 0.5)")
    if M < 1 or N < 1:
        raise MeshError("M and N must be >= 1")
    hx, hy = length / M, height / N
    corner = lambda i, j: i * (N + 1) + j
    n_corner = (M + 1) * (N + 1)
    coords = [(i * hx, j * hy) for i in range(M + 1) for j in range(N + 1)]
    mid = lambda i, j: n_corner + i * N + j   # mid node on vertical line i, row j
    for i in range(M + 1):
        shift = 0.0
        if 0 < i < M:
            shift = distortion * hx * (1.0 if i % 2 else -1.0)
        for j in range(N):
            coords.append((i * hx + shift, (j + 0.5) * hy))
    elems = []
    for j in range(N):
        for i in range(M):
            elems.append([corner(i, j), corner(i + 1, j), mid(i + 1, j),
                          corner(i + 1, j + 1), corner(i, j + 1), mid(i, j)])
    nodes = np.array(coords)
    elems = np.array(elems, dtype=np.int64)
    preds = rect_predicates(0.0, length, 0.0, height)
    return validate(Mesh(nodes, elems, tag_boundary(nodes, elems, preds)))


def single_element_mesh(xy) -> Mesh:
    xy = np.asarray(xy, dtype=float)
    elems = np.arange(6, dtype=np.int64)[None, :]
    return validate(Mesh(xy, elems, tag_boundary(xy, elems, {})))


def six_noded_triangle(a, b, c) -> np.ndarray:
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    return np.array([a, 0.5 * (a + b), b, 0.5 * (b + c), c, 0.5 * (c + a)])


# ---------------------------------------------------------------------------
# JSON interchange


def mesh_to_dict(mesh: Mesh) -> dict:
    return {
        "nodes": mesh.nodes.tolist(),
        "elements": mesh.elements.tolist(),
        "boundary": [[e, k, t] for e, k, t in mesh.boundary],
    }


def mesh_from_dict(data: dict) -> Mesh:
    try:
        nodes = np.asarray(data["nodes"], dtype=float)
        raw = data["elements"]
        boundary = data.get("boundary", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshError(f"malformed mesh file: {exc}") from exc
    if nodes.ndim != 2 or nodes.shape[1] != 2:
        raise MeshError("malformed mesh file: nodes must be [[x, y], ...]")
    for e, conn in enumerate(raw):
        if len(conn) != 6:
            raise MeshError(f"element {e}: element arity {len(conn)} != 6")
        for i in conn:
            if not (0 <= int(i) < len(nodes)):
                raise MeshError(f"element {e}: dangling node index {i}")
    elems = np.asarray(raw, dtype=np.int64).reshape(-1, 6)
    for item in boundary:
        if len(item) != 3 or not (0 <= int(item[0]) < len(elems)) or not (0 <= int(item[1]) < 6):
            raise MeshError(f"malformed boundary entry {item!r}")
    return validate(Mesh(nodes, elems, tuple(tuple(b) for b in boundary)))


def mesh_io_write(mesh: Mesh, path) -> None:
    with open(path, "w") as fh:
        json.dump(mesh_to_dict(mesh), fh, indent=1)


def mesh_io_read(path) -> Mesh:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MeshError(f"malformed mesh file: {exc}") from exc
    return mesh_from_dict(data)
