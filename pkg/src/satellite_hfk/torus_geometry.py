"""
Exact combinatorial geometry of curves in the plane punctured at the lifts
of the two basepoints.

Basepoint lifts sit at ``w(k, l) = (k + 1/4, l + 3/8)`` and
``z(k, l) = (k + 3/4, l + 5/8)``.  The punctured plane carries a fixed
Z^2-periodic ideal triangulation whose vertices are the basepoint lifts.
Each unit cell contributes six edges::

    1: w(k,l) - z(k,l)        the delta arc joining w to z
    2: z(k,l) - w(k+1,l)
    3: w(k,l) - w(k,l+1)
    4: z(k,l) - z(k,l+1)
    5: z(k,l) - w(k+1,l+1)
    6: z(k,l) - w(k,l+1)

and four triangles::

    T1(k,l) = w(k,l)  z(k,l)    w(k,l+1)
    T2(k,l) = z(k,l)  w(k,l+1)  z(k,l+1)
    T3(k,l) = z(k,l)  w(k+1,l)  w(k+1,l+1)
    T4(k,l) = z(k,l)  w(k+1,l+1) z(k,l+1)

A curve is recorded by the sequence of edges it crosses (a path in the dual
graph, which is a spine of the punctured plane).  Removing immediate
backtracks gives the unique tight representative of a homotopy class, and
tight words are drawn with straight segments inside triangles, using exact
rational coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
Edge = Tuple[int, int, int]  # (type, k, l)
Triangle = Tuple[int, int, int]  # (type, k, l)
Vertex = Tuple[str, int, int]  # ("w" | "z", k, l)

W_OFFSET = (Fraction(1, 4), Fraction(3, 8))
Z_OFFSET = (Fraction(3, 4), Fraction(5, 8))

_EDGE_ENDS: Dict[int, Tuple[Tuple[str, int, int], Tuple[str, int, int]]] = {
    1: (("w", 0, 0), ("z", 0, 0)),
    2: (("z", 0, 0), ("w", 1, 0)),
    3: (("w", 0, 0), ("w", 0, 1)),
    4: (("z", 0, 0), ("z", 0, 1)),
    5: (("z", 0, 0), ("w", 1, 1)),
    6: (("z", 0, 0), ("w", 0, 1)),
}

_TRIANGLE_EDGES: Dict[int, Tuple[Tuple[int, int, int], ...]] = {
    1: ((1, 0, 0), (6, 0, 0), (3, 0, 0)),
    2: ((6, 0, 0), (1, 0, 1), (4, 0, 0)),
    3: ((2, 0, 0), (3, 1, 0), (5, 0, 0)),
    4: ((5, 0, 0), (2, 0, 1), (4, 0, 0)),
}

# the two triangles on either side of each edge type, as (type, dk, dl)
_EDGE_TRIANGLES: Dict[int, Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = {
    1: ((1, 0, 0), (2, 0, -1)),
    2: ((3, 0, 0), (4, 0, -1)),
    3: ((1, 0, 0), (3, -1, 0)),
    4: ((2, 0, 0), (4, 0, 0)),
    5: ((3, 0, 0), (4, 0, 0)),
    6: ((1, 0, 0), (2, 0, 0)),
}

_TRIANGLE_VERTICES: Dict[int, Tuple[Tuple[str, int, int], ...]] = {
    1: (("w", 0, 0), ("z", 0, 0), ("w", 0, 1)),
    2: (("z", 0, 0), ("w", 0, 1), ("z", 0, 1)),
    3: (("z", 0, 0), ("w", 1, 0), ("w", 1, 1)),
    4: (("z", 0, 0), ("w", 1, 1), ("z", 0, 1)),
}


class GeometryError(Exception):
    """Raised for degenerate input (curves through punctures, invalid words)."""


def vertex_point(v: Vertex) -> Point:
    kind, k, l = v
    off = W_OFFSET if kind == "w" else Z_OFFSET
    return (k + off[0], l + off[1])


def shift_edge(e: Edge, dk: int, dl: int) -> Edge:
    return (e[0], e[1] + dk, e[2] + dl)


def edge_vertices(e: Edge) -> Tuple[Vertex, Vertex]:
    t, k, l = e
    (a, ak, al), (b, bk, bl) = _EDGE_ENDS[t]
    return (a, k + ak, l + al), (b, k + bk, l + bl)


def edge_points(e: Edge) -> Tuple[Point, Point]:
    v0, v1 = edge_vertices(e)
    return vertex_point(v0), vertex_point(v1)


def edge_triangles(e: Edge) -> Tuple[Triangle, Triangle]:
    t, k, l = e
    (t0, a0, b0), (t1, a1, b1) = _EDGE_TRIANGLES[t]
    return (t0, k + a0, l + b0), (t1, k + a1, l + b1)


def triangle_edges(tri: Triangle) -> Tuple[Edge, Edge, Edge]:
    t, k, l = tri
    return tuple((et, k + dk, l + dl) for et, dk, dl in _TRIANGLE_EDGES[t])  # type: ignore[return-value]


def triangle_vertices(tri: Triangle) -> Tuple[Vertex, Vertex, Vertex]:
    t, k, l = tri
    return tuple((kind, k + dk, l + dl) for kind, dk, dl in _TRIANGLE_VERTICES[t])  # type: ignore[return-value]


def common_triangle(e: Edge, f: Edge) -> Optional[Triangle]:
    """The triangle bordered by both edges, if any."""
    if e == f:
        return None
    te = set(edge_triangles(e))
    for tri in edge_triangles(f):
        if tri in te:
            return tri
    return None


def shared_vertex(e: Edge, f: Edge) -> Vertex:
    common = set(edge_vertices(e)) & set(edge_vertices(f))
    if len(common) != 1:
        raise GeometryError(f"edges {e} and {f} do not share exactly one vertex")
    return common.pop()


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segment_edge_parameter(p: Point, q: Point, e: Edge) -> Optional[Fraction]:
    """Parameter ``t`` in [0, 1) where segment ``pq`` crosses the edge interior."""
    a, b = edge_points(e)
    d1 = cross(a, b, p)
    d2 = cross(a, b, q)
    if d1 == d2:
        return None
    t = d1 / (d1 - d2)
    if not (0 <= t < 1):
        return None
    x = p[0] + t * (q[0] - p[0])
    y = p[1] + t * (q[1] - p[1])
    if b[0] != a[0]:
        u = (x - a[0]) / (b[0] - a[0])
    else:
        u = (y - a[1]) / (b[1] - a[1])
    if u == 0 or u == 1:
        raise GeometryError(f"segment {p}->{q} passes through a puncture")
    if not (0 < u < 1):
        return None
    if d1 == 0 and d2 == 0:
        raise GeometryError(f"segment {p}->{q} runs along edge {e}")
    return t


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def polyline_crossings(points: Sequence[Point]) -> List[Edge]:
    """Edges crossed by an open polyline, in order.

    A vertex lying on an edge counts as one crossing, attributed to the
    segment that starts there; the final vertex is not included.
    """
    out: List[Edge] = []
    for p, q in zip(points[:-1], points[1:]):
        k0 = _floor(min(p[0], q[0])) - 2
        k1 = _floor(max(p[0], q[0])) + 2
        l0 = _floor(min(p[1], q[1])) - 2
        l1 = _floor(max(p[1], q[1])) + 2
        hits: List[Tuple[Fraction, Edge]] = []
        for k in range(k0, k1 + 1):
            for l in range(l0, l1 + 1):
                for t in range(1, 7):
                    e = (t, k, l)
                    par = _segment_edge_parameter(p, q, e)
                    if par is not None:
                        hits.append((par, e))
        hits.sort()
        for i in range(1, len(hits)):
            if hits[i][0] == hits[i - 1][0]:
                raise GeometryError(f"segment {p}->{q} crosses two edges at one point")
        out.extend(e for _, e in hits)
    return out


# ---------------------------------------------------------------------------
# periodic edge words


@dataclass(frozen=True)
class EdgePath:
    """A bi-infinite periodic (or closed, with zero period) edge word.

    ``edges`` lists one period; index ``q * len(edges) + r`` denotes
    ``edges[r]`` translated by ``q * period``.
    """

    edges: Tuple[Edge, ...]
    period: Tuple[int, int]

    def __post_init__(self):
        if not self.edges:
            raise GeometryError("empty edge word")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def closed(self) -> bool:
        return self.period == (0, 0)

    def edge_at(self, index: int) -> Edge:
        q, r = divmod(index, len(self.edges))
        return shift_edge(self.edges[r], q * self.period[0], q * self.period[1])

    def translate(self, dk: int, dl: int) -> "EdgePath":
        return EdgePath(tuple(shift_edge(e, dk, dl) for e in self.edges), self.period)

    def validate(self):
        for i in range(len(self.edges)):
            e, f = self.edge_at(i), self.edge_at(i + 1)
            # an immediate return across the same edge is a backtrack, which
            # tighten() removes
            if e != f and common_triangle(e, f) is None:
                raise GeometryError(f"consecutive edges {e}, {f} share no triangle")

    def tighten(self) -> "EdgePath":
        """Remove backtracks, returning the tight representative."""
        pk, pl = self.period
        stack: List[Edge] = []
        for e in self.edges:
            if stack and stack[-1] == e:
                stack.pop()
            else:
                stack.append(e)
        start = 0
        while len(stack) - start >= 2 and stack[-1] == shift_edge(stack[start], pk, pl):
            stack.pop()
            start += 1
        word = tuple(stack[start:])
        if not word:
            raise GeometryError("curve is null-homotopic in the punctured plane")
        return EdgePath(word, self.period)

    def triangle_between(self, index: int) -> Triangle:
        """Triangle traversed between crossings ``index`` and ``index + 1``."""
        tri = common_triangle(self.edge_at(index), self.edge_at(index + 1))
        if tri is None:
            raise GeometryError("invalid edge word")
        return tri

    def rotate_to_minimum(self) -> "EdgePath":
        """Canonical rotation (lexicographically least shift within a period)."""
        n = len(self.edges)
        best = None
        for s in range(n):
            cand = tuple(self.edge_at(s + i) for i in range(n))
            # normalise the translation so comparisons ignore the lift
            t0 = cand[0]
            norm = tuple((e[0], e[1] - t0[1], e[2] - t0[2]) for e in cand)
            key = (norm, t0)
            if best is None or key < best[0]:
                best = (key, cand)
        return EdgePath(best[1], self.period)


def path_from_polyline(points: Sequence[Point], period: Tuple[int, int]) -> EdgePath:
    """Edge word of a closed polyline (the last point equals the first point
    translated by ``period``)."""
    last = points[-1]
    first = points[0]
    if (last[0] - first[0], last[1] - first[1]) != (period[0], period[1]):
        raise GeometryError("polyline does not close up with the given period")
    word = polyline_crossings(points)
    path = EdgePath(tuple(word), period)
    path.validate()
    return path


# ---------------------------------------------------------------------------
# crossing bookkeeping


def crossing_direction(path: EdgePath, index: int) -> Tuple[Triangle, Triangle]:
    """(triangle before, triangle after) at crossing ``index``."""
    return path.triangle_between(index - 1), path.triangle_between(index)


def delta_sign(path: EdgePath, index: int) -> int:
    """Sign of a crossing with a type-1 edge (a delta arc oriented w -> z).

    +1 when the curve passes from the left side of the arc (triangle T1)
    to its right side (triangle T2), -1 for the reverse, 0 for other edges.
    """
    e = path.edge_at(index)
    if e[0] != 1:
        return 0
    before, _ = crossing_direction(path, index)
    return 1 if before[0] == 1 else -1


def ray_sign(path: EdgePath, index: int) -> Tuple[int, int, int]:
    """Contribution of a crossing to puncture winding numbers.

    Returns ``(kind, column, sign)`` where kind 3 means the crossing lies on
    the vertical line through the w punctures of ``column`` (type-3 edge)
    and kind 4 on the line through the z punctures (type-4 edge).  The sign
    is +1 for a left-to-right crossing.  Other edges give ``(0, 0, 0)``.
    """
    e = path.edge_at(index)
    if e[0] not in (3, 4):
        return (0, 0, 0)
    before, _ = crossing_direction(path, index)
    if e[0] == 3:
        sign = 1 if before[0] == 3 else -1
    else:
        sign = 1 if before[0] == 2 else -1
    return (e[0], e[1], sign)


def compare_strands(a: EdgePath, ia: int, b: EdgePath, ib: int, limit: int = 4000) -> int:
    """Order of two strands crossing the same edge.

    Returns -1 if strand ``a`` (at crossing ``ia``) lies closer to the
    first endpoint of the edge than strand ``b`` (at crossing ``ib``), +1
    otherwise.  The order is read off the first place where the two words
    diverge, searching forward along ``a`` first and then backward; 0 is
    returned for strands that never diverge within ``limit`` steps.
    """
    edge = a.edge_at(ia)
    if b.edge_at(ib) != edge:
        raise GeometryError("strands are not on the same edge")
    same = a.triangle_between(ia) == b.triangle_between(ib)
    for direction in (1, -1):
        step_b = direction if same else -direction
        shared = [edge]
        for k in range(1, limit):
            ea = a.edge_at(ia + direction * k)
            eb = b.edge_at(ib + step_b * k)
            if ea == eb:
                shared.append(ea)
                continue
            last = shared[-1]
            va = shared_vertex(last, ea)
            # strand a is closer to va on `last`; transport back to `edge`
            closer = va
            for m in range(len(shared) - 1, 0, -1):
                cur, prev = shared[m], shared[m - 1]
                pivot = shared_vertex(cur, prev)
                if closer == pivot:
                    closer = pivot
                else:
                    p0, p1 = edge_vertices(prev)
                    closer = p1 if pivot == p0 else p0
            return -1 if closer == edge_vertices(edge)[0] else 1
    return 0


def order_strands(strands: List[Tuple[EdgePath, int]]) -> List[int]:
    """Indices of ``strands`` (all on one edge) sorted from the first endpoint."""

    def cmp(i: int, j: int) -> int:
        if i == j:
            return 0
        (pa, ia), (pb, ib) = strands[i], strands[j]
        r = compare_strands(pa, ia, pb, ib)
        if r == 0:
            return -1 if i < j else 1
        return r

    return sorted(range(len(strands)), key=cmp_to_key(cmp))


def segment_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Optional[Point]:
    """Proper intersection point of two segments, or ``None``."""
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        t = d1 / (d1 - d2)
        return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))
    return None


def point_in_polygon(pt: Point, poly: Sequence[Point]) -> int:
    """Winding number of a closed polygon around a point (exact)."""
    wn = 0
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a[1] <= pt[1]:
            if b[1] > pt[1] and cross(a, b, pt) > 0:
                wn += 1
        elif b[1] <= pt[1] and cross(a, b, pt) < 0:
            wn -= 1
    return wn


def signed_area(poly: Sequence[Point]) -> Fraction:
    s = Fraction(0)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        s += a[0] * b[1] - a[1] * b[0]
    return s / 2


def punctures_near(xmin: Fraction, xmax: Fraction, ymin: Fraction, ymax: Fraction) -> Iterable[Vertex]:
    for k in range(_floor(xmin) - 1, _floor(xmax) + 2):
        for l in range(_floor(ymin) - 1, _floor(ymax) + 2):
            for kind in ("w", "z"):
                v = (kind, k, l)
                p = vertex_point(v)
                if xmin <= p[0] <= xmax and ymin <= p[1] <= ymax:
                    yield v
