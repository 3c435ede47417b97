"""
Lifted pattern curves of the generalized Mazur patterns Q^{i,j}.

The pattern curve beta lives in the torus with the two basepoints w and z.
Its lift to the punctured plane is recorded, like every curve in this
package, by the word of triangulation edges it crosses.  The curve is
produced from its normal coordinates: the number of times it meets each of
the six edge types of the unit cell.  Inside every triangle the crossings
on the three sides are joined by the unique family of disjoint corner
arcs, and following those arcs from cell to cell traces the curve.

For the pattern with Chen parameters ``(r, s)`` the normal coordinates are::

    edge type   1       2      3        4        5           6
    crossings   2r+s    s+1    2r+2s    2r+2s    2r+3s+1     2r+3s

so the delta arc is met ``2r + s`` times per period, ``s`` of them with
the same sign (the winding number).  The traced curve is connected exactly
when ``gcd(2r - 1, s + 1) = 1``.  Raising the clasp twist count ``i`` by
one adds ``2(j + 1)`` to ``r`` and so adds ``4(j + 1)`` crossings on every
edge type except type 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Tuple

from .alpha_curve import Window, WindowError
from .torus_geometry import (
    W_OFFSET,
    Z_OFFSET,
    Edge,
    EdgePath,
    Point,
    Triangle,
    delta_sign,
    edge_triangles,
    edge_vertices,
    triangle_edges,
)


class BetaCurveError(ValueError):
    """Raised for pattern parameters outside the supported family."""


@dataclass(frozen=True)
class RSParams:
    """Chen's parameters of a (1,1) unknot pattern.

    :param r: rainbow count, at least 1
    :param s: stripe parameter, at least 0
    """

    r: int
    s: int

    def __post_init__(self):
        if self.r < 1 or self.s < 0:
            raise BetaCurveError("need r >= 1 and s >= 0")
        if gcd(2 * self.r - 1, self.s + 1) != 1:
            raise BetaCurveError(f"gcd(2r - 1, s + 1) must be 1 for (r, s) = ({self.r}, {self.s})")


@dataclass(frozen=True)
class PatternParams:
    """Parameters of the pattern Q^{i,j}_n.

    :param i: clasp twists, at least 0
    :param j: winding number, at least 1
    :param n: meridional twists (used only by the companion curve)
    """

    i: int
    j: int
    n: int = 0

    def __post_init__(self):
        if self.i < 0:
            raise BetaCurveError("clasp twist count i must be nonnegative")
        if self.j < 1:
            raise BetaCurveError("winding number j must be at least 1")


def rs_parameters(p: PatternParams) -> RSParams:
    """Chen parameters ``(2 + j + 2(j+1)i, j)`` of Q^{i,j}."""
    r, s = 2 + p.j + 2 * (p.j + 1) * p.i, p.j
    # 2r - 1 = 3 + 2j + 4(j+1)i is 1 modulo j + 1
    assert gcd(2 * r - 1, s + 1) == 1
    return RSParams(r, s)


def pattern_parameters(rs: RSParams) -> PatternParams:
    """Inverse of :func:`rs_parameters`.

    :raises BetaCurveError: if ``(r, s)`` is not of the form
        ``(2 + j + 2(j+1)i, j)``
    """
    j = rs.s
    rest = rs.r - 2 - j
    if j < 1 or rest < 0 or rest % (2 * (j + 1)):
        raise BetaCurveError(f"(r, s) = ({rs.r}, {rs.s}) is not a generalized Mazur pattern")
    return PatternParams(rest // (2 * (j + 1)), j)


def normal_coordinates(rs: RSParams) -> Dict[int, int]:
    """Crossing count of the pattern curve with each edge type."""
    r, s = rs.r, rs.s
    return {1: 2 * r + s, 2: s + 1, 3: 2 * r + 2 * s, 4: 2 * r + 2 * s, 5: 2 * r + 3 * s + 1, 6: 2 * r + 3 * s}


def _check_normal(weights: Dict[int, int]):
    for t in range(1, 4 + 1):
        a, b, c = (weights[e[0]] for e in triangle_edges((t, 0, 0)))
        if (a + b + c) % 2 or a > b + c or b > a + c or c > a + b:
            raise BetaCurveError(f"weights {weights} are not normal coordinates in triangle T{t}")


def _corner_exit(weights: Dict[int, int], tri: Triangle, e: Edge, p: int) -> Tuple[Edge, int]:
    """Follow the corner arc of ``tri`` that enters through point ``p`` of ``e``.

    Points on an edge are numbered from its first vertex.  The arcs cutting
    off the corner at vertex ``v`` use the points of ``e`` nearest ``v``.
    """
    sides = triangle_edges(tri)
    v0, v1 = edge_vertices(e)
    for v, depth in ((v0, p), (v1, weights[e[0]] - 1 - p)):
        f = next(g for g in sides if g != e and v in edge_vertices(g))
        g = next(h for h in sides if h != e and h != f)
        corner = (weights[e[0]] + weights[f[0]] - weights[g[0]]) // 2
        if depth < corner:
            q = depth if edge_vertices(f)[0] == v else weights[f[0]] - 1 - depth
            return f, q
    raise BetaCurveError("weights do not define disjoint arcs")


def trace_normal_curve(weights: Dict[int, int]) -> List[EdgePath]:
    """All components of the normal curve with the given edge-type weights.

    Each component is returned as a lifted edge word with the translation
    carrying one period onto the next (``(0, 0)`` for a closed lift).
    """
    _check_normal(weights)
    unvisited = {(t, p) for t in range(1, 7) for p in range(weights[t])}
    components = []
    while unvisited:
        t, p = min(unvisited)
        start = (t, 0, 0)
        start_tri = edge_triangles(start)[0]
        e, q, tri = start, p, start_tri
        word: List[Edge] = []
        while True:
            word.append(e)
            unvisited.discard((e[0], q))
            e, q = _corner_exit(weights, tri, e, q)
            a, b = edge_triangles(e)
            tri = b if a == tri else a
            if e[0] == t and q == p and tri[0] == start_tri[0]:
                components.append(EdgePath(tuple(word), (e[1] - start[1], e[2] - start[2])))
                break
            if len(word) > 6 * sum(weights.values()):
                raise BetaCurveError("normal curve tracing did not close up")
    return components


@lru_cache(maxsize=None)
def beta_path(rs: RSParams) -> EdgePath:
    """Tight edge word of one lift of the pattern curve, oriented upward.

    :raises BetaCurveError: if the traced curve is disconnected or does
        not close up after one vertical step
    """
    comps = trace_normal_curve(normal_coordinates(rs))
    if len(comps) != 1:
        raise BetaCurveError(f"(r, s) = ({rs.r}, {rs.s}) gives {len(comps)} components")
    path = comps[0]
    if path.period == (0, -1):
        path = EdgePath(tuple(reversed(path.edges)), (0, 1))
    if path.period != (0, 1):
        raise BetaCurveError(f"(r, s) = ({rs.r}, {rs.s}) traces a curve with period {path.period}")
    return path.tighten()


def pattern_beta(i: int, j: int) -> EdgePath:
    """Lifted pattern curve of Q^{i,j}."""
    return beta_path(rs_parameters(PatternParams(i, j)))


# ---------------------------------------------------------------------------
# counts read off the curve


def delta_crossings(path: EdgePath) -> List[int]:
    """Indices within one period where the word crosses a delta arc."""
    return [t for t in range(len(path)) if path.edge_at(t)[0] == 1]


def winding_number(path: EdgePath) -> int:
    """Signed count of delta-arc crossings over one period."""
    return sum(delta_sign(path, t) for t in range(len(path)))


def stripe_count(path: EdgePath) -> int:
    return abs(winding_number(path)) + 1


def rainbow_count(path: EdgePath) -> int:
    """Crossings with the delta arcs that cancel in pairs, halved."""
    extra = len(delta_crossings(path)) - abs(winding_number(path))
    if extra % 2:
        raise BetaCurveError("delta crossings and winding number differ in parity")
    return extra // 2


# ---------------------------------------------------------------------------
# lifts in a window


@dataclass(frozen=True)
class BetaLift:
    """One lift of the pattern curve drawn inside a window.

    :param lo: first word index drawn; ``polyline[k]`` lies on the edge
        ``path.edge_at(lo + k)``
    :param delta_arcs: pairs ``(w, z)`` of puncture positions
    """

    rs: RSParams
    path: EdgePath
    window: Window
    lo: int
    polyline: Tuple[Point, ...]
    w_lifts: Tuple[Point, ...]
    z_lifts: Tuple[Point, ...]
    delta_arcs: Tuple[Tuple[Point, Point], ...]

    @property
    def hi(self) -> int:
        return self.lo + len(self.polyline) - 1


def _puncture(offset: Tuple[Fraction, Fraction], k: int, l: int) -> Point:
    return (k + offset[0], l + offset[1])


def build_beta_lift(rs: RSParams, window: Window) -> BetaLift:
    """Draw the lift of the pattern curve through the window.

    The drawn stretch covers every crossing of the lift with an edge of a
    window cell, plus one period on each side.

    :raises WindowError: if the window is narrower than the horizontal
        extent of one period of the lift
    """
    # imported here: the pairing engine itself depends on this module
    from .pairing_engine import CurveWindow, StrandLayout, index_window, window_box

    path = beta_path(rs)
    k0, k1, _, _ = window_box(CurveWindow(("beta",), path, 0, len(path) - 1))
    if window.columns < k1 - k0 + 1:
        raise WindowError(f"window with {window.columns} columns cannot hold the lift (width {k1 - k0 + 1})")
    shift = window.c_min - k0
    path = path.translate(shift, 0)
    lo, hi = index_window(path, (window.c_min, window.c_max, window.r_min, window.r_max), margin=1)
    cw = CurveWindow(("beta",), path, lo, hi)
    layout = StrandLayout(cw, [])
    cells = [(k, l) for k in range(window.c_min, window.c_max + 1) for l in range(window.r_min, window.r_max + 1)]
    ws = tuple(_puncture(W_OFFSET, k, l) for k, l in cells)
    zs = tuple(_puncture(Z_OFFSET, k, l) for k, l in cells)
    return BetaLift(rs, path, window, lo, tuple(layout.polyline("beta")), ws, zs, tuple(zip(ws, zs)))


def alexander_arc_labels(lift: BetaLift) -> Dict[int, int]:
    """Relative Alexander label of each arc of the drawn lift.

    An arc is a maximal stretch of the lift between two delta-arc
    crossings; it is identified by the word index of the crossing that
    starts it (``lift.lo`` for the first arc).  Labels drop by one across a
    crossing from the left side of a delta arc to its right side, so they
    shift by the winding number over each period.  The first arc is
    labelled 0; absolute gradings are fixed later by symmetry.
    """
    labels = {lift.lo: 0}
    current = 0
    for t in range(lift.lo + 1, lift.hi + 1):
        sign = delta_sign(lift.path, t)
        if sign:
            current -= sign
            labels[t] = current
    return labels
