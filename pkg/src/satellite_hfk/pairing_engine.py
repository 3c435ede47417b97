"""
Pairing of lifted companion curves with a lifted pattern curve.

The lifted pattern curve is drawn first: its strands on every edge are
ordered so that it stays embedded.  Each companion lift is then slotted
between the pattern strands edge by edge; the slotting minimising the
number of crossings is found by dynamic programming along the companion
word, which puts the pair in minimal position (no empty bigons).

Generators are the crossings between one companion lift and the pattern
lift.  Differentials count embedded bigons: the bounding loop runs along
the pattern curve from the source to the target and back along the
companion curve, is simple, turns left at both corners and runs
counterclockwise.  Puncture counts, Alexander differences and the
orientation of the loop all come from signed edge-crossing sums along the
two curves, so no polygon is ever rasterised.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cmp_to_key
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .alpha_curve import companion_curve
from .cfk_core import (
    BigradedComplex,
    CompanionSpec,
    Generator,
    Arrow,
    Monomial,
    _vertical_cycle,
    check_complex,
)
from .torus_geometry import (
    Edge,
    EdgePath,
    GeometryError,
    Point,
    compare_strands,
    delta_sign,
    edge_points,
    edge_vertices,
    order_strands,
    ray_sign,
    segment_intersection,
    signed_area,
    triangle_vertices,
)


class PairingError(Exception):
    """Raised when the pairing pipeline detects an inconsistency."""


class SymmetryError(PairingError):
    """Raised when no Alexander shift makes the ranks symmetric."""


# ---------------------------------------------------------------------------
# curve windows


@dataclass(frozen=True)
class CurveWindow:
    """A finite stretch (or, for closed curves, one full period) of a word.

    :param key: identifier of the lift, e.g. ``("essential", 0)``
    """

    key: Tuple
    path: EdgePath
    lo: int
    hi: int

    @property
    def closed(self) -> bool:
        return self.path.closed

    def indices(self) -> range:
        if self.closed:
            return range(len(self.path))
        return range(self.lo, self.hi + 1)

    def segments(self) -> range:
        """Indices ``t`` whose segment ``t -> t+1`` lies in the window."""
        if self.closed:
            return range(len(self.path))
        return range(self.lo, self.hi)

    def norm(self, t: int) -> int:
        return t % len(self.path) if self.closed else t


def index_window(path: EdgePath, box: Tuple[int, int, int, int], margin: int = 1) -> Tuple[int, int]:
    """Smallest index range covering every crossing of ``path`` inside ``box``.

    ``box`` is ``(k_min, k_max, l_min, l_max)`` in cell coordinates; the range
    is widened by ``margin`` periods on each side.
    """
    L = len(path)
    px, py = path.period
    if path.closed:
        return 0, L - 1
    k0, k1, l0, l1 = box
    if px:
        qmax = (k1 - k0 + 4) // abs(px) + 4
    else:
        qmax = (l1 - l0 + 4) // abs(py) + 4
    # shift to a period near the box
    ref = path.edges[0]
    if px:
        q0 = (k0 - ref[1]) // px if px > 0 else (k1 - ref[1]) // px
    else:
        q0 = (l0 - ref[2]) // py if py > 0 else (l1 - ref[2]) // py
    hits = []
    for q in range(q0 - qmax, q0 + qmax + 1):
        for r in range(L):
            t = q * L + r
            e = path.edge_at(t)
            if k0 <= e[1] <= k1 and l0 <= e[2] <= l1:
                hits.append(t)
    if not hits:
        raise PairingError("curve does not meet the requested box")
    return min(hits) - margin * L, max(hits) + margin * L


def window_box(w: CurveWindow) -> Tuple[int, int, int, int]:
    ks = []
    ls = []
    for t in w.indices():
        e = w.path.edge_at(t)
        ks.append(e[1])
        ls.append(e[2])
    return min(ks), max(ks), min(ls), max(ls)


# ---------------------------------------------------------------------------
# layout


def _edge_key(e: Edge, tri) -> Tuple[int, bool]:
    """Position of edge ``e`` on the boundary cycle of triangle ``tri``.

    Returns the side index and whether the edge's own orientation agrees
    with the counterclockwise boundary cycle.
    """
    verts = triangle_vertices(tri)
    p0, p1 = edge_vertices(e)
    for idx in range(3):
        a, b = verts[idx], verts[(idx + 1) % 3]
        if (p0, p1) == (a, b):
            return idx, True
        if (p0, p1) == (b, a):
            return idx, False
    raise GeometryError(f"edge {e} is not a side of {tri}")


_BIG = 10 ** 9


def _boundary_key(e: Edge, tri, value: int, count: int) -> int:
    """Cyclic key of a point on ``e``; ``value`` runs over ``0 .. 2*count``."""
    side, forward = _edge_key(e, tri)
    return side * _BIG + (value if forward else 2 * count - value)


def _separates(p: int, q: int, chord: Tuple[int, int]) -> bool:
    lo, hi = (p, q) if p < q else (q, p)
    return (lo < chord[0] < hi) != (lo < chord[1] < hi)


class StrandLayout:
    """Exact drawing of one pattern window together with companion windows.

    :param mode: ``"minimal"`` slots each companion strand to minimise
        crossings; ``"raw"`` puts every companion strand in the middle slot
    """

    def __init__(self, beta: CurveWindow, alphas: Sequence[CurveWindow], mode: str = "minimal"):
        if mode not in ("minimal", "raw"):
            raise ValueError("mode must be 'minimal' or 'raw'")
        self.beta = beta
        self.alphas = list(alphas)
        self.mode = mode
        self._windows = {w.key: w for w in self.alphas}
        self._float_cache: Dict[Tuple, Tuple[float, float]] = {}
        self._order_beta()
        self.slots: Dict[Tuple, Dict[int, int]] = {}
        self.crossings: Dict[Tuple, int] = {}
        for w in self.alphas:
            self.slots[w.key], self.crossings[w.key] = self._slot(w)
        self._place()

    # pattern strands ------------------------------------------------------
    def _order_beta(self):
        by_edge: Dict[Edge, List[int]] = {}
        for t in self.beta.indices():
            by_edge.setdefault(self.beta.path.edge_at(t), []).append(t)
        self.beta_rank: Dict[int, int] = {}
        self.beta_on_edge: Dict[Edge, List[int]] = {}
        path, period = self.beta.path, len(self.beta.path)
        # the order of two strands is unchanged by a common shift of one period
        memo: Dict[Tuple[int, int], int] = {}

        def cmp(ta: int, tb: int) -> int:
            q = ta // period
            key = (ta - q * period, tb - q * period)
            if key not in memo:
                memo[key] = compare_strands(path, ta, path, tb)
            r = memo[key]
            if r == 0:
                return -1 if ta < tb else 1
            return r

        for e, ts in by_edge.items():
            ranked = sorted(ts, key=cmp_to_key(cmp))
            self.beta_on_edge[e] = ranked
            for r, t in enumerate(ranked):
                self.beta_rank[t] = r
        # chords of the pattern in each triangle, as (t, edge_in, rank_in, edge_out, rank_out)
        self.beta_chords: Dict[tuple, List[Tuple[int, int]]] = {}
        self.beta_endpoint_chord: Dict[Tuple[tuple, Edge, int], Tuple[int, int]] = {}
        for t in self.beta.segments():
            tri = self.beta.path.triangle_between(t)
            e0, e1 = self.beta.path.edge_at(t), self.beta.path.edge_at(t + 1)
            if t + 1 not in self.beta_rank:
                continue
            r0, r1 = self.beta_rank[t], self.beta_rank[t + 1]
            n0, n1 = len(self.beta_on_edge[e0]), len(self.beta_on_edge[e1])
            chord = (_boundary_key(e0, tri, 2 * r0 + 1, n0), _boundary_key(e1, tri, 2 * r1 + 1, n1))
            self.beta_chords.setdefault(tri, []).append(chord)
            self.beta_endpoint_chord[(tri, e0, r0)] = chord
            self.beta_endpoint_chord[(tri, e1, r1)] = chord

    def beta_count(self, e: Edge) -> int:
        return len(self.beta_on_edge.get(e, ()))

    # companion slotting ---------------------------------------------------
    def _cost_matrix(self, tri, e_in: Edge, e_out: Edge) -> List[List[int]]:
        n_in, n_out = self.beta_count(e_in), self.beta_count(e_out)
        chords = self.beta_chords.get(tri, [])
        out_keys = [_boundary_key(e_out, tri, 2 * s, n_out) for s in range(n_out + 1)]
        mat = []
        for s_in in range(n_in + 1):
            p = _boundary_key(e_in, tri, 2 * s_in, n_in)
            cost = sum(1 for ch in chords if _separates(p, out_keys[0], ch))
            row = [cost]
            for s in range(n_out):
                ch = self.beta_endpoint_chord.get((tri, e_out, s))
                if ch is not None:
                    before = _separates(p, out_keys[s], ch)
                    after = _separates(p, out_keys[s + 1], ch)
                    cost += int(after) - int(before)
                row.append(cost)
            mat.append(row)
        return mat

    def _slot(self, w: CurveWindow) -> Tuple[Dict[int, int], int]:
        path = w.path
        idx = list(w.indices())
        edges = [path.edge_at(t) for t in idx]
        counts = [self.beta_count(e) for e in edges]
        if self.mode == "raw":
            slots = {t: c // 2 for t, c in zip(idx, counts)}
            return slots, -1
        steps = len(idx) if w.closed else len(idx) - 1
        mats = []
        for m in range(steps):
            t = idx[m]
            tri = path.triangle_between(t)
            e_next = path.edge_at(t + 1)
            mats.append(self._cost_matrix(tri, edges[m], e_next))

        def run(start_slots: Iterable[int]):
            best = {s: 0 for s in start_slots}
            back = []
            for m in range(steps):
                n_next = counts[(m + 1) % len(idx)] if w.closed else counts[m + 1]
                new = [None] * (n_next + 1)
                arg = [0] * (n_next + 1)
                for s_prev, val in sorted(best.items()):
                    row = mats[m][s_prev]
                    for s in range(n_next + 1):
                        v = val + row[s]
                        if new[s] is None or v < new[s]:
                            new[s] = v
                            arg[s] = s_prev
                back.append(arg)
                best = {s: v for s, v in enumerate(new)}
            return best, back

        if w.closed:
            best_total = None
            for s0 in range(counts[0] + 1):
                best, back = run([s0])
                total = best[s0]
                if best_total is None or total < best_total[0]:
                    best_total = (total, s0, back)
            total, s0, back = best_total
            # back[m] maps a slot at index m + 1 to its best predecessor at m
            tail = []
            s = s0
            for m in range(steps - 1, 0, -1):
                s = back[m][s]
                tail.append(s)
            seq = [s0] + tail[::-1]
            return {t: seq[m] for m, t in enumerate(idx)}, total
        best, back = run(range(counts[0] + 1))
        s = min(best, key=lambda k: (best[k], k))
        total = best[s]
        seq = [s]
        for m in range(steps - 1, -1, -1):
            s = back[m][s]
            seq.append(s)
        seq.reverse()
        return {t: seq[m] for m, t in enumerate(idx)}, total

    # coordinates ------------------------------------------------------------
    def _place(self):
        slotted: Dict[Tuple[Edge, int], List[Tuple[CurveWindow, int]]] = {}
        for w in self.alphas:
            for t, s in self.slots[w.key].items():
                slotted.setdefault((w.path.edge_at(t), s), []).append((w, t))
        self.position: Dict[Tuple, Point] = {}
        edges = set(self.beta_on_edge) | {e for e, _ in slotted}
        for e in edges:
            betas = self.beta_on_edge.get(e, [])
            items: List[Tuple] = []
            for s in range(len(betas) + 1):
                group = slotted.get((e, s), [])
                if group:
                    order = order_strands([(w.path, t) for w, t in group])
                    items.extend((group[i][0].key, group[i][1]) for i in order)
                if s < len(betas):
                    items.append(("beta", betas[s]))
            p0, p1 = edge_points(e)
            n = len(items) + 1
            for r, item in enumerate(items, start=1):
                f = Fraction(r, n)
                self.position[item] = (p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1]))

    def point(self, key: Tuple, t: int) -> Point:
        if key == "beta":
            return self.position[("beta", t)]
        w = self._window(key)
        return self.position[(key, w.norm(t))]

    def float_point(self, key: Tuple, t: int) -> Tuple[float, float]:
        """Floating-point copy of :meth:`point`, cached."""
        k = (key, t)
        if k not in self._float_cache:
            x, y = self.point(key, t)
            self._float_cache[k] = (float(x), float(y))
        return self._float_cache[k]

    def _window(self, key) -> CurveWindow:
        return self._windows[key]

    def segment(self, key: Tuple, t: int) -> Tuple[Point, Point]:
        return self.point(key, t), self.point(key, t + 1)

    def polyline(self, key: Tuple) -> List[Point]:
        if key == "beta":
            return [self.position[("beta", t)] for t in self.beta.indices()]
        w = self._window(key)
        pts = [self.point(key, t) for t in w.indices()]
        if w.closed:
            pts.append(pts[0])
        return pts


# ---------------------------------------------------------------------------
# intersections


@dataclass
class IntersectionPoint:
    """A generator of the paired complex.

    ``alpha_index``/``beta_index`` name the segment (between crossings
    ``t`` and ``t + 1``) carrying the point; ``alpha_t``/``beta_t`` the
    parameter along that segment.
    """

    id: str
    position: Point
    lift: Tuple
    alpha_index: int
    alpha_t: Fraction
    beta_index: int
    beta_t: Fraction
    A: Optional[int] = None
    M: Optional[int] = None


@dataclass(frozen=True)
class Bigon:
    src: str
    dst: str
    w_count: int
    z_count: int

    @property
    def mixed(self) -> bool:
        return self.w_count > 0 and self.z_count > 0

    @property
    def empty(self) -> bool:
        return self.w_count == 0 and self.z_count == 0


def _param(p: Point, a: Point, b: Point) -> Fraction:
    if b[0] != a[0]:
        return (p[0] - a[0]) / (b[0] - a[0])
    return (p[1] - a[1]) / (b[1] - a[1])


def _segment_crossings(layout: StrandLayout, key: Tuple) -> List[Tuple[int, int, Point]]:
    w = layout._window(key)
    beta_by_tri: Dict[tuple, List[int]] = {}
    for t in layout.beta.segments():
        if t + 1 in layout.beta_rank:
            beta_by_tri.setdefault(layout.beta.path.triangle_between(t), []).append(t)
    out = []
    for ta in w.segments():
        tri = w.path.triangle_between(ta)
        a0, a1 = layout.segment(key, ta)
        for tb in beta_by_tri.get(tri, []):
            b0, b1 = layout.segment("beta", tb)
            p = segment_intersection(a0, a1, b0, b1)
            if p is not None:
                out.append((ta, tb, p))
    return out


def _self_crossings(layout: StrandLayout, key: Tuple) -> List[Tuple[Tuple[int, Fraction], Tuple[int, Fraction]]]:
    w = layout._window(key)
    by_tri: Dict[tuple, List[int]] = {}
    for t in w.segments():
        by_tri.setdefault(w.path.triangle_between(t), []).append(t)
    out = []
    for ts in by_tri.values():
        for a, b in itertools.combinations(ts, 2):
            p0, p1 = layout.segment(key, a)
            q0, q1 = layout.segment(key, b)
            p = segment_intersection(p0, p1, q0, q1)
            if p is not None:
                out.append(((a, _param(p, p0, p1)), (b, _param(p, q0, q1))))
    return out


def minimal_intersection_count(alpha: EdgePath, beta: EdgePath) -> int:
    """Geometric intersection number of two tight curves (one lift each)."""
    bw, aw = paired_windows(beta, alpha, margin=2)
    layout = StrandLayout(bw, [aw])
    return len(_segment_crossings(layout, aw.key))


def paired_windows(beta: EdgePath, alpha: EdgePath, margin: int = 2, key=("alpha",)) -> Tuple[CurveWindow, CurveWindow]:
    """Windows of a pattern lift and a companion lift covering their overlap."""
    if alpha.closed:
        aw = CurveWindow(key, alpha, 0, len(alpha) - 1)
        k0, k1, l0, l1 = window_box(aw)
        lo, hi = index_window(beta, (k0 - margin, k1 + margin, l0 - margin, l1 + margin), margin)
        return CurveWindow(("beta",), beta, lo, hi), aw
    if beta.closed:
        raise PairingError("the pattern lift must be the periodic curve")
    # pattern extent across one period, companion stretch over that extent
    probe = CurveWindow(("beta",), beta, 0, len(beta) - 1)
    bk0, bk1, bl0, bl1 = window_box(probe)
    alo, ahi = index_window(alpha, (bk0 - margin, bk1 + margin, -10 ** 6, 10 ** 6), margin)
    aw = CurveWindow(key, alpha, alo, ahi)
    k0, k1, l0, l1 = window_box(aw)
    blo, bhi = index_window(beta, (min(k0, bk0) - margin, max(k1, bk1) + margin, l0 - margin, l1 + margin), margin)
    return CurveWindow(("beta",), beta, blo, bhi), aw


# ---------------------------------------------------------------------------
# the pairing diagram


@dataclass
class PairingDiagram:
    """Lifted curves, their crossings and (once enumerated) bigons."""

    beta: CurveWindow
    lifts: List[CurveWindow]
    layout: StrandLayout
    points: List[IntersectionPoint]
    bigons: List[Bigon] = field(default_factory=list)
    mixed_bigons: List[Bigon] = field(default_factory=list)
    reduced: bool = False
    removed_pairs: int = 0

    def point(self, pid: str) -> IntersectionPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)


def _lift_windows(alpha_lifts: Sequence[Tuple[Tuple, EdgePath]], beta: EdgePath, margin: int):
    windows = []
    beta_lo, beta_hi = None, None
    for key, path in alpha_lifts:
        try:
            bw, aw = paired_windows(beta, path, margin=margin, key=key)
        except PairingError:
            continue
        windows.append(aw)
        beta_lo = bw.lo if beta_lo is None else min(beta_lo, bw.lo)
        beta_hi = bw.hi if beta_hi is None else max(beta_hi, bw.hi)
    if beta_lo is None:
        beta_lo, beta_hi = 0, len(beta) - 1
    return CurveWindow(("beta",), beta, beta_lo, beta_hi), windows


def alpha_lifts_for(multicurve, beta: EdgePath, extra_columns: int = 2) -> List[Tuple[Tuple, EdgePath]]:
    """The companion lifts to pair with one pattern lift.

    The pattern lift is invariant under its vertical period, so one lift of
    the essential component and one translate of each closed component per
    column represent every crossing exactly once.  The closed translates
    follow the period of the essential lift: a vertical shift would move
    their Alexander gradings by a multiple of the winding number relative to
    the essential generators.
    """
    essential = multicurve.essential.path
    step_k, step_l = essential.period
    if step_k != 1:
        raise PairingError("the essential lift must advance one column per period")
    lifts: List[Tuple[Tuple, EdgePath]] = [(("essential", 0), essential)]
    probe = CurveWindow(("beta",), beta, 0, len(beta) - 1)
    k0, k1, _, _ = window_box(probe)
    for ci, comp in enumerate(multicurve.components):
        if comp.essential:
            continue
        ck0, ck1, _, _ = window_box(CurveWindow(("c",), comp.path, 0, len(comp.path) - 1))
        for a in range(k0 - ck1 - extra_columns, k1 - ck0 + extra_columns + 1):
            lifts.append((("closed", ci, a), comp.path.translate(a, a * step_l)))
    return lifts


def intersect(multicurve, beta: EdgePath, margin: int = 2, mode: str = "raw") -> PairingDiagram:
    """Crossings between the companion lifts and one pattern lift.

    ``mode="raw"`` draws every companion strand in the middle slot of each
    edge, which need not be minimal; :func:`reduce_diagram` removes the
    empty bigons.
    """
    if multicurve is None:
        bw = CurveWindow(("beta",), beta, 0, len(beta) - 1)
        return PairingDiagram(bw, [], StrandLayout(bw, []), [])
    bw, windows = _lift_windows(alpha_lifts_for(multicurve, beta), beta, margin)
    layout = StrandLayout(bw, windows, mode=mode)
    points = _collect_points(layout, windows)
    return PairingDiagram(bw, windows, layout, points, reduced=(mode == "minimal"))


def _collect_points(layout: StrandLayout, windows: Sequence[CurveWindow]) -> List[IntersectionPoint]:
    points = []
    for w in windows:
        for ta, tb, p in _segment_crossings(layout, w.key):
            a0, a1 = layout.segment(w.key, ta)
            b0, b1 = layout.segment("beta", tb)
            points.append(IntersectionPoint("", p, w.key, ta, _param(p, a0, a1), tb, _param(p, b0, b1)))
    points.sort(key=lambda q: (q.beta_index, q.beta_t))
    for k, q in enumerate(points):
        q.id = f"g{k}"
    return points


def reduce_diagram(d: PairingDiagram) -> PairingDiagram:
    """Remove all empty bigons by isotoping the companion lifts.

    The isotopy is realised by re-slotting each companion lift so that it
    crosses the pattern lift minimally; each removed empty bigon removes two
    crossings.
    """
    if d.reduced:
        return d
    layout = StrandLayout(d.beta, d.lifts, mode="minimal")
    points = _collect_points(layout, d.lifts)
    removed = len(d.points) - len(points)
    if removed < 0 or removed % 2:
        raise PairingError(f"reduction changed the crossing count by {removed}")
    out = PairingDiagram(d.beta, d.lifts, layout, points, reduced=True, removed_pairs=removed // 2)
    if any(b.empty for b in enumerate_bigons(out, include_empty=True)):
        raise PairingError("empty bigons remain after reduction")
    return out


# ---------------------------------------------------------------------------
# bigons


class _Potentials:
    """Running sums of signed crossing data along one curve window."""

    def __init__(self, w: CurveWindow):
        self.w = w
        idx = list(w.indices())
        self.first = idx[0]
        self.delta = {}
        self.wray = {}
        self.zray = {}
        d = wr = zr = 0
        for t in idx:
            if not (w.closed or t > w.lo):
                # crossing t = lo bounds the first segment; it is never traversed
                self.delta[t], self.wray[t], self.zray[t] = 0, 0, 0
                continue
            d += delta_sign(w.path, t)
            kind, _, s = ray_sign(w.path, t)
            level = w.path.edge_at(t)[2]
            if kind == 3:
                wr += s * level
            elif kind == 4:
                zr += s * level
            self.delta[t], self.wray[t], self.zray[t] = d, wr, zr
        if w.closed:
            # crossing 0 sits at the end of the loop
            self.total = (d, wr, zr)
        else:
            self.total = (0, 0, 0)

    def at(self, seg: int) -> Tuple[int, int, int]:
        t = self.w.norm(seg)
        return self.delta[t], self.wray[t], self.zray[t]

    def arc(self, a: int, b: int, forward: bool) -> Tuple[int, int, int]:
        """Sums over the crossings passed going from segment ``a`` to ``b``."""
        pa, pb = self.at(a), self.at(b)
        diff = tuple(y - x for x, y in zip(pa, pb))
        if not self.w.closed:
            return diff
        a_n, b_n = self.w.norm(a), self.w.norm(b)
        if forward and b_n < a_n:
            diff = tuple(x + y for x, y in zip(diff, self.total))
        if not forward and b_n > a_n:
            diff = tuple(x - y for x, y in zip(diff, self.total))
        return diff


def _direction(seg: Tuple[Point, Point], forward: bool) -> Point:
    a, b = seg
    d = (b[0] - a[0], b[1] - a[1])
    return d if forward else (-d[0], -d[1])


def _turn(d_in: Point, d_out: Point) -> int:
    c = d_in[0] * d_out[1] - d_in[1] * d_out[0]
    if c == 0:
        raise GeometryError("curves are tangent at a corner")
    return 1 if c > 0 else -1


class _LiftData:
    def __init__(self, d: PairingDiagram, w: CurveWindow, beta_pot: "_Potentials"):
        self.d = d
        self.w = w
        self.pot = _Potentials(w)
        self.beta_pot = beta_pot
        self.points = [p for p in d.points if p.lift == w.key]
        if any(w.path.edge_at(t)[0] == 1 for t in w.indices()):
            raise PairingError("companion curves must not cross the delta arcs")
        self.n = len(self.points)
        self.akey = {p.id: (w.norm(p.alpha_index), p.alpha_t) for p in self.points}
        self.bkey = {p.id: (p.beta_index, p.beta_t) for p in self.points}
        a_sorted = sorted(self.points, key=lambda p: self.akey[p.id])
        b_sorted = sorted(self.points, key=lambda p: self.bkey[p.id])
        self.arank = {p.id: r for r, p in enumerate(a_sorted)}
        self.brank = {p.id: r for r, p in enumerate(b_sorted)}
        n = self.n
        self.grid = [[0] * (n + 1) for _ in range(n + 1)]
        for p in self.points:
            self.grid[self.brank[p.id] + 1][self.arank[p.id] + 1] += 1
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                self.grid[i][j] += self.grid[i - 1][j] + self.grid[i][j - 1] - self.grid[i - 1][j - 1]
        self.selfx = [
            ((w.norm(a), ta), (w.norm(b), tb)) for (a, ta), (b, tb) in _self_crossings(d.layout, w.key)
        ]

    def _rect(self, b0: int, b1: int, a0: int, a1: int) -> int:
        """Points with beta rank in [b0, b1] and alpha rank in [a0, a1]."""
        if b0 > b1 or a0 > a1:
            return 0
        g = self.grid
        return g[b1 + 1][a1 + 1] - g[b0][a1 + 1] - g[b1 + 1][a0] + g[b0][a0]

    def alpha_arcs(self, y: IntersectionPoint, x: IntersectionPoint) -> List[bool]:
        """Directions (forward?) of the companion arcs running from ``y`` to ``x``."""
        if self.w.closed:
            return [True, False]
        return [self.akey[x.id] > self.akey[y.id]]

    def _on_alpha_arc(self, key, ky, kx, forward: bool) -> bool:
        if self.w.closed:
            if forward:
                return (ky < key < kx) if ky < kx else (key > ky or key < kx)
            return (kx < key < ky) if kx < ky else (key > kx or key < ky)
        lo, hi = (ky, kx) if ky < kx else (kx, ky)
        return lo < key < hi

    def simple(self, x: IntersectionPoint, y: IntersectionPoint, forward: bool) -> bool:
        bx, by = self.brank[x.id], self.brank[y.id]
        b0, b1 = min(bx, by) + 1, max(bx, by) - 1
        ax, ay = self.arank[x.id], self.arank[y.id]
        if not self.w.closed:
            inside = self._rect(b0, b1, min(ax, ay) + 1, max(ax, ay) - 1)
        elif forward:
            if ay < ax:
                inside = self._rect(b0, b1, ay + 1, ax - 1)
            else:
                inside = self._rect(b0, b1, ay + 1, self.n - 1) + self._rect(b0, b1, 0, ax - 1)
        else:
            if ax < ay:
                inside = self._rect(b0, b1, ax + 1, ay - 1)
            else:
                inside = self._rect(b0, b1, ax + 1, self.n - 1) + self._rect(b0, b1, 0, ay - 1)
        if inside:
            return False
        ky, kx = self.akey[y.id], self.akey[x.id]
        for p1, p2 in self.selfx:
            if self._on_alpha_arc(p1, ky, kx, forward) and self._on_alpha_arc(p2, ky, kx, forward):
                return False
        return True

    def loop_sums(self, x: IntersectionPoint, y: IntersectionPoint, forward: bool) -> Tuple[int, int, int]:
        """(delta, w-winding, z-winding) sums of the loop beta[x->y] + alpha[y->x]."""
        bf = self.bkey[y.id] > self.bkey[x.id]
        db, wb, zb = self.beta_pot.arc(x.beta_index, y.beta_index, bf)
        da, wa, za = self.pot.arc(y.alpha_index, x.alpha_index, forward)
        return db + da, -(wb + wa), -(zb + za)

    def corner_turns(self, x: IntersectionPoint, y: IntersectionPoint, forward: bool) -> Tuple[int, int, Point, Point]:
        lay = self.d.layout
        bf = self.bkey[y.id] > self.bkey[x.id]
        bx = _direction(lay.segment("beta", x.beta_index), bf)
        by = _direction(lay.segment("beta", y.beta_index), bf)
        ax = _direction(lay.segment(self.w.key, x.alpha_index), forward)
        ay = _direction(lay.segment(self.w.key, y.alpha_index), forward)
        return _turn(ax, bx), _turn(by, ay), bx, ax

    def polygon(self, x: IntersectionPoint, y: IntersectionPoint, forward: bool, as_float: bool = False) -> List[Point]:
        lay = self.d.layout
        point = lay.float_point if as_float else lay.point
        conv = (lambda q: (float(q[0]), float(q[1]))) if as_float else (lambda q: q)
        pts = [conv(x.position)]
        bf = self.bkey[y.id] > self.bkey[x.id]
        if bf:
            pts.extend(point("beta", t) for t in range(x.beta_index + 1, y.beta_index + 1))
        else:
            pts.extend(point("beta", t) for t in range(x.beta_index, y.beta_index, -1))
        pts.append(conv(y.position))
        L = len(self.w.path)
        a, b = y.alpha_index, x.alpha_index
        if self.w.closed:
            a, b = self.w.norm(a), self.w.norm(b)
            same = a == b and ((self.akey[x.id] > self.akey[y.id]) == forward)
            if forward:
                steps = (b - a) % L if not same else 0
                if a == b and not same:
                    steps = L
                pts.extend(point(self.w.key, a + k) for k in range(1, steps + 1))
            else:
                steps = (a - b) % L if not same else 0
                if a == b and not same:
                    steps = L
                pts.extend(point(self.w.key, a - k + 1) for k in range(1, steps + 1))
        elif forward:
            pts.extend(point(self.w.key, t) for t in range(a + 1, b + 1))
        else:
            pts.extend(point(self.w.key, t) for t in range(a, b, -1))
        return pts


def _bigon_candidates(d: PairingDiagram, include_empty: bool = False):
    beta_pot = _Potentials(d.beta)
    for w in d.lifts:
        data = _LiftData(d, w, beta_pot)
        for x, y in itertools.combinations(data.points, 2):
            for forward in data.alpha_arcs(y, x):
                if not data.simple(x, y, forward):
                    continue
                dsum, sw, sz = data.loop_sums(x, y, forward)
                if sw > 0 or sz > 0:
                    orient = 1
                elif sw < 0 or sz < 0:
                    orient = -1
                else:
                    area = signed_area(data.polygon(x, y, forward))
                    orient = 1 if area > 0 else -1
                if orient * sw < 0 or orient * sz < 0:
                    raise PairingError(f"loop {x.id}->{y.id} is not embedded")
                tx, ty, _, _ = data.corner_turns(x, y, forward)
                if tx != orient or ty != orient:
                    continue
                if dsum != sz - sw:
                    raise PairingError("delta-arc count disagrees with puncture windings")
                src, dst = (x, y) if orient == 1 else (y, x)
                b = Bigon(src.id, dst.id, abs(sw), abs(sz))
                if b.empty and not include_empty:
                    continue
                yield b


def enumerate_bigons(d: PairingDiagram, include_empty: bool = False) -> List[Bigon]:
    """Embedded bigons with convex corners lying left of the pattern arc."""
    return list(_bigon_candidates(d, include_empty=include_empty))


# ---------------------------------------------------------------------------
# gradings


def _turning_number(poly: Sequence[Point]) -> int:
    """Number of full turns of the tangent along a closed polygon.

    Exterior angles are summed in floating point; the total is a multiple
    of a full turn, so rounding recovers the exact integer.
    """
    pts = []
    for p in poly:
        q = (float(p[0]), float(p[1]))
        if not pts or pts[-1] != q:
            pts.append(q)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    n = len(pts)
    dirs = [(pts[(i + 1) % n][0] - pts[i][0], pts[(i + 1) % n][1] - pts[i][1]) for i in range(n)]
    total = 0.0
    for i in range(n):
        (ax, ay), (bx, by) = dirs[i - 1], dirs[i]
        angle = math.atan2(ax * by - ay * bx, ax * bx + ay * by)
        if abs(angle) > math.pi - 1e-12:
            raise GeometryError("polygon reverses direction")
        total += angle
    turns = round(total / (2 * math.pi))
    if abs(total - 2 * math.pi * turns) > 1e-6:
        raise GeometryError("polygon does not close up")
    return turns


def relative_maslov(data: "_LiftData", x: IntersectionPoint, y: IntersectionPoint, forward: bool) -> int:
    """M(x) - M(y) from the domain bounded by beta[x->y] + alpha[y->x].

    The index of the domain is read off the rotation of the boundary loop:
    twice its turning number, corrected by a quarter turn at each corner
    (``mu = 2T - (s_x + s_y)/2`` with ``s = +1`` for a left turn).  For
    embedded loops this is the usual Euler-measure formula; unlike that
    formula it stays consistent for companion curves that cross themselves.
    """
    poly = data.polygon(x, y, forward, as_float=True)
    _, sw, _ = data.loop_sums(x, y, forward)
    turns = _turning_number(poly)
    sx, sy, _, _ = data.corner_turns(x, y, forward)
    mu2 = 4 * turns - (sx + sy)
    if mu2 % 2:
        raise PairingError("non-integral Maslov index")
    return mu2 // 2 - 2 * sw


def _symmetric_shift(values: Sequence[int]) -> int:
    if not values:
        return 0
    total = min(values) + max(values)
    if total % 2:
        raise SymmetryError("Alexander gradings cannot be centred on an integer")
    shift = -total // 2
    shifted = sorted(v + shift for v in values)
    if shifted != sorted(-v for v in shifted):
        raise SymmetryError(f"Alexander rank profile {shifted} is not symmetric")
    return shift


def assign_gradings(d: PairingDiagram, bigons: Optional[Sequence[Bigon]] = None) -> PairingDiagram:
    """Absolute Alexander and Maslov gradings of every generator.

    Alexander gradings come from signed delta-arc crossings along the
    pattern lift, centred so the rank profile is symmetric.  Maslov
    gradings are relative within each companion lift (computed from the
    connecting domain and checked against every bigon) and pinned so that
    the generator of the vertical homology has grading 0; lifts not
    connected to it keep ``M = None``.
    """
    if bigons is None:
        bigons = enumerate_bigons(d)
    beta_pot = _Potentials(d.beta)
    raw_a = {p.id: -beta_pot.at(p.beta_index)[0] for p in d.points}
    shift = _symmetric_shift(list(raw_a.values()))
    for p in d.points:
        p.A = raw_a[p.id] + shift
    rel_m: Dict[str, Tuple[Tuple, int]] = {}
    for w in d.lifts:
        data = _LiftData(d, w, beta_pot)
        if not data.points:
            continue
        base = data.points[0]
        rel_m[base.id] = (w.key, 0)
        for x in data.points[1:]:
            forward = data.alpha_arcs(base, x)[0]
            rel_m[x.id] = (w.key, relative_maslov(data, x, base, forward))
    by_id = {p.id: p for p in d.points}
    for b in bigons:
        if b.mixed:
            continue
        drop = rel_m[b.src][1] - rel_m[b.dst][1]
        if rel_m[b.src][0] != rel_m[b.dst][0] or drop != 1 - 2 * b.w_count:
            raise PairingError(f"bigon {b.src}->{b.dst} disagrees with domain Maslov gradings")
        if by_id[b.src].A - by_id[b.dst].A != b.z_count - b.w_count:
            raise PairingError(f"bigon {b.src}->{b.dst} disagrees with Alexander gradings")
    for p in d.points:
        p.M = None
    if d.points:
        c = _complex_from(d, bigons, with_maslov=False)
        cycle = _vertical_cycle(c)
        anchor = c.generators[(cycle & -cycle).bit_length() - 1].id
        lift = rel_m[anchor][0]
        offset = -rel_m[anchor][1]
        for p in d.points:
            if rel_m[p.id][0] == lift:
                p.M = rel_m[p.id][1] + offset
        _propagate_by_symmetry(d, rel_m)
    return d


def _propagate_by_symmetry(d: PairingDiagram, rel_m: Dict[str, Tuple[Tuple, int]]):
    """Pin lifts whose mirror image under ``(A, M) -> (-A, M - 2A)`` is pinned.

    A lift mapped onto itself gains no information (the unknown constant
    cancels), so only images inside an already pinned lift are used.
    Repeats until nothing changes.
    """
    by_lift: Dict[Tuple, List[IntersectionPoint]] = {}
    for p in d.points:
        by_lift.setdefault(rel_m[p.id][0], []).append(p)
    changed = True
    while changed:
        changed = False
        pinned = [ps for ps in by_lift.values() if ps[0].M is not None]
        for ps in by_lift.values():
            if ps[0].M is not None:
                continue
            image = sorted((-p.A, rel_m[p.id][1] - 2 * p.A) for p in ps)
            for qs in pinned:
                target = sorted((q.A, q.M) for q in qs)
                if len(target) != len(image) or [a for a, _ in target] != [a for a, _ in image]:
                    continue
                c = target[0][1] - image[0][1]
                if target == sorted((a, m + c) for a, m in image):
                    for p in ps:
                        p.M = rel_m[p.id][1] + c
                    changed = True
                    break


def _complex_from(d: PairingDiagram, bigons: Sequence[Bigon], with_maslov: bool = True, label: str = "") -> BigradedComplex:
    gens = tuple(Generator(p.id, p.A, p.M if with_maslov else None) for p in d.points)
    arrows = []
    for b in bigons:
        if b.mixed or b.empty:
            continue
        coeff = Monomial("U", b.w_count) if b.z_count == 0 else Monomial("V", b.z_count)
        arrows.append(Arrow(b.src, b.dst, coeff))
    return BigradedComplex(gens, tuple(arrows), label)


def pairing_complex(d: PairingDiagram, label: str = "") -> BigradedComplex:
    """Reduce, enumerate bigons, grade, and return the validated complex."""
    d = reduce_diagram(d)
    bigons = enumerate_bigons(d)
    d.bigons = [b for b in bigons if not b.mixed]
    d.mixed_bigons = [b for b in bigons if b.mixed]
    assign_gradings(d, bigons)
    return check_complex(_complex_from(d, bigons, label=label))


# ---------------------------------------------------------------------------
# the satellite pipeline


def satellite_diagram(k: CompanionSpec, i: int, j: int, n: int, margin: int = 2) -> PairingDiagram:
    """Reduced, graded pairing diagram of the companion ``k`` with Q^{i,j}_n."""
    from .beta_curve import pattern_beta

    d = reduce_diagram(intersect(companion_curve(k, n), pattern_beta(i, j), margin=margin))
    bigons = enumerate_bigons(d)
    d.bigons = [b for b in bigons if not b.mixed]
    d.mixed_bigons = [b for b in bigons if b.mixed]
    assign_gradings(d, bigons)
    return d


def _generator_profile(d: PairingDiagram) -> List[Tuple]:
    return sorted((p.lift, d.layout.beta.path.edge_at(p.beta_index)) for p in d.points)


def check_window_stability(
    k: CompanionSpec, i: int, j: int, n: int, margin: int = 2, small: Optional[PairingDiagram] = None
):
    """Compare the reduced generators for two window margins.

    :param small: the reduced diagram at ``margin`` if already computed
    :raises PairingError: if widening the window by one period changes the
        reduced generators
    """
    from .beta_curve import pattern_beta

    beta = pattern_beta(i, j)
    if small is None:
        small = reduce_diagram(intersect(companion_curve(k, n), beta, margin=margin))
    large = reduce_diagram(intersect(companion_curve(k, n), beta, margin=margin + 1))
    if _generator_profile(small) != _generator_profile(large):
        raise PairingError(
            f"window not stable: {len(small.points)} generators at margin {margin}, "
            f"{len(large.points)} at margin {margin + 1}"
        )


def satellite_complex(k: CompanionSpec, i: int, j: int, n: int, check_window: bool = False) -> BigradedComplex:
    """UV = 0 knot complex of the satellite Q^{i,j}_n(K).

    :param check_window: also verify that a wider window gives the same
        generators (:func:`check_window_stability`)
    """
    if i < 0 or j < 1:
        raise PairingError("need i >= 0 and j >= 1")
    if check_window:
        check_window_stability(k, i, j, n)
    d = satellite_diagram(k, i, j, n)
    return diagram_complex(d, label=f"Q^{{{i},{j}}}_{n}({k.name})")


def diagram_complex(d: PairingDiagram, label: str = "") -> BigradedComplex:
    """Validated knot complex of a diagram built by :func:`satellite_diagram`."""
    return check_complex(_complex_from(d, d.bigons + d.mixed_bigons, label=label))


# ---------------------------------------------------------------------------
# drawing


def render_svg(d: PairingDiagram, scale: int = 60) -> str:
    """SVG picture of a graded pairing diagram.

    Shows the pattern lift (blue), the companion lifts (red), the basepoint
    lifts (w filled, z hollow) with their delta arcs, and each generator
    with its id and Alexander grading.  Differentials are drawn as grey
    arrows labelled by their coefficient.  Output is deterministic.
    """
    curves = [("beta", d.layout.polyline("beta"), "#1f4fbf")]
    curves += [(w.key, d.layout.polyline(w.key), "#c0392b") for w in d.lifts]
    xs = [float(p[0]) for _, pts, _ in curves for p in pts] or [0.0]
    ys = [float(p[1]) for _, pts, _ in curves for p in pts] or [0.0]
    x0, x1 = math.floor(min(xs)) - 1, math.ceil(max(xs)) + 1
    y0, y1 = math.floor(min(ys)) - 1, math.ceil(max(ys)) + 1

    def sx(v) -> str:
        return f"{(float(v) - x0) * scale:.2f}"

    def sy(v) -> str:
        return f"{(y1 - float(v)) * scale:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{(x1 - x0) * scale}" height="{(y1 - y0) * scale}" '
        f'font-family="sans-serif" font-size="10">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for k in range(x0, x1):
        for l in range(y0, y1):
            w = (k + 0.25, l + 0.375)
            z = (k + 0.75, l + 0.625)
            out.append(f'<line x1="{sx(w[0])}" y1="{sy(w[1])}" x2="{sx(z[0])}" y2="{sy(z[1])}" stroke="#999" stroke-dasharray="3,2"/>')
            out.append(f'<circle cx="{sx(w[0])}" cy="{sy(w[1])}" r="3" fill="black"/>')
            out.append(f'<circle cx="{sx(z[0])}" cy="{sy(z[1])}" r="3" fill="white" stroke="black"/>')
    for _, pts, colour in curves:
        coords = " ".join(f"{sx(p[0])},{sy(p[1])}" for p in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.2"/>')
    by_id = {p.id: p for p in d.points}
    for b in d.bigons:
        if b.empty:
            continue
        p, q = by_id[b.src].position, by_id[b.dst].position
        coeff = f"U^{b.w_count}" if b.z_count == 0 else f"V^{b.z_count}"
        out.append(f'<line x1="{sx(p[0])}" y1="{sy(p[1])}" x2="{sx(q[0])}" y2="{sy(q[1])}" stroke="#888"/>')
        mx, my = (p[0] + q[0]) / 2, (p[1] + q[1]) / 2
        out.append(f'<text x="{sx(mx)}" y="{sy(my)}" fill="#555">{escape(coeff)}</text>')
    for p in d.points:
        out.append(f'<circle cx="{sx(p.position[0])}" cy="{sy(p.position[1])}" r="2.5" fill="#2e7d32"/>')
        label = p.id if p.A is None else f"{p.id} A={p.A}"
        out.append(f'<text x="{sx(p.position[0])}" y="{sy(p.position[1])}" dx="4" dy="-4">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
