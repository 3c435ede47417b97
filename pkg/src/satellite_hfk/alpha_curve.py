"""
Immersed curve of an n-framed companion complement.

The companion complex (one staircase plus boxes) is turned into a reduced
type D structure over the torus algebra, and that structure is drawn as an
immersed multicurve in the plane punctured at the basepoint lifts.

Placement rules.  An idempotent-0 generator sits at ``(c + 1/2, h)`` on the
segment joining ``z(c, h-1)`` to ``w(c, h)``; an idempotent-1 generator sits
at ``(c, h + 1/2)`` on the segment joining ``z(c-1, h)`` to ``w(c, h)``.
Each labelled edge is drawn as a short polyline whose displacement from
source to target is

======== ===================  =================================
label    displacement         route
======== ===================  =================================
rho1     (+1/2, -1/2)         right along y = h, then down
rho123   (+1/2, +1/2)         right along y = h, then up
rho3     (-1/2, +1/2)         left along y = h, then up
rho2     (+1/2, +1/2)         up to y = h, then right
rho23    (0, +1)              straight up the corridor x = c
rho12    (+1, 0)              straight across along y = h
======== ===================  =================================

so vertical chains run on the right of the basepoint column, horizontal
chains on the left, and an idempotent-0 generator sits at height equal to
its Alexander grading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .cfk_core import CompanionSpec, decompose_staircase_boxes
from .torus_geometry import EdgePath, Point, path_from_polyline

LABELS = ("1", "2", "3", "12", "23", "123")

HALF = Fraction(1, 2)
_OUT = Fraction(3, 8)  # horizontal reach of the bent routes from the column centre

_DISPLACEMENT: Dict[str, Tuple[Fraction, Fraction]] = {
    "1": (HALF, -HALF),
    "123": (HALF, HALF),
    "3": (-HALF, HALF),
    "2": (HALF, HALF),
    "23": (Fraction(0), Fraction(1)),
    "12": (Fraction(1), Fraction(0)),
}

_SOURCE_IDEMPOTENT = {"1": 0, "123": 0, "3": 0, "12": 0, "2": 1, "23": 1}
_TARGET_IDEMPOTENT = {"1": 1, "123": 1, "3": 1, "12": 0, "2": 0, "23": 1}


class CurveError(Exception):
    """Raised when a type D structure does not describe an immersed curve."""


class WindowError(ValueError):
    """Raised for empty or too-small windows."""


@dataclass(frozen=True)
class TypeDGenerator:
    id: str
    idempotent: int


@dataclass(frozen=True)
class TypeDEdge:
    src: str
    dst: str
    label: str


@dataclass(frozen=True)
class TypeDStructure:
    """Reduced type D structure over the torus algebra.

    :param alexander: Alexander grading of each idempotent-0 generator
    :param essential_start: the generator where the unstable chain starts
    """

    generators: Tuple[TypeDGenerator, ...]
    edges: Tuple[TypeDEdge, ...]
    alexander: Dict[str, int] = field(compare=False, hash=False)
    essential_start: str = ""

    def idempotent(self, gid: str) -> int:
        for g in self.generators:
            if g.id == gid:
                return g.idempotent
        raise KeyError(gid)

    def validate(self):
        ids = {g.id for g in self.generators}
        for e in self.edges:
            if e.label not in LABELS:
                raise CurveError(f"edge label {e.label!r} is not a nonzero torus algebra element")
            if e.src not in ids or e.dst not in ids:
                raise CurveError(f"edge {e} mentions an unknown generator")
            if self.idempotent(e.src) != _SOURCE_IDEMPOTENT[e.label]:
                raise CurveError(f"edge {e} leaves a generator of the wrong idempotent")
            if self.idempotent(e.dst) != _TARGET_IDEMPOTENT[e.label]:
                raise CurveError(f"edge {e} enters a generator of the wrong idempotent")
        valence = {g: 0 for g in ids}
        for e in self.edges:
            valence[e.src] += 1
            valence[e.dst] += 1
        bad = sorted(g for g, v in valence.items() if v != 2)
        if bad:
            raise CurveError(f"generators {bad} do not have valence 2: the train track is not a curve")


def build_type_d(k: CompanionSpec, n: int) -> TypeDStructure:
    """Type D structure of the ``n``-framed complement of ``k``.

    :raises UnsupportedClassError: if ``k`` is not a staircase plus boxes
    """
    c = k.complex
    dec = decompose_staircase_boxes(c)
    gens: List[TypeDGenerator] = [TypeDGenerator(g.id, 0) for g in c.generators]
    edges: List[TypeDEdge] = []
    alexander = {g.id: g.alexander for g in c.generators}
    for src, dst, length in dec.vertical:
        chain = [f"kappa[{src}>{dst}]{m}" for m in range(1, length + 1)]
        gens.extend(TypeDGenerator(g, 1) for g in chain)
        edges.append(TypeDEdge(src, chain[0], "1"))
        for m in range(1, length):
            edges.append(TypeDEdge(chain[m], chain[m - 1], "23"))
        edges.append(TypeDEdge(dst, chain[-1], "123"))
    for src, dst, length in dec.horizontal:
        chain = [f"lambda[{src}>{dst}]{m}" for m in range(1, length + 1)]
        gens.extend(TypeDGenerator(g, 1) for g in chain)
        edges.append(TypeDEdge(src, chain[0], "3"))
        for m in range(1, length):
            edges.append(TypeDEdge(chain[m - 1], chain[m], "23"))
        edges.append(TypeDEdge(chain[-1], dst, "2"))
    twice_tau = 2 * k.tau
    xi0, eta0 = dec.xi0, dec.eta0
    if n == twice_tau:
        edges.append(TypeDEdge(xi0, eta0, "12"))
    elif n < twice_tau:
        m = twice_tau - n
        chain = [f"mu{t}" for t in range(1, m + 1)]
        gens.extend(TypeDGenerator(g, 1) for g in chain)
        edges.append(TypeDEdge(xi0, chain[0], "1"))
        for t in range(1, m):
            edges.append(TypeDEdge(chain[t], chain[t - 1], "23"))
        edges.append(TypeDEdge(eta0, chain[-1], "3"))
    else:
        m = n - twice_tau
        chain = [f"mu{t}" for t in range(1, m + 1)]
        gens.extend(TypeDGenerator(g, 1) for g in chain)
        edges.append(TypeDEdge(xi0, chain[0], "123"))
        for t in range(1, m):
            edges.append(TypeDEdge(chain[t - 1], chain[t], "23"))
        edges.append(TypeDEdge(chain[-1], eta0, "2"))
    d = TypeDStructure(tuple(gens), tuple(edges), alexander, xi0)
    d.validate()
    return d


def unstable_chain(d: TypeDStructure) -> Tuple[str, int]:
    """(pattern, length) of the unstable chain: ``"12"``, ``"1/23/3"`` or ``"123/23/2"``."""
    mus = [g for g in d.generators if g.id.startswith("mu")]
    first = next(e for e in d.edges if e.src == d.essential_start and (e.dst.startswith("mu") or e.label == "12"))
    if first.label == "12":
        return "12", 0
    if first.label == "1":
        return "1/23/3", len(mus)
    return "123/23/2", len(mus)


# ---------------------------------------------------------------------------
# the multicurve


@dataclass(frozen=True)
class CurveComponent:
    """One component of the multicurve, lifted to the plane.

    :param vertices: generator ids in traversal order with their positions
    :param route: closed polyline through the vertices (last point is the
        first translated by ``period``)
    :param path: tight edge word of the component
    """

    vertices: Tuple[Tuple[str, Point], ...]
    route: Tuple[Point, ...]
    period: Tuple[int, int]
    path: EdgePath

    @property
    def essential(self) -> bool:
        return self.period != (0, 0)


@dataclass(frozen=True)
class Multicurve:
    components: Tuple[CurveComponent, ...]
    framing: int
    tau: int

    @property
    def essential(self) -> CurveComponent:
        return next(c for c in self.components if c.essential)

    @property
    def closed_components(self) -> Tuple[CurveComponent, ...]:
        return tuple(c for c in self.components if not c.essential)


def _route(label: str, p: Point) -> List[Point]:
    """Intermediate points of the drawn edge leaving ``p`` (excluding ``p``)."""
    x, y = p
    if label == "1":
        return [(x + _OUT, y), (x + HALF, y - HALF)]
    if label == "123":
        return [(x + _OUT, y), (x + HALF, y + HALF)]
    if label == "3":
        return [(x - _OUT, y), (x - HALF, y + HALF)]
    if label == "2":
        return [(x + HALF - _OUT, y + HALF), (x + HALF, y + HALF)]
    if label == "23":
        return [(x, y + 1)]
    if label == "12":
        return [(x + 1, y)]
    raise CurveError(f"unknown label {label}")


def _reverse_route(label: str, q: Point) -> List[Point]:
    """Points of an edge traversed backwards from its target ``q``."""
    dx, dy = _DISPLACEMENT[label]
    p = (q[0] - dx, q[1] - dy)
    pts = [p] + _route(label, p)
    pts.reverse()
    return pts[1:]


def curve_from_type_d(d: TypeDStructure, framing: int = 0, tau: int = 0) -> Multicurve:
    """Trace the components of the curve described by ``d``."""
    d.validate()
    incident: Dict[str, List[TypeDEdge]] = {g.id: [] for g in d.generators}
    for e in d.edges:
        incident[e.src].append(e)
        incident[e.dst].append(e)
    used = set()
    components = []
    order = [d.essential_start] + [g.id for g in d.generators if g.idempotent == 0]
    for start in order:
        if all(id(e) in used for e in incident[start]):
            continue
        h = Fraction(d.alexander[start])
        pos: Point = (HALF, h)
        vertices = [(start, pos)]
        route: List[Point] = [pos]
        current = start
        # leave the start along the vertical or unstable side first
        candidates = [e for e in incident[start] if id(e) not in used]
        edge = next((e for e in candidates if e.src == start and e.label in ("1", "123", "12")), candidates[0])
        while True:
            used.add(id(edge))
            if edge.src == current:
                pts = _route(edge.label, pos)
                nxt = edge.dst
            else:
                pts = _reverse_route(edge.label, pos)
                nxt = edge.src
            route.extend(pts)
            pos = pts[-1]
            current = nxt
            if current == start:
                break
            vertices.append((current, pos))
            rest = [e for e in incident[current] if id(e) not in used]
            if not rest:
                raise CurveError(f"curve ends at {current}")
            edge = rest[0]
        period_x = route[-1][0] - route[0][0]
        period_y = route[-1][1] - route[0][1]
        if period_x.denominator != 1 or period_y.denominator != 1:
            raise CurveError("component does not close up on the lattice")
        period = (int(period_x), int(period_y))
        path = path_from_polyline(route, period).tighten()
        components.append(CurveComponent(tuple(vertices), tuple(route), period, path))
    essentials = [c for c in components if c.essential]
    if len(essentials) != 1:
        raise CurveError(f"expected one essential component, found {len(essentials)}")
    if essentials[0].period[0] != 1:
        raise CurveError("essential component must cross each column once per period")
    return Multicurve(tuple(components), framing, tau)


def companion_curve(k: CompanionSpec, n: int) -> Multicurve:
    """Multicurve of the ``n``-framed complement of ``k``."""
    return curve_from_type_d(build_type_d(k, n), framing=n, tau=k.tau)


def essential_shape(m: Multicurve) -> Dict[str, object]:
    """Shape data of the essential component.

    ``rows`` is the height lost between leaving one column and entering the
    next, which equals ``2 tau - n``.  ``turn`` compares the heights of the
    column exit and of the next column entry after undoing the framing
    shear: ``"down"`` when the curve leaves a column above where it enters
    the next one, ``"up"`` for the reverse, ``"straight"`` otherwise.
    """
    comp = m.essential
    exit_height = comp.vertices[0][1][1]
    next_column = comp.vertices[0][1][0] + 1
    entry = next((p for g, p in comp.vertices if p[0] == next_column), comp.route[-1])
    rows = int(exit_height - entry[1])
    sheared = rows + m.framing
    turn = "down" if sheared > 0 else ("up" if sheared < 0 else "straight")
    return {"rows": rows, "turn": turn, "period": comp.period}


# ---------------------------------------------------------------------------
# windows and lifts


@dataclass(frozen=True)
class Window:
    """Rectangle of unit cells ``[c_min, c_max] x [r_min, r_max]``."""

    c_min: int
    c_max: int
    r_min: int
    r_max: int

    def __post_init__(self):
        if self.c_max < self.c_min or self.r_max < self.r_min:
            raise WindowError("window must contain at least one column and one row")

    @classmethod
    def centred(cls, columns: int, rows: int) -> "Window":
        if columns <= 0 or rows <= 0:
            raise WindowError("window must contain at least one column and one row")
        return cls(-(columns // 2), (columns - 1) // 2, -(rows // 2), (rows - 1) // 2)

    @property
    def columns(self) -> int:
        return self.c_max - self.c_min + 1

    @property
    def rows(self) -> int:
        return self.r_max - self.r_min + 1


@dataclass(frozen=True)
class LiftedPolyline:
    component: int
    translation: Tuple[int, int]
    points: Tuple[Point, ...]
    closed: bool


@dataclass(frozen=True)
class LiftedCurves:
    window: Window
    polylines: Tuple[LiftedPolyline, ...]


def _inside(p: Point, w: Window) -> bool:
    return w.c_min <= p[0] <= w.c_max + 1 and w.r_min <= p[1] <= w.r_max + 1


def lift_alpha(m: Multicurve, w: Window) -> LiftedCurves:
    """All lattice translates of the curve components meeting the window.

    Open polylines are clipped to the vertices lying inside the window.

    :raises WindowError: if one column crossing of the essential component
        does not fit in the window's rows
    """
    ess = m.essential
    ys = [p[1] for p in ess.route]
    span = max(ys) - min(ys)
    if span > w.rows:
        raise WindowError(f"window with {w.rows} rows cannot hold the essential component (span {span})")
    out: List[LiftedPolyline] = []
    for ci, comp in enumerate(m.components):
        if comp.essential:
            px, py = comp.period
            reps = w.columns + 2
            base = []
            for q in range(-reps, reps + 1):
                base.extend((x + q * px, y + q * py) for x, y in comp.route[:-1])
            for b in range(w.r_min - abs(py) * reps - 2, w.r_max + abs(py) * reps + 3):
                pts = tuple((x, y + b) for x, y in base if _inside((x, y + b), w))
                if len(pts) >= 2:
                    out.append(LiftedPolyline(ci, (0, b), pts, False))
        else:
            for a in range(w.c_min - 2, w.c_max + 3):
                for b in range(w.r_min - int(span) - 2, w.r_max + 3):
                    pts = tuple((x + a, y + b) for x, y in comp.route)
                    if any(_inside(p, w) for p in pts):
                        out.append(LiftedPolyline(ci, (a, b), pts, True))
    return LiftedCurves(w, tuple(out))


def meridian_line() -> EdgePath:
    """Edge word of the vertical line through the basepoint column ``x = 1/2``."""
    return path_from_polyline([(HALF, Fraction(0)), (HALF, Fraction(1))], (0, 1))


def meridian_rank_check(m: Multicurve) -> int:
    """Minimal intersection number of one column of the curve with a vertical line."""
    from .pairing_engine import minimal_intersection_count

    line = meridian_line()
    total = 0
    for comp in m.components:
        if comp.essential:
            total += minimal_intersection_count(comp.path, line)
        else:
            xs = [p[0] for p in comp.route]
            for a in range(int(min(xs)) - 2, int(max(xs)) + 3):
                total += minimal_intersection_count(comp.path.translate(a, 0), line)
    return total
