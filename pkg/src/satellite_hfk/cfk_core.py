"""
Reduced bigraded knot Floer complexes over F2[U,V]/(UV).

A complex is a finite F2-basis of generators carrying an Alexander grading
``A`` and (optionally) a Maslov grading ``M``, together with arrows labelled
by monomials ``U^a``, ``V^b`` or ``1``.  Conventions:

* multiplication by ``U`` shifts ``(A, M)`` by ``(-1, -2)``;
* multiplication by ``V`` shifts ``(A, M)`` by ``(+1, 0)``;
* the differential lowers ``M`` by one.

Hence a ``U^a`` arrow satisfies ``A(src) - A(dst) = -a`` and
``M(src) - M(dst) = 1 - 2a``, while a ``V^b`` arrow satisfies
``A(src) - A(dst) = b`` and ``M(src) - M(dst) = 1``.  Because ``UV = 0``, the
monomial on an arrow is determined by the Alexander gradings of its ends,
which the algorithms below exploit by storing the differential as a
boolean adjacency relation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

THIN = "THIN"
NOT_THIN = "NOT_THIN"
UNDETERMINED = "UNDETERMINED"


class ComplexError(Exception):
    """Base class for errors raised by this module."""


class ParseError(ComplexError):
    """Malformed companion text.

    :param message: description of the problem
    :param line: 1-based line number, or ``None`` for whole-file problems
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ValidationError(ComplexError):
    """A complex violating the grading rules or ``d^2 = 0``."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnsupportedClassError(ComplexError):
    """A companion complex that is not one staircase plus boxes."""


class NotAKnotComplexError(ComplexError):
    """Vertical homology does not have free rank one."""


@dataclass(frozen=True)
class Monomial:
    """A monomial ``U^a``, ``V^b`` or ``1`` in F2[U,V]/(UV).

    :param variable: ``"U"``, ``"V"`` or ``"1"``
    :param exponent: positive for ``U``/``V``, zero for ``"1"``
    """

    variable: str
    exponent: int

    def __post_init__(self):
        if self.variable == "1":
            if self.exponent != 0:
                raise ValueError("the unit monomial has exponent 0")
        elif self.variable in ("U", "V"):
            if self.exponent < 1:
                raise ValueError("U and V monomials need a positive exponent")
        else:
            raise ValueError(f"unknown variable {self.variable!r}")

    @classmethod
    def from_grading_drop(cls, drop: int) -> "Monomial":
        """Monomial of an arrow whose Alexander grading drops by ``drop``."""
        if drop > 0:
            return cls("V", drop)
        if drop < 0:
            return cls("U", -drop)
        return cls("1", 0)

    @property
    def alexander_drop(self) -> int:
        """``A(src) - A(dst)`` for an arrow carrying this monomial."""
        if self.variable == "V":
            return self.exponent
        if self.variable == "U":
            return -self.exponent
        return 0

    @property
    def maslov_drop(self) -> int:
        """``M(src) - M(dst)`` for an arrow carrying this monomial."""
        if self.variable == "U":
            return 1 - 2 * self.exponent
        return 1

    def __str__(self) -> str:
        if self.variable == "1":
            return "1"
        return f"{self.variable}^{self.exponent}"


ONE = Monomial("1", 0)


@dataclass(frozen=True)
class Generator:
    """A basis element with Alexander grading and optional Maslov grading."""

    id: str
    alexander: int
    maslov: Optional[int] = None

    @property
    def delta(self) -> Optional[int]:
        """The grading ``M - A``, or ``None`` when ``M`` is unknown."""
        if self.maslov is None:
            return None
        return self.maslov - self.alexander


@dataclass(frozen=True)
class Arrow:
    """A differential component ``src -> coeff * dst``."""

    src: str
    dst: str
    coeff: Monomial


@dataclass(frozen=True)
class BigradedComplex:
    """A finite complex over F2[U,V]/(UV).

    :param generators: basis elements (ids must be unique)
    :param arrows: differential components
    :param label: free-form description
    """

    generators: Tuple[Generator, ...]
    arrows: Tuple[Arrow, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "arrows", tuple(self.arrows))

    @classmethod
    def from_adjacency(
        cls,
        generators: Sequence[Generator],
        edges: Iterable[Tuple[str, str]],
        label: str = "",
    ) -> "BigradedComplex":
        """Build a complex whose arrow monomials are read off the gradings."""
        alex = {g.id: g.alexander for g in generators}
        arrows = [Arrow(s, t, Monomial.from_grading_drop(alex[s] - alex[t])) for s, t in edges]
        arrows.sort(key=lambda a: (a.src, a.dst))
        return cls(tuple(generators), tuple(arrows), label)

    def generator(self, gid: str) -> Generator:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)

    @property
    def ids(self) -> List[str]:
        return [g.id for g in self.generators]

    def rank_by_alexander(self) -> Dict[int, int]:
        """Number of generators in each Alexander grading."""
        ranks: Dict[int, int] = {}
        for g in self.generators:
            ranks[g.alexander] = ranks.get(g.alexander, 0) + 1
        return ranks

    def with_maslov(self, maslov: Dict[str, Optional[int]]) -> "BigradedComplex":
        gens = tuple(Generator(g.id, g.alexander, maslov.get(g.id)) for g in self.generators)
        return BigradedComplex(gens, self.arrows, self.label)


@dataclass(frozen=True)
class VerticalHomologyData:
    """Homology of the ``U = 0`` complex as an F2[V]-module.

    :param tau: Alexander grading of the free summand's generator
    :param torsion_orders: exponents ``k`` of the summands F2[V]/(V^k), sorted
    :param hat_rank: rank after also setting ``V = 0``
    """

    tau: int
    torsion_orders: Tuple[int, ...]
    hat_rank: int

    @property
    def ord_v(self) -> int:
        return max(self.torsion_orders, default=0)


@dataclass(frozen=True)
class CompanionSpec:
    """A companion knot complex with invariants recomputed from it."""

    name: str
    complex: BigradedComplex
    tau: int
    epsilon: int
    genus: int
    trivial: bool
    hat_rank: int
    fibered: bool


@dataclass(frozen=True)
class RankEntry:
    alexander: int
    delta: Optional[int]
    rank: int


@dataclass(frozen=True)
class InvariantReport:
    """Invariants extracted from a reduced knot complex."""

    genus: int
    tau: int
    epsilon: int
    fibered: bool
    thin: str
    ord_v_lower: int
    rank_table: Tuple[RankEntry, ...]
    top_rank: int
    total_rank: int

    def ranks_by_alexander(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for e in self.rank_table:
            out[e.alexander] = out.get(e.alexander, 0) + e.rank
        return out


# ---------------------------------------------------------------------------
# validation


def _compose(m1: Monomial, m2: Monomial) -> Optional[Monomial]:
    """Product of two monomials in F2[U,V]/(UV); ``None`` when it vanishes."""
    if m1.variable == "1":
        return m2
    if m2.variable == "1":
        return m1
    if m1.variable != m2.variable:
        return None
    return Monomial(m1.variable, m1.exponent + m2.exponent)


def validate_complex(c: BigradedComplex) -> List[str]:
    """Check grading compatibility and ``d^2 = 0``.

    :param c: the complex to check
    :return: list of human-readable violations; empty when the complex is valid
    """
    violations: List[str] = []
    gens: Dict[str, Generator] = {}
    for g in c.generators:
        if g.id in gens:
            violations.append(f"duplicate generator id {g.id!r}")
        gens[g.id] = g
    seen_pairs: Set[Tuple[str, str]] = set()
    out: Dict[str, List[Arrow]] = {}
    for a in c.arrows:
        if a.src not in gens or a.dst not in gens:
            violations.append(f"arrow {a.src}->{a.dst} references an unknown generator")
            continue
        if (a.src, a.dst) in seen_pairs:
            violations.append(f"repeated arrow {a.src}->{a.dst}")
        seen_pairs.add((a.src, a.dst))
        src, dst = gens[a.src], gens[a.dst]
        kind = {"U": "U-arrow", "V": "V-arrow", "1": "unit arrow"}[a.coeff.variable]
        if src.alexander - dst.alexander != a.coeff.alexander_drop:
            violations.append(
                f"{kind} grading mismatch on {a.src}->{a.dst}: "
                f"A drops by {src.alexander - dst.alexander}, expected {a.coeff.alexander_drop}"
            )
        if src.maslov is not None and dst.maslov is not None:
            if src.maslov - dst.maslov != a.coeff.maslov_drop:
                violations.append(
                    f"{kind} Maslov mismatch on {a.src}->{a.dst}: "
                    f"M drops by {src.maslov - dst.maslov}, expected {a.coeff.maslov_drop}"
                )
        out.setdefault(a.src, []).append(a)
    square: Dict[Tuple[str, str, Monomial], int] = {}
    for a in c.arrows:
        for b in out.get(a.dst, []):
            m = _compose(a.coeff, b.coeff)
            if m is not None:
                key = (a.src, b.dst, m)
                square[key] = square.get(key, 0) ^ 1
    for (s, t, m), parity in sorted(square.items(), key=lambda kv: (kv[0][0], kv[0][1], str(kv[0][2]))):
        if parity:
            violations.append(f"d^2 != 0: {s} -> {m} {t}")
    return violations


def check_complex(c: BigradedComplex) -> BigradedComplex:
    """Return ``c`` unchanged, raising :class:`ValidationError` if invalid."""
    violations = validate_complex(c)
    if violations:
        raise ValidationError(violations)
    return c


# ---------------------------------------------------------------------------
# parsing

_GEN_RE = re.compile(r"^gen\s+(\S+)\s+A=(-?\d+)(?:\s+M=(-?\d+))?\s*$")
_ARROW_RE = re.compile(r"^arrow\s+(\S+)\s+(\S+)\s+(U|V)\^(\d+)\s*$")


def parse_complex(text: str, label: str = "") -> BigradedComplex:
    """Parse the line-oriented companion format into a validated complex.

    Lines are ``gen <id> A=<int> M=<int>`` or ``arrow <src> <dst> U^<a>``
    (respectively ``V^<b>``); ``#`` starts a comment.
    """
    gens: List[Generator] = []
    arrows: List[Arrow] = []
    seen: Set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _GEN_RE.match(line)
        if m:
            gid = m.group(1)
            if gid in seen:
                raise ParseError(f"duplicate generator {gid!r}", lineno)
            seen.add(gid)
            maslov = int(m.group(3)) if m.group(3) is not None else None
            gens.append(Generator(gid, int(m.group(2)), maslov))
            continue
        m = _ARROW_RE.match(line)
        if m:
            src, dst, var, exp = m.group(1), m.group(2), m.group(3), int(m.group(4))
            if src not in seen or dst not in seen:
                raise ParseError("arrow refers to a generator not declared above it", lineno)
            if exp < 1:
                raise ParseError("arrow exponent must be positive", lineno)
            arrows.append(Arrow(src, dst, Monomial(var, exp)))
            continue
        raise ParseError(f"cannot parse {line!r}", lineno)
    if not gens:
        raise ParseError("no generators declared")
    c = BigradedComplex(tuple(gens), tuple(arrows), label)
    return check_complex(c)


def format_complex(c: BigradedComplex) -> str:
    """Inverse of :func:`parse_complex` (unit arrows are not representable)."""
    lines = []
    if c.label:
        lines.append(f"# {c.label}")
    for g in c.generators:
        m = "" if g.maslov is None else f" M={g.maslov}"
        lines.append(f"gen {g.id} A={g.alexander}{m}")
    for a in c.arrows:
        lines.append(f"arrow {a.src} {a.dst} {a.coeff}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# internal adjacency representation


class _Adjacency:
    """Mutable boolean differential keyed by generator index."""

    def __init__(self, c: BigradedComplex):
        self.ids = [g.id for g in c.generators]
        self.alex = [g.alexander for g in c.generators]
        index = {gid: k for k, gid in enumerate(self.ids)}
        self.out: List[Set[int]] = [set() for _ in self.ids]
        self.inc: List[Set[int]] = [set() for _ in self.ids]
        for a in c.arrows:
            self.toggle(index[a.src], index[a.dst])
        self.alive = set(range(len(self.ids)))

    def toggle(self, s: int, t: int):
        if t in self.out[s]:
            self.out[s].discard(t)
            self.inc[t].discard(s)
        else:
            self.out[s].add(t)
            self.inc[t].add(s)

    def drop(self, k: int):
        for t in list(self.out[k]):
            self.toggle(k, t)
        for s in list(self.inc[k]):
            self.toggle(s, k)
        self.alive.discard(k)

    def add_row(self, target: int, source: int, keep):
        """Basis change ``target <- target + c * source`` (row operation).

        ``keep(s, t)`` filters which arrows survive (used to discard mixed
        monomials that vanish in the quotient ring).
        """
        for t in list(self.out[source]):
            if keep(target, t):
                self.toggle(target, t)

    def add_column(self, target: int, source: int, keep):
        """Basis change ``source <- source + c * target`` seen on arrows into
        ``source``: every arrow into ``source`` gains a copy into ``target``."""
        for s in list(self.inc[source]):
            if keep(s, target):
                self.toggle(s, target)


def _same_type(alex: Sequence[int], s: int, mid: int, t: int) -> bool:
    """Whether arrows ``s -> mid`` and ``mid -> t`` compose to a nonzero monomial."""
    d1 = alex[s] - alex[mid]
    d2 = alex[mid] - alex[t]
    return not ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0))


def cancel_unit_arrows(c: BigradedComplex) -> BigradedComplex:
    """Cancel all unit arrows, returning a reduced homotopy-equivalent complex."""
    adj = _Adjacency(c)
    alex = adj.alex
    while True:
        pivot = None
        for s in sorted(adj.alive):
            for t in sorted(adj.out[s]):
                if alex[s] == alex[t]:
                    pivot = (s, t)
                    break
            if pivot:
                break
        if pivot is None:
            break
        x, y = pivot
        sources = [z for z in adj.inc[y] if z != x]
        targets = [w for w in adj.out[x] if w != y]
        for z in sources:
            for w in targets:
                if _same_type(alex, z, y, w) and _same_type(alex, z, x, w):
                    adj.toggle(z, w)
        adj.drop(x)
        adj.drop(y)
    keep_ids = [adj.ids[k] for k in sorted(adj.alive)]
    gens = [g for g in c.generators if g.id in set(keep_ids)]
    edges = [(adj.ids[s], adj.ids[t]) for s in sorted(adj.alive) for t in sorted(adj.out[s])]
    return BigradedComplex.from_adjacency(gens, edges, c.label)


def _vertical_reduction(c: BigradedComplex) -> Tuple[List[int], List[Tuple[int, int, int]]]:
    """Graded Smith reduction of the ``U = 0`` complex over F2[V].

    :return: (indices of free generators, list of (src, dst, exponent) pairs)
    """
    adj = _Adjacency(c)
    alex = adj.alex
    for s in range(len(alex)):
        for t in list(adj.out[s]):
            if alex[s] < alex[t]:
                adj.toggle(s, t)
    pairs: List[Tuple[int, int, int]] = []
    while True:
        best = None
        for s in sorted(adj.alive):
            for t in adj.out[s]:
                key = (alex[s] - alex[t], s, t)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        d, x, y = best
        keep = lambda s, t: True  # noqa: E731 - all arrows here are V-powers
        for z in sorted(adj.inc[y] - {x}):
            adj.add_row(z, x, keep)
        for w in sorted(adj.out[x] - {y}):
            adj.add_column(w, y, keep)
        pairs.append((x, y, d))
        adj.drop(x)
        adj.drop(y)
    return sorted(adj.alive), pairs


def vertical_homology(c: BigradedComplex) -> VerticalHomologyData:
    """Homology of the complex with ``U = 0`` over the PID F2[V].

    :raises NotAKnotComplexError: if the free rank is not one
    """
    free, pairs = _vertical_reduction(c)
    if len(free) != 1:
        raise NotAKnotComplexError(f"vertical homology has free rank {len(free)}, expected 1")
    tau = c.generators[free[0]].alexander
    torsion = tuple(sorted(d for _, _, d in pairs if d > 0))
    hat = cancel_unit_arrows(c)
    return VerticalHomologyData(tau, torsion, len(hat.generators))


def longest_vertical_arrow(c: BigradedComplex) -> int:
    """Largest exponent ``k`` of an arrow ``V^k`` (0 when there is none).

    This depends on the basis; the torsion order
    :attr:`VerticalHomologyData.ord_v` does not and can be smaller.
    """
    return max((a.coeff.exponent for a in c.arrows if a.coeff.variable == "V"), default=0)


def horizontal_tau(c: BigradedComplex) -> int:
    """Alexander grading of the free generator of the ``V = 0`` homology."""
    swapped = BigradedComplex.from_adjacency(
        [Generator(g.id, -g.alexander) for g in c.generators],
        [(a.src, a.dst) for a in c.arrows],
        c.label,
    )
    return -vertical_homology(swapped).tau


# ---------------------------------------------------------------------------
# mirror


def mirror_complex(c: BigradedComplex) -> BigradedComplex:
    """Complex of the mirror knot: the dual complex.

    Arrows are reversed and both gradings are negated, which keeps every
    arrow's monomial type; composing with the U/V symmetry of knot complexes
    gives the equivalent description in which U and V trade roles.
    """
    gens = tuple(
        Generator(g.id, -g.alexander, None if g.maslov is None else -g.maslov) for g in c.generators
    )
    arrows = tuple(sorted((Arrow(a.dst, a.src, a.coeff) for a in c.arrows), key=lambda a: (a.src, a.dst)))
    label = f"mirror({c.label})" if c.label else "mirror"
    return BigradedComplex(gens, arrows, label)


# ---------------------------------------------------------------------------
# epsilon via the hook map


def _f2_reduce(vec: int, basis: Dict[int, int]) -> int:
    """Reduce a bitset vector against an echelon basis keyed by leading bit."""
    while vec:
        lead = vec.bit_length() - 1
        if lead not in basis:
            return vec
        vec ^= basis[lead]
    return 0


def _f2_echelon(vectors: Iterable[int]) -> Dict[int, int]:
    basis: Dict[int, int] = {}
    for v in vectors:
        r = _f2_reduce(v, basis)
        if r:
            basis[r.bit_length() - 1] = r
    return basis


def _f2_kernel(images: Sequence[int]) -> List[int]:
    """Kernel of the F2-linear map sending basis vector ``k`` to ``images[k]``."""
    basis: Dict[int, Tuple[int, int]] = {}
    kernel: List[int] = []
    for k, img in enumerate(images):
        vec, combo = img, 1 << k
        while vec:
            lead = vec.bit_length() - 1
            if lead not in basis:
                break
            bvec, bcombo = basis[lead]
            vec ^= bvec
            combo ^= bcombo
        if vec:
            basis[vec.bit_length() - 1] = (vec, combo)
        else:
            kernel.append(combo)
    return kernel


def _vertical_cycle(c: BigradedComplex) -> int:
    """A cycle generating the homology of the ``U = 0, V = 1`` complex."""
    ids = {g.id: k for k, g in enumerate(c.generators)}
    alex = [g.alexander for g in c.generators]
    images = [0] * len(alex)
    for a in c.arrows:
        s, t = ids[a.src], ids[a.dst]
        if alex[s] >= alex[t]:
            images[s] ^= 1 << t
    boundaries = _f2_echelon(images)
    for z in _f2_kernel(images):
        if _f2_reduce(z, boundaries):
            return z
    raise NotAKnotComplexError("vertical complex has trivial homology")


def _hook_kills_generator(c: BigradedComplex, tau: int) -> bool:
    """Whether the generator of the vertical homology dies in the hook
    ``{i = 0, j >= tau} union {j = tau, i >= 0}``.

    Lattice points of the hook are ``(x, 0)`` for generators with
    ``A(x) >= tau`` on the vertical arm and ``(x, tau - A(x))`` for
    generators with ``A(x) <= tau`` on the horizontal arm (the two coincide
    when ``A(x) = tau``).
    """
    alex = {g.id: g.alexander for g in c.generators}
    points: Dict[Tuple[str, int], int] = {}
    for g in c.generators:
        if g.alexander >= tau:
            points.setdefault((g.id, 0), len(points))
        if g.alexander <= tau:
            points.setdefault((g.id, tau - g.alexander), len(points))
    images = [0] * len(points)
    for a in c.arrows:
        drop = alex[a.src] - alex[a.dst]
        if drop > 0:
            if alex[a.dst] >= tau:
                images[points[(a.src, 0)]] ^= 1 << points[(a.dst, 0)]
        elif alex[a.dst] <= tau:
            i_src = tau - alex[a.src]
            images[points[(a.src, i_src)]] ^= 1 << points[(a.dst, i_src + drop)]
    cycle = _vertical_cycle(c)
    image_vec = 0
    for k, g in enumerate(c.generators):
        if cycle >> k & 1 and g.alexander >= tau:
            image_vec ^= 1 << points[(g.id, 0)]
    boundaries = _f2_echelon(images)
    return _f2_reduce(image_vec, boundaries) == 0


def epsilon_of(c: BigradedComplex) -> int:
    """Hom's concordance invariant epsilon in {-1, 0, 1}.

    The vertical-homology generator is pushed into the hook complex at
    height tau.  If it dies there the distinguished generator is hit by a
    horizontal differential (epsilon = 1); applying the same test to the
    mirror detects an outgoing horizontal arrow (epsilon = -1); otherwise
    epsilon = 0.  The test only uses homology, so it does not depend on any
    choice of simplified basis.
    """
    c = cancel_unit_arrows(c)
    tau = vertical_homology(c).tau
    if _hook_kills_generator(c, tau):
        return 1
    m = mirror_complex(c)
    if _hook_kills_generator(m, -tau):
        return -1
    return 0


# ---------------------------------------------------------------------------
# reports


def _thinness(c: BigradedComplex) -> str:
    for a in c.arrows:
        if a.coeff.exponent >= 2:
            return NOT_THIN
    deltas = {g.delta for g in c.generators}
    known = {d for d in deltas if d is not None}
    if len(known) > 1:
        return NOT_THIN
    if None in deltas:
        return UNDETERMINED
    return THIN


def invariant_report(c: BigradedComplex) -> InvariantReport:
    """Genus, tau, epsilon, fiberedness, thinness and torsion data.

    :param c: a valid knot complex (unit arrows are cancelled first)
    """
    r = cancel_unit_arrows(c)
    vh = vertical_homology(r)
    eps = epsilon_of(r)
    ranks = r.rank_by_alexander()
    genus = max(ranks)
    top = ranks[genus]
    table: Dict[Tuple[int, Optional[int]], int] = {}
    for g in r.generators:
        key = (g.alexander, g.delta)
        table[key] = table.get(key, 0) + 1
    rows = tuple(
        RankEntry(a, d, n)
        for (a, d), n in sorted(table.items(), key=lambda kv: (-kv[0][0], kv[0][1] if kv[0][1] is not None else 0))
    )
    return InvariantReport(
        genus=genus,
        tau=vh.tau,
        epsilon=eps,
        fibered=(top == 1),
        thin=_thinness(r),
        ord_v_lower=vh.ord_v,
        rank_table=rows,
        top_rank=top,
        total_rank=len(r.generators),
    )


# ---------------------------------------------------------------------------
# companions


@dataclass(frozen=True)
class StaircaseBoxes:
    """Decomposition of a companion into one staircase and boxes.

    :param xi0: staircase generator without vertical arrows
    :param eta0: staircase generator without horizontal arrows
    :param vertical: V-arrows as (src, dst, length)
    :param horizontal: U-arrows as (src, dst, length)
    :param boxes: each box as its generator ids (p, q, r, s)
    """

    xi0: str
    eta0: str
    vertical: Tuple[Tuple[str, str, int], ...]
    horizontal: Tuple[Tuple[str, str, int], ...]
    boxes: Tuple[Tuple[str, str, str, str], ...] = field(default=())


def decompose_staircase_boxes(c: BigradedComplex) -> StaircaseBoxes:
    """Recognise a complex as one staircase plus boxes.

    :raises UnsupportedClassError: for any other shape
    """
    if any(a.coeff.variable == "1" for a in c.arrows):
        raise UnsupportedClassError("companion complexes must be reduced")
    vert: Dict[str, List[Arrow]] = {g: [] for g in c.ids}
    horiz: Dict[str, List[Arrow]] = {g: [] for g in c.ids}
    for a in c.arrows:
        bucket = vert if a.coeff.variable == "V" else horiz
        bucket[a.src].append(a)
        bucket[a.dst].append(a)
    for g in c.ids:
        if len(vert[g]) > 1 or len(horiz[g]) > 1:
            raise UnsupportedClassError(f"generator {g} has more than one arrow of a kind")
    neighbours: Dict[str, Set[str]] = {g: set() for g in c.ids}
    for a in c.arrows:
        neighbours[a.src].add(a.dst)
        neighbours[a.dst].add(a.src)
    seen: Set[str] = set()
    staircase = None
    boxes = []
    for g in c.ids:
        if g in seen:
            continue
        comp, stack = [], [g]
        seen.add(g)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in sorted(neighbours[x]):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        no_vert = [x for x in comp if not vert[x]]
        no_horiz = [x for x in comp if not horiz[x]]
        if len(comp) == 4 and not no_vert and not no_horiz:
            boxes.append(_recognise_box(c, comp))
        elif len(no_vert) == 1 and len(no_horiz) == 1:
            if staircase is not None:
                raise UnsupportedClassError("more than one staircase component")
            staircase = (no_vert[0], no_horiz[0])
        else:
            raise UnsupportedClassError(f"component {sorted(comp)} is neither a staircase nor a box")
    if staircase is None:
        raise UnsupportedClassError("no staircase component")
    vertical = tuple((a.src, a.dst, a.coeff.exponent) for a in c.arrows if a.coeff.variable == "V")
    horizontal = tuple((a.src, a.dst, a.coeff.exponent) for a in c.arrows if a.coeff.variable == "U")
    return StaircaseBoxes(staircase[0], staircase[1], vertical, horizontal, tuple(boxes))


def _recognise_box(c: BigradedComplex, comp: List[str]) -> Tuple[str, str, str, str]:
    out = {x: {a.dst: a.coeff for a in c.arrows if a.src == x} for x in comp}
    sources = [x for x in comp if len(out[x]) == 2]
    if len(sources) != 1:
        raise UnsupportedClassError(f"component {sorted(comp)} is not a box")
    p = sources[0]
    q = next(t for t, m in out[p].items() if m.variable == "U")
    r = next(t for t, m in out[p].items() if m.variable == "V")
    s_candidates = set(out[q]) & set(out[r])
    if len(s_candidates) != 1:
        raise UnsupportedClassError(f"component {sorted(comp)} is not a box")
    s = s_candidates.pop()
    if out[q][s] != out[p][r] or out[r][s] != out[p][q]:
        raise UnsupportedClassError(f"component {sorted(comp)} is not a box")
    return (p, q, r, s)


BUILTIN_COMPANIONS = ("unknot", "T23", "mT23", "fig8", "T25")


def companion_from_complex(name: str, c: BigradedComplex) -> CompanionSpec:
    """Validate, classify and compute the invariants of a companion complex."""
    check_complex(c)
    decompose_staircase_boxes(c)
    rep = invariant_report(c)
    trivial = rep.total_rank == 1
    return CompanionSpec(
        name=name,
        complex=c,
        tau=rep.tau,
        epsilon=rep.epsilon,
        genus=rep.genus,
        trivial=trivial,
        hat_rank=rep.total_rank,
        fibered=rep.fibered,
    )


def parse_companion(text: str, name: str = "companion") -> CompanionSpec:
    """Parse companion text and recompute its invariants."""
    return companion_from_complex(name, parse_complex(text, label=name))


def builtin_text(name: str) -> str:
    if name not in BUILTIN_COMPANIONS:
        raise KeyError(name)
    return resources.files("satellite_hfk").joinpath("companions").joinpath(f"{name}.knot").read_text()


def load_companion(name_or_path: str) -> CompanionSpec:
    """Resolve a built-in companion name or read a companion file."""
    if name_or_path in BUILTIN_COMPANIONS:
        return parse_companion(builtin_text(name_or_path), name_or_path)
    path = Path(name_or_path)
    text = path.read_text()
    return parse_companion(text, path.stem)
