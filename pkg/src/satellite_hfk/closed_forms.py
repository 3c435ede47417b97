"""
Closed-form predictions for the generalized Mazur satellites Q^{i,j}_n(K).

Every function takes the companion's summary data (:class:`CompanionMeta`)
and the pattern parameters: ``i >= 0`` clasp twists, winding number
``j >= 1`` and ``n`` meridional twists.  These formulas serve as an oracle
that is independent of the curve-pairing engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cfk_core import NOT_THIN, THIN, CompanionSpec


class HypothesisError(ValueError):
    """Raised when a formula is evaluated outside its hypotheses."""


@dataclass(frozen=True)
class CompanionMeta:
    """Summary invariants of a companion knot."""

    tau: int
    epsilon: int
    genus: int
    trivial: bool
    fibered: bool

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise ValueError("epsilon must be -1, 0 or 1")
        if self.trivial and (self.tau, self.epsilon, self.genus, self.fibered) != (0, 0, 0, True):
            raise ValueError("the unknot has tau = epsilon = genus = 0 and is fibered")

    @classmethod
    def from_spec(cls, spec: CompanionSpec) -> "CompanionMeta":
        return cls(spec.tau, spec.epsilon, spec.genus, spec.trivial, spec.fibered)


UNKNOT = CompanionMeta(0, 0, 0, True, True)


def _check(j: int, i: int = 0):
    if j < 1:
        raise HypothesisError("winding number j must be at least 1")
    if i < 0:
        raise HypothesisError("clasp twist count i must be nonnegative")


def _tri(j: int) -> int:
    return j * (j + 1) // 2


def genus_formula(meta: CompanionMeta, i: int, j: int, n: int) -> int:
    """Seifert genus of Q^{i,j}_n(K)."""
    _check(j, i)
    if meta.trivial:
        if n > 0:
            return _tri(j) * n + 1
        if n == 0:
            return 0
        return _tri(j) * (-n) + 1 - j
    if n >= 0:
        return j * meta.genus + _tri(j) * n + 1
    return j * meta.genus + _tri(j) * (-n) + 1 - j


def pattern_genus_formula(i: int, j: int, n: int) -> int:
    """Genus of the pattern knot Q^{i,j}_n inside the solid torus."""
    _check(j, i)
    return _tri(j) * abs(n) + (1 if n >= 0 else 1 - j)


def tau_formula(meta: CompanionMeta, i: int, j: int, n: int) -> int:
    """Ozsvath-Szabo tau of Q^{i,j}_n(K); independent of ``i``."""
    _check(j, i)
    twist = j * (j - 1) // 2 * n
    if meta.epsilon == -1:
        return j * (meta.tau + 1) + twist
    if meta.epsilon == 1:
        return j * meta.tau + twist + (1 if n < 2 * meta.tau else 0)
    return twist if n >= 0 else twist + j


def epsilon_formula(meta: CompanionMeta, i: int, j: int, n: int) -> int:
    """Hom's epsilon of Q^{i,j}_n(K): zero only for the unknot satellite."""
    _check(j, i)
    return 0 if (meta.trivial and n == 0) else 1


def fibered_formula(meta: CompanionMeta, i: int, j: int, n: int) -> bool:
    """Fiberedness of Q^{i,j}_n(K) for a fibered nontrivial companion."""
    _check(j, i)
    if meta.trivial or not meta.fibered:
        raise HypothesisError("the fiberedness criterion needs a fibered nontrivial companion")
    if i != 0:
        return False
    if j >= 2:
        return n != 0
    return n not in (-1, 0)


def thin_formula(meta: CompanionMeta, i: int, j: int, n: int) -> str:
    """Floer thinness verdict (``THIN`` or ``NOT_THIN``)."""
    _check(j, i)
    if not meta.trivial:
        return NOT_THIN
    if n == 0 or (j == 1 and n == -1):
        return THIN
    return NOT_THIN


def top_rank_formula(i: int, j: int, n: int) -> int:
    """Rank of HFK-hat of Q^{i,j}_n(T_{2,3}) in its top Alexander grading."""
    _check(j, i)
    if n == 0 or (n == -1 and j == 1):
        return 2 * (i + 1)
    return i + 1


def ordv_lower_bound(meta: CompanionMeta, j: int, n: int) -> int:
    """Lower bound for the torsion order Ord_V of Q^{i,j}_n(K)."""
    _check(j)
    if meta.trivial:
        if n == 0:
            return 0
        if n == -1:
            return j
    return j + 1
