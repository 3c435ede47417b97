import pytest
from hypothesis import given, strategies as st

from satellite_hfk.cfk_core import NOT_THIN, THIN, load_companion
from satellite_hfk.closed_forms import (
    UNKNOT,
    CompanionMeta,
    HypothesisError,
    epsilon_formula,
    fibered_formula,
    genus_formula,
    ordv_lower_bound,
    pattern_genus_formula,
    tau_formula,
    thin_formula,
    top_rank_formula,
)

T23 = CompanionMeta(1, 1, 1, False, True)
MT23 = CompanionMeta(-1, -1, 1, False, True)
FIG8 = CompanionMeta(0, 0, 1, False, True)
T25 = CompanionMeta(2, 1, 2, False, True)

metas = st.sampled_from([T23, MT23, FIG8, T25])
i_values = st.integers(0, 6)
j_values = st.integers(1, 6)
n_values = st.integers(-8, 8)


def test_meta_from_builtin_companions():
    assert CompanionMeta.from_spec(load_companion("T23")) == T23
    assert CompanionMeta.from_spec(load_companion("mT23")) == MT23
    assert CompanionMeta.from_spec(load_companion("fig8")) == FIG8
    assert CompanionMeta.from_spec(load_companion("T25")) == T25
    assert CompanionMeta.from_spec(load_companion("unknot")) == UNKNOT


def test_meta_rejects_bad_data():
    with pytest.raises(ValueError):
        CompanionMeta(0, 2, 1, False, True)
    with pytest.raises(ValueError):
        CompanionMeta(1, 0, 0, True, True)


def test_mazur_pattern_values():
    # Mazur pattern: i = 0, j = 1, n = 0
    assert genus_formula(T23, 0, 1, 0) == 2
    assert tau_formula(T23, 0, 1, 0) == 2
    assert tau_formula(MT23, 0, 1, 0) == 0
    assert tau_formula(FIG8, 0, 1, 0) == 0
    assert genus_formula(UNKNOT, 0, 1, 0) == 0


def test_twist_threshold_for_trefoil():
    assert [tau_formula(T23, 0, 1, n) for n in range(-3, 4)] == [2, 2, 2, 2, 2, 1, 1]


def test_tau_with_twisting():
    # j = 3: each meridional twist adds j(j-1)/2 = 3
    assert tau_formula(T25, 1, 3, 2) == 3 * 2 + 3 * 2 + 1
    assert tau_formula(MT23, 0, 3, -1) == 0 - 3
    assert tau_formula(UNKNOT, 0, 3, -2) == -6 + 3


def test_unknot_genus_branches():
    assert genus_formula(UNKNOT, 0, 2, 1) == 4
    assert genus_formula(UNKNOT, 0, 2, -1) == 2
    assert genus_formula(UNKNOT, 0, 1, -1) == 1


def test_thinness_and_epsilon_tables():
    assert thin_formula(UNKNOT, 0, 1, -1) == THIN
    assert thin_formula(UNKNOT, 2, 3, 0) == THIN
    assert thin_formula(UNKNOT, 0, 2, -1) == NOT_THIN
    assert thin_formula(FIG8, 0, 1, 0) == NOT_THIN
    assert epsilon_formula(UNKNOT, 0, 2, 0) == 0
    assert epsilon_formula(UNKNOT, 0, 2, 1) == 1


def test_fiberedness_table():
    assert fibered_formula(T23, 0, 1, 1) is True
    assert fibered_formula(T23, 0, 1, -1) is False
    assert fibered_formula(T23, 0, 2, -1) is True
    assert fibered_formula(T23, 0, 2, 0) is False
    assert fibered_formula(T23, 1, 2, 3) is False
    with pytest.raises(HypothesisError):
        fibered_formula(UNKNOT, 0, 1, 1)
    with pytest.raises(HypothesisError):
        fibered_formula(CompanionMeta(0, 0, 1, False, False), 0, 1, 1)


def test_top_rank_branches():
    assert top_rank_formula(2, 1, 0) == 6
    assert top_rank_formula(2, 1, -1) == 6
    assert top_rank_formula(2, 2, -1) == 3
    assert top_rank_formula(0, 3, 2) == 1


def test_ordv_bounds():
    assert ordv_lower_bound(UNKNOT, 3, 0) == 0
    assert ordv_lower_bound(UNKNOT, 3, -1) == 3
    assert ordv_lower_bound(UNKNOT, 3, 2) == 4
    assert ordv_lower_bound(T23, 3, 0) == 4


def test_hypotheses_enforced():
    with pytest.raises(HypothesisError):
        genus_formula(T23, 0, 0, 1)
    with pytest.raises(HypothesisError):
        tau_formula(T23, -1, 1, 1)
    with pytest.raises(HypothesisError):
        ordv_lower_bound(T23, 0, 1)


@given(metas, i_values, j_values, n_values)
def test_genus_is_pattern_genus_plus_scaled_companion_genus(meta, i, j, n):
    assert genus_formula(meta, i, j, n) == j * meta.genus + pattern_genus_formula(i, j, n)


@given(metas, st.integers(0, 6), st.integers(0, 6), j_values, n_values)
def test_formulas_do_not_depend_on_clasp_twists_except_fiberedness(meta, i1, i2, j, n):
    assert tau_formula(meta, i1, j, n) == tau_formula(meta, i2, j, n)
    assert genus_formula(meta, i1, j, n) == genus_formula(meta, i2, j, n)
    assert epsilon_formula(meta, i1, j, n) == 1


@given(st.sampled_from([UNKNOT, T23, MT23, FIG8, T25]), j_values, n_values)
def test_tau_bounded_by_genus(meta, j, n):
    assert abs(tau_formula(meta, 0, j, n)) <= genus_formula(meta, 0, j, n)
