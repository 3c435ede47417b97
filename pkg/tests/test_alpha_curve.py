import pytest

from satellite_hfk.alpha_curve import (
    CurveError,
    TypeDEdge,
    TypeDGenerator,
    TypeDStructure,
    Window,
    WindowError,
    build_type_d,
    companion_curve,
    essential_shape,
    lift_alpha,
    meridian_rank_check,
    unstable_chain,
)
from satellite_hfk.cfk_core import BUILTIN_COMPANIONS, load_companion

TWISTS = range(-3, 4)


@pytest.mark.parametrize("name, rank", [("unknot", 1), ("T23", 3), ("mT23", 3), ("fig8", 5), ("T25", 5)])
def test_meridian_rank_equals_hat_rank(name, rank):
    k = load_companion(name)
    assert [meridian_rank_check(companion_curve(k, n)) for n in TWISTS] == [rank] * len(TWISTS)


@pytest.mark.parametrize("name", BUILTIN_COMPANIONS)
def test_type_d_generator_count(name):
    # one generator per complex generator, one per unit of arrow length and
    # one per unit of |2 tau - n| in the unstable chain
    k = load_companion(name)
    arrow_length = sum(a.coeff.exponent for a in k.complex.arrows)
    for n in TWISTS:
        d = build_type_d(k, n)
        d.validate()
        assert len(d.generators) == k.hat_rank + arrow_length + abs(2 * k.tau - n)


def test_unstable_chain_forms():
    t23 = load_companion("T23")
    assert unstable_chain(build_type_d(t23, 2)) == ("12", 0)
    assert unstable_chain(build_type_d(t23, -1)) == ("1/23/3", 3)
    assert unstable_chain(build_type_d(t23, 5)) == ("123/23/2", 3)


@pytest.mark.parametrize("name", BUILTIN_COMPANIONS)
def test_essential_component_slope(name):
    k = load_companion(name)
    for n in TWISTS:
        shape = essential_shape(companion_curve(k, n))
        assert shape["rows"] == 2 * k.tau - n
        assert shape["period"] == (1, n)


def test_essential_turn_follows_epsilon():
    turns = {name: essential_shape(companion_curve(load_companion(name), 0))["turn"] for name in BUILTIN_COMPANIONS}
    assert turns == {"unknot": "straight", "T23": "down", "mT23": "up", "fig8": "straight", "T25": "down"}


def test_box_gives_closed_component():
    assert len(companion_curve(load_companion("fig8"), 0).closed_components) == 1
    assert companion_curve(load_companion("T25"), 0).closed_components == ()


def test_invalid_type_d_rejected():
    gens = (TypeDGenerator("a", 0), TypeDGenerator("b", 1))
    with pytest.raises(CurveError):
        TypeDStructure(gens, (TypeDEdge("a", "b", "2"),), {"a": 0}).validate()
    with pytest.raises(CurveError):
        TypeDStructure(gens, (TypeDEdge("a", "b", "13"),), {"a": 0}).validate()
    with pytest.raises(CurveError):
        TypeDStructure(gens, (TypeDEdge("a", "b", "1"),), {"a": 0}).validate()


def test_windows():
    w = Window.centred(4, 3)
    assert (w.columns, w.rows) == (4, 3)
    with pytest.raises(WindowError):
        Window.centred(0, 2)
    with pytest.raises(WindowError):
        Window(1, 0, 0, 0)


def test_lift_needs_enough_rows():
    m = companion_curve(load_companion("T25"), -3)
    with pytest.raises(WindowError):
        lift_alpha(m, Window.centred(3, 1))
    lifted = lift_alpha(m, Window.centred(3, 12))
    assert lifted.polylines
