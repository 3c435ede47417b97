import pytest

from satellite_hfk.alpha_curve import companion_curve
from satellite_hfk.beta_curve import pattern_beta
from satellite_hfk.cfk_core import THIN, invariant_report, load_companion, validate_complex, vertical_homology
from satellite_hfk.pairing_engine import (
    PairingError,
    check_window_stability,
    intersect,
    reduce_diagram,
    render_svg,
    satellite_complex,
    satellite_diagram,
)


def reduced_points(name, n, i, j):
    return reduce_diagram(intersect(companion_curve(load_companion(name), n), pattern_beta(i, j))).points


@pytest.mark.parametrize("i, j", [(0, 1), (0, 2), (1, 1), (1, 3)])
def test_unknot_pattern_pairs_to_one_generator(i, j):
    assert len(reduced_points("unknot", 0, i, j)) == 1


@pytest.mark.parametrize("name, n, i, j", [("unknot", -1, 0, 1), ("T23", 0, 0, 1), ("fig8", 1, 0, 2)])
def test_reduction_keeps_parity(name, n, i, j):
    raw = intersect(companion_curve(load_companion(name), n), pattern_beta(i, j))
    reduced = reduce_diagram(raw)
    assert len(reduced.points) <= len(raw.points)
    assert len(reduced.points) % 2 == len(raw.points) % 2 == 1


def test_mazur_satellite_of_trefoil():
    c = satellite_complex(load_companion("T23"), 0, 1, 0)
    r = invariant_report(c)
    assert (r.genus, r.tau, r.epsilon) == (2, 2, 1)
    assert r.fibered is False


def test_twisted_mazur_unknot_is_thin_genus_one():
    # seven generators in ranks 2, 3, 2: a thin genus-one knot of determinant 7
    c = satellite_complex(load_companion("unknot"), 0, 1, -1)
    assert sorted(c.rank_by_alexander().items()) == [(-1, 2), (0, 3), (1, 2)]
    r = invariant_report(c)
    assert (r.thin, r.tau, r.genus) == (THIN, 1, 1)


@pytest.mark.parametrize("name, i, j, n", [("T23", 0, 2, -1), ("mT23", 1, 1, 2), ("fig8", 0, 1, 0), ("T25", 0, 1, 3)])
def test_complexes_are_knot_complexes(name, i, j, n):
    c = satellite_complex(load_companion(name), i, j, n)
    assert validate_complex(c) == []
    ranks = c.rank_by_alexander()
    assert all(ranks.get(-a, 0) == r for a, r in ranks.items())
    vh = vertical_homology(c)
    assert vh.hat_rank == len(c.generators)


def test_window_stability():
    check_window_stability(load_companion("T23"), 0, 2, 1)
    assert satellite_complex(load_companion("T23"), 0, 2, 1, check_window=True)


def test_invalid_parameters():
    with pytest.raises(PairingError):
        satellite_complex(load_companion("T23"), -1, 1, 0)
    with pytest.raises(PairingError):
        satellite_complex(load_companion("T23"), 0, 0, 0)


def test_svg_is_deterministic():
    k = load_companion("T23")
    a = render_svg(satellite_diagram(k, 0, 1, 0))
    b = render_svg(satellite_diagram(k, 0, 1, 0))
    assert a == b
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
    assert a.count("<circle") >= 5
