import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgemrate.dipole import DipoleGeometry, DipoleParams
from qgemrate.rates import (
    build_channels,
    discriminate_states,
    find_phase_independent_points,
    interference_factor,
    phase_placement_sensitivity,
    rate_closed_form,
    rate_difference,
    rate_general,
    rate_limits,
    rate_over_r0,
    source_branch,
)
from qgemrate.states import PhasePlacement, make_product_state, make_qgem_state, normalized

PHIS = np.linspace(0.0, 2 * np.pi, 16)
KDS = np.linspace(0.1, 10.0, 16)


def g_mp(x):
    with mpmath.workdps(40):
        x = mpmath.mpf(x)
        return (mpmath.sin(x) + x * (x * mpmath.sin(x) - mpmath.cos(x))) / (2 * x**3)


def test_source_branch():
    # dd (3) is reached from ud (1) by flipping particle 1, from du (2) by particle 2
    assert source_branch(3, 1) == 1
    assert source_branch(3, 2) == 2
    assert source_branch(0, 1) is None
    assert source_branch(1, 1) is None
    assert source_branch(1, 2) == 0


def test_single_excited_spin_is_unit_rate():
    r = rate_general(make_product_state("(2)"), DipoleGeometry(0.7))
    assert r.total == pytest.approx(1.0, abs=1e-12)


def test_ground_state_is_dark():
    r = rate_general(make_product_state("(5)"), DipoleGeometry(0.7))
    assert r.total == 0.0
    assert all(c.rate == 0.0 for c in r.channels)


@pytest.mark.parametrize("phi, expected", [(0.0, 1.5), (np.pi, 0.5), (np.pi / 2, 1.0)])
def test_small_kd_values(phi, expected):
    assert rate_closed_form(phi, 1e-6).total == pytest.approx(expected, abs=1e-6)


def test_closed_form_matches_general():
    for p in PHIS:
        s = make_qgem_state(p)
        for kd in KDS:
            assert abs(rate_general(s, DipoleGeometry(kd)).total - rate_closed_form(p, kd).total) < 1e-12


def test_channel_decomposition_matches():
    s = make_qgem_state(2.1)
    gen = rate_general(s, DipoleGeometry(1.7))
    cf = rate_closed_form(2.1, 1.7)
    for a, b in zip(gen.channels, cf.channels):
        assert a.final == b.final
        assert a.rate == pytest.approx(b.rate, abs=1e-13)


def test_limits():
    for p in np.linspace(0, 2 * np.pi, 32, endpoint=False):
        small, large = rate_limits(p)
        assert abs(rate_over_r0(p, 1e-6) - small) < 1e-6
        assert abs(rate_over_r0(p, 1e4) - large) < 1e-3


def test_rate_difference_examples():
    assert rate_difference(np.pi, 1e-6) == pytest.approx(1.0, abs=1e-6)
    assert rate_difference(0.0, 3.0) == 0.0
    for kd in (0.3, 2.0, 7.0):
        d = rate_over_r0(0.0, kd) - rate_over_r0(np.pi, kd)
        assert rate_difference(np.pi, kd) == pytest.approx(d, abs=1e-14)


def test_interference_factor_against_mpmath():
    for x in np.concatenate([np.geomspace(1e-6, 1e-2, 10), np.linspace(0.02, 50, 200)]):
        assert abs(interference_factor(x) - float(g_mp(x))) < 1e-11
    assert interference_factor(0.0) == pytest.approx(2 / 3, abs=1e-15)


def test_first_phase_independent_point():
    roots = find_phase_independent_points((0.1, 20.0))
    with mpmath.workdps(40):
        ref = float(mpmath.findroot(g_mp, 3.4))
    assert roots[0] == pytest.approx(ref, abs=1e-10)
    assert roots[0] == pytest.approx(3.4056, abs=1e-4)
    assert interference_factor(3.3) > 0 > interference_factor(3.5)
    np.testing.assert_allclose(roots[1:3], [6.4338, 9.5282], atol=1e-3)
    spread = np.ptp([rate_over_r0(p, roots[0]) for p in np.linspace(0, 2 * np.pi, 9)])
    assert spread < 1e-9


def test_no_roots_at_short_range():
    assert find_phase_independent_points((0.1, 1.0)) == []
    assert len(find_phase_independent_points((0.1, 20.0), max_roots=2)) == 2
    with pytest.raises(ValueError):
        find_phase_independent_points((1.0, 0.5))


def test_placement_on_outer_branches_is_inert():
    for w in ((1, 0, 0, 0), (0, 0, 0, 1)):
        for p in np.linspace(0, 2 * np.pi, 9):
            assert phase_placement_sensitivity(p, PhasePlacement(w), kd=0.5) < 1e-12


def test_placement_on_down_up_carries_full_dependence():
    s = phase_placement_sensitivity(np.pi, PhasePlacement((0, 0, 1, 0)), kd=0.5)
    assert s == pytest.approx(1.5 * interference_factor(0.5), abs=1e-12)
    s = phase_placement_sensitivity(np.pi, PhasePlacement((0, 1, 0, 0)), kd=0.5)
    assert s == pytest.approx(1.5 * interference_factor(0.5), abs=1e-12)


def test_monotone_in_phase_at_half_kd():
    p = np.linspace(0, np.pi, 50)
    r = rate_over_r0(p, 0.5)
    assert np.all(np.diff(r) < 0)


def test_asymptotic_envelope():
    kd = np.linspace(5.0, 200.0, 2000)
    for p in (0.0, np.pi / 3, np.pi):
        assert np.all(np.abs(rate_over_r0(p, kd) - 1.0) <= 0.75 / kd + 1e-15)


@settings(max_examples=60, deadline=None)
@given(phi=st.floats(-10, 10), kd=st.floats(0, 50))
def test_periodic_and_even_in_phase(phi, kd):
    r = rate_over_r0(phi, kd)
    assert rate_over_r0(phi + 2 * np.pi, kd) == pytest.approx(r, abs=1e-12)
    assert rate_over_r0(-phi, kd) == pytest.approx(r, abs=1e-15)
    assert 0.5 - 1e-12 <= r <= 1.5 + 1e-12


def test_channels_nonnegative_for_random_states():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        s = normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        d = rng.normal(size=3)
        geom = DipoleGeometry(rng.uniform(0, 20), d / np.linalg.norm(d))
        for c in build_channels(s, geom):
            assert c.rate >= -1e-12


@pytest.mark.parametrize("label, level", [("(1)", 2.0), ("(2)", 1.0), ("(3)", 0.5), ("(4)", 1.5), ("(5)", 0.0)])
def test_product_states_flat_in_kd(label, level):
    s = make_product_state(label)
    for kd in (1e-6, 0.1, 0.3, 1.0, 3.0, 3.4, 10.0, 1e3):
        assert abs(rate_general(s, DipoleGeometry(kd)).total - level) < 1e-12


def test_cross_term_only_where_two_sources_feed_one_final():
    r = rate_general(make_qgem_state(1.0), DipoleGeometry(0.8))
    by_final = {c.final: c for c in r.channels}
    # uu (0) receives nothing, ud and du have a single source
    assert 0 not in by_final or by_final[0].rate == 0.0
    for f in (1, 2):
        assert by_final[f].cross == 0.0
    assert by_final[3].cross != 0.0


def test_rate_invariant_under_g_factor():
    s = make_qgem_state(2.0)
    a = rate_general(s, DipoleGeometry(1.3)).total
    b = rate_general(s, DipoleGeometry(1.3), DipoleParams(g_factor=2.0023, bohr_magneton=0.3)).total
    assert a == pytest.approx(b, abs=1e-13)


def test_oblique_geometry_reduces_to_closed_form_when_perpendicular():
    # separation perpendicular to the quantization axis in another orientation
    geom = DipoleGeometry(2.2, sep_direction=(0.0, 0.0, 1.0), quantization_axis=(1.0, 0.0, 0.0))
    assert rate_general(make_qgem_state(0.9), geom).total == pytest.approx(rate_over_r0(0.9, 2.2), abs=1e-12)


def test_discriminate_products_from_qgem():
    cands = [make_qgem_state(np.pi)] + [make_product_state(f"({i})") for i in range(1, 6)]
    rep = discriminate_states(cands, (0.3, 3.0), tolerance=1e-2)
    assert rep.all_distinguishable()
    assert rep.signatures.shape == (6, 2)
    assert min(p.margin for p in rep.pairs if p.first == 0) > 1e-2


def test_discriminate_flags_identical():
    rep = discriminate_states([make_qgem_state(np.pi / 2), make_qgem_state(3 * np.pi / 2)], (0.3, 3.0))
    assert not rep.all_distinguishable()
    with pytest.raises(ValueError):
        discriminate_states([make_qgem_state(0.0)], (1.0, 1.0))


def test_negative_kd_rejected():
    with pytest.raises(ValueError):
        rate_over_r0(0.0, -1.0)
