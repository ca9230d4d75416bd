"""Acceptance criteria 1-8, one PASS/FAIL line each (also listed in the terminal summary)."""
import math
import time

import numpy as np

from qgemrate.dipole import DipoleGeometry, kernel_terms, kernel_terms_closed, tau_tensor
from qgemrate.quadrature import QuadratureSpec, rate_by_quadrature
from qgemrate.rates import (
    discriminate_states,
    find_phase_independent_points,
    interference_factor,
    rate_closed_form,
    rate_difference,
    rate_general,
    rate_over_r0,
)
from qgemrate.states import (
    PhasePlacement,
    concurrence,
    is_entangled_by_witness,
    make_product_state,
    make_qgem_state,
    witness,
)
from qgemrate.sweeps import SweepConfig, Grid, figure_rows
from qgemrate.timedomain import TimeDomainSpec, early_time_exponent, slope_ratio

PHI16 = np.linspace(0.0, 2 * np.pi, 16)
KD16 = np.linspace(0.1, 10.0, 16)


def test_criterion_1_limits(report):
    t0 = time.perf_counter()
    small = large = 0.0
    for p in np.linspace(0.0, 2 * np.pi, 32, endpoint=False):
        small = max(small, abs(rate_closed_form(p, 1e-6).total - (2 + math.cos(p)) / 2))
        large = max(large, abs(rate_closed_form(p, 1e4).total - 1.0))
    dt = time.perf_counter() - t0
    ok = small < 1e-6 and large < 1e-3 and dt < 1.0
    report(1, "small/large kd limits", ok, f"kd=1e-6 dev {small:.2e}, kd=1e4 dev {large:.2e}, {dt:.2f} s")


def test_criterion_2_triple_oracle(report):
    t0 = time.perf_counter()
    gen = quad = 0.0
    spec = QuadratureSpec(64, 128)
    for p in PHI16:
        s = make_qgem_state(p)
        for kd in KD16:
            geom = DipoleGeometry(kd)
            cf = rate_closed_form(p, kd).total
            gen = max(gen, abs(rate_general(s, geom).total - cf))
            quad = max(quad, abs(rate_by_quadrature(s, geom, spec).total - cf))
    dt = time.perf_counter() - t0
    ok = gen < 1e-12 and quad < 1e-8 and dt < 30.0
    report(2, "closed form = general = quadrature", ok, f"general {gen:.2e}, quadrature {quad:.2e}, {dt:.1f} s")


def test_criterion_3_golden_rule(report):
    t0 = time.perf_counter()
    spec = TimeDomainSpec()
    geom = DipoleGeometry(0.5)
    ratio = slope_ratio(make_qgem_state(np.pi), geom, spec)
    expect = rate_closed_form(np.pi, 0.5).total
    rel = abs(ratio / expect - 1.0)
    expo = early_time_exponent(make_qgem_state(np.pi), geom, spec)
    dt = time.perf_counter() - t0
    ok = rel < 0.05 and abs(expo - 2.0) < 0.1 and dt < 120.0
    report(3, "time-domain slope ratio and early exponent", ok,
           f"ratio {ratio:.5f} vs {expect:.5f} (rel {rel:.1e}), exponent {expo:.4f}, {dt:.1f} s")


def test_criterion_4_phenomenology(report):
    header, rows = figure_rows("fig1b", SweepConfig(phases=(0.0, np.pi / 4, np.pi / 2, np.pi, 1.5 * np.pi)))
    by_phase = {}
    for kd, p, r in rows:
        by_phase.setdefault(p, {})[kd] = r
    a = np.array(list(by_phase[np.pi / 2].values()))
    b = np.array(list(by_phase[1.5 * np.pi].values()))
    spread_a = float(np.max(np.abs(a - b)))

    root = find_phase_independent_points((0.1, 20.0))[0]
    at_root = [rate_over_r0(p, root) for p in np.linspace(0, 2 * np.pi, 33)]
    spread_b = float(np.ptp(at_root))

    dr_max = rate_difference(np.pi, 0.0)
    near = rate_difference(np.pi, np.linspace(0.0, 0.1, 101))
    near_dev = float(np.max(np.abs(near / dr_max - 1.0)))
    far_kd = np.linspace(10.0, 1e4, 200001)
    far = np.abs(rate_difference(np.pi, far_kd))
    envelope = 1.5 * (1 + far_kd + far_kd**2) / (2 * far_kd**3)
    decays = bool(np.all(far <= envelope + 1e-15)) and far[far_kd >= 1e3].max() < 0.1 * far[far_kd <= 100].max()

    ok = spread_a < 1e-12 and spread_b < 1e-9 and near_dev < 0.01 and decays
    report(4, "figure phenomenology", ok,
           f"(a) spread {spread_a:.1e}; (b) root {root:.10f} spread {spread_b:.1e}; "
           f"(c) kd<=0.1 dev {near_dev:.2e}, kd>=10 decays {decays}")


def test_criterion_5_witness_concurrence(report):
    w_dev = c_dev = 0.0
    flags_ok = True
    for p in np.linspace(0.0, 2 * np.pi, 64):
        s = make_qgem_state(p)
        w_dev = max(w_dev, abs(witness(s) - (1 - math.cos(p))))
        c_dev = max(c_dev, abs(concurrence(s) - abs(math.sin(p / 2))))
    for p in np.linspace(0.0, 2 * np.pi, 257):
        inside = np.pi / 2 < p < 1.5 * np.pi and not math.isclose(p, 1.5 * np.pi)
        flags_ok &= is_entangled_by_witness(make_qgem_state(p)) == inside
    ok = w_dev < 1e-12 and c_dev < 1e-12 and flags_ok
    report(5, "witness and concurrence identities", ok,
           f"witness {w_dev:.1e}, concurrence {c_dev:.1e}, flag region {'ok' if flags_ok else 'wrong'}")


def test_criterion_6_phase_placement(report):
    outer = full = 0.0
    for p in PHI16:
        for kd in KD16:
            geom = DipoleGeometry(kd)
            for w in ((1, 0, 0, 0), (0, 0, 0, 1)):
                moved = rate_general(make_qgem_state(p, PhasePlacement(w)), geom).total
                outer = max(outer, abs(moved - rate_general(make_qgem_state(0.0, PhasePlacement(w)), geom).total))
            on_du = rate_general(make_qgem_state(p, PhasePlacement((0, 0, 1, 0))), geom).total
            full = max(full, abs(on_du - (1 + 0.75 * math.cos(p) * interference_factor(kd))))
    ok = outer < 1e-12 and full < 1e-12
    report(6, "phase placement invariance", ok, f"outer branches {outer:.1e}, down-up vs cos dependence {full:.1e}")


def test_criterion_7_product_states(report):
    levels = {"(1)": 2.0, "(2)": 1.0, "(3)": 0.5, "(4)": 1.5, "(5)": 0.0}
    kds = np.concatenate([[0.0, 1e-6], np.linspace(0.1, 20, 60), [1e3, 1e6]])
    flat = 0.0
    for label, level in levels.items():
        s = make_product_state(label)
        vals = np.array([rate_general(s, DipoleGeometry(kd)).total for kd in kds])
        flat = max(flat, float(np.max(np.abs(vals - level))))
    cands = [make_qgem_state(np.pi)] + [make_product_state(k) for k in levels]
    rep = discriminate_states(cands, (0.3, 3.0), tolerance=1e-2)
    margin = min(p.margin for p in rep.pairs if p.first == 0)
    ok = flat < 1e-12 and margin > 1e-2
    report(7, "product states flat and distinguishable from QGEM(pi)", ok,
           f"max level deviation {flat:.1e}, min margin {margin:.3f}")


def test_criterion_8_numerical_robustness(report):
    xs = np.linspace(5e-3, 5e-2, 2001)
    s_sw, r_sw = kernel_terms(xs)
    s_cl, r_cl = kernel_terms_closed(xs)
    y = xs * xs
    s_se = 1 - y / 6 + y**2 / 120 - y**3 / 5040
    r_se = -1 / 3 + y / 30 - y**2 / 840 + y**3 / 45360
    kernel_dev = float(max(np.max(np.abs(s_se - s_cl)), np.max(np.abs(r_se - r_cl)),
                           np.max(np.abs(s_sw - s_cl)), np.max(np.abs(r_sw - r_cl))))
    g_dev = float(np.max(np.abs(interference_factor(xs) - 0.5 * (s_cl - r_cl))))
    d = np.array([0.6, 0.0, 0.8])
    dd = np.outer(d, d)
    tau_dev = max(
        float(np.max(np.abs(tau_tensor(DipoleGeometry(x, d)).matrix
                            - ((np.eye(3) - dd) * sc + (np.eye(3) - 3 * dd) * rc))))
        for x, sc, rc in zip(xs[::20], s_cl[::20], r_cl[::20])
    )
    crossover = max(kernel_dev, g_dev, tau_dev)

    kd = np.concatenate([[0.0], np.geomspace(1e-12, 1e6, 4000), np.linspace(0, 50, 2001)])
    phis = np.linspace(0.0, 2 * np.pi, 33)
    grid = rate_over_r0(phis[:, None], kd[None, :])
    finite = bool(np.all(np.isfinite(grid)))
    for x in kd[::97]:
        finite &= bool(np.all(np.isfinite(tau_tensor(DipoleGeometry(x)).matrix)))
        finite &= math.isfinite(rate_general(make_qgem_state(1.0), DipoleGeometry(x)).total)
    ok = crossover < 1e-10 and finite
    report(8, "series/closed-form crossover and finiteness", ok,
           f"crossover max {crossover:.1e}, all finite {finite}")
