"""Cross-checks between the closed form, the channel formula and the oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dipole import DipoleGeometry
from .quadrature import QuadratureSpec, rate_by_quadrature
from .rates import rate_closed_form, rate_general
from .states import make_product_state, make_qgem_state
from .timedomain import TimeDomainSpec, early_time_exponent, simulate_time_domain

TOL_GENERAL = 1e-12
TOL_QUADRATURE = 1e-8
TOL_TIME_RATIO = 0.05
TOL_EXPONENT = 0.1


@dataclass
class SuiteResult:
    name: str
    max_deviation: float
    tolerance: float
    worst: list = field(default_factory=list)  # (deviation, description), largest first

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def summary(self) -> str:
        status = "within" if self.passed else "EXCEEDS"
        return f"{self.name}: max {self.max_deviation:.3g} {status} {self.tolerance:g}"


def default_grid(n_phi: int = 16, n_kd: int = 16):
    return np.linspace(0.0, 2 * math.pi, n_phi), np.linspace(0.1, 10.0, n_kd)


def _suite(name, tol, cases, n_worst=5):
    devs = sorted(cases, key=lambda c: -c[0])
    return SuiteResult(name, devs[0][0] if devs else 0.0, tol, devs[:n_worst])


def general_vs_closed(phis, kds, tol=TOL_GENERAL) -> SuiteResult:
    cases = []
    for p in phis:
        state = make_qgem_state(float(p))
        for kd in kds:
            dev = abs(rate_general(state, DipoleGeometry(float(kd))).total - rate_closed_form(p, kd).total)
            cases.append((dev, f"phi={p:.6g} kd={kd:.6g}"))
    return _suite("closed-form vs general", tol, cases)


def quadrature_vs_closed(phis, kds, spec=QuadratureSpec(), tol=TOL_QUADRATURE) -> SuiteResult:
    cases = []
    for p in phis:
        state = make_qgem_state(float(p))
        for kd in kds:
            q = rate_by_quadrature(state, DipoleGeometry(float(kd)), spec).total
            cases.append((abs(q - rate_closed_form(p, kd).total), f"phi={p:.6g} kd={kd:.6g}"))
    return _suite(f"closed-form vs quadrature {spec.n_polar}x{spec.n_azimuth}", tol, cases)


def time_domain_ratios(kd=0.5, phases=(0.0, math.pi / 2, math.pi), spec=TimeDomainSpec(),
                       tol=TOL_TIME_RATIO) -> SuiteResult:
    """Relative error of simulated slope ratios against the closed-form ratio."""
    geom = DipoleGeometry(kd)
    ref = simulate_time_domain(make_product_state("(2)"), geom, spec).slope
    cases = []
    for p in phases:
        ratio = simulate_time_domain(make_qgem_state(p), geom, spec).slope / ref
        expect = rate_closed_form(p, kd).total
        cases.append((abs(ratio / expect - 1.0), f"phi={p:.6g} kd={kd:g} ratio={ratio:.6g} expected={expect:.6g}"))
    return _suite("time-domain slope ratio vs closed-form (relative)", tol, cases)


def time_domain_exponent(kd=0.5, spec=TimeDomainSpec(), tol=TOL_EXPONENT) -> SuiteResult:
    e = early_time_exponent(make_qgem_state(math.pi), DipoleGeometry(kd), spec)
    return SuiteResult("time-domain early-time exponent vs 2", abs(e - 2.0), tol, [(abs(e - 2.0), f"exponent={e:.6g}")])


def run_all(quadrature=QuadratureSpec(), time_domain: bool = False, td_spec=TimeDomainSpec(),
            tol_general=TOL_GENERAL, tol_quadrature=TOL_QUADRATURE, tol_time=TOL_TIME_RATIO,
            n_phi: int = 16, n_kd: int = 16) -> list[SuiteResult]:
    phis, kds = default_grid(n_phi, n_kd)
    results = [
        general_vs_closed(phis, kds, tol_general),
        quadrature_vs_closed(phis, kds, quadrature, tol_quadrature),
    ]
    if time_domain:
        results.append(time_domain_ratios(spec=td_spec, tol=tol_time))
        results.append(time_domain_exponent(spec=td_spec))
    return results
