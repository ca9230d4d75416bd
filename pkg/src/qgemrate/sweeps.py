"""Parameter sweeps behind the ``figure`` and ``witness`` commands.

Each sweep returns a header and a list of row tuples in a fixed order, so
the same arguments always give byte-identical CSV.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dipole import DipoleGeometry, DipoleParams
from .quadrature import QuadratureSpec, rate_by_quadrature
from .rates import find_phase_independent_points, rate_difference, rate_general, rate_over_r0
from .states import PRODUCT_STATES, concurrence, is_entangled_by_witness, make_product_state, make_qgem_state, witness
from .timedomain import TimeDomainSpec, simulate_time_domain

METHODS = ("closed-form", "general", "quadrature", "time-domain")

FIG1A_KD = (0.3, 1.0, 3.0, 10.0)
FIG1B_PHASES = (0.0, math.pi / 4, math.pi / 2, math.pi, 3 * math.pi / 2)
FIG2_PHASES = (math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)

FIGURES = {
    "fig1a": ("phi", "kd", "R_over_R0"),
    "fig1b": ("kd", "phi", "R_over_R0"),
    "fig2": ("kd", "phi", "dR_over_R0"),
    "fig3": ("kd", "state_label", "R_over_R0"),
}


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"grid count must be >= 2, got {self.count}")
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log grids need positive bounds")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Everything a figure sweep needs besides its name."""

    phi_grid: Grid = Grid(0.0, 2 * math.pi, 65)
    kd_grid: Grid = Grid(0.0, 20.0, 401)
    fixed_kd: tuple[float, ...] = FIG1A_KD
    phases: tuple[float, ...] | None = None
    method: str = "closed-form"
    geometry: DipoleGeometry = field(default_factory=lambda: DipoleGeometry(0.0))
    params: DipoleParams = DipoleParams()
    quadrature: QuadratureSpec = QuadratureSpec()
    time_domain: TimeDomainSpec = TimeDomainSpec()
    include_roots: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")


def _ordered_map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def qgem_rates(phases, kds, cfg: SweepConfig) -> np.ndarray:
    """Rates of the entangled state on the outer product ``phases x kds``."""
    phases = np.asarray(phases, dtype=float)
    kds = np.asarray(kds, dtype=float)
    if cfg.method == "closed-form":
        return rate_over_r0(phases[:, None], kds[None, :])
    points = [(p, k) for p in phases for k in kds]

    def one(pk):
        state = make_qgem_state(pk[0])
        geom = cfg.geometry.with_kd(pk[1])
        if cfg.method == "general":
            return rate_general(state, geom, cfg.params).total
        if cfg.method == "quadrature":
            return rate_by_quadrature(state, geom, cfg.quadrature, cfg.params).total
        return simulate_time_domain(state, geom, cfg.time_domain, cfg.params).slope_r0

    return np.array(_ordered_map(one, points, cfg.workers)).reshape(len(phases), len(kds))


def _kd_values(cfg: SweepConfig) -> np.ndarray:
    kds = cfg.kd_grid.values()
    if cfg.include_roots:
        lo, hi = max(kds.min(), 1e-3), kds.max()
        if hi > lo:
            kds = np.union1d(kds, find_phase_independent_points((lo, hi)))
    return kds


def figure_rows(name: str, cfg: SweepConfig = SweepConfig()):
    """Header and rows for one of ``fig1a``, ``fig1b``, ``fig2``, ``fig3``."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    header = FIGURES[name]
    rows = []
    if name == "fig1a":
        phis = cfg.phi_grid.values()
        kds = np.asarray(cfg.fixed_kd, dtype=float)
        r = qgem_rates(phis, kds, cfg)
        for j, kd in enumerate(kds):
            rows.extend((float(p), float(kd), float(r[i, j])) for i, p in enumerate(phis))
    elif name == "fig1b":
        phases = np.asarray(cfg.phases if cfg.phases is not None else FIG1B_PHASES, dtype=float)
        kds = _kd_values(cfg)
        r = qgem_rates(phases, kds, cfg)
        for i, p in enumerate(phases):
            rows.extend((float(kd), float(p), float(r[i, j])) for j, kd in enumerate(kds))
    elif name == "fig2":
        phases = np.asarray(cfg.phases if cfg.phases is not None else FIG2_PHASES, dtype=float)
        kds = _kd_values(cfg)
        if cfg.method == "closed-form":
            dr = rate_difference(phases[:, None], kds[None, :])
        else:
            both = qgem_rates(np.concatenate([[0.0], phases]), kds, cfg)
            dr = both[0][None, :] - both[1:]
        for i, p in enumerate(phases):
            rows.extend((float(kd), float(p), float(dr[i, j])) for j, kd in enumerate(kds))
    else:
        kds = cfg.kd_grid.values()
        for label in PRODUCT_STATES:
            state = make_product_state(label)
            vals = _ordered_map(lambda kd: rate_general(state, cfg.geometry.with_kd(kd), cfg.params).total,
                                list(kds), cfg.workers)
            rows.extend((float(kd), label, float(v)) for kd, v in zip(kds, vals))
    return header, rows


def witness_rows(phi_grid: Grid):
    header = ("phi", "witness", "concurrence", "entangled_flag")
    rows = []
    for phi in phi_grid.values():
        s = make_qgem_state(float(phi))
        w = witness(s)
        rows.append((float(phi), w, concurrence(s), is_entangled_by_witness(s)))
    return header, rows


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path_or_file, header, rows) -> None:
    """Write with a header row and round-trip float formatting."""
    def _emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(x) for x in row])

    if hasattr(path_or_file, "write"):
        _emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            _emit(fh)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]
