"""Golden-rule photon emission rates of two-spin states.

All rates are dimensionless, in units of ``R0``, the emission rate of one
isolated excited spin (``mu0 g^2 uB^2 k^3 / (24 pi hbar)``).

Only energy-lowering flips (up -> down) emit. A final spin configuration
``f`` may be reached from two different initial branches, one through each
particle; those two amplitudes interfere through the separation kernel,
which is the only place ``kd`` enters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import optimize

from .dipole import (
    DipoleGeometry,
    DipoleParams,
    kernel_terms,
    lab_flip_vector,
    tau_tensor,
)
from .states import BASIS_LABELS, DEFAULT_PLACEMENT, PhasePlacement, TwoQubitState, make_qgem_state

ROOT_SCAN_STEP = 0.05
ROOT_XTOL = 1e-12


def source_branch(final: int, particle: int) -> int | None:
    """Initial basis index that reaches ``final`` by flipping ``particle`` (1 or 2) down.

    Returns ``None`` when that particle is up in ``final``.
    """
    bit = 2 if particle == 1 else 1
    if not final & bit:
        return None
    return final - bit


@dataclass(frozen=True, eq=False)
class EmissionChannel:
    """Decay into one final spin configuration.

    ``weighted_1`` / ``weighted_2`` are the initial-branch amplitude times
    the flip vector of particle 1 / 2 (zero if no branch feeds ``final``
    through that particle).
    """

    final: int
    weighted_1: np.ndarray
    weighted_2: np.ndarray
    diagonal: float
    cross: float

    @property
    def label(self) -> str:
        return BASIS_LABELS[self.final]

    @property
    def rate(self) -> float:
        return self.diagonal + self.cross


@dataclass(frozen=True, eq=False)
class RateResult:
    total: float
    channels: tuple[EmissionChannel, ...] = ()
    phase: float | None = None
    kd: float | None = None
    method: str = "closed-form"
    error_estimate: float | None = None
    quadrature_order: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.total)


def _check_kd(kd):
    x = np.asarray(kd, dtype=float)
    if np.any(~(x >= 0)):
        raise ValueError(f"kd must be non-negative, got {kd!r}")
    return x


def interference_factor(kd):
    """``G(x) = [sin x + x (x sin x - cos x)] / (2 x^3)``, with ``G(0) = 2/3``.

    Equal to the kernel contracted with the flip vector when the separation
    is perpendicular to the quantization axis, divided by ``|v|^2``.
    Vectorized; uses the series branch near zero.
    """
    sinc, ret = kernel_terms(kd)
    return 0.5 * (sinc - ret)


def rate_over_r0(phase, kd):
    """Vectorized ``1 + (3/4) cos(phase) G(kd)``."""
    return 1.0 + 0.75 * np.cos(phase) * interference_factor(kd)


def rate_closed_form(phase: float, kd: float) -> RateResult:
    """Closed-form rate of the equal-weight entangled state, phase on |down up>."""
    _check_kd(kd)
    g = float(interference_factor(kd))
    cross = 0.75 * math.cos(phase) * g
    zero = np.zeros(3, dtype=complex)
    # decomposition: uu feeds ud and du with weight 1/4 each; ud and du both feed dd
    channels = (
        EmissionChannel(1, zero, zero, 0.25, 0.0),
        EmissionChannel(2, zero, zero, 0.25, 0.0),
        EmissionChannel(3, zero, zero, 0.5, cross),
    )
    total = 1.0 + cross
    return RateResult(total, channels, phase=float(phase), kd=float(kd), method="closed-form")


def build_channels(state: TwoQubitState, geom: DipoleGeometry, params: DipoleParams = DipoleParams()):
    """Per-final-state emission channels of ``state`` (only reachable ones)."""
    v = lab_flip_vector(params, geom)
    norm2 = float(np.vdot(v, v).real)
    if norm2 == 0.0:
        raise ValueError("flip vector vanishes; g_factor and bohr_magneton must be nonzero")
    tau = tau_tensor(geom).matrix
    scale = 1.5 / norm2
    a = state.amplitudes
    zero = np.zeros(3, dtype=complex)
    channels = []
    for final in range(4):
        n1 = source_branch(final, 1)
        n2 = source_branch(final, 2)
        if n1 is None and n2 is None:
            continue
        w1 = a[n1] * v if n1 is not None else zero
        w2 = a[n2] * v if n2 is not None else zero
        diagonal = scale * (2.0 / 3.0) * float(np.vdot(w1, w1).real + np.vdot(w2, w2).real)
        cross = 0.0
        if n1 is not None and n2 is not None:
            cross = scale * 2.0 * float(np.real(w2 @ tau @ w1.conj()))
        channels.append(EmissionChannel(final, w1, w2, diagonal, cross))
    return tuple(channels)


def rate_general(state: TwoQubitState, geom: DipoleGeometry, params: DipoleParams = DipoleParams()) -> RateResult:
    """Channel-resolved rate of an arbitrary pure two-spin state."""
    channels = build_channels(state, geom, params)
    total = math.fsum(c.diagonal + c.cross for c in channels)
    return RateResult(total, channels, phase=state.phase, kd=geom.kd, method="general-analytic")


def rate_limits(phase: float) -> tuple[float, float]:
    """Small- and large-separation limits ``((2 + cos phase) / 2, 1)``."""
    return (2.0 + math.cos(phase)) / 2.0, 1.0


def rate_difference(phase, kd):
    """``R(0, kd) - R(phase, kd)`` in ``R0`` units; vectorized."""
    return 0.75 * (1.0 - np.cos(phase)) * interference_factor(kd)


def find_phase_independent_points(kd_range: tuple[float, float], max_roots: int | None = None) -> list[float]:
    """Zeros of ``G`` in ``kd_range``, where every phase gives the same rate.

    Brackets sign changes on a uniform scan of step 0.05, then bisects.
    """
    lo, hi = (float(x) for x in kd_range)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi <= lo:
        raise ValueError(f"need a finite range 0 < lo < hi, got {kd_range!r}")
    n = max(2, int(math.ceil((hi - lo) / ROOT_SCAN_STEP)) + 1)
    grid = np.linspace(lo, hi, n)
    values = interference_factor(grid)
    roots = [float(x) for x, g in zip(grid, values) if g == 0.0]
    for i in np.flatnonzero(values[:-1] * values[1:] < 0.0):
        roots.append(optimize.bisect(interference_factor, grid[i], grid[i + 1], xtol=ROOT_XTOL))
    roots.sort()
    return roots if max_roots is None else roots[:max_roots]


def phase_placement_sensitivity(
    phase: float,
    placement: PhasePlacement = DEFAULT_PLACEMENT,
    kd: float = 0.5,
    geom: DipoleGeometry | None = None,
) -> float:
    """How much moving the phase onto ``placement``'s branches changes the rate."""
    geom = DipoleGeometry(kd) if geom is None else geom.with_kd(kd)
    with_phase = rate_general(make_qgem_state(phase, placement), geom).total
    without = rate_general(make_qgem_state(0.0, placement), geom).total
    return abs(with_phase - without)


@dataclass(frozen=True)
class PairComparison:
    first: int
    second: int
    margin: float
    distinguishable: bool


@dataclass(frozen=True, eq=False)
class DiscriminationReport:
    kd_pair: tuple[float, float]
    tolerance: float
    signatures: np.ndarray  # shape (n_candidates, 2)
    pairs: tuple[PairComparison, ...]

    def all_distinguishable(self) -> bool:
        return all(p.distinguishable for p in self.pairs)


def discriminate_states(
    candidates,
    kd_pair: tuple[float, float],
    tolerance: float = 1e-3,
    geom: DipoleGeometry | None = None,
    params: DipoleParams = DipoleParams(),
) -> DiscriminationReport:
    """Compare two-separation rate signatures of every candidate pair.

    A pair is distinguishable when the rates differ by more than
    ``tolerance`` at either separation.
    """
    kd1, kd2 = (float(x) for x in kd_pair)
    if kd1 == kd2:
        raise ValueError("the two kd values must differ")
    if kd1 < 0 or kd2 < 0:
        raise ValueError("kd values must be non-negative")
    base = DipoleGeometry(0.0) if geom is None else geom
    sig = np.array(
        [[rate_general(s, base.with_kd(kd), params).total for kd in (kd1, kd2)] for s in candidates]
    ).reshape(-1, 2)
    pairs = []
    for i, j in combinations(range(len(sig)), 2):
        margin = float(np.max(np.abs(sig[i] - sig[j])))
        pairs.append(PairComparison(i, j, margin, margin > tolerance))
    return DiscriminationReport((kd1, kd2), float(tolerance), sig, tuple(pairs))
