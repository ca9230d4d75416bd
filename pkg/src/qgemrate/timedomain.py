"""First-order time evolution over a discrete set of photon modes.

The no-photon amplitudes stay at their initial values; each photon-branch
amplitude obeys ``da/dt = -i M exp(i delta t)`` with ``M`` the mode's
coupling and ``delta`` its detuning from the spin transition. Because the
equation is linear in ``M``, every mode's amplitude is ``M * F(delta, t)``
with a single universal response ``F``, evaluated either exactly or by RK4.

Units: ``hbar = c = 1`` and the transition wavenumber is 1, so times are
in units of ``1 / (c k)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dipole import DipoleGeometry, DipoleParams, mode_set
from .quadrature import emission_amplitudes, single_spin_reference
from .states import BASIS_LABELS, TwoQubitState, make_product_state

MAX_PROBABILITY = 0.1
MIN_FIT_SAMPLES = 10


class TimeDomainError(RuntimeError):
    """A time-domain run violated one of its validity conditions."""


@dataclass(frozen=True)
class TimeDomainSpec:
    """Mode discretization and time grid.

    ``detuning_window`` is the half-width of the wavenumber band as a
    fraction of resonance. ``rate_scale`` is the golden-rule decay rate of
    one isolated excited spin in units of ``c k``; it fixes the coupling
    strength and so the size of ``P(t)``. ``box_length`` sets the
    quantization volume, which cancels from every probability.
    """

    n_k: int = 201
    detuning_window: float = 0.2
    n_polar: int = 16
    n_azimuth: int = 32
    box_length: float = 100.0
    horizon: float = 400.0
    n_samples: int = 401
    fit_window: tuple[float, float] = (0.25, 0.75)
    rate_scale: float = 1e-4
    integrator: str = "exact"
    rk4_substeps: int = 20

    def __post_init__(self):
        if not (0.0 < self.detuning_window < 1.0):
            raise ValueError("detuning_window must lie in (0, 1) so the band contains resonance")
        if self.n_k < 3:
            raise ValueError("need at least 3 wavenumbers")
        if self.horizon <= 0 or self.n_samples < 2:
            raise ValueError("horizon must be positive and n_samples >= 2")
        if self.integrator not in ("exact", "rk4"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.rate_scale <= 0 or self.box_length <= 0:
            raise ValueError("rate_scale and box_length must be positive")

    @property
    def wavenumbers(self) -> np.ndarray:
        w = self.detuning_window
        return np.linspace(1.0 - w, 1.0 + w, self.n_k)

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / (2.0 * self.detuning_window / (self.n_k - 1))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_samples)

    @property
    def volume(self) -> float:
        return self.box_length**3


@dataclass(frozen=True, eq=False)
class ProbabilityTrace:
    times: np.ndarray
    probability: np.ndarray
    per_channel: np.ndarray  # (n_t, 4), indexed by final spin state
    slope: float
    residual: float
    slope_r0: float
    fit_window: tuple[float, float]
    no_photon_norm: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "P"] + [f"P_{lab}" for lab in BASIS_LABELS])
            for t, p, row in zip(self.times, self.probability, self.per_channel):
                writer.writerow([repr(float(t)), repr(float(p))] + [repr(float(x)) for x in row])


def exact_response(detuning, times) -> np.ndarray:
    """``F = (1 - exp(i delta t)) / delta``, shape ``(len(times), len(detuning))``."""
    d = np.asarray(detuning, dtype=float)[None, :]
    t = np.asarray(times, dtype=float)[:, None]
    half = 0.5 * d * t
    return -1j * t * np.exp(1j * half) * np.sinc(half / np.pi)


def rk4(rhs, y0, times, substeps: int = 1) -> np.ndarray:
    """Classic fixed-step RK4, sampled at ``times`` with ``substeps`` steps per interval."""
    y = np.array(y0, dtype=complex)
    out = np.empty((len(times),) + y.shape, dtype=complex)
    out[0] = y
    for i in range(1, len(times)):
        t = times[i - 1]
        h = (times[i] - t) / substeps
        for _ in range(substeps):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        out[i] = y
    return out


def integrated_response(detuning, times, substeps: int = 20) -> np.ndarray:
    """``F`` from stepping ``dF/dt = -i exp(i delta t)`` with RK4."""
    d = np.asarray(detuning, dtype=float)
    return rk4(lambda t, _y: -1j * np.exp(1j * d * t), np.zeros(d.shape, complex), np.asarray(times, float), substeps)


def mode_couplings(state: TwoQubitState, geom: DipoleGeometry, spec: TimeDomainSpec,
                   params: DipoleParams = DipoleParams()):
    """Per-mode couplings ``M`` and per-mode state counts.

    Returns ``(coupling, counts)`` with ``coupling`` of shape
    ``(n_k, n_dir, 2, 4)`` and ``counts`` of shape ``(n_k, n_dir)``: the
    number of field modes each grid point stands for, ``rho(k) dk dOmega``.
    """
    modes = mode_set(1.0, spec.n_polar, spec.n_azimuth, volume=spec.volume)
    ks = spec.wavenumbers
    dk = ks[1] - ks[0]
    amps, _ = emission_amplitudes(state, geom, modes, params, k_scale=ks)
    # coupling constant chosen so a lone excited spin decays at rate_scale
    unit = single_spin_reference(modes, params)
    strength2 = spec.rate_scale * math.pi / unit
    field = np.sqrt(strength2 * ks / spec.volume)  # B-field amplitude ~ sqrt(k / V)
    coupling = field[:, None, None, None] * amps
    counts = modes.density(ks)[:, None] * modes.weights[None, :] * dk
    return coupling, counts


def photon_probabilities(state: TwoQubitState, geom: DipoleGeometry, spec: TimeDomainSpec,
                         times=None, params: DipoleParams = DipoleParams(), integrator=None):
    """Per-final-state emitted-photon probability at each time, shape ``(n_t, 4)``."""
    times = spec.times if times is None else np.asarray(times, dtype=float)
    integrator = integrator or spec.integrator
    coupling, counts = mode_couplings(state, geom, spec, params)
    detuning = spec.wavenumbers - 1.0
    if integrator == "exact":
        resp = exact_response(detuning, times)
    else:
        resp = integrated_response(detuning, times, spec.rk4_substeps)
    # sum |M|^2 over directions and polarizations first; F depends only on k
    weight = np.einsum("kd,kdlf->kf", counts, np.abs(coupling) ** 2)
    return np.abs(resp) ** 2 @ weight


def fit_linear_slope(times, values, window) -> tuple[float, float]:
    """Least-squares slope of ``values`` over ``window = (t1, t2)``.

    The residual is the RMS deviation from the line divided by the fitted
    range of the line (0 when the data are flat to rounding).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    t1, t2 = window
    mask = (t >= t1) & (t <= t2)
    if mask.sum() < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples in the fit window, got {int(mask.sum())}")
    tw, yw = t[mask], y[mask]
    slope, intercept = np.polyfit(tw, yw, 1)
    rms = math.sqrt(float(np.mean((yw - (slope * tw + intercept)) ** 2)))
    span = abs(slope) * (tw[-1] - tw[0])
    # a rounding-level span means the data are flat
    floor = 64 * np.finfo(float).eps * max(float(np.max(np.abs(yw))), np.finfo(float).tiny)
    if span <= floor:
        residual = 0.0 if rms <= floor else math.inf
    else:
        residual = rms / span
    return float(slope), residual


def simulate_time_domain(state: TwoQubitState, geom: DipoleGeometry, spec: TimeDomainSpec = TimeDomainSpec(),
                         params: DipoleParams = DipoleParams()) -> ProbabilityTrace:
    """Evolve the photon branch and fit the emission rate from ``P(t)``.

    Raises
    ------
    TimeDomainError
        If the fit window is degenerate, still inside the initial transient,
        or holds fewer than 10 samples; if the horizon reaches the mode
        recurrence time; or if ``P(T)`` exceeds 0.1.
    """
    f1, f2 = spec.fit_window
    if not (0.0 <= f1 < f2 <= 1.0):
        raise TimeDomainError(f"degenerate fit window {spec.fit_window!r}")
    t1, t2 = f1 * spec.horizon, f2 * spec.horizon
    transient = 4.0 / spec.detuning_window
    if t1 < transient:
        raise TimeDomainError(f"fit window starts at t={t1:g}, inside the quadratic transient (< {transient:g})")
    if spec.horizon >= spec.recurrence_time:
        raise TimeDomainError(f"horizon {spec.horizon:g} reaches the mode recurrence time {spec.recurrence_time:g}")
    times = spec.times
    n_fit = int(np.sum((times >= t1) & (times <= t2)))
    if n_fit < MIN_FIT_SAMPLES:
        raise TimeDomainError(f"only {n_fit} samples in the fit window, need {MIN_FIT_SAMPLES}")

    per_channel = photon_probabilities(state, geom, spec, times, params)
    total = per_channel.sum(axis=1)
    if total[-1] > MAX_PROBABILITY:
        raise TimeDomainError(f"P(T) = {total[-1]:.3g} exceeds {MAX_PROBABILITY}; first order no longer valid")
    slope, residual = fit_linear_slope(times, total, (t1, t2))
    return ProbabilityTrace(
        times=times,
        probability=total,
        per_channel=per_channel,
        slope=slope,
        residual=residual,
        slope_r0=slope / spec.rate_scale,
        fit_window=(t1, t2),
        no_photon_norm=float(np.sum(np.abs(state.amplitudes) ** 2)),
    )


def early_time_exponent(state: TwoQubitState, geom: DipoleGeometry, spec: TimeDomainSpec = TimeDomainSpec(),
                        span=(0.01, 0.1), n: int = 32, params: DipoleParams = DipoleParams()) -> float:
    """Power-law exponent of ``P(t)`` well before the inverse bandwidth.

    ``span`` is given in units of ``1 / detuning_window``.
    """
    scale = 1.0 / spec.detuning_window
    times = np.geomspace(span[0] * scale, span[1] * scale, n)
    p = photon_probabilities(state, geom, spec, times, params).sum(axis=1)
    if np.any(p <= 0):
        raise TimeDomainError("no emission; exponent undefined")
    return float(np.polyfit(np.log(times), np.log(p), 1)[0])


def slope_ratio(state: TwoQubitState, geom: DipoleGeometry, spec: TimeDomainSpec = TimeDomainSpec(),
                reference: TwoQubitState | None = None, params: DipoleParams = DipoleParams()) -> float:
    """Fitted slope of ``state`` over that of a lone excited spin, same spec and geometry."""
    reference = make_product_state("(2)") if reference is None else reference
    num = simulate_time_domain(state, geom, spec, params).slope
    den = simulate_time_domain(reference, geom, spec, params).slope
    return num / den
