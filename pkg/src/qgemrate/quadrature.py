"""Brute-force angular quadrature of the golden-rule rate.

This path shares nothing with :mod:`qgemrate.rates` beyond the state and
geometry containers: matrix elements come straight from the 4x4 spin
operators, every direction and both explicit polarizations are summed,
and the separation enters only through plane-wave phases at the two
particle positions. The result is normalized by the same quadrature of a
single excited spin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dipole import DipoleGeometry, DipoleParams, PhotonModeSet, mode_set
from .rates import EmissionChannel, RateResult
from .states import SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z, TwoQubitState

POLAR_BOUNDS = (2, 512)
AZIMUTH_BOUNDS = (4, 1024)


@dataclass(frozen=True)
class QuadratureSpec:
    n_polar: int = 64
    n_azimuth: int = 128
    k: float = 1.0

    def __post_init__(self):
        if not (POLAR_BOUNDS[0] <= self.n_polar <= POLAR_BOUNDS[1]):
            raise ValueError(f"n_polar must be in {POLAR_BOUNDS}, got {self.n_polar}")
        if not (AZIMUTH_BOUNDS[0] <= self.n_azimuth <= AZIMUTH_BOUNDS[1]):
            raise ValueError(f"n_azimuth must be in {AZIMUTH_BOUNDS}, got {self.n_azimuth}")
        if not (self.k > 0):
            raise ValueError("k must be positive")

    def halved(self) -> "QuadratureSpec | None":
        n, m = self.n_polar // 2, self.n_azimuth // 2
        if n < POLAR_BOUNDS[0] or m < AZIMUTH_BOUNDS[0]:
            return None
        return QuadratureSpec(n, m, self.k)


def _excitations(index: int) -> int:
    # number of up spins in basis state 0..3 (uu, ud, du, dd)
    return 2 - bin(index).count("1")


_RWA_MASK = np.array([[_excitations(m) < _excitations(n) for n in range(4)] for m in range(4)])


def lowering_moment_operators(params: DipoleParams = DipoleParams(), frame=None) -> np.ndarray:
    """Energy-lowering part of each particle's moment operator.

    Returns shape ``(2, 3, 4, 4)``: particle, lab Cartesian component,
    then the 4x4 matrix in the two-spin basis. Only elements that lower the
    number of up spins are kept (rotating-wave approximation).
    """
    frame = np.eye(3) if frame is None else np.asarray(frame)
    moment = -params.g_factor * params.bohr_magneton / 2.0
    single = [SIGMA_X, SIGMA_Y, SIGMA_Z]
    ops = np.empty((2, 3, 4, 4), dtype=complex)
    for p in range(2):
        local = [np.kron(s, SIGMA_I) if p == 0 else np.kron(SIGMA_I, s) for s in single]
        for c in range(3):
            # lab component c = sum over frame axes j of frame[j, c] * sigma_j
            op = sum(frame[j, c] * local[j] for j in range(3))
            ops[p, c] = moment * np.where(_RWA_MASK, op, 0.0)
    return ops


def emission_amplitudes(state: TwoQubitState, geom: DipoleGeometry, modes: PhotonModeSet,
                        params: DipoleParams = DipoleParams(), k_scale=1.0):
    """Amplitude to emit into each mode and end in each final spin state.

    Parameters
    ----------
    k_scale : float or ndarray
        Ratio of the photon wavenumber to the one that defines ``geom.kd``.
        An array adds a leading wavenumber axis to the output.

    Returns
    -------
    total, per_particle : ndarray
        ``total`` has shape ``(..., n_dir, 2, 4)`` (direction, polarization,
        final state); ``per_particle`` has an extra leading axis of size 2.
    """
    ops = lowering_moment_operators(params, geom.frame())
    weighted = ops @ state.amplitudes  # (2, 3, 4): particle, component, final
    bfield = modes.field_polarizations()  # (n, 2, 3)
    coupling = np.einsum("nlc,pcf->pnlf", bfield, weighted)
    # particle 1 at -d/2, particle 2 at +d/2; emission carries exp(-i k.r)
    proj = modes.directions @ geom.sep_direction
    ks = np.asarray(k_scale, dtype=float)
    half = 0.5 * geom.kd * ks[..., None] * proj
    phases = np.stack([np.exp(1j * half), np.exp(-1j * half)])  # (2, ..., n)
    per_particle = phases[..., None, None] * coupling.reshape((2,) + (1,) * ks.ndim + coupling.shape[1:])
    return per_particle.sum(axis=0), per_particle


def single_spin_reference(modes: PhotonModeSet, params: DipoleParams = DipoleParams()) -> float:
    """Quadrature of one isolated excited spin's emission: the rate unit."""
    moment = -params.g_factor * params.bohr_magneton / 2.0
    down, up = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    element = moment * np.array([down @ s @ up for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    amp = modes.field_polarizations() @ element
    return float(modes.integrate(np.sum(np.abs(amp) ** 2, axis=1))) / (4.0 * np.pi)


def _quadrature_once(state, geom, spec, params):
    modes = mode_set(spec.k, spec.n_polar, spec.n_azimuth)
    total_amp, parts = emission_amplitudes(state, geom, modes, params)
    unit = single_spin_reference(modes, params)
    norm = 1.0 / (4.0 * np.pi * unit)
    full = norm * modes.integrate(np.sum(np.abs(total_amp) ** 2, axis=1))  # (4,)
    solo = norm * modes.integrate(np.sum(np.abs(parts) ** 2, axis=2).transpose(1, 0, 2))  # (2, 4)
    return full, solo


def rate_by_quadrature(state: TwoQubitState, geom: DipoleGeometry,
                       spec: QuadratureSpec = QuadratureSpec(),
                       params: DipoleParams = DipoleParams()) -> RateResult:
    """Golden-rule rate from explicit direction and polarization sums.

    ``error_estimate`` is the change relative to the half-resolution grid.
    """
    full, solo = _quadrature_once(state, geom, spec, params)
    channels = []
    for f in range(4):
        diag = float(solo[0, f] + solo[1, f])
        if full[f] == 0.0 and diag == 0.0:
            continue
        channels.append(EmissionChannel(f, np.zeros(3, complex), np.zeros(3, complex), diag, float(full[f]) - diag))
    total = float(np.sum(full))
    coarse = spec.halved()
    err = None
    if coarse is not None:
        err = abs(total - float(np.sum(_quadrature_once(state, geom, coarse, params)[0])))
    return RateResult(total, tuple(channels), phase=state.phase, kd=geom.kd, method="quadrature",
                      error_estimate=err, quadrature_order=(spec.n_polar, spec.n_azimuth))
