"""Magnetic-dipole coupling of two spins to the transverse photon field.

Everything here is dimensionless: separations enter only as ``kd`` (photon
wavenumber times distance) and dipole moments in units of the declared
magneton. The only physical constants live in :func:`reference_rate_si`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

SERIES_THRESHOLD = 1e-2
UNIT_TOL = 1e-12

# Taylor coefficients (in x**2) of sin(x)/x and of cos(x)/x**2 - sin(x)/x**3.
_SINC_SERIES = (1.0, -1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0)
_RETARDED_SERIES = (-1.0 / 3.0, 1.0 / 30.0, -1.0 / 840.0, 1.0 / 45360.0)


def _horner(coeffs, y):
    out = np.zeros_like(y)
    for c in reversed(coeffs):
        out = out * y + c
    return out


def kernel_terms(kd):
    """Return ``(sin x / x, cos x / x**2 - sin x / x**3)`` at ``x = kd``.

    Below ``SERIES_THRESHOLD`` both are evaluated from a 4-term Taylor
    series; the closed form loses ~eps/x**2 absolute accuracy there.
    Accepts scalars or arrays; negative input raises ``ValueError``.
    """
    x = np.asarray(kd, dtype=float)
    if np.any(~(x >= 0)):
        raise ValueError(f"kd must be non-negative, got {kd!r}")
    small = x < SERIES_THRESHOLD
    y = x * x
    sinc = _horner(_SINC_SERIES, y)
    ret = _horner(_RETARDED_SERIES, y)
    big = ~small
    if np.any(big):
        xb = x[big] if x.ndim else x
        s = np.sin(xb)
        c = np.cos(xb)
        sinc_b = s / xb
        ret_b = (c - sinc_b) / (xb * xb)
        if x.ndim:
            sinc[big] = sinc_b
            ret[big] = ret_b
        else:
            sinc, ret = sinc_b, ret_b
    if x.ndim == 0:
        return float(sinc), float(ret)
    return sinc, ret


def kernel_terms_closed(kd):
    """Closed-form evaluation with no series branch (for crossover checks)."""
    x = np.asarray(kd, dtype=float)
    return np.sin(x) / x, np.cos(x) / x**2 - np.sin(x) / x**3


def _unit(v, name):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be a finite 3-vector")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector (|v| = {n!r})")
    v = v.copy()
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class DipoleParams:
    """Spin magnetic moment ``-g * magneton * sigma / 2``."""

    g_factor: float = 2.0
    bohr_magneton: float = 1.0
    magneton_unit: str = "u_B"
    spin: float = 0.5

    def __post_init__(self):
        if self.spin != 0.5:
            raise ValueError(f"only spin 1/2 is supported, got {self.spin}")
        if not (math.isfinite(self.g_factor) and math.isfinite(self.bohr_magneton)):
            raise ValueError("g_factor and bohr_magneton must be finite")


@dataclass(frozen=True, eq=False)
class DipoleGeometry:
    """Relative placement of the two dipoles.

    ``sep_direction`` points from particle 1 to particle 2. The default
    puts the separation perpendicular to the spin quantization axis.
    """

    kd: float
    sep_direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    quantization_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        kd = float(self.kd)
        if not (kd >= 0) or not math.isfinite(kd):
            raise ValueError(f"kd must be finite and non-negative, got {self.kd!r}")
        object.__setattr__(self, "kd", kd)
        object.__setattr__(self, "sep_direction", _unit(self.sep_direction, "sep_direction"))
        object.__setattr__(self, "quantization_axis", _unit(self.quantization_axis, "quantization_axis"))

    def with_kd(self, kd: float) -> "DipoleGeometry":
        return DipoleGeometry(kd, self.sep_direction, self.quantization_axis)

    def frame(self) -> np.ndarray:
        """Rows ``(e1, e2, axis)``: a right-handed frame around the quantization axis."""
        axis = self.quantization_axis
        # project x (or y if the axis is close to x) onto the plane; gives identity for axis = z
        helper = np.eye(3)[0] if abs(axis[0]) < 0.9 else np.eye(3)[1]
        e1 = helper - (helper @ axis) * axis
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        return np.array([e1, e2, axis])


def flip_vector(params: DipoleParams = DipoleParams(), direction: str = "up-to-down") -> np.ndarray:
    """``<final| u |initial>`` for one spin flip, in the quantization frame.

    >>> flip_vector(DipoleParams(2.0, 1.0))
    array([-1.-0.j, -0.-1.j, -0.-0.j])
    """
    scale = -params.g_factor * params.bohr_magneton / 2.0
    # <down|sigma|up> = (1, i, 0)
    v = scale * np.array([1.0, 1.0j, 0.0])
    if direction == "up-to-down":
        return v
    if direction == "down-to-up":
        return v.conj()
    raise ValueError(f"direction must be 'up-to-down' or 'down-to-up', got {direction!r}")


def lab_flip_vector(params: DipoleParams, geom: DipoleGeometry, direction: str = "up-to-down") -> np.ndarray:
    """Flip vector rotated from the quantization frame into lab coordinates."""
    return flip_vector(params, direction) @ geom.frame()


@dataclass(frozen=True, eq=False)
class TauTensor:
    matrix: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    kd: float


def tau_tensor(geom: DipoleGeometry) -> TauTensor:
    """Separation kernel ``alpha sin(x)/x + beta (cos x/x^2 - sin x/x^3)``.

    ``alpha = 1 - d d`` and ``beta = 1 - 3 d d`` with ``d`` the unit
    separation. ``(1 / 4pi) * integral dOmega (1 - k k) exp(i k.d)`` equals
    this tensor, and it tends to ``(2/3) * 1`` as ``kd -> 0``.
    """
    d = geom.sep_direction
    dd = np.outer(d, d)
    alpha = np.eye(3) - dd
    beta = np.eye(3) - 3.0 * dd
    sinc, ret = kernel_terms(geom.kd)
    return TauTensor(alpha * sinc + beta * ret, alpha, beta, geom.kd)


def transverse_basis(khat) -> tuple[np.ndarray, np.ndarray]:
    """Unit polar and azimuthal vectors for direction(s) ``khat`` (shape (..., 3)).

    Together with ``khat`` they form a right-handed orthonormal triad, so
    ``e1 x e2 = khat``.
    """
    k = np.asarray(khat, dtype=float)
    theta = np.arccos(np.clip(k[..., 2], -1.0, 1.0))
    phi = np.arctan2(k[..., 1], k[..., 0])
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    e1 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e2 = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return e1, e2


def polarization_sum_identity(khat) -> np.ndarray:
    """Transverse projector ``delta_ab - k_a k_b`` for a unit direction."""
    k = np.asarray(khat, dtype=float).reshape(-1)
    if k.shape != (3,) or abs(np.linalg.norm(k) - 1.0) > UNIT_TOL:
        raise ValueError("khat must be a unit 3-vector")
    return np.eye(3) - np.outer(k, k)


@dataclass(frozen=True, eq=False)
class PhotonModeSet:
    """Directions on the sphere with weights and two transverse polarizations.

    Attributes
    ----------
    directions : ndarray, shape (n, 3)
    weights : ndarray, shape (n,)
        Solid-angle weights; they sum to ``4 pi``.
    polarizations : ndarray, shape (n, 2, 3)
        Electric-field polarization vectors ``e(1), e(2)``.
    k : float
        Wavenumber of the modes.
    volume : float
        Box quantization volume (only the time-domain oracle uses it).
    """

    directions: np.ndarray
    weights: np.ndarray
    polarizations: np.ndarray
    k: float = 1.0
    volume: float = 1.0
    n_polar: int = 0
    n_azimuth: int = 0

    def density(self, k=None):
        """Photon states per unit wavenumber per steradian, ``V k^2 / (2 pi)^3``."""
        k = self.k if k is None else np.asarray(k, dtype=float)
        return self.volume * k**2 / (2.0 * np.pi) ** 3

    def field_polarizations(self) -> np.ndarray:
        """Magnetic-field directions ``khat x e(lambda)`` for each mode."""
        return np.cross(self.directions[:, None, :], self.polarizations)

    def integrate(self, values) -> np.ndarray:
        """Solid-angle integral of per-direction ``values`` (first axis)."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def mode_set(k: float = 1.0, n_polar: int = 32, n_azimuth: int = 64, volume: float = 1.0) -> PhotonModeSet:
    """Gauss-Legendre in ``cos(theta)`` crossed with a uniform azimuth grid."""
    if n_polar < 2 or n_azimuth < 4:
        raise ValueError(f"grid too small: n_polar={n_polar} (>=2), n_azimuth={n_azimuth} (>=4)")
    if not (k > 0):
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    mu, wmu = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    st = np.sqrt(1.0 - mu**2)
    dirs = np.stack(
        [
            np.outer(st, np.cos(phi)),
            np.outer(st, np.sin(phi)),
            np.outer(mu, np.ones_like(phi)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(wmu, np.full(n_azimuth, 2.0 * np.pi / n_azimuth)).reshape(-1)
    e1, e2 = transverse_basis(dirs)
    pols = np.stack([e1, e2], axis=1)
    for arr in (dirs, weights, pols):
        arr.setflags(write=False)
    return PhotonModeSet(dirs, weights, pols, float(k), float(volume), n_polar, n_azimuth)


def reference_rate_si(wavenumber: float, params: DipoleParams = DipoleParams()) -> float:
    """Rate unit ``mu0 g^2 uB^2 k^3 / (24 pi hbar)`` in 1/s, ``k`` in 1/m.

    ``params.bohr_magneton`` is taken as a multiple of the SI Bohr magneton.
    """
    mu = params.bohr_magneton * constants.physical_constants["Bohr magneton"][0]
    return constants.mu_0 * params.g_factor**2 * mu**2 * wavenumber**3 / (24.0 * np.pi * constants.hbar)
