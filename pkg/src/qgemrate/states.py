"""Two-qubit pure states, Pauli observables and entanglement measures.

Basis order is fixed everywhere in the package as

    index 0: |up up>    index 1: |up down>
    index 2: |down up>  index 3: |down down>

with the first label belonging to particle 1.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

BASIS_LABELS = ("uu", "ud", "du", "dd")

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"i": SIGMA_I, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Named non-entangled states used for comparison against the entangled family.
PRODUCT_STATES = {
    "(1)": (1.0, 0.0, 0.0, 0.0),
    "(2)": (0.0, 1.0, 0.0, 0.0),
    "(3)": (0.0, 1.0, 0.0, 1.0),
    "(4)": (1.0, 0.0, 1.0, 0.0),
    "(5)": (0.0, 0.0, 0.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Normalized pure state of two spin-1/2 particles.

    Parameters
    ----------
    amplitudes : array_like, shape (4,)
        Complex amplitudes in the fixed basis order. Must already be
        normalized; use :func:`normalized` to build from raw input.
    phase : float, optional
        Entanglement phase the state was built with, if any.
    """

    amplitudes: np.ndarray
    phase: float | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got {a.size}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|a|^2 = {norm!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def __getitem__(self, i):
        return self.amplitudes[i]


def normalized(amplitudes: Sequence[complex], label: str = "") -> TwoQubitState:
    """Build a state from arbitrary (nonzero) amplitudes, normalizing them."""
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if a.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ValueError("amplitudes must be finite")
    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return TwoQubitState(a / norm, label=label)


@dataclass(frozen=True)
class PhasePlacement:
    """Which branches carry the entanglement phase.

    ``weights[n]`` multiplies the phase on branch ``n``, so the branch phase
    is ``weights[n] * phase``. The default puts the whole phase on |down up>.
    """

    weights: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 0.0)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != 4 or not all(math.isfinite(x) for x in w):
            raise ValueError("placement needs 4 finite branch weights")
        object.__setattr__(self, "weights", w)

    @classmethod
    def on_branch(cls, index: int) -> "PhasePlacement":
        if index not in range(4):
            raise ValueError(f"branch index must be 0..3, got {index}")
        w = [0.0] * 4
        w[index] = 1.0
        return cls(tuple(w))

    def phases(self, phase: float) -> np.ndarray:
        return np.asarray(self.weights) * phase


DEFAULT_PLACEMENT = PhasePlacement()


def make_qgem_state(phase: float, placement: PhasePlacement = DEFAULT_PLACEMENT) -> TwoQubitState:
    """Equal-weight superposition of the four branches with branch phases.

    With the default placement this is
    ``(|uu> + |ud> + exp(i phase)|du> + |dd>) / 2``.
    """
    if not math.isfinite(phase):
        raise ValueError(f"phase must be finite, got {phase!r}")
    theta = placement.phases(phase)
    amps = 0.5 * np.exp(1j * theta)
    return TwoQubitState(amps, phase=float(phase), label=f"qgem:{phase!r}")


def product_state(qubit1: Sequence[complex], qubit2: Sequence[complex]) -> TwoQubitState:
    """Normalized tensor product of two single-qubit amplitude pairs (up, down)."""
    q1 = np.asarray(qubit1, dtype=complex)
    q2 = np.asarray(qubit2, dtype=complex)
    if q1.shape != (2,) or q2.shape != (2,):
        raise ValueError("each qubit needs exactly two amplitudes")
    n1, n2 = np.linalg.norm(q1), np.linalg.norm(q2)
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("cannot normalize an all-zero qubit")
    return TwoQubitState(np.kron(q1 / n1, q2 / n2))


def make_product_state(spec) -> TwoQubitState:
    """Named comparison state ``"(1)"``..``"(5)"`` or a pair of qubit amplitudes.

    The named states are |uu>, |ud>, (|ud>+|dd>)/sqrt2, (|uu>+|du>)/sqrt2
    and |dd>.
    """
    if isinstance(spec, str):
        key = spec.strip()
        if not key.startswith("("):
            key = f"({key})"
        if key not in PRODUCT_STATES:
            raise ValueError(f"unknown product state {spec!r}; expected one of {list(PRODUCT_STATES)}")
        return normalized(PRODUCT_STATES[key], label=key)
    try:
        q1, q2 = spec
    except (TypeError, ValueError):
        raise ValueError("product state spec must be a name or two amplitude pairs") from None
    return product_state(q1, q2)


# --- observables -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinObservable:
    """Hermitian operator on the two-qubit space."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"observable must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("observable is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def pauli_product(first: str, second: str) -> SpinObservable:
    """``sigma_first (x) sigma_second``, each one of 'i', 'x', 'y', 'z'."""
    try:
        m = np.kron(_PAULI[first.lower()], _PAULI[second.lower()])
    except KeyError:
        raise ValueError(f"unknown Pauli label in {first!r}, {second!r}") from None
    return SpinObservable(m, name=f"s1{first}*s2{second}")


def expectation(state: TwoQubitState, obs) -> float:
    """Real expectation value <state|obs|state>."""
    if not isinstance(obs, SpinObservable):
        obs = SpinObservable(obs)
    a = state.amplitudes
    value = np.vdot(a, obs.matrix @ a)
    if abs(value.imag) > HERMITIAN_TOL:
        raise ValueError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


WITNESS_TERMS = (pauli_product("x", "z"), pauli_product("y", "y"))


def witness(state: TwoQubitState) -> float:
    """|<s1x s2z> + <s1y s2y>|; values above 1 certify entanglement."""
    return abs(sum(expectation(state, obs) for obs in WITNESS_TERMS))


def concurrence(state: TwoQubitState) -> float:
    """Pure-state concurrence ``2|a_uu a_dd - a_ud a_du|``."""
    a = state.amplitudes
    return float(min(1.0, 2.0 * abs(a[0] * a[3] - a[1] * a[2])))


# roundoff at phase = 3pi/2 puts the witness at 1 + 2e-16
WITNESS_ROUNDOFF = 1e-12


def is_entangled_by_witness(state: TwoQubitState) -> bool:
    return witness(state) > 1.0 + WITNESS_ROUNDOFF


_ANGLE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi such as ``pi/2``, ``3pi/2``, ``0.5*pi``."""
    m = _ANGLE.match(text)
    if m:
        coeff = m.group(1)
        c = -1.0 if coeff == "-" else 1.0 if coeff in ("", "+") else float(coeff)
        return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not an angle: {text!r}") from None


def parse_state_spec(text: str) -> TwoQubitState:
    """Parse the command-line state format.

    Accepted forms::

        qgem:<phase>[,placement=w1,w2,w3,w4]   (phase may be e.g. 3pi/2)
        (1) .. (5)
        re1,im1,re2,im2,re3,im3,re4,im4      (normalized on input)
    """
    text = text.strip()
    if text.lower().startswith("qgem:"):
        body = text[5:]
        placement = DEFAULT_PLACEMENT
        if ",placement=" in body:
            body, _, weights = body.partition(",placement=")
            try:
                placement = PhasePlacement(tuple(float(w) for w in weights.split(",")))
            except ValueError as exc:
                raise ValueError(f"bad placement in {text!r}: {exc}") from None
        try:
            phase = parse_angle(body)
        except ValueError:
            raise ValueError(f"bad phase in {text!r}") from None
        return make_qgem_state(phase, placement)
    if text.startswith("("):
        return make_product_state(text)
    parts = text.split(",")
    if len(parts) != 8:
        raise ValueError(f"cannot parse state {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"cannot parse state {text!r}") from None
    amps = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)]
    return normalized(amps, label=text)
