"""Physical parameters, derived rates and single-atom passage physics.

The detector works by sending ground-state probe atoms through a high-Q
microwave cavity.  Each passage consists of a resonant exchange with the
cavity mode, an ideal classical-field transfer of the still-unexcited
ground state to an off-resonant auxiliary level, and a second resonant
exchange.  For a cavity containing exactly ``n`` photons and a single-pass
Rabi phase ``phi`` the atom leaves the cavity in

* the auxiliary state ``f`` with probability  cos^2(phi*sqrt(n)),
* the ground state ``g`` with probability     sin^4(phi*sqrt(n)),
* the excited state ``e`` with probability    (1/4)*sin^2(2*phi*sqrt(n)),

and in the ``e`` case it has absorbed one cavity photon.  The three
probabilities sum to one for every ``n`` and ``phi`` (trigonometric
identity).  At ``phi = pi/2`` the atom distinguishes the vacuum from the
one-photon state without disturbing either, which is the qubit-detection
regime the rest of the package builds on.

Everything in this module is an immutable value or a pure function, safe
to use from any number of threads or processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Physical constants (2018 SI exact values).
PLANCK_CONSTANT = 6.62607015e-34  # J s
BOLTZMANN_CONSTANT = 1.380649e-23  # J/K

# exp() argument beyond which the thermal occupation underflows double
# precision; avoids OverflowError from math.expm1.
_EXP_ARG_MAX = 700.0


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True)
class PhysicalParams:
    """Operating point of the detector.

    Parameters
    ----------
    frequency : float
        Cavity mode frequency in Hz (cycles per second, not angular).
    q_factor : float
        Dimensionless quality factor of the cavity.
    temperature : float
        Bath temperature in kelvin.
    atom_rate : float
        Probe-atom injection rate r in 1/s.
    phase : float
        Single-pass Rabi phase phi in radians.  May exceed pi/2; sweeps
        use the full range.
    """

    frequency: float
    q_factor: float
    temperature: float
    atom_rate: float
    phase: float

    def __post_init__(self) -> None:
        _require(_finite(self.frequency) and self.frequency > 0,
                 f"frequency must be positive and finite, got {self.frequency!r}")
        _require(_finite(self.q_factor) and self.q_factor > 0,
                 f"q_factor must be positive and finite, got {self.q_factor!r}")
        _require(_finite(self.temperature) and self.temperature >= 0,
                 f"temperature must be >= 0 and finite, got {self.temperature!r}")
        _require(_finite(self.atom_rate) and self.atom_rate >= 0,
                 f"atom_rate must be >= 0 and finite, got {self.atom_rate!r}")
        _require(_finite(self.phase) and self.phase >= 0,
                 f"phase must be >= 0 and finite, got {self.phase!r}")

    @classmethod
    def from_geometry(cls, frequency: float, q_factor: float, temperature: float,
                      atom_rate: float, geometry: "InteractionGeometry") -> "PhysicalParams":
        """Build params with the phase derived from an interaction geometry."""
        return cls(frequency, q_factor, temperature, atom_rate, rabi_phase(geometry))


@dataclass(frozen=True)
class InteractionGeometry:
    """Atom-field interaction geometry: effective Rabi frequency (rad/s),
    interaction length (m) and atom velocity (m/s).  Convenience input;
    the phase ``rabi_frequency * length / velocity`` is what the physics
    depends on."""

    rabi_frequency: float
    length: float
    velocity: float

    def __post_init__(self) -> None:
        for name in ("rabi_frequency", "length", "velocity"):
            value = getattr(self, name)
            _require(_finite(value) and value > 0,
                     f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class DerivedRates:
    """Cavity energy decay rate gamma (1/s) and mean thermal photon
    number nbar of the bath at the operating point."""

    gamma: float
    nbar: float

    def __post_init__(self) -> None:
        _require(_finite(self.gamma) and self.gamma > 0,
                 f"gamma must be positive and finite, got {self.gamma!r}")
        _require(_finite(self.nbar) and self.nbar >= 0,
                 f"nbar must be >= 0 and finite, got {self.nbar!r}")

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "DerivedRates":
        return cls(gamma=cavity_decay_rate(params.frequency, params.q_factor),
                   nbar=thermal_occupation(params.frequency, params.temperature))


@dataclass(frozen=True)
class OutcomeWeights:
    """Detection probabilities (w_f, w_g, w_e) for one atom passage."""

    w_f: float
    w_g: float
    w_e: float

    def __post_init__(self) -> None:
        for name in ("w_f", "w_g", "w_e"):
            value = getattr(self, name)
            _require(_finite(value) and -1e-12 <= value <= 1 + 1e-12,
                     f"{name} must lie in [0, 1], got {value!r}")
        total = self.w_f + self.w_g + self.w_e
        _require(abs(total - 1.0) < 1e-12,
                 f"outcome weights must sum to 1, got {total!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_f, self.w_g, self.w_e)


def thermal_occupation(frequency: float, temperature: float) -> float:
    """Mean photon number of a thermal bath mode, 1/(exp(h f / k T) - 1).

    Returns exactly 0.0 at ``temperature == 0``.
    """
    _require(_finite(frequency) and frequency > 0,
             f"frequency must be positive and finite, got {frequency!r}")
    _require(_finite(temperature) and temperature >= 0,
             f"temperature must be >= 0 and finite, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = PLANCK_CONSTANT * frequency / (BOLTZMANN_CONSTANT * temperature)
    if x > _EXP_ARG_MAX:
        return 0.0
    return 1.0 / math.expm1(x)


def cavity_decay_rate(frequency: float, q_factor: float) -> float:
    """Cavity energy decay rate gamma = f/Q (equivalently omega/(2 pi Q))."""
    _require(_finite(frequency) and frequency > 0,
             f"frequency must be positive and finite, got {frequency!r}")
    _require(_finite(q_factor) and q_factor > 0,
             f"q_factor must be positive and finite, got {q_factor!r}")
    return frequency / q_factor


def rabi_phase(geometry: InteractionGeometry) -> float:
    """Single-pass Rabi phase accumulated during one transit,
    ``rabi_frequency * length / velocity``."""
    return geometry.rabi_frequency * geometry.length / geometry.velocity


def passage_weights(n: int, phase: float) -> OutcomeWeights:
    """Atom detection probabilities after one passage with ``n`` photons.

    w_f = cos^2(phi sqrt(n)), w_g = sin^4(phi sqrt(n)),
    w_e = (1/4) sin^2(2 phi sqrt(n)).  The weights always sum to 1; the
    vacuum gives (1, 0, 0) exactly, so an atom can never absorb from an
    empty cavity.  ``phase`` may be any finite real (the weights are even
    in ``phase``); negative photon numbers are rejected.
    """
    _require(isinstance(n, (int, np.integer)) and not isinstance(n, bool) and n >= 0,
             f"photon number must be a nonnegative integer, got {n!r}")
    _require(_finite(phase), f"phase must be finite, got {phase!r}")
    x = phase * math.sqrt(n)
    c = math.cos(x)
    s = math.sin(x)
    return OutcomeWeights(w_f=c * c,
                          w_g=s * s * s * s,
                          w_e=0.25 * math.sin(2.0 * x) ** 2)


def passage_weight_table(n_max: int, phase: float) -> np.ndarray:
    """Vectorized passage weights for n = 0..n_max.

    Returns an ``(n_max + 1, 3)`` array with columns (w_f, w_g, w_e);
    row n equals ``passage_weights(n, phase)``.
    """
    _require(isinstance(n_max, (int, np.integer)) and n_max >= 0,
             f"n_max must be a nonnegative integer, got {n_max!r}")
    _require(_finite(phase), f"phase must be finite, got {phase!r}")
    x = phase * np.sqrt(np.arange(n_max + 1, dtype=np.float64))
    c = np.cos(x)
    s = np.sin(x)
    table = np.column_stack([c * c, s ** 4, 0.25 * np.sin(2.0 * x) ** 2])
    table.flags.writeable = False
    return table
