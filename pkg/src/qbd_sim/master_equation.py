"""Birth-death master equation for the probed cavity field.

Because every ingredient of the model (thermal contact and the per-atom
passage map) couples photon-number populations only to neighbouring
populations, the field state is fully described by the diagonal
probability vector p(0..n_max) and its evolution by a tridiagonal
birth-death generator

    up(n)   = gamma * nbar * (n + 1)                      rate n -> n+1
    down(n) = (r/4) sin^2(2 phi sqrt(n)) + gamma (nbar+1) n   rate n -> n-1

The atom-absorption part of ``down`` is the per-passage absorption
probability (1/4) sin^2(2 phi sqrt(n)) times the atom rate r.  Writing it
with the *same* argument ``2 phi sqrt(n)`` as the passage weight is what
makes the generator conserve probability (columns of the tridiagonal
matrix sum to zero) and makes the product-form stationary vector below an
exact kernel element; an absorption term with any other argument would
break both.

The stationary distribution of a birth-death chain satisfies detailed
balance, giving the product formula

    p(n) = p(0) * prod_{m=1..n} up(m-1) / down(m)
         = p(0) * prod_{m=1..n} 4 gamma nbar m
                  / (r sin^2(2 phi sqrt(m)) + 4 gamma (nbar+1) m).

``steady_state_analytic`` evaluates it in log space to avoid underflow;
``evolve`` integrates the full time-dependent equation with a fixed-step
classical fourth-order scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, IntegrationError, ParameterError, TruncationError
from .physics import DerivedRates, PhysicalParams, passage_weight_table

# Tolerances used across the module.
NORMALIZATION_TOL = 1e-10   # |sum(p) - 1| allowed on any distribution
NEGATIVE_HARD_LIMIT = 1e-12  # p(n) below -this is an error, above is round-off
DEFAULT_TAIL_TOL = 1e-10    # p(n_max) allowed after steady-state/long-time calls
FANO_MEAN_EPS = 1e-9        # mean below which the Fano factor is undefined
_STABILITY_FACTOR = 0.1     # dt <= _STABILITY_FACTOR / max total exit rate


def _clamp_roundoff(probs: np.ndarray) -> np.ndarray:
    """Zero out negative round-off (>= -1e-12); reject anything lower."""
    worst = probs.min() if probs.size else 0.0
    if worst < -NEGATIVE_HARD_LIMIT:
        raise ContractError(
            f"probability {worst!r} below -{NEGATIVE_HARD_LIMIT}; not round-off")
    if worst < 0.0:
        probs = np.where(probs < 0.0, 0.0, probs)
    return probs


@dataclass(frozen=True)
class PhotonDistribution:
    """Normalized probability vector over photon numbers 0..n_max.

    The array is validated (finite, nonnegative up to round-off,
    normalized to within 1e-10) and frozen on construction.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64).copy()
        if probs.ndim != 1 or probs.size < 1:
            raise ContractError(f"probs must be a 1-D vector, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ContractError("probs contains non-finite entries")
        probs = _clamp_roundoff(probs)
        total = float(probs.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ContractError(f"probs must sum to 1 within {NORMALIZATION_TOL}, "
                                f"got sum {total!r}")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def _wrap(cls, probs: np.ndarray) -> "PhotonDistribution":
        # Trusted fast path for arrays produced internally (already
        # clamped and normalization-checked); skips validation.
        self = object.__new__(cls)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        return self

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def tail_mass(self) -> float:
        return float(self.probs[-1])

    @classmethod
    def vacuum(cls, n_max: int) -> "PhotonDistribution":
        return cls.fock(0, n_max)

    @classmethod
    def fock(cls, n: int, n_max: int) -> "PhotonDistribution":
        """Point mass on photon number ``n``."""
        if not 0 <= n <= n_max:
            raise ParameterError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
        probs = np.zeros(n_max + 1)
        probs[n] = 1.0
        return cls(probs)

    @classmethod
    def bose_einstein(cls, nbar: float, n_max: int) -> "PhotonDistribution":
        """Thermal (geometric) distribution with mean ``nbar``, truncated
        and renormalized on 0..n_max."""
        if not (math.isfinite(nbar) and nbar >= 0):
            raise ParameterError(f"nbar must be >= 0 and finite, got {nbar!r}")
        if nbar == 0:
            return cls.vacuum(n_max)
        ratio = nbar / (nbar + 1.0)
        probs = ratio ** np.arange(n_max + 1)
        return cls(probs / probs.sum())

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "PhotonDistribution":
        """Normalize a vector of nonnegative weights into a distribution."""
        weights = np.asarray(weights, dtype=np.float64)
        total = weights.sum()
        if not (np.isfinite(total) and total > 0):
            raise ContractError(f"weights must have positive finite sum, got {total!r}")
        return cls(weights / total)


@dataclass(frozen=True)
class BirthDeathGenerator:
    """Tridiagonal generator of the photon birth-death process.

    ``up_rates[n]`` is the n -> n+1 rate and ``down_rates[n]`` the
    n -> n-1 rate, both in 1/s.  The truncation is reflecting:
    ``up_rates[n_max] == 0`` and ``down_rates[0] == 0``, so the implied
    matrix has zero column sums and conserves probability exactly.
    """

    up_rates: np.ndarray
    down_rates: np.ndarray

    def __post_init__(self) -> None:
        up = np.asarray(self.up_rates, dtype=np.float64).copy()
        down = np.asarray(self.down_rates, dtype=np.float64).copy()
        if up.shape != down.shape or up.ndim != 1 or up.size < 3:
            raise ContractError("up_rates and down_rates must be equal-length "
                                "1-D vectors covering n_max >= 2")
        if not (np.all(np.isfinite(up)) and np.all(np.isfinite(down))):
            raise ContractError("rates must be finite")
        if up.min() < 0 or down.min() < 0:
            raise ContractError("rates must be nonnegative")
        if up[-1] != 0.0:
            raise ContractError("up_rates[n_max] must be 0 (reflecting truncation)")
        if down[0] != 0.0:
            raise ContractError("down_rates[0] must be 0")
        up.flags.writeable = False
        down.flags.writeable = False
        object.__setattr__(self, "up_rates", up)
        object.__setattr__(self, "down_rates", down)

    @property
    def n_max(self) -> int:
        return self.up_rates.size - 1

    @cached_property
    def total_exit_rates(self) -> np.ndarray:
        rates = self.up_rates + self.down_rates
        rates.flags.writeable = False
        return rates

    @cached_property
    def max_exit_rate(self) -> float:
        return float(self.total_exit_rates.max())

    @cached_property
    def dense(self) -> np.ndarray:
        """Dense matrix G with dp/dt = G p.  Columns sum to zero."""
        size = self.up_rates.size
        matrix = np.zeros((size, size))
        idx = np.arange(size - 1)
        matrix[idx + 1, idx] = self.up_rates[:-1]
        matrix[idx, idx + 1] = self.down_rates[1:]
        matrix[np.diag_indices(size)] = -(self.up_rates + self.down_rates)
        matrix.flags.writeable = False
        return matrix

    @classmethod
    def thermal(cls, rates: DerivedRates, n_max: int) -> "BirthDeathGenerator":
        """Heat-bath-only generator (no probe atoms)."""
        if n_max < 2:
            raise ParameterError(f"n_max must be >= 2, got {n_max}")
        levels = np.arange(n_max + 1, dtype=np.float64)
        up = rates.gamma * rates.nbar * (levels + 1.0)
        up[-1] = 0.0
        down = rates.gamma * (rates.nbar + 1.0) * levels
        return cls(up, down)


def build_generator(params: PhysicalParams, rates: DerivedRates,
                    n_max: int) -> BirthDeathGenerator:
    """Full generator: heat bath plus atom-induced absorption.

    The absorption rate from level n is the atom rate times the
    per-passage absorption probability, r * (1/4) sin^2(2 phi sqrt(n)).
    """
    if n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")
    thermal = BirthDeathGenerator.thermal(rates, n_max)
    absorb = params.atom_rate * passage_weight_table(n_max, params.phase)[:, 2]
    return BirthDeathGenerator(thermal.up_rates, thermal.down_rates + absorb)


def apply_atom_map(p: PhotonDistribution, phase: float) -> PhotonDistribution:
    """Unconditional effect of one atom passage on the field.

    p'(n) = [cos^2(phi sqrt(n)) + sin^4(phi sqrt(n))] p(n)
            + (1/4) sin^2(2 phi sqrt(n+1)) p(n+1)

    i.e. each level keeps the no-absorption weight of its own passage and
    receives the absorbed fraction of the level above.  The map is exactly
    trace preserving, also on the truncated space (the top level simply
    has no inflow); the output is not renormalized.
    """
    table = passage_weight_table(p.n_max, phase)
    probs = p.probs
    out = (table[:, 0] + table[:, 1]) * probs
    out[:-1] += table[1:, 2] * probs[1:]
    return PhotonDistribution._wrap(_clamp_roundoff(out))


def steady_state_analytic(gen: BirthDeathGenerator,
                          tail_tol: float | None = DEFAULT_TAIL_TOL,
                          ) -> PhotonDistribution:
    """Stationary distribution of ``gen`` via the detailed-balance product.

    Evaluated in log space (ratios can underflow double precision well
    inside physically reasonable truncations).  With nbar = 0 every up
    rate vanishes and the result is the exact vacuum.  Raises
    :class:`TruncationError` if the stationary tail p(n_max) is not below
    ``tail_tol`` (pass ``None`` to skip the check).
    """
    up = gen.up_rates[:-1]
    down = gen.down_rates[1:]
    with np.errstate(divide="ignore"):
        log_ratio = np.log(up) - np.log(down)  # -inf where up == 0
    log_p = np.concatenate([[0.0], np.cumsum(log_ratio)])
    if not math.isfinite(log_p.max()):
        raise ContractError("generator admits no normalizable stationary "
                            "distribution on this truncation (a down rate "
                            "vanishes below a nonzero up rate)")
    with np.errstate(under="ignore"):
        probs = np.exp(log_p - log_p.max())  # exp(-inf) -> 0 exactly
    probs /= probs.sum()
    if tail_tol is not None and probs[-1] >= tail_tol:
        raise TruncationError(
            f"stationary tail p({gen.n_max}) = {probs[-1]:.3e} >= {tail_tol:.1e}; "
            f"increase n_max")
    return PhotonDistribution._wrap(_clamp_roundoff(probs))


def _step_matrix(gen: BirthDeathGenerator, dt: float) -> np.ndarray:
    """One-step propagator of the fixed-step classical 4th-order scheme.

    For the linear system dp/dt = G p the classical Runge-Kutta step
    reduces exactly to the degree-4 Taylor polynomial of exp(dt G); the
    matrix form lets long evolutions run as cheap matrix-vector products.
    Zero column sums of G make the step conserve probability to round-off.
    """
    a = dt * gen.dense
    eye = np.eye(a.shape[0])
    return eye + a @ (eye + (a / 2.0) @ (eye + (a / 3.0) @ (eye + a / 4.0)))


def _evolve_probs(probs: np.ndarray, gen: BirthDeathGenerator, duration: float,
                  dt: float | None = None) -> np.ndarray:
    """Core integrator on a raw probability array (no wrapping/tail check)."""
    if not (math.isfinite(duration) and duration >= 0):
        raise ParameterError(f"duration must be >= 0 and finite, got {duration!r}")
    if duration == 0.0:
        return probs
    if dt is None:
        max_rate = gen.max_exit_rate
        dt = _STABILITY_FACTOR / max_rate if max_rate > 0 else duration
    elif not (math.isfinite(dt) and dt > 0):
        raise ParameterError(f"dt must be positive and finite, got {dt!r}")
    steps = max(1, math.ceil(duration / dt))
    if steps > 2 ** 53:
        raise IntegrationError(
            f"step size underflow: {steps} steps needed to reach t={duration!r} s")
    actual_dt = duration / steps
    matrix = _step_matrix(gen, actual_dt)
    if not np.all(np.isfinite(matrix)):
        raise IntegrationError(f"non-finite propagator at t=0 of {duration!r} s "
                               f"(dt={actual_dt!r})")
    out = probs
    for done in range(steps):
        out = matrix @ out
        if not math.isfinite(out[0]):
            raise IntegrationError(
                f"non-finite state at t={(done + 1) * actual_dt!r} s "
                f"of {duration!r} s")
    if not np.all(np.isfinite(out)):
        raise IntegrationError(f"non-finite state at t={duration!r} s")
    total = float(out.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise IntegrationError(
            f"normalization drifted to {total!r} integrating to t={duration!r} s")
    return _clamp_roundoff(out)


def evolve(p0: PhotonDistribution, gen: BirthDeathGenerator, duration: float,
           dt: float | None = None,
           tail_tol: float | None = DEFAULT_TAIL_TOL) -> PhotonDistribution:
    """Integrate dp/dt = G p for ``duration`` seconds.

    Fixed-step explicit 4th-order integration; unless ``dt`` is given the
    step is bounded by 0.1 / (largest total exit rate), which keeps the
    explicit scheme stable.  ``duration == 0`` returns ``p0`` unchanged.
    Raises :class:`TruncationError` when the final tail p(n_max) is not
    below ``tail_tol`` (pass ``None`` to skip, e.g. for short predictor
    steps inside a filter).
    """
    if p0.n_max != gen.n_max:
        raise ContractError(f"distribution covers n_max={p0.n_max} but generator "
                            f"covers n_max={gen.n_max}")
    if duration == 0.0:
        return p0
    probs = _evolve_probs(p0.probs, gen, duration, dt)
    if tail_tol is not None and probs[-1] >= tail_tol:
        raise TruncationError(
            f"tail p({gen.n_max}) = {probs[-1]:.3e} >= {tail_tol:.1e} after "
            f"evolving {duration!r} s; increase n_max")
    return PhotonDistribution._wrap(probs)


@dataclass(frozen=True)
class FieldStatistics:
    """Moments of a photon-number distribution.  ``fano`` is None when the
    mean is numerically zero (variance/mean undefined at vacuum)."""

    mean_n: float
    variance: float
    std_dev: float
    fano: float | None

    @property
    def fano_defined(self) -> bool:
        return self.fano is not None


def statistics(p: PhotonDistribution, fano_eps: float = FANO_MEAN_EPS) -> FieldStatistics:
    """Mean, variance, standard deviation and Fano factor of ``p``."""
    levels = np.arange(p.probs.size, dtype=np.float64)
    mean = float(levels @ p.probs)
    second = float((levels * levels) @ p.probs)
    variance = max(second - mean * mean, 0.0)
    fano = variance / mean if mean >= fano_eps else None
    return FieldStatistics(mean_n=mean, variance=variance,
                           std_dev=math.sqrt(variance), fano=fano)
