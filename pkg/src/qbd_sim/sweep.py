"""Steady-state statistics as a function of the Rabi phase.

Sweeping the phase reveals the structure of the detector's stationary
field: the probe atoms keep the cavity close to the vacuum for generic
phases (the mean photon number stays below the bare thermal occupation
everywhere: the device cools the mode), the Fano factor dips below one
(sub-Poissonian) around the qubit-detection phase pi/2, and it peaks
where the absorption from a low Fock level is switched off because that
level's passage is resonant (2 phi sqrt(n) near a multiple of pi).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import ParameterError, TruncationError
from .master_equation import (
    DEFAULT_TAIL_TOL,
    build_generator,
    statistics,
    steady_state_analytic,
)
from .physics import DerivedRates, PhysicalParams


@dataclass(frozen=True)
class PhaseSweepSpec:
    """Phase grid for a sweep; the ``phase`` field of ``params`` is
    ignored (each grid point overrides it)."""

    params: PhysicalParams
    phi_min: float
    phi_max: float
    steps: int
    n_max: int = 30

    def __post_init__(self) -> None:
        if not np.isfinite(self.phi_min) or self.phi_min < 0:
            raise ParameterError(f"phi_min must be >= 0 and finite, got {self.phi_min!r}")
        if not np.isfinite(self.phi_max) or self.phi_min >= self.phi_max:
            raise ParameterError(f"need phi_min < phi_max, got "
                                 f"[{self.phi_min!r}, {self.phi_max!r}]")
        if not (isinstance(self.steps, int) and self.steps >= 2):
            raise ParameterError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (isinstance(self.n_max, int) and self.n_max >= 2):
            raise ParameterError(f"n_max must be an integer >= 2, got {self.n_max!r}")


@dataclass(frozen=True)
class SweepRow:
    phi: float
    mean_n: float
    fano: float | None
    tail_mass: float


class Extremum(NamedTuple):
    phi: float
    kind: str  # "min" or "max"
    value: float


def sweep_point(params: PhysicalParams, rates: DerivedRates, phi: float,
                n_max: int, tail_tol: float | None = DEFAULT_TAIL_TOL) -> SweepRow:
    """Steady-state row at a single phase.  Pure function of its inputs."""
    point = replace(params, phase=phi)
    try:
        dist = steady_state_analytic(build_generator(point, rates, n_max), tail_tol)
    except TruncationError as exc:
        raise TruncationError(f"truncation breach at phi={phi!r}: {exc}") from exc
    stats = statistics(dist)
    return SweepRow(phi=phi, mean_n=stats.mean_n, fano=stats.fano,
                    tail_mass=dist.tail_mass)


def run_sweep(spec: PhaseSweepSpec,
              tail_tol: float | None = DEFAULT_TAIL_TOL) -> list[SweepRow]:
    """One steady-state row per grid point, in ascending phase order.

    Grid points are independent pure-function evaluations, so the output
    is deterministic regardless of how the evaluations are scheduled.
    """
    rates = DerivedRates.from_params(spec.params)
    grid = np.linspace(spec.phi_min, spec.phi_max, spec.steps)
    return [sweep_point(spec.params, rates, float(phi), spec.n_max, tail_tol)
            for phi in grid]


def find_local_extrema(rows: list[SweepRow]) -> list[Extremum]:
    """Interior grid extrema of the Fano column by three-point comparison.

    Plateau ties resolve toward smaller phi (the first point of a flat
    top counts, later ones do not).  Triples containing an undefined Fano
    value are skipped; with fewer than three defined values overall a
    warning is emitted and the result is empty.
    """
    if sum(row.fano is not None for row in rows) < 3:
        warnings.warn("fewer than 3 defined Fano values; no extrema computed",
                      stacklevel=2)
        return []
    extrema = []
    for i in range(1, len(rows) - 1):
        left, mid, right = rows[i - 1].fano, rows[i].fano, rows[i + 1].fano
        if left is None or mid is None or right is None:
            continue
        if mid > left and mid >= right:
            extrema.append(Extremum(rows[i].phi, "max", mid))
        elif mid < left and mid <= right:
            extrema.append(Extremum(rows[i].phi, "min", mid))
    return extrema
