"""qbd_sim: simulator of a cavity qubit detector probed by ground-state atoms.

The package is organized bottom-up:

* :mod:`qbd_sim.physics` - parameters, derived rates, per-passage outcome
  weights (pure functions on immutable values).
* :mod:`qbd_sim.master_equation` - photon-number distributions, the
  birth-death generator, its analytic steady state, time integration and
  field statistics.
* :mod:`qbd_sim.sweep` - stationary mean/Fano structure over a phase grid.
* :mod:`qbd_sim.trajectory` - seeded Monte-Carlo detection records with an
  observer-side Bayesian filter.
* :mod:`qbd_sim.cli` - the ``qbd-sim`` command-line front end.
"""

__version__ = "0.1.0"

from .errors import (
    ContractError,
    ImpossibleOutcomeError,
    IntegrationError,
    ParameterError,
    QbdSimError,
    TruncationError,
    UsageError,
)
from .master_equation import (
    BirthDeathGenerator,
    FieldStatistics,
    PhotonDistribution,
    apply_atom_map,
    build_generator,
    evolve,
    statistics,
    steady_state_analytic,
)
from .physics import (
    BOLTZMANN_CONSTANT,
    PLANCK_CONSTANT,
    DerivedRates,
    InteractionGeometry,
    OutcomeWeights,
    PhysicalParams,
    cavity_decay_rate,
    passage_weight_table,
    passage_weights,
    rabi_phase,
    thermal_occupation,
)
from .sweep import Extremum, PhaseSweepSpec, SweepRow, find_local_extrema, run_sweep
from .trajectory import (
    RNG_ALGORITHM,
    AtomOutcome,
    Event,
    EventKind,
    FilterState,
    TrajectoryConfig,
    TrajectoryRecord,
    dwell_intervals,
    filter_correct,
    filter_predict,
    occupation_histogram,
    replay_filter,
    sample_atom_outcome,
    simulate,
    step_hidden,
)

__all__ = [
    "__version__",
    "QbdSimError", "ParameterError", "ContractError", "TruncationError",
    "IntegrationError", "ImpossibleOutcomeError", "UsageError",
    "PLANCK_CONSTANT", "BOLTZMANN_CONSTANT",
    "PhysicalParams", "InteractionGeometry", "DerivedRates", "OutcomeWeights",
    "thermal_occupation", "cavity_decay_rate", "rabi_phase",
    "passage_weights", "passage_weight_table",
    "PhotonDistribution", "BirthDeathGenerator", "FieldStatistics",
    "build_generator", "apply_atom_map", "steady_state_analytic", "evolve",
    "statistics",
    "PhaseSweepSpec", "SweepRow", "Extremum", "run_sweep", "find_local_extrema",
    "TrajectoryConfig", "TrajectoryRecord", "Event", "EventKind", "AtomOutcome",
    "FilterState", "RNG_ALGORITHM",
    "simulate", "step_hidden", "sample_atom_outcome",
    "filter_predict", "filter_correct", "replay_filter",
    "occupation_histogram", "dwell_intervals",
]
