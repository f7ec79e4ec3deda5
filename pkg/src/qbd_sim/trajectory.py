"""Seeded Monte-Carlo simulation of the monitored cavity.

Two processes share one timeline: the hidden photon number performs
thermal jumps (a continuous-time Markov birth-death process driven by the
heat bath), and probe atoms arrive at rate r, each reporting f/g/e drawn
from the passage weights at the current photon number and removing one
photon on outcome e.  The observer sees only the atom detection record.
Between arrivals an observer-side filter propagates its belief with the
thermal-only master equation (thermal jumps are invisible); at each
arrival it applies the Bayes update for the observed outcome.  At
phase = pi/2 the record is the expected telegraph signal: long f-runs
while the cavity is empty, g-runs while it holds one photon, with step
lengths set by the thermal rates.

Reproducibility: all randomness comes from numpy's PCG64 seeded through
``SeedSequence(seed).spawn(3)``, giving independent substreams for atom
arrivals, thermal jumps and detection outcomes.  Changing the arrival
model therefore never perturbs the outcome draws.  The same config yields
a bit-identical record.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ImpossibleOutcomeError, ParameterError, TruncationError
from .master_equation import (
    BirthDeathGenerator,
    PhotonDistribution,
    _evolve_probs,
    build_generator,
    steady_state_analytic,
)
from .physics import DerivedRates, PhysicalParams, passage_weight_table, passage_weights

RNG_ALGORITHM = "numpy-PCG64; SeedSequence(seed).spawn(3) -> [arrivals, thermal, outcomes]"

_RNG_CHUNK = 8192  # block size for pre-drawn arrival gaps / outcome uniforms


class EventKind(enum.Enum):
    THERMAL_UP = "thermal_up"
    THERMAL_DOWN = "thermal_down"
    ATOM = "atom"


class AtomOutcome(enum.Enum):
    F = "f"  # auxiliary state: cavity was effectively empty for this atom
    G = "g"  # ground state: photon exchanged and returned
    E = "e"  # excited state: one photon absorbed


# Compact uint8 codes used in the record arrays.
_KIND_CODE = {EventKind.THERMAL_UP: 0, EventKind.THERMAL_DOWN: 1, EventKind.ATOM: 2}
_KIND_FROM_CODE = {v: k for k, v in _KIND_CODE.items()}
OUTCOME_CODE_F, OUTCOME_CODE_G, OUTCOME_CODE_E, OUTCOME_CODE_NONE = 0, 1, 2, 255
_OUTCOME_FROM_CODE = {0: AtomOutcome.F, 1: AtomOutcome.G, 2: AtomOutcome.E}


@dataclass(frozen=True)
class TrajectoryConfig:
    """Configuration of one simulated measurement run.

    ``record_stride`` decimates the per-arrival output samples: every
    stride-th atom arrival is sampled (the initial state at t=0 and the
    final state at t=duration are always included).  ``track_filter``
    turns the observer filter off for long hidden-process studies where
    only the photon-number path matters; the filter columns of the
    samples are then NaN.
    """

    params: PhysicalParams
    duration: float
    seed: int
    n_max: int = 30
    arrival_model: str = "poisson"
    initial_n: int = 0
    record_stride: int = 1
    track_filter: bool = True

    def __post_init__(self) -> None:
        if not (isinstance(self.duration, (int, float))
                and math.isfinite(self.duration) and self.duration > 0):
            raise ParameterError(f"duration must be positive and finite, "
                                 f"got {self.duration!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ParameterError(f"seed must be a 64-bit unsigned integer, "
                                 f"got {self.seed!r}")
        if not (isinstance(self.n_max, int) and self.n_max >= 2):
            raise ParameterError(f"n_max must be an integer >= 2, got {self.n_max!r}")
        if self.arrival_model not in ("poisson", "regular"):
            raise ParameterError(f"arrival_model must be 'poisson' or 'regular', "
                                 f"got {self.arrival_model!r}")
        if not (isinstance(self.initial_n, int) and 0 <= self.initial_n <= self.n_max):
            raise ParameterError(f"initial_n must be an integer in [0, n_max], "
                                 f"got {self.initial_n!r}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ParameterError(f"record_stride must be an integer >= 1, "
                                 f"got {self.record_stride!r}")


@dataclass(frozen=True)
class Event:
    """One timeline event: a hidden thermal jump or an atom passage."""

    time: float
    kind: EventKind
    true_n_after: int
    atom_outcome: AtomOutcome | None = None


@dataclass(frozen=True)
class FilterState:
    """Observer belief over the photon number at a given time."""

    belief: PhotonDistribution
    time: float


@dataclass
class TrajectoryRecord:
    """Result of :func:`simulate`, stored as flat arrays.

    ``event_*`` arrays log every event in time order (thermal jumps carry
    outcome code 255).  ``sample_*`` arrays hold the decimated output
    samples (time, true photon number, filter mean, filter std, last atom
    outcome code).  The ``events``/``samples`` properties materialize the
    same data as objects/tuples for convenience; prefer the arrays when a
    run contains millions of atoms.
    """

    config_echo: TrajectoryConfig
    rng_algorithm: str
    event_times: np.ndarray
    event_kinds: np.ndarray
    event_true_n: np.ndarray
    event_outcomes: np.ndarray
    sample_times: np.ndarray
    sample_true_n: np.ndarray
    sample_filter_mean: np.ndarray
    sample_filter_std: np.ndarray
    sample_outcomes: np.ndarray

    @property
    def events(self) -> list[Event]:
        return [Event(time=float(t), kind=_KIND_FROM_CODE[int(k)],
                      true_n_after=int(n),
                      atom_outcome=_OUTCOME_FROM_CODE.get(int(o)))
                for t, k, n, o in zip(self.event_times, self.event_kinds,
                                      self.event_true_n, self.event_outcomes)]

    @property
    def samples(self) -> list[tuple[float, int, float, float, AtomOutcome | None]]:
        return [(float(t), int(n), float(m), float(s),
                 _OUTCOME_FROM_CODE.get(int(o)))
                for t, n, m, s, o in zip(self.sample_times, self.sample_true_n,
                                         self.sample_filter_mean,
                                         self.sample_filter_std,
                                         self.sample_outcomes)]

    @property
    def atom_mask(self) -> np.ndarray:
        return self.event_kinds == _KIND_CODE[EventKind.ATOM]

    @property
    def n_atoms(self) -> int:
        return int(self.atom_mask.sum())


def step_hidden(true_n: int, rates: DerivedRates,
                rng: np.random.Generator) -> tuple[float, EventKind | None]:
    """Sample the next thermal jump from photon number ``true_n``.

    Returns (waiting time, jump kind).  The waiting time is exponential
    with the total rate gamma*nbar*(n+1) + gamma*(nbar+1)*n and the kind
    is chosen proportionally to the two rates.  When both rates vanish
    (zero-temperature vacuum) returns (inf, None): no jump ever occurs.
    """
    if true_n < 0:
        raise ParameterError(f"true_n must be >= 0, got {true_n!r}")
    up = rates.gamma * rates.nbar * (true_n + 1)
    down = rates.gamma * (rates.nbar + 1) * true_n
    total = up + down
    if total <= 0.0:
        return math.inf, None
    waiting = rng.exponential(1.0 / total)
    kind = EventKind.THERMAL_UP if rng.random() * total < up else EventKind.THERMAL_DOWN
    return waiting, kind


def sample_atom_outcome(true_n: int, phase: float,
                        rng: np.random.Generator) -> tuple[AtomOutcome, int]:
    """Draw one atom detection outcome; returns (outcome, new photon number).

    Outcome e removes a photon, f and g leave the cavity unchanged.  The
    vacuum always gives f (its absorption weight is exactly zero).
    """
    weights = passage_weights(true_n, phase)
    u = rng.random()
    if u < weights.w_f:
        return AtomOutcome.F, true_n
    if u < weights.w_f + weights.w_g:
        return AtomOutcome.G, true_n
    return AtomOutcome.E, true_n - 1


def filter_predict(state: FilterState, gen_thermal: BirthDeathGenerator,
                   dt: float) -> FilterState:
    """Propagate the observer belief between atoms.

    Thermal jumps are unobserved, so the belief follows the thermal-only
    master equation for ``dt`` seconds.  ``dt == 0`` returns the state
    unchanged.  No truncation check is applied: this is a short-time
    predictor step, and the belief cannot leave the grid.
    """
    if not (math.isfinite(dt) and dt >= 0):
        raise ParameterError(f"dt must be >= 0 and finite, got {dt!r}")
    if dt == 0.0:
        return state
    probs = _evolve_probs(state.belief.probs, gen_thermal, dt)
    return FilterState(PhotonDistribution._wrap(probs), state.time + dt)


def _correct_probs(probs: np.ndarray, weight_table: np.ndarray,
                   outcome_code: int) -> np.ndarray:
    """Bayes update of a raw belief array for one detection outcome."""
    if outcome_code == OUTCOME_CODE_F:
        posterior = weight_table[:, 0] * probs
    elif outcome_code == OUTCOME_CODE_G:
        posterior = weight_table[:, 1] * probs
    else:
        # Outcome e: the atom absorbed a photon, so mass moves down a level
        # weighted by the absorption probability of the level above.
        posterior = np.empty_like(probs)
        posterior[:-1] = weight_table[1:, 2] * probs[1:]
        posterior[-1] = 0.0
    total = posterior.sum()
    if not (total >= 1e-300):
        raise ImpossibleOutcomeError(
            f"posterior weight {total!r} for outcome code {outcome_code}; the "
            f"belief assigns no probability to this detection")
    return posterior / total


def filter_correct(state: FilterState, outcome: AtomOutcome,
                   phase: float) -> FilterState:
    """Condition the belief on one observed atom outcome (Bayes rule)."""
    table = passage_weight_table(state.belief.n_max, phase)
    code = {AtomOutcome.F: OUTCOME_CODE_F, AtomOutcome.G: OUTCOME_CODE_G,
            AtomOutcome.E: OUTCOME_CODE_E}[outcome]
    probs = _correct_probs(state.belief.probs, table, code)
    return FilterState(PhotonDistribution._wrap(probs), state.time)


def _gap_stream(rng: np.random.Generator, scale: float):
    """Endless exponential inter-arrival gaps, drawn in fixed blocks."""
    while True:
        yield from rng.exponential(scale, size=_RNG_CHUNK).tolist()


def _uniform_stream(rng: np.random.Generator):
    while True:
        yield from rng.random(size=_RNG_CHUNK).tolist()


def initial_belief(config: TrajectoryConfig) -> PhotonDistribution:
    """Observer prior: the stationary distribution of the full generator.

    The observer knows the operating parameters but not the current
    photon number, so the calibrated prior is the steady state the device
    relaxes to.  (No tail check: the prior lives on the same grid the
    filter uses.)
    """
    rates = DerivedRates.from_params(config.params)
    return steady_state_analytic(build_generator(config.params, rates, config.n_max),
                                 tail_tol=None)


def simulate(config: TrajectoryConfig) -> TrajectoryRecord:
    """Run one measurement record; deterministic for a given config.

    Raises :class:`TruncationError` if the hidden photon number reaches
    ``n_max`` (the truncated filter grid would no longer contain the
    truth); rerun with a larger ``n_max``.
    """
    params = config.params
    rates = DerivedRates.from_params(params)
    n_max = config.n_max
    duration = config.duration
    atom_rate = params.atom_rate

    seq_arrivals, seq_thermal, seq_outcomes = np.random.SeedSequence(config.seed).spawn(3)
    rng_arrivals = np.random.Generator(np.random.PCG64(seq_arrivals))
    rng_thermal = np.random.Generator(np.random.PCG64(seq_thermal))
    rng_outcomes = np.random.Generator(np.random.PCG64(seq_outcomes))

    weight_table = passage_weight_table(n_max, params.phase)
    thr_f = weight_table[:, 0].tolist()
    thr_fg = (weight_table[:, 0] + weight_table[:, 1]).tolist()
    uniforms = _uniform_stream(rng_outcomes)

    track = config.track_filter
    gen_thermal = BirthDeathGenerator.thermal(rates, n_max)
    if track:
        belief = initial_belief(config).probs
        levels = np.arange(n_max + 1, dtype=np.float64)
        levels_sq = levels * levels
        filter_mean = float(levels @ belief)
        filter_std = math.sqrt(max(float(levels_sq @ belief) - filter_mean ** 2, 0.0))
    else:
        belief = None
        filter_mean = filter_std = math.nan

    # Arrival schedule.  Poisson uses sequential exponential gaps; the
    # regular model puts arrival k at k/r exactly (no accumulated drift).
    poisson = config.arrival_model == "poisson"
    if atom_rate > 0:
        gaps = _gap_stream(rng_arrivals, 1.0 / atom_rate) if poisson else None
        next_arrival = (next(gaps) if poisson else 1.0 / atom_rate)
    else:
        gaps = None
        next_arrival = math.inf

    ev_times: list[float] = []
    ev_kinds: list[int] = []
    ev_ns: list[int] = []
    ev_outs: list[int] = []
    sm_times: list[float] = []
    sm_ns: list[int] = []
    sm_means: list[float] = []
    sm_stds: list[float] = []
    sm_outs: list[int] = []

    true_n = config.initial_n
    t = 0.0
    last_correct_time = 0.0
    last_outcome_code = OUTCOME_CODE_NONE
    arrival_count = 0
    stride = config.record_stride

    sm_times.append(0.0)
    sm_ns.append(true_n)
    sm_means.append(filter_mean)
    sm_stds.append(filter_std)
    sm_outs.append(OUTCOME_CODE_NONE)

    waiting, jump_kind = step_hidden(true_n, rates, rng_thermal)
    next_thermal = t + waiting

    kind_up = _KIND_CODE[EventKind.THERMAL_UP]
    kind_down = _KIND_CODE[EventKind.THERMAL_DOWN]
    kind_atom = _KIND_CODE[EventKind.ATOM]

    while True:
        if next_thermal <= next_arrival and next_thermal <= duration:
            # Hidden thermal jump (ties with an arrival resolve thermal-first).
            t = next_thermal
            true_n += 1 if jump_kind is EventKind.THERMAL_UP else -1
            if true_n >= n_max:
                raise TruncationError(
                    f"hidden photon number reached n_max={n_max} at t={t:.6g} s; "
                    f"rerun with a larger n_max")
            ev_times.append(t)
            ev_kinds.append(kind_up if jump_kind is EventKind.THERMAL_UP else kind_down)
            ev_ns.append(true_n)
            ev_outs.append(OUTCOME_CODE_NONE)
            waiting, jump_kind = step_hidden(true_n, rates, rng_thermal)
            next_thermal = t + waiting
        elif next_arrival <= duration:
            # Atom passage.
            t = next_arrival
            if track and t > last_correct_time:
                belief = _evolve_probs(belief, gen_thermal, t - last_correct_time)
            u = next(uniforms)
            if u < thr_f[true_n]:
                outcome_code = OUTCOME_CODE_F
            elif u < thr_fg[true_n]:
                outcome_code = OUTCOME_CODE_G
            else:
                outcome_code = OUTCOME_CODE_E
                true_n -= 1
                # Rates changed with the photon number: restart the
                # (memoryless) thermal clock.
                waiting, jump_kind = step_hidden(true_n, rates, rng_thermal)
                next_thermal = t + waiting
            if track:
                belief = _correct_probs(belief, weight_table, outcome_code)
                last_correct_time = t
                filter_mean = float(levels @ belief)
                filter_std = math.sqrt(
                    max(float(levels_sq @ belief) - filter_mean ** 2, 0.0))
            ev_times.append(t)
            ev_kinds.append(kind_atom)
            ev_ns.append(true_n)
            ev_outs.append(outcome_code)
            last_outcome_code = outcome_code
            arrival_count += 1
            if arrival_count % stride == 0:
                sm_times.append(t)
                sm_ns.append(true_n)
                sm_means.append(filter_mean)
                sm_stds.append(filter_std)
                sm_outs.append(outcome_code)
            next_arrival = (next_arrival + next(gaps) if poisson
                            else (arrival_count + 1) / atom_rate)
        else:
            break

    if track and duration > last_correct_time:
        belief = _evolve_probs(belief, gen_thermal, duration - last_correct_time)
        filter_mean = float(levels @ belief)
        filter_std = math.sqrt(max(float(levels_sq @ belief) - filter_mean ** 2, 0.0))
    sm_times.append(duration)
    sm_ns.append(true_n)
    sm_means.append(filter_mean)
    sm_stds.append(filter_std)
    sm_outs.append(last_outcome_code)

    return TrajectoryRecord(
        config_echo=config,
        rng_algorithm=RNG_ALGORITHM,
        event_times=np.asarray(ev_times, dtype=np.float64),
        event_kinds=np.asarray(ev_kinds, dtype=np.uint8),
        event_true_n=np.asarray(ev_ns, dtype=np.int32),
        event_outcomes=np.asarray(ev_outs, dtype=np.uint8),
        sample_times=np.asarray(sm_times, dtype=np.float64),
        sample_true_n=np.asarray(sm_ns, dtype=np.int32),
        sample_filter_mean=np.asarray(sm_means, dtype=np.float64),
        sample_filter_std=np.asarray(sm_stds, dtype=np.float64),
        sample_outcomes=np.asarray(sm_outs, dtype=np.uint8),
    )


@dataclass
class FilterReplay:
    """Filter pass recomputed from a detection record (see :func:`replay_filter`)."""

    sample_times: np.ndarray
    sample_filter_mean: np.ndarray
    sample_filter_std: np.ndarray
    arrival_times: np.ndarray
    arrival_outcomes: np.ndarray          # uint8 outcome codes, one per atom
    predicted_outcome_probs: np.ndarray   # (n_atoms, 3) pre-arrival probabilities
    pre_arrival_beliefs: np.ndarray | None = field(default=None, repr=False)
    post_arrival_beliefs: np.ndarray | None = field(default=None, repr=False)


def replay_filter(record: TrajectoryRecord,
                  keep_beliefs: bool = False) -> FilterReplay:
    """Re-run the observer filter over the atom outcomes of ``record``.

    Uses exactly the operations of :func:`simulate`, so for a record
    produced with ``track_filter=True`` the replayed sample moments are
    bit-identical to the logged ones.  Also returns, for every arrival,
    the outcome probabilities the filter predicted just before the atom
    was detected (belief times passage weights) for calibration checks.
    """
    config = record.config_echo
    rates = DerivedRates.from_params(config.params)
    gen_thermal = BirthDeathGenerator.thermal(rates, config.n_max)
    weight_table = passage_weight_table(config.n_max, config.params.phase)
    levels = np.arange(config.n_max + 1, dtype=np.float64)
    levels_sq = levels * levels

    belief = initial_belief(config).probs
    mean = float(levels @ belief)
    std = math.sqrt(max(float(levels_sq @ belief) - mean ** 2, 0.0))

    mask = record.atom_mask
    atom_times = record.event_times[mask]
    atom_outcomes = record.event_outcomes[mask]

    sm_times = [0.0]
    sm_means = [mean]
    sm_stds = [std]
    predicted = np.empty((atom_times.size, 3))
    pre_beliefs = [] if keep_beliefs else None
    post_beliefs = [] if keep_beliefs else None

    last_correct_time = 0.0
    stride = config.record_stride
    for i, (t, code) in enumerate(zip(atom_times.tolist(), atom_outcomes.tolist())):
        if t > last_correct_time:
            belief = _evolve_probs(belief, gen_thermal, t - last_correct_time)
        predicted[i] = belief @ weight_table
        if pre_beliefs is not None:
            pre_beliefs.append(belief)
        belief = _correct_probs(belief, weight_table, code)
        last_correct_time = t
        if post_beliefs is not None:
            post_beliefs.append(belief)
        if (i + 1) % stride == 0:
            mean = float(levels @ belief)
            std = math.sqrt(max(float(levels_sq @ belief) - mean ** 2, 0.0))
            sm_times.append(t)
            sm_means.append(mean)
            sm_stds.append(std)

    duration = config.duration
    if duration > last_correct_time:
        belief = _evolve_probs(belief, gen_thermal, duration - last_correct_time)
    mean = float(levels @ belief)
    std = math.sqrt(max(float(levels_sq @ belief) - mean ** 2, 0.0))
    sm_times.append(duration)
    sm_means.append(mean)
    sm_stds.append(std)

    return FilterReplay(
        sample_times=np.asarray(sm_times),
        sample_filter_mean=np.asarray(sm_means),
        sample_filter_std=np.asarray(sm_stds),
        arrival_times=atom_times,
        arrival_outcomes=atom_outcomes,
        predicted_outcome_probs=predicted,
        pre_arrival_beliefs=np.asarray(pre_beliefs) if keep_beliefs else None,
        post_arrival_beliefs=np.asarray(post_beliefs) if keep_beliefs else None,
    )


def occupation_histogram(record: TrajectoryRecord) -> np.ndarray:
    """Fraction of simulated time spent at each photon number 0..n_max."""
    config = record.config_echo
    times = np.concatenate([[0.0], record.event_times, [config.duration]])
    levels = np.concatenate([[config.initial_n], record.event_true_n])
    hist = np.zeros(config.n_max + 1)
    np.add.at(hist, levels, np.diff(times))
    return hist / config.duration


def dwell_intervals(record: TrajectoryRecord, level: int) -> np.ndarray:
    """Completed dwell times at photon number ``level``.

    A dwell is the span between two successive changes of the true photon
    number; the censored first segment (started by initialization, not by
    a jump) and last segment (cut off at the end of the run) are excluded.
    """
    config = record.config_echo
    path = np.concatenate([[config.initial_n], record.event_true_n])
    changes = np.flatnonzero(np.diff(path) != 0)
    if changes.size < 2:
        return np.empty(0)
    change_times = record.event_times[changes]
    occupied = path[changes + 1][:-1]  # level occupied between consecutive changes
    durations = np.diff(change_times)
    return durations[occupied == level]
