"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
The long-run ensemble (A6/A7) and the monitored trajectory (A8) are
shared module fixtures; everything else is seconds.
"""

import math
from dataclasses import replace
import numpy as np
import pytest

from qbd_sim import (
    PhotonDistribution,
    TrajectoryConfig,
    apply_atom_map,
    build_generator,
    dwell_intervals,
    evolve,
    find_local_extrema,
    occupation_histogram,
    passage_weights,
    replay_filter,
    run_sweep,
    simulate,
    statistics,
    steady_state_analytic,
    thermal_occupation,
    PhaseSweepSpec,
)
from qbd_sim.cli import _render, parse_config, run
from .conftest import GAMMA, NBAR
from .test_cli import GOLDEN_DIR, GOLDEN_SWEEP_ARGS, GOLDEN_TRAJECTORY_ARGS

ENSEMBLE_SEEDS = range(10)
ENSEMBLE_DURATION = 500.0


def check(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def stationary(qnd_params, rates):
    return steady_state_analytic(build_generator(qnd_params, rates, 30))


@pytest.fixture(scope="module")
def ensemble(qnd_params):
    """Ten 500 s hidden-process runs; histograms and dwells, records dropped."""
    histograms = []
    dwells0, dwells1 = [], []
    for seed in ENSEMBLE_SEEDS:
        record = simulate(TrajectoryConfig(params=qnd_params,
                                           duration=ENSEMBLE_DURATION, seed=seed,
                                           track_filter=False, record_stride=10_000))
        histograms.append(occupation_histogram(record))
        dwells0.append(dwell_intervals(record, 0))
        dwells1.append(dwell_intervals(record, 1))
    return (np.mean(histograms, axis=0),
            np.concatenate(dwells0), np.concatenate(dwells1))


@pytest.fixture(scope="module")
def monitored(qnd_params):
    record = simulate(TrajectoryConfig(params=qnd_params, duration=20.0, seed=101))
    replay = replay_filter(record, keep_beliefs=True)
    return record, replay


def test_a01_thermal_occupation():
    nbar = thermal_occupation(21.456e9, 1.4)
    check("A1 thermal occupation at 21.456 GHz / 1.4 K",
          abs(nbar - 0.92) <= 0.005, f"nbar = {nbar:.6f} (target 0.92 +/- 0.005)")


def test_a02_weight_normalization():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(0, 51))
        phi = float(rng.uniform(0.0, 10.0))
        w = passage_weights(n, phi)
        worst = max(worst, abs(w.w_f + w.w_g + w.w_e - 1.0))
    check("A2 outcome-weight normalization over 1e4 random (n, phi)",
          worst < 1e-12, f"max |sum - 1| = {worst:.2e}")


def test_a03_steady_state_cross_validation(qnd_params, rates):
    worst_evolve = worst_kernel = 0.0
    for phi in (0.3, 0.9069, 1.1107, math.pi / 2, 2.2):
        gen = build_generator(replace(qnd_params, phase=phi), rates, 30)
        analytic = steady_state_analytic(gen)
        relaxed = evolve(PhotonDistribution.vacuum(30), gen, 200.0 / rates.gamma)
        worst_evolve = max(worst_evolve,
                           np.abs(relaxed.probs - analytic.probs).sum())
        _, _, vt = np.linalg.svd(gen.dense)
        kernel = vt[-1] / vt[-1].sum()
        worst_kernel = max(worst_kernel, np.abs(kernel - analytic.probs).sum())
    check("A3 steady state: product formula vs relaxation and dense kernel",
          worst_evolve < 1e-8 and worst_kernel < 1e-8,
          f"max L1 evolve {worst_evolve:.2e}, kernel {worst_kernel:.2e}")


@pytest.fixture(scope="module")
def sweep_600(qnd_params):
    spec = PhaseSweepSpec(params=qnd_params, phi_min=0.2, phi_max=3.0,
                          steps=600, n_max=30)
    return run_sweep(spec)


def test_a04a_sweep_cooling(sweep_600):
    worst = max(row.mean_n for row in sweep_600)
    check("A4a sweep: mean photon number below nbar everywhere",
          worst < NBAR, f"max mean_n = {worst:.4f} < nbar = {NBAR:.4f}")


def test_a04b_sweep_sub_poissonian(sweep_600):
    nearest = min(sweep_600, key=lambda row: abs(row.phi - math.pi / 2))
    check("A4b sweep: sub-Poissonian Fano at the grid point nearest pi/2",
          nearest.fano is not None and nearest.fano < 1.0,
          f"fano({nearest.phi:.4f}) = {nearest.fano:.4f}")


def test_a04c_sweep_fano_maxima_positions(sweep_600):
    step = sweep_600[1].phi - sweep_600[0].phi
    maxima = [e.phi for e in find_local_extrema(sweep_600) if e.kind == "max"]
    targets = {"pi/(2*sqrt2)": math.pi / (2 * math.sqrt(2)),
               "pi/(2*sqrt3)": math.pi / (2 * math.sqrt(3))}
    distances = {name: min(abs(phi - target) for phi in maxima)
                 for name, target in targets.items()}
    detail = ", ".join(f"nearest max is {d / step:.2f} grid steps from {name}"
                       for name, d in distances.items())
    check("A4c sweep: Fano maxima within one grid step of the two- and "
          "three-photon resonance phases",
          all(d <= step for d in distances.values()), detail)


def test_a05_atom_map_fixed_points():
    worst_vacuum = 0.0
    vacuum = PhotonDistribution.vacuum(30)
    for phi in np.linspace(0.0, 4 * math.pi, 101):
        out = apply_atom_map(vacuum, float(phi))
        worst_vacuum = max(worst_vacuum, np.abs(out.probs - vacuum.probs).max())
    one = PhotonDistribution.fock(1, 30)
    worst_one = np.abs(apply_atom_map(one, math.pi / 2).probs - one.probs).max()
    check("A5 atom-map fixed points (vacuum for all phases; one photon at pi/2)",
          worst_vacuum <= 1e-14 and worst_one <= 1e-14,
          f"max deviation vacuum {worst_vacuum:.1e}, one-photon {worst_one:.1e}")


def test_a06_trajectory_ergodicity(ensemble, stationary):
    mean_hist, _, _ = ensemble
    l1 = np.abs(mean_hist - stationary.probs).sum()
    check("A6 ergodicity: 10-seed time-occupation vs stationary distribution",
          l1 < 0.02, f"L1 = {l1:.4f} over {len(ENSEMBLE_SEEDS)} x "
          f"{ENSEMBLE_DURATION:.0f} s")


def test_a07_telegraph_dwell_times(ensemble):
    _, dwells0, dwells1 = ensemble
    target0 = 1.0 / (GAMMA * NBAR)
    target1 = 1.0 / (GAMMA * (3 * NBAR + 1))
    mean0, mean1 = dwells0.mean(), dwells1.mean()
    ok = (dwells0.size >= 500 and dwells1.size >= 500
          and abs(mean0 / target0 - 1) < 0.10
          and abs(mean1 / target1 - 1) < 0.10)
    check("A7 telegraph dwell times at the monitoring phase",
          ok, f"vacuum {mean0:.4f} s vs {target0:.4f} s ({dwells0.size} intervals), "
              f"one-photon {mean1:.5f} s vs {target1:.5f} s ({dwells1.size} intervals)")


def test_a08_filter_correctness(monitored):
    record, replay = monitored
    path = np.concatenate([[record.config_echo.initial_n], record.event_true_n])
    atom = record.event_kinds == 2
    n_before = path[:-1][atom]
    outcomes = record.event_outcomes[atom]
    one_photon = n_before == 1
    qnd_violations = int((outcomes[one_photon] != 1).sum())
    collapse_violations = int(
        (replay.post_arrival_beliefs[one_photon][:, 0] != 0.0).sum())

    calibration_ok = True
    details = []
    predicted = replay.predicted_outcome_probs
    for code, letter in ((0, "f"), (1, "g"), (2, "e")):
        observed = float((outcomes == code).sum())
        expected = float(predicted[:, code].sum())
        sigma = math.sqrt(float((predicted[:, code] * (1 - predicted[:, code])).sum()))
        calibration_ok &= abs(observed - expected) <= 3.0 * sigma + 1e-9
        details.append(f"{letter}: {observed:.0f} vs {expected:.1f} (3sigma {3*sigma:.1f})")
    check("A8 filter: QND collapse and outcome calibration",
          qnd_violations == 0 and collapse_violations == 0 and calibration_ok,
          f"{one_photon.sum()} one-photon arrivals, {qnd_violations} outcome and "
          f"{collapse_violations} collapse violations; " + "; ".join(details))


def test_a09_determinism_and_golden_files(tmp_path):
    sweep_config = parse_config(GOLDEN_SWEEP_ARGS)
    trajectory_config = parse_config(GOLDEN_TRAJECTORY_ARGS)
    golden_ok = (_render(sweep_config)[0] == (GOLDEN_DIR / "sweep.csv").read_text()
                 and _render(trajectory_config)[0]
                 == (GOLDEN_DIR / "trajectory.csv").read_text())
    repeat_ok = True
    for args in (GOLDEN_SWEEP_ARGS, GOLDEN_TRAJECTORY_ARGS):
        target = tmp_path / "out.csv"
        config = replace(parse_config(args), output=str(target))
        run(config)
        first = target.read_bytes()
        run(config)
        repeat_ok &= target.read_bytes() == first
    check("A9 determinism: byte-identical reruns and checked-in golden files",
          golden_ok and repeat_ok,
          f"golden match {golden_ok}, rerun match {repeat_ok}")


def test_a10_integrator_convergence(qnd_params, rates):
    gen = build_generator(qnd_params, rates, 30)
    start = PhotonDistribution.fock(20, 30)
    horizon = 0.005

    def solution(dt):
        return evolve(start, gen, horizon, dt=dt, tail_tol=None).probs

    err_coarse = np.abs(solution(5e-5) - solution(5e-5 / 4)).sum()
    err_fine = np.abs(solution(2.5e-5) - solution(2.5e-5 / 4)).sum()
    ratio = err_coarse / err_fine
    check("A10 integrator: halving dt cuts the error at least 8x",
          ratio >= 8.0, f"ratio = {ratio:.1f} "
          f"(errors {err_coarse:.2e} -> {err_fine:.2e})")
