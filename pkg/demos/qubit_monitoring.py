#!/usr/bin/env python3
"""Monte-Carlo record of the qubit detector: telegraph signal and filter.

At phi = pi/2 an atom leaves in the auxiliary state (f) when the cavity
is empty and in the ground state (g) when it holds one photon, without
touching the field either way.  The detection record is therefore a
telegraph signal: runs of f while the hidden photon number sits at 0,
runs of g while it sits at 1, with switches caused by invisible thermal
jumps.  The observer-side Bayesian filter locks onto the hidden state
within an atom or two of each switch.

Prints the first few telegraph steps, compares measured dwell times with
the thermal-rate predictions, and writes the sampled record (CSV + SVG).
"""

from pathlib import Path

import numpy as np

from qbd_sim import (
    DerivedRates,
    PhysicalParams,
    TrajectoryConfig,
    dwell_intervals,
    occupation_histogram,
    simulate,
)
from qbd_sim.output import svg_line_plot, trajectory_csv

params = PhysicalParams(frequency=21.456e9, q_factor=2e9, temperature=1.4,
                        atom_rate=3000.0, phase=np.pi / 2)
rates = DerivedRates.from_params(params)
config = TrajectoryConfig(params=params, duration=60.0, seed=2026, record_stride=5)

record = simulate(config)
print(f"simulated {config.duration:.0f} s: {record.n_atoms} atoms, "
      f"{record.event_times.size - record.n_atoms} hidden thermal jumps")
print()

print("first telegraph steps (hidden photon number changes)")
path = np.concatenate([[config.initial_n], record.event_true_n])
changes = np.flatnonzero(np.diff(path) != 0)[:8]
previous = 0.0
for idx in changes:
    t = record.event_times[idx]
    print(f"  t = {t:7.4f} s   n: {path[idx]} -> {path[idx + 1]}   "
          f"(dwell {t - previous:.4f} s)")
    previous = t
print()

for level, rate_label, rate in (
        (0, "gamma*nbar", rates.gamma * rates.nbar),
        (1, "gamma*(3*nbar+1)", rates.gamma * (3 * rates.nbar + 1))):
    dwells = dwell_intervals(record, level)
    print(f"dwell at n={level}: measured {dwells.mean():.4f} s over "
          f"{dwells.size} intervals, predicted 1/({rate_label}) = {1/rate:.4f} s")

occupancy = occupation_histogram(record)
print(f"\ntime share on the qubit levels: p(0) = {occupancy[0]:.3f}, "
      f"p(1) = {occupancy[1]:.3f}, rest = {occupancy[2:].sum():.3f}")

filter_errors = np.abs(record.sample_filter_mean - record.sample_true_n)
print(f"filter tracks the hidden state: median |<n>_filter - n_true| = "
      f"{np.median(filter_errors):.2e}")

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)
csv_path = out_dir / "monitoring.csv"
csv_path.write_text(trajectory_csv(["# demo qubit monitoring"], record))
window = record.sample_times <= 10.0
times = record.sample_times[window]
codes = record.sample_outcomes[window].astype(float)
codes[record.sample_outcomes[window] == 255] = np.nan
svg = svg_line_plot(
    [("detected atom state", [(times, codes)]),
     ("filter mean", [(times, record.sample_filter_mean[window])]),
     ("filter std", [(times, record.sample_filter_std[window])])],
    "time (s)", title="qubit detection record (first 10 s)")
(out_dir / "monitoring.svg").write_text(svg)
print(f"wrote {csv_path} and {csv_path.with_suffix('.svg')}")
