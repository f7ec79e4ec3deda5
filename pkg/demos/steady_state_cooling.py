#!/usr/bin/env python3
"""Stationary field of the probed cavity: the detector as a cooler.

Without probe atoms the cavity mode thermalizes to a Bose-Einstein
distribution with nbar ~ 0.92 photons (21.456 GHz at 1.4 K).  Ground-state
probe atoms can only remove energy, so switching the beam on drags the
stationary state toward the vacuum.  This script compares the two
stationary distributions and their statistics at the qubit-detection
phase pi/2.
"""

import numpy as np

from qbd_sim import (
    DerivedRates,
    PhysicalParams,
    build_generator,
    statistics,
    steady_state_analytic,
)

params = PhysicalParams(frequency=21.456e9, q_factor=2e9, temperature=1.4,
                        atom_rate=3000.0, phase=np.pi / 2)
rates = DerivedRates.from_params(params)

print("operating point")
print(f"  cavity          : {params.frequency/1e9:.3f} GHz, Q = {params.q_factor:.1e}")
print(f"  bath            : T = {params.temperature} K  ->  nbar = {rates.nbar:.4f}")
print(f"  decay rate      : gamma = {rates.gamma:.3f} 1/s")
print(f"  probe beam      : r = {params.atom_rate:.0f} atoms/s at phi = pi/2")
print()

n_max = 40
quiet = build_generator(PhysicalParams(params.frequency, params.q_factor,
                                       params.temperature, 0.0, params.phase),
                        rates, n_max)
probed = build_generator(params, rates, n_max)

thermal = steady_state_analytic(quiet)
cooled = steady_state_analytic(probed)

print("stationary photon distribution (first 6 levels)")
print("  n      no atoms      beam on")
for n in range(6):
    print(f"  {n}    {thermal.probs[n]:.6f}     {cooled.probs[n]:.6f}")
print()

for label, dist in (("no atoms", thermal), ("beam on ", cooled)):
    stats = statistics(dist)
    print(f"{label}: <n> = {stats.mean_n:.4f}   var = {stats.variance:.4f}   "
          f"Fano = {stats.fano:.4f}")

stats = statistics(cooled)
print()
print(f"cooling factor <n>_beam / nbar = {stats.mean_n / rates.nbar:.3f}")
print(f"sub-Poissonian: Fano = {stats.fano:.3f} < 1")
print(f"qubit support p(0)+p(1) = {cooled.probs[0] + cooled.probs[1]:.4f}")
