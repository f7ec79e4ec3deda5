import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbd_sim import (
    DerivedRates,
    InteractionGeometry,
    OutcomeWeights,
    ParameterError,
    PhysicalParams,
    cavity_decay_rate,
    passage_weight_table,
    passage_weights,
    rabi_phase,
    thermal_occupation,
)
from .conftest import NBAR, OPERATING

# Independent evaluation of the Bose-Einstein factor with the 2018 SI
# constants written out here, not imported from the package.
_H = 6.62607015e-34
_K = 1.380649e-23


class TestThermalOccupation:
    def test_operating_point(self):
        # 21.456 GHz at 1.4 K sits just below one thermal photon.
        nbar = thermal_occupation(21.456e9, 1.4)
        assert nbar == pytest.approx(0.92, abs=0.005)
        independent = 1.0 / (math.exp(_H * 21.456e9 / (_K * 1.4)) - 1.0)
        assert nbar == pytest.approx(independent, rel=1e-12)
        assert nbar == pytest.approx(NBAR, rel=1e-15)

    def test_zero_temperature_is_exactly_zero(self):
        assert thermal_occupation(21.456e9, 0.0) == 0.0
        assert thermal_occupation(1.0, 0.0) == 0.0

    def test_ln2_point_gives_one(self):
        # h f / k T = ln 2  =>  exp() - 1 = 1  =>  nbar = 1.
        f = 10e9
        t = _H * f / (_K * math.log(2.0))
        assert thermal_occupation(f, t) == pytest.approx(1.0, abs=1e-12)

    def test_deep_cold_underflows_to_zero(self):
        assert thermal_occupation(1e12, 1e-6) == 0.0

    @pytest.mark.parametrize("f,t", [(-1.0, 1.0), (0.0, 1.0), (1e9, -0.1),
                                     (math.nan, 1.0), (1e9, math.inf)])
    def test_domain_errors(self, f, t):
        with pytest.raises(ParameterError):
            thermal_occupation(f, t)

    @given(f=st.floats(1e8, 1e11), t1=st.floats(0.5, 100.0),
           scale=st.floats(1.001, 3.0))
    @settings(max_examples=200)
    def test_monotone_in_temperature(self, f, t1, scale):
        assert thermal_occupation(f, t1 * scale) > thermal_occupation(f, t1)

    @given(f1=st.floats(1e8, 1e11), t=st.floats(0.5, 100.0),
           scale=st.floats(1.001, 3.0))
    @settings(max_examples=200)
    def test_monotone_in_frequency(self, f1, t, scale):
        assert thermal_occupation(f1 * scale, t) < thermal_occupation(f1, t)


class TestCavityDecayRate:
    def test_operating_point(self):
        assert cavity_decay_rate(21.456e9, 2e9) == pytest.approx(10.728, rel=1e-15)

    def test_ratio_identities(self):
        assert cavity_decay_rate(1e9, 1e9) == 1.0
        assert cavity_decay_rate(3.7e5, 3.7e5) == 1.0

    @pytest.mark.parametrize("f,q", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (1.0, -2.0)])
    def test_domain_errors(self, f, q):
        with pytest.raises(ParameterError):
            cavity_decay_rate(f, q)


class TestRabiPhase:
    def test_half_cycle_condition(self):
        # g L / v = pi/2 whenever g L = (pi/2) v.
        geometry = InteractionGeometry(rabi_frequency=math.pi / 2, length=3.0,
                                       velocity=3.0)
        assert rabi_phase(geometry) == pytest.approx(math.pi / 2, rel=1e-15)

    def test_unit_triple(self):
        assert rabi_phase(InteractionGeometry(1.0, 1.0, 1.0)) == 1.0

    def test_coupling_47khz_transit(self):
        # With a 2*pi*47 kHz coupling, a transit time of 1/(4*47e3) s
        # accumulates exactly a quarter turn.
        geometry = InteractionGeometry(rabi_frequency=2 * math.pi * 47e3,
                                       length=1.0, velocity=4 * 47e3)
        assert rabi_phase(geometry) == pytest.approx(math.pi / 2, rel=1e-12)

    @pytest.mark.parametrize("g,l,v", [(0.0, 1, 1), (1, -1, 1), (1, 1, 0.0)])
    def test_domain_errors(self, g, l, v):
        with pytest.raises(ParameterError):
            InteractionGeometry(g, l, v)

    def test_params_from_geometry(self):
        geometry = InteractionGeometry(rabi_frequency=math.pi, length=1.0, velocity=2.0)
        params = PhysicalParams.from_geometry(geometry=geometry, **OPERATING)
        assert params.phase == rabi_phase(geometry)


class TestPassageWeights:
    def test_vacuum_always_f(self):
        for phi in (0.0, 0.3, math.pi / 2, 2.7, 100.0):
            w = passage_weights(0, phi)
            assert w.as_tuple() == (1.0, 0.0, 0.0)

    def test_qubit_detection_condition(self):
        # One photon at phi = pi/2: certain g outcome, no absorption.
        w = passage_weights(1, math.pi / 2)
        assert w.w_g == 1.0
        assert abs(w.w_f) < 1e-14
        assert abs(w.w_e) < 1e-14

    def test_quarter_phase_splits(self):
        w = passage_weights(1, math.pi / 4)
        assert w.w_f == pytest.approx(0.5, abs=1e-15)
        assert w.w_g == pytest.approx(0.25, abs=1e-15)
        assert w.w_e == pytest.approx(0.25, abs=1e-15)

    def test_two_photon_absorption_weight(self):
        expected = 0.25 * math.sin(math.pi * math.sqrt(2.0)) ** 2
        assert passage_weights(2, math.pi / 2).w_e == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(0.2321, abs=5e-4)

    def test_absorption_from_vacuum_impossible(self):
        for phi in np.linspace(-8, 8, 41):
            assert passage_weights(0, phi).w_e == 0.0

    @given(n=st.integers(0, 200), phi=st.floats(-20.0, 20.0))
    @settings(max_examples=500)
    def test_weights_sum_to_one(self, n, phi):
        w = passage_weights(n, phi)
        assert abs(w.w_f + w.w_g + w.w_e - 1.0) < 1e-12
        assert 0.0 <= min(w.as_tuple()) and max(w.as_tuple()) <= 1.0

    @given(n=st.integers(0, 100), phi=st.floats(0.0, 15.0))
    @settings(max_examples=200)
    def test_weights_even_in_phase(self, n, phi):
        assert passage_weights(n, phi) == passage_weights(n, -phi)

    def test_table_matches_scalar(self):
        for phi in (0.0, 0.7, math.pi / 2, 2.9):
            table = passage_weight_table(12, phi)
            for n in range(13):
                w = passage_weights(n, phi)
                assert table[n] == pytest.approx(w.as_tuple(), rel=1e-13, abs=1e-15)

    @pytest.mark.parametrize("n,phi", [(-1, 1.0), (2.5, 1.0), (1, math.nan),
                                       (1, math.inf), (True, 1.0)])
    def test_domain_errors(self, n, phi):
        with pytest.raises(ParameterError):
            passage_weights(n, phi)


class TestValueTypes:
    def test_params_validation(self):
        with pytest.raises(ParameterError):
            PhysicalParams(frequency=-1, q_factor=1, temperature=1, atom_rate=1, phase=1)
        with pytest.raises(ParameterError):
            PhysicalParams(frequency=1, q_factor=1, temperature=1, atom_rate=1, phase=-0.5)
        params = PhysicalParams(frequency=1, q_factor=1, temperature=0, atom_rate=0, phase=0)
        assert params.temperature == 0

    def test_derived_rates(self, qnd_params, rates):
        assert rates.gamma == pytest.approx(10.728, rel=1e-15)
        assert rates.nbar == pytest.approx(NBAR, rel=1e-15)
        cold = PhysicalParams(frequency=1e9, q_factor=1e9, temperature=0.0,
                              atom_rate=0.0, phase=0.0)
        assert DerivedRates.from_params(cold).nbar == 0.0

    def test_outcome_weights_validation(self):
        with pytest.raises(ParameterError):
            OutcomeWeights(0.5, 0.5, 0.5)
        with pytest.raises(ParameterError):
            OutcomeWeights(1.2, -0.2, 0.0)
