import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from circuitbath.bath import TransmissionLineParams, UniformTLSParams, build_transmission_line_bath, build_uniform_tls_bath
from circuitbath.core import (
    AmplitudeState,
    BathKind,
    BathSpec,
    FrequencyUnit,
    QubitSpec,
    TimeSeries,
    lambda0,
    norm_error,
)


def make_bath(omega, gamma, **kw):
    return BathSpec(omega=np.asarray(omega, float), gamma=np.asarray(gamma, float), **kw)


class TestLambda0:
    def test_all_zero_couplings(self):
        bath = make_bath([0.5, 1.0, 1.5], [0.0, 0.0, 0.0])
        assert lambda0(bath) == 0.0

    def test_single_mode_identity(self):
        bath = make_bath([1.0], [0.01])
        assert lambda0(bath) == pytest.approx(0.01, rel=1e-15)

    def test_line_bath_closed_form(self):
        # oracle: sum_k (g sqrt(k))^2 = g^2 N(N+1)/2 for k = 1..N
        bath = build_transmission_line_bath(TransmissionLineParams(0.01, 0.001, 300))
        expected = math.sqrt(1e-6 * 300 * 301 / 2)
        assert expected == pytest.approx(0.21248529360875776, rel=1e-15)
        assert lambda0(bath) == pytest.approx(expected, rel=1e-12)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40),
        st.randoms(use_true_random=False),
    )
    def test_permutation_invariance(self, gammas, rnd):
        omega = np.linspace(0.5, 1.5, len(gammas))
        before = lambda0(make_bath(omega, gammas))
        idx = list(range(len(gammas)))
        rnd.shuffle(idx)
        after = lambda0(make_bath(omega[idx], np.asarray(gammas)[idx]))
        assert after == pytest.approx(before, rel=1e-12, abs=1e-300)


class TestNormError:
    def test_initial_state(self):
        state = AmplitudeState(0.0, np.array([1.0 + 0j, 0.0, 0.0]))
        assert norm_error(state) == 0.0

    def test_two_component_normalized(self):
        a = 1.0 / math.sqrt(2.0)
        state = AmplitudeState(1.0, np.array([a + 0j, a + 0j]))
        assert norm_error(state) == pytest.approx(0.0, abs=1e-15)

    def test_direct_arithmetic(self):
        state = AmplitudeState(0.0, np.array([1.0 + 0j, 0.001 + 0j]))
        assert norm_error(state) == pytest.approx(1e-6, rel=1e-9)


class TestFrequencyUnit:
    @given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=1e-9, max_value=1e9))
    def test_round_trip(self, omega_ref, value):
        unit = FrequencyUnit(omega_ref)
        assert unit.frequency_from_internal(unit.frequency_to_internal(value)) == pytest.approx(
            value, rel=1e-15
        )
        assert unit.time_from_internal(unit.time_to_internal(value)) == pytest.approx(
            value, rel=1e-15
        )

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            FrequencyUnit(0.0)


class TestBathSpec:
    def test_seeded_determinism(self):
        params = UniformTLSParams(n_tls=500, gamma0=0.03, seed=99)
        assert build_uniform_tls_bath(params) == build_uniform_tls_bath(params)

    def test_different_seed_differs(self):
        a = build_uniform_tls_bath(UniformTLSParams(n_tls=500, gamma0=0.03, seed=1))
        b = build_uniform_tls_bath(UniformTLSParams(n_tls=500, gamma0=0.03, seed=2))
        assert a != b

    def test_rejects_negative_coupling(self):
        with pytest.raises(ValueError):
            make_bath([1.0], [-0.1])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            make_bath([], [])

    def test_arrays_read_only(self):
        bath = make_bath([1.0], [0.1], builder_kind=BathKind.CUSTOM)
        with pytest.raises(ValueError):
            bath.omega[0] = 2.0


class TestQubitSpec:
    def test_default_unit_frequency(self):
        assert QubitSpec().omega == 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            QubitSpec(omega=-1.0)


class TestTimeSeries:
    def test_rejects_nonincreasing_times(self):
        with pytest.raises(ValueError):
            TimeSeries(t=[0.0, 0.0], p_e=[1.0, 1.0], norm_error=[0.0, 0.0])

    def test_window(self):
        s = TimeSeries(t=[0.0, 1.0, 2.0, 3.0], p_e=[1.0, 0.5, 0.25, 0.1], norm_error=[0.0] * 4)
        w = s.window(0.5, 2.5)
        assert list(w.t) == [1.0, 2.0]
