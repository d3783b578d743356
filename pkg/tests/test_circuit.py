import math

import numpy as np
import pytest

from circuitbath.circuit import (
    OPEN,
    SHORT,
    CircuitSpec,
    UnsupportedTermination,
    capacitive_asymptote_constant,
    dispersion,
    dispersion_table,
    find_modes,
    input_impedance,
    junction_admittance,
    junction_impedance,
    load,
)


class TestJunctionImpedance:
    def test_low_frequency_inductive(self):
        spec = CircuitSpec(L=2.0, C=1.0, Cg=0.1, N=10)
        w = 1e-8
        assert junction_impedance(spec, w) == pytest.approx(1j * w * spec.L, rel=1e-14)

    def test_no_shunt_capacitance_exact(self):
        spec = CircuitSpec(L=0.7, C=0.0, Cg=0.1, N=10)
        for w in (1e-3, 0.5, 2.0, 100.0):
            assert junction_impedance(spec, w) == pytest.approx(1j * w * 0.7, rel=1e-15)

    def test_twice_plasma_frequency(self):
        # -i Z_inf / (2 - 1/2) = -(2/3) i Z_inf
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.1, N=10)
        assert junction_impedance(spec, 2.0) == pytest.approx(-2j / 3, rel=1e-14)

    def test_pole_indicator(self):
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.1, N=10)
        assert junction_admittance(spec, spec.omega_p) == 0
        assert junction_impedance(spec, spec.omega_p) == complex(math.inf)

    def test_rejects_nonpositive_omega(self):
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.1, N=10)
        with pytest.raises(ValueError):
            junction_impedance(spec, 0.0)


class TestInputImpedance:
    def test_single_cell_open_series_lc(self):
        # N=1, open, C=0: junction inductor in series with the shunt Cg
        spec = CircuitSpec(L=0.8, C=0.0, Cg=0.05, N=1)
        for w in (0.1, 1.0, 4.9, 5.1, 30.0):
            expected = 1j * w * 0.8 + 1.0 / (1j * w * 0.05)
            assert input_impedance(spec, w) == pytest.approx(expected, rel=1e-12)

    def test_single_cell_zero_at_series_resonance(self):
        spec = CircuitSpec(L=0.8, C=0.0, Cg=0.05, N=1)
        w0 = 1.0 / math.sqrt(0.8 * 0.05)
        assert abs(input_impedance(spec, w0)) < 1e-12

    def test_semi_infinite_capacitive_fixed_point(self):
        # above omega_p the ladder converges to the root of Z^2 - aZ - ab = 0
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.01, N=3000)
        rho = spec.C / spec.Cg
        for w in (5.0, 12.0, 50.0):
            a = junction_impedance(spec, w)
            b = 1.0 / (1j * w * spec.Cg)
            roots = np.roots([1.0, -a, -a * b])
            z_fix = roots[np.argmin(roots.imag)]  # capacitive (passive) branch
            z = input_impedance(spec, w)
            assert z == pytest.approx(z_fix, rel=1e-10)
            product = abs(z) * w * math.sqrt(spec.C * spec.Cg)
            assert product == pytest.approx(1.0512492197250394, rel=0.06)

    def test_asymptote_constant_against_quadratic_oracle(self):
        # pure-capacitor limit: x^2 - x - rho = 0 in units of 1/(w C)
        for rho in (4.0, 100.0, 1e4):
            root = max(np.roots([1.0, -1.0, -rho]).real)
            assert capacitive_asymptote_constant(rho) == pytest.approx(
                root / math.sqrt(rho), rel=1e-12
            )
        assert capacitive_asymptote_constant(100.0) == pytest.approx(
            1.0512492197250394, rel=1e-12
        )

    def test_asymptote_constant_monotone_to_one(self):
        consts = [capacitive_asymptote_constant(r) for r in (10.0, 100.0, 1e3, 1e4)]
        assert all(a > b for a, b in zip(consts, consts[1:]))
        assert consts[-1] == pytest.approx(1.0, abs=0.01)

    def test_lossless_reactance_only(self):
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.01, N=200)
        w = np.linspace(0.001, 0.099, 2000)
        z = input_impedance(spec, w)
        finite = np.isfinite(np.abs(z))
        assert np.all(np.abs(z.real[finite]) <= 1e-9 * np.abs(z[finite]))

    def test_resistive_load_breaks_losslessness(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=5, termination=load(1.0 + 0j))
        z = input_impedance(spec, 0.3)
        assert z.real > 1e-6

    def test_scalar_and_vector_agree(self):
        spec = CircuitSpec(L=1.0, C=1.0, Cg=0.01, N=50)
        w = np.array([0.03, 0.07, 5.0])
        zv = input_impedance(spec, w)
        for wi, zi in zip(w, zv):
            assert input_impedance(spec, float(wi)) == zi


class TestDispersion:
    def test_pure_line_first_mode(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=3000)
        assert dispersion(spec, 1) == pytest.approx(0.0010471975511965976, rel=1e-15)

    def test_dressed_mode_95(self):
        # L = Cg = 1, C = 100 -> omega_p = 0.1; bare 95 pi/3000 then dressed
        spec = CircuitSpec(L=1.0, C=100.0, Cg=1.0, N=3000)
        assert spec.omega_p == pytest.approx(0.1, rel=1e-15)
        assert dispersion(spec, 95) == pytest.approx(0.07052745383921416, rel=1e-12)

    def test_high_modes_approach_plasma_from_below(self):
        spec = CircuitSpec(L=1.0, C=100.0, Cg=1.0, N=3000)
        w = dispersion(spec, 10**6)
        assert 0.999 * spec.omega_p < w < spec.omega_p

    def test_c_zero_reduces_to_bare(self):
        spec = CircuitSpec(L=2.0, C=0.0, Cg=0.5, N=100)
        table = dispersion_table(spec, 100)
        assert np.all(table.omega_n == table.omega_n0)

    def test_shorted_half_integer_offset(self):
        spec_o = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=100, termination=OPEN)
        spec_s = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=100, termination=SHORT)
        assert dispersion(spec_s, 1) == pytest.approx(0.5 * dispersion(spec_o, 1), rel=1e-12)

    def test_load_termination_unsupported(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=10, termination=load(3.0 + 0j))
        with pytest.raises(UnsupportedTermination):
            dispersion(spec, 1)

    def test_rejects_bad_index(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=10)
        with pytest.raises(ValueError):
            dispersion(spec, 0)


class TestFindModes:
    def test_empty_above_plasma(self):
        spec = CircuitSpec(L=1.0, C=100.0, Cg=1.0, N=50)
        wp = spec.omega_p
        got = find_modes(spec, 1.1 * wp, 3.0 * wp, grid_points=2000)
        assert got.size == 0

    def test_first_mode_pure_line(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=3000)
        spacing = spec.bare_mode_spacing
        got = find_modes(spec, 0.4 * spacing, 1.6 * spacing)
        assert got.size == 1
        assert got[0] == pytest.approx(spacing, rel=1e-3)

    def test_modes_match_dispersion_small_array(self):
        # first five resonances against the closed form, both C/Cg cases
        for c in (0.0, 100.0):
            spec = CircuitSpec(L=1.0, C=c, Cg=1.0, N=300)
            predicted = [dispersion(spec, n) for n in range(1, 7)]
            hi = 0.5 * (predicted[4] + predicted[5])
            got = find_modes(spec, 0.3 * predicted[0], hi)
            assert got.size == 5
            for g, p in zip(got, predicted):
                assert g == pytest.approx(p, rel=1e-3)

    def test_mode_count_full_band(self):
        # every junction contributes one mode; N-1 lie on the dressed comb
        # and the last one sits at the junction resonance omega_p itself,
        # so the scan must reach through omega_p to count all N
        spec = CircuitSpec(L=1.0, C=4.0, Cg=1.0, N=8)
        wp = spec.omega_p
        got = find_modes(spec, 1e-3 * wp, 1.0001 * wp, grid_points=40000)
        assert got.size == 8
        assert np.all(got <= wp * (1 + 1e-9))
        assert got[-1] == pytest.approx(wp, rel=1e-6)

    def test_short_minima_coincide_with_open_poles(self):
        # zeros of the shorted array and poles of the open one share the
        # same standing-wave family
        spec_o = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=40, termination=OPEN)
        spec_s = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=40, termination=SHORT)
        lo, hi = 0.02, 0.3
        poles = find_modes(spec_o, lo, hi, grid_points=5000)
        zeros = find_modes(spec_s, lo, hi, grid_points=5000)
        assert poles.size == zeros.size > 0
        assert np.allclose(poles, zeros, rtol=1e-6)

    def test_foster_reactance_increases_between_extrema(self):
        spec = CircuitSpec(L=1.0, C=100.0, Cg=1.0, N=300)
        first = dispersion(spec, 1)
        grid = np.linspace(0.5 * first, dispersion(spec, 6), 6000)
        z = input_impedance(spec, grid)
        absz = np.abs(z)
        x = z.imag
        # indices of grid-local extrema of |Z|
        ext = [
            i
            for i in range(1, grid.size - 1)
            if (absz[i] > absz[i - 1] and absz[i] > absz[i + 1])
            or (absz[i] < absz[i - 1] and absz[i] < absz[i + 1])
        ]
        segments = zip([0] + ext, ext + [grid.size - 1])
        for a, b in segments:
            seg = x[a + 1 : b]  # open interval between extrema
            if seg.size > 1:
                assert np.all(np.diff(seg) > 0)

    def test_rejects_bad_range(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=10)
        with pytest.raises(ValueError):
            find_modes(spec, 1.0, 0.5)


class TestCircuitSpec:
    def test_plasma_and_scale(self):
        spec = CircuitSpec(L=4.0, C=0.25, Cg=0.1, N=5)
        assert spec.omega_p == pytest.approx(1.0, rel=1e-15)
        assert spec.z_inf == pytest.approx(4.0, rel=1e-15)

    def test_c_zero_limits(self):
        spec = CircuitSpec(L=1.0, C=0.0, Cg=1.0, N=5)
        assert math.isinf(spec.omega_p)
        assert math.isinf(spec.z_inf)

    def test_validation(self):
        with pytest.raises(ValueError):
            CircuitSpec(L=0.0, C=1.0, Cg=1.0, N=5)
        with pytest.raises(ValueError):
            CircuitSpec(L=1.0, C=-1.0, Cg=1.0, N=5)
        with pytest.raises(ValueError):
            CircuitSpec(L=1.0, C=1.0, Cg=1.0, N=0)
