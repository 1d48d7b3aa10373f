import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genplanck.errors import DomainError
from genplanck.extfield import ExternalField
from genplanck.heat import (DebyeSolid, EinsteinSolid, debye_heat_capacity,
                            debye_internal_energy,
                            debye_internal_energy_reduced,
                            debye_low_t_energy_coefficient,
                            debye_low_t_heat_capacity, debye_mode_count,
                            debye_solid_from_material,
                            debye_solid_from_temperature,
                            einstein_heat_capacity,
                            einstein_heat_capacity_low_t,
                            einstein_internal_energy,
                            einstein_internal_energy_low_t,
                            generalized_phonon_heat_capacity,
                            generalized_phonon_internal_energy,
                            oscillator_mean_energy, phonon_mode_density)
from genplanck.radiation import NATURAL, SI, mean_photon_energy

import oracles

DEBYE_1 = 0.6744155640778147
DEBYE_PRIME_1 = -0.27731657162546475
# natural units, T_D = 1, N = 1, field P=0 R=0.05 S=1, T=1 (mpmath)
U_GEN = 1.9220843576217718
DU_GEN_DT = 2.786109919504104

COPPER = dict(n_density=8.49e28, v_t=2325.0, v_l=4760.0, volume=1e-6)


def natural_debye():
    return debye_solid_from_temperature(1.0, 1.0, NATURAL)


class TestOscillator:
    def test_classical_limit(self):
        assert oscillator_mean_energy(1e-6, 1.0, NATURAL) == pytest.approx(1.0, rel=1e-6)

    def test_equal_to_kt(self):
        assert oscillator_mean_energy(1.0, 1.0, NATURAL) == pytest.approx(
            0.5819767068693264, rel=1e-15)

    def test_same_as_photon_energy(self):
        omega = np.geomspace(1e11, 1e15, 20)
        np.testing.assert_array_equal(oscillator_mean_energy(SI.hbar * omega, 300.0),
                                      mean_photon_energy(omega, 300.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            oscillator_mean_energy(0.0, 1.0)


class TestEinstein:
    def test_solid_validation(self):
        with pytest.raises(DomainError):
            EinsteinSolid(0.0)
        with pytest.raises(DomainError):
            EinsteinSolid(1.0, 0.5)

    def test_energy_value(self):
        assert einstein_internal_energy(EinsteinSolid(1.0), 1.0, NATURAL) == pytest.approx(
            1.7459301206079793, rel=1e-15)

    def test_energy_limits(self):
        solid = EinsteinSolid(1.0, 4.0)
        assert einstein_internal_energy(solid, 1e3, NATURAL) == pytest.approx(
            3 * 4 * 1e3, rel=1e-3)
        assert einstein_internal_energy(solid, 1e-2, NATURAL) == pytest.approx(
            einstein_internal_energy_low_t(solid, 1e-2, NATURAL), rel=1e-2)

    def test_heat_capacity_value(self):
        assert einstein_heat_capacity(EinsteinSolid(1.0), 1.0, NATURAL) == pytest.approx(
            3 * 0.9206735942077923, rel=1e-14)

    def test_dulong_petit(self):
        solid = EinsteinSolid(1.0, 2.0)
        assert einstein_heat_capacity(solid, 1e3, NATURAL) / 6 == pytest.approx(1.0, rel=1e-4)
        assert einstein_heat_capacity(solid, 100.0, NATURAL) / 6 == pytest.approx(1.0, abs=1e-3)

    def test_low_t_asymptote(self):
        solid = EinsteinSolid(1.0)
        exact = einstein_heat_capacity(solid, 1 / 20, NATURAL)
        approx = einstein_heat_capacity_low_t(solid, 1 / 20, NATURAL)
        assert abs(approx / exact - 1) < 0.01
        exact = einstein_heat_capacity(solid, 1 / 2, NATURAL)
        approx = einstein_heat_capacity_low_t(solid, 1 / 2, NATURAL)
        assert abs(approx / exact - 1) > 0.10

    def test_underflow_is_zero(self):
        with np.errstate(all="raise"):
            assert einstein_heat_capacity(EinsteinSolid(1.0), 1e-3, NATURAL) == 0.0

    def test_vectorized(self):
        t = np.array([0.5, 1.0, 2.0])
        out = einstein_heat_capacity(EinsteinSolid(1.0), t, NATURAL)
        assert out.shape == (3,)
        assert out[1] == einstein_heat_capacity(EinsteinSolid(1.0), 1.0, NATURAL)

    @pytest.mark.parametrize("ratio", np.geomspace(0.02, 100, 20))
    def test_derivative_consistency(self, ratio):
        solid = EinsteinSolid(3e13, 5.0)
        t = ratio * solid.temperature()
        fd = oracles.richardson_derivative(
            lambda s: einstein_internal_energy(solid, s), t, 1e-3 * t)
        assert einstein_heat_capacity(solid, t) == pytest.approx(fd, rel=1e-6)

    def test_monotone(self):
        t = np.geomspace(1e-3, 100, 2000)
        c = einstein_heat_capacity(EinsteinSolid(1.0), t, NATURAL)
        nz = c > 0
        assert np.all(np.diff(c[nz]) > 0)


class TestDebyeConstruction:
    def test_equal_speeds_compact_form(self):
        solid = debye_solid_from_material(1e28, 3000.0, 3000.0)
        assert solid.c_eff == pytest.approx(3000.0, rel=1e-15)
        assert solid.omega_d == pytest.approx((6 * math.pi ** 2 * 1e28) ** (1 / 3) * 3000.0,
                                              rel=1e-14)
        assert solid.t_d == pytest.approx(SI.hbar * solid.omega_d / SI.k_boltzmann, rel=1e-15)

    def test_effective_speed(self):
        s = debye_solid_from_material(**COPPER)
        assert 3 / s.c_eff ** 3 == pytest.approx(2 / 2325.0 ** 3 + 1 / 4760.0 ** 3, rel=1e-14)
        assert s.omega_d ** 3 == pytest.approx(
            18 * math.pi ** 2 * 8.49e28 / (2 / 2325.0 ** 3 + 1 / 4760.0 ** 3), rel=1e-13)
        # copper, textbook value about 343 K from elastic constants
        assert 300 < s.t_d < 380

    def test_density_scaling(self):
        a = debye_solid_from_material(1e28, 2000.0, 4000.0)
        b = debye_solid_from_material(2e28, 2000.0, 4000.0)
        assert b.omega_d / a.omega_d == pytest.approx(2 ** (1 / 3), rel=1e-14)

    @pytest.mark.parametrize("bad", [dict(n_density=0.0), dict(v_t=-1.0),
                                     dict(v_l=math.inf), dict(volume=0.0)])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            debye_solid_from_material(**{**COPPER, **bad})

    @settings(max_examples=10, deadline=None)
    @given(st.floats(26, 30), st.floats(2.5, 4.0), st.floats(2.5, 4.0), st.floats(-9, 0))
    def test_normalization(self, log_n, log_vt, log_vl, log_v):
        s = debye_solid_from_material(10 ** log_n, 10 ** log_vt, 10 ** log_vl, 10 ** log_v)
        assert debye_mode_count(s) == pytest.approx(3 * s.n_oscillators, rel=1e-10)

    def test_mode_density_quadratic(self):
        s = debye_solid_from_material(**COPPER)
        w = np.array([0.1, 0.2, 0.4]) * s.omega_d
        g = phonon_mode_density(w, s)
        np.testing.assert_allclose(g[1:] / g[:-1], 4.0, rtol=1e-14)

    def test_from_temperature(self):
        s = debye_solid_from_temperature(343.0, 1e22)
        assert s.t_d == pytest.approx(343.0, rel=1e-14)
        assert s.n_oscillators == pytest.approx(1e22, rel=1e-14)


class TestDebyeThermo:
    def test_two_energy_forms(self):
        s = debye_solid_from_material(**COPPER)
        for t in (s.t_d / 30, s.t_d, 5 * s.t_d):
            assert debye_internal_energy(s, t) == pytest.approx(
                debye_internal_energy_reduced(s, t), rel=1e-10)

    def test_low_t_energy(self):
        s = debye_solid_from_material(**COPPER)
        t = s.t_d / 100
        alpha = debye_low_t_energy_coefficient(s)
        assert alpha == pytest.approx(math.pi ** 2 * SI.k_boltzmann ** 4 * 1e-6
                                      / (10 * s.c_eff ** 3 * SI.hbar ** 3), rel=1e-14)
        assert debye_internal_energy(s, t) == pytest.approx(alpha * t ** 4, rel=5e-3)

    def test_high_t_energy(self):
        s = natural_debye()
        # 3NkT (1 - 3y/8 + y^2/20), y = T_D/T; the offset is the zero-point shift
        y = 0.01
        expected = 300.0 * (1 - 3 * y / 8 + y ** 2 / 20)
        assert debye_internal_energy(s, 100.0, NATURAL) == pytest.approx(expected, rel=1e-9)
        assert debye_internal_energy(s, 1e4, NATURAL) == pytest.approx(3e4, rel=1e-4)

    def test_heat_capacity_at_t_d(self):
        s = natural_debye()
        assert debye_heat_capacity(s, 1.0, NATURAL) == pytest.approx(
            3 * (DEBYE_1 - DEBYE_PRIME_1), rel=1e-10)

    def test_dulong_petit(self):
        s = debye_solid_from_material(**COPPER)
        ratio = debye_heat_capacity(s, 100 * s.t_d) / (3 * s.n_oscillators * SI.k_boltzmann)
        assert ratio == pytest.approx(1.0, abs=1e-3)

    def test_t_cubed_law(self):
        s = debye_solid_from_material(**COPPER)
        t = s.t_d / 50
        assert debye_heat_capacity(s, t) == pytest.approx(debye_low_t_heat_capacity(s, t),
                                                          rel=1e-2)

    def test_low_t_slope_and_ordering(self):
        s = natural_debye()
        t = np.geomspace(1 / 100, 1 / 20, 12)
        c = np.array([debye_heat_capacity(s, x, NATURAL) for x in t])
        slope = np.polyfit(np.log(t), np.log(c), 1)[0]
        assert slope == pytest.approx(3.0, abs=0.01)
        ein = einstein_heat_capacity(EinsteinSolid(1.0), t, NATURAL)
        assert np.all(ein < c)

    @pytest.mark.parametrize("ratio", np.geomspace(0.02, 100, 20))
    def test_derivative_consistency(self, ratio):
        s = debye_solid_from_material(**COPPER)
        t = ratio * s.t_d
        fd = oracles.richardson_derivative(lambda x: debye_internal_energy(s, x), t, 1e-3 * t)
        assert debye_heat_capacity(s, t) == pytest.approx(fd, rel=1e-6)

    def test_monotone(self):
        s = natural_debye()
        t = np.geomspace(1e-3, 100, 300)
        c = np.array([debye_heat_capacity(s, x, NATURAL) for x in t])
        assert np.all(np.diff(c) > 0)


class TestGeneralizedPhonon:
    def test_zero_field_energy(self):
        s = debye_solid_from_material(**COPPER)
        for t in (10.0, 300.0):
            assert generalized_phonon_internal_energy(s, t) == pytest.approx(
                debye_internal_energy(s, t), rel=1e-12)

    @pytest.mark.parametrize("beta", [-0.5, 0.1, 1.0])
    def test_constant_p(self, beta):
        s = natural_debye()
        f = ExternalField(beta)
        assert generalized_phonon_internal_energy(s, 0.7, f, NATURAL) == pytest.approx(
            (1 + beta) * debye_internal_energy(s, 0.7, NATURAL), rel=1e-12)
        assert generalized_phonon_heat_capacity(s, 0.7, f, NATURAL) == pytest.approx(
            (1 + beta) * debye_heat_capacity(s, 0.7, NATURAL), rel=1e-6)

    @pytest.mark.parametrize("ratio", np.geomspace(0.02, 100, 20))
    def test_zero_field_heat_capacity(self, ratio):
        s = debye_solid_from_material(**COPPER)
        t = ratio * s.t_d
        assert generalized_phonon_heat_capacity(s, t) == pytest.approx(
            debye_heat_capacity(s, t), rel=1e-6)

    def test_q_field_energy_pinned(self):
        s = natural_debye()
        f = ExternalField(0.0, 0.05, 1.0 / s.omega_d)
        assert generalized_phonon_internal_energy(s, 1.0, f, NATURAL) == pytest.approx(
            U_GEN, rel=1e-12)

    def test_q_field_energy_trapezoid(self):
        # direct ω-space integral of G hbar ω n_gen against the pinned value
        s = natural_debye()
        w = np.linspace(0, 1, 400_001)[1:]

        def integrand(w):
            out = np.zeros_like(w)
            pos = w > 0
            ww = w[pos]
            out[pos] = 9 * ww ** 3 * ((1 / np.expm1(ww)) - 0.05 * np.exp(-ww) / -np.expm1(-ww))
            return out
        value = oracles.trapezoid_richardson(integrand, 0.0, 1.0)
        assert value == pytest.approx(U_GEN, rel=1e-10)

    def test_q_field_heat_capacity_pinned(self):
        s = natural_debye()
        f = ExternalField(0.0, 0.05, 1.0 / s.omega_d)
        assert generalized_phonon_heat_capacity(s, 1.0, f, NATURAL) == pytest.approx(
            DU_GEN_DT, rel=1e-8)
