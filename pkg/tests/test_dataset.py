import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from genplanck.dataset import (AbscissaKind, DatasetError, OrdinateKind,
                               SpectrumDataset, convert_from_canonical,
                               convert_to_canonical, format_float,
                               read_spectrum_csv, write_spectrum_csv)
from genplanck.radiation import NATURAL, SI, planck_spectral_density


def planck_per_lambda(lam, t):
    """Per-wavelength Planck energy density written directly in λ."""
    h = 2 * math.pi * SI.hbar
    return 8 * math.pi * h * SI.c / lam ** 5 / np.expm1(h * SI.c / (lam * SI.k_boltzmann * t))


class TestContainer:
    def test_validation(self):
        with pytest.raises(DatasetError):
            SpectrumDataset([2.0, 1.0], [1.0, 1.0])
        with pytest.raises(DatasetError):
            SpectrumDataset([1.0, 2.0], [1.0, math.nan])
        with pytest.raises(DatasetError):
            SpectrumDataset([1.0, 2.0], [1.0, 1.0], sigma=[1.0, 0.0])
        with pytest.raises(DatasetError):
            SpectrumDataset([1.0, 2.0], [1.0])

    def test_from_unsorted(self):
        ds = SpectrumDataset.from_unsorted([3.0, 1.0, 2.0], [30.0, 10.0, 20.0], [3, 1, 2])
        np.testing.assert_array_equal(ds.abscissa, [1, 2, 3])
        np.testing.assert_array_equal(ds.value, [10, 20, 30])
        np.testing.assert_array_equal(ds.sigma, [1, 2, 3])


class TestConversion:
    def test_canonical_identity(self):
        ds = SpectrumDataset([1.0, 2.0], [3.0, 4.0])
        assert convert_to_canonical(ds) is ds

    def test_per_lambda_planck_curve(self):
        t = 5777.0
        lam = np.linspace(100e-9, 5000e-9, 300)
        ds = SpectrumDataset(lam, planck_per_lambda(lam, t), abscissa_kind="wavelength",
                             ordinate_kind="per_lambda")
        canon = convert_to_canonical(ds)
        assert canon.is_canonical
        assert np.all(np.diff(canon.abscissa) > 0)
        np.testing.assert_allclose(canon.value, planck_spectral_density(canon.abscissa, t),
                                   rtol=1e-10)

    def test_per_nu(self):
        omega = np.geomspace(1e12, 1e15, 10)
        rho = planck_spectral_density(omega, 300.0)
        ds = SpectrumDataset(omega / (2 * math.pi), 2 * math.pi * rho,
                             abscissa_kind="frequency", ordinate_kind="per_nu")
        canon = convert_to_canonical(ds)
        np.testing.assert_allclose(canon.abscissa, omega, rtol=1e-15)
        np.testing.assert_allclose(canon.value, rho, rtol=1e-15)

    @pytest.mark.parametrize("a_kind, o_kind", [("wavelength", "per_lambda"),
                                                ("frequency", "per_nu"),
                                                ("wavelength", "per_omega"),
                                                ("angular", "per_lambda")])
    def test_round_trip(self, a_kind, o_kind):
        omega = np.geomspace(1e12, 1e16, 40)
        rho = planck_spectral_density(omega, 1000.0)
        ds = SpectrumDataset(omega, rho, sigma=0.01 * rho)
        there = convert_from_canonical(ds, a_kind, o_kind)
        back = convert_to_canonical(there)
        np.testing.assert_allclose(back.abscissa, omega, rtol=1e-12)
        np.testing.assert_allclose(back.value, rho, rtol=1e-12)
        np.testing.assert_allclose(back.sigma, 0.01 * rho, rtol=1e-12)

    def test_natural_units(self):
        ds = SpectrumDataset([1.0, 2.0], [1.0, 1.0], abscissa_kind="wavelength",
                             ordinate_kind="per_lambda", units="natural")
        canon = convert_to_canonical(ds)
        np.testing.assert_allclose(canon.abscissa, [math.pi, 2 * math.pi])
        # rho_omega = rho_lambda * λ²/(2π)
        np.testing.assert_allclose(canon.value, [4 / (2 * math.pi), 1 / (2 * math.pi)])

    def test_nonpositive_wavelength(self):
        ds = SpectrumDataset([-1.0, 1.0], [1.0, 1.0], abscissa_kind="wavelength")
        with pytest.raises(DatasetError):
            convert_to_canonical(ds)


class TestCsv:
    def test_round_trip_exact(self):
        rng = np.random.default_rng(3)
        x = np.sort(rng.uniform(1, 10, 25))
        ds = SpectrumDataset(x, rng.normal(size=25), rng.uniform(0.1, 1, 25),
                             abscissa_kind="frequency", ordinate_kind="per_nu",
                             units="natural")
        back = read_spectrum_csv(io.StringIO(write_spectrum_csv(ds)))
        np.testing.assert_array_equal(back.abscissa, ds.abscissa)
        np.testing.assert_array_equal(back.value, ds.value)
        np.testing.assert_array_equal(back.sigma, ds.sigma)
        assert back.abscissa_kind is AbscissaKind.FREQUENCY
        assert back.ordinate_kind is OrdinateKind.PER_NU
        assert back.units is NATURAL.mode

    def test_file_path(self, tmp_path):
        path = tmp_path / "s.csv"
        write_spectrum_csv(SpectrumDataset([1.0, 2.0], [0.5, 0.25]), path)
        ds = read_spectrum_csv(path)
        assert ds.sigma is None and ds.source_label == str(path)

    def test_defaults_and_sorting(self):
        ds = read_spectrum_csv(io.StringIO("abscissa,value\n3,1\n1,2\n2,3\n"))
        assert ds.is_canonical and ds.units is SI.mode
        np.testing.assert_array_equal(ds.value, [2, 3, 1])

    @pytest.mark.parametrize("text, line", [
        ("abscissa,value\n1,2\n2,x\n", 3),
        ("# units: si\nabscissa,value,sigma\n1,2,0\n", 3),
        ("abscissa,value\n1,2,3\n", 2),
        ("abscissa,value\n1,2\n\n1,4\n", 4),
        ("# units: cgs\nabscissa,value\n", 1),
        ("freq,value\n1,2\n", 1),
        ("abscissa,value\n1,inf\n", 2),
    ])
    def test_errors_report_line(self, text, line):
        with pytest.raises(DatasetError, match=f"line {line}:"):
            read_spectrum_csv(io.StringIO(text))

    def test_missing_header(self):
        with pytest.raises(DatasetError, match="header"):
            read_spectrum_csv(io.StringIO("# units: si\n"))

    def test_no_rows(self):
        with pytest.raises(DatasetError):
            read_spectrum_csv(io.StringIO("abscissa,value\n"))

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_format_float_round_trip(self, x):
        assert float(format_float(x)) == x
