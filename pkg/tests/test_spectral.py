"""Discretized operator spectra and the entropy conversions built on them."""

import json
import math

import numpy as np
import pytest

from varfrac.core import K0
from varfrac.orders import Constant, PowerOffset
from varfrac.spectral import (
    ApproximationReport,
    OperatorMatrix,
    VolumetricBound,
    approximation_numbers,
    assemble_matrix,
    ball_volume_root,
    carl_constant,
    carl_entropy_upper,
    diagonal_floor,
    index_domination_report,
    singular_values,
    spectrum_to_csv,
    volumetric_entropy_lower,
)


def diag_matrix(d, p=2.0, q=2.0) -> OperatorMatrix:
    d = np.asarray(d, dtype=float)
    return OperatorMatrix(n=d.size, r=1.0, p=p, q=q, entries=np.diag(d))


class TestAssembly:
    def test_two_cell_identity_order(self):
        m = assemble_matrix(Constant(1.0), 2)
        assert m.entries[0, 0] == pytest.approx(0.25, abs=1e-9)
        assert m.entries[1, 1] == pytest.approx(0.25, abs=1e-9)
        assert m.entries[1, 0] == pytest.approx(0.5, abs=1e-9)
        assert m.entries[0, 1] == 0.0

    def test_strict_upper_triangle_is_exact_zero(self):
        m = assemble_matrix(PowerOffset(0.5, 1.0, 1.0), 12)
        assert np.all(np.triu(m.entries, 1) == 0.0)

    def test_constant_order_diagonal_is_flat(self):
        # cells are translates of each other for a constant order
        d = assemble_matrix(Constant(0.7), 8).diagonal
        assert np.max(np.abs(d - d[0])) == 0.0

    def test_diagonal_floor_holds(self):
        for alpha in (Constant(0.5), PowerOffset(0.5, 1.0, 1.0)):
            for n in (4, 16, 64):
                m = assemble_matrix(alpha, n)
                assert np.min(m.diagonal) >= diagonal_floor(alpha, n, 1.0, 2.0, 2.0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            assemble_matrix(Constant(1.0), 0)
        with pytest.raises(ValueError):
            assemble_matrix(Constant(1.0), 4, r=1.5)
        with pytest.raises(ValueError):
            assemble_matrix(Constant(1.0), 4, p=0.5)

    def test_matrix_validation(self):
        with pytest.raises(ValueError):
            OperatorMatrix(n=2, r=1.0, p=2.0, q=2.0, entries=np.ones((2, 3)))
        with pytest.raises(ValueError):
            OperatorMatrix(n=2, r=1.0, p=2.0, q=2.0, entries=np.ones((2, 2)))
        bad = np.array([[1.0, 0.0], [math.nan, 1.0]])
        with pytest.raises(ValueError):
            OperatorMatrix(n=2, r=1.0, p=2.0, q=2.0, entries=bad)

    def test_csv_round_trip(self, tmp_path):
        m = assemble_matrix(PowerOffset(0.5, 1.0, 1.0), 6, r=0.5, p=2.0, q=4.0)
        path = tmp_path / "m.csv"
        m.to_csv(str(path))
        lines = path.read_text().splitlines()
        meta = json.loads(lines[0][2:])
        assert meta == {
            "basis_tag": "normalized-indicator",
            "n": 6,
            "p": 2.0,
            "q": 4.0,
            "r": 0.5,
        }
        back = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        assert np.array_equal(back, m.entries)


class TestSpectrum:
    def test_diag_spectrum(self):
        sv = singular_values(diag_matrix([3.0, 2.0, 1.0]))
        assert np.allclose(sv, [3.0, 2.0, 1.0], atol=1e-14)

    def test_identity_order_matches_volterra_spectrum(self):
        # classic singular values 2/((2k-1) pi), matched within 1% for k <= 20
        sv = singular_values(assemble_matrix(Constant(1.0), 512))
        k = np.arange(1, 21)
        exact = 2.0 / ((2.0 * k - 1.0) * math.pi)
        assert np.max(np.abs(sv[:20] / exact - 1.0)) <= 0.01

    def test_spectrum_csv_format(self, tmp_path):
        path = tmp_path / "s.csv"
        spectrum_to_csv([0.5, 0.25], str(path))
        assert path.read_text() == "k,sigma_k\n1,0.5\n2,0.25\n"


class TestApproximationNumbers:
    def test_operator_norm_bounded_by_gamma_minimum(self):
        for alpha in (Constant(0.5), Constant(1.0), PowerOffset(0.5, 1.0, 1.0)):
            rep = approximation_numbers(alpha, 4, 256)
            assert rep.values[0] <= 1.0 / K0 + 0.05
            assert rep.converged and rep.drift < 0.01

    def test_values_non_increasing(self):
        rep = approximation_numbers(Constant(0.8), 16, 256)
        assert np.all(np.diff(rep.values) <= 1e-12)

    def test_decay_rate_tracks_order(self):
        rep = approximation_numbers(Constant(1.0), 32, 512)
        n = np.arange(1, 33, dtype=float)
        slope = np.polyfit(np.log(n[7:]), np.log(rep.values[7:]), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.05)

    def test_rejects_bad_discretization(self):
        with pytest.raises(ValueError):
            approximation_numbers(Constant(1.0), 0)
        with pytest.raises(ValueError):
            approximation_numbers(Constant(1.0), 64, n_disc=128)
        with pytest.raises(ValueError):
            approximation_numbers(Constant(1.0), 8, n_disc=3000)


class TestCarl:
    def test_constant_values(self):
        assert carl_constant(1.0) == 2.0**7 * 96.0
        assert carl_constant(0.5) == pytest.approx(2.0**7 * math.sqrt(80.0), rel=1e-14)

    def test_harmonic_sequence_exponent_one(self):
        k = np.arange(1, 33, dtype=float)
        bounds = carl_entropy_upper(1.0 / k, 1.0)
        assert np.allclose(bounds, 12288.0 / k, rtol=1e-13)

    def test_requires_monotone_input(self):
        with pytest.raises(ValueError):
            carl_entropy_upper([1.0, 2.0], 0.5)

    def test_rejects_bad_exponent(self):
        for a in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError):
                carl_constant(a)

    def test_fitted_decay_preserved(self):
        # converting k^-0.5 keeps the polynomial rate
        k = np.arange(1, 65, dtype=float)
        bounds = carl_entropy_upper(k**-0.5, 0.5)
        slope = np.polyfit(np.log(k[7:]), np.log(bounds[7:]), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.05)


class TestVolumetric:
    def test_equal_diagonal_same_exponents_is_half_diagonal(self):
        for d in (1.0, 0.3, 7.5):
            bound = volumetric_entropy_lower(diag_matrix([d] * 5))
            assert bound.value == d / 2.0

    def test_two_cell_identity_order(self):
        m = assemble_matrix(Constant(1.0), 2)
        assert volumetric_entropy_lower(m).value == pytest.approx(0.125, abs=1e-9)

    def test_p2_qinf_four_dim_ones(self):
        bound = volumetric_entropy_lower(diag_matrix([1.0] * 4, p=2.0, q=math.inf))
        exact = (math.pi**2 / 32.0) ** 0.25 / 2.0
        assert bound.value == pytest.approx(exact, rel=1e-12)
        assert bound.value == pytest.approx(0.3745, abs=0.005)

    def test_scales_linearly(self):
        base = volumetric_entropy_lower(diag_matrix([1.0, 2.0, 4.0])).value
        scaled = volumetric_entropy_lower(diag_matrix([3.0, 6.0, 12.0])).value
        assert scaled == pytest.approx(3.0 * base, rel=1e-12)

    def test_rejects_nonpositive_diagonal(self):
        with pytest.raises(ValueError):
            volumetric_entropy_lower(diag_matrix([1.0, 0.0]))

    def test_ball_volume_root_values(self):
        assert ball_volume_root(3, math.inf) == 2.0
        # unit 2-ball in dimension 2 has volume pi
        assert ball_volume_root(2, 2.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_ball_volume_root_no_overflow(self):
        assert math.isfinite(ball_volume_root(10**6, 2.0))


class TestBracket:
    def test_lower_below_carl_upper_at_matched_dimension(self):
        for alpha, aexp in ((Constant(0.5), 0.5), (PowerOffset(0.5, 1.0, 1.0), 0.5)):
            m = assemble_matrix(alpha, 32)
            carl = carl_entropy_upper(singular_values(m), aexp)
            vol = volumetric_entropy_lower(m)
            assert vol.value <= carl[-1]

    def test_smoother_order_dominated_indexwise(self):
        sv_smooth = singular_values(assemble_matrix(Constant(1.4), 128))
        sv_rough = singular_values(assemble_matrix(Constant(0.6), 128))
        report = index_domination_report(sv_smooth, sv_rough)
        assert report["checked"] == 128
        assert report["violations"] == 0
        assert report["worst_excess"] < 0.0
