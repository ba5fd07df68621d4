import numpy as np
import pytest

from diffstore import (
    ComplexField,
    DoublePetal,
    GridPattern,
    GridSpec,
    Letter,
    LGMode,
    generate,
    lg_spectrum_check,
    sample_bilinear,
)
from diffstore.fields import rotate_quarter
from diffstore.patterns import footprint_radius, supported_glyphs

PETAL = DoublePetal(waist=100e-6, separation=475e-6, theta=np.pi / 2)


class TestDoublePetal:
    def test_peaks_at_expected_positions(self, default_grid):
        for theta in (0.0, np.pi / 6, np.pi / 2):
            fld = generate(DoublePetal(100e-6, 475e-6, theta), default_grid)
            inten = fld.intensity()
            ix, iy = np.unravel_index(inten.argmax(), inten.shape)
            cx = 0.5 * 475e-6 * np.cos(theta)
            cy = 0.5 * 475e-6 * np.sin(theta)
            expected = np.array([cx / 4e-6 + 256, cy / 4e-6 + 256])
            # argmax lands on one of the two centers
            d1 = np.hypot(ix - expected[0], iy - expected[1])
            d2 = np.hypot(ix - (512 - expected[0]), iy - (512 - expected[1]))
            assert min(d1, d2) <= 1.0

    def test_matches_closed_form_two_gaussian_oracle(self, default_grid):
        # Oracle: independent two-Gaussian evaluation with the 1/e-intensity
        # waist convention, amplitude exp(-r^2 / (2 w^2)), peak-normalized.
        w, d = 100e-6, 475e-6
        fld = generate(DoublePetal(w, d, 0.0), default_grid)
        X, Y = default_grid.meshgrid()
        half = d / 2.0
        formula = np.exp(-((X - half) ** 2 + Y**2) / (2 * w**2)) + np.exp(
            -((X + half) ** 2 + Y**2) / (2 * w**2)
        )
        formula /= formula.max()
        np.testing.assert_allclose(fld.amplitude.real, formula, rtol=1e-12, atol=0)
        # frozen midpoint/peak intensity ratio for this geometry (the peak
        # pixel sits up to half a pitch off the true petal center)
        measured = fld.intensity()[256, 256]
        assert measured == pytest.approx(0.0142054, rel=1e-3)

    def test_theta_plus_pi_identical(self, default_grid):
        a = generate(DoublePetal(100e-6, 475e-6, 0.3), default_grid)
        b = generate(DoublePetal(100e-6, 475e-6, 0.3 + np.pi), default_grid)
        np.testing.assert_allclose(a.intensity(), b.intensity(), rtol=1e-12, atol=0)

    def test_real_nonnegative_unit_peak(self, default_grid):
        fld = generate(PETAL, default_grid)
        assert np.all(fld.amplitude.imag == 0)
        assert np.all(fld.amplitude.real >= 0)
        assert np.abs(fld.amplitude).max() == pytest.approx(1.0)


class TestGridPattern:
    SPEC = GridPattern(bar_spacing=400e-6, bar_width=100e-6, n_bars=4)

    def test_four_fold_symmetric(self):
        g = GridSpec(768, 768, 4e-6, 4e-6)
        fld = generate(self.SPEC, g)
        rot = rotate_quarter(fld)
        np.testing.assert_allclose(rot.amplitude, fld.amplitude, atol=1e-12)

    def test_bar_count_along_line(self):
        g = GridSpec(768, 768, 4e-6, 4e-6)
        fld = generate(self.SPEC, g)
        # a horizontal cut through the origin runs midway between the two
        # central horizontal bars (centers at +-200 um) and crosses only the
        # 4 vertical bars
        row = np.abs(fld.amplitude[:, 384]) > 0.5
        groups = np.count_nonzero(np.diff(row.astype(int)) == 1)
        assert groups == 4

    def test_values_in_unit_interval(self):
        g = GridSpec(768, 768, 4e-6, 4e-6)
        fld = generate(self.SPEC, g)
        assert fld.amplitude.real.min() >= 0.0
        assert np.abs(fld.amplitude).max() == pytest.approx(1.0)


class TestLetter:
    def test_unknown_glyph_lists_supported_set(self, default_grid):
        with pytest.raises(ValueError, match=supported_glyphs()):
            Letter("Q", 700e-6)

    def test_height_respected(self):
        g = GridSpec(768, 768, 4e-6, 4e-6)
        fld = generate(Letter("I", 700e-6), g)
        mask = np.abs(fld.amplitude) > 0.5
        ys = np.where(mask.any(axis=0))[0]
        extent = (ys.max() - ys.min() + 1) * 4e-6
        assert extent == pytest.approx(700e-6, abs=3 * 4e-6)

    def test_real_nonnegative(self):
        g = GridSpec(768, 768, 4e-6, 4e-6)
        fld = generate(Letter("E", 900e-6), g)
        assert np.all(fld.amplitude.imag == 0)
        assert np.all(fld.amplitude.real >= -1e-15)


class TestLGMode:
    def test_vortex_core_dark(self, default_grid):
        fld = generate(LGMode(0, 1, 200e-6), default_grid)
        assert abs(fld.amplitude[256, 256]) == 0.0

    def test_winding_by_construction(self, default_grid):
        fld = generate(LGMode(0, -3, 120e-6), default_grid)
        theta = np.linspace(0, 2 * np.pi, 720, endpoint=False)
        vals = sample_bilinear(
            fld.amplitude, default_grid, 120e-6 * np.cos(theta), 120e-6 * np.sin(theta)
        )
        accumulated = np.sum(np.angle(np.roll(vals, -1) / vals))
        assert accumulated == pytest.approx(-6 * np.pi, rel=1e-9)

    def test_ring_intensity_rotationally_invariant(self, default_grid):
        # Exact lattice symmetry: |psi| equal on the octet {(+-a,+-b),(+-b,+-a)}
        fld = generate(LGMode(0, 2, 200e-6), default_grid)
        mag = np.abs(fld.amplitude)
        c = 256
        a, b = 40, 17
        octet = [
            mag[c + a, c + b], mag[c - a, c + b], mag[c + a, c - b], mag[c - a, c - b],
            mag[c + b, c + a], mag[c - b, c + a], mag[c + b, c - a], mag[c - b, c - a],
        ]
        assert (max(octet) - min(octet)) < 1e-10 * max(octet)

    def test_radial_node_for_p1(self, default_grid):
        fld = generate(LGMode(1, 0, 200e-6), default_grid)
        # L_1^0(2 r^2/w^2) changes sign at r = w/sqrt(2)
        x = default_grid.x_axis()
        profile = fld.amplitude[:, 256].real
        inner = profile[np.abs(x) < 0.5 * 200e-6 / np.sqrt(2)]
        outer = profile[(np.abs(x) > 1.1 * 200e-6 / np.sqrt(2)) & (np.abs(x) < 400e-6)]
        assert np.all(inner > 0)
        assert np.all(outer < 0)

    @pytest.mark.parametrize("p,l", [(6, 0), (0, 11), (-1, 0)])
    def test_index_bounds(self, p, l):
        with pytest.raises(ValueError):
            LGMode(p, l, 200e-6)


class TestLgSpectrumCheck:
    @pytest.mark.parametrize("l", [-2, -1, 1, 2])
    def test_winding_and_offset_magnitude(self, default_grid, l):
        winding, offset = lg_spectrum_check(0, l, 120e-6, default_grid)
        assert winding == l
        assert abs(offset) == pytest.approx(np.pi / 2, abs=0.01)

    def test_offset_sign_odd_for_unit_charge(self, default_grid):
        _, plus = lg_spectrum_check(0, 1, 120e-6, default_grid)
        _, minus = lg_spectrum_check(0, -1, 120e-6, default_grid)
        assert plus == pytest.approx(-minus, abs=0.01)

    def test_l0_reports_zero(self, default_grid):
        assert lg_spectrum_check(0, 0, 120e-6, default_grid) == (0, 0.0)

    def test_under_resolved_ring_rejected(self, default_grid):
        with pytest.raises(ValueError, match="under-resolved"):
            lg_spectrum_check(0, 1, 200e-6, default_grid)


class TestFitChecks:
    def test_oversized_pattern_rejected(self, grid64):
        with pytest.raises(ValueError):
            generate(DoublePetal(100e-6, 475e-6, 0.0), grid64)

    def test_footprint_radius_monotone_in_size(self):
        small = footprint_radius(DoublePetal(50e-6, 200e-6, 0.0))
        large = footprint_radius(DoublePetal(100e-6, 475e-6, 0.0))
        assert large > small
