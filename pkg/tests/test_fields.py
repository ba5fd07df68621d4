import numpy as np
import pytest

from diffstore import ComplexField, GridSpec, SpectralField, forward_ft, inverse_ft
from diffstore.fields import rotate_quarter, sample_bilinear

from conftest import random_field, rel_l2


class TestGridSpec:
    @pytest.mark.parametrize("nx,ny", [(7, 64), (64, 7), (6, 64), (63, 64), (8, 9)])
    def test_rejects_bad_counts(self, nx, ny):
        with pytest.raises(ValueError):
            GridSpec(nx, ny, 4e-6, 4e-6)

    @pytest.mark.parametrize("dx,dy", [(0.0, 4e-6), (4e-6, -1e-6), (np.nan, 4e-6)])
    def test_rejects_bad_pitch(self, dx, dy):
        with pytest.raises(ValueError):
            GridSpec(64, 64, dx, dy)

    def test_axes_centered(self, grid64):
        x = grid64.x_axis()
        assert x[32] == 0.0
        assert x[0] == -32 * 4e-6
        q = grid64.qx_axis()
        assert q[32] == 0.0
        np.testing.assert_allclose(q[1] - q[0], 2 * np.pi / (64 * 4e-6))

    def test_nyquist(self, grid64):
        assert grid64.q_nyquist == pytest.approx(np.pi / 4e-6)


class TestFieldValidation:
    def test_rejects_nan_with_index(self, grid64):
        amp = np.zeros(grid64.shape, complex)
        amp[3, 5] = np.nan
        with pytest.raises(ValueError, match=r"\(3, 5\)"):
            ComplexField(grid64, amp)

    def test_rejects_shape_mismatch(self, grid64):
        with pytest.raises(ValueError, match="shape"):
            ComplexField(grid64, np.zeros((64, 32), complex))

    def test_amplitude_immutable(self, grid64):
        fld = random_field(grid64, 0)
        with pytest.raises(ValueError):
            fld.amplitude[0, 0] = 1.0

    def test_spectral_grid_mismatch_rejected(self, grid64):
        with pytest.raises(ValueError):
            SpectralField(grid64, np.zeros((32, 64), complex))


class TestForwardFt:
    def test_uniform_field_is_dc_only(self, grid64):
        fld = ComplexField(grid64, np.ones(grid64.shape))
        spec = forward_ft(fld)
        mag = spec.magnitude()
        assert np.unravel_index(mag.argmax(), mag.shape) == (32, 32)
        off_dc = mag.copy()
        off_dc[32, 32] = 0.0
        assert off_dc.max() <= 1e-12 * mag.max()
        # DC value = sum psi dx dy
        assert spec.amplitude[32, 32] == pytest.approx(64 * 64 * (4e-6) ** 2)

    def test_plane_wave_single_bin(self, grid64):
        q0 = grid64.qx_axis()[40]
        X, _ = grid64.meshgrid()
        spec = forward_ft(ComplexField(grid64, np.exp(1j * q0 * X)))
        mag = spec.magnitude()
        assert np.unravel_index(mag.argmax(), mag.shape) == (40, 32)
        energy = mag**2
        assert 1.0 - energy[40, 32] / energy.sum() < 1e-20

    def test_gaussian_spectral_waist(self, default_grid):
        # Oracle: second moments of |F|^2; amplitude exp(-r^2/w^2) has
        # spectral amplitude exp(-(q w / 2)^2), i.e. 1/e radius 2/w.
        w = 200e-6
        X, Y = default_grid.meshgrid()
        fld = ComplexField(default_grid, np.exp(-(X**2 + Y**2) / w**2))
        spec = forward_ft(fld)
        QX, QY = default_grid.q_meshgrid()
        power = spec.magnitude() ** 2
        var_q = float((power * QX**2).sum() / power.sum())
        measured_waist = 2.0 * np.sqrt(var_q)
        assert measured_waist == pytest.approx(2.0 / w, rel=1e-6)
        # and the real-space second-moment waist round-trips
        intensity = fld.intensity()
        var_x = float((intensity * X**2).sum() / intensity.sum())
        assert 2.0 * np.sqrt(var_x) == pytest.approx(w, rel=1e-6)

    def test_nonfinite_input_rejected_before_transform(self, grid64):
        # non-finite values are rejected at field construction, which is the
        # only way data reaches forward_ft
        amp = np.ones(grid64.shape, complex)
        amp[1, 2] = np.inf
        with pytest.raises(ValueError, match=r"\(1, 2\)"):
            ComplexField(grid64, amp)


class TestInverseFt:
    def test_round_trip(self, grid64):
        fld = random_field(grid64, 1)
        back = inverse_ft(forward_ft(fld))
        assert rel_l2(back.amplitude, fld.amplitude) < 1e-12

    def test_dc_bin_gives_constant(self, grid64):
        spec_amp = np.zeros(grid64.shape, complex)
        A = 2.7 - 0.3j
        spec_amp[32, 32] = A
        fld = inverse_ft(SpectralField(grid64, spec_amp))
        expected = A / (64 * 4e-6) ** 2
        np.testing.assert_allclose(fld.amplitude, expected, rtol=1e-12)

    def test_hermitian_spectrum_gives_real_field(self, grid64):
        real_src = random_field(grid64, 2, real=True)
        spec = forward_ft(real_src)
        back = inverse_ft(spec)
        assert np.abs(back.amplitude.imag).max() < 1e-10 * np.abs(back.amplitude).max()


class TestFtProperties:
    @pytest.mark.parametrize("seed", range(20))
    def test_parseval(self, grid64, seed):
        fld = random_field(grid64, seed)
        spec = forward_ft(fld)
        assert abs(spec.energy() - fld.energy()) / fld.energy() < 1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_linearity(self, grid64, seed):
        f1 = random_field(grid64, seed)
        f2 = random_field(grid64, seed + 1000)
        a, b = 1.3 - 0.2j, -0.7 + 2.1j
        lhs = forward_ft(ComplexField(grid64, a * f1.amplitude + b * f2.amplitude))
        rhs = a * forward_ft(f1).amplitude + b * forward_ft(f2).amplitude
        assert rel_l2(lhs.amplitude, rhs) < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_shift_theorem(self, grid64, seed):
        fld = random_field(grid64, seed)
        shifted = ComplexField(grid64, np.roll(fld.amplitude, 1, axis=0))
        QX, _ = grid64.q_meshgrid()
        expected = forward_ft(fld).amplitude * np.exp(-1j * QX * grid64.dx)
        assert rel_l2(forward_ft(shifted).amplitude, expected) < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_hermitian_symmetry_for_real_fields(self, grid64, seed):
        fld = random_field(grid64, seed, real=True)
        S = forward_ft(fld).amplitude
        # bin at -q is the centered-index reflection (with periodic edge bin)
        reflected = np.roll(S[::-1, ::-1], 1, axis=(0, 1))
        assert rel_l2(reflected.conj(), S) < 1e-12


class TestRotateQuarter:
    def test_four_turns_identity(self, grid64):
        fld = random_field(grid64, 5)
        out = fld
        for _ in range(4):
            out = rotate_quarter(out)
        np.testing.assert_array_equal(out.amplitude, fld.amplitude)

    def test_maps_x_structure_to_y(self, grid64):
        X, Y = grid64.meshgrid()
        fld = ComplexField(grid64, np.exp(-((X - 5 * 4e-6) ** 2 + Y**2) / (40e-6) ** 2))
        rot = rotate_quarter(fld)
        ix, iy = np.unravel_index(np.abs(rot.amplitude).argmax(), grid64.shape)
        # blob at +x rotates to +y
        assert (ix, iy) == (32, 32 + 5)

    def test_requires_square_grid(self):
        g = GridSpec(64, 32, 4e-6, 4e-6)
        with pytest.raises(ValueError):
            rotate_quarter(ComplexField(g, np.zeros((64, 32), complex)))


class TestSampleBilinear:
    def test_exact_on_pixels(self, grid64):
        fld = random_field(grid64, 7)
        x = grid64.x_axis()[10]
        y = grid64.y_axis()[20]
        val = sample_bilinear(fld.amplitude, grid64, np.array([x]), np.array([y]))
        assert val[0] == fld.amplitude[10, 20]

    def test_linear_midpoint(self, grid64):
        fld = random_field(grid64, 8)
        x_mid = (grid64.x_axis()[10] + grid64.x_axis()[11]) / 2
        y = grid64.y_axis()[20]
        val = sample_bilinear(fld.amplitude, grid64, np.array([x_mid]), np.array([y]))
        expected = 0.5 * (fld.amplitude[10, 20] + fld.amplitude[11, 20])
        assert val[0] == pytest.approx(expected)
