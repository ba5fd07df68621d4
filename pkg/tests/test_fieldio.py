import json

import numpy as np
import pytest

from diffstore import ComplexField, GridSpec, read_field, write_field, write_pgm

from conftest import random_field


class TestRawFieldFormat:
    def test_round_trip_exact(self, tmp_path, grid64):
        fld = random_field(grid64, 3)
        path = tmp_path / "f.field"
        write_field(path, fld)
        back = read_field(path)
        assert back.grid == grid64
        np.testing.assert_array_equal(back.amplitude, fld.amplitude)

    def test_header_is_json_line(self, tmp_path, grid64):
        path = tmp_path / "f.field"
        write_field(path, random_field(grid64, 4))
        header = json.loads(path.read_bytes().split(b"\n", 1)[0])
        assert header == {"nx": 64, "ny": 64, "dx": 4e-6, "dy": 4e-6}

    def test_payload_is_little_endian_interleaved(self, tmp_path, grid64):
        fld = random_field(grid64, 5)
        path = tmp_path / "f.field"
        write_field(path, fld)
        payload = path.read_bytes().split(b"\n", 1)[1]
        raw = np.frombuffer(payload, dtype="<f8").reshape(64, 64, 2)
        np.testing.assert_array_equal(raw[..., 0], fld.amplitude.real)
        np.testing.assert_array_equal(raw[..., 1], fld.amplitude.imag)

    def test_malformed_header_rejected(self, tmp_path):
        path = tmp_path / "bad.field"
        path.write_bytes(b"not json\n" + b"\x00" * 16)
        with pytest.raises(ValueError, match="header"):
            read_field(path)

    def test_truncated_payload_rejected(self, tmp_path, grid64):
        path = tmp_path / "short.field"
        write_field(path, random_field(grid64, 6))
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(ValueError, match="expected"):
            read_field(path)


class TestPgm:
    def test_header_and_scaling(self, tmp_path):
        img = np.zeros((8, 10))
        img[2, 3] = 2.0  # max -> 65535
        img[4, 5] = 1.0  # half -> 32768 after rounding
        path = tmp_path / "i.pgm"
        write_pgm(path, img)
        data = path.read_bytes()
        header, payload = data.split(b"65535\n", 1)
        assert header == b"P5\n8 10\n"
        pixels = np.frombuffer(payload, dtype=">u2").reshape(10, 8)
        assert pixels.max() == 65535
        # rows run top to bottom with +y at top: row index = ny-1-iy, col = ix
        assert pixels[10 - 1 - 3, 2] == 65535
        assert pixels[10 - 1 - 5, 4] == 32768

    def test_zero_image(self, tmp_path):
        path = tmp_path / "z.pgm"
        write_pgm(path, np.zeros((8, 8)))
        payload = path.read_bytes().split(b"65535\n", 1)[1]
        assert not np.frombuffer(payload, dtype=">u2").any()

    def test_rejects_non_2d(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm(tmp_path / "x.pgm", np.zeros((2, 2, 2)))
