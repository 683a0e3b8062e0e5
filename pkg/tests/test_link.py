import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moistrover import link
from moistrover.errors import BadMap, ChecksumError, FrameError, RangeError, VoltageRange

ADC = link.AdcModel()


class TestEncode:
    def test_zero_volts(self):
        f = link.encode_frame(ADC, 3, 0x0102, 0.0)
        assert f == bytes([0xA5, 3, 1, 2, 0, 0, 0xA5 ^ 3 ^ 1 ^ 2])
        assert link.hexdump(f) == "A5 03 01 02 00 00 A5"

    def test_full_scale(self):
        assert ADC.quantize(5.0) == 1023
        f = link.encode_frame(ADC, 1, 0, 5.0)
        assert (f[4] << 8) | f[5] == 1023

    def test_half_scale(self):
        assert ADC.quantize(2.5) == 511

    def test_bad_inputs(self):
        with pytest.raises(VoltageRange):
            link.encode_frame(ADC, 1, 0, 5.1)
        with pytest.raises(VoltageRange):
            link.encode_frame(ADC, 1, 0, -0.1)
        with pytest.raises(ValueError):
            link.encode_frame(ADC, 255, 0, 1.0)
        with pytest.raises(ValueError):
            link.encode_frame(ADC, 1, 70000, 1.0)

    def test_adc_validation(self):
        with pytest.raises(ValueError):
            link.AdcModel(divider_ratio=0.7)
        with pytest.raises(ValueError):
            link.AdcModel(bits=0)


class TestDecode:
    def test_round_trip_sweep(self):
        bound = ADC.v_sensor_max / ADC.full_code
        for v in np.linspace(0.0, 5.0, 10_001):
            r = link.decode_frame(ADC, link.encode_frame(ADC, 2, 9, float(v)))
            assert abs(r.voltage - v) <= bound
            assert r.voltage <= v + 1e-12  # floor quantization never overshoots
        assert ADC.lsb <= bound

    def test_fields(self):
        r = link.decode_frame(ADC, link.encode_frame(ADC, 7, 513, 2.5))
        assert (r.sensor_id, r.sequence) == (7, 513)
        assert r.moisture == pytest.approx(50.0, abs=0.1)

    def test_checksum_flip(self):
        f = bytearray(link.encode_frame(ADC, 1, 1, 1.0))
        f[4] ^= 0x01
        with pytest.raises(ChecksumError):
            link.decode_frame(ADC, f)

    def test_bad_magic(self):
        f = bytearray(link.encode_frame(ADC, 1, 1, 1.0))
        f[0] = 0
        with pytest.raises(FrameError):
            link.decode_frame(ADC, f)

    def test_length(self):
        with pytest.raises(FrameError):
            link.decode_frame(ADC, b"\xa5\x01")

    def test_reserved_id_and_range(self):
        head = bytes([0xA5, 0xFF, 0, 0, 0, 0])
        with pytest.raises(FrameError):
            link.decode_frame(ADC, head + bytes([link.checksum(head)]))
        head = bytes([0xA5, 1, 0, 0, 0x04, 0x00])  # code 1024
        with pytest.raises(RangeError):
            link.decode_frame(ADC, head + bytes([link.checksum(head)]))

    def test_every_single_byte_corruption_detected(self):
        ref = link.encode_frame(ADC, 4, 0xBEEF, 3.21)
        missed = []
        for i in range(6):
            for val in range(256):
                if val == ref[i]:
                    continue
                f = bytearray(ref)
                f[i] = val
                try:
                    link.decode_frame(ADC, f)
                    missed.append((i, val))
                except FrameError:
                    pass
        assert missed == []

    @given(st.binary(min_size=7, max_size=7))
    def test_never_crashes_unexpectedly(self, data):
        try:
            r = link.decode_frame(ADC, data)
        except FrameError:
            return
        assert 0 <= r.voltage <= ADC.v_sensor_max + 1e-9


class TestMoistureMap:
    @pytest.mark.parametrize("v, m", [(5.0, 0.0), (0.0, 100.0), (2.5, 50.0), (6.0, 0.0), (-1.0, 100.0)])
    def test_defaults(self, v, m):
        assert link.voltage_to_moisture(v) == m

    def test_inverted_map(self):
        mp = link.MoistureMap(v_dry=1.0, v_wet=4.0)
        assert link.voltage_to_moisture(2.5, mp) == 50.0
        assert mp.voltage_for(50.0) == 2.5

    def test_bad_map(self):
        with pytest.raises(BadMap):
            link.MoistureMap(2.0, 2.0)

    @given(st.floats(0, 100))
    def test_voltage_for_inverts(self, m):
        assert link.voltage_to_moisture(link.MoistureMap().voltage_for(m)) == pytest.approx(m, abs=1e-9)
