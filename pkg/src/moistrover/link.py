"""Simulated sensor radio link.

A 0-5 V hygrometer output passes an ideal unity-gain buffer and a resistive
divider into a 10-bit ADC referenced to 3.3 V. The code is framed as

    A5 | id | seq_hi seq_lo | code_hi code_lo | xor(bytes 0..5)

and the receiver scales the code back to sensor volts and then to moisture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import BadMap, ChecksumError, FrameError, RangeError, VoltageRange

MAGIC = 0xA5
FRAME_LEN = 7


@dataclass(frozen=True)
class AdcModel:
    v_ref: float = 3.3
    bits: int = 10
    v_sensor_max: float = 5.0
    divider_ratio: float = 0.66

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        # small slack: 0.66 * 5.0 is 3.3000000000000003 in binary floating point
        if self.divider_ratio * self.v_sensor_max > self.v_ref * (1 + 1e-12):
            raise ValueError("divided full-scale voltage exceeds the ADC reference")

    @property
    def full_code(self) -> int:
        return 2**self.bits - 1

    @property
    def lsb(self) -> float:
        """Sensor-side volts per ADC count."""
        return self.v_ref / self.divider_ratio / self.full_code

    def quantize(self, voltage: float) -> int:
        if not 0.0 <= voltage <= self.v_sensor_max:
            raise VoltageRange(f"{voltage:.3f} V outside [0, {self.v_sensor_max:.3f}] V")
        divided = voltage * self.divider_ratio
        return min(math.floor(divided / self.v_ref * self.full_code), self.full_code)

    def reconstruct(self, code: int) -> float:
        return code / self.full_code * self.v_ref / self.divider_ratio


@dataclass(frozen=True)
class MoistureMap:
    """Linear hygrometer transfer: ``v_dry`` reads 0 %, ``v_wet`` reads 100 %."""

    v_dry: float = 5.0
    v_wet: float = 0.0

    def __post_init__(self):
        if self.v_dry == self.v_wet:
            raise BadMap("v_dry and v_wet must differ")

    def voltage_for(self, moisture: float) -> float:
        return self.v_dry + (self.v_wet - self.v_dry) * moisture / 100.0

    @property
    def slope(self) -> float:
        """Percent per volt, absolute."""
        return 100.0 / abs(self.v_wet - self.v_dry)


class SensorReading(NamedTuple):
    sensor_id: int
    sequence: int
    voltage: float
    moisture: float


def voltage_to_moisture(voltage: float, mapping: MoistureMap = MoistureMap()) -> float:
    if mapping.v_dry == mapping.v_wet:
        raise BadMap("v_dry and v_wet must differ")
    m = 100.0 * (voltage - mapping.v_dry) / (mapping.v_wet - mapping.v_dry)
    return min(max(m, 0.0), 100.0)


def checksum(data: bytes) -> int:
    x = 0
    for b in data:
        x ^= b
    return x


def encode_frame(adc: AdcModel, sensor_id: int, sequence: int, voltage: float) -> bytes:
    if not 0 <= sensor_id <= 254:
        raise ValueError("sensor_id must be in 0..254")
    if not 0 <= sequence <= 0xFFFF:
        raise ValueError("sequence must fit in 16 bits")
    code = adc.quantize(voltage)
    head = bytes([MAGIC, sensor_id, sequence >> 8, sequence & 0xFF, code >> 8, code & 0xFF])
    return head + bytes([checksum(head)])


def decode_frame(adc: AdcModel, frame: bytes, mapping: MoistureMap = MoistureMap()) -> SensorReading:
    frame = bytes(frame)
    if len(frame) != FRAME_LEN:
        raise FrameError(f"frame is {len(frame)} bytes, expected {FRAME_LEN}")
    if frame[0] != MAGIC:
        raise FrameError(f"bad magic 0x{frame[0]:02X}")
    if checksum(frame[:6]) != frame[6]:
        raise ChecksumError(f"checksum 0x{frame[6]:02X} != 0x{checksum(frame[:6]):02X}")
    if frame[1] == 0xFF:
        raise FrameError("sensor id 255 is reserved")
    code = (frame[4] << 8) | frame[5]
    if code > adc.full_code:
        raise RangeError(f"ADC code {code} exceeds {adc.full_code}")
    voltage = adc.reconstruct(code)
    return SensorReading(frame[1], (frame[2] << 8) | frame[3], voltage, voltage_to_moisture(voltage, mapping))


def hexdump(frame: bytes) -> str:
    return " ".join(f"{b:02X}" for b in frame)
