"""Binary portable pixmap (P6) and graymap (P5) codec, maxval 255 only.

Writing always emits the canonical header ``P6\\n<w> <h>\\n255\\n`` (or P5),
so ``write(read(b)) == b`` for any input already in that form.
"""

from __future__ import annotations

import os
import re

import numpy as np

from .errors import CodecError
from .raster import BinaryRaster, GrayRaster, Raster, RgbRaster

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header(data: bytes):
    tokens = []
    pos = 0
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise CodecError("truncated header")
        tokens.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates maxval from the payload
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise CodecError("missing whitespace after maxval")
    return tokens, pos + 1


def read(data: bytes) -> Raster:
    if data[:2] not in (b"P5", b"P6"):
        raise CodecError(f"bad magic {data[:2]!r}")
    tokens, start = _header(data)
    magic, *nums = tokens
    try:
        w, h, maxval = (int(t) for t in nums)
    except ValueError:
        raise CodecError(f"non-numeric header field in {nums!r}") from None
    if maxval != 255:
        raise CodecError(f"maxval must be 255, got {maxval}")
    if w < 1 or h < 1:
        raise CodecError(f"bad dimensions {w}x{h}")
    channels = 3 if magic == b"P6" else 1
    need = w * h * channels
    payload = data[start : start + need]
    if len(payload) < need:
        raise CodecError(f"truncated payload: {len(payload)} of {need} bytes")
    px = np.frombuffer(payload, dtype=np.uint8)
    if channels == 3:
        return RgbRaster(px.reshape(h, w, 3))
    return GrayRaster(px.reshape(h, w))


def write(img: Raster | BinaryRaster) -> bytes:
    if isinstance(img, BinaryRaster):
        img = GrayRaster(np.where(img.pixels, 255, 0).astype(np.uint8))
    magic = b"P6" if isinstance(img, RgbRaster) else b"P5"
    head = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return head + img.pixels.tobytes()


def load(path: str | os.PathLike) -> Raster:
    with open(path, "rb") as fh:
        return read(fh.read())


def save(img: Raster | BinaryRaster, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(write(img))
