"""Grayscale -> volumetric moisture calibration.

Holds the nine reference measurements (average grayscale of a soil image vs.
known volumetric moisture percent), least-squares polynomial fitting of
degree 1 or 2, the published quadratic, and its inverse.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NoRootInDomain, OutOfDomain, ParseError, RankDeficient

DOMAIN_GRACE = 5.0


class CalibrationSample(NamedTuple):
    gray: float
    moisture: float


_TABLE = (
    (98, 51),
    (105.78, 20.67),
    (104.8466, 23.23),
    (104.4055, 25.25),
    (103.6988, 30.43),
    (102.4501, 31.38),
    (102.13877, 33.78),
    (100.2818, 41.6),
    (109, 10),
)


def builtin_samples() -> list[CalibrationSample]:
    return [CalibrationSample(float(g), float(m)) for g, m in _TABLE]


@dataclass(frozen=True)
class PolynomialModel:
    degree: int
    coeffs: tuple[float, ...]  # constant term first
    domain: tuple[float, float]

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ValueError("degree must be 1 or 2")
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {self.degree + 1} coefficients")
        lo, hi = (float(v) for v in self.domain)
        if lo > hi:
            raise ValueError("domain lower bound exceeds upper bound")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "domain", (lo, hi))

    def __call__(self, x):
        """Raw (unclamped) evaluation; accepts scalars or arrays."""
        y = 0.0
        for c in reversed(self.coeffs):
            y = y * x + c
        return y

    @property
    def vertex(self) -> float | None:
        if self.degree != 2 or self.coeffs[2] == 0:
            return None
        return -self.coeffs[1] / (2.0 * self.coeffs[2])

    @property
    def monotonic(self) -> bool:
        """True when the model is strictly monotonic on its domain."""
        v = self.vertex
        lo, hi = self.domain
        if self.degree == 1 or self.coeffs[2] == 0:
            return self.coeffs[1] != 0
        return not (lo <= v <= hi)

    def value_range(self) -> tuple[float, float]:
        lo, hi = self.domain
        pts = [self(lo), self(hi)]
        if self.vertex is not None and lo <= self.vertex <= hi:
            pts.append(self(self.vertex))
        return min(pts), max(pts)


PUBLISHED = PolynomialModel(2, (996.78, -14.984, 0.0544), (98.0, 109.0))


def fit_polynomial(samples: Sequence[CalibrationSample], degree: int) -> PolynomialModel:
    """Least-squares fit through the normal equations.

    The abscissa is centered on its mean and scaled by its half-range before
    forming the Gram matrix; coefficients are mapped back to the raw basis.
    """
    if degree not in (1, 2):
        raise ValueError("degree must be 1 or 2")
    x = np.array([s.gray for s in samples], dtype=float)
    y = np.array([s.moisture for s in samples], dtype=float)
    if len(np.unique(x)) < degree + 1:
        raise RankDeficient(f"degree {degree} needs {degree + 1} distinct gray values, got {len(np.unique(x))}")
    mu = x.mean()
    scale = (x.max() - x.min()) / 2.0
    z = (x - mu) / scale
    A = np.vander(z, degree + 1, increasing=True)
    b = np.linalg.solve(A.T @ A, A.T @ y)
    # p(x) = sum_j b_j ((x - mu)/scale)^j, expanded binomially
    coeffs = [0.0] * (degree + 1)
    for j, bj in enumerate(b):
        for k in range(j + 1):
            coeffs[k] += bj * comb(j, k) * (-mu) ** (j - k) / scale**j
    return PolynomialModel(degree, tuple(coeffs), (float(x.min()), float(x.max())))


class Prediction(NamedTuple):
    moisture: float
    clamped: bool


def predict_moisture(model: PolynomialModel, gray: float, grace: float = DOMAIN_GRACE) -> Prediction:
    lo, hi = model.domain
    if not lo - grace <= gray <= hi + grace:
        raise OutOfDomain(f"gray {gray:.3f} outside calibrated range [{lo:.3f}, {hi:.3f}] +/- {grace:g}")
    y = float(model(gray))
    c = min(max(y, 0.0), 100.0)
    return Prediction(c, c != y)


def mse(model: PolynomialModel, samples: Sequence[CalibrationSample]) -> float:
    if not samples:
        raise ValueError("mse of an empty sample set")
    r = [model(s.gray) - s.moisture for s in samples]
    return float(np.mean(np.square(r)))


def invert_calibration(model: PolynomialModel, moisture: float, grace: float = DOMAIN_GRACE) -> float:
    """Gray value whose prediction is ``moisture``, searched within domain +/- grace."""
    lo, hi = model.domain
    lo, hi = lo - grace, hi + grace
    if model.degree == 1 or model.coeffs[2] == 0:
        c0, c1 = model.coeffs[:2]
        if c1 == 0:
            raise NoRootInDomain("constant model cannot be inverted")
        roots = [(moisture - c0) / c1]
    else:
        c, b, a = model.coeffs
        c = c - moisture
        disc = b * b - 4 * a * c
        if disc < 0:
            raise NoRootInDomain(f"moisture {moisture:.3f} is never reached")
        # cancellation-free pair of roots
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        roots = [q / a, c / q] if q != 0 else [0.0]
    inside = sorted(r for r in roots if lo <= r <= hi)
    if not inside:
        raise NoRootInDomain(f"moisture {moisture:.3f} has no preimage in [{lo:.3f}, {hi:.3f}]")
    if len(inside) > 1:
        raise NoRootInDomain(f"moisture {moisture:.3f} has two preimages; model not monotonic here")
    return inside[0]


# -- files -------------------------------------------------------------------


def parse_samples(text: str) -> list[CalibrationSample]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            g, m = (float(v) for v in line.split(","))
        except ValueError:
            raise ParseError(f"line {n}: expected 'gray,moisture', got {raw!r}") from None
        out.append(CalibrationSample(g, m))
    return out


def load_samples(path: str | os.PathLike) -> list[CalibrationSample]:
    with open(path) as fh:
        return parse_samples(fh.read())


def format_model(model: PolynomialModel) -> str:
    coeffs = ",".join(repr(c) for c in model.coeffs)
    lo, hi = model.domain
    return f"degree={model.degree}\ncoeffs={coeffs}\ndomain={lo!r},{hi!r}\n"


def parse_model(text: str) -> PolynomialModel:
    fields = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {raw!r}")
        fields[key.strip()] = val.strip()
    try:
        degree = int(fields["degree"])
        coeffs = tuple(float(v) for v in fields["coeffs"].split(","))
        lo, hi = (float(v) for v in fields["domain"].split(","))
        return PolynomialModel(degree, coeffs, (lo, hi))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad model file: {exc}") from None


def load_model(path: str | os.PathLike) -> PolynomialModel:
    with open(path) as fh:
        return parse_model(fh.read())
