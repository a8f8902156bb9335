"""Signed fixed-point arithmetic with symmetric saturation.

Models a hardware data path that stores values as ``code * 2**-frac_bits``
with ``total_bits`` two's-complement bits. Saturation is symmetric at
``+/-(2**(total_bits-1) - 1)`` so negation and absolute value never overflow.
Rounding is half away from zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class FixedFormat:
    """Quantization format: total width (including sign) and fraction bits."""

    total_bits: int
    frac_bits: int

    def __post_init__(self):
        if not 1 <= self.frac_bits < self.total_bits:
            raise ValueError(
                f"need 1 <= frac_bits < total_bits, got w={self.total_bits} f={self.frac_bits}"
            )

    @property
    def max_code(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def scale(self) -> float:
        return float(1 << self.frac_bits)

    @property
    def resolution(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def max_value(self) -> float:
        return self.max_code * self.resolution

    def __str__(self):
        return f"fixed:w={self.total_bits},f={self.frac_bits}"


#: Presets: 10-bit (1 sign, 4 integer, 5 fraction) and 12-bit (1, 4, 7).
W10 = FixedFormat(10, 5)
W12 = FixedFormat(12, 7)


def parse_format(text: str) -> FixedFormat | None:
    """Parse "float" or "fixed:w=10,f=5" into a format (None means float)."""
    t = text.strip().lower()
    if t == "float":
        return None
    if not t.startswith("fixed:"):
        raise ConfigError(f"unknown arithmetic {text!r} (expected 'float' or 'fixed:w=..,f=..')")
    fields = {}
    for part in t[len("fixed:"):].split(","):
        if "=" not in part:
            raise ConfigError(f"bad arithmetic field {part!r} in {text!r}")
        k, v = part.split("=", 1)
        fields[k.strip()] = v.strip()
    try:
        w = int(fields.pop("w"))
        f = int(fields.pop("f"))
    except KeyError as e:
        raise ConfigError(f"arithmetic {text!r} is missing field {e.args[0]!r}") from None
    except ValueError:
        raise ConfigError(f"non-integer width in arithmetic {text!r}") from None
    if fields:
        raise ConfigError(f"unknown arithmetic fields {sorted(fields)} in {text!r}")
    try:
        return FixedFormat(w, f)
    except ValueError as e:
        raise ConfigError(str(e)) from None


@dataclass(frozen=True)
class FixedValue:
    """An integer code interpreted as ``code * 2**-frac_bits``."""

    code: int
    fmt: FixedFormat

    def __post_init__(self):
        if abs(self.code) > self.fmt.max_code:
            raise ValueError(f"code {self.code} outside +/-{self.fmt.max_code}")


def quantize(x: float, fmt: FixedFormat) -> FixedValue:
    """Round-half-away-from-zero quantizer with saturation."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    code = int(math.floor(abs(x) * fmt.scale + 0.5))
    if x < 0:
        code = -code
    code = max(-fmt.max_code, min(fmt.max_code, code))
    return FixedValue(code, fmt)


def quantize_array(x: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    """Vector quantizer; returns int32 codes."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot quantize non-finite values")
    mag = np.floor(np.abs(x) * fmt.scale + 0.5)
    code = np.where(x < 0, -mag, mag)
    return np.clip(code, -fmt.max_code, fmt.max_code).astype(np.int32)


def to_real(v: FixedValue) -> float:
    return v.code * v.fmt.resolution


def codes_to_real(codes: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    return codes.astype(np.float64) * fmt.resolution


def _check_same_format(a: FixedValue, b: FixedValue):
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")


def sat_add(a: FixedValue, b: FixedValue) -> FixedValue:
    _check_same_format(a, b)
    q = a.fmt.max_code
    return FixedValue(max(-q, min(q, a.code + b.code)), a.fmt)


def sat_sub(a: FixedValue, b: FixedValue) -> FixedValue:
    _check_same_format(a, b)
    q = a.fmt.max_code
    return FixedValue(max(-q, min(q, a.code - b.code)), a.fmt)
