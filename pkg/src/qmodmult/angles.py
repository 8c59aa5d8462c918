"""Exact dyadic rotation angles.

Every rotation in the generated circuits is an integer multiple of
pi/2^k, so angles are stored as exact dyadic rationals (numerator,
log2 denominator) instead of floats.  This keeps Fourier-basis
simulation bit-exact and makes rotation-truncation thresholds sharp.
"""
from __future__ import annotations

from dataclasses import dataclass

MAX_LOG2_DENOMINATOR = 4096


@dataclass(frozen=True)
class DyadicAngle:
    """Angle numerator*pi / 2**log2_denominator, reduced and in [0, 2*pi)."""

    numerator: int
    log2_denominator: int

    def __post_init__(self):
        if not (0 <= self.log2_denominator <= MAX_LOG2_DENOMINATOR):
            raise ValueError(f"log2_denominator out of range: {self.log2_denominator}")
        if self.numerator and self.numerator % 2 == 0:
            raise ValueError("numerator must be odd or zero (store reduced)")
        if self.numerator == 0 and self.log2_denominator != 0:
            raise ValueError("zero angle must have log2_denominator 0")
        if not (0 <= self.numerator < (1 << (self.log2_denominator + 1))):
            raise ValueError("numerator not normalized into [0, 2*pi)")

    @property
    def is_zero(self) -> bool:
        return self.numerator == 0

    def negated(self) -> "DyadicAngle":
        return dyadic(-self.numerator, self.log2_denominator)

    def __add__(self, other: "DyadicAngle") -> "DyadicAngle":
        d = max(self.log2_denominator, other.log2_denominator)
        num = (self.numerator << (d - self.log2_denominator)) + (
            other.numerator << (d - other.log2_denominator)
        )
        return dyadic(num, d)

    def units(self, d_star: int) -> int:
        """Numerator rescaled to denominator 2**d_star (d_star >= own)."""
        return self.numerator << (d_star - self.log2_denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.log2_denominator}"


def dyadic(numerator: int, log2_denominator: int) -> DyadicAngle:
    """Build a normalized DyadicAngle for numerator*pi/2**log2_denominator."""
    if log2_denominator < 0:
        numerator <<= -log2_denominator
        log2_denominator = 0
    numerator %= 1 << (log2_denominator + 1)
    while numerator and numerator % 2 == 0 and log2_denominator > 0:
        numerator //= 2
        log2_denominator -= 1
    if numerator == 0:
        log2_denominator = 0
    return DyadicAngle(numerator, log2_denominator)


ZERO_ANGLE = DyadicAngle(0, 0)
PI = DyadicAngle(1, 0)


@dataclass(frozen=True)
class TruncationPolicy:
    """Drop rotations finer than pi/2**threshold_k; None keeps everything."""

    threshold_k: int | None = None

    def __post_init__(self):
        if self.threshold_k is not None and self.threshold_k < 1:
            raise ValueError("threshold_k must be >= 1 (or None)")

    def keeps(self, angle: DyadicAngle) -> bool:
        if self.threshold_k is None:
            return True
        return angle.log2_denominator <= self.threshold_k


NO_TRUNCATION = TruncationPolicy(None)


def default_truncation(n: int) -> TruncationPolicy:
    """Resource-sweep default: threshold ceil(log2 n) + 2."""
    return TruncationPolicy((n - 1).bit_length() + 2)
