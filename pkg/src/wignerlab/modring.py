"""Exact arithmetic in Z_d and Z_2d, plus complex roots of unity.

Phase exponents are stored throughout the package as elements of Z_2d
(exponents of the primitive 2d-th root of unity exp(i*pi/d)); integer
powers of omega = exp(2*pi*i/d) embed as even exponents k -> 2k.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

# Moduli are capped so that any product of two reduced representatives
# fits comfortably in a 64-bit integer.
MAX_MODULUS = 1 << 21


@dataclass(frozen=True)
class ModInt:
    """An integer reduced mod a fixed positive modulus."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.modulus > MAX_MODULUS:
            raise ValueError(f"modulus {self.modulus} exceeds cap {MAX_MODULUS}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "ModInt"):
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} != {other.modulus}")

    def __add__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt(self.value + other.value, self.modulus)

    def __sub__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt(self.value - other.value, self.modulus)

    def __mul__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt(self.value * other.value, self.modulus)

    def __neg__(self) -> "ModInt":
        return ModInt(-self.value, self.modulus)

    def __int__(self) -> int:
        return self.value


def mod_reduce(x: int, m: int) -> ModInt:
    """Canonical representative of x mod m."""
    if m < 1:
        raise ValueError("modulus must be positive")
    return ModInt(x, m)


def inv2(d: int) -> ModInt:
    """The unique t with 2t = 1 (mod d), which exists only for odd d.

    The inverse is (d+1)/2.  For even d the element 2 is a zero divisor;
    the raised error is what restricts the translation-covariant Wigner
    construction to odd dimensions.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if d % 2 == 0:
        raise ValueError(f"no inverse of 2 in Z_{d}")
    return ModInt((d + 1) // 2, d)


def omega_power(k, d: int) -> complex:
    """exp(i*pi*k/d), the k-th power of the primitive 2d-th root of unity.

    k may be an int or a ModInt with modulus 2d.  In the Z_2d exponent
    convention this is omega^(k/2) for omega = exp(2*pi*i/d).
    """
    if isinstance(k, ModInt):
        if k.modulus != 2 * d:
            raise ValueError(f"exponent modulus {k.modulus} is not 2d = {2 * d}")
        k = k.value
    return cmath.exp(1j * cmath.pi * (k % (2 * d)) / d)


def omega_exponent_of(z: complex, d: int, tol: float = 1e-6) -> int:
    """Snap a unit-modulus complex number to its Z_2d exponent.

    Raises if z is further than tol from every 2d-th root of unity.
    """
    if abs(abs(z) - 1.0) > tol:
        raise ValueError(f"not unit modulus: |z| = {abs(z)!r}")
    angle = cmath.phase(z)  # in (-pi, pi]
    k = round(angle * d / cmath.pi) % (2 * d)
    if abs(z - omega_power(k, d)) > tol:
        raise ValueError(f"{z!r} is not within {tol} of a 2*{d}-th root of unity")
    return k
