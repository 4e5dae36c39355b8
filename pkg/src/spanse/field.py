"""Arithmetic in the prime field F_q.

Residues are kept canonically reduced to [0, q-1] after every operation;
there is no lazy reduction. The modulus is a runtime parameter so tiny
test fields and the production field share one code path.

This arithmetic is NOT constant-time. The scheme built on top of it is a
one-time research artifact; side-channel hardening is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass


class FieldMismatchError(ValueError):
    """Raised when two operands live in different prime fields."""


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division (moduli are tiny)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldParams:
    """The prime field F_q for an odd prime q >= 3."""

    q: int

    def __post_init__(self):
        if self.q < 3:
            raise ValueError(f"field order must be >= 3, got {self.q}")
        if not is_prime(self.q):
            raise ValueError(f"field order {self.q} is not prime")

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self)


@dataclass(frozen=True)
class FieldElement:
    """A canonical residue in [0, q-1]."""

    value: int
    params: FieldParams

    def __post_init__(self):
        if not (0 <= self.value < self.params.q):
            raise ValueError(f"residue {self.value} out of range for q={self.params.q}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return add(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, other)

    def __neg__(self) -> "FieldElement":
        return neg(self)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return add(self, neg(other))

    def inv(self) -> "FieldElement":
        return inv(self)


def _check_same_field(a: FieldElement, b: FieldElement):
    if a.params.q != b.params.q:
        raise FieldMismatchError(f"mixed moduli {a.params.q} and {b.params.q}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same_field(a, b)
    return FieldElement((a.value + b.value) % a.params.q, a.params)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same_field(a, b)
    return FieldElement((a.value * b.value) % a.params.q, a.params)


def neg(a: FieldElement) -> FieldElement:
    return FieldElement((a.params.q - a.value) % a.params.q, a.params)


def inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return FieldElement(pow(a.value, -1, a.params.q), a.params)
