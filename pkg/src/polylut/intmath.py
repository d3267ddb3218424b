"""Exact integer helpers shared by the feasibility search and width planning.

Strict-bound integerization convention, used everywhere a strict rational
inequality is turned into an integer range (denominators always positive):

    z > num/den  <=>  z >= floor(num/den) + 1   (first_int_above)
    z < num/den  <=>  z <= ceil(num/den) - 1    (last_int_below)
"""

from __future__ import annotations


def floor_div(num: int, den: int) -> int:
    """Floor of num/den for den > 0 (Python // already rounds toward -inf)."""
    assert den > 0
    return num // den


def ceil_div(num: int, den: int) -> int:
    assert den > 0
    return -((-num) // den)


def first_int_above(num: int, den: int) -> int:
    """Smallest integer strictly greater than num/den (den > 0)."""
    return floor_div(num, den) + 1


def last_int_below(num: int, den: int) -> int:
    """Largest integer strictly less than num/den (den > 0)."""
    return ceil_div(num, den) - 1


def trailing_zeros(value: int, zero_cap: int) -> int:
    """Trailing zero bits of |value|; 0 has infinitely many, capped at zero_cap."""
    if value == 0:
        return zero_cap
    v = abs(value)
    return (v & -v).bit_length() - 1


def max_trailing_zeros_in_range(lo: int, hi: int, zero_cap: int) -> int:
    """Largest trailing-zero count attained by any integer in [lo, hi).

    Requires 0 <= lo < hi. If 0 is in the range the cap applies.
    """
    assert 0 <= lo < hi
    if lo == 0:
        return zero_cap
    best = 0
    e = 0
    while True:
        step = 1 << e
        first = ceil_div(lo, step) * step
        if first >= hi:
            return best
        best = e
        e += 1


def first_multiple_in_range(lo: int, hi: int, shift: int) -> int | None:
    """Smallest multiple of 2**shift in [lo, hi), or None. Requires 0 <= lo."""
    assert 0 <= lo
    step = 1 << shift
    first = ceil_div(lo, step) * step
    return first if first < hi else None
