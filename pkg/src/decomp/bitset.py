"""Subsets of a dense integer universe encoded as int bitsets.

Bit ``i`` of a mask is set exactly when element ``i`` belongs to the subset.
Python ints give arbitrary width, O(1) hashing and fast popcount, which is
what the enumeration-heavy oracles lean on.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def elements(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return mask.bit_count()


def lowest_bit(mask: int) -> int:
    """Index of the lowest set bit; mask must be non-zero."""
    return (mask & -mask).bit_length() - 1


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def submasks(mask: int) -> Iterator[int]:
    """All 2**popcount(mask) submasks of ``mask``, including 0 and mask."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def sort_key(mask: int) -> tuple[int, int]:
    """Canonical family order: by cardinality, then by bit representation."""
    return (mask.bit_count(), mask)
