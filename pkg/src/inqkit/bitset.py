"""Information states as Python ints.

Bit ``i`` of a mask is set iff world ``i`` belongs to the state. Numeric
order of masks is the canonical order used for deterministic iteration.
"""
from typing import Iterable, Iterator


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def subsets(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask`` (including 0 and ``mask``) in increasing order."""
    # Standard submask walk yields decreasing order; collect and reverse.
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return reversed(out)


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def maximal_antichain(masks: Iterable[int]) -> tuple:
    """Return the maximal elements of ``masks`` sorted numerically.

    The empty family normalises to ``(0,)``, the family ``{∅}``.
    """
    uniq = sorted(set(masks), key=lambda m: (-popcount(m), m))
    kept = []
    for m in uniq:
        if not any(is_subset(m, k) for k in kept):
            kept.append(m)
    if not kept:
        return (0,)
    return tuple(sorted(kept))


def downward_closure(maximal: Iterable[int]) -> list:
    seen = set()
    for m in maximal:
        seen.update(subsets(m))
    return sorted(seen)
