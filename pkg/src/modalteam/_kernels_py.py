"""Pure-Python bitset enumeration kernels.

These are the innermost loops of split and successor-team search.  The
compiled twin in ``_kernels_c`` has identical semantics; ``_kernels`` picks
one at import time.  All enumeration orders are part of the contract:
submasks ascend numerically, covers ascend by (S, then U).
"""

__all__ = [
    "iter_bits",
    "image_of",
    "iter_subsets",
    "iter_covers",
    "iter_partitions",
    "iter_lax_successors",
    "iter_strict_successors",
]


def iter_bits(mask):
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def image_of(mask, succ_masks):
    """Union of successor masks over the set bits of ``mask``."""
    out = 0
    while mask:
        low = mask & -mask
        out |= succ_masks[low.bit_length() - 1]
        mask ^= low
    return out


def iter_subsets(avail):
    """All submasks of ``avail`` in ascending numeric order."""
    sub = 0
    while True:
        yield sub
        if sub == avail:
            return
        sub = (sub - avail) & avail


def iter_covers(mask):
    """All pairs (S, U) with S | U == mask; 3^popcount(mask) pairs."""
    sub = 0
    while True:
        rest = mask & ~sub
        extra = 0
        while True:
            yield (sub, rest | extra)
            if extra == sub:
                break
            extra = (extra - sub) & sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def iter_partitions(mask):
    """All ordered disjoint pairs (S, mask \\ S); 2^popcount(mask) pairs."""
    sub = 0
    while True:
        yield (sub, mask & ~sub)
        if sub == mask:
            return
        sub = (sub - mask) & mask


def iter_lax_successors(succ_list):
    """Subsets of the image that contain a successor of every team world."""
    if not succ_list:
        yield 0
        return
    rt = 0
    for s in succ_list:
        if s == 0:
            return
        rt |= s
    for sub in iter_subsets(rt):
        if all(sub & s for s in succ_list):
            yield sub


def iter_strict_successors(succ_list):
    """Distinct images of choice functions; first-occurrence order."""
    if not succ_list:
        yield 0
        return
    choices = []
    for s in succ_list:
        if s == 0:
            return
        choices.append([1 << b for b in iter_bits(s)])
    seen = set()
    n = len(choices)
    idx = [0] * n
    while True:
        mask = 0
        for i in range(n):
            mask |= choices[i][idx[i]]
        if mask not in seen:
            seen.add(mask)
            yield mask
        j = n - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < len(choices[j]):
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            return
