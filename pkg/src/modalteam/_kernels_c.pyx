# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bitset enumeration kernels.

Semantics and enumeration order match ``_kernels_py`` exactly.  Masks that
fit in 64 bits run in C loops; wider masks fall back to Python-int
arithmetic inside the same generators, so callers never need to care.
"""

from libc.stdint cimport uint64_t

__all__ = [
    "iter_bits",
    "image_of",
    "iter_subsets",
    "iter_covers",
    "iter_partitions",
    "iter_lax_successors",
    "iter_strict_successors",
]

DEF WIDE = 64


def iter_bits(mask):
    cdef uint64_t m, low
    if mask >> WIDE:
        while mask:
            lowp = mask & -mask
            yield lowp.bit_length() - 1
            mask ^= lowp
        return
    m = mask
    while m:
        low = m & (~m + 1)
        yield _bit_index(low)
        m ^= low


cdef int _bit_index(uint64_t low):
    cdef int i = 0
    while low > 1:
        low >>= 1
        i += 1
    return i


def image_of(mask, succ_masks):
    out = 0
    while mask:
        low = mask & -mask
        out |= succ_masks[low.bit_length() - 1]
        mask ^= low
    return out


def iter_subsets(avail):
    cdef uint64_t a, s
    if avail >> WIDE:
        sub = 0
        while True:
            yield sub
            if sub == avail:
                return
            sub = (sub - avail) & avail
    a = avail
    s = 0
    while True:
        yield s
        if s == a:
            return
        s = (s - a) & a


def iter_covers(mask):
    cdef uint64_t m, sub, rest, extra
    if mask >> WIDE:
        subp = 0
        while True:
            restp = mask & ~subp
            extrap = 0
            while True:
                yield (subp, restp | extrap)
                if extrap == subp:
                    break
                extrap = (extrap - subp) & subp
            if subp == mask:
                return
            subp = (subp - mask) & mask
    m = mask
    sub = 0
    while True:
        rest = m & ~sub
        extra = 0
        while True:
            yield (sub, rest | extra)
            if extra == sub:
                break
            extra = (extra - sub) & sub
        if sub == m:
            return
        sub = (sub - m) & m


def iter_partitions(mask):
    cdef uint64_t m, sub
    if mask >> WIDE:
        subp = 0
        while True:
            yield (subp, mask & ~subp)
            if subp == mask:
                return
            subp = (subp - mask) & mask
    m = mask
    sub = 0
    while True:
        yield (sub, m & ~sub)
        if sub == m:
            return
        sub = (sub - m) & m


def iter_lax_successors(succ_list):
    cdef uint64_t rt, sub
    cdef uint64_t[64] succ
    cdef int n = 0, i
    cdef bint ok
    if not succ_list:
        yield 0
        return
    rt_p = 0
    wide = False
    for s in succ_list:
        if s == 0:
            return
        rt_p |= s
        if s >> WIDE:
            wide = True
    if wide or len(succ_list) > 64 or rt_p >> WIDE:
        for subp in iter_subsets(rt_p):
            ok_p = True
            for s in succ_list:
                if not subp & s:
                    ok_p = False
                    break
            if ok_p:
                yield subp
        return
    rt = rt_p
    for s in succ_list:
        succ[n] = s
        n += 1
    sub = 0
    while True:
        ok = True
        for i in range(n):
            if not sub & succ[i]:
                ok = False
                break
        if ok:
            yield sub
        if sub == rt:
            return
        sub = (sub - rt) & rt


def iter_strict_successors(succ_list):
    if not succ_list:
        yield 0
        return
    choices = []
    for s in succ_list:
        if s == 0:
            return
        choices.append([1 << b for b in iter_bits(s)])
    seen = set()
    cdef int n = len(choices)
    cdef int j
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
