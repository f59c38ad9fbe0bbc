# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled monomial kernels; same contract as ``_pykernels``."""


cdef extern from *:
    int __builtin_popcountll(unsigned long long)


cdef inline unsigned long long _mask(tuple mono, tuple odd) except? 0:
    cdef unsigned long long m = 0
    cdef Py_ssize_t j, n = len(mono)
    for j in range(n):
        if <object>mono[j] and <object>odd[j]:
            m |= (<unsigned long long>1) << j
    return m


cdef inline int _sign(unsigned long long a, unsigned long long b):
    cdef int swaps = 0
    cdef unsigned long long low
    cdef int j
    if a & b:
        return 0
    while b:
        low = b & (~b + 1)
        j = 0
        while (low >> j) != 1:
            j += 1
        swaps += __builtin_popcountll(a >> (j + 1)) if j < 63 else 0
        b ^= low
    return -1 if swaps & 1 else 1


cdef inline tuple _add(tuple a, tuple b):
    cdef Py_ssize_t j, n = len(a)
    cdef list out = [None] * n
    for j in range(n):
        out[j] = <long>a[j] + <long>b[j]
    return tuple(out)


def odd_mask(tuple mono, tuple odd):
    if len(mono) > 64:
        raise ValueError("compiled kernel supports at most 64 generators")
    return _mask(mono, odd)


def koszul_sign(mask_a, mask_b):
    return _sign(mask_a, mask_b)


def mono_mul(tuple a, tuple b, tuple odd):
    cdef int s = _sign(_mask(a, odd), _mask(b, odd))
    if s == 0:
        return None
    return s, _add(a, b)


def mul_terms(dict ta, dict tb, tuple odd):
    cdef list ma, mb
    cdef dict out = {}
    cdef tuple a, b, m
    cdef unsigned long long oa, ob
    cdef int s
    if not ta or not tb:
        return {}
    if len(odd) > 64:
        raise ValueError("compiled kernel supports at most 64 generators")
    ma = [(k, _mask(k, odd), v) for k, v in ta.items()]
    mb = [(k, _mask(k, odd), v) for k, v in tb.items()]
    for a, oa, ca in ma:
        for b, ob, cb in mb:
            s = _sign(oa, ob)
            if s == 0:
                continue
            m = _add(a, b)
            c = ca * cb
            if s < 0:
                c = -c
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return {k: v for k, v in out.items() if v}
