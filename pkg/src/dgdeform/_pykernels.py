"""Pure-Python monomial kernels; the reference for ``_ckernels``.

A monomial is a tuple of exponents in the context's generator order.  The
product of two stored monomials is the concatenated word, re-sorted into
generator order; each odd generator of the right factor that passes an odd
generator of the left factor with a larger index contributes a sign.
"""

from operator import add


def odd_mask(mono, odd):
    m = 0
    for j, e in enumerate(mono):
        if e and odd[j]:
            m |= 1 << j
    return m


def koszul_sign(mask_a, mask_b):
    """Sign of sorting (odd part of a)(odd part of b); 0 if they overlap."""
    if mask_a & mask_b:
        return 0
    swaps = 0
    b = mask_b
    while b:
        low = b & -b
        j = low.bit_length() - 1
        swaps += (mask_a >> (j + 1)).bit_count()
        b ^= low
    return -1 if swaps & 1 else 1


def mono_mul(a, b, odd):
    """``(sign, monomial)`` for the product ``a*b``, or ``None`` if it vanishes."""
    s = koszul_sign(odd_mask(a, odd), odd_mask(b, odd))
    if not s:
        return None
    return s, tuple(map(add, a, b))


def mul_terms(ta, tb, odd):
    """Bilinear product of two ``monomial -> coefficient`` maps."""
    if not ta or not tb:
        return {}
    ma = [(m, odd_mask(m, odd), c) for m, c in ta.items()]
    mb = [(m, odd_mask(m, odd), c) for m, c in tb.items()]
    out = {}
    for a, oa, ca in ma:
        for b, ob, cb in mb:
            s = koszul_sign(oa, ob)
            if not s:
                continue
            m = tuple(map(add, a, b))
            c = ca * cb
            if s < 0:
                c = -c
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return {m: c for m, c in out.items() if c}
