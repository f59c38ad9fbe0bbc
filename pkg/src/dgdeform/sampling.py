"""Seeded random instances: scalars, elements, complexes, maps, Lie elements.

Everything takes an explicit :class:`random.Random`, so a (seed, trial)
pair reproduces the same objects on every run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .complexes import ChainComplex, GradedMap, Matrix, random_block
from .graded import Element, GradedContext, mul
from .linear import invert
from .scalar import Scalar


@dataclass(frozen=True)
class Bounds:
    max_terms: int = 4
    max_word: int = 6
    max_coeff: int = 9
    hbar_terms: bool = True


DEFAULT_BOUNDS = Bounds()


def random_rational(rng: random.Random, bound: int) -> Fraction:
    num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


def random_scalar(rng: random.Random, bounds: Bounds = DEFAULT_BOUNDS, hbar: bool | None = None) -> Scalar:
    """Nonzero Gaussian rational, optionally plus a multiple of ``h``."""
    hbar = bounds.hbar_terms if hbar is None else hbar
    while True:
        z = Scalar.coerce(random_rational(rng, bounds.max_coeff))
        if rng.random() < 0.4:
            z = z + Scalar.coerce(random_rational(rng, bounds.max_coeff)) * Scalar.parse("i")
        if hbar and rng.random() < 0.3:
            h = Scalar.hbar_power(rng.randint(1, 2))
            z = z + h * random_rational(rng, bounds.max_coeff)
        if z:
            return z


def random_monomial_element(rng: random.Random, ctx: GradedContext, bounds: Bounds = DEFAULT_BOUNDS) -> Element:
    """Product of at most ``max_word`` random generators (possibly zero)."""
    out = ctx.one()
    for _ in range(rng.randint(0, bounds.max_word)):
        out = mul(out, ctx.gen(rng.randrange(ctx.size)))
    return out


def random_element(
    rng: random.Random,
    ctx: GradedContext,
    bounds: Bounds = DEFAULT_BOUNDS,
    degree: int | None = None,
    hbar: bool | None = None,
) -> Element:
    """Random element; with ``degree`` every term has that degree (zero if none is hit)."""
    out = ctx.zero()
    for _ in range(rng.randint(1, bounds.max_terms)):
        for _attempt in range(40):
            m = random_monomial_element(rng, ctx, bounds)
            if m and (degree is None or m.degree() == degree):
                break
        else:
            continue
        out = out + m.scale(random_scalar(rng, bounds, hbar))
    return out


def attainable_degrees(ctx: GradedContext, bounds: Bounds = DEFAULT_BOUNDS) -> list[int]:
    """Degrees of nonzero monomials with word length at most ``max_word``."""
    seen = {0}
    frontier = [ctx.unit_monomial]
    words = {ctx.unit_monomial}
    for _ in range(bounds.max_word):
        nxt = []
        for m in frontier:
            for k in range(ctx.size):
                p = mul(ctx.monomial(m), ctx.gen(k))
                for key in p.terms:
                    if key not in words:
                        words.add(key)
                        nxt.append(key)
                        seen.add(ctx.monomial_degree(key))
        frontier = nxt
    return sorted(seen)


def random_homogeneous(
    rng: random.Random, ctx: GradedContext, bounds: Bounds = DEFAULT_BOUNDS, degrees=None, hbar=None
) -> Element:
    """Nonzero homogeneous element with degree drawn from ``degrees``."""
    degrees = degrees or attainable_degrees(ctx, bounds)
    while True:
        a = random_element(rng, ctx, bounds, rng.choice(degrees), hbar)
        if a:
            return a


# complexes -------------------------------------------------------------
def random_complex(rng: random.Random, lo: int = -2, hi: int = 3, max_dim: int = 4, name: str = "C") -> ChainComplex:
    """Random bounded complex in degrees ``[lo, hi]``.

    Built from one-dimensional pieces (a lone vector, or ``k -> k+1`` with
    identity differential), then conjugated by integer unipotent basis
    changes so the boundary matrices are not in normal form.
    """
    a = rng.randint(lo, hi)
    b = rng.randint(a, min(hi, a + 3))
    dims = [0] * (b - a + 1)
    pairs = []
    for k in range(a, b + 1):
        if dims[k - a] >= max_dim:
            continue
        if k < b and rng.random() < 0.5 and dims[k + 1 - a] < max_dim:
            pairs.append((k, dims[k - a], dims[k + 1 - a]))
            dims[k - a] += 1
            dims[k + 1 - a] += 1
        if rng.random() < 0.5 and dims[k - a] < max_dim:
            dims[k - a] += 1
    if not any(dims):
        dims[0] = 1
    boundaries = {}
    for k in range(a, b):
        m = [[0] * dims[k - a] for _ in range(dims[k + 1 - a])]
        for kk, src, tgt in pairs:
            if kk == k:
                m[tgt][src] = 1
        boundaries[k] = m
    gs = {k: _unipotent(rng, dims[k - a]) for k in range(a, b + 1)}
    moved = {}
    for k in range(a, b):
        mat = Matrix(dims[k + 1 - a], dims[k - a], boundaries[k])
        g_src, g_tgt = gs[k], gs[k + 1]
        g_src_inv = Matrix(g_src.rows, g_src.cols, invert([[g_src[i, j] for j in range(g_src.cols)] for i in range(g_src.rows)])) if g_src.rows else g_src
        moved[k] = g_tgt @ mat @ g_src_inv
    return ChainComplex(a, dims, moved, name=name)


def _unipotent(rng: random.Random, n: int, bound: int = 2) -> Matrix:
    data = [[1 if i == j else (rng.randint(-bound, bound) if i < j else 0) for j in range(n)] for i in range(n)]
    return Matrix(n, n, data)


def random_map(
    rng: random.Random,
    source: ChainComplex,
    target: ChainComplex,
    degree: int,
    density: float = 0.6,
    bound: int = 3,
) -> GradedMap:
    blocks = {}
    for k in source.degrees():
        rows, cols = target.dim(k + degree), source.dim(k)
        if rows and cols:
            blocks[k] = random_block(rng, rows, cols, density, bound)
    return GradedMap(source, target, degree, blocks)


def useful_degrees(source: ChainComplex, target: ChainComplex) -> list[int]:
    """Degrees ``r`` for which some block ``source^k -> target^{k+r}`` is nonempty."""
    out = set()
    for k in source.degrees():
        if not source.dim(k):
            continue
        for j in target.degrees():
            if target.dim(j):
                out.add(j - k)
    return sorted(out) or [0]


# Lie algebras ----------------------------------------------------------
def random_lie_homogeneous(rng: random.Random, L, max_terms: int = 3, bound: int = 3, degree=None):
    """Nonzero homogeneous element of a structure-constant DGLA with integer coefficients."""
    degs = sorted(set(L.degrees))
    deg = rng.choice(degs) if degree is None else degree
    idx = [i for i in range(L.dim) if L.degrees[i] == deg]
    while True:
        picks = rng.sample(idx, min(len(idx), rng.randint(1, max_terms)))
        v = L.element({i: rng.randint(-bound, bound) for i in picks})
        if v:
            return v
