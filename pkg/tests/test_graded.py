import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgdeform import _pykernels, kernels
from dgdeform.errors import ContextMismatch, DegreeError, EvenDegree, NotSquareZero, OddEpsilonPower
from dgdeform.graded import (
    AlgebraMorphism,
    Derivation,
    GradedContext,
    apply_morphism,
    conjugate,
    de_rham_context,
    mul,
    require_differential,
    validate_differential,
)
from dgdeform.scalar import EPS, HBAR, I

from conftest import element_of, seeds

MIXED = GradedContext([("a", 1), ("b", 2), ("c", -1), ("u", 0), ("v", 3)])


# word oracle: bubble sort with one Koszul sign per adjacent swap ----------
def word_normal_form(ctx, word):
    """``(sign, exponent vector)`` of a generator word, or ``None`` if it vanishes."""
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if ctx.degrees[w[j]] % 2 and ctx.degrees[w[j + 1]] % 2:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    exps = [0] * ctx.size
    for k in w:
        exps[k] += 1
        if ctx.odd[k] and exps[k] > 1:
            return None
    return sign, tuple(exps)


def word_element(ctx, word):
    nf = word_normal_form(ctx, word)
    if nf is None:
        return ctx.zero()
    return ctx.monomial(nf[1], nf[0])


def word_derivation(ctx, images, deg, word):
    """Leibniz expanded letter by letter on the raw word."""
    out = ctx.zero()
    for j, k in enumerate(word):
        if k not in images:
            continue
        prefix_deg = sum(ctx.degrees[x] for x in word[:j])
        sign = -1 if (deg * prefix_deg) % 2 else 1
        left = word_element(ctx, word[:j])
        right = word_element(ctx, word[j + 1:])
        out = out + (left * images[k] * right).scale(sign)
    return out


words = st.lists(st.integers(0, MIXED.size - 1), max_size=6)


class TestProductExamples:
    def test_odd_generators(self):
        ctx = GradedContext([("x", 1), ("y", 1)])
        x, y = ctx.gens()
        assert str(x * y) == "x*y"
        assert y * x == -(x * y)
        assert x * x == ctx.zero()

    def test_context_mismatch(self):
        ctx, _ = de_rham_context(1)
        with pytest.raises(ContextMismatch):
            mul(ctx.gen("t"), MIXED.gen("a"))

    def test_reserved_names(self):
        with pytest.raises(ValueError):
            GradedContext([("h", 0)])


class TestKoszulOracle:
    @given(words, words)
    def test_word_products(self, w1, w2):
        assert word_element(MIXED, w1) * word_element(MIXED, w2) == word_element(MIXED, w1 + w2)

    @given(words, st.integers(0, 6))
    def test_bracketing_is_confluent(self, w, cut):
        cut = min(cut, len(w))
        left = word_element(MIXED, w[:cut]) * word_element(MIXED, w[cut:])
        one_by_one = MIXED.one()
        for k in w:
            one_by_one = one_by_one * MIXED.gen(k)
        assert left == one_by_one == word_element(MIXED, w)

    @given(words)
    def test_derivation_by_letters(self, w):
        images = {0: MIXED.parse("b"), 1: MIXED.parse("v + a*b"), 2: MIXED.parse("u"), 3: MIXED.parse("a*u")}
        D = Derivation(MIXED, 1, images)
        assert D(word_element(MIXED, w)) == word_derivation(MIXED, images, 1, w)


class TestKernelParity:
    @given(words, words)
    def test_mono_mul(self, w1, w2):
        m1, m2 = word_normal_form(MIXED, w1), word_normal_form(MIXED, w2)
        if m1 is None or m2 is None:
            return
        a, b = m1[1], m2[1]
        assert _pykernels.mono_mul(a, b, MIXED.odd) == kernels.mono_mul(a, b, MIXED.odd)

    @given(seeds(), seeds())
    def test_mul_terms(self, s1, s2):
        a, b = element_of(MIXED, s1), element_of(MIXED, s2)
        assert _pykernels.mul_terms(a.terms, b.terms, MIXED.odd) == kernels.mul_terms(a.terms, b.terms, MIXED.odd)


class TestAlgebraLaws:
    @given(seeds(), seeds(), seeds())
    def test_associative(self, s1, s2, s3):
        a, b, c = (element_of(MIXED, s) for s in (s1, s2, s3))
        assert (a * b) * c == a * (b * c)

    @given(seeds(), seeds())
    def test_graded_commutative(self, s1, s2):
        a, b = element_of(MIXED, s1, homogeneous=True), element_of(MIXED, s2, homogeneous=True)
        sign = -1 if a.degree() * b.degree() % 2 else 1
        assert a * b == (b * a).scale(sign)

    @given(seeds())
    def test_unit(self, s):
        a = element_of(MIXED, s)
        assert MIXED.one() * a == a == a * MIXED.one()

    @given(seeds(), seeds())
    def test_leibniz(self, s1, s2):
        ctx, d = de_rham_context(3)
        a, b = element_of(ctx, s1, homogeneous=True), element_of(ctx, s2)
        sign = -1 if a.degree() % 2 else 1
        assert d(a * b) == d(a) * b + (a * d(b)).scale(sign)

    @given(seeds())
    def test_d_squared_everywhere(self, s):
        ctx, d = de_rham_context(3)
        a = element_of(ctx, s)
        assert d(d(a)) == ctx.zero()


class TestDerivations:
    def test_examples(self):
        ctx = GradedContext([("x", 1), ("y", 2), ("x2", 1)])
        d = Derivation(ctx, 1, {"x": ctx.gen("y")})
        assert d(ctx.gen("x")) == ctx.gen("y")
        x, x2 = ctx.gen("x"), ctx.gen("x2")
        d2 = Derivation(ctx, 1, {"x": ctx.gen("y"), "x2": ctx.gen("y")})
        # d(x x') = dx x' - x dx'
        assert d2(x * x2) == d2(x) * x2 - x * d2(x2)

    def test_de_rham(self):
        ctx, d = de_rham_context(2)
        t1, t2, dt1, dt2 = (ctx.gen(n) for n in ("t1", "t2", "dt1", "dt2"))
        assert d(t1 * t2) == dt1 * t2 + t1 * dt2
        assert ctx.names == ("t1", "t2", "dt1", "dt2")
        ctx1, d1 = de_rham_context(1)
        assert ctx1.names == ("t", "dt") and d1(ctx1.gen("t")) == ctx1.gen("dt")
        for n in range(1, 5):
            assert validate_differential(de_rham_context(n)[1]).ok

    def test_validation(self):
        ctx = GradedContext([("x", 1), ("y", 2), ("z", 3)])
        assert validate_differential(Derivation(ctx, 1, {"x": ctx.gen("y")})).ok
        bad = Derivation(ctx, 1, {"x": ctx.gen("y"), "y": ctx.gen("z")})
        rep = validate_differential(bad)
        assert not rep.ok and rep.failures[0] == ("x", ctx.gen("z"))
        with pytest.raises(NotSquareZero) as exc:
            require_differential(bad)
        assert exc.value.generator == "x"
        with pytest.raises(EvenDegree):
            validate_differential(Derivation(ctx, 2, {}))

    def test_degree_checked(self):
        ctx = GradedContext([("x", 1), ("y", 2)])
        with pytest.raises(DegreeError):
            Derivation(ctx, 1, {"x": ctx.gen("x")})

    def test_odd_degree_other_than_one(self):
        ctx = GradedContext([("x", 0), ("y", 3)])
        assert validate_differential(Derivation(ctx, 3, {"x": ctx.gen("y")})).ok


class TestConjugateAndMorphisms:
    def test_conjugate(self):
        ctx, _ = de_rham_context(2)
        x = ctx.gen("dt1")
        assert conjugate(x.scale(I)) == x.scale(-I)
        xy = ctx.parse("dt1*dt2")
        assert conjugate(xy.scale(HBAR)) == xy.scale(HBAR)
        with pytest.raises(OddEpsilonPower):
            conjugate(x.scale(EPS))

    @given(seeds())
    def test_conjugate_involution(self, s):
        ctx, _ = de_rham_context(2)
        a = element_of(ctx, s)
        assert conjugate(conjugate(a)) == a

    def test_morphisms(self):
        src, _ = de_rham_context(1)
        tgt, _ = de_rham_context(2)
        a = src.parse("3*t^2 + t*dt")
        assert apply_morphism(AlgebraMorphism.identity(src), a) == a
        zero = AlgebraMorphism(src, tgt, {"t": 0, "dt": 0})
        assert apply_morphism(zero, src.parse("1 + t")) == tgt.one()
        inc = AlgebraMorphism(src, tgt, {"t": tgt.gen("t1"), "dt": tgt.gen("dt1")})
        assert apply_morphism(inc, a) == tgt.parse("3*t1^2 + t1*dt1")

    def test_morphism_degree_checked(self):
        src, _ = de_rham_context(1)
        tgt, _ = de_rham_context(2)
        with pytest.raises(DegreeError):
            AlgebraMorphism(src, tgt, {"t": tgt.gen("dt1")})


class TestPrinting:
    def test_order(self):
        ctx, _ = de_rham_context(2)
        a = ctx.parse("dt1*dt2 + t2 + 1 + t1 + t1^2 + t1*dt2")
        assert str(a) == "1 + t1 + t2 + t1^2 + t1*dt2 + dt1*dt2"

    @given(seeds())
    def test_round_trip(self, s):
        a = element_of(MIXED, s)
        assert MIXED.parse(str(a)) == a

    def test_random_is_seeded(self):
        ctx, _ = de_rham_context(2)
        assert element_of(ctx, 5) == element_of(ctx, 5)
        assert random.Random(1).random() == random.Random(1).random()
