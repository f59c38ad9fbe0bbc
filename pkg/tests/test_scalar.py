from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dgdeform.errors import OddEpsilonPower
from dgdeform.scalar import EPS, HBAR, I, ONE, ZERO, GaussianRational, Scalar

P = Scalar.parse

# sympy oracle: the same ring as polynomials in a symbol e over Q(i)
e_sym = sympy.Symbol("e")


def to_sympy(s: Scalar):
    return sum(
        (sympy.Rational(g.re.numerator, g.re.denominator) + sympy.I * sympy.Rational(g.im.numerator, g.im.denominator))
        * e_sym**k
        for k, g in s.coeffs.items()
    ) if s else sympy.Integer(0)


def same(s: Scalar, expr) -> bool:
    return sympy.expand(to_sympy(s) - expr) == 0


fractions = st.fractions(min_value=-6, max_value=6, max_denominator=6)
gaussians = st.builds(GaussianRational, fractions, fractions)
scalars = st.dictionaries(st.integers(0, 5), gaussians, max_size=4).map(Scalar)
hbar_scalars = st.dictionaries(st.integers(0, 2).map(lambda k: 2 * k), gaussians, max_size=3).map(Scalar)


class TestExamples:
    def test_add(self):
        assert ZERO + HBAR == HBAR
        assert P("1+i") + P("1-i") == Scalar.coerce(2)
        assert HBAR + I * EPS * EPS == HBAR * 2

    def test_mul(self):
        assert EPS * EPS == -I * HBAR
        assert I * I == Scalar.coerce(-1)
        assert (HBAR * 2) * (HBAR * 3) == Scalar.hbar_power(2) * 6

    def test_conj(self):
        assert (I * HBAR).conj() == -I * HBAR
        assert Scalar.coerce(3).conj() == Scalar.coerce(3)
        with pytest.raises(OddEpsilonPower):
            EPS.conj()

    def test_truncate(self):
        assert P("1 + h + h^2").truncate(1) == P("1 + h")
        assert Scalar.hbar_power(3).truncate(0) == ZERO
        assert P("1 + i*h").truncate(5) == P("1 + i*h")

    def test_canonical_text(self):
        assert str(P("3/2 + (1-2i)*h^2")) == "3/2 + (1-2i)*h^2"
        assert str(EPS) == "e"
        assert str(EPS * EPS) == "-i*h"
        assert str(ZERO) == "0"
        assert str(Scalar.eps_power(3)) == "-i*h*e"

    def test_h_is_i_e_squared(self):
        assert same(HBAR, sympy.I * e_sym**2)

    def test_exact_division_by_rationals(self):
        assert HBAR / 3 * 3 == HBAR
        with pytest.raises(ZeroDivisionError):
            HBAR / 0

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            Scalar.coerce(1.5j)


class TestAgainstSympy:
    @given(scalars, scalars)
    def test_add_mul(self, a, b):
        A, B = to_sympy(a), to_sympy(b)
        assert same(a + b, A + B)
        assert same(a * b, A * B)
        assert same(a - b, A - B)

    @given(scalars, st.integers(0, 4))
    def test_pow(self, a, n):
        assert same(a**n, to_sympy(a) ** n)


class TestRingLaws:
    @given(scalars, scalars, scalars)
    def test_associative_commutative_distributive(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @given(scalars)
    def test_canonical_zero(self, a):
        z = a - a
        assert z == ZERO and z.coeffs == {}
        assert a * ONE == a

    @given(scalars)
    def test_text_round_trip(self, a):
        assert P(str(a)) == a
        assert str(P(str(a))) == str(a)


class TestConjugation:
    @given(hbar_scalars, hbar_scalars)
    def test_homomorphism_and_involution(self, a, b):
        assert (a * b).conj() == a.conj() * b.conj()
        assert (a + b).conj() == a.conj() + b.conj()
        assert a.conj().conj() == a

    @given(gaussians, st.integers(0, 3))
    def test_h_is_real(self, z, k):
        h = Scalar.hbar_power(k)
        assert (h * Scalar.coerce(z)).conj() == h * Scalar.coerce(z.conj())

    @given(scalars)
    def test_odd_powers_refused(self, a):
        if any(k % 2 for k in a.coeffs):
            with pytest.raises(OddEpsilonPower):
                a.conj()
        else:
            assert a.in_hbar_subring()


def test_gaussian_division():
    z = GaussianRational(Fraction(1, 2), 3)
    assert z / z == GaussianRational(1)
