"""Exact coefficients in Q(i)[e] with the deformation parameter h = i*e^2.

Every coefficient in the engine is a :class:`Scalar`: a polynomial in the
formal square root ``e = sqrt(h/i)`` with Gaussian-rational coefficients.
Keeping ``e`` rather than ``h`` as the variable means the transform
``S = id + e*d`` needs no ring extension.  Even powers of ``e`` are printed
as powers of ``h``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import OddEpsilonPower

Rational = Union[int, Fraction]


class GaussianRational:
    """``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: GaussianRational) -> GaussianRational:
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c, 0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __truediv__(self, other: GaussianRational) -> GaussianRational:
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(other.re / n, -other.im / n)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def conj(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"


_ONE_G = GaussianRational(1)
# (-i)^m for m = 0..3
_MINUS_I_POWERS = (
    GaussianRational(1, 0),
    GaussianRational(0, -1),
    GaussianRational(-1, 0),
    GaussianRational(0, 1),
)
_I_POWERS = tuple(g.conj() for g in _MINUS_I_POWERS)


class Scalar:
    """Element of Q(i)[e]; canonical map ``e-exponent -> GaussianRational``.

    Instances are immutable.  Zero coefficients are never stored, so two
    scalars are equal iff their coefficient maps are equal.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, GaussianRational] | None = None):
        c = {}
        if coeffs:
            for k, g in coeffs.items():
                if k < 0:
                    raise ValueError("negative e-exponent")
                if g:
                    c[k] = g
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> Scalar:
        s = object.__new__(cls)
        s._c = c
        s._hash = None
        return s

    # constructors -------------------------------------------------------
    @classmethod
    def coerce(cls, x: ScalarLike) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, GaussianRational):
            return cls._raw({0: x} if x else {})
        if isinstance(x, (int, Fraction)):
            return cls._raw({0: GaussianRational(x)} if x else {})
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact scalars")
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    @classmethod
    def gaussian(cls, re: Rational = 0, im: Rational = 0) -> Scalar:
        return cls.coerce(GaussianRational(re, im))

    @classmethod
    def eps_power(cls, k: int) -> Scalar:
        return cls._raw({k: _ONE_G})

    @classmethod
    def hbar_power(cls, k: int) -> Scalar:
        # h^k = i^k e^(2k)
        return cls._raw({2 * k: _I_POWERS[k % 4]})

    @classmethod
    def parse(cls, text: str) -> Scalar:
        from .expr import parse_scalar

        return parse_scalar(text)

    # ring structure -----------------------------------------------------
    def __add__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if not other._c:
            return self
        if not self._c:
            return other
        c = dict(self._c)
        for k, g in other._c.items():
            v = c.get(k)
            if v is None:
                c[k] = g
            else:
                v = v + g
                if v:
                    c[k] = v
                else:
                    del c[k]
        return Scalar._raw(c)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw({k: -g for k, g in self._c.items()})

    def __sub__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> Scalar:
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._c, other._c
        if not a or not b:
            return ZERO
        if len(a) == 1 and len(b) == 1:
            (ka, ga), = a.items()
            (kb, gb), = b.items()
            return Scalar._raw({ka + kb: ga * gb})
        c: dict = {}
        for ka, ga in a.items():
            for kb, gb in b.items():
                k = ka + kb
                p = ga * gb
                v = c.get(k)
                c[k] = p if v is None else v + p
        return Scalar._raw({k: g for k, g in c.items() if g})

    __rmul__ = __mul__

    def __truediv__(self, other: Rational | GaussianRational) -> Scalar:
        """Division by a nonzero Gaussian rational (not by a general scalar)."""
        if isinstance(other, Scalar):
            if set(other._c) != {0}:
                raise ZeroDivisionError("only division by e-free scalars is supported")
            other = other._c[0]
        if not isinstance(other, GaussianRational):
            other = GaussianRational(other)
        return Scalar._raw({k: g / other for k, g in self._c.items()})

    def __pow__(self, n: int) -> Scalar:
        if not isinstance(n, int) or n < 0:
            raise ValueError("scalar powers must be non-negative integers")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates and accessors ------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._c == other._c
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self._c == Scalar.coerce(other)._c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    @property
    def coeffs(self) -> dict:
        """Copy of the ``e-exponent -> GaussianRational`` map."""
        return dict(self._c)

    def eps_exponents(self) -> list[int]:
        return sorted(self._c)

    def coefficient(self, k: int) -> GaussianRational:
        return self._c.get(k, GaussianRational())

    def hbar_coefficient(self, m: int) -> GaussianRational:
        """Coefficient of ``h^m`` (only meaningful on the h-subring)."""
        return self.coefficient(2 * m) * _MINUS_I_POWERS[m % 4]

    def in_hbar_subring(self) -> bool:
        return all(k % 2 == 0 for k in self._c)

    def max_hbar_degree(self) -> Fraction:
        return Fraction(max(self._c, default=0), 2)

    def conj(self) -> Scalar:
        """Complex conjugation with h real; undefined on odd powers of e."""
        out = {}
        for k, g in self._c.items():
            if k % 2:
                raise OddEpsilonPower(f"cannot conjugate e^{k} term of {self}")
            m = k // 2
            # g e^(2m) = g (-i)^m h^m -> conj(g (-i)^m) h^m = conj(g) (-1)^m e^(2m)
            out[k] = g.conj() if m % 2 == 0 else -g.conj()
        return Scalar._raw(out)

    def truncate(self, order: int) -> Scalar:
        """Drop every term whose h-degree (e-exponent / 2) exceeds ``order``."""
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        lim = 2 * order
        return Scalar._raw({k: g for k, g in self._c.items() if k <= lim})

    # rendering ----------------------------------------------------------
    def terms_text(self) -> list[tuple[bool, str]]:
        """Per-term ``(negative, body)`` pairs in ascending e-exponent order."""
        return [_term_text(k, self._c[k]) for k in sorted(self._c)]

    def __str__(self) -> str:
        return join_terms(self.terms_text())

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"


ScalarLike = Union[Scalar, GaussianRational, int, Fraction]


def join_terms(terms: Iterable[tuple[bool, str]]) -> str:
    out = []
    for n, (neg, body) in enumerate(terms):
        if n == 0:
            out.append("-" + body if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


def _fmt_rational(q: Fraction) -> str:
    return str(q)


def gaussian_text(g: GaussianRational, unit_empty: bool) -> tuple[bool, str]:
    """Render ``g`` as ``(negative, body)``; a unit magnitude may render empty."""
    re, im = g.re, g.im
    if not im:
        neg = re < 0
        mag = abs(re)
        if mag == 1 and unit_empty:
            return neg, ""
        return neg, _fmt_rational(mag)
    if not re:
        neg = im < 0
        mag = abs(im)
        return neg, "i" if mag == 1 else f"{_fmt_rational(mag)}i"
    ims = "i" if abs(im) == 1 else f"{_fmt_rational(abs(im))}i"
    return False, f"({_fmt_rational(re)}{'+' if im > 0 else '-'}{ims})"


def _symbol(k: int) -> str:
    m, odd = divmod(k, 2)
    parts = []
    if m == 1:
        parts.append("h")
    elif m > 1:
        parts.append(f"h^{m}")
    if odd:
        parts.append("e")
    return "*".join(parts)


def _term_text(k: int, g: GaussianRational) -> tuple[bool, str]:
    sym = _symbol(k)
    coef = g * _MINUS_I_POWERS[(k // 2) % 4]
    neg, body = gaussian_text(coef, unit_empty=bool(sym))
    if not sym:
        return neg, body
    return neg, f"{body}*{sym}" if body else sym


ZERO = Scalar()
ONE = Scalar.coerce(1)
I = Scalar.gaussian(0, 1)
EPS = Scalar.eps_power(1)
HBAR = Scalar.hbar_power(1)
I_HBAR = I * HBAR
