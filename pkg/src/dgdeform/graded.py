"""Free graded-commutative algebras, graded derivations and algebra maps.

Monomials are exponent tuples in the context's fixed generator order; odd
generators have exponent at most one.  A product of monomials is brought
back to generator order with the Koszul sign, so every element has a unique
``monomial -> Scalar`` representation and equality is dictionary equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import (
    ContextMismatch,
    DegreeError,
    EvenDegree,
    NonHomogeneous,
    NotChainMap,
    NotSquareZero,
)
from .scalar import ONE, Scalar, ScalarLike, join_terms

Monomial = tuple


class GradedContext:
    """Ordered generators ``(name, degree)``; parity of the degree decides commutation."""

    def __init__(self, generators: Sequence[tuple[str, int]]):
        names = [g[0] for g in generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        for name in names:
            if name in ("i", "h", "e"):
                raise ValueError(f"{name!r} is reserved for scalars")
        self.names = tuple(names)
        self.degrees = tuple(int(g[1]) for g in generators)
        self.odd = tuple(bool(d % 2) for d in self.degrees)
        self.index = {n: k for k, n in enumerate(self.names)}
        self.size = len(self.names)

    def __repr__(self) -> str:
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"GradedContext({gens})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedContext):
            return NotImplemented
        return self.names == other.names and self.degrees == other.degrees

    def __hash__(self) -> int:
        return hash((self.names, self.degrees))

    @property
    def unit_monomial(self) -> Monomial:
        return (0,) * self.size

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def unit_vector(self, k: int, power: int = 1) -> Monomial:
        m = [0] * self.size
        m[k] = power
        return tuple(m)

    def gen(self, name: str | int) -> Element:
        """Generator by name or position."""
        if isinstance(name, int):
            if not 0 <= name < self.size:
                raise KeyError(f"generator index {name} out of range")
            return Element(self, {self.unit_vector(name): ONE})
        if name not in self.index:
            raise KeyError(f"unknown generator {name!r}")
        return Element(self, {self.unit_vector(self.index[name]): ONE})

    def gens(self) -> list[Element]:
        return [self.gen(n) for n in self.names]

    def one(self) -> Element:
        return Element(self, {self.unit_monomial: ONE})

    def zero(self) -> Element:
        return Element(self, {})

    def monomial(self, m: Monomial, coeff: ScalarLike = 1) -> Element:
        return Element(self, {tuple(m): Scalar.coerce(coeff)})

    def scalar(self, c: ScalarLike) -> Element:
        return Element(self, {self.unit_monomial: Scalar.coerce(c)})

    def parse(self, text: str) -> Element:
        from .expr import parse_element

        return parse_element(text, self)

    def monomial_text(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def sort_key(self, m: Monomial):
        return (self.monomial_degree(m), sum(m), tuple(-e for e in m))


class Element:
    """Finite linear combination of canonical monomials over :class:`Scalar`."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: GradedContext, terms: Mapping[Monomial, Scalar] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != ctx.size:
                    raise ValueError("monomial length does not match the context")
                if any(e < 0 for e in m):
                    raise ValueError("negative exponent")
                if any(e > 1 and o for e, o in zip(m, ctx.odd)):
                    continue
                c = Scalar.coerce(c)
                if c:
                    clean[m] = c
        self.terms = clean

    @classmethod
    def _raw(cls, ctx: GradedContext, terms: dict) -> Element:
        e = object.__new__(cls)
        e.ctx = ctx
        e.terms = terms
        return e

    # arithmetic ---------------------------------------------------------
    def _check(self, other: Element) -> None:
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")

    def _coerce(self, other) -> Element | None:
        if isinstance(other, Element):
            self._check(other)
            return other
        try:
            return self.ctx.scalar(Scalar.coerce(other))
        except TypeError:
            return None

    def __add__(self, other) -> Element:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Element._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> Element:
        return Element._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Element:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Element:
        return (-self) + other

    def __mul__(self, other) -> Element:
        if isinstance(other, Element):
            return mul(self, other)
        try:
            s = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other) -> Element:
        try:
            s = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(s)

    def __pow__(self, n: int) -> Element:
        if n < 0:
            raise ValueError("negative power")
        out = self.ctx.one()
        for _ in range(n):
            out = mul(out, self)
        return out

    def scale(self, s: ScalarLike) -> Element:
        s = Scalar.coerce(s)
        if not s:
            return self.ctx.zero()
        return Element._raw(self.ctx, {m: c * s for m, c in self.terms.items() if c * s})

    def map_coefficients(self, f) -> Element:
        return Element(self.ctx, {m: f(c) for m, c in self.terms.items()})

    # predicates ---------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Element):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Scalar)):
            return self == self.ctx.scalar(other)
        return NotImplemented

    __hash__ = None

    # grading ------------------------------------------------------------
    def degrees(self) -> set[int]:
        return {self.ctx.monomial_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous element; zero has degree 0 by convention."""
        ds = self.degrees()
        if len(ds) > 1:
            raise NonHomogeneous(f"element {self} has degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def homogeneous_components(self) -> dict[int, Element]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(self.ctx.monomial_degree(m), {})[m] = c
        return {d: Element._raw(self.ctx, t) for d, t in sorted(out.items())}

    def parity_components(self) -> dict[int, Element]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(self.ctx.monomial_degree(m) % 2, {})[m] = c
        return {p: Element._raw(self.ctx, t) for p, t in sorted(out.items())}

    def parity(self) -> int:
        ps = self.parity_components()
        if len(ps) > 1:
            raise NonHomogeneous(f"element {self} mixes parities")
        return next(iter(ps)) if ps else 0

    def hbar_weighted_degrees(self) -> set:
        """Total degrees with h counted as -2 (and e as -1), one per term."""
        out = set()
        for m, c in self.terms.items():
            d = self.ctx.monomial_degree(m)
            for k in c.eps_exponents():
                out.add(d - k)
        return out

    def truncate(self, order: int) -> Element:
        return Element(self.ctx, {m: c.truncate(order) for m, c in self.terms.items()})

    def in_hbar_subring(self) -> bool:
        return all(c.in_hbar_subring() for c in self.terms.values())

    # rendering ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda mc: self.ctx.sort_key(mc[0]))

    def __str__(self) -> str:
        return format_terms(
            [(self.ctx.monomial_text(m), c) for m, c in self.sorted_terms()]
        )

    def __repr__(self) -> str:
        return f"Element({str(self)!r})"


def format_terms(pairs: Sequence[tuple[str, Scalar]]) -> str:
    """Render ``[(basis text, coefficient)]``; basis text ``"1"`` is the unit."""
    pieces: list[tuple[bool, str]] = []
    for basis, c in pairs:
        ts = c.terms_text()
        if len(ts) == 1:
            neg, body = ts[0]
            if basis == "1":
                pieces.append((neg, body))
            elif body == "1":
                pieces.append((neg, basis))
            else:
                pieces.append((neg, f"{body}*{basis}"))
        elif basis == "1" and len(pairs) == 1:
            pieces.extend(ts)
        else:
            inner = join_terms(ts)
            pieces.append((False, f"({inner})" if basis == "1" else f"({inner})*{basis}"))
    return join_terms(pieces)


def mul(a: Element, b: Element) -> Element:
    """Graded-commutative product with Koszul signs; odd squares vanish."""
    a._check(b)
    return Element._raw(a.ctx, kernels.mul_terms(a.terms, b.terms, a.ctx.odd))


def graded_commutator(a: Element, b: Element) -> Element:
    """``a*b - (-1)^{|a||b|} b*a`` extended bilinearly over parity components."""
    out = a.ctx.zero()
    for pa, ap in a.parity_components().items():
        for pb, bp in b.parity_components().items():
            sign = -1 if pa * pb else 1
            out = out + mul(ap, bp) - mul(bp, ap).scale(sign)
    return out


class Derivation:
    """Graded derivation of fixed degree, given by its values on generators.

    Extension to products follows the graded Leibniz rule
    ``D(a*b) = D(a)*b + (-1)^{|D||a|} a*D(b)``.
    """

    def __init__(
        self,
        ctx: GradedContext,
        degree: int,
        images: Mapping[str | int, Element | ScalarLike],
        name: str = "d",
    ):
        self.ctx = ctx
        self.degree = int(degree)
        self.name = name
        self.images: dict[int, Element] = {}
        for key, img in images.items():
            k = ctx.index[key] if isinstance(key, str) else int(key)
            if not isinstance(img, Element):
                img = ctx.scalar(img)
            elif img.ctx != ctx:
                raise ContextMismatch("derivation image lives in another context")
            if img:
                want = ctx.degrees[k] + self.degree
                bad = img.degrees() - {want}
                if bad:
                    raise DegreeError(
                        f"{name}({ctx.names[k]}) must have degree {want}, got {sorted(img.degrees())}"
                    )
                self.images[k] = img
        self._cache: dict[Monomial, Element] = {}

    def __repr__(self) -> str:
        return f"Derivation({self.name}, degree={self.degree})"

    def image(self, k: int) -> Element:
        return self.images.get(k) or self.ctx.zero()

    def on_monomial(self, m: Monomial) -> Element:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        ctx = self.ctx
        out = ctx.zero()
        odd_d = self.degree % 2
        for j, e in enumerate(m):
            if not e or j not in self.images:
                continue
            prefix = list(m[:j]) + [e - 1] + [0] * (ctx.size - j - 1)
            suffix = [0] * (j + 1) + list(m[j + 1:])
            sign = -1 if odd_d and ctx.monomial_degree(prefix) % 2 else 1
            left = Element._raw(ctx, {tuple(prefix): Scalar.coerce(sign * e)})
            right = Element._raw(ctx, {tuple(suffix): ONE})
            out = out + mul(mul(left, self.images[j]), right)
        self._cache[m] = out
        return out

    def __call__(self, a: Element) -> Element:
        if a.ctx != self.ctx:
            raise ContextMismatch("derivation applied to an element of another context")
        out: dict = {}
        for m, c in a.terms.items():
            for m2, c2 in self.on_monomial(m).terms.items():
                v = c * c2
                prev = out.get(m2)
                out[m2] = v if prev is None else prev + v
        return Element._raw(self.ctx, {m: c for m, c in out.items() if c})

    def scaled(self, s: ScalarLike, name: str | None = None) -> Derivation:
        return Derivation(
            self.ctx, self.degree, {k: v.scale(s) for k, v in self.images.items()}, name or self.name
        )

    def is_odd(self) -> bool:
        return bool(self.degree % 2)


def apply_derivation(D: Derivation, a: Element) -> Element:
    return D(a)


@dataclass
class Report:
    """Outcome of a report-valued check: ``ok`` plus witnesses for each failure."""

    name: str
    ok: bool = True
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def fail(self, what: str, witness=None) -> None:
        self.ok = False
        self.failures.append((what, witness))

    def __str__(self) -> str:
        if self.ok:
            return "OK"
        return "; ".join(f"{w}: {x}" if x is not None else str(w) for w, x in self.failures)


_SQUARE_ZERO_NOTE = (
    "d^2 = (1/2)[d,d] is itself a derivation, so vanishing on generators "
    "implies d^2 = 0 on every element"
)


def validate_differential(D: Derivation) -> Report:
    """Check ``D(D(g)) = 0`` on generators; even degrees are rejected outright."""
    if not D.is_odd():
        raise EvenDegree(
            f"{D.name} has even degree {D.degree}; the first-order deformation "
            "is trivial for even square-zero derivations"
        )
    rep = Report(f"differential {D.name}")
    rep.notes.append(_SQUARE_ZERO_NOTE)
    for k, name in enumerate(D.ctx.names):
        w = D(D(D.ctx.gen(name)))
        if w:
            rep.fail(name, w)
    return rep


def require_differential(D: Derivation) -> None:
    rep = validate_differential(D)
    if not rep.ok:
        g, w = rep.failures[0]
        raise NotSquareZero(g, w)


def conjugate(a: Element) -> Element:
    """Coefficient-wise conjugation; generators are real."""
    return Element._raw(a.ctx, {m: c.conj() for m, c in a.terms.items()})


class AlgebraMorphism:
    """Degree-preserving algebra map determined by generator images."""

    def __init__(
        self,
        source: GradedContext,
        target: GradedContext,
        images: Mapping[str | int, Element | ScalarLike],
    ):
        self.source, self.target = source, target
        self.images: dict[int, Element] = {}
        for key, img in images.items():
            k = source.index[key] if isinstance(key, str) else int(key)
            if not isinstance(img, Element):
                img = target.scalar(img)
            elif img.ctx != target:
                raise ContextMismatch("morphism image must live in the target context")
            if img and img.degrees() - {source.degrees[k]}:
                raise DegreeError(
                    f"image of {source.names[k]} must have degree {source.degrees[k]}"
                )
            self.images[k] = img
        self._cache: dict[Monomial, Element] = {}

    @classmethod
    def identity(cls, ctx: GradedContext) -> AlgebraMorphism:
        return cls(ctx, ctx, {n: ctx.gen(n) for n in ctx.names})

    def image(self, k: int) -> Element:
        return self.images.get(k) or self.target.zero()

    def on_monomial(self, m: Monomial) -> Element:
        hit = self._cache.get(m)
        if hit is None:
            hit = self.target.one()
            for j, e in enumerate(m):
                for _ in range(e):
                    hit = mul(hit, self.image(j))
            self._cache[m] = hit
        return hit

    def __call__(self, a: Element) -> Element:
        if a.ctx != self.source:
            raise ContextMismatch("morphism applied outside its source context")
        out = self.target.zero()
        for m, c in a.terms.items():
            out = out + self.on_monomial(m).scale(c)
        return out

    def intertwining_defects(self, d_src: Derivation, d_tgt: Derivation) -> list:
        """Generators where ``phi(d g) != d(phi g)``, with the defect."""
        bad = []
        for name in self.source.names:
            g = self.source.gen(name)
            w = self(d_src(g)) - d_tgt(self(g))
            if w:
                bad.append((name, w))
        return bad

    def require_chain_map(self, d_src: Derivation, d_tgt: Derivation) -> None:
        bad = self.intertwining_defects(d_src, d_tgt)
        if bad:
            raise NotChainMap(*bad[0])


def apply_morphism(phi: AlgebraMorphism, a: Element) -> Element:
    return phi(a)


def de_rham_context(n: int) -> tuple[GradedContext, Derivation]:
    """Polynomial forms in ``t1..tn``: degree-0 ``ti``, degree-1 ``dti``, ``d ti = dti``."""
    if n < 1:
        raise ValueError("de Rham context needs n >= 1")
    ts = ["t"] if n == 1 else [f"t{k}" for k in range(1, n + 1)]
    ctx = GradedContext([(t, 0) for t in ts] + [("d" + t, 1) for t in ts])
    d = Derivation(ctx, 1, {t: ctx.gen("d" + t) for t in ts}, name="d")
    require_differential(d)
    return ctx, d


def element_from_pairs(ctx: GradedContext, pairs: Iterable[tuple[Monomial, ScalarLike]]) -> Element:
    out = ctx.zero()
    for m, c in pairs:
        out = out + ctx.monomial(m, c)
    return out
