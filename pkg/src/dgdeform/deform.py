"""First-order deformation ``a *d b = a*b + lam (-1)^{|a|} da*db`` and its identities.

Also the truncated exponential product ``mu o exp(c * sum_i D^i (x) D_i)``
along commuting derivations.  Checks return defects (elements that must
vanish) or :class:`~dgdeform.graded.Report` objects rather than raising, so
negative controls can show *how* a hypothesis fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import (
    ContextMismatch,
    InvalidDifferential,
    MissingTruncationOrder,
    MixedParityInput,
    NonCommutingDerivations,
    NonHomogeneous,
    OddComponentPresent,
)
from .graded import (
    AlgebraMorphism,
    Derivation,
    Element,
    Report,
    conjugate,
    mul,
    validate_differential,
)
from .scalar import EPS, I_HBAR, ONE, Scalar


@dataclass(frozen=True)
class DeformationConfig:
    """``lam`` multiplies the correction term; default ``+i*h``."""

    lam: Scalar = I_HBAR
    truncation_order: int | None = None

    def __post_init__(self):
        if not Scalar.coerce(self.lam):
            raise ValueError("deformation coefficient must be nonzero")
        if self.truncation_order is not None and self.truncation_order < 0:
            raise ValueError("truncation order must be non-negative")


DEFAULT = DeformationConfig()
#: the coefficient in the exponent of the Weyl product, ``-i*h``
WEYL_COEFFICIENT = -I_HBAR


def _validated(d: Derivation) -> None:
    if getattr(d, "_validated", False):
        return
    try:
        rep = validate_differential(d)
    except Exception as exc:
        raise InvalidDifferential(str(exc)) from exc
    if not rep.ok:
        g, w = rep.failures[0]
        raise InvalidDifferential(f"{d.name}^2({g}) = {w} != 0")
    d._validated = True


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


def deformed_mul(
    a: Element,
    b: Element,
    d: Derivation,
    cfg: DeformationConfig = DEFAULT,
    *,
    validate: bool = True,
) -> Element:
    """``a *d b``, summed over the parity components of ``a``."""
    if a.ctx != b.ctx or a.ctx != d.ctx:
        raise ContextMismatch("deformed product across contexts")
    if validate:
        _validated(d)
    out = mul(a, b)
    db = d(b)
    if not db:
        return out
    for p, ap in a.parity_components().items():
        da = d(ap)
        if da:
            out = out + mul(da, db).scale(cfg.lam * _sign(p))
    return out


def check_associativity(
    a: Element, b: Element, c: Element, d: Derivation, cfg: DeformationConfig = DEFAULT
) -> Element:
    """``a *d (b *d c) - (a *d b) *d c``; ``d`` is not validated so broken ones can be probed."""
    left = deformed_mul(a, deformed_mul(b, c, d, cfg, validate=False), d, cfg, validate=False)
    right = deformed_mul(deformed_mul(a, b, d, cfg, validate=False), c, d, cfg, validate=False)
    return left - right


def correction_term(a: Element, b: Element, d: Derivation, cfg: DeformationConfig = DEFAULT) -> Element:
    return deformed_mul(a, b, d, cfg) - mul(a, b)


def exactness_witnesses(
    a: Element, b: Element, d: Derivation, cfg: DeformationConfig = DEFAULT
) -> tuple[Element, Element]:
    """Two exact rewritings of the correction term.

    ``w1 = lam (-1)^{|a|} d(a * db)`` and
    ``w2 = lam/2 d(-da * b + (-1)^{|a|} a * db)``, per parity component of ``a``.
    """
    _validated(d)
    db = d(b)
    w1 = a.ctx.zero()
    w2 = a.ctx.zero()
    for p, ap in a.parity_components().items():
        s = _sign(p)
        w1 = w1 + d(mul(ap, db)).scale(cfg.lam * s)
        inner = -mul(d(ap), b) + mul(ap, db).scale(s)
        w2 = w2 + d(inner).scale(cfg.lam / 2)
    return w1, w2


def _require_homogeneous(*xs: Element) -> None:
    for x in xs:
        if not x.is_homogeneous():
            raise NonHomogeneous(f"{x} is not homogeneous")


def weak_pauli_check(
    a: Element, b: Element, d: Derivation, cfg: DeformationConfig = DEFAULT
) -> Element:
    """``conj(a *d b) - (-1)^{|a||b|} conj(b) *d conj(a)``.

    The identity uses ``conj(lam) = -lam``; conjugation raises
    :class:`~dgdeform.errors.OddEpsilonPower` outside the h-subring.
    """
    _require_homogeneous(a, b)
    if cfg.lam.conj() != -cfg.lam:
        raise ValueError("weak Pauli identity needs a purely imaginary deformation coefficient")
    s = _sign(a.degree() * b.degree())
    lhs = conjugate(deformed_mul(a, b, d, cfg))
    rhs = deformed_mul(conjugate(b), conjugate(a), d, cfg).scale(s)
    return lhs - rhs


def s_transform(x: Element, d: Derivation, inverse: bool = False, root: Scalar = EPS) -> Element:
    """``S x = x + root*d x`` (``root = e = sqrt(h/i)`` by default); ``S^-1 = id - root*d``."""
    return x + d(x).scale(-root if inverse else root)


def s_conjugated_product(
    a: Element, b: Element, d: Derivation, root: Scalar = EPS
) -> Element:
    """``S^-1(Sa * Sb)``."""
    return s_transform(mul(s_transform(a, d, root=root), s_transform(b, d, root=root)), d, True, root)


def s_equivalence_check(
    a: Element,
    b: Element,
    d: Derivation,
    cfg: DeformationConfig = DEFAULT,
    root: Scalar = EPS,
) -> Element:
    """``S^-1(Sa * Sb) - a *d b`` for even-degree ``a, b``.

    With ``root = e`` one has ``root^2 = h/i = -i*h``, so the transform
    reproduces the deformed product with ``lam = -i*h``; with the default
    ``lam = +i*h`` the returned defect is ``-2i*h * da*db``.
    """
    for x in (a, b):
        if any(deg % 2 for deg in x.degrees()):
            raise OddComponentPresent(f"{x} has an odd-degree component")
    return s_conjugated_product(a, b, d, root) - deformed_mul(a, b, d, cfg)


def s_middle_term(a: Element, b: Element, d: Derivation, root: Scalar = EPS) -> Element:
    """``root (1 - (-1)^{|a|}) a * db``: the term that vanishes on even ``a``."""
    out = a.ctx.zero()
    for p, ap in a.parity_components().items():
        if p:
            out = out + mul(ap, d(b)).scale(root * 2)
    return out


def parity_closure_check(
    a: Element, b: Element, d: Derivation, cfg: DeformationConfig = DEFAULT
) -> Report:
    """Every term of ``a *d b`` has parity ``|a| + |b|`` (and h-weighted degree when homogeneous)."""
    pa = {deg % 2 for deg in a.degrees()}
    pb = {deg % 2 for deg in b.degrees()}
    if len(pa) > 1 or len(pb) > 1:
        raise MixedParityInput("parity closure needs pure-parity inputs")
    want = (next(iter(pa), 0) + next(iter(pb), 0)) % 2
    prod = deformed_mul(a, b, d, cfg)
    rep = Report("parity closure")
    for m in prod.terms:
        if prod.ctx.monomial_degree(m) % 2 != want:
            rep.fail("parity", prod.ctx.monomial_text(m))
    if cfg.lam.eps_exponents() == [2] and a.is_homogeneous() and b.is_homogeneous():
        wa, wb = a.hbar_weighted_degrees(), b.hbar_weighted_degrees()
        if len(wa) == 1 and len(wb) == 1:
            total = wa.pop() + wb.pop()
            got = prod.hbar_weighted_degrees()
            if got - {total}:
                rep.fail("h-weighted degree", sorted(got))
            rep.notes.append(f"h-weighted degree {total}")
    return rep


def derivation_defect(
    a: Element, b: Element, d: Derivation, cfg: DeformationConfig = DEFAULT
) -> Element:
    """``d(a *d b) - (da *d b + (-1)^{|a|} a *d db)``, summed over homogeneous parts of ``a``."""
    out = a.ctx.zero()
    for deg, ah in a.homogeneous_components().items():
        out = out + d(deformed_mul(ah, b, d, cfg)) - (
            deformed_mul(d(ah), b, d, cfg) + deformed_mul(ah, d(b), d, cfg).scale(_sign(deg))
        )
    return out


def unit_defects(a: Element, d: Derivation, cfg: DeformationConfig = DEFAULT) -> tuple[Element, Element]:
    one = a.ctx.one()
    return deformed_mul(one, a, d, cfg) - a, deformed_mul(a, one, d, cfg) - a


def morphism_functoriality_check(
    phi: AlgebraMorphism,
    a: Element,
    b: Element,
    d_src: Derivation,
    d_tgt: Derivation,
    cfg: DeformationConfig = DEFAULT,
) -> Report:
    """``phi(a *d b) = phi(a) *d phi(b)``; raises NotChainMap if ``phi d != d phi``."""
    phi.require_chain_map(d_src, d_tgt)
    rep = Report("functoriality")
    w = phi(deformed_mul(a, b, d_src, cfg)) - deformed_mul(phi(a), phi(b), d_tgt, cfg)
    if w:
        rep.fail("phi(a *d b) - phi(a) *d phi(b)", w)
    return rep


# ---------------------------------------------------------------------------
# exponential product along commuting derivations

Tensor = dict  # (monomial, monomial) -> Scalar


def graded_commutator_of_derivations(D: Derivation, E: Derivation, x: Element) -> Element:
    return D(E(x)) - E(D(x)).scale(_sign(D.degree * E.degree))


def check_commuting(derivations: Sequence[Derivation], depth: int = 2) -> None:
    """Raise NonCommutingDerivations unless all pairs commute on words up to ``depth``."""
    if not derivations:
        return
    ctx = derivations[0].ctx
    probes = [ctx.gen(n) for n in ctx.names]
    words = list(probes)
    frontier = list(probes)
    for _ in range(depth - 1):
        frontier = [mul(w, g) for w in frontier for g in probes]
        words.extend(w for w in frontier if w)
    for i, D in enumerate(derivations):
        for j in range(i, len(derivations)):
            E = derivations[j]
            for w in words:
                c = graded_commutator_of_derivations(D, E, w)
                if c:
                    raise NonCommutingDerivations(i, j, c)


def _apply_pair(t: Tensor, D: Derivation, E: Derivation, ctx) -> Tensor:
    """``(D (x) E)(x (x) y) = (-1)^{|E||x|} Dx (x) Ey`` extended linearly."""
    out: Tensor = {}
    for (ma, mb), c in t.items():
        sign = _sign(E.degree * ctx.monomial_degree(ma))
        Da = D.on_monomial(ma)
        if not Da:
            continue
        Eb = E.on_monomial(mb)
        if not Eb:
            continue
        for m1, c1 in Da.terms.items():
            for m2, c2 in Eb.terms.items():
                v = c * c1 * c2
                if sign < 0:
                    v = -v
                key = (m1, m2)
                prev = out.get(key)
                out[key] = v if prev is None else prev + v
    return {k: v for k, v in out.items() if v}


def _multiply_tensor(t: Tensor, ctx) -> Element:
    out = ctx.zero()
    for (ma, mb), c in t.items():
        out = out + mul(ctx.monomial(ma, c), ctx.monomial(mb))
    return out


def moyal_weyl_mul(
    a: Element,
    b: Element,
    pairs: Sequence[tuple[Derivation, Derivation]],
    cfg: DeformationConfig,
    coefficient: Scalar = WEYL_COEFFICIENT,
    commute_depth: int = 2,
) -> Element:
    """``sum_{k<=N} coefficient^k / k! * mu((sum_i D^i (x) D_i)^k (a (x) b))``, truncated at h^N."""
    if cfg.truncation_order is None:
        raise MissingTruncationOrder("the exponential product needs a truncation order")
    if a.ctx != b.ctx:
        raise ContextMismatch("exponential product across contexts")
    ctx = a.ctx
    flat = [D for pair in pairs for D in pair]
    check_commuting(flat, commute_depth)
    N = cfg.truncation_order
    tensor: Tensor = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            tensor[(ma, mb)] = ca * cb
    out = _multiply_tensor(tensor, ctx)
    power = ONE
    for k in range(1, N + 1):
        nxt: Tensor = {}
        for D, E in pairs:
            for key, v in _apply_pair(tensor, D, E, ctx).items():
                prev = nxt.get(key)
                nxt[key] = v if prev is None else prev + v
        tensor = {key: v for key, v in nxt.items() if v}
        if not tensor:
            break
        power = power * coefficient
        out = out + _multiply_tensor(tensor, ctx).scale(power / Fraction(factorial(k)))
    return out.truncate(N)


def moyal_associativity_defect(
    a: Element,
    b: Element,
    c: Element,
    pairs: Sequence[tuple[Derivation, Derivation]],
    cfg: DeformationConfig,
    coefficient: Scalar = WEYL_COEFFICIENT,
) -> Element:
    star = lambda x, y: moyal_weyl_mul(x, y, pairs, cfg, coefficient)  # noqa: E731
    return (star(a, star(b, c)) - star(star(a, b), c)).truncate(cfg.truncation_order)
