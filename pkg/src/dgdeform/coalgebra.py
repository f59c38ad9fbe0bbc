"""Structure-constant graded coalgebras, the deformed coproduct and the dual of a finite DGA.

Operators act on tensors with the Koszul rule
``(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)``, so for the odd
coderivation ``Q``::

    (id (x) Q)(x (x) y) = (-1)^{|x|} x (x) Qy
    (Q (x) Q)(x (x) y)  = (-1)^{|x|} Qx (x) Qy

and the deformed coproduct is ``Delta + lam (Q (x) Q) Delta``.
"""

from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

from .errors import (
    DegreeError,
    InfiniteDimensional,
    InvalidDifferential,
    NotCoalgebraMap,
    PresentationMismatch,
)
from .graded import Derivation, Element, GradedContext, Report, mul
from .linear import BasisVector, add_into, basis_matrix_apply, invert, prune, sparse_matrix
from .scalar import Scalar, ScalarLike


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


class CoElement(BasisVector):
    """Vector in ``C``; keys are basis indices."""

    __slots__ = ()


class CoTensor(BasisVector):
    """Vector in ``C (x) C`` or ``C (x) C (x) C``; keys are index tuples."""

    __slots__ = ()


class CoalgebraPresentation:
    """Basis degrees, ``Delta e_i = sum c e_j (x) e_k`` and ``Q e_i = sum q e_j``.

    ``coproduct`` maps ``i`` to ``{(j, k): c}``; ``codifferential`` maps ``i``
    to ``{j: q}``.  ``counit`` is an optional row ``{i: c}``; it is stored
    and printed but no axiom involving it is checked.
    """

    def __init__(
        self,
        degrees: Sequence[int],
        coproduct: Mapping[int, Mapping[tuple[int, int], ScalarLike]] | None = None,
        codifferential: Mapping[int, Mapping[int, ScalarLike]] | None = None,
        counit: Mapping[int, ScalarLike] | None = None,
        label: str = "C",
    ):
        self.degrees = tuple(int(x) for x in degrees)
        self.dim = len(self.degrees)
        self.label = label
        self.coproduct: dict[int, dict[tuple[int, int], Scalar]] = {}
        for i, row in (coproduct or {}).items():
            r = {}
            for (j, k), c in row.items():
                c = Scalar.coerce(c)
                if c:
                    r[(int(j), int(k))] = c
            if r:
                self.coproduct[int(i)] = r
        self.codifferential = sparse_matrix(codifferential or {})
        self.counit = {int(i): Scalar.coerce(c) for i, c in (counit or {}).items() if Scalar.coerce(c)}
        for i, row in self.coproduct.items():
            for key in [(i,)] + list(row):
                if any(not 0 <= x < self.dim for x in key):
                    raise IndexError(f"basis index out of range in coproduct of {i}")
        for i, row in self.codifferential.items():
            if any(not 0 <= x < self.dim for x in [i, *row]):
                raise IndexError(f"basis index out of range in codifferential of {i}")
        # filled in by dualize_dga: (context, derivation, monomials)
        self.dual_of = None

    def basis(self, i: int) -> CoElement:
        if not 0 <= i < self.dim:
            raise IndexError(f"basis index {i} out of range")
        return CoElement._raw(self, {i: Scalar.coerce(1)})

    def zero(self) -> CoElement:
        return CoElement._raw(self, {})

    def element(self, coeffs: Mapping[int, ScalarLike]) -> CoElement:
        return CoElement(self, coeffs)

    def tensor(self, coeffs: Mapping[tuple, ScalarLike]) -> CoTensor:
        return CoTensor(self, coeffs)

    def d(self, a: CoElement) -> CoElement:
        if a.pres is not self:
            raise PresentationMismatch("element from another presentation")
        return CoElement._raw(self, basis_matrix_apply(self.codifferential, a.coeffs))

    def replace(self, coproduct=None, codifferential=None) -> CoalgebraPresentation:
        return CoalgebraPresentation(
            self.degrees,
            self.coproduct if coproduct is None else coproduct,
            self.codifferential if codifferential is None else codifferential,
            self.counit,
            self.label,
        )

    def __repr__(self) -> str:
        return f"CoalgebraPresentation({self.label}, dim={self.dim})"


# tensor operators ------------------------------------------------------
def _check(C: CoalgebraPresentation, a: BasisVector) -> None:
    if a.pres is not C:
        raise PresentationMismatch("vector from another presentation")


def coproduct(a: CoElement) -> CoTensor:
    C = a.pres
    out: dict = {}
    for i, c in a.coeffs.items():
        for key, v in C.coproduct.get(i, {}).items():
            add_into(out, key, c * v)
    return CoTensor._raw(C, prune(out))


def apply_Q_at(t: CoTensor, slot: int) -> CoTensor:
    """``Q`` in tensor position ``slot``; the sign counts the degrees it passes."""
    C = t.pres
    deg = C.degrees
    out: dict = {}
    for key, c in t.coeffs.items():
        s = _sign(sum(deg[k] for k in key[:slot]))
        for j, q in C.codifferential.get(key[slot], {}).items():
            new = key[:slot] + (j,) + key[slot + 1:]
            add_into(out, new, c * q * s)
    return CoTensor._raw(C, prune(out))


def apply_QQ(t: CoTensor, i: int = 0, j: int = 1) -> CoTensor:
    """``Q`` in slots ``i < j`` (identity elsewhere), Koszul signs included.

    On two factors this is ``(Q (x) Q)(x (x) y) = (-1)^{|x|} Qx (x) Qy``.
    """
    # Q at j first, then Q at i: Q_i Q_j picks up the passed degrees of each,
    # evaluated on the tensor at the time each Q acts
    return apply_Q_at(apply_Q_at(t, j), i)


def apply_delta_at(t: CoTensor, slot: int, deformed: bool = False, cfg=None) -> CoTensor:
    """``Delta`` (or ``Delta^d``) in tensor position ``slot``; ``Delta`` is even, no sign."""
    C = t.pres
    out: dict = {}
    for key, c in t.coeffs.items():
        image = (deformed_coproduct if deformed else coproduct)(C.basis(key[slot]), *((cfg,) if deformed else ()))
        for (j, k), v in image.coeffs.items():
            add_into(out, key[:slot] + (j, k) + key[slot + 1:], c * v)
    return CoTensor._raw(C, prune(out))


def deformed_coproduct(a: CoElement, cfg=None) -> CoTensor:
    """``Delta a + lam (Q (x) Q) Delta a``."""
    from .deform import DEFAULT

    cfg = cfg or DEFAULT
    plain = coproduct(a)
    return plain + apply_QQ(plain).scale(cfg.lam)


def _as_tensor(a: CoElement) -> CoTensor:
    return CoTensor._raw(a.pres, {(i,): c for i, c in a.coeffs.items()})


def iterated(a: CoElement, left: bool, deformed: bool = True, cfg=None) -> CoTensor:
    """``(Delta (x) id) Delta a`` when ``left`` else ``(id (x) Delta) Delta a``."""
    t = apply_delta_at(_as_tensor(a), 0, deformed, cfg)
    return apply_delta_at(t, 0 if left else 1, deformed, cfg)


def closed_form(a: CoElement, cfg=None) -> CoTensor:
    """``(id + lam [Q(x)Q(x)1 + Q(x)1(x)Q + 1(x)Q(x)Q]) (id (x) Delta) Delta a``."""
    from .deform import DEFAULT

    cfg = cfg or DEFAULT
    base = iterated(a, left=False, deformed=False)
    corr = apply_QQ(base, 0, 1) + apply_QQ(base, 0, 2) + apply_QQ(base, 1, 2)
    return base + corr.scale(cfg.lam)


def coassociativity_check(a: CoElement, cfg=None) -> tuple[CoTensor, CoTensor, CoTensor]:
    """``(defect, closed_left, closed_right)``.

    ``defect`` is ``(id (x) Delta^d)Delta^d a - (Delta^d (x) id)Delta^d a``;
    the other two are each iterated side minus the closed-form expansion.
    All three vanish for a flat coderivation.
    """
    right = iterated(a, left=False, cfg=cfg)
    left = iterated(a, left=True, cfg=cfg)
    ref = closed_form(a, cfg)
    return right - left, left - ref, right - ref


def coderivation_defect(a: CoElement, cfg=None, deformed: bool = True) -> CoTensor:
    """``Delta' Q a - (id (x) Q) Delta' a - (Q (x) id) Delta' a`` with ``Delta'`` plain or deformed."""
    C = a.pres
    delta = (lambda x: deformed_coproduct(x, cfg)) if deformed else coproduct
    t = delta(a)
    return delta(C.d(a)) - apply_Q_at(t, 1) - apply_Q_at(t, 0)


# validation ------------------------------------------------------------
def validate_coalgebra(C: CoalgebraPresentation) -> Report:
    """Degrees, coassociativity, co-Leibniz and ``Q^2 = 0`` on every basis vector."""
    rep = Report(f"coalgebra {C.label}")
    deg = C.degrees
    for i, row in C.coproduct.items():
        for j, k in row:
            if deg[j] + deg[k] != deg[i]:
                rep.fail(f"coproduct degree {i}->({j},{k})", deg[j] + deg[k])
    for i, row in C.codifferential.items():
        for j in row:
            if deg[j] != deg[i] + 1:
                rep.fail(f"codifferential degree {i}->{j}", deg[j])
    for i in range(C.dim):
        e = C.basis(i)
        w = iterated(e, left=False, deformed=False) - iterated(e, left=True, deformed=False)
        if w:
            rep.fail(f"coassociativity e{i}", w)
        w = coderivation_defect(e, deformed=False)
        if w:
            rep.fail(f"co-leibniz e{i}", w)
        w = C.d(C.d(e))
        if w:
            rep.fail(f"Q^2 e{i}", w)
    return rep


def require_valid(C: CoalgebraPresentation) -> None:
    rep = validate_coalgebra(C)
    if not rep.ok:
        raise DegreeError(str(rep))


# morphisms -------------------------------------------------------------
def _apply_map(phi: Mapping[int, Mapping[int, Scalar]], target: CoalgebraPresentation, a: BasisVector):
    return CoElement._raw(target, basis_matrix_apply(phi, a.coeffs))


def _apply_map_tensor(phi, target: CoalgebraPresentation, t: CoTensor) -> CoTensor:
    """``phi (x) phi``; ``phi`` has degree 0 so no signs."""
    out: dict = {}
    for key, c in t.coeffs.items():
        images = [phi.get(k, {}) for k in key]
        for combo in product(*(list(im.items()) for im in images)):
            v = c
            for _, x in combo:
                v = v * x
            add_into(out, tuple(j for j, _ in combo), v)
    return CoTensor._raw(target, prune(out))


def comorphism_defects(phi, C: CoalgebraPresentation, D: CoalgebraPresentation) -> list:
    """Basis-level failures of ``phi Q_C = Q_D phi`` and ``(phi(x)phi) Delta_C = Delta_D phi``."""
    phi = sparse_matrix(phi)
    out = []
    for i, row in phi.items():
        if not 0 <= i < C.dim or any(not 0 <= j < D.dim for j in row):
            out.append((f"index out of range at {i}", row))
            continue
        for j in row:
            if D.degrees[j] != C.degrees[i]:
                out.append((f"degree e{i}->{D.label}[{j}]", (C.degrees[i], D.degrees[j])))
    if out:
        return out
    for i in range(C.dim):
        e = C.basis(i)
        w = _apply_map(phi, D, C.d(e)) - D.d(_apply_map(phi, D, e))
        if w:
            out.append((f"phi Q != Q phi on e{i}", w))
        w = _apply_map_tensor(phi, D, coproduct(e)) - coproduct(_apply_map(phi, D, e))
        if w:
            out.append((f"(phi@phi) Delta != Delta phi on e{i}", w))
    return out


def comorphism_functoriality_check(phi, C: CoalgebraPresentation, D: CoalgebraPresentation, a: CoElement, cfg=None) -> Report:
    """``(phi (x) phi) Delta^d_C a = Delta^d_D (phi a)`` after checking the morphism laws."""
    _check(C, a)
    bad = comorphism_defects(phi, C, D)
    if bad:
        raise NotCoalgebraMap(*bad[0])
    phi = sparse_matrix(phi)
    rep = Report("coalgebra functoriality")
    w = _apply_map_tensor(phi, D, deformed_coproduct(a, cfg)) - deformed_coproduct(_apply_map(phi, D, a), cfg)
    if w:
        rep.fail(f"phi on {a}", w)
    return rep


def transport(C: CoalgebraPresentation, g: Sequence[Sequence[ScalarLike]], q_scale: ScalarLike = 1, label=None):
    """Move ``C`` along the degree-preserving isomorphism ``g`` (``g e_i = sum_j g[i][j] e_j``).

    Returns ``(D, phi)`` where ``phi`` (as ``{i: {j: c}}``) is a coalgebra
    isomorphism ``C -> D``.  ``q_scale`` additionally rescales ``Q``, which
    keeps it a flat coderivation.
    """
    n = C.dim
    rows = [[Scalar.coerce(x) for x in r] for r in g]
    for i in range(n):
        for j in range(n):
            if rows[i][j] and C.degrees[i] != C.degrees[j]:
                raise DegreeError(f"basis change mixes degrees at ({i},{j})")
    inv = invert(rows)
    phi = sparse_matrix({i: {j: rows[i][j] for j in range(n)} for i in range(n)})
    phi_inv = sparse_matrix({i: {j: inv[i][j] for j in range(n)} for i in range(n)})
    D = CoalgebraPresentation(C.degrees, {}, {}, None, label or C.label)
    coprod, codiff = {}, {}
    q = Scalar.coerce(q_scale)
    for i in range(n):
        pre = _apply_map(phi_inv, C, D.basis(i))
        pre = CoElement._raw(C, pre.coeffs)
        coprod[i] = _apply_map_tensor(phi, D, coproduct(pre)).coeffs
        codiff[i] = _apply_map(phi, D, C.d(pre)).scale(q).coeffs
    D = CoalgebraPresentation(C.degrees, coprod, codiff, None, label or C.label)
    if q != Scalar.coerce(1):
        return D, None
    return D, phi


# dual of a finite-dimensional DGA ---------------------------------------
def truncation_basis(ctx: GradedContext, truncation: Mapping[str, int] | None = None) -> list:
    """Monomials of ``ctx`` modulo ``g^n = 0`` for each ``(g, n)`` in ``truncation``."""
    truncation = dict(truncation or {})
    bounds = []
    for k, (name, deg) in enumerate(zip(ctx.names, ctx.degrees)):
        if deg % 2:
            bounds.append(min(2, truncation.get(name, 2)))
        elif name in truncation:
            n = int(truncation[name])
            if n < 1:
                raise ValueError(f"truncation of {name} must be at least 1")
            bounds.append(n)
        else:
            raise InfiniteDimensional(f"even generator {name} is not truncated")
    unknown = set(truncation) - set(ctx.names)
    if unknown:
        raise ValueError(f"unknown generators in truncation: {sorted(unknown)}")
    monos = [tuple(m) for m in product(*(range(b) for b in bounds))]
    return sorted(monos, key=ctx.sort_key)


def reduce_mod(a: Element, basis: Sequence[tuple]) -> dict:
    """Coefficients of ``a`` on ``basis``; monomials outside it lie in the truncation ideal."""
    index = {m: i for i, m in enumerate(basis)}
    return {index[m]: c for m, c in a.terms.items() if m in index}


def _check_stable(ctx: GradedContext, d: Derivation, truncation: Mapping[str, int], basis) -> None:
    for name, n in truncation.items():
        k = ctx.index[name]
        if ctx.degrees[k] % 2:
            continue
        power = ctx.gen(name) ** int(n)
        image = reduce_mod(d(power), basis)
        if image:
            raise InvalidDifferential(f"{d.name}({name}^{n}) leaves the truncation ideal")


# Dual conventions.  The dual basis vector f^a has degree -|m_a|.  The
# pairing <f (x) g, m (x) n> = (-1)^{|g||m|} f(m) g(n) turns the structure
# constants of the product into those of the coproduct, and the transpose
# of d picks up (-1)^{|f|} so that the co-Leibniz rule holds.
def _coproduct_sign(deg_a: int, deg_b: int) -> int:
    return _sign(deg_a * deg_b)


def _codifferential_sign(deg_f: int) -> int:
    return _sign(deg_f)


def dualize_dga(
    ctx: GradedContext, d: Derivation, truncation: Mapping[str, int] | None = None, label: str = "C"
) -> CoalgebraPresentation:
    """The graded dual of ``ctx`` modulo the truncation ideal, with ``Q`` dual to ``d``."""
    truncation = dict(truncation or {})
    basis = truncation_basis(ctx, truncation)
    _check_stable(ctx, d, truncation, basis)
    degs = [ctx.monomial_degree(m) for m in basis]
    coprod: dict[int, dict] = {}
    for a, ma in enumerate(basis):
        for b, mb in enumerate(basis):
            prod = reduce_mod(mul(ctx.monomial(ma), ctx.monomial(mb)), basis)
            s = _coproduct_sign(degs[a], degs[b])
            for c, v in prod.items():
                coprod.setdefault(c, {})[(a, b)] = v * s
    codiff: dict[int, dict] = {}
    for a, ma in enumerate(basis):
        for c, v in reduce_mod(d(ctx.monomial(ma)), basis).items():
            # d m_a has a component on m_c, so Q f^c has one on f^a
            codiff.setdefault(c, {})[a] = v * _codifferential_sign(-degs[c])
    C = CoalgebraPresentation([-x for x in degs], coprod, codiff, {0: 1} if basis and not any(basis[0]) else None, label)
    C.dual_of = (ctx, d, basis)
    return C


def dual_product_constants(C: CoalgebraPresentation, cfg=None, deformed: bool = True) -> dict:
    """Coproduct constants predicted from the (deformed) product of the algebra ``C`` came from.

    Keys ``(c, a, b)``: the coefficient of ``f^a (x) f^b`` in ``Delta f^c``.
    """
    from .deform import DEFAULT, deformed_mul

    if C.dual_of is None:
        raise ValueError("presentation was not produced by dualize_dga")
    cfg = cfg or DEFAULT
    ctx, d, basis = C.dual_of
    degs = [ctx.monomial_degree(m) for m in basis]
    out = {}
    for a, ma in enumerate(basis):
        for b, mb in enumerate(basis):
            x, y = ctx.monomial(ma), ctx.monomial(mb)
            prod = deformed_mul(x, y, d, cfg) if deformed else mul(x, y)
            for c, v in reduce_mod(prod, basis).items():
                out[(c, a, b)] = v * _coproduct_sign(degs[a], degs[b])
    return out


def duality_defects(C: CoalgebraPresentation, cfg=None) -> dict:
    """Entries where ``Delta^d`` of the dual differs from the transposed deformed product."""
    expected = dual_product_constants(C, cfg)
    actual = {}
    for c in range(C.dim):
        for (a, b), v in deformed_coproduct(C.basis(c), cfg).coeffs.items():
            actual[(c, a, b)] = v
    out = {}
    for key in set(expected) | set(actual):
        diff = actual.get(key, Scalar.coerce(0)) - expected.get(key, Scalar.coerce(0))
        if diff:
            out[key] = diff
    return out
