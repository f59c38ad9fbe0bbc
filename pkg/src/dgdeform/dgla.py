"""Structure-constant DG Lie algebras and the deformed bracket.

``[a, b]^d = [a, b] + lam (-1)^{|a|} [da, db]`` no longer satisfies the
graded Jacobi identity; its Jacobiator is ``Q`` applied to an explicit
six-term primitive.  :func:`exactness_check` evaluates both sides and
returns the residual rather than asserting, so a wrong sign would surface
as a reproducible counterexample.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .errors import DegreeError, PresentationMismatch
from .graded import Report
from .linear import BasisVector, add_into, basis_matrix_apply, prune, sparse_matrix
from .scalar import Scalar, ScalarLike


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


class LieElement(BasisVector):
    __slots__ = ()


class DglaPresentation:
    """Basis degrees, bracket constants ``[e_i, e_j] = sum_k c e_k`` and differential ``Q``.

    ``brackets`` maps ``(i, j)`` to ``{k: c}``; both orders must be listed
    (antisymmetry is checked, not imposed).  ``differential`` maps ``i`` to
    ``{k: c}`` meaning ``Q e_i = sum_k c e_k``.
    """

    def __init__(
        self,
        degrees: Sequence[int],
        brackets: Mapping[tuple[int, int], Mapping[int, ScalarLike]] | None = None,
        differential: Mapping[int, Mapping[int, ScalarLike]] | None = None,
        label: str = "L",
    ):
        self.degrees = tuple(int(x) for x in degrees)
        self.dim = len(self.degrees)
        self.label = label
        self.brackets: dict[tuple[int, int], dict[int, Scalar]] = {}
        for (i, j), row in (brackets or {}).items():
            r = {int(k): Scalar.coerce(c) for k, c in row.items() if Scalar.coerce(c)}
            if r:
                self.brackets[(int(i), int(j))] = r
        self.differential = sparse_matrix(differential or {})
        for key in list(self.brackets) + [(i,) for i in self.differential]:
            if any(not 0 <= x < self.dim for x in key):
                raise IndexError(f"basis index out of range in {key}")
        self._by_left: dict[int, dict[int, dict[int, Scalar]]] = {}
        for (i, j), row in self.brackets.items():
            self._by_left.setdefault(i, {})[j] = row
        # set by constructions that come from graded maps (see complexes.end_dgla)
        self.realization = None

    def basis(self, i: int) -> LieElement:
        if not 0 <= i < self.dim:
            raise IndexError(f"basis index {i} out of range")
        return LieElement._raw(self, {i: Scalar.coerce(1)})

    def zero(self) -> LieElement:
        return LieElement._raw(self, {})

    def element(self, coeffs: Mapping[int, ScalarLike]) -> LieElement:
        return LieElement(self, coeffs)

    def d(self, a: LieElement) -> LieElement:
        if a.pres is not self:
            raise PresentationMismatch("element from another presentation")
        return LieElement._raw(self, basis_matrix_apply(self.differential, a.coeffs))

    def with_brackets(self, brackets) -> DglaPresentation:
        out = DglaPresentation(self.degrees, brackets, self.differential, self.label)
        out.realization = self.realization
        return out

    def __repr__(self) -> str:
        return f"DglaPresentation({self.label}, dim={self.dim})"


def bracket(a: LieElement, b: LieElement) -> LieElement:
    a._check(b)
    L = a.pres
    out: dict = {}
    for i, ci in a.coeffs.items():
        row = L._by_left.get(i)
        if not row:
            continue
        for j, cj in b.coeffs.items():
            consts = row.get(j)
            if not consts:
                continue
            cij = ci * cj
            for k, c in consts.items():
                add_into(out, k, cij * c)
    return LieElement._raw(L, prune(out))


def deformed_bracket(a: LieElement, b: LieElement, cfg=None) -> LieElement:
    """``[a, b] + lam (-1)^{|a|} [Qa, Qb]``, per parity component of ``a``."""
    from .deform import DEFAULT

    cfg = cfg or DEFAULT
    a._check(b)
    L = a.pres
    out = bracket(a, b)
    db = L.d(b)
    if not db:
        return out
    for p, ap in a.parity_components().items():
        da = L.d(ap)
        if da:
            out = out + bracket(da, db).scale(cfg.lam * _sign(p))
    return out


def _components(*xs: LieElement):
    """Parity-homogeneous pieces of each argument, all combinations."""
    parts = [list(x.parity_components().items()) for x in xs]
    return product(*parts)


def jacobiator(
    a1: LieElement, a2: LieElement, a3: LieElement, use_deformed: bool = False, cfg=None
) -> LieElement:
    """``(-1)^{|a1||a3|}[a1,[a2,a3]] + (-1)^{|a2||a1|}[a2,[a3,a1]] + (-1)^{|a3||a2|}[a3,[a1,a2]]``."""
    from .deform import DEFAULT

    cfg = cfg or DEFAULT
    a1._check(a2)
    a1._check(a3)
    if use_deformed:
        br = lambda x, y: deformed_bracket(x, y, cfg)  # noqa: E731
    else:
        br = bracket
    out = a1.pres.zero()
    for (p1, x1), (p2, x2), (p3, x3) in _components(a1, a2, a3):
        out = (
            out
            + br(x1, br(x2, x3)).scale(_sign(p1 * p3))
            + br(x2, br(x3, x1)).scale(_sign(p2 * p1))
            + br(x3, br(x1, x2)).scale(_sign(p3 * p2))
        )
    return out


def defect_primitive(
    a1: LieElement, a2: LieElement, a3: LieElement, cfg=None, signs: str = "verbatim"
) -> LieElement:
    """The six-term primitive of the deformed Jacobiator, prefactor ``2*lam/3``.

    With ``signs="verbatim"`` the terms are::

        (-1)^{|a1||a3|+|a1|+|a2|}[a1,[a2,da3]] - (-1)^{|a1||a3|}[da1,[a2,a3]]
      + (-1)^{|a2||a1|+|a2|+|a3|}[a2,[a3,da1]] - (-1)^{|a2||a1|}[da2,[a3,a1]]
      + (-1)^{|a3||a2|+|a1|+|a2|}[a3,[a1,da2]] - (-1)^{|a3||a2|}[da3,[a1,a2]]

    The fifth exponent is not the cyclic image of the first and the formula
    misses the Jacobiator whenever ``|a2| + |a3|`` is odd.  ``signs="cyclic"``
    uses ``|a3||a2|+|a3|+|a1|`` there, which is exact in every degree.
    """
    from .deform import DEFAULT

    if signs not in ("verbatim", "cyclic"):
        raise ValueError(f"signs must be 'verbatim' or 'cyclic', not {signs!r}")
    cfg = cfg or DEFAULT
    a1._check(a2)
    a1._check(a3)
    L = a1.pres
    d = L.d
    out = L.zero()
    for (p1, x1), (p2, x2), (p3, x3) in _components(a1, a2, a3):
        fifth = p3 * p2 + (p3 + p1 if signs == "cyclic" else p1 + p2)
        terms = (
            bracket(x1, bracket(x2, d(x3))).scale(_sign(p1 * p3 + p1 + p2))
            - bracket(d(x1), bracket(x2, x3)).scale(_sign(p1 * p3))
            + bracket(x2, bracket(x3, d(x1))).scale(_sign(p2 * p1 + p2 + p3))
            - bracket(d(x2), bracket(x3, x1)).scale(_sign(p2 * p1))
            + bracket(x3, bracket(x1, d(x2))).scale(_sign(fifth))
            - bracket(d(x3), bracket(x1, x2)).scale(_sign(p3 * p2))
        )
        out = out + terms
    return out.scale(cfg.lam * Fraction(2, 3))


def exactness_check(a1: LieElement, a2: LieElement, a3: LieElement, cfg=None, signs: str = "verbatim"):
    """``(defect, Q(primitive), defect - Q(primitive))``; the residual should vanish."""
    defect = jacobiator(a1, a2, a3, use_deformed=True, cfg=cfg)
    image = a1.pres.d(defect_primitive(a1, a2, a3, cfg, signs))
    return defect, image, defect - image


def antisymmetry_defect(a: LieElement, b: LieElement, use_deformed: bool = False, cfg=None) -> LieElement:
    """``[a,b] + (-1)^{|a||b|}[b,a]`` for homogeneous inputs."""
    br = (lambda x, y: deformed_bracket(x, y, cfg)) if use_deformed else bracket
    return br(a, b) + br(b, a).scale(_sign(a.degree() * b.degree()))


def validate_dgla(L: DglaPresentation) -> Report:
    """Degrees, antisymmetry, Jacobi, Leibniz and ``Q^2 = 0`` on basis elements."""
    rep = Report(f"dgla {L.label}")
    deg = L.degrees
    for (i, j), row in L.brackets.items():
        for k in row:
            if deg[k] != deg[i] + deg[j]:
                rep.fail(f"bracket degree ({i},{j})->{k}", deg[k])
    for i, row in L.differential.items():
        for k in row:
            if deg[k] != deg[i] + 1:
                rep.fail(f"differential degree {i}->{k}", deg[k])
    e = [L.basis(i) for i in range(L.dim)]
    active = sorted({i for ij in L.brackets for i in ij} | set(L.differential)
                    | {k for r in L.brackets.values() for k in r})
    for i in range(L.dim):
        for j in range(i, L.dim):
            w = antisymmetry_defect(e[i], e[j])
            if w:
                rep.fail(f"antisymmetry ({i},{j})", w)
    for i in active:
        for j in active:
            for k in active:
                w = jacobiator(e[i], e[j], e[k])
                if w:
                    rep.fail(f"jacobi ({i},{j},{k})", w)
    for i in range(L.dim):
        for j in range(L.dim):
            w = L.d(bracket(e[i], e[j])) - (
                bracket(L.d(e[i]), e[j]) + bracket(e[i], L.d(e[j])).scale(_sign(deg[i]))
            )
            if w:
                rep.fail(f"leibniz ({i},{j})", w)
    for i in range(L.dim):
        w = L.d(L.d(e[i]))
        if w:
            rep.fail(f"Q^2 e{i}", w)
    return rep


def require_valid(L: DglaPresentation) -> None:
    rep = validate_dgla(L)
    if not rep.ok:
        raise DegreeError(str(rep))


def abelian(degrees: Sequence[int], differential=None, label: str = "L") -> DglaPresentation:
    return DglaPresentation(degrees, {}, differential or {}, label)


def flip_constant(L: DglaPresentation, i: int, j: int, k: int, both: bool = True) -> DglaPresentation:
    """Negate ``c_{ij}^k`` (and the partner ``c_{ji}^k`` when ``both``): a negative control."""
    new = {key: dict(row) for key, row in L.brackets.items()}
    for key in ((i, j), (j, i)) if both and i != j else ((i, j),):
        if k in new.get(key, {}):
            new[key][k] = -new[key][k]
    return L.with_brackets(new)
