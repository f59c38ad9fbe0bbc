"""Named, validated instances shared by the tests, the suites and scripts.

``catalog_get(name, **params)`` builds an instance and runs its validator;
``CATALOG`` lists names with their integer parameters and ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .coalgebra import CoalgebraPresentation, dualize_dga, validate_coalgebra
from .complexes import ChainComplex, end_dgla
from .dgla import abelian, validate_dgla
from .errors import InvalidInstance, ParamOutOfRange, UnknownInstance
from .graded import Derivation, GradedContext, de_rham_context, require_differential


@dataclass
class DgaInstance:
    ctx: GradedContext
    d: Derivation
    truncation: dict = field(default_factory=dict)


@dataclass
class WeylPair:
    ctx: GradedContext
    pairs: list


@dataclass
class Param:
    lo: int
    hi: int
    default: int


def derham(n: int = 1) -> DgaInstance:
    ctx, d = de_rham_context(n)
    return DgaInstance(ctx, d)


def truncated_dga(n: int = 1, order: int = 2) -> DgaInstance:
    """``Lambda(x1..xn) (x) Q[y1..yn]/(yk^order)`` with ``d xk = yk``; ``|x| = 1``, ``|y| = 2``."""
    if n == 1:
        gens = [("x", 1), ("y", 2)]
    else:
        gens = [(f"x{k}", 1) for k in range(1, n + 1)] + [(f"y{k}", 2) for k in range(1, n + 1)]
    ctx = GradedContext(gens)
    xs, ys = ctx.names[: len(gens) // 2], ctx.names[len(gens) // 2:]
    d = Derivation(ctx, 1, {x: ctx.gen(y) for x, y in zip(xs, ys)})
    return DgaInstance(ctx, d, {y: order for y in ys})


def truncated_dga_4dim(order: int = 2) -> DgaInstance:
    return truncated_dga(1, order)


def weyl_pair() -> WeylPair:
    """``{q, p}`` in degree 0 with the pair ``(d/dp, d/dq)``."""
    ctx = GradedContext([("q", 0), ("p", 0)])
    dp = Derivation(ctx, 0, {"p": ctx.one()}, name="dp")
    dq = Derivation(ctx, 0, {"q": ctx.one()}, name="dq")
    return WeylPair(ctx, [(dp, dq)])


# complexes
def two_term_complex(m: int = 1) -> ChainComplex:
    """``Q^m -> Q^m`` in degrees 0, 1 with identity differential."""
    eye = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    return ChainComplex(0, [m, m], {0: eye}, name=f"two_term{m}")


def three_term_complex() -> ChainComplex:
    return ChainComplex(-1, [1, 2, 1], {-1: [[1], [0]], 0: [[0, 1]]}, name="three_term")


def split_complex() -> ChainComplex:
    """Rank-one differential on ``Q^2 -> Q^2``, so homology in both degrees."""
    return ChainComplex(0, [2, 2], {0: [[1, 0], [0, 0]]}, name="split")


def zigzag_complex() -> ChainComplex:
    """Degrees -2..1, one dimension each, differentials 1, 0, 2."""
    return ChainComplex(-2, [1, 1, 1, 1], {-2: [[1]], -1: [[0]], 0: [[2]]}, name="zigzag")


def shifted_pair() -> ChainComplex:
    return ChainComplex(-1, [1, 1], {-1: [[3]]}, name="shifted_pair")


COMPLEXES: dict[str, Callable[..., ChainComplex]] = {
    "two_term_complex": two_term_complex,
    "three_term_complex": three_term_complex,
    "split_complex": split_complex,
    "zigzag_complex": zigzag_complex,
    "shifted_pair": shifted_pair,
}


def end_dgla_of(complex: str = "three_term_complex", m: int = 1):
    build = COMPLEXES.get(complex)
    if build is None:
        raise UnknownInstance(complex)
    C = build(m) if complex == "two_term_complex" else build()
    return end_dgla(C, label="L")


def group_like() -> CoalgebraPresentation:
    return CoalgebraPresentation([0], {0: {(0, 0): 1}}, {}, {0: 1}, label="C")


def dual_4dim(order: int = 2) -> CoalgebraPresentation:
    inst = truncated_dga(1, order)
    return dualize_dga(inst.ctx, inst.d, inst.truncation)


def dual_truncated(n: int = 2, order: int = 2) -> CoalgebraPresentation:
    inst = truncated_dga(n, order)
    return dualize_dga(inst.ctx, inst.d, inst.truncation)


def abelian_dgla(n: int = 2):
    """``n`` copies of a degree-0 and a degree-1 vector with ``Q e0 = e1``, zero bracket."""
    degrees = [0, 1] * n
    return abelian(degrees, {2 * k: {2 * k + 1: 1} for k in range(n)})


# name -> (constructor, parameter ranges, kind)
CATALOG: dict[str, tuple[Callable, dict[str, Param], str]] = {
    "derham": (derham, {"n": Param(1, 4, 1)}, "dga"),
    "truncated_dga": (truncated_dga, {"n": Param(1, 3, 1), "order": Param(1, 4, 2)}, "dga"),
    "truncated_dga_4dim": (truncated_dga_4dim, {"order": Param(1, 4, 2)}, "dga"),
    "weyl_pair": (weyl_pair, {}, "weyl"),
    "two_term_complex": (two_term_complex, {"m": Param(1, 3, 1)}, "complex"),
    "three_term_complex": (three_term_complex, {}, "complex"),
    "split_complex": (split_complex, {}, "complex"),
    "zigzag_complex": (zigzag_complex, {}, "complex"),
    "shifted_pair": (shifted_pair, {}, "complex"),
    "abelian_dgla": (abelian_dgla, {"n": Param(1, 4, 2)}, "dgla"),
    "group_like": (group_like, {}, "coalgebra"),
    "dual_4dim": (dual_4dim, {"order": Param(1, 4, 2)}, "coalgebra"),
    "dual_truncated": (dual_truncated, {"n": Param(1, 3, 2), "order": Param(1, 3, 2)}, "coalgebra"),
}
for _name in COMPLEXES:
    CATALOG[f"end_dgla_of_{_name}"] = (
        (lambda name: (lambda m=1: end_dgla_of(name, m)))(_name),
        {"m": Param(1, 2, 1)} if _name == "two_term_complex" else {},
        "dgla",
    )


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def _validate(obj, kind: str) -> None:
    if kind == "dga":
        require_differential(obj.d)
    elif kind == "dgla":
        rep = validate_dgla(obj)
        if not rep.ok:
            raise InvalidInstance(str(rep))
    elif kind == "coalgebra":
        rep = validate_coalgebra(obj)
        if not rep.ok:
            raise InvalidInstance(str(rep))
    # complexes check d^2 = 0 in their constructor; the Weyl pair has no differential


def catalog_get(name: str, **params):
    """Build and validate a catalog instance."""
    entry = CATALOG.get(name)
    if entry is None:
        raise UnknownInstance(name)
    build, ranges, kind = entry
    unknown = set(params) - set(ranges)
    if unknown:
        raise ParamOutOfRange(f"{name} takes no parameter {sorted(unknown)[0]!r}")
    args = {}
    for key, p in ranges.items():
        v = params.get(key, p.default)
        if not isinstance(v, int) or not p.lo <= v <= p.hi:
            raise ParamOutOfRange(f"{name}: {key}={v!r} outside [{p.lo}, {p.hi}]")
        args[key] = v
    obj = build(**args)
    _validate(obj, kind)
    return obj


def catalog_kind(name: str) -> str:
    if name not in CATALOG:
        raise UnknownInstance(name)
    return CATALOG[name][2]
