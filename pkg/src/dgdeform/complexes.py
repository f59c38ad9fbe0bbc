"""Bounded cochain complexes, graded linear maps and their deformed composition.

A :class:`GradedMap` of degree ``r`` carries one matrix per source degree
``k``, sending ``C^k`` to ``D^{k+r}``.  Maps need not commute with the
boundaries; the homotopy differential ``d phi = d o phi - (-1)^r phi o d``
measures the failure.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import ComplexMismatch, DegreeError
from .scalar import ONE, ZERO, Scalar, ScalarLike


class Matrix:
    """Dense exact matrix of :class:`Scalar` entries (small sizes only)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[ScalarLike]] | None = None):
        self.rows, self.cols = rows, cols
        if data is None:
            self.data = tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows))
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError(f"matrix data does not have shape {rows}x{cols}")
            self.data = tuple(tuple(Scalar.coerce(x) for x in r) for r in data)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = self.data[i]
            line = []
            for j in range(other.cols):
                s = ZERO
                for k in range(self.cols):
                    a = row[k]
                    if a:
                        b = other.data[k][j]
                        if b:
                            s = s + a * b
                line.append(s)
            out.append(line)
        return Matrix(self.rows, other.cols, out)

    def __add__(self, other: Matrix) -> Matrix:
        self._same_shape(other)
        return Matrix(
            self.rows,
            self.cols,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
        )

    def __sub__(self, other: Matrix) -> Matrix:
        return self + other.scale(-1)

    def __neg__(self) -> Matrix:
        return self.scale(-1)

    def scale(self, c: ScalarLike) -> Matrix:
        c = Scalar.coerce(c)
        return Matrix(self.rows, self.cols, [[x * c for x in r] for r in self.data])

    def _same_shape(self, other: Matrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shapes differ")

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    __hash__ = None

    def transpose(self) -> Matrix:
        return Matrix(self.cols, self.rows, [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def text(self) -> str:
        """Row-major ``[a b; c d]`` text used by the script language."""
        return "[" + "; ".join(" ".join(_entry_text(x) for x in r) for r in self.data) + "]"

    def __repr__(self) -> str:
        return f"Matrix({self.text()})"


def _entry_text(x: Scalar) -> str:
    s = str(x)
    return s if " " not in s else f"({s.replace(' ', '')})"


class ChainComplex:
    """Finite cochain complex ``C^lo -> ... -> C^hi`` with exact boundary matrices."""

    def __init__(
        self,
        lo: int,
        dims: Sequence[int],
        boundaries: Mapping[int, Matrix | Sequence[Sequence[ScalarLike]]] | None = None,
        name: str = "C",
        check: bool = True,
    ):
        self.lo = int(lo)
        self.dims_list = tuple(int(n) for n in dims)
        if any(n < 0 for n in self.dims_list):
            raise ValueError("negative dimension")
        self.hi = self.lo + len(self.dims_list) - 1
        self.name = name
        self.boundary: dict[int, Matrix] = {}
        for k in range(self.lo, self.hi):
            self.boundary[k] = Matrix.zeros(self.dim(k + 1), self.dim(k))
        for k, mat in (boundaries or {}).items():
            if not isinstance(mat, Matrix):
                mat = Matrix(self.dim(k + 1), self.dim(k), mat)
            if (mat.rows, mat.cols) != (self.dim(k + 1), self.dim(k)):
                raise ValueError(f"boundary d^{k} must be {self.dim(k + 1)}x{self.dim(k)}")
            if not (self.lo <= k < self.hi):
                if not mat.is_zero():
                    raise ValueError(f"boundary d^{k} outside the degree range")
                continue
            self.boundary[k] = mat
        if check:
            for k in range(self.lo, self.hi - 1):
                if not (self.boundary[k + 1] @ self.boundary[k]).is_zero():
                    raise ValueError(f"d^{k + 1} d^{k} != 0 in complex {name}")

    def dim(self, k: int) -> int:
        if self.lo <= k <= self.hi:
            return self.dims_list[k - self.lo]
        return 0

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def d(self, k: int) -> Matrix:
        """``d^k: C^k -> C^{k+1}``, zero outside the range."""
        if k in self.boundary:
            return self.boundary[k]
        return Matrix.zeros(self.dim(k + 1), self.dim(k))

    def total_dim(self) -> int:
        return sum(self.dims_list)

    def same_as(self, other: ChainComplex) -> bool:
        return self is other or (
            self.lo == other.lo
            and self.dims_list == other.dims_list
            and all(self.d(k) == other.d(k) for k in self.degrees())
        )

    def __repr__(self) -> str:
        return f"ChainComplex({self.name}, lo={self.lo}, dims={list(self.dims_list)})"


class GradedMap:
    """Pure-degree linear map ``C^k -> D^{k+r}`` given blockwise."""

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        degree: int,
        blocks: Mapping[int, Matrix | Sequence[Sequence[ScalarLike]]] | None = None,
    ):
        self.source, self.target, self.degree = source, target, int(degree)
        self.blocks: dict[int, Matrix] = {}
        for k, mat in (blocks or {}).items():
            rows, cols = target.dim(k + self.degree), source.dim(k)
            if not isinstance(mat, Matrix):
                mat = Matrix(rows, cols, mat)
            if (mat.rows, mat.cols) != (rows, cols):
                raise ValueError(f"block {k} must be {rows}x{cols}, got {mat.rows}x{mat.cols}")
            if rows and cols and not mat.is_zero():
                self.blocks[k] = mat

    def block(self, k: int) -> Matrix:
        m = self.blocks.get(k)
        if m is None:
            return Matrix.zeros(self.target.dim(k + self.degree), self.source.dim(k))
        return m

    @classmethod
    def identity(cls, C: ChainComplex) -> GradedMap:
        return cls(C, C, 0, {k: Matrix.identity(C.dim(k)) for k in C.degrees()})

    @classmethod
    def boundary_map(cls, C: ChainComplex) -> GradedMap:
        return cls(C, C, 1, {k: C.d(k) for k in C.degrees()})

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex, degree: int) -> GradedMap:
        return cls(source, target, degree, {})

    def _compatible(self, other: GradedMap) -> None:
        if not (
            self.source.same_as(other.source)
            and self.target.same_as(other.target)
            and self.degree == other.degree
        ):
            raise ComplexMismatch("maps differ in source, target or degree")

    def __add__(self, other: GradedMap) -> GradedMap:
        self._compatible(other)
        keys = set(self.blocks) | set(other.blocks)
        return GradedMap(
            self.source, self.target, self.degree, {k: self.block(k) + other.block(k) for k in keys}
        )

    def __sub__(self, other: GradedMap) -> GradedMap:
        return self + other.scale(-1)

    def __neg__(self) -> GradedMap:
        return self.scale(-1)

    def scale(self, c: ScalarLike) -> GradedMap:
        return GradedMap(self.source, self.target, self.degree, {k: m.scale(c) for k, m in self.blocks.items()})

    def __rmul__(self, c: ScalarLike) -> GradedMap:
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.blocks

    def __bool__(self) -> bool:
        return bool(self.blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        try:
            self._compatible(other)
        except ComplexMismatch:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def truncate(self, order: int) -> GradedMap:
        return GradedMap(
            self.source,
            self.target,
            self.degree,
            {k: Matrix(m.rows, m.cols, [[x.truncate(order) for x in r] for r in m.data]) for k, m in self.blocks.items()},
        )

    def __repr__(self) -> str:
        return f"GradedMap({self.source.name}->{self.target.name}, degree={self.degree}, blocks={sorted(self.blocks)})"

    def __str__(self) -> str:
        if not self.blocks:
            return "0"
        parts = [f"[{k}] {self.blocks[k].text()}" for k in sorted(self.blocks)]
        return f"deg {self.degree}: " + ", ".join(parts)


class MapSum:
    """Formal sum of pure-degree maps sharing source and target.

    Zero components are dropped, so equality is componentwise equality.
    """

    def __init__(self, parts: Iterable[GradedMap], source=None, target=None):
        self.components: dict[int, GradedMap] = {}
        for p in parts:
            source = source or p.source
            target = target or p.target
            if p.degree in self.components:
                p = self.components[p.degree] + p
            self.components[p.degree] = p
        self.components = {k: v for k, v in self.components.items() if not v.is_zero()}
        self.source, self.target = source, target

    @classmethod
    def of(cls, x) -> MapSum:
        return x if isinstance(x, MapSum) else cls([x])

    def __iter__(self):
        return iter([self.components[k] for k in sorted(self.components)])

    def degrees(self) -> list[int]:
        return sorted(self.components)

    def __add__(self, other) -> MapSum:
        return MapSum(list(self) + list(MapSum.of(other)), self.source, self.target)

    def __sub__(self, other) -> MapSum:
        return self + MapSum.of(other).scale(-1)

    def scale(self, c: ScalarLike) -> MapSum:
        return MapSum([p.scale(c) for p in self], self.source, self.target)

    def __neg__(self) -> MapSum:
        return self.scale(-1)

    def component(self, degree: int) -> GradedMap | None:
        return self.components.get(degree)

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GradedMap):
            other = MapSum([other])
        if not isinstance(other, MapSum):
            return NotImplemented
        if set(self.components) != set(other.components):
            return False
        return all(self.components[k] == other.components[k] for k in self.components)

    __hash__ = None

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return " + ".join(f"({p})" for p in self)


def compose(phi: GradedMap, alpha: GradedMap) -> GradedMap:
    """``phi o alpha``; ``alpha``'s target must be ``phi``'s source."""
    if not phi.source.same_as(alpha.target):
        raise ComplexMismatch("composition of non-composable maps")
    blocks = {}
    for k, a in alpha.blocks.items():
        p = phi.blocks.get(k + alpha.degree)
        if p is not None:
            blocks[k] = p @ a
    return GradedMap(alpha.source, phi.target, phi.degree + alpha.degree, blocks)


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


def hom_differential(phi: GradedMap) -> GradedMap:
    """``d_target o phi - (-1)^{|phi|} phi o d_source``."""
    dt = GradedMap.boundary_map(phi.target)
    ds = GradedMap.boundary_map(phi.source)
    return compose(dt, phi) - compose(phi, ds).scale(_sign(phi.degree))


def deformed_compose(phi, alpha, cfg=None) -> MapSum:
    """Deformed composition, expanded into its three surviving terms.

    ``phi o alpha + lam((-1)^{|phi|} d_l phi d_k alpha
    - (-1)^{|alpha|+|phi|} d_l phi alpha d_j + (-1)^{|alpha|} phi d_k alpha d_j)``
    for ``alpha: C_j -> C_k`` and ``phi: C_k -> C_l``.  The correction has
    degree ``|phi| + |alpha| + 2``, so the result is a :class:`MapSum`.
    Mixed-degree arguments are handled bilinearly.
    """
    from .deform import DEFAULT

    cfg = cfg or DEFAULT
    if isinstance(phi, MapSum) or isinstance(alpha, MapSum):
        ps = list(phi) if isinstance(phi, MapSum) else [phi]
        as_ = list(alpha) if isinstance(alpha, MapSum) else [alpha]
        parts = []
        for p in ps:
            for a in as_:
                parts.extend(deformed_compose(p, a, cfg))
        return MapSum(parts, _first_source(as_, alpha), _first_target(ps, phi))
    if not phi.source.same_as(alpha.target):
        raise ComplexMismatch("composition of non-composable maps")
    dl = GradedMap.boundary_map(phi.target)
    dk = GradedMap.boundary_map(phi.source)
    dj = GradedMap.boundary_map(alpha.source)
    p, a = phi.degree, alpha.degree
    t1 = compose(compose(compose(dl, phi), dk), alpha).scale(_sign(p))
    t2 = compose(compose(compose(dl, phi), alpha), dj).scale(-_sign(a + p))
    t3 = compose(compose(compose(phi, dk), alpha), dj).scale(_sign(a))
    return MapSum([compose(phi, alpha), (t1 + t2 + t3).scale(cfg.lam)])


def _first_source(parts, fallback):
    return parts[0].source if parts else fallback.source


def _first_target(parts, fallback):
    return parts[0].target if parts else fallback.target


def random_block(rng, rows: int, cols: int, density: float = 0.6, bound: int = 3) -> Matrix:
    data = [
        [Scalar.coerce(rng.randint(-bound, bound)) if rng.random() < density else ZERO for _ in range(cols)]
        for _ in range(rows)
    ]
    return Matrix(rows, cols, data)


def check_degree(phi: GradedMap, r: int) -> None:
    if phi.degree != r:
        raise DegreeError(f"expected a map of degree {r}, got {phi.degree}")


def elementary_maps(C: ChainComplex, window: tuple[int, int] | None = None) -> list[GradedMap]:
    """Basis of graded endomorphisms: one map per (degree, source slot, target slot)."""
    lo, hi = C.lo - C.hi, C.hi - C.lo
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    basis = []
    for r in range(lo, hi + 1):
        for k in C.degrees():
            rows, cols = C.dim(k + r), C.dim(k)
            for i in range(rows):
                for j in range(cols):
                    data = [[ONE if (a, b) == (i, j) else ZERO for b in range(cols)] for a in range(rows)]
                    basis.append(GradedMap(C, C, r, {k: Matrix(rows, cols, data)}))
    return basis


def map_coordinates(phi: GradedMap, basis: Sequence[GradedMap], index=None) -> dict[int, Scalar]:
    """Coordinates of ``phi`` in an elementary-map basis."""
    if index is None:
        index = _elementary_index(basis)
    out = {}
    for k, m in phi.blocks.items():
        for i in range(m.rows):
            for j in range(m.cols):
                if m.data[i][j]:
                    key = (phi.degree, k, i, j)
                    if key not in index:
                        raise ComplexMismatch(f"map component {key} lies outside the basis window")
                    out[index[key]] = m.data[i][j]
    return out


def _elementary_index(basis: Sequence[GradedMap]) -> dict:
    index = {}
    for n, b in enumerate(basis):
        (k, m), = b.blocks.items()
        i, j = next((i, j) for i in range(m.rows) for j in range(m.cols) if m.data[i][j])
        index[(b.degree, k, i, j)] = n
    return index


class EndRealization:
    """Translation between Lie elements of ``end_dgla(C)`` and graded maps of ``C``."""

    def __init__(self, complex_: ChainComplex, basis: list[GradedMap]):
        self.complex = complex_
        self.basis = basis
        self.index = _elementary_index(basis)

    def to_maps(self, x) -> MapSum:
        parts = [self.basis[i].scale(c) for i, c in x.coeffs.items()]
        return MapSum(parts, self.complex, self.complex)

    def from_map(self, L, phi) -> object:
        from .dgla import LieElement

        coeffs: dict = {}
        for p in MapSum.of(phi):
            coeffs.update(map_coordinates(p, self.basis, self.index))
        return LieElement(L, coeffs)


def end_dgla(C: ChainComplex, degree_window: tuple[int, int] | None = None, label: str = "L"):
    """Graded endomorphisms of ``C`` as a DGLA.

    Bracket ``[phi, alpha] = phi o alpha - (-1)^{|phi||alpha|} alpha o phi``,
    differential :func:`hom_differential`.  A window narrower than the full
    degree range must be closed under both operations.
    """
    from .dgla import DglaPresentation

    if degree_window is not None and degree_window[0] > degree_window[1]:
        from .errors import EmptyWindow

        raise EmptyWindow(f"empty degree window {degree_window}")
    basis = elementary_maps(C, degree_window)
    if not basis:
        from .errors import EmptyWindow

        raise EmptyWindow(f"no graded endomorphisms of {C.name} in window {degree_window}")
    index = _elementary_index(basis)
    brackets = {}
    for a, phi in enumerate(basis):
        for b, alpha in enumerate(basis):
            if not phi.source.same_as(alpha.target):
                continue
            x = compose(phi, alpha)
            y = compose(alpha, phi)
            br = MapSum([x, y.scale(-_sign(phi.degree * alpha.degree))])
            coeffs = {}
            for part in br:
                coeffs.update(map_coordinates(part, basis, index))
            if coeffs:
                brackets[(a, b)] = coeffs
    differential = {}
    for a, phi in enumerate(basis):
        dphi = hom_differential(phi)
        if dphi:
            differential[a] = map_coordinates(dphi, basis, index)
    L = DglaPresentation([b.degree for b in basis], brackets, differential, label)
    L.realization = EndRealization(C, basis)
    return L
