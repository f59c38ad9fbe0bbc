"""Sparse vectors and tensors over a graded basis with :class:`Scalar` coefficients."""

from __future__ import annotations

from typing import Mapping, Sequence

from .errors import PresentationMismatch
from .graded import format_terms
from .scalar import Scalar, ScalarLike


def add_into(acc: dict, key, value: Scalar) -> None:
    prev = acc.get(key)
    acc[key] = value if prev is None else prev + value


def prune(acc: dict) -> dict:
    return {k: v for k, v in acc.items() if v}


class BasisVector:
    """Element of a finite-dimensional graded space given by a presentation.

    The presentation must expose ``degrees`` (one integer per basis vector)
    and ``label`` (the prefix used when printing, ``L`` gives ``L[0]``).
    Keys are basis indices for vectors, index tuples for tensors.
    """

    __slots__ = ("pres", "coeffs")

    def __init__(self, pres, coeffs: Mapping | None = None):
        self.pres = pres
        out = {}
        for k, v in (coeffs or {}).items():
            v = Scalar.coerce(v)
            if v:
                out[k] = v
        self.coeffs = out

    @classmethod
    def _raw(cls, pres, coeffs: dict):
        v = object.__new__(cls)
        v.pres = pres
        v.coeffs = coeffs
        return v

    def _check(self, other) -> None:
        if other.pres is not self.pres:
            raise PresentationMismatch("vectors from different presentations")

    def __add__(self, other):
        if not isinstance(other, BasisVector):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            add_into(out, k, v)
        return type(self)._raw(self.pres, prune(out))

    def __neg__(self):
        return type(self)._raw(self.pres, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, BasisVector):
            return NotImplemented
        return self + (-other)

    def scale(self, c: ScalarLike):
        c = Scalar.coerce(c)
        if not c:
            return type(self)._raw(self.pres, {})
        return type(self)._raw(self.pres, {k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, c):
        try:
            return self.scale(c)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BasisVector):
            return NotImplemented
        return self.pres is other.pres and self.coeffs == other.coeffs

    __hash__ = None

    def key_degree(self, key) -> int:
        if isinstance(key, tuple):
            return sum(self.pres.degrees[i] for i in key)
        return self.pres.degrees[key]

    def degrees(self) -> set[int]:
        return {self.key_degree(k) for k in self.coeffs}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        from .errors import NonHomogeneous

        ds = self.degrees()
        if len(ds) > 1:
            raise NonHomogeneous(f"{self} is not homogeneous")
        return ds.pop() if ds else 0

    def parity_components(self) -> dict:
        out: dict[int, dict] = {}
        for k, v in self.coeffs.items():
            out.setdefault(self.key_degree(k) % 2, {})[k] = v
        return {p: type(self)._raw(self.pres, c) for p, c in sorted(out.items())}

    def truncate(self, order: int):
        return type(self)(self.pres, {k: v.truncate(order) for k, v in self.coeffs.items()})

    def key_text(self, key) -> str:
        lab = self.pres.label
        if isinstance(key, tuple):
            return "@".join(f"{lab}[{i}]" for i in key)
        return f"{lab}[{key}]"

    def __str__(self) -> str:
        keys = sorted(self.coeffs, key=lambda k: (k if isinstance(k, tuple) else (k,)))
        return format_terms([(self.key_text(k), self.coeffs[k]) for k in keys])

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"


def basis_matrix_apply(matrix: Mapping[int, Mapping[int, ScalarLike]], coeffs: Mapping) -> dict:
    """Apply ``e_i -> sum_k matrix[i][k] e_k`` to a coefficient map."""
    out: dict = {}
    for i, c in coeffs.items():
        for k, m in matrix.get(i, {}).items():
            add_into(out, k, c * m)
    return prune(out)


def sparse_matrix(rows: Mapping[int, Mapping[int, ScalarLike]]) -> dict[int, dict[int, Scalar]]:
    """Normalize ``{i: {k: c}}`` to Scalar entries, dropping zeros."""
    out = {}
    for i, row in rows.items():
        r = {int(k): Scalar.coerce(c) for k, c in row.items() if Scalar.coerce(c)}
        if r:
            out[int(i)] = r
    return out


def invert(rows: Sequence[Sequence[ScalarLike]]) -> list[list[Scalar]]:
    """Exact Gauss-Jordan inverse of a square matrix with epsilon-free entries."""
    n = len(rows)
    one, zero = Scalar.coerce(1), Scalar.coerce(0)
    a = [[Scalar.coerce(x) for x in r] + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    if any(len(r) != 2 * n for r in a):
        raise ValueError("matrix is not square")
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [r[n:] for r in a]
