import random

import pytest
from hypothesis import given

from dgdeform import catalog
from dgdeform.complexes import (
    ChainComplex,
    GradedMap,
    MapSum,
    compose,
    deformed_compose,
    end_dgla,
    hom_differential,
)
from dgdeform.deform import DeformationConfig
from dgdeform.dgla import bracket, validate_dgla
from dgdeform.errors import ComplexMismatch, EmptyWindow
from dgdeform.sampling import random_complex, random_map, useful_degrees
from dgdeform.scalar import ZERO, I_HBAR, Scalar

from conftest import seeds


def sgn(p):
    return -1 if p % 2 else 1


# dense oracle: maps as single matrices on the total space -------------------
def offsets(C):
    out, acc = {}, 0
    for k in C.degrees():
        out[k] = acc
        acc += C.dim(k)
    return out, acc


def dense(x, source, target):
    so, sn = offsets(source)
    to, tn = offsets(target)
    M = [[ZERO] * sn for _ in range(tn)]
    for part in MapSum.of(x):
        for k, blk in part.blocks.items():
            for i in range(blk.rows):
                for j in range(blk.cols):
                    M[to[k + part.degree] + i][so[k] + j] += blk[i, j]
    return M


def mm(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), ZERO) for j in range(len(B[0]) if B else 0)] for i in range(len(A))]


def lin(*terms):
    """Sum of ``(scalar, matrix)`` pairs."""
    rows, cols = len(terms[0][1]), len(terms[0][1][0]) if terms[0][1] else 0
    return [[sum((Scalar.coerce(c) * M[i][j] for c, M in terms), ZERO) for j in range(cols)] for i in range(rows)]


def dense_deformed(phi, alpha, lam):
    """Literal displayed formula with total boundary matrices."""
    Dl = dense(GradedMap.boundary_map(phi.target), phi.target, phi.target)
    Dk = dense(GradedMap.boundary_map(phi.source), phi.source, phi.source)
    Dj = dense(GradedMap.boundary_map(alpha.source), alpha.source, alpha.source)
    P = dense(phi, phi.source, phi.target)
    A = dense(alpha, alpha.source, alpha.target)
    sp, sa = sgn(phi.degree), sgn(alpha.degree)
    left = lin((sp, mm(Dl, P)), (-1, mm(P, Dk)))
    right = lin((1, mm(Dk, A)), (-sa, mm(A, Dj)))
    return lin((1, mm(P, A)), (lam, mm(left, right)))


def random_triple(seed):
    rng = random.Random(seed)
    C = [random_complex(rng, name=f"C{k}") for k in range(4)]
    maps = []
    for k in range(3):
        src, tgt = C[k], C[k + 1]
        maps.append(random_map(rng, src, tgt, rng.choice(useful_degrees(src, tgt))))
    return maps  # alpha: C0->C1, beta: C1->C2, phi: C2->C3


class TestExamples:
    def test_hom_differential(self):
        C = catalog.three_term_complex()
        ident = GradedMap.identity(C)
        assert not hom_differential(ident)
        d = GradedMap.boundary_map(C)
        assert not hom_differential(d)  # d is closed: d d + d d = 0 for odd |d|

    def test_compose_bookkeeping(self):
        C = catalog.zigzag_complex()
        phi = GradedMap(C, C, 1, {-2: [[3]], 0: [[5]]})
        assert compose(phi, GradedMap.identity(C)) == phi
        assert compose(phi, phi).degree == 2
        other = catalog.split_complex()
        with pytest.raises(ComplexMismatch):
            compose(phi, GradedMap.identity(other))

    def test_absorption(self):
        C = catalog.three_term_complex()
        phi = GradedMap(C, C, 1, {-1: [[1], [2]], 0: [[4, 2]]})
        ident, d = GradedMap.identity(C), GradedMap.boundary_map(C)
        assert deformed_compose(phi, ident) == MapSum([phi])
        assert deformed_compose(ident, phi) == MapSum([phi])
        assert deformed_compose(d, phi) == MapSum([compose(d, phi)])
        assert deformed_compose(phi, d) == MapSum([compose(phi, d)])

    def test_chain_maps_compose_plainly(self):
        C = catalog.two_term_complex(2)
        f = GradedMap(C, C, 0, {0: [[1, 2], [0, 3]], 1: [[1, 2], [0, 3]]})
        assert not hom_differential(f)
        assert deformed_compose(f, f) == MapSum([compose(f, f)])

    def test_invalid_complex(self):
        with pytest.raises(ValueError):
            ChainComplex(0, [1, 1, 1], {0: [[1]], 1: [[1]]})

    def test_text(self):
        C = catalog.three_term_complex()
        phi = GradedMap(C, C, 0, {0: [[1, 0], [0, 2]]})
        assert str(phi) == "deg 0: [0] [1 0; 0 2]"


class TestDenseOracle:
    @given(seeds())
    def test_deformed_compose(self, seed):
        alpha, beta, _ = random_triple(seed)
        for lam in (I_HBAR, -I_HBAR):
            got = deformed_compose(beta, alpha, DeformationConfig(lam))
            assert dense(got, alpha.source, beta.target) == dense_deformed(beta, alpha, lam)
            assert set(got.degrees()) <= {alpha.degree + beta.degree, alpha.degree + beta.degree + 2}

    @given(seeds())
    def test_hom_differential(self, seed):
        alpha, _, _ = random_triple(seed)
        Dt = dense(GradedMap.boundary_map(alpha.target), alpha.target, alpha.target)
        Ds = dense(GradedMap.boundary_map(alpha.source), alpha.source, alpha.source)
        A = dense(alpha, alpha.source, alpha.target)
        want = lin((1, mm(Dt, A)), (-(sgn(alpha.degree)), mm(A, Ds)))
        assert dense(hom_differential(alpha), alpha.source, alpha.target) == want


class TestLaws:
    @given(seeds())
    def test_d_squared(self, seed):
        alpha, _, _ = random_triple(seed)
        assert not hom_differential(hom_differential(alpha))

    @given(seeds())
    def test_leibniz(self, seed):
        alpha, beta, _ = random_triple(seed)
        lhs = hom_differential(compose(beta, alpha))
        rhs = compose(hom_differential(beta), alpha) + compose(beta, hom_differential(alpha)).scale(sgn(beta.degree))
        assert lhs == rhs

    @given(seeds())
    def test_deformed_associative(self, seed):
        alpha, beta, phi = random_triple(seed)
        left = deformed_compose(phi, deformed_compose(beta, alpha))
        right = deformed_compose(deformed_compose(phi, beta), alpha)
        assert left == right

    @given(seeds())
    def test_absorption(self, seed):
        alpha, _, _ = random_triple(seed)
        S, T = alpha.source, alpha.target
        assert deformed_compose(alpha, GradedMap.identity(S)) == MapSum([alpha])
        assert deformed_compose(GradedMap.identity(T), alpha) == MapSum([alpha])
        dT, dS = GradedMap.boundary_map(T), GradedMap.boundary_map(S)
        assert deformed_compose(dT, alpha) == MapSum([compose(dT, alpha)])
        assert deformed_compose(alpha, dS) == MapSum([compose(alpha, dS)])


class TestEndDgla:
    def test_zero_differential(self):
        C = ChainComplex(0, [1, 1])
        L = end_dgla(C)
        assert not L.differential

    def test_two_term(self):
        L = end_dgla(catalog.two_term_complex(1))
        assert L.dim == 4
        assert validate_dgla(L).ok

    @pytest.mark.parametrize("name", sorted(catalog.COMPLEXES))
    def test_catalog_complexes_valid(self, name):
        assert validate_dgla(catalog.end_dgla_of(name)).ok

    def test_bracket_matches_commutator(self):
        L = catalog.end_dgla_of("three_term_complex")
        R = L.realization
        rng = random.Random(3)
        for _ in range(20):
            i, j = rng.randrange(L.dim), rng.randrange(L.dim)
            a, b = L.basis(i), L.basis(j)
            phi, alpha = R.basis[i], R.basis[j]
            sign = sgn(phi.degree * alpha.degree)
            comm = MapSum([compose(phi, alpha), compose(alpha, phi).scale(-sign)])
            assert R.to_maps(bracket(a, b)) == comm

    def test_empty_window(self):
        with pytest.raises(EmptyWindow):
            end_dgla(catalog.two_term_complex(1), (3, 2))
        with pytest.raises(EmptyWindow):
            end_dgla(catalog.two_term_complex(1), (5, 7))
