import random

import pytest
from hypothesis import given

from dgdeform import catalog
from dgdeform import dgla as lie
from dgdeform.complexes import MapSum, compose, hom_differential
from dgdeform.deform import DeformationConfig
from dgdeform.errors import PresentationMismatch
from dgdeform.sampling import random_lie_homogeneous
from dgdeform.scalar import I_HBAR

from conftest import seeds

NAMES = sorted(catalog.COMPLEXES)
DGLAS = {name: catalog.end_dgla_of(name) for name in NAMES}
PLUS, MINUS = DeformationConfig(I_HBAR), DeformationConfig(-I_HBAR)


def sgn(p):
    return -1 if p % 2 else 1


def triple(seed):
    rng = random.Random(seed)
    L = DGLAS[NAMES[seed % len(NAMES)]]
    return L, tuple(random_lie_homogeneous(rng, L) for _ in range(3))


def map_bracket(phi, alpha):
    """Graded commutator computed on the maps themselves."""
    out = []
    for p in MapSum.of(phi):
        for a in MapSum.of(alpha):
            out += [compose(p, a), compose(a, p).scale(-sgn(p.degree * a.degree))]
    return MapSum(out)


def map_d(phi):
    return MapSum([hom_differential(p) for p in MapSum.of(phi)])


class TestValidation:
    def test_abelian(self):
        assert lie.validate_dgla(catalog.abelian_dgla(2)).ok
        L = lie.abelian([0, 1])
        assert not lie.bracket(L.basis(0), L.basis(1))

    def test_flipped_constant(self):
        L = DGLAS["three_term_complex"]
        (i, j), row = sorted(L.brackets.items())[5]
        rep = lie.validate_dgla(lie.flip_constant(L, i, j, sorted(row)[0]))
        assert not rep.ok
        what, witness = rep.failures[0]
        assert what.startswith("jacobi") and witness

    def test_one_sided_flip_breaks_antisymmetry(self):
        L = DGLAS["two_term_complex"]
        (i, j), row = next((k, r) for k, r in sorted(L.brackets.items()) if k[0] != k[1])
        rep = lie.validate_dgla(lie.flip_constant(L, i, j, sorted(row)[0], both=False))
        assert any(w.startswith("antisymmetry") for w, _ in rep.failures)

    def test_presentation_mismatch(self):
        A, B = lie.abelian([0]), lie.abelian([0])
        with pytest.raises(PresentationMismatch):
            lie.bracket(A.basis(0), B.basis(0))


class TestAgainstMaps:
    @given(seeds())
    def test_bracket_and_differential(self, seed):
        L, (a, b, _) = triple(seed)
        R = L.realization
        assert R.to_maps(lie.bracket(a, b)) == map_bracket(R.to_maps(a), R.to_maps(b))
        assert R.to_maps(L.d(a)) == map_d(R.to_maps(a))

    @given(seeds())
    def test_deformed_bracket(self, seed):
        L, (a, b, _) = triple(seed)
        R = L.realization
        for cfg in (PLUS, MINUS):
            phi, alpha = R.to_maps(a), R.to_maps(b)
            want = map_bracket(phi, alpha) + map_bracket(map_d(phi), map_d(alpha)).scale(cfg.lam * sgn(a.degree()))
            assert R.to_maps(lie.deformed_bracket(a, b, cfg)) == want


class TestJacobi:
    @given(seeds())
    def test_plain_jacobiator_vanishes(self, seed):
        _, (a1, a2, a3) = triple(seed)
        assert not lie.jacobiator(a1, a2, a3)

    @given(seeds())
    def test_closed_inputs(self, seed):
        L, (a1, a2, a3) = triple(seed)
        c1, c2, c3 = L.d(a1), L.d(a2), L.d(a3)
        assert lie.deformed_bracket(c1, c2) == lie.bracket(c1, c2)
        assert not lie.jacobiator(c1, c2, c3, use_deformed=True)
        assert lie.exactness_check(c1, c2, c3) == (L.zero(), L.zero(), L.zero())

    @given(seeds())
    def test_no_second_order_term(self, seed):
        _, (a1, a2, a3) = triple(seed)
        J = lie.jacobiator(a1, a2, a3, use_deformed=True)
        assert all(c.hbar_coefficient(2).re == 0 == c.hbar_coefficient(2).im for c in J.coeffs.values())
        assert all(max(c.eps_exponents(), default=0) <= 2 for c in J.coeffs.values())

    @given(seeds())
    def test_cyclic_invariance(self, seed):
        _, (a1, a2, a3) = triple(seed)
        J = lambda x, y, z: lie.jacobiator(x, y, z, use_deformed=True)  # noqa: E731
        P = lambda x, y, z: lie.defect_primitive(x, y, z, signs="cyclic")  # noqa: E731
        assert J(a2, a3, a1) == J(a1, a2, a3)
        assert P(a2, a3, a1) == P(a1, a2, a3)


class TestPrimitive:
    @given(seeds())
    def test_cyclic_signs_are_exact(self, seed):
        _, (a1, a2, a3) = triple(seed)
        for cfg in (PLUS, MINUS):
            assert not lie.exactness_check(a1, a2, a3, cfg, signs="cyclic")[2]

    @given(seeds())
    def test_verbatim_signs_exact_when_a2_a3_even(self, seed):
        _, (a1, a2, a3) = triple(seed)
        residual = lie.exactness_check(a1, a2, a3)[2]
        if (a2.degree() + a3.degree()) % 2 == 0:
            assert not residual

    def test_verbatim_signs_counterexample(self):
        # |a2| + |a3| odd: the transcribed fifth sign leaves a residual
        L = DGLAS["zigzag_complex"]
        a1 = -L.basis(0)
        a2 = L.element({3: -2, 4: 1, 5: -2})
        a3 = L.basis(13).scale(-3)
        defect, image, residual = lie.exactness_check(a1, a2, a3)
        assert residual == L.element({8: 16 * I_HBAR, 9: 16 * I_HBAR})
        assert not lie.exactness_check(a1, a2, a3, signs="cyclic")[2]

    def test_abelian_and_bad_mode(self):
        L = catalog.abelian_dgla(1)
        e0, e1 = L.basis(0), L.basis(1)
        assert not lie.defect_primitive(e0, e0, e1)
        with pytest.raises(ValueError):
            lie.defect_primitive(e0, e0, e1, signs="other")

    @given(seeds(), seeds())
    def test_multilinear(self, s1, s2):
        L, (a1, a2, a3) = triple(s1)
        b1 = random_lie_homogeneous(random.Random(s2), L, degree=a1.degree())
        lhs = lie.defect_primitive(a1 + b1.scale(3), a2, a3)
        assert lhs == lie.defect_primitive(a1, a2, a3) + lie.defect_primitive(b1, a2, a3).scale(3)


class TestAntisymmetry:
    @given(seeds())
    def test_plain_bracket(self, seed):
        _, (a, b, _) = triple(seed)
        assert not lie.antisymmetry_defect(a, b)

    @given(seeds())
    def test_deformed_bracket_defect(self, seed):
        # [a,b]^d + (-1)^{|a||b|}[b,a]^d = 2 lam (-1)^{|a|} [Qa, Qb]
        L, (a, b, _) = triple(seed)
        for cfg in (PLUS, MINUS):
            got = lie.antisymmetry_defect(a, b, use_deformed=True, cfg=cfg)
            assert got == lie.bracket(L.d(a), L.d(b)).scale(2 * cfg.lam * sgn(a.degree()))
