import pytest
from hypothesis import given

from dgdeform import deform as df
from dgdeform.catalog import catalog_get
from dgdeform.deform import DeformationConfig, deformed_mul
from dgdeform.errors import (
    InvalidDifferential,
    MissingTruncationOrder,
    MixedParityInput,
    NonCommutingDerivations,
    NonHomogeneous,
    NotChainMap,
    OddComponentPresent,
)
from dgdeform.graded import AlgebraMorphism, Derivation, GradedContext, de_rham_context
from dgdeform.scalar import EPS, HBAR, I, I_HBAR

from conftest import element_of, seeds

PLUS, MINUS = DeformationConfig(I_HBAR), DeformationConfig(-I_HBAR)
XY = GradedContext([("x", 1), ("y", 2)])
D_XY = Derivation(XY, 1, {"x": XY.gen("y")})
CTX3, D3 = de_rham_context(3)


def series_oracle(a, b, d, lam):
    """The same product through the exponential formula with the single pair (d, d)."""
    return df.moyal_weyl_mul(a, b, [(d, d)], DeformationConfig(truncation_order=12), coefficient=lam)


class TestExamples:
    def test_unit(self):
        a = XY.parse("x + 2*y^2")
        assert deformed_mul(XY.one(), a, D_XY) == a

    def test_exact_boson(self):
        x, y = XY.gen("x"), XY.gen("y")
        xx = deformed_mul(x, x, D_XY)
        assert xx == (y * y).scale(-I_HBAR)
        # (h/i) d(x dx)
        assert xx == D_XY(x * D_XY(x)).scale(HBAR * -I)

    def test_de_rham(self, derham2):
        ctx, d = derham2.ctx, derham2.d
        t1, t2 = ctx.gen("t1"), ctx.gen("t2")
        assert deformed_mul(t1, t2, d) == ctx.parse("t1*t2 + i*h*dt1*dt2")
        assert deformed_mul(t1, t2, d, MINUS) == ctx.parse("t1*t2 - i*h*dt1*dt2")

    def test_witnesses_by_hand(self):
        x = XY.gen("x")
        w1, w2 = df.exactness_witnesses(x, x, D_XY)
        assert w1 == w2 == XY.parse("-i*h*y^2")
        closed = XY.gen("y")
        assert df.exactness_witnesses(closed, closed, D_XY) == (XY.zero(), XY.zero())

    def test_broken_differential_rejected(self):
        ctx = GradedContext([("x", 1), ("y", 2), ("z", 3)])
        bad = Derivation(ctx, 1, {"x": ctx.gen("y"), "y": ctx.gen("z")})
        with pytest.raises(InvalidDifferential):
            deformed_mul(ctx.gen("x"), ctx.gen("x"), bad)

    def test_zero_lambda_rejected(self):
        with pytest.raises(ValueError):
            DeformationConfig(0 * HBAR)


class TestAgainstSeries:
    @given(seeds(), seeds())
    def test_single_pair_series_terminates(self, s1, s2):
        a, b = element_of(CTX3, s1), element_of(CTX3, s2)
        for cfg in (PLUS, MINUS):
            assert deformed_mul(a, b, D3, cfg) == series_oracle(a, b, D3, cfg.lam)


class TestIdentities:
    @given(seeds(), seeds(), seeds())
    def test_associative(self, s1, s2, s3):
        a, b, c = (element_of(CTX3, s) for s in (s1, s2, s3))
        for cfg in (PLUS, MINUS):
            assert not df.check_associativity(a, b, c, D3, cfg)

    @given(seeds())
    def test_unit_both_sides(self, s):
        a = element_of(CTX3, s)
        assert df.unit_defects(a, D3) == (CTX3.zero(), CTX3.zero())

    @given(seeds(), seeds())
    def test_d_is_a_derivation(self, s1, s2):
        a, b = element_of(CTX3, s1), element_of(CTX3, s2)
        assert not df.derivation_defect(a, b, D3)

    @given(seeds(), seeds())
    def test_exactness_rewrites(self, s1, s2):
        a, b = element_of(CTX3, s1), element_of(CTX3, s2)
        corr = deformed_mul(a, b, D3) - a * b
        assert df.exactness_witnesses(a, b, D3) == (corr, corr)

    @given(seeds(), seeds(), seeds())
    def test_correction_blind_to_closed_shifts(self, s1, s2, s3):
        a, b = element_of(CTX3, s1, homogeneous=True), element_of(CTX3, s2)
        w = element_of(CTX3, s3, degrees=[a.degree() - 1]) if a.degree() > 0 else CTX3.zero()
        z = D3(w)
        assert df.correction_term(a + z, b, D3) == df.correction_term(a, b, D3)

    @given(seeds(), seeds())
    def test_h_weighted_degree(self, s1, s2):
        a, b = element_of(CTX3, s1, homogeneous=True), element_of(CTX3, s2, homogeneous=True)
        a, b = a.truncate(0), b.truncate(0)
        if not (a and b):
            return
        prod = deformed_mul(a, b, D3)
        assert prod.hbar_weighted_degrees() <= {a.degree() + b.degree()}


class TestWeakPauli:
    @given(seeds(), seeds())
    def test_conjugation_identity(self, s1, s2):
        a, b = element_of(CTX3, s1, homogeneous=True), element_of(CTX3, s2, homogeneous=True)
        for cfg in (PLUS, MINUS):
            assert not df.weak_pauli_check(a, b, D3, cfg)

    def test_reduces_to_graded_commutativity(self):
        ctx = GradedContext([("x", 1), ("y", 1)])
        zero_d = Derivation(ctx, 1, {})
        x, y = ctx.gen("x"), ctx.gen("y")
        assert not df.weak_pauli_check(x, y, zero_d)
        assert deformed_mul(x, y, zero_d) == -deformed_mul(y, x, zero_d)

    def test_preconditions(self):
        with pytest.raises(NonHomogeneous):
            df.weak_pauli_check(CTX3.parse("t1 + dt1"), CTX3.gen("t2"), D3)
        with pytest.raises(ValueError):
            df.weak_pauli_check(CTX3.gen("t1"), CTX3.gen("t2"), D3, DeformationConfig(HBAR))

    def test_parity_closure(self):
        f1, f2 = CTX3.parse("t1*dt2"), CTX3.parse("dt3 + t2*dt1")
        b1 = CTX3.parse("t1*t2 + dt1*dt3")
        assert df.parity_closure_check(f1, f2, D3).ok
        rep = df.parity_closure_check(b1, f1, D3)
        assert rep.ok and all(CTX3.monomial_degree(m) % 2 for m in deformed_mul(b1, f1, D3).terms)
        assert df.parity_closure_check(CTX3.one(), f1, D3).ok
        with pytest.raises(MixedParityInput):
            df.parity_closure_check(CTX3.parse("t1 + dt1"), f1, D3)


class TestSTransform:
    def test_root_squares_to_h_over_i(self):
        assert EPS * EPS == HBAR * -I

    @given(seeds(), seeds())
    def test_matches_minus_ih(self, s1, s2):
        a = element_of(CTX3, s1, degrees=[0, 2])
        b = element_of(CTX3, s2, degrees=[0, 2])
        assert not df.s_equivalence_check(a, b, D3, MINUS)

    @given(seeds(), seeds())
    def test_defect_against_plus_ih(self, s1, s2):
        a = element_of(CTX3, s1, degrees=[0, 2])
        b = element_of(CTX3, s2, degrees=[0, 2])
        assert df.s_equivalence_check(a, b, D3, PLUS) == (D3(a) * D3(b)).scale(-2 * I_HBAR)

    def test_trivial_and_rejected(self):
        one = CTX3.one()
        assert not df.s_equivalence_check(one, one, D3)
        with pytest.raises(OddComponentPresent):
            df.s_equivalence_check(CTX3.gen("dt1"), one, D3)

    def test_middle_term_for_odd_a(self):
        a, b = CTX3.gen("dt1"), CTX3.gen("t2")
        full = df.s_conjugated_product(a, b, D3)
        assert df.s_middle_term(a, b, D3) == (a * D3(b)).scale(2 * EPS)
        assert full - df.s_middle_term(a, b, D3) == deformed_mul(a, b, D3, MINUS)


class TestFunctoriality:
    def test_inclusion(self):
        src, d1 = de_rham_context(1)
        tgt, d2 = de_rham_context(2)
        inc = AlgebraMorphism(src, tgt, {"t": tgt.gen("t1"), "dt": tgt.gen("dt1")})
        a, b = src.parse("t^2 + 3*dt"), src.parse("t*dt - 2*t")
        assert df.morphism_functoriality_check(inc, a, b, d1, d2).ok
        ident = AlgebraMorphism.identity(src)
        assert df.morphism_functoriality_check(ident, a, b, d1, d1).ok

    def test_non_chain_map(self):
        src, d1 = de_rham_context(1)
        tgt, d2 = de_rham_context(2)
        bad = AlgebraMorphism(src, tgt, {"t": tgt.gen("t1"), "dt": tgt.gen("dt2")})
        with pytest.raises(NotChainMap) as exc:
            df.morphism_functoriality_check(bad, src.gen("t"), src.gen("t"), d1, d2)
        assert exc.value.generator == "t"


class TestMoyalWeyl:
    def setup_method(self):
        self.weyl = catalog_get("weyl_pair")
        self.ctx = self.weyl.ctx

    def star(self, a, b, n=3):
        return df.moyal_weyl_mul(a, b, self.weyl.pairs, DeformationConfig(truncation_order=n))

    def test_commutator(self):
        q, p = self.ctx.gen("q"), self.ctx.gen("p")
        for n in (1, 2, 3):
            assert self.star(q, p, n) - self.star(p, q, n) == self.ctx.scalar(I_HBAR)

    def test_order_zero_is_plain(self):
        a, b = self.ctx.parse("q^2 + p"), self.ctx.parse("q*p^3")
        assert self.star(a, b, 0) == a * b

    def test_second_order_by_hand(self):
        # coefficient c = -ih on d/dp (x) d/dq: p^2 * q^2 picks up 4c pq + 2c^2
        p2, q2 = self.ctx.parse("p^2"), self.ctx.parse("q^2")
        assert self.star(p2, q2) == self.ctx.parse("q^2*p^2 - 4i*h*q*p - 2*h^2")

    @given(seeds(), seeds(), seeds())
    def test_associative_to_order(self, s1, s2, s3):
        from conftest import SMALL

        a, b, c = (element_of(self.ctx, s, bounds=SMALL).truncate(0) for s in (s1, s2, s3))
        assert not df.moyal_associativity_defect(a, b, c, self.weyl.pairs, DeformationConfig(truncation_order=3))

    def test_errors(self):
        q = self.ctx.gen("q")
        with pytest.raises(MissingTruncationOrder):
            df.moyal_weyl_mul(q, q, self.weyl.pairs, DeformationConfig())
        ctx = GradedContext([("q", 0), ("p", 0)])
        D = Derivation(ctx, 0, {"p": ctx.gen("q")})
        E = Derivation(ctx, 0, {"q": ctx.one()})
        with pytest.raises(NonCommutingDerivations):
            df.moyal_weyl_mul(ctx.gen("q"), ctx.gen("p"), [(D, E)], DeformationConfig(truncation_order=1))
