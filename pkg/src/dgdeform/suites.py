"""Seeded identity suites.

Each suite draws its trials from ``random.Random(f"{seed}/{name}/{trial}")``
so a single trial can be regenerated without replaying the others, and every
failure carries a standalone script that reproduces it with ``dgdeform run``.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from . import coalgebra as co
from . import complexes as cx
from . import deform as df
from . import dgla as lie
from .catalog import COMPLEXES, catalog_get
from .errors import NotChainMap, NotCoalgebraMap, UnknownSuite
from .graded import AlgebraMorphism, Derivation, GradedContext, mul
from .sampling import (
    DEFAULT_BOUNDS,
    Bounds,
    random_complex,
    random_element,
    random_homogeneous,
    random_lie_homogeneous,
    random_map,
    useful_degrees,
)
from .scalar import I_HBAR, Scalar
from .script import (
    absorption_laws,
    coalgebra_statements,
    complex_statement,
    lambda_statement,
    map_statement,
    run_script,
)


@dataclass
class Failure:
    trial: int
    message: str
    script: str


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, trial: int, message: str, script: str) -> None:
        self.failures.append(Failure(trial, message, script))

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.checks} checks, {len(self.failures)} failures ({self.runtime:.2f} s)"

    def text(self, max_failures: int = 3) -> str:
        lines = [self.summary()]
        lines += [f"  note: {n}" for n in self.notes]
        for f in self.failures[:max_failures]:
            lines.append(f"  trial {f.trial}: {f.message}")
            lines.append("  reproduce with:")
            lines += ["    " + x for x in f.script.rstrip().splitlines()]
        if len(self.failures) > max_failures:
            lines.append(f"  ... {len(self.failures) - max_failures} more failures")
        return "\n".join(lines)


@dataclass
class Params:
    n: int | None = None
    trials: int | None = None
    seed: int = 0
    truncation: int | None = None
    lam: Scalar | None = None
    signs: str = "verbatim"
    bounds: Bounds = DEFAULT_BOUNDS


def _rng(p: Params, name: str, trial: int) -> random.Random:
    return random.Random(f"{p.seed}/{name}/{trial}")


def _lambdas(p: Params) -> list[Scalar]:
    return [p.lam] if p.lam is not None else [I_HBAR, -I_HBAR]


def _script(*lines: str) -> str:
    return "\n".join(lines) + "\n"


def _lets(**values) -> list[str]:
    return [f"let {k} = {v}" for k, v in values.items()]


# DGA suites --------------------------------------------------------------
def suite_assoc_derham(p: Params, rep: SuiteReport) -> None:
    n = p.n or 3
    ctx, d = catalog_get("derham", n=n).ctx, catalog_get("derham", n=n).d
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        a, b, c = (random_element(rng, ctx, p.bounds) for _ in range(3))
        for lam in _lambdas(p):
            rep.checks += 1
            w = df.check_associativity(a, b, c, d, df.DeformationConfig(lam))
            if w:
                rep.fail(t, f"associativity defect {w}", _script(
                    f"use derham {n}", lambda_statement(lam), *_lets(a=a, b=b, c=c), "check assoc deformed a b c"))


def suite_unit_derivation(p: Params, rep: SuiteReport) -> None:
    n = p.n or 3
    inst = catalog_get("derham", n=n)
    ctx, d = inst.ctx, inst.d
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        a = random_homogeneous(rng, ctx, p.bounds)
        b = random_element(rng, ctx, p.bounds)
        for lam in _lambdas(p):
            cfg = df.DeformationConfig(lam)
            rep.checks += 1
            left, right = df.unit_defects(a, d, cfg)
            w = df.derivation_defect(a, b, d, cfg)
            if left or right or w:
                rep.fail(t, f"unit {left} / {right}, derivation {w}", _script(
                    f"use derham {n}", lambda_statement(lam), *_lets(a=a, b=b), "check unit a", "check leibniz a b"))


def suite_exactness_rewrites(p: Params, rep: SuiteReport) -> None:
    n = p.n or 3
    inst = catalog_get("derham", n=n)
    ctx, d = inst.ctx, inst.d
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        a, b = random_element(rng, ctx, p.bounds), random_element(rng, ctx, p.bounds)
        for lam in _lambdas(p):
            cfg = df.DeformationConfig(lam)
            rep.checks += 1
            corr = df.correction_term(a, b, d, cfg)
            w1, w2 = df.exactness_witnesses(a, b, d, cfg)
            if corr != w1 or corr != w2:
                rep.fail(t, f"rewrites differ: {corr - w1} / {corr - w2}", _script(
                    f"use derham {n}", lambda_statement(lam), *_lets(a=a, b=b), "check exact a b"))


def suite_weak_pauli(p: Params, rep: SuiteReport) -> None:
    n = p.n or 3
    inst = catalog_get("derham", n=n)
    ctx, d = inst.ctx, inst.d
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        a, b = random_homogeneous(rng, ctx, p.bounds), random_homogeneous(rng, ctx, p.bounds)
        ea = random_homogeneous(rng, ctx, p.bounds, degrees=[0, 2])
        eb = random_homogeneous(rng, ctx, p.bounds, degrees=[0, 2])
        for lam in _lambdas(p):
            cfg = df.DeformationConfig(lam)
            rep.checks += 2
            w = df.weak_pauli_check(a, b, d, cfg)
            if w:
                rep.fail(t, f"conjugation defect {w}", _script(
                    f"use derham {n}", lambda_statement(lam), *_lets(a=a, b=b), "check pauli a b"))
            closure = df.parity_closure_check(ea, eb, d, cfg)
            star = df.weak_pauli_check(ea, eb, d, cfg)
            if not closure.ok or star:
                rep.fail(t, f"even closure {closure} / {star}", _script(
                    f"use derham {n}", lambda_statement(lam), *_lets(a=ea, b=eb),
                    "check closure a b", "check pauli a b"))


def suite_s_equivalence(p: Params, rep: SuiteReport) -> None:
    n = p.n or 3
    inst = catalog_get("derham", n=n)
    ctx, d = inst.ctx, inst.d
    lam = p.lam if p.lam is not None else I_HBAR
    cfg = df.DeformationConfig(lam)
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        a = random_homogeneous(rng, ctx, p.bounds, degrees=[0, 2])
        b = random_homogeneous(rng, ctx, p.bounds, degrees=[0, 2])
        rep.checks += 1
        w = df.s_equivalence_check(a, b, d, cfg)
        if w:
            rep.fail(t, f"S^-1(Sa*Sb) - a*d b = {w}", _script(
                f"use derham {n}", lambda_statement(lam), *_lets(a=a, b=b), "check s-equiv a b"))
    if rep.failures:
        rep.notes.append("with e^2 = h/i the transform reproduces the product for lam = -i*h; rerun with --lambda -ih")


def suite_moyal_weyl(p: Params, rep: SuiteReport) -> None:
    inst = catalog_get("weyl_pair")
    ctx, pairs = inst.ctx, inst.pairs
    N = p.truncation if p.truncation is not None else 3
    cfg = df.DeformationConfig(I_HBAR, N)
    q, pp = ctx.gen("q"), ctx.gen("p")
    rep.checks += 1
    comm = df.moyal_weyl_mul(q, pp, pairs, cfg) - df.moyal_weyl_mul(pp, q, pairs, cfg)
    want = ctx.scalar(I_HBAR) if N >= 1 else ctx.zero()
    if comm != want:
        rep.fail(-1, f"q*p - p*q = {comm}", _script(
            "use weyl_pair", f"set truncate {N}", "show star(q, p) - star(p, q)"))
    # polynomial degree <= 4, no h in the inputs
    bounds = Bounds(p.bounds.max_terms, min(4, p.bounds.max_word), p.bounds.max_coeff, hbar_terms=False)
    for t in range(p.trials or 100):
        rng = _rng(p, rep.name, t)
        a, b, c = (random_element(rng, ctx, bounds) for _ in range(3))
        rep.checks += 1
        w = df.moyal_associativity_defect(a, b, c, pairs, cfg)
        if w:
            rep.fail(t, f"associativity defect {w}", _script(
                "use weyl_pair", f"set truncate {N}", *_lets(a=a, b=b, c=c), "check moyal-assoc a b c"))


# complexes -------------------------------------------------------------
def suite_complexes(p: Params, rep: SuiteReport) -> None:
    for t in range(p.trials or 200):
        rng = _rng(p, rep.name, t)
        Cs = [random_complex(rng, name=f"C{k}") for k in range(4)]
        maps = []
        for k in range(3):
            src, tgt = Cs[k], Cs[k + 1]
            r = rng.choice(useful_degrees(src, tgt))
            maps.append(random_map(rng, src, tgt, r))
        beta, alpha, phi = maps
        for lam in _lambdas(p):
            cfg = df.DeformationConfig(lam)
            rep.checks += 1
            w = cx.deformed_compose(cx.deformed_compose(phi, alpha, cfg), beta, cfg) - cx.deformed_compose(
                phi, cx.deformed_compose(alpha, beta, cfg), cfg)
            bad = [label for label, got, want in absorption_laws(phi, cfg) if got != want]
            if w or bad:
                rep.fail(t, f"associativity defect {w}; absorption failures {bad}", _script(
                    *(complex_statement(C, C.name) for C in Cs),
                    map_statement(beta, "beta", "C0", "C1"),
                    map_statement(alpha, "alpha", "C1", "C2"),
                    map_statement(phi, "phi", "C2", "C3"),
                    lambda_statement(lam),
                    "check compose-assoc phi alpha beta",
                    "check absorb phi",
                ))


# DGLA ------------------------------------------------------------------
_DGLA_CACHE: dict[str, lie.DglaPresentation] = {}


def _end_dgla(name: str) -> lie.DglaPresentation:
    if name not in _DGLA_CACHE:
        _DGLA_CACHE[name] = catalog_get(f"end_dgla_of_{name}")
    return _DGLA_CACHE[name]


def suite_dgla_exactness(p: Params, rep: SuiteReport) -> None:
    names = sorted(COMPLEXES)
    patterns: Counter = Counter()
    for t in range(p.trials or 200):
        name = names[t % len(names)]
        L = _end_dgla(name)
        rng = _rng(p, rep.name, t)
        a1, a2, a3 = (random_lie_homogeneous(rng, L) for _ in range(3))
        for lam in ([p.lam] if p.lam is not None else [I_HBAR]):
            cfg = df.DeformationConfig(lam)
            rep.checks += 1
            defect, image, residual = lie.exactness_check(a1, a2, a3, cfg, p.signs)
            if residual:
                degs = (a1.degree(), a2.degree(), a3.degree())
                patterns[degs] += 1
                mode = " cyclic" if p.signs == "cyclic" else ""
                rep.fail(t, f"{name}, degrees {degs}: residual {residual}", _script(
                    f"use end_dgla_of_{name} as L", lambda_statement(lam), *_lets(a1=a1, a2=a2, a3=a3),
                    f"check exactness a1 a2 a3{mode}"))
    if patterns:
        odd = sum(c for (x, y, z), c in patterns.items() if (y + z) % 2)
        rep.notes.append(
            f"failing degree patterns {dict(sorted(patterns.items()))}; "
            f"{odd} of {sum(patterns.values())} have |a2|+|a3| odd; --signs cyclic removes them")


# coalgebras ------------------------------------------------------------
def _random_basis_change(rng: random.Random, degrees) -> list[list[int]]:
    """Integer matrix, unipotent within each degree block, after a random in-degree permutation."""
    n = len(degrees)
    g = [[0] * n for _ in range(n)]
    by_deg: dict[int, list[int]] = {}
    for i, x in enumerate(degrees):
        by_deg.setdefault(x, []).append(i)
    for block in by_deg.values():
        perm = block[:]
        rng.shuffle(perm)
        for a, i in enumerate(block):
            g[i][perm[a]] = 1
            for b in range(a + 1, len(block)):
                g[i][perm[b]] = rng.randint(-2, 2)
    return g


def _bases() -> list[tuple[str, co.CoalgebraPresentation]]:
    return [("dual_4dim", catalog_get("dual_4dim")), ("dual_truncated", catalog_get("dual_truncated", n=2))]


def _coassoc_defects(C, cfg) -> list:
    out = []
    for i in range(C.dim):
        w, l_ref, r_ref = co.coassociativity_check(C.basis(i), cfg)
        if w or l_ref or r_ref:
            out.append((i, w, l_ref, r_ref))
    return out


def suite_coalgebra_coassoc(p: Params, rep: SuiteReport) -> None:
    bases = _bases()
    for lam in _lambdas(p):
        cfg = df.DeformationConfig(lam)
        for label, C in bases:
            rep.checks += 1
            bad = _coassoc_defects(C, cfg)
            if bad:
                rep.fail(-1, f"{label}: {bad[0]}", _script(
                    *coalgebra_statements(C, "C"), lambda_statement(lam), "check coassoc C"))
    for t in range(p.trials or 20):
        rng = _rng(p, rep.name, t)
        label, C = bases[t % len(bases)]
        g = _random_basis_change(rng, C.degrees)
        D, _ = co.transport(C, g, q_scale=rng.choice([1, 2, -1, Scalar.parse("1/3")]), label="D")
        for lam in _lambdas(p):
            cfg = df.DeformationConfig(lam)
            rep.checks += 1
            valid = co.validate_coalgebra(D)
            bad = _coassoc_defects(D, cfg)
            if not valid.ok or bad:
                rep.fail(t, f"perturbed {label}: {valid if not valid.ok else bad[0]}", _script(
                    *coalgebra_statements(D, "D"), lambda_statement(lam), "check coalgebra D", "check coassoc D"))


def suite_duality(p: Params, rep: SuiteReport) -> None:
    for lam in _lambdas(p):
        cfg = df.DeformationConfig(lam)
        for label, C in _bases():
            rep.checks += 1
            bad = co.duality_defects(C, cfg)
            if bad:
                use = "use truncated_dga_4dim as A" if label == "dual_4dim" else "use truncated_dga n=2 as A"
                rep.fail(-1, f"{label}: {len(bad)} coefficients differ", _script(
                    use, "dualize C", lambda_statement(lam), "check duality C"))
    rep.notes.append("the 4-dim instance has no surviving deformation term (every da*db lies in y^2 = 0); "
                     "the 16-dim instance exercises it")


def suite_functoriality(p: Params, rep: SuiteReport) -> None:
    A, B = catalog_get("derham", n=1), catalog_get("derham", n=2)
    phi = AlgebraMorphism(A.ctx, B.ctx, {"t": B.ctx.gen("t1"), "dt": B.ctx.gen("dt1")})
    for t in range(p.trials or 100):
        rng = _rng(p, rep.name, t)
        a, b = random_element(rng, A.ctx, p.bounds), random_element(rng, A.ctx, p.bounds)
        for lam in _lambdas(p):
            rep.checks += 1
            r = df.morphism_functoriality_check(phi, a, b, A.d, B.d, df.DeformationConfig(lam))
            if not r.ok:
                rep.fail(t, str(r), _script(
                    "use derham 1 as A", "use derham 2 as B", "morphism phi from A to B: t -> t1, dt -> dt1",
                    "set context A", lambda_statement(lam), *_lets(a=a, b=b), "check functor phi a b"))
    for t, (label, C) in enumerate(_bases()):
        rng = _rng(p, rep.name + "/co", t)
        g = _random_basis_change(rng, C.degrees)
        D, psi = co.transport(C, g, label="D")
        for lam in _lambdas(p):
            for i in range(C.dim):
                rep.checks += 1
                r = co.comorphism_functoriality_check(psi, C, D, C.basis(i), df.DeformationConfig(lam))
                if not r.ok:
                    mat = "[" + "; ".join(" ".join(str(g[i][j]) for i in range(C.dim)) for j in range(C.dim)) + "]"
                    rep.fail(t, f"{label} relabeling: {r}", _script(
                        *coalgebra_statements(C, "C"), *coalgebra_statements(D, "D"),
                        f"comap psi: C -> D {mat}", lambda_statement(lam), f"check comorphism psi C[{i}]"))


def broken_differential() -> tuple[GradedContext, Derivation]:
    """``x`` odd, ``y`` even with ``D x = y``, ``D y = x*y``, so ``D^2 x = x*y != 0``."""
    ctx = catalog_get("truncated_dga_4dim").ctx
    D = Derivation(ctx, 1, {"x": ctx.gen("y"), "y": mul(ctx.gen("x"), ctx.gen("y"))}, name="D")
    return ctx, D


def suite_negative_controls(p: Params, rep: SuiteReport) -> None:
    # 1. a derivation with D^2 != 0 breaks associativity somewhere on small monomials
    ctx, D = broken_differential()
    probes = [ctx.one()] + ctx.gens() + [mul(ctx.gen("x"), ctx.gen("y"))]
    rep.checks += 1
    witness = None
    for a in probes:
        for b in probes:
            for c in probes:
                w = df.check_associativity(a, b, c, D)
                if w:
                    witness = (a, b, c, w)
                    break
            if witness:
                break
        if witness:
            break
    if witness is None:
        rep.fail(0, "broken differential left associativity intact", _script(
            "context A", "generator x deg 1", "generator y deg 2",
            "derivation D: x -> y, y -> x*y", "set diff D", "check assoc deformed x x x"))
    else:
        rep.notes.append(f"broken d: assoc({witness[0]}, {witness[1]}, {witness[2]}) = {witness[3]}")
    # 2. a map that does not intertwine the differentials is rejected
    A, B = catalog_get("derham", n=1), catalog_get("derham", n=2)
    bad = AlgebraMorphism(A.ctx, B.ctx, {"t": B.ctx.gen("t1"), "dt": B.ctx.gen("dt2")})
    rep.checks += 1
    try:
        df.morphism_functoriality_check(bad, A.ctx.gen("t"), A.ctx.gen("t"), A.d, B.d)
        rep.fail(1, "non-chain map accepted", _script(
            "use derham 1 as A", "use derham 2 as B", "morphism phi from A to B: t -> t1, dt -> dt2",
            "check chain-map phi"))
    except NotChainMap as exc:
        rep.notes.append(f"non-chain map rejected: {exc}")
    # 3. a perturbed coproduct constant fails validation
    C = catalog_get("dual_4dim")
    new = {i: dict(r) for i, r in C.coproduct.items()}
    key = sorted(new[3])[1]
    new[3][key] = -new[3][key]
    P = C.replace(coproduct=new)
    rep.checks += 1
    v = co.validate_coalgebra(P)
    if v.ok:
        rep.fail(2, "perturbed coalgebra passed validation", _script(
            *coalgebra_statements(P, "P"), "check coalgebra P"))
    else:
        rep.notes.append(f"perturbed coalgebra: {v.failures[0][0]}: {v.failures[0][1]}")
    # 4. a codifferential with Q^2 != 0 breaks deformed coassociativity
    C16 = catalog_get("dual_truncated", n=2)
    codiff = {i: dict(r) for i, r in C16.codifferential.items()}
    for i in range(C16.dim):
        row = codiff.setdefault(i, {})
        for j in range(C16.dim):
            if C16.degrees[j] == C16.degrees[i] + 1 and j not in row:
                row[j] = 1
                break
    Q = C16.replace(codifferential=codiff)
    rep.checks += 1
    bad_q = _coassoc_defects(Q, df.DEFAULT)
    if not bad_q:
        rep.fail(3, "square-nonzero codifferential kept coassociativity", _script(
            *coalgebra_statements(Q, "Q"), "check coassoc Q"))
    else:
        rep.notes.append(f"broken codifferential: coassociativity defect on e{bad_q[0][0]}")
    # 5. a flipped bracket constant breaks Jacobi
    L = _end_dgla("three_term_complex")
    (i, j), row = sorted(L.brackets.items())[5]
    k = sorted(row)[0]
    rep.checks += 1
    v = lie.validate_dgla(lie.flip_constant(L, i, j, k))
    if v.ok:
        rep.fail(4, "flipped structure constant passed validation", "")
    else:
        rep.notes.append(f"flipped bracket: {v.failures[0][0]}")
    # 6. a degree-breaking coalgebra map is rejected
    rep.checks += 1
    try:
        co.comorphism_functoriality_check({0: {1: 1}}, C, C, C.basis(0))
        rep.fail(5, "degree-breaking coalgebra map accepted", "")
    except NotCoalgebraMap as exc:
        rep.notes.append(f"degree-breaking comap rejected: {exc.reason}")


# golden scripts --------------------------------------------------------
DEMOS = ("dga_demo", "complexes_demo", "coalgebra_demo")


def demo_text(name: str, suffix: str) -> str:
    return resources.files("dgdeform").joinpath("demos").joinpath(f"{name}.{suffix}").read_text(encoding="utf-8")


def suite_cli_golden(p: Params, rep: SuiteReport) -> None:
    for t, name in enumerate(DEMOS):
        rep.checks += 1
        out, failures = run_script(demo_text(name, "dg"))
        want = demo_text(name, "out")
        if out != want or failures:
            rep.fail(t, f"{name}: output differs from golden file ({failures} failed checks)", demo_text(name, "dg"))
    rep.checks += 1
    _, failures = run_script("use derham 2\ncheck s-equiv t1 t2\n")
    if failures != 1:
        rep.fail(len(DEMOS), "a failing check was not counted", "use derham 2\ncheck s-equiv t1 t2\n")


SUITES: dict[str, Callable[[Params, SuiteReport], None]] = {
    "assoc-derham": suite_assoc_derham,
    "unit-and-derivation": suite_unit_derivation,
    "exactness-rewrites": suite_exactness_rewrites,
    "weak-pauli": suite_weak_pauli,
    "s-equivalence": suite_s_equivalence,
    "moyal-weyl-weyl-pair": suite_moyal_weyl,
    "complexes-deformed-compose": suite_complexes,
    "dgla-exactness": suite_dgla_exactness,
    "coalgebra-coassoc": suite_coalgebra_coassoc,
    "duality-oracle": suite_duality,
    "functoriality": suite_functoriality,
    "negative-controls": suite_negative_controls,
    "cli-golden": suite_cli_golden,
}


def run_suite(
    name: str,
    n: int | None = None,
    trials: int | None = None,
    seed: int = 0,
    truncation: int | None = None,
    lam: Scalar | None = None,
    signs: str = "verbatim",
    bounds: Bounds = DEFAULT_BOUNDS,
) -> SuiteReport:
    fn = SUITES.get(name)
    if fn is None:
        raise UnknownSuite(name)
    rep = SuiteReport(name)
    start = time.perf_counter()
    fn(Params(n, trials, seed, truncation, lam, signs, bounds), rep)
    rep.runtime = time.perf_counter() - start
    return rep
