"""A line-oriented script language over the engine.

One statement per line, ``#`` starts a comment.  Statements::

    use <catalog-name> [INT | key=INT]* [as NAME]
    context NAME
    generator NAME deg INT
    diff NAME [deg INT]: g -> expr, g -> expr      (validated differential)
    derivation NAME [deg INT]: g -> expr, ...      (unvalidated)
    morphism NAME from CTX to CTX: g -> expr, ...
    let NAME = expr [deformed]
    show expr [deformed]
    echo any text
    set lambda +ih | -ih | expr
    set diff NAME | set context NAME | set truncate INT | set pairs D E [, D E]*
    complex NAME lo INT dims INT* [: MATRIX, MATRIX, ...]
    map NAME: SRC -> TGT deg INT [: [k] MATRIX, [k] MATRIX, ...]
    dgla NAME degrees INT*
    bracket NAME i j k c          qdiff NAME i k c
    coalgebra NAME degrees INT*
    coproduct NAME i j k c        codiff NAME i j c       counit NAME i c
    dualize NAME [truncate g=INT, ...]
    comap NAME: SRC -> TGT MATRIX
    check KIND args...

Matrices are row-major ``[a b; c d]``.  In expressions ``*`` is the plain
product (composition for maps), ``&`` the deformed one and ``@`` the tensor
product of coalgebra vectors; a trailing ``deformed`` makes ``*`` deformed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Any, Callable

from . import coalgebra as co
from . import complexes as cx
from . import deform as df
from . import dgla as lie
from .catalog import DgaInstance, WeylPair, catalog_get
from .errors import DeformError
from .expr import Environment, Name, ParseError, Parser, evaluate, tokenize
from .graded import AlgebraMorphism, Derivation, Element, GradedContext, mul, validate_differential
from .linear import BasisVector
from .scalar import I_HBAR, Scalar


class ScriptError(DeformError):
    """An error tied to a script location."""

    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, col {col}: {message}")


class ScriptNameError(ScriptError):
    """Use of an undefined name (or redefinition of one)."""


@dataclass
class Statement:
    kind: str
    line: int
    col: int
    data: dict = field(default_factory=dict)


# parsing ---------------------------------------------------------------
def _name(p: Parser, what: str = "a name") -> str:
    return p.expect_kind("name", what).text


def _keyword(p: Parser, word: str) -> None:
    t = p.tok
    if t.kind != "name" or t.text != word:
        p.error(repr(word))
    p.advance()


def _dashed_word(p: Parser) -> str:
    """``s-equiv`` and friends: names joined by ``-``."""
    word = _name(p, "a check name")
    while p.tok.text == "-" and p.toks[p.i + 1].kind == "name" and p.toks[p.i + 1].col == p.tok.col + 1:
        p.advance()
        word += "-" + p.advance().text
    return word


def _ints(p: Parser) -> list[int]:
    out = []
    while p.tok.kind == "num" or (p.tok.text == "-" and p.toks[p.i + 1].kind == "num"):
        out.append(p.expect_int())
    return out


def _matrix(p: Parser):
    """``[a b; c d]`` -> list of rows of expression nodes; ``[]`` is the empty matrix."""
    p.expect("[")
    rows: list[list] = [[]]
    while not p.accept("]"):
        if p.accept(";"):
            rows.append([])
            continue
        if p.at_end():
            p.error("']'")
        rows[-1].append(p.term())
    if rows == [[]]:
        return []
    return rows


def _assignments(p: Parser) -> list[tuple[str, int, Any]]:
    """``g -> expr, g -> expr``; returns ``(name, col, node)`` triples."""
    out = []
    while True:
        t = p.expect_kind("name", "a generator name")
        p.expect("->")
        out.append((t.text, t.col, p.expr()))
        if not p.accept(","):
            return out


def _args(p: Parser) -> list:
    """Juxtaposed expressions, e.g. ``a b (c+d)``."""
    out = []
    while not p.at_end():
        if p.tok.kind == "name" and p.tok.text in ("plain", "deformed", "cyclic", "verbatim"):
            break
        out.append(p.expr())
    return out


def _flag(p: Parser, *words: str) -> str | None:
    if p.tok.kind == "name" and p.tok.text in words:
        return p.advance().text
    return None


def parse_line(text: str, line: int) -> Statement | None:
    code = text.split("#", 1)[0]
    if not code.strip():
        return None
    stripped = code.lstrip()
    col0 = len(code) - len(stripped) + 1
    if stripped.startswith("echo") and (len(stripped) == 4 or stripped[4].isspace()):
        return Statement("echo", line, col0, {"text": stripped[5:].rstrip()})
    p = Parser(tokenize(code, line), line)
    head = p.expect_kind("name", "a statement keyword")
    kind, col = head.text, head.col
    d: dict[str, Any] = {}
    if kind == "use":
        d["name"] = _name(p, "a catalog name")
        d["pos"], d["kw"] = [], {}
        while not p.at_end() and not (p.tok.kind == "name" and p.tok.text == "as"):
            if p.tok.kind == "name":
                key = p.advance().text
                p.expect("=")
                d["kw"][key] = p.expect_int()
            else:
                d["pos"].append(p.expect_int())
        d["as"] = _name(p) if p.accept("as") else None
    elif kind == "context":
        d["name"] = _name(p)
    elif kind == "generator":
        d["name"] = _name(p, "a generator name")
        _keyword(p, "deg")
        d["deg"] = p.expect_int()
    elif kind in ("diff", "derivation"):
        d["name"] = _name(p)
        d["deg"] = p.expect_int() if p.accept("deg") else 1
        p.expect(":")
        d["images"] = _assignments(p)
    elif kind == "morphism":
        d["name"] = _name(p)
        _keyword(p, "from")
        d["src"] = _name(p, "a context name")
        _keyword(p, "to")
        d["tgt"] = _name(p, "a context name")
        p.expect(":")
        d["images"] = _assignments(p)
    elif kind == "let":
        d["name"] = _name(p)
        p.expect("=")
        d["expr"] = p.expr()
        d["deformed"] = bool(_flag(p, "deformed"))
    elif kind == "show":
        d["expr"] = p.expr()
        d["deformed"] = bool(_flag(p, "deformed"))
    elif kind == "set":
        key = _name(p, "a setting")
        d["key"] = key
        if key == "lambda":
            if p.tok.text in ("+", "-") and p.toks[p.i + 1].kind == "name" and p.toks[p.i + 1].text == "ih":
                d["sign"] = p.advance().text
                p.advance()
            else:
                d["expr"] = p.expr()
        elif key in ("diff", "context"):
            d["name"] = _name(p)
        elif key == "truncate":
            d["value"] = p.expect_int()
        elif key == "pairs":
            pairs = []
            while True:
                pairs.append((_name(p), _name(p)))
                if not p.accept(","):
                    break
            d["pairs"] = pairs
        else:
            raise ParseError(line, p.toks[p.i - 1].col, "lambda, diff, context, truncate or pairs", key)
    elif kind == "complex":
        d["name"] = _name(p)
        _keyword(p, "lo")
        d["lo"] = p.expect_int()
        _keyword(p, "dims")
        d["dims"] = _ints(p)
        d["mats"] = []
        if p.accept(":"):
            d["mats"].append(_matrix(p))
            while p.accept(","):
                d["mats"].append(_matrix(p))
    elif kind == "map":
        d["name"] = _name(p)
        p.expect(":")
        d["src"] = _name(p, "a complex name")
        p.expect("->")
        d["tgt"] = _name(p, "a complex name")
        _keyword(p, "deg")
        d["deg"] = p.expect_int()
        d["blocks"] = []
        if p.accept(":"):
            while True:
                p.expect("[")
                k = p.expect_int()
                p.expect("]")
                d["blocks"].append((k, _matrix(p)))
                if not p.accept(","):
                    break
    elif kind in ("dgla", "coalgebra"):
        d["name"] = _name(p)
        _keyword(p, "degrees")
        d["degrees"] = _ints(p)
    elif kind in ("bracket", "coproduct", "qdiff", "codiff", "counit"):
        d["name"] = _name(p)
        n_idx = {"bracket": 3, "coproduct": 3, "qdiff": 2, "codiff": 2, "counit": 1}[kind]
        d["idx"] = [p.expect_int() for _ in range(n_idx)]
        d["coeff"] = p.expr()
    elif kind == "dualize":
        d["name"] = _name(p)
        d["truncate"] = {}
        if p.accept("truncate"):
            while True:
                g = _name(p, "a generator name")
                p.expect("=")
                d["truncate"][g] = p.expect_int()
                if not p.accept(","):
                    break
    elif kind == "comap":
        d["name"] = _name(p)
        p.expect(":")
        d["src"] = _name(p, "a coalgebra name")
        p.expect("->")
        d["tgt"] = _name(p, "a coalgebra name")
        d["matrix"] = _matrix(p)
    elif kind == "check":
        d["what"] = _dashed_word(p)
        d["mode"] = _flag(p, "plain", "deformed")
        d["args"] = _args(p)
        d["mode"] = d["mode"] or _flag(p, "plain", "deformed", "cyclic", "verbatim")
    else:
        raise ParseError(line, col, "a statement keyword", kind)
    if not p.at_end():
        p.error("end of line")
    return Statement(kind, line, col, d)


def parse(text: str) -> list[Statement]:
    """Parse a whole script; raises :class:`~dgdeform.expr.ParseError` on the first bad line."""
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        st = parse_line(line, n)
        if st is not None:
            out.append(st)
    return out


# values ----------------------------------------------------------------
def tensor(a: BasisVector, b: BasisVector):
    """Tensor product of coalgebra vectors (keys concatenate)."""
    if a.pres is not b.pres:
        raise DeformError("tensor product across presentations")
    out: dict = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            key = (ka if isinstance(ka, tuple) else (ka,)) + (kb if isinstance(kb, tuple) else (kb,))
            prev = out.get(key)
            out[key] = va * vb if prev is None else prev + va * vb
    return co.CoTensor(a.pres, out)


def value_text(v) -> str:
    if isinstance(v, cx.MapSum) and len(v.components) == 1:
        return str(next(iter(v)))
    if isinstance(v, cx.ChainComplex):
        return f"complex {v.name} lo {v.lo} dims {' '.join(map(str, v.dims_list))}"
    return str(v)


def _is_map(v) -> bool:
    return isinstance(v, (cx.GradedMap, cx.MapSum))


@dataclass
class CoMap:
    source: co.CoalgebraPresentation
    target: co.CoalgebraPresentation
    rows: dict

    def __call__(self, a):
        return co._apply_map(self.rows, self.target, a)


class SessionState:
    """Named objects and the active configuration."""

    def __init__(self):
        self.objects: dict[str, tuple[str, Any]] = {}
        self.contexts: dict[str, GradedContext] = {}
        self.context: str | None = None
        self.diff: Derivation | None = None
        self.cfg = df.DEFAULT
        self.truncate: int | None = None
        # default truncation ideals of catalog DGAs, by context name
        self.truncations: dict[str, dict] = {}
        self.pairs: list = []
        self.failures = 0
        # DGLA / coalgebra builders: name -> dict of pieces
        self.builders: dict[str, dict] = {}


class ScriptEnv(Environment):
    def __init__(self, session: Session, line: int, deformed: bool = False, ctx: GradedContext | None = None):
        self.s = session
        self.st = session.state
        self.line = line
        self.deformed = deformed
        self.ctx = ctx

    def active_ctx(self) -> GradedContext | None:
        if self.ctx is not None:
            return self.ctx
        if self.st.context is None:
            return None
        return self.st.contexts[self.st.context]

    def lookup(self, name: str, col: int):
        kind_obj = self.st.objects.get(name)
        if kind_obj is not None:
            return kind_obj[1]
        ctx = self.active_ctx()
        if ctx is not None and name in ctx.index:
            return ctx.gen(name)
        if name in ("i", "h", "e"):
            return super().lookup(name, col)
        raise ScriptNameError(self.line, col, f"undefined name {name!r}")

    def index(self, name: str, idx: int, col: int):
        kind_obj = self.st.objects.get(name)
        if kind_obj is None:
            raise ScriptNameError(self.line, col, f"undefined name {name!r}")
        kind, obj = kind_obj
        if kind == "dgla":
            return obj.basis(idx)
        if kind == "coalgebra":
            return obj.basis(idx)
        raise ScriptError(self.line, col, f"{name!r} cannot be indexed")

    def _diff(self, col: int) -> Derivation:
        if self.st.diff is None:
            raise ScriptError(self.line, col, "no active differential (use 'diff' or 'set diff')")
        return self.st.diff

    def _deformed_mul(self, a, b, col):
        if isinstance(a, Element) and isinstance(b, Element):
            return df.deformed_mul(a, b, self._diff(col), self.st.cfg)
        if _is_map(a) and _is_map(b):
            return cx.deformed_compose(a, b, self.st.cfg)
        raise ScriptError(self.line, col, "'&' needs two algebra elements or two maps")

    def binop(self, op: str, a, b, col: int):
        try:
            if op == "&" or (op == "*" and self.deformed and not _scalar_like(a) and not _scalar_like(b)):
                return self._deformed_mul(a, b, col)
            if op == "@":
                if isinstance(a, BasisVector) and isinstance(b, BasisVector):
                    return tensor(a, b)
                raise ScriptError(self.line, col, "'@' needs coalgebra vectors")
            if op == "*":
                if _is_map(a) and _is_map(b):
                    if isinstance(a, cx.GradedMap) and isinstance(b, cx.GradedMap):
                        return cx.compose(a, b)
                    return cx.MapSum(
                        [cx.compose(x, y) for x in cx.MapSum.of(a) for y in cx.MapSum.of(b)],
                        cx.MapSum.of(b).source,
                        cx.MapSum.of(a).target,
                    )
                if _is_map(a) and _scalar_like(b):
                    return a.scale(b)
                if _is_map(b) and _scalar_like(a):
                    return b.scale(a)
                if isinstance(a, Element) and isinstance(b, Element):
                    return mul(a, b)
                return a * b
            if op in "+-":
                if _is_map(a) or _is_map(b):
                    if isinstance(a, cx.GradedMap) and isinstance(b, cx.GradedMap) and a.degree == b.degree:
                        return a + b if op == "+" else a - b
                    a, b = cx.MapSum.of(a), cx.MapSum.of(b)
                return a + b if op == "+" else a - b
        except DeformError as exc:
            if isinstance(exc, ScriptError):
                raise
            raise ScriptError(self.line, col, f"{type(exc).__name__}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ScriptError(self.line, col, f"cannot apply {op!r}: {exc}") from exc
        raise ScriptError(self.line, col, f"unsupported operator {op!r}")

    def call(self, func: str, args: list, col: int):
        st = self.st
        kind_obj = st.objects.get(func)
        if kind_obj is not None and kind_obj[0] in ("morphism", "comap", "derivation"):
            self._arity(func, args, 1, col)
            return kind_obj[1](args[0])
        fn = _FUNCTIONS.get(func)
        if fn is None:
            raise ScriptNameError(self.line, col, f"undefined function {func!r}")
        arity, impl = fn
        self._arity(func, args, arity, col)
        try:
            return impl(self, col, *args)
        except ScriptError:
            raise
        except DeformError as exc:
            raise ScriptError(self.line, col, f"{type(exc).__name__}: {exc}") from exc

    def _arity(self, func, args, n, col):
        if len(args) != n:
            raise ScriptError(self.line, col, f"{func} takes {n} argument(s), got {len(args)}")


def _scalar_like(v) -> bool:
    return isinstance(v, (Scalar, int))


def _fn_d(env: ScriptEnv, col, x):
    if isinstance(x, Element):
        return env._diff(col)(x)
    if _is_map(x):
        if isinstance(x, cx.GradedMap):
            return cx.hom_differential(x)
        return cx.MapSum([cx.hom_differential(p) for p in x], x.source, x.target)
    if isinstance(x, BasisVector) and hasattr(x.pres, "d"):
        return x.pres.d(x)
    raise ScriptError(env.line, col, "d() needs an element, map or vector")


def _fn_conj(env, col, x):
    from .graded import conjugate

    return conjugate(x)


def _fn_S(env, col, x):
    return df.s_transform(x, env._diff(col))


def _fn_Sinv(env, col, x):
    return df.s_transform(x, env._diff(col), inverse=True)


def _fn_star(env, col, a, b):
    if not env.st.pairs:
        raise ScriptError(env.line, col, "no derivation pairs (use 'set pairs' or 'use weyl_pair')")
    if env.st.truncate is None:
        raise ScriptError(env.line, col, "star needs 'set truncate N'")
    cfg = df.DeformationConfig(env.st.cfg.lam, env.st.truncate)
    return df.moyal_weyl_mul(a, b, env.st.pairs, cfg)


def _fn_br(env, col, a, b):
    if _is_map(a):
        return cx.MapSum.of(env.binop("*", a, b, col)) - cx.MapSum(
            [cx.compose(y, x).scale(_sgn(x.degree * y.degree)) for x in cx.MapSum.of(a) for y in cx.MapSum.of(b)]
        )
    return lie.bracket(a, b)


def _fn_brd(env, col, a, b):
    return lie.deformed_bracket(a, b, env.st.cfg)


def _fn_delta(env, col, x):
    return co.coproduct(x)


def _fn_deltad(env, col, x):
    return co.deformed_coproduct(x, env.st.cfg)


def _fn_id(env, col, C):
    if not isinstance(C, cx.ChainComplex):
        raise ScriptError(env.line, col, "id() needs a complex")
    return cx.GradedMap.identity(C)


def _fn_bd(env, col, C):
    if not isinstance(C, cx.ChainComplex):
        raise ScriptError(env.line, col, "bd() needs a complex")
    return cx.GradedMap.boundary_map(C)


def _fn_Q(env, col, x):
    return x.pres.d(x)


def _sgn(p: int) -> int:
    return -1 if p % 2 else 1


_FUNCTIONS: dict[str, tuple[int, Callable]] = {
    "d": (1, _fn_d),
    "Q": (1, _fn_Q),
    "conj": (1, _fn_conj),
    "S": (1, _fn_S),
    "Sinv": (1, _fn_Sinv),
    "star": (2, _fn_star),
    "br": (2, _fn_br),
    "brd": (2, _fn_brd),
    "delta": (1, _fn_delta),
    "deltad": (1, _fn_deltad),
    "id": (1, _fn_id),
    "bd": (1, _fn_bd),
}


# execution -------------------------------------------------------------
class Session:
    """Executes statements and collects output text."""

    def __init__(self, out=None):
        self.state = SessionState()
        self.out = out if out is not None else io.StringIO()

    def emit(self, text: str) -> None:
        self.out.write(text + "\n")

    def run(self, text: str) -> int:
        """Parse and execute; returns the number of failed checks."""
        for stmt in parse(text):
            self.execute(stmt)
        return self.state.failures

    def execute(self, stmt: Statement) -> None:
        handler = getattr(self, "_do_" + stmt.kind)
        try:
            handler(stmt, stmt.data)
        except (ScriptError, ParseError):
            raise
        except DeformError as exc:
            raise ScriptError(stmt.line, stmt.col, f"{type(exc).__name__}: {exc}") from exc
        except (ValueError, KeyError, IndexError, ZeroDivisionError) as exc:
            raise ScriptError(stmt.line, stmt.col, f"{type(exc).__name__}: {exc}") from exc

    # helpers
    def _eval(self, node, stmt: Statement, deformed: bool = False, ctx=None):
        return evaluate(node, ScriptEnv(self, stmt.line, deformed, ctx))

    def _define(self, name: str, kind: str, obj, stmt: Statement) -> None:
        prev = self.state.objects.get(name)
        if prev is not None and not (prev[0] == kind == "value"):
            raise ScriptNameError(stmt.line, stmt.col, f"{name!r} is already defined as a {prev[0]}")
        ctx = self._ctx_or_none()
        if kind == "value" and ctx is not None and name in ctx.index:
            raise ScriptNameError(stmt.line, stmt.col, f"{name!r} is a generator")
        self.state.objects[name] = (kind, obj)

    def _get(self, name: str, kind: str | tuple, stmt: Statement):
        kinds = (kind,) if isinstance(kind, str) else kind
        if kinds == ("context",):
            if name not in self.state.contexts:
                raise ScriptNameError(stmt.line, stmt.col, f"undefined context {name!r}")
            return self.state.contexts[name]
        entry = self.state.objects.get(name)
        if entry is None:
            raise ScriptNameError(stmt.line, stmt.col, f"undefined name {name!r}")
        if entry[0] not in kinds:
            raise ScriptError(stmt.line, stmt.col, f"{name!r} is a {entry[0]}, expected {' or '.join(kinds)}")
        return entry[1]

    def _ctx_or_none(self):
        st = self.state
        return st.contexts[st.context] if st.context is not None else None

    def _ctx(self, stmt: Statement) -> GradedContext:
        ctx = self._ctx_or_none()
        if ctx is None:
            raise ScriptError(stmt.line, stmt.col, "no active context")
        return ctx

    def _report(self, what: str, defects: list) -> None:
        """``defects`` is a list of (label, witness); empty means OK."""
        if not defects:
            self.emit(f"{what}: OK")
            return
        self.state.failures += 1
        for label, w in defects:
            self.emit(f"{what}: FAIL {label}: {value_text(w)}" if label else f"{what}: FAIL {value_text(w)}")

    # statements
    def _do_echo(self, stmt, d):
        self.emit(d["text"])

    def _do_use(self, stmt, d):
        from .catalog import CATALOG

        name = d["name"]
        if name not in CATALOG:
            raise ScriptError(stmt.line, stmt.col, f"unknown catalog instance {name!r}")
        keys = list(CATALOG[name][1])
        params = dict(d["kw"])
        if len(d["pos"]) > len(keys):
            raise ScriptError(stmt.line, stmt.col, f"{name} takes at most {len(keys)} parameter(s)")
        for k, v in zip(keys, d["pos"]):
            params[k] = v
        alias = d["as"] or name
        obj = catalog_get(name, **params)
        st = self.state
        if isinstance(obj, DgaInstance):
            self._new_context(alias, obj.ctx, stmt)
            st.diff = obj.d
            st.truncations[alias] = dict(obj.truncation)
            self._define(f"d_{alias}" if d["as"] else "d", "derivation", obj.d, stmt)
        elif isinstance(obj, WeylPair):
            self._new_context(alias, obj.ctx, stmt)
            st.pairs = obj.pairs
        elif isinstance(obj, cx.ChainComplex):
            obj.name = alias
            self._define(alias, "complex", obj, stmt)
        elif isinstance(obj, lie.DglaPresentation):
            obj.label = alias
            self._define(alias, "dgla", obj, stmt)
        elif isinstance(obj, co.CoalgebraPresentation):
            obj.label = alias
            self._define(alias, "coalgebra", obj, stmt)

    def _new_context(self, name, ctx, stmt):
        if name in self.state.contexts:
            raise ScriptNameError(stmt.line, stmt.col, f"context {name!r} is already defined")
        self.state.contexts[name] = ctx
        self.state.context = name

    def _do_context(self, stmt, d):
        self._new_context(d["name"], GradedContext([]), stmt)
        self.state.diff = None

    def _do_generator(self, stmt, d):
        st = self.state
        ctx = self._ctx(stmt)
        if d["name"] in ctx.index:
            raise ScriptNameError(stmt.line, stmt.col, f"generator {d['name']!r} already exists")
        if d["name"] in st.objects:
            raise ScriptNameError(stmt.line, stmt.col, f"{d['name']!r} is already defined")
        for _, v in st.objects.values():
            if getattr(v, "ctx", None) is ctx:
                raise ScriptError(stmt.line, stmt.col, "declare all generators before differentials and bindings")
        new = GradedContext(list(zip(ctx.names, ctx.degrees)) + [(d["name"], d["deg"])])
        st.contexts[st.context] = new

    def _images(self, stmt, d, ctx, keys=None):
        """Evaluate ``g -> expr`` pairs in ``ctx``; ``g`` must be a generator of ``keys`` (default ``ctx``)."""
        keys = ctx if keys is None else keys
        images = {}
        for name, col, node in d["images"]:
            if name not in keys.index:
                raise ScriptNameError(stmt.line, col, f"unknown generator {name!r}")
            images[name] = self._eval(node, stmt, ctx=ctx)
        return images

    def _do_diff(self, stmt, d, validate=True):
        ctx = self._ctx(stmt)
        images = {k: _as_element(v, ctx) for k, v in self._images(stmt, d, ctx).items()}
        D = Derivation(ctx, d["deg"], images, name=d["name"])
        if validate:
            from .graded import require_differential

            require_differential(D)
        self._define(d["name"], "derivation", D, stmt)
        if validate:
            self.state.diff = D

    def _do_derivation(self, stmt, d):
        self._do_diff(stmt, d, validate=False)

    def _do_morphism(self, stmt, d):
        src = self._get(d["src"], "context", stmt)
        tgt = self._get(d["tgt"], "context", stmt)
        images = {k: _as_element(v, tgt) for k, v in self._images(stmt, d, tgt, keys=src).items()}
        for name in src.names:
            if name not in images:
                images[name] = tgt.zero()
        self._define(d["name"], "morphism", AlgebraMorphism(src, tgt, images), stmt)

    def _do_let(self, stmt, d):
        v = self._eval(d["expr"], stmt, d["deformed"])
        self._define(d["name"], "value", v, stmt)

    def _do_show(self, stmt, d):
        self.emit(value_text(self._eval(d["expr"], stmt, d["deformed"])))

    def _do_set(self, stmt, d):
        st = self.state
        key = d["key"]
        if key == "lambda":
            if "sign" in d:
                lam = I_HBAR if d["sign"] == "+" else -I_HBAR
            else:
                lam = Scalar.coerce(self._eval(d["expr"], stmt))
            st.cfg = df.DeformationConfig(lam, st.cfg.truncation_order)
        elif key == "diff":
            st.diff = self._get(d["name"], "derivation", stmt)
        elif key == "context":
            self._get(d["name"], "context", stmt)
            st.context = d["name"]
            st.diff = None
        elif key == "truncate":
            st.truncate = d["value"]
        elif key == "pairs":
            st.pairs = [(self._get(a, "derivation", stmt), self._get(b, "derivation", stmt)) for a, b in d["pairs"]]

    def _scalar_matrix(self, rows, stmt, shape=None) -> cx.Matrix:
        data = [[Scalar.coerce(self._eval(x, stmt)) for x in r] for r in rows]
        nr = len(data)
        nc = len(data[0]) if data else 0
        if any(len(r) != nc for r in data):
            raise ScriptError(stmt.line, stmt.col, "ragged matrix")
        if shape is not None and (nr, nc) != shape and not (nr == 0 and 0 in shape):
            raise ScriptError(stmt.line, stmt.col, f"matrix must be {shape[0]}x{shape[1]}, got {nr}x{nc}")
        if shape is not None and nr == 0:
            return cx.Matrix.zeros(*shape)
        return cx.Matrix(nr, nc, data)

    def _do_complex(self, stmt, d):
        lo, dims = d["lo"], d["dims"]
        if not dims:
            raise ScriptError(stmt.line, stmt.col, "a complex needs at least one dimension")
        if len(d["mats"]) > max(len(dims) - 1, 0):
            raise ScriptError(stmt.line, stmt.col, f"at most {len(dims) - 1} boundary matrices")
        bounds = {}
        for off, rows in enumerate(d["mats"]):
            k = lo + off
            bounds[k] = self._scalar_matrix(rows, stmt, (dims[off + 1], dims[off]))
        self._define(d["name"], "complex", cx.ChainComplex(lo, dims, bounds, name=d["name"]), stmt)

    def _do_map(self, stmt, d):
        src = self._get(d["src"], "complex", stmt)
        tgt = self._get(d["tgt"], "complex", stmt)
        r = d["deg"]
        blocks = {}
        for k, rows in d["blocks"]:
            blocks[k] = self._scalar_matrix(rows, stmt, (tgt.dim(k + r), src.dim(k)))
        self._define(d["name"], "value", cx.GradedMap(src, tgt, r, blocks), stmt)

    def _do_dgla(self, stmt, d):
        self.state.builders[d["name"]] = {"kind": "dgla", "degrees": d["degrees"], "a": {}, "b": {}}
        self._define(d["name"], "dgla", lie.DglaPresentation(d["degrees"], label=d["name"]), stmt)

    def _do_coalgebra(self, stmt, d):
        self.state.builders[d["name"]] = {"kind": "coalgebra", "degrees": d["degrees"], "a": {}, "b": {}, "c": {}}
        pres = co.CoalgebraPresentation(d["degrees"], label=d["name"])
        self._define(d["name"], "coalgebra", pres, stmt)

    def _builder(self, stmt, name, kind):
        b = self.state.builders.get(name)
        self._get(name, kind, stmt)
        if b is None or b["kind"] != kind:
            raise ScriptError(stmt.line, stmt.col, f"{name!r} was not declared in this script and cannot be extended")
        return b

    def _rebuild(self, name, b):
        if b["kind"] == "dgla":
            obj = lie.DglaPresentation(b["degrees"], b["a"], b["b"], label=name)
            self.state.objects[name] = ("dgla", obj)
        else:
            obj = co.CoalgebraPresentation(b["degrees"], b["a"], b["b"], b["c"], label=name)
            self.state.objects[name] = ("coalgebra", obj)

    def _do_bracket(self, stmt, d):
        b = self._builder(stmt, d["name"], "dgla")
        i, j, k = d["idx"]
        b["a"].setdefault((i, j), {})[k] = Scalar.coerce(self._eval(d["coeff"], stmt))
        self._rebuild(d["name"], b)

    def _do_qdiff(self, stmt, d):
        b = self._builder(stmt, d["name"], "dgla")
        i, k = d["idx"]
        b["b"].setdefault(i, {})[k] = Scalar.coerce(self._eval(d["coeff"], stmt))
        self._rebuild(d["name"], b)

    def _do_coproduct(self, stmt, d):
        b = self._builder(stmt, d["name"], "coalgebra")
        i, j, k = d["idx"]
        b["a"].setdefault(i, {})[(j, k)] = Scalar.coerce(self._eval(d["coeff"], stmt))
        self._rebuild(d["name"], b)

    def _do_codiff(self, stmt, d):
        b = self._builder(stmt, d["name"], "coalgebra")
        i, j = d["idx"]
        b["b"].setdefault(i, {})[j] = Scalar.coerce(self._eval(d["coeff"], stmt))
        self._rebuild(d["name"], b)

    def _do_counit(self, stmt, d):
        b = self._builder(stmt, d["name"], "coalgebra")
        b["c"][d["idx"][0]] = Scalar.coerce(self._eval(d["coeff"], stmt))
        self._rebuild(d["name"], b)

    def _do_dualize(self, stmt, d):
        ctx = self._ctx(stmt)
        if self.state.diff is None:
            raise ScriptError(stmt.line, stmt.col, "no active differential")
        trunc = d["truncate"] or self.state.truncations.get(self.state.context, {})
        C = co.dualize_dga(ctx, self.state.diff, trunc, label=d["name"])
        self._define(d["name"], "coalgebra", C, stmt)

    def _do_comap(self, stmt, d):
        src = self._get(d["src"], "coalgebra", stmt)
        tgt = self._get(d["tgt"], "coalgebra", stmt)
        m = self._scalar_matrix(d["matrix"], stmt, (tgt.dim, src.dim))
        rows = {i: {j: m[j, i] for j in range(tgt.dim) if m[j, i]} for i in range(src.dim)}
        self._define(d["name"], "comap", CoMap(src, tgt, rows), stmt)

    def _do_check(self, stmt, d):
        what = d["what"]
        fn = _CHECKS.get(what)
        if fn is None:
            raise ScriptError(stmt.line, stmt.col, f"unknown check {what!r}")
        arity, impl = fn
        args = d["args"]
        if len(args) != arity:
            raise ScriptError(stmt.line, stmt.col, f"check {what} takes {arity} argument(s), got {len(args)}")
        values = [self._eval_arg(a, stmt) for a in args]
        impl(self, stmt, d["mode"], *values)

    def _eval_arg(self, node, stmt):
        # bare names of presentations and morphisms evaluate to the object itself
        if isinstance(node, Name) and node.id in self.state.objects:
            return self.state.objects[node.id][1]
        return self._eval(node, stmt)


def _as_element(v, ctx: GradedContext) -> Element:
    if isinstance(v, Element):
        return v
    return ctx.scalar(Scalar.coerce(v))


def _elements(sess: Session, stmt: Statement, *xs):
    ctx = sess._ctx(stmt)
    return [_as_element(x, ctx) for x in xs]


def _diff(sess: Session, stmt: Statement) -> Derivation:
    if sess.state.diff is None:
        raise ScriptError(stmt.line, stmt.col, "no active differential")
    return sess.state.diff


# checks ----------------------------------------------------------------
def _ck_assoc(sess, stmt, mode, a, b, c):
    a, b, c = _elements(sess, stmt, a, b, c)
    if mode == "plain":
        w = mul(a, mul(b, c)) - mul(mul(a, b), c)
    else:
        w = df.check_associativity(a, b, c, _diff(sess, stmt), sess.state.cfg)
    sess._report("assoc", [("", w)] if w else [])


def _ck_unit(sess, stmt, mode, a):
    (a,) = _elements(sess, stmt, a)
    left, right = df.unit_defects(a, _diff(sess, stmt), sess.state.cfg)
    sess._report("unit", [(k, w) for k, w in (("left", left), ("right", right)) if w])


def _ck_leibniz(sess, stmt, mode, a, b):
    a, b = _elements(sess, stmt, a, b)
    w = df.derivation_defect(a, b, _diff(sess, stmt), sess.state.cfg)
    sess._report("leibniz", [("", w)] if w else [])


def _ck_exact(sess, stmt, mode, a, b):
    a, b = _elements(sess, stmt, a, b)
    D, cfg = _diff(sess, stmt), sess.state.cfg
    corr = df.correction_term(a, b, D, cfg)
    w1, w2 = df.exactness_witnesses(a, b, D, cfg)
    sess._report("exact", [(k, w) for k, w in (("first", corr - w1), ("second", corr - w2)) if w])


def _ck_pauli(sess, stmt, mode, a, b):
    a, b = _elements(sess, stmt, a, b)
    w = df.weak_pauli_check(a, b, _diff(sess, stmt), sess.state.cfg)
    sess._report("pauli", [("", w)] if w else [])


def _ck_closure(sess, stmt, mode, a, b):
    a, b = _elements(sess, stmt, a, b)
    rep = df.parity_closure_check(a, b, _diff(sess, stmt), sess.state.cfg)
    sess._report("closure", rep.failures)


def _ck_s_equiv(sess, stmt, mode, a, b):
    a, b = _elements(sess, stmt, a, b)
    w = df.s_equivalence_check(a, b, _diff(sess, stmt), sess.state.cfg)
    sess._report("s-equiv", [("", w)] if w else [])


def _ck_functor(sess, stmt, mode, phi, a, b):
    if not isinstance(phi, AlgebraMorphism):
        raise ScriptError(stmt.line, stmt.col, "check functor needs a morphism")
    src_d = _diff_of(sess, stmt, phi.source)
    tgt_d = _diff_of(sess, stmt, phi.target)
    a, b = (_as_element(x, phi.source) for x in (a, b))
    rep = df.morphism_functoriality_check(phi, a, b, src_d, tgt_d, sess.state.cfg)
    sess._report("functor", rep.failures)


def _diff_of(sess, stmt, ctx) -> Derivation:
    """The validated differential declared on ``ctx`` (most recent wins)."""
    found = None
    for kind, obj in sess.state.objects.values():
        if kind == "derivation" and obj.ctx is ctx and obj.degree % 2 and validate_differential(obj).ok:
            found = obj
    if found is None:
        raise ScriptError(stmt.line, stmt.col, "no differential declared on the morphism's context")
    return found


def _ck_chain_map(sess, stmt, mode, phi):
    if not isinstance(phi, AlgebraMorphism):
        raise ScriptError(stmt.line, stmt.col, "check chain-map needs a morphism")
    defects = phi.intertwining_defects(_diff_of(sess, stmt, phi.source), _diff_of(sess, stmt, phi.target))
    sess._report("chain-map", defects)


def _ck_differential(sess, stmt, mode, D):
    if not isinstance(D, Derivation):
        raise ScriptError(stmt.line, stmt.col, "check differential needs a derivation")
    rep = validate_differential(D)
    sess._report("differential", rep.failures)


def _ck_moyal_assoc(sess, stmt, mode, a, b, c):
    a, b, c = _elements(sess, stmt, a, b, c)
    if sess.state.truncate is None or not sess.state.pairs:
        raise ScriptError(stmt.line, stmt.col, "moyal-assoc needs 'set truncate' and derivation pairs")
    cfg = df.DeformationConfig(sess.state.cfg.lam, sess.state.truncate)
    w = df.moyal_associativity_defect(a, b, c, sess.state.pairs, cfg)
    sess._report("moyal-assoc", [("", w)] if w else [])


def _ck_compose_assoc(sess, stmt, mode, phi, alpha, beta):
    cfg = sess.state.cfg
    if mode == "plain":
        w = cx.MapSum.of(cx.compose(cx.compose(phi, alpha), beta)) - cx.compose(phi, cx.compose(alpha, beta))
    else:
        w = cx.deformed_compose(cx.deformed_compose(phi, alpha, cfg), beta, cfg) - cx.deformed_compose(
            phi, cx.deformed_compose(alpha, beta, cfg), cfg
        )
    sess._report("compose-assoc", [("", w)] if w else [])


def _ck_absorb(sess, stmt, mode, phi):
    if not isinstance(phi, cx.GradedMap):
        raise ScriptError(stmt.line, stmt.col, "check absorb needs a pure-degree map")
    cfg = sess.state.cfg
    defects = []
    for label, got, want in absorption_laws(phi, cfg):
        w = got - want
        if w:
            defects.append((label, w))
    sess._report("absorb", defects)


def absorption_laws(phi: cx.GradedMap, cfg):
    """``(label, deformed side, plain side)`` for identity and boundary absorption."""
    ids = cx.GradedMap.identity(phi.source)
    idt = cx.GradedMap.identity(phi.target)
    dl = cx.GradedMap.boundary_map(phi.target)
    dk = cx.GradedMap.boundary_map(phi.source)
    return [
        ("phi&id", cx.deformed_compose(phi, ids, cfg), cx.MapSum.of(phi)),
        ("id&phi", cx.deformed_compose(idt, phi, cfg), cx.MapSum.of(phi)),
        ("d&phi", cx.deformed_compose(dl, phi, cfg), cx.MapSum.of(cx.compose(dl, phi))),
        ("phi&d", cx.deformed_compose(phi, dk, cfg), cx.MapSum.of(cx.compose(phi, dk))),
    ]


def _ck_dgla(sess, stmt, mode, L):
    if not isinstance(L, lie.DglaPresentation):
        raise ScriptError(stmt.line, stmt.col, "check dgla needs a DGLA")
    sess._report("dgla", lie.validate_dgla(L).failures)


def _ck_jacobi(sess, stmt, mode, a, b, c):
    w = lie.jacobiator(a, b, c, use_deformed=(mode == "deformed"), cfg=sess.state.cfg)
    sess._report("jacobi", [("", w)] if w else [])


def _ck_exactness(sess, stmt, mode, a, b, c):
    signs = "cyclic" if mode == "cyclic" else "verbatim"
    _, _, residual = lie.exactness_check(a, b, c, sess.state.cfg, signs)
    sess._report("exactness", [("residual", residual)] if residual else [])


def _ck_antisym(sess, stmt, mode, a, b):
    w = lie.antisymmetry_defect(a, b, use_deformed=(mode == "deformed"), cfg=sess.state.cfg)
    sess._report("antisym", [("", w)] if w else [])


def _ck_coalgebra(sess, stmt, mode, C):
    if not isinstance(C, co.CoalgebraPresentation):
        raise ScriptError(stmt.line, stmt.col, "check coalgebra needs a coalgebra")
    sess._report("coalgebra", co.validate_coalgebra(C).failures)


def _ck_coassoc(sess, stmt, mode, C):
    defects = []
    for i in range(C.dim):
        w, l_ref, r_ref = co.coassociativity_check(C.basis(i), sess.state.cfg)
        for label, x in (("iterated", w), ("closed-left", l_ref), ("closed-right", r_ref)):
            if x:
                defects.append((f"{label} e{i}", x))
    sess._report("coassoc", defects)


def _ck_coderivation(sess, stmt, mode, C):
    defects = []
    for i in range(C.dim):
        w = co.coderivation_defect(C.basis(i), sess.state.cfg)
        if w:
            defects.append((f"e{i}", w))
    sess._report("coderivation", defects)


def _ck_duality(sess, stmt, mode, C):
    bad = co.duality_defects(C, sess.state.cfg)
    sess._report("duality", [(f"coefficient {k}", bad[k]) for k in sorted(bad)])


def _ck_comorphism(sess, stmt, mode, psi, a):
    if not isinstance(psi, CoMap):
        raise ScriptError(stmt.line, stmt.col, "check comorphism needs a comap")
    rep = co.comorphism_functoriality_check(psi.rows, psi.source, psi.target, a, sess.state.cfg)
    sess._report("comorphism", rep.failures)


_CHECKS: dict[str, tuple[int, Callable]] = {
    "assoc": (3, _ck_assoc),
    "unit": (1, _ck_unit),
    "leibniz": (2, _ck_leibniz),
    "exact": (2, _ck_exact),
    "pauli": (2, _ck_pauli),
    "closure": (2, _ck_closure),
    "s-equiv": (2, _ck_s_equiv),
    "functor": (3, _ck_functor),
    "chain-map": (1, _ck_chain_map),
    "differential": (1, _ck_differential),
    "moyal-assoc": (3, _ck_moyal_assoc),
    "compose-assoc": (3, _ck_compose_assoc),
    "absorb": (1, _ck_absorb),
    "dgla": (1, _ck_dgla),
    "jacobi": (3, _ck_jacobi),
    "exactness": (3, _ck_exactness),
    "antisym": (2, _ck_antisym),
    "coalgebra": (1, _ck_coalgebra),
    "coassoc": (1, _ck_coassoc),
    "coderivation": (1, _ck_coderivation),
    "duality": (1, _ck_duality),
    "comorphism": (2, _ck_comorphism),
}


def run_script(text: str) -> tuple[str, int]:
    """Execute ``text``; returns ``(stdout text, failed checks)``."""
    sess = Session()
    failures = sess.run(text)
    return sess.out.getvalue(), failures


# rendering objects back to statements (used for reproduction scripts) ----
def complex_statement(C: cx.ChainComplex, name: str) -> str:
    dims = " ".join(str(n) for n in C.dims_list)
    mats = ", ".join(C.d(k).text() for k in range(C.lo, C.hi))
    return f"complex {name} lo {C.lo} dims {dims}" + (f": {mats}" if mats else "")


def map_statement(phi: cx.GradedMap, name: str, src: str, tgt: str) -> str:
    blocks = ", ".join(f"[{k}] {phi.blocks[k].text()}" for k in sorted(phi.blocks))
    return f"map {name}: {src} -> {tgt} deg {phi.degree}" + (f": {blocks}" if blocks else "")


def coalgebra_statements(C: co.CoalgebraPresentation, name: str) -> list[str]:
    lines = [f"coalgebra {name} degrees {' '.join(map(str, C.degrees))}"]
    for i in sorted(C.coproduct):
        for (j, k) in sorted(C.coproduct[i]):
            lines.append(f"coproduct {name} {i} {j} {k} {_coeff_text(C.coproduct[i][(j, k)])}")
    for i in sorted(C.codifferential):
        for j in sorted(C.codifferential[i]):
            lines.append(f"codiff {name} {i} {j} {_coeff_text(C.codifferential[i][j])}")
    for i in sorted(C.counit):
        lines.append(f"counit {name} {i} {_coeff_text(C.counit[i])}")
    return lines


def dgla_statements(L: lie.DglaPresentation, name: str) -> list[str]:
    lines = [f"dgla {name} degrees {' '.join(map(str, L.degrees))}"]
    for (i, j) in sorted(L.brackets):
        for k in sorted(L.brackets[(i, j)]):
            lines.append(f"bracket {name} {i} {j} {k} {_coeff_text(L.brackets[(i, j)][k])}")
    for i in sorted(L.differential):
        for k in sorted(L.differential[i]):
            lines.append(f"qdiff {name} {i} {k} {_coeff_text(L.differential[i][k])}")
    return lines


def _coeff_text(c: Scalar) -> str:
    s = str(c)
    return s if " " not in s else f"({s})"


def lambda_statement(lam: Scalar) -> str:
    if lam == I_HBAR:
        return "set lambda +ih"
    if lam == -I_HBAR:
        return "set lambda -ih"
    return f"set lambda {lam}"


__all__ = [
    "ScriptError",
    "ScriptNameError",
    "Statement",
    "Session",
    "parse",
    "parse_line",
    "run_script",
    "complex_statement",
    "map_statement",
    "coalgebra_statements",
    "dgla_statements",
    "lambda_statement",
    "absorption_laws",
]
