"""Factorable-function frontend: text grammar, shared-subexpression DAG, and
evaluators over points, boxes, and branched domains.

Grammar (whitespace insensitive)::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' INT)?
    atom    := NUMBER | 'pi' | 'e' | VAR | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := 'exp'|'log'|'sin'|'cos'|'tan'|'cot'|'sqrt'|'inv'|'sqr'
    VAR     := 'x' INT   (1-based: x1 is axis 0)

NUMBER is a decimal literal with an optional exponent; `pi` and `e` fold to
their double-precision values, which fixes the semantics of every evaluator.
Exponents must be positive integer literals; write exp(q*log(x)) for anything
else.  Constant subexpressions fold at parse time, so a binary node always has
at most one constant operand and unary atoms never see constant children.

Nodes are interned by structure: syntactically repeated subexpressions are
represented once and evaluated once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .interval import PI_HALF, DomainViolation, Interval
from .model import Domain, SuperpositionModel, init_constant, init_variable, _affine
from .univariate import Atom, compose, cot_model, pow_model, recip_model, sqrt_model
from .bivariate import add_models, div_models, mul_models, scalar_affine, sub_models

__all__ = [
    "Expr",
    "ParseError",
    "UnknownIdentifier",
    "ArityError",
    "ShapeMismatch",
    "parse",
    "parse_vector",
    "to_text",
    "eval_point",
    "eval_points",
    "eval_interval",
    "eval_ism",
    "self_compose",
]


class ParseError(ValueError):
    """Syntax error with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifier(ParseError):
    pass


class ArityError(ValueError):
    """Variable index outside the declared arity."""


class ShapeMismatch(ValueError):
    """Composition of expressions whose input/output shapes disagree."""


_FUNCS = ("exp", "log", "sin", "cos", "tan", "cot", "sqrt", "inv", "sqr")
_ATOM_BY_NAME = {a.value: a for a in Atom}

# node tuples:  ('var', i)  ('const', v)  ('un', name, child)
#               ('pow', k, child)        ('bin', op, left, right)


class _Builder:
    """Interning node store with eager constant folding."""

    def __init__(self) -> None:
        self.nodes: list[tuple] = []
        self._index: dict[tuple, int] = {}

    def _add(self, node: tuple) -> int:
        got = self._index.get(node)
        if got is None:
            got = len(self.nodes)
            self.nodes.append(node)
            self._index[node] = got
        return got

    def var(self, i: int) -> int:
        return self._add(("var", i))

    def const(self, v: float) -> int:
        v = float(v)
        if not math.isfinite(v):
            raise OverflowError(f"constant folded to a non-finite value: {v}")
        return self._add(("const", v))

    def unary(self, name: str, child: int) -> int:
        node = self.nodes[child]
        if node[0] == "const":
            return self.const(_unary_float(name, node[1]))
        return self._add(("un", name, child))

    def power(self, child: int, k: int) -> int:
        if k == 1:
            return child
        node = self.nodes[child]
        if node[0] == "const":
            return self.const(node[1] ** k)
        return self._add(("pow", k, child))

    def binary(self, op: str, left: int, right: int) -> int:
        ln, rn = self.nodes[left], self.nodes[right]
        if ln[0] == "const" and rn[0] == "const":
            return self.const(_binary_float(op, ln[1], rn[1]))
        return self._add(("bin", op, left, right))


def _unary_float(name: str, v: float) -> float:
    if name == "neg":
        return -v
    if name == "sqr":
        return v * v
    if name == "inv":
        if v == 0.0:
            raise DomainViolation("reciprocal of zero")
        return 1.0 / v
    if name == "exp":
        return math.exp(v)
    if name == "log":
        if v <= 0.0:
            raise DomainViolation(f"log of non-positive value {v}")
        return math.log(v)
    if name == "sin":
        return math.sin(v)
    if name == "cos":
        return math.cos(v)
    if name == "tan":
        return math.tan(v)
    if name == "cot":
        t = math.tan(v)
        if t == 0.0:
            raise DomainViolation(f"cot of {v} is a pole")
        return 1.0 / t
    if name == "sqrt":
        if v <= 0.0:
            raise DomainViolation(f"sqrt needs a positive argument, got {v}")
        return math.sqrt(v)
    raise ValueError(f"unknown unary {name!r}")


def _binary_float(op: str, a: float, b: float) -> float:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if b == 0.0:
        raise DomainViolation("division by zero")
    return a / b


@dataclass(frozen=True)
class Expr:
    """Topologically ordered DAG with one or more output nodes."""

    nodes: tuple[tuple, ...]
    outputs: tuple[int, ...]
    arity: int

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)


def _prune(builder: _Builder, outputs: list[int], arity: int) -> Expr:
    """Drop nodes unreachable from the outputs and renumber."""
    reachable: set[int] = set()
    stack = list(outputs)
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        node = builder.nodes[nid]
        if node[0] == "un":
            stack.append(node[2])
        elif node[0] == "pow":
            stack.append(node[2])
        elif node[0] == "bin":
            stack.extend(node[2:4])
    keep = sorted(reachable)
    renum = {old: new for new, old in enumerate(keep)}
    nodes = []
    for old in keep:
        node = builder.nodes[old]
        if node[0] == "un":
            nodes.append(("un", node[1], renum[node[2]]))
        elif node[0] == "pow":
            nodes.append(("pow", node[1], renum[node[2]]))
        elif node[0] == "bin":
            nodes.append(("bin", node[1], renum[node[2]], renum[node[3]]))
        else:
            nodes.append(node)
    return Expr(tuple(nodes), tuple(renum[o] for o in outputs), arity)


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, arity: int, builder: _Builder):
        self.text = text
        self.arity = arity
        self.builder = builder
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def _expect_op(self, op: str) -> None:
        tok = self._peek()
        if tok is None or tok[0] != "op" or tok[1] != op:
            where = tok[2] if tok else len(self.text)
            got = tok[1] if tok else "end of input"
            raise ParseError(f"expected {op!r}, got {got!r}", where)
        self.pos += 1

    def parse(self) -> int:
        nid = self.expr()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return nid

    def expr(self) -> int:
        nid = self.term()
        while (tok := self._peek()) and tok[0] == "op" and tok[1] in "+-":
            self.pos += 1
            rhs = self.term()
            nid = self.builder.binary("add" if tok[1] == "+" else "sub", nid, rhs)
        return nid

    def term(self) -> int:
        nid = self.factor()
        while (tok := self._peek()) and tok[0] == "op" and tok[1] in "*/":
            self.pos += 1
            rhs = self.factor()
            nid = self.builder.binary("mul" if tok[1] == "*" else "div", nid, rhs)
        return nid

    def factor(self) -> int:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self.pos += 1
            return self.builder.unary("neg", self.factor())
        return self.power()

    def power(self) -> int:
        nid = self.atom()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.pos += 1
            etok = self._peek()
            if etok is None or etok[0] != "num" or not etok[1].isdigit() or int(etok[1]) < 1:
                where = etok[2] if etok else len(self.text)
                raise ParseError("exponent must be a positive integer literal", where)
            self.pos += 1
            nid = self.builder.power(nid, int(etok[1]))
        return nid

    def atom(self) -> int:
        kind, value, where = self._take()
        if kind == "num":
            return self.builder.const(float(value))
        if kind == "op" and value == "(":
            nid = self.expr()
            self._expect_op(")")
            return nid
        if kind == "name":
            if value == "pi":
                return self.builder.const(math.pi)
            if value == "e":
                return self.builder.const(math.e)
            if value in _FUNCS:
                self._expect_op("(")
                inner = self.expr()
                self._expect_op(")")
                return self.builder.unary(value, inner)
            if value[0] == "x" and value[1:].isdigit():
                idx = int(value[1:])
                if not 1 <= idx <= self.arity:
                    raise ArityError(
                        f"variable {value} outside the declared arity {self.arity}"
                    )
                return self.builder.var(idx - 1)
            raise UnknownIdentifier(f"unknown identifier {value!r}", where)
        raise ParseError(f"unexpected token {value!r}", where)


def parse(text: str, arity: int) -> Expr:
    """Parse one expression in n variables into a deduplicated DAG."""
    return parse_vector([text], arity)


def parse_vector(texts: Sequence[str], arity: int) -> Expr:
    """Parse several expressions into one DAG with sharing across outputs."""
    if arity < 0:
        raise ArityError(f"arity must be non-negative, got {arity}")
    builder = _Builder()
    outputs = [_Parser(t, arity, builder).parse() for t in texts]
    return _prune(builder, outputs, arity)


_PREC_ATOM, _PREC_POW, _PREC_NEG, _PREC_TERM, _PREC_EXPR = 5, 4, 3, 2, 1


def _render(e: Expr, nid: int, want: int) -> str:
    node = e.nodes[nid]
    if node[0] == "var":
        return f"x{node[1] + 1}"
    if node[0] == "const":
        body = repr(node[1])
        # a bare negative literal reads as unary minus; guard tight contexts
        return f"({body})" if (node[1] < 0 and want > _PREC_NEG) else body
    if node[0] == "un":
        if node[1] == "neg":
            body = f"-{_render(e, node[2], _PREC_NEG)}"
            return f"({body})" if want > _PREC_NEG else body
        return f"{node[1]}({_render(e, node[2], _PREC_EXPR)})"
    if node[0] == "pow":
        body = f"{_render(e, node[2], _PREC_ATOM)}^{node[1]}"
        return f"({body})" if want > _PREC_POW else body
    op = node[1]
    if op in ("add", "sub"):
        sym = "+" if op == "add" else "-"
        body = f"{_render(e, node[2], _PREC_EXPR)}{sym}{_render(e, node[3], _PREC_TERM)}"
        return f"({body})" if want > _PREC_EXPR else body
    sym = "*" if op == "mul" else "/"
    body = f"{_render(e, node[2], _PREC_TERM)}{sym}{_render(e, node[3], _PREC_NEG)}"
    return f"({body})" if want > _PREC_TERM else body


def to_text(e: Expr, output: int = 0) -> str:
    """Render one output back to grammar text; parsing the result rebuilds an
    identical DAG."""
    return _render(e, e.outputs[output], _PREC_EXPR)


def _last_uses(e: Expr) -> list[int]:
    last = [0] * len(e.nodes)
    for nid, node in enumerate(e.nodes):
        if node[0] in ("un", "pow"):
            last[node[2]] = nid
        elif node[0] == "bin":
            last[node[2]] = nid
            last[node[3]] = nid
    for out in e.outputs:
        last[out] = len(e.nodes)
    return last


def eval_point(e: Expr, x: Sequence[float]) -> tuple[float, ...]:
    """Evaluate all outputs at a point in working precision."""
    if len(x) != e.arity:
        raise ArityError(f"point has {len(x)} coordinates, expression takes {e.arity}")
    vals: list[float] = []
    for node in e.nodes:
        if node[0] == "var":
            v = float(x[node[1]])
        elif node[0] == "const":
            v = node[1]
        elif node[0] == "un":
            v = _unary_float(node[1], vals[node[2]])
        elif node[0] == "pow":
            v = vals[node[2]] ** node[1]
        else:
            v = _binary_float(node[1], vals[node[2]], vals[node[3]])
        if not math.isfinite(v):
            raise OverflowError("intermediate value overflowed")
        vals.append(v)
    return tuple(vals[o] for o in e.outputs)


_NP_UNARY: dict[str, Callable] = {
    "neg": np.negative,
    "sqr": np.square,
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
}


def eval_points(e: Expr, xs: np.ndarray) -> np.ndarray:
    """Vectorized eval_point over an (m, arity) array; returns (m, outputs).

    Raises the same domain errors as eval_point when any row violates them.
    Intermediate arrays are freed as soon as their last consumer has run.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != e.arity:
        raise ArityError(f"expected an (m, {e.arity}) array, got {xs.shape}")
    last = _last_uses(e)
    vals: dict[int, np.ndarray] = {}
    m = xs.shape[0]
    for nid, node in enumerate(e.nodes):
        if node[0] == "var":
            v = xs[:, node[1]]
        elif node[0] == "const":
            v = np.full(m, node[1])
        elif node[0] == "un":
            arg = vals[node[2]]
            name = node[1]
            if name == "log":
                if not np.all(arg > 0.0):
                    raise DomainViolation("log of a non-positive value")
                v = np.log(arg)
            elif name == "sqrt":
                if not np.all(arg > 0.0):
                    raise DomainViolation("sqrt of a non-positive value")
                v = np.sqrt(arg)
            elif name == "inv":
                if np.any(arg == 0.0):
                    raise DomainViolation("reciprocal of zero")
                v = 1.0 / arg
            elif name == "cot":
                t = np.tan(arg)
                if np.any(t == 0.0):
                    raise DomainViolation("cot at a pole")
                v = 1.0 / t
            else:
                v = _NP_UNARY[name](arg)
        elif node[0] == "pow":
            v = vals[node[2]] ** node[1]
        else:
            a, b = vals[node[2]], vals[node[3]]
            if node[1] == "add":
                v = a + b
            elif node[1] == "sub":
                v = a - b
            elif node[1] == "mul":
                v = a * b
            else:
                if np.any(b == 0.0):
                    raise DomainViolation("division by zero")
                v = a / b
        if not np.all(np.isfinite(v)):
            raise OverflowError("intermediate value overflowed")
        vals[nid] = v
        for child in set(node[2:4] if node[0] == "bin" else node[2:3] if node[0] in ("un", "pow") else ()):
            if last[child] == nid and child not in e.outputs:
                del vals[child]
    return np.column_stack([vals[o] for o in e.outputs])


def eval_interval(e: Expr, box: Sequence[Interval]) -> tuple[Interval, ...]:
    """Natural interval extension over the box, memoized over the DAG."""
    if len(box) != e.arity:
        raise ArityError(f"box has {len(box)} axes, expression takes {e.arity}")
    vals: list[Interval] = []
    for nid, node in enumerate(e.nodes):
        try:
            if node[0] == "var":
                v = box[node[1]]
            elif node[0] == "const":
                v = Interval.point(node[1])
            elif node[0] == "un":
                v = _interval_unary(node[1], vals[node[2]])
            elif node[0] == "pow":
                v = _interval_pow(vals[node[2]], node[1])
            else:
                a, b = vals[node[2]], vals[node[3]]
                if node[1] == "add":
                    v = a + b
                elif node[1] == "sub":
                    v = a - b
                elif node[1] == "mul":
                    v = a * b
                else:
                    v = a * b.inv()
        except DomainViolation as err:
            raise DomainViolation(f"node {nid} ({node[0]}): {err}") from err
        vals.append(v)
    return tuple(vals[o] for o in e.outputs)


def _interval_unary(name: str, x: Interval) -> Interval:
    if name == "neg":
        return -x
    if name == "sqr":
        return x.sqr()
    if name == "inv":
        return x.inv()
    if name == "exp":
        return x.exp()
    if name == "log":
        return x.log()
    if name == "sin":
        return x.sin()
    if name == "cos":
        return x.cos()
    if name == "tan":
        return x.tan()
    if name == "cot":
        return (PI_HALF + (-x)).tan()
    # sqrt as exp(0.5 * log x), mirroring the model-level construction
    return (x.log() * 0.5).exp()


def _interval_pow(x: Interval, k: int) -> Interval:
    if k == 1:
        return x
    if k % 2 == 0:
        return _interval_pow(x, k // 2).sqr()
    return _interval_pow(x, k - 1) * x


def eval_ism(e: Expr, domain: Domain, memoize: bool = True) -> tuple[SuperpositionModel, ...]:
    """Propagate superposition models through the DAG.

    Leaves become trivial variable/constant models; unary nodes go through the
    composition rule, binaries through the addition and product rules, and
    binaries with a constant operand fold exactly without remainder.  With
    memoize=False shared nodes are recomputed per use (test hook; the result
    is identical because every step is deterministic).
    """
    if domain.dim != e.arity:
        raise ArityError(f"domain has {domain.dim} axes, expression takes {e.arity}")
    cache: dict[int, SuperpositionModel] | None = {} if memoize else None

    def const_of(nid: int) -> float | None:
        node = e.nodes[nid]
        return node[1] if node[0] == "const" else None

    def build(nid: int) -> SuperpositionModel:
        if cache is not None and nid in cache:
            return cache[nid]
        node = e.nodes[nid]
        try:
            if node[0] == "var":
                out = init_variable(domain, node[1])
            elif node[0] == "const":
                out = init_constant(domain, node[1])
            elif node[0] == "un":
                out = _model_unary(node[1], build(node[2]))
            elif node[0] == "pow":
                out = pow_model(build(node[2]), node[1])
            else:
                out = _model_binary(node[1], node[2], node[3])
        except DomainViolation as err:
            raise DomainViolation(f"node {nid} ({node[0]}): {err}") from err
        if cache is not None:
            cache[nid] = out
        return out

    def _model_binary(op: str, left: int, right: int) -> SuperpositionModel:
        cl, cr = const_of(left), const_of(right)
        if op == "add":
            if cl is not None:
                return scalar_affine(build(right), 1.0, cl)
            if cr is not None:
                return scalar_affine(build(left), 1.0, cr)
            return add_models(build(left), build(right))
        if op == "sub":
            if cl is not None:
                return scalar_affine(build(right), -1.0, cl)
            if cr is not None:
                return scalar_affine(build(left), 1.0, -cr)
            return sub_models(build(left), build(right))
        if op == "mul":
            if cl is not None:
                return scalar_affine(build(right), cl)
            if cr is not None:
                return scalar_affine(build(left), cr)
            return mul_models(build(left), build(right))
        if cr is not None:
            if cr == 0.0:
                raise DomainViolation("division by the constant zero")
            return _affine(build(left), Interval.point(cr).inv())
        if cl is not None:
            return scalar_affine(recip_model(build(right)), cl)
        return div_models(build(left), build(right))

    return tuple(build(o) for o in e.outputs)


def _model_unary(name: str, m: SuperpositionModel) -> SuperpositionModel:
    atom = _ATOM_BY_NAME.get(name)
    if atom is not None:
        return compose(atom, m)
    if name == "sqrt":
        return sqrt_model(m)
    if name == "cot":
        return cot_model(m)
    raise ValueError(f"unknown unary {name!r}")


def self_compose(e: Expr, k: int) -> Expr:
    """Iterate a square map: outputs of the previous stage feed the variable
    leaves of the next.  Sharing is preserved, so the node count grows
    linearly in k."""
    if k < 1:
        raise ValueError(f"depth must be positive, got {k}")
    if e.n_outputs != e.arity:
        raise ShapeMismatch(f"need outputs == arity, got {e.n_outputs} != {e.arity}")
    current = e
    for _ in range(k - 1):
        builder = _Builder()
        inner_map: list[int] = []
        for node in current.nodes:
            if node[0] == "var":
                inner_map.append(builder.var(node[1]))
            elif node[0] == "const":
                inner_map.append(builder.const(node[1]))
            elif node[0] == "un":
                inner_map.append(builder.unary(node[1], inner_map[node[2]]))
            elif node[0] == "pow":
                inner_map.append(builder.power(inner_map[node[2]], node[1]))
            else:
                inner_map.append(builder.binary(node[1], inner_map[node[2]], inner_map[node[3]]))
        feeds = [inner_map[o] for o in current.outputs]
        outer_map: list[int] = []
        for node in e.nodes:
            if node[0] == "var":
                outer_map.append(feeds[node[1]])
            elif node[0] == "const":
                outer_map.append(builder.const(node[1]))
            elif node[0] == "un":
                outer_map.append(builder.unary(node[1], outer_map[node[2]]))
            elif node[0] == "pow":
                outer_map.append(builder.power(outer_map[node[2]], node[1]))
            else:
                outer_map.append(builder.binary(node[1], outer_map[node[2]], outer_map[node[3]]))
        current = _prune(builder, [outer_map[o] for o in e.outputs], e.arity)
    return current
