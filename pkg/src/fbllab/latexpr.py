"""Lattice-linear expressions over generators: tree, parser, evaluator.

Grammar (whitespace insensitive)::

    expr := sum
    sum  := join (("+" | "-") join)*
    join := meet ("\\/" meet)*
    meet := term ("/\\" term)*
    term := number "*" term | "|" expr "|" | "(" expr ")" | "d" integer

Meet binds tighter than join, join tighter than +/-.  Scalars are decimal
literals with optional sign and exponent; generators are d1, d2, ...
format() emits canonical parenthesized text with parse(format(t)) == t.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, DimensionMismatch, LatticeSyntaxError, UnknownGenerator


# --- expression trees -------------------------------------------------------

@dataclass(frozen=True)
class Gen:
    k: int

    def __post_init__(self):
        if self.k <= 0:
            raise UnknownGenerator(f"generator indices start at 1, got d{self.k}")


@dataclass(frozen=True)
class Scale:
    c: float
    child: object

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("scalar must be finite")
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Sum needs at least two children")


@dataclass(frozen=True)
class Abs:
    child: object


@dataclass(frozen=True)
class Join:
    left: object
    right: object


@dataclass(frozen=True)
class Meet:
    left: object
    right: object


def arity(expr):
    """Largest generator index appearing in the tree."""
    if isinstance(expr, Gen):
        return expr.k
    if isinstance(expr, Scale):
        return arity(expr.child)
    if isinstance(expr, Abs):
        return arity(expr.child)
    if isinstance(expr, Sum):
        return max(arity(c) for c in expr.children)
    if isinstance(expr, (Join, Meet)):
        return max(arity(expr.left), arity(expr.right))
    raise TypeError(f"not a lattice expression node: {expr!r}")


# --- tokenizer ---------------------------------------------------------------

_NUMBER_RE = re.compile(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_GEN_RE = re.compile(r"d(\d+)")


@dataclass(frozen=True)
class _Token:
    kind: str
    value: object
    line: int
    column: int


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == "d":
            m = _GEN_RE.match(text, i)
            if not m:
                raise LatticeSyntaxError("generator index expected after 'd'",
                                         line, col, {"integer"})
            tokens.append(_Token("GEN", int(m.group(1)), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("NUMBER", float(m.group(0)), line, col))
            col += m.end() - i
            i = m.end()
            continue
        two = text[i:i + 2]
        if two == "\\/":
            tokens.append(_Token("JOIN", two, line, col))
            i += 2
            col += 2
            continue
        if two == "/\\":
            tokens.append(_Token("MEET", two, line, col))
            i += 2
            col += 2
            continue
        if ch in "+-*|()":
            kind = {"+": "PLUS", "-": "MINUS", "*": "STAR",
                    "|": "PIPE", "(": "LPAREN", ")": "RPAREN"}[ch]
            tokens.append(_Token(kind, ch, line, col))
            i += 1
            col += 1
            continue
        raise LatticeSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", None, line, col))
    return tokens


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind, expected):
        tok = self.peek()
        if tok.kind != kind:
            raise LatticeSyntaxError(f"unexpected {tok.value!r}", tok.line,
                                     tok.column, expected)
        self.pos += 1
        return tok

    def parse_expr(self):
        return self.parse_sum()

    def parse_sum(self):
        children = [self.parse_join()]
        ops_seen = False
        while self.peek().kind in ("PLUS", "MINUS"):
            op = self.take(self.peek().kind, set())
            rhs = self.parse_join()
            children.append(Scale(-1.0, rhs) if op.kind == "MINUS" else rhs)
            ops_seen = True
        return Sum(tuple(children)) if ops_seen else children[0]

    def parse_join(self):
        node = self.parse_meet()
        while self.peek().kind == "JOIN":
            self.take("JOIN", set())
            node = Join(node, self.parse_meet())
        return node

    def parse_meet(self):
        node = self.parse_term()
        while self.peek().kind == "MEET":
            self.take("MEET", set())
            node = Meet(node, self.parse_term())
        return node

    _TERM_EXPECTED = {"number", "'|'", "'('", "generator"}

    def parse_term(self):
        tok = self.peek()
        if tok.kind in ("MINUS", "PLUS") and self.tokens[self.pos + 1].kind == "NUMBER":
            self.pos += 1
            num = self.take("NUMBER", {"number"})
            sign = -1.0 if tok.kind == "MINUS" else 1.0
            self.take("STAR", {"'*'"})
            return Scale(sign * num.value, self.parse_term())
        if tok.kind == "NUMBER":
            self.pos += 1
            self.take("STAR", {"'*'"})
            return Scale(tok.value, self.parse_term())
        if tok.kind == "PIPE":
            self.pos += 1
            inner = self.parse_expr()
            self.take("PIPE", {"'|'"})
            return Abs(inner)
        if tok.kind == "LPAREN":
            self.pos += 1
            inner = self.parse_expr()
            self.take("RPAREN", {"')'"})
            return inner
        if tok.kind == "GEN":
            self.pos += 1
            return Gen(tok.value)
        raise LatticeSyntaxError(f"unexpected {tok.value!r}", tok.line, tok.column,
                                 self._TERM_EXPECTED)


def parse(text):
    """Parse DSL text into an expression tree."""
    parser = _Parser(_tokenize(text))
    tree = parser.parse_expr()
    parser.take("EOF", {"end of input"})
    return tree


def format(expr):
    """Canonical text; parse(format(t)) is structurally equal to t."""
    if isinstance(expr, Gen):
        return f"d{expr.k}"
    if isinstance(expr, Abs):
        return f"|{format(expr.child)}|"
    if isinstance(expr, Join):
        return f"({format(expr.left)} \\/ {format(expr.right)})"
    if isinstance(expr, Meet):
        return f"({format(expr.left)} /\\ {format(expr.right)})"
    if isinstance(expr, Scale):
        return f"{expr.c!r}*{format(expr.child)}"
    if isinstance(expr, Sum):
        parts = [format(expr.children[0])]
        for child in expr.children[1:]:
            if isinstance(child, Scale) and child.c == -1.0:
                parts.append(f"- {format(child.child)}")
            else:
                parts.append(f"+ {format(child)}")
        return "(" + " ".join(parts) + ")"
    raise TypeError(f"not a lattice expression node: {expr!r}")


# --- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorAssignment:
    """Coordinates of the generators x_1..x_K, one row per generator."""

    vectors: tuple  # of d-tuples

    def __post_init__(self):
        vecs = tuple(tuple(float(v) for v in row) for row in self.vectors)
        if not vecs:
            raise ValueError("need at least one generator")
        d = len(vecs[0])
        if any(len(row) != d for row in vecs):
            raise DimensionMismatch("generators must share a dimension")
        object.__setattr__(self, "vectors", vecs)

    @property
    def count(self):
        return len(self.vectors)

    @property
    def dimension(self):
        return len(self.vectors[0])

    def as_array(self):
        return np.asarray(self.vectors, dtype=np.float64)


def evaluate(expr, gens, functional):
    """Value of the expression at a functional: Gen k -> <functional, x_k>."""
    if arity(expr) > gens.count:
        raise ArityMismatch(f"expression uses d{arity(expr)} but only "
                            f"{gens.count} generators were given")
    y = np.asarray(functional, dtype=np.float64)
    if y.shape != (gens.dimension,):
        raise DimensionMismatch("functional dimension mismatch")
    G = gens.as_array()
    return float(_eval_scalar(expr, G @ y))


def _eval_scalar(expr, gen_values):
    if isinstance(expr, Gen):
        return gen_values[expr.k - 1]
    if isinstance(expr, Scale):
        return expr.c * _eval_scalar(expr.child, gen_values)
    if isinstance(expr, Sum):
        return sum(_eval_scalar(c, gen_values) for c in expr.children)
    if isinstance(expr, Abs):
        return abs(_eval_scalar(expr.child, gen_values))
    if isinstance(expr, Join):
        return max(_eval_scalar(expr.left, gen_values), _eval_scalar(expr.right, gen_values))
    return min(_eval_scalar(expr.left, gen_values), _eval_scalar(expr.right, gen_values))


def evaluate_many(expr, gens, functionals):
    """Row-wise evaluate: functionals is an (n, d) array, returns length-n array."""
    if arity(expr) > gens.count:
        raise ArityMismatch(f"expression uses d{arity(expr)} but only "
                            f"{gens.count} generators were given")
    Y = np.asarray(functionals, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != gens.dimension:
        raise DimensionMismatch("functionals must be rows of the right dimension")
    return _eval_vector(expr, Y @ gens.as_array().T)


def evaluate_image(expr, images):
    """Apply the expression coordinatewise to vectors in R^m.

    This is the lattice-homomorphism extension made concrete: generator k
    is sent to images[k-1] and the lattice operations act pointwise.
    """
    rows = [np.asarray(v, dtype=np.float64) for v in images]
    if not rows:
        raise ArityMismatch("need at least one image vector")
    m = rows[0].shape[-1]
    if any(r.ndim != 1 or r.shape[0] != m for r in rows):
        raise DimensionMismatch("image vectors must share a dimension")
    if arity(expr) > len(rows):
        raise ArityMismatch(f"expression uses d{arity(expr)} but only "
                            f"{len(rows)} images were given")
    return _eval_vector(expr, np.vstack(rows).T)


def _eval_vector(expr, gen_columns):
    # gen_columns: (..., K) array whose last axis indexes generators
    if isinstance(expr, Gen):
        return gen_columns[..., expr.k - 1].copy()
    if isinstance(expr, Scale):
        return expr.c * _eval_vector(expr.child, gen_columns)
    if isinstance(expr, Sum):
        out = _eval_vector(expr.children[0], gen_columns)
        for c in expr.children[1:]:
            out = out + _eval_vector(c, gen_columns)
        return out
    if isinstance(expr, Abs):
        return np.abs(_eval_vector(expr.child, gen_columns))
    if isinstance(expr, Join):
        return np.maximum(_eval_vector(expr.left, gen_columns),
                          _eval_vector(expr.right, gen_columns))
    return np.minimum(_eval_vector(expr.left, gen_columns),
                      _eval_vector(expr.right, gen_columns))


def random_tree(rng, max_depth=8, max_arity=4):
    """A seeded random expression tree, for round-trip and property tests."""
    if max_depth <= 1:
        return Gen(int(rng.integers(1, max_arity + 1)))
    kind = rng.integers(0, 6)
    if kind == 0:
        return Gen(int(rng.integers(1, max_arity + 1)))
    if kind == 1:
        c = float(np.round(rng.normal() * 4, 3))
        if c == 0.0:
            c = 1.0
        return Scale(c, random_tree(rng, max_depth - 1, max_arity))
    if kind == 2:
        n = int(rng.integers(2, 4))
        return Sum(tuple(random_tree(rng, max_depth - 1, max_arity) for _ in range(n)))
    if kind == 3:
        return Abs(random_tree(rng, max_depth - 1, max_arity))
    if kind == 4:
        return Join(random_tree(rng, max_depth - 1, max_arity),
                    random_tree(rng, max_depth - 1, max_arity))
    return Meet(random_tree(rng, max_depth - 1, max_arity),
                random_tree(rng, max_depth - 1, max_arity))
