"""Edge-defining polynomial systems ``p_j + l_j = f_j(p_1, l_1, ..., p_{j-1}, l_{j-1})``.

File syntax, one equation per line in order j = 2, 3, ..., n::

    # comments run to end of line
    p2 + l2 = p1*l1
    p3 + l3 = p1*l2

Expressions use ``+``, ``-``, ``*`` (required, no juxtaposition), ``^`` with a
nonnegative integer exponent, parentheses, integer literals and the
variables ``p<i>``/``l<i>``.  Parsed expressions are canonicalized: nested
sums and products are flattened and their operands sorted, so that
``parse_system(format_system(s)) == s``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

MAX_DEPTH = 128  # each level costs ~5 interpreter frames


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


# -- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    side: str  # "p" or "l"
    index: int


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Add:
    terms: tuple


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Var, Num, Add, Mul, Sub, Neg, Pow]


def _sort_key(e: Expr):
    if isinstance(e, Var):
        return (0, 0 if e.side == "p" else 1, e.index, "")
    if isinstance(e, Num):
        return (1, 0, e.value, "")
    return (2, 0, 0, format_expr(e))


def make_add(terms) -> Expr:
    flat = []
    for t in terms:
        flat.extend(t.terms if isinstance(t, Add) else (t,))
    return Add(tuple(sorted(flat, key=_sort_key)))


def make_mul(factors) -> Expr:
    flat = []
    for f in factors:
        flat.extend(f.factors if isinstance(f, Mul) else (f,))
    return Mul(tuple(sorted(flat, key=_sort_key)))


def format_expr(e: Expr, top: bool = False) -> str:
    """Fully parenthesized canonical form; the outermost parentheses are dropped when ``top``."""
    if isinstance(e, Var):
        return f"{e.side}{e.index}"
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Add):
        s = " + ".join(format_expr(t) for t in e.terms)
    elif isinstance(e, Mul):
        s = " * ".join(format_expr(f) for f in e.factors)
    elif isinstance(e, Sub):
        s = f"{format_expr(e.left)} - {format_expr(e.right)}"
    elif isinstance(e, Neg):
        s = f"-{format_expr(e.operand)}"
    elif isinstance(e, Pow):
        s = f"{format_expr(e.base)}^{e.exponent}"
    else:
        raise TypeError(f"not an expression: {e!r}")
    return s if top else f"({s})"


def variables(e: Expr):
    if isinstance(e, Var):
        yield e
    elif isinstance(e, Add):
        for t in e.terms:
            yield from variables(t)
    elif isinstance(e, Mul):
        for f in e.factors:
            yield from variables(f)
    elif isinstance(e, Sub):
        yield from variables(e.left)
        yield from variables(e.right)
    elif isinstance(e, Neg):
        yield from variables(e.operand)
    elif isinstance(e, Pow):
        yield from variables(e.base)


# -- systems --------------------------------------------------------------------

@dataclass(frozen=True)
class EquationSystem:
    """Right-hand sides ``rhs[0] = f_2, ..., rhs[n-2] = f_n``."""

    n: int
    rhs: tuple

    def f(self, j: int) -> Expr:
        return self.rhs[j - 2]

    def truncate(self, m: int) -> "EquationSystem":
        if not 2 <= m <= self.n:
            raise ValueError(f"cannot truncate a dimension-{self.n} system to {m}")
        return EquationSystem(m, self.rhs[: m - 1])


@dataclass(frozen=True)
class Violation:
    j: int
    variable: str

    def __str__(self):
        return f"f_{self.j} references {self.variable}, outside p1..p{self.j - 1}, l1..l{self.j - 1}"


def validate_system(system: EquationSystem) -> Violation | None:
    """Return the first variable-scope violation, or None if every f_j uses only indices < j."""
    if system.n < 2 or len(system.rhs) != system.n - 1:
        raise ValueError(f"system of dimension {system.n} needs {system.n - 1} equations, has {len(system.rhs)}")
    for j in range(2, system.n + 1):
        for v in variables(system.f(j)):
            if not 1 <= v.index < j:
                return Violation(j, f"{v.side}{v.index}")
    return None


def format_system(system: EquationSystem) -> str:
    return "".join(
        f"p{j} + l{j} = {format_expr(system.f(j), top=True)}\n" for j in range(2, system.n + 1)
    )


def builtin_system(family: str, n: int) -> EquationSystem:
    """The D(n, q) or A(n, q) system; every f_j is a monomial p_a * l_b."""
    family = family.upper()
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rhs = []
    for j in range(2, n + 1):
        if family == "D":
            if j == 2:
                a, b = 1, 1
            elif j == 3:
                a, b = 1, 2
            elif j % 4 in (0, 1):
                a, b = j - 2, 1
            else:
                a, b = 1, j - 2
        elif family == "A":
            a, b = (j - 1, 1) if j % 2 == 0 else (1, j - 1)
        else:
            raise ValueError(f"unknown family {family!r}; expected D or A")
        rhs.append(make_mul([Var("p", a), Var("l", b)]))
    return EquationSystem(n, tuple(rhs))


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[pl]\d+)|(?P<op>[-+*^()=])|(?P<bad>\S))")


def _tokenize(text: str, lineno: int, offset: int = 0):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        col = m.start(m.lastgroup) + 1 + offset
        if m.lastgroup == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}", lineno, col)
        toks.append((m.lastgroup, m.group(m.lastgroup), col))
        pos = m.end()
    toks.append(("end", "", len(text) + 1 + offset))
    return toks


class _Parser:
    # expr   := term (('+' | '-') term)*
    # term   := unary ('*' unary)*
    # unary  := '-' unary | power
    # power  := atom ('^' NUM)?
    # atom   := NUM | VAR | '(' expr ')'

    def __init__(self, toks, lineno):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.depth = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.lineno, tok[2])

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] not in ("op",):
            self.error(f"expected {value!r}, found {t[1] or 'end of line'!r}", t)
        return t

    def expr(self) -> Expr:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("expression nested too deeply")
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = make_add([node, rhs]) if op == "+" else Sub(node, rhs)
        self.depth -= 1
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            node = make_mul([node, self.unary()])
        return node

    def unary(self) -> Expr:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            self.depth += 1
            if self.depth > MAX_DEPTH:
                self.error("expression nested too deeply")
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            t = self.take()
            if t[0] != "num":
                self.error("exponent must be a nonnegative integer literal", t)
            return Pow(base, int(t[1]))
        return base

    def atom(self) -> Expr:
        t = self.take()
        kind, text, _ = t
        if kind == "num":
            return Num(int(text))
        if kind == "var":
            return Var(text[0], int(text[1:]))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {text or 'end of line'!r}", t)


_LHS = re.compile(r"^\s*p(\d+)\s*\+\s*l(\d+)\s*$")


def parse_expr(text: str, lineno: int = 0, offset: int = 0) -> Expr:
    p = _Parser(_tokenize(text, lineno, offset), lineno)
    node = p.expr()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}")
    return node


def parse_system(text: str) -> EquationSystem:
    """Parse and validate an equation file; see the module docstring for the syntax."""
    rhs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if line.count("=") != 1:
            raise ParseError("expected exactly one '='", lineno, 1)
        lhs_text, rhs_text = line.split("=")
        m = _LHS.match(lhs_text)
        if not m or m.group(1) != m.group(2):
            raise ParseError(f"left-hand side must read p<j> + l<j>, got {lhs_text.strip()!r}", lineno, 1)
        j = int(m.group(1))
        expected = len(rhs) + 2
        if j != expected:
            raise ParseError(f"expected equation for index {expected}, got {j}", lineno, 1)
        offset = len(lhs_text) + 1
        expr = parse_expr(rhs_text, lineno, offset)
        for v in variables(expr):
            if not 1 <= v.index < j:
                col = offset + rhs_text.find(f"{v.side}{v.index}") + 1
                raise ParseError(
                    f"variable {v.side}{v.index} not among the {2 * j - 2} admissible variables "
                    f"p1..p{j - 1}, l1..l{j - 1}",
                    lineno,
                    col,
                )
        rhs.append(expr)
    if not rhs:
        raise ParseError("no equations found")
    return EquationSystem(len(rhs) + 1, tuple(rhs))


# -- compilation and evaluation -----------------------------------------------

def _emit(e: Expr, out: list):
    if isinstance(e, Var):
        out.append(("var", e.side, e.index))
    elif isinstance(e, Num):
        out.append(("const", e.value))
    elif isinstance(e, Add):
        for t in e.terms:
            _emit(t, out)
        out.append(("add", len(e.terms)))
    elif isinstance(e, Mul):
        for f in e.factors:
            _emit(f, out)
        out.append(("mul", len(e.factors)))
    elif isinstance(e, Sub):
        _emit(e.left, out)
        _emit(e.right, out)
        out.append(("sub",))
    elif isinstance(e, Neg):
        _emit(e.operand, out)
        out.append(("neg",))
    elif isinstance(e, Pow):
        _emit(e.base, out)
        out.append(("pow", e.exponent))


def compile_expr(e: Expr) -> tuple:
    """Flatten an expression into a postfix instruction tuple."""
    out: list = []
    _emit(e, out)
    return tuple(out)


def run_program(prog: tuple, field, P, L, shape=()):
    """Evaluate a postfix program over code arrays.

    ``P[i]``/``L[i]`` hold coordinate i+1 (arrays or scalars, broadcastable to ``shape``).
    """
    stack = []
    for ins in prog:
        op = ins[0]
        if op == "var":
            stack.append(P[ins[2] - 1] if ins[1] == "p" else L[ins[2] - 1])
        elif op == "const":
            stack.append(np.full(shape, field.from_int(ins[1]), dtype=np.int64))
        elif op == "add":
            args = stack[-ins[1]:]
            del stack[-ins[1]:]
            acc = args[0]
            for a in args[1:]:
                acc = field.vadd(acc, a)
            stack.append(acc)
        elif op == "mul":
            args = stack[-ins[1]:]
            del stack[-ins[1]:]
            acc = args[0]
            for a in args[1:]:
                acc = field.vmul(acc, a)
            stack.append(acc)
        elif op == "sub":
            b = stack.pop()
            stack.append(field.vsub(stack.pop(), b))
        elif op == "neg":
            stack.append(field.vneg(stack.pop()))
        elif op == "pow":
            stack.append(field.vpow(stack.pop(), ins[1]))
    (result,) = stack
    return result


class CompiledSystem:
    """An EquationSystem with each f_j compiled once to postfix."""

    def __init__(self, system: EquationSystem):
        v = validate_system(system)
        if v is not None:
            raise ValueError(str(v))
        self.system = system
        self.n = system.n
        self.programs = tuple(compile_expr(e) for e in system.rhs)

    def program(self, j: int) -> tuple:
        return self.programs[j - 2]


def eval_rhs(system, field, j: int, pcoords, lcoords) -> int:
    """Evaluate f_j at coordinate prefixes (``pcoords[0]`` is p_1)."""
    if not isinstance(system, CompiledSystem):
        system = CompiledSystem(system)
    if not 2 <= j <= system.n:
        raise ValueError(f"equation index {j} outside 2..{system.n}")
    if len(pcoords) < j - 1 or len(lcoords) < j - 1:
        raise ValueError(f"f_{j} needs coordinate prefixes of length {j - 1}")
    for c in list(pcoords[: j - 1]) + list(lcoords[: j - 1]):
        field._check(c)
    P = [np.int64(c) for c in pcoords]
    L = [np.int64(c) for c in lcoords]
    return int(run_program(system.program(j), field, P, L))
