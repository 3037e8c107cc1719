"""Recursive-descent parser and round-tripping pretty printer.

Grammar:
    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' factor)?
    base   := number | ident | '(' expr ')' | func '(' expr ')'
    func   := exp | log | sin | cos | tan | <opaque name with optional primes>

Identifiers other than the context variable and the built-in functions are
parameters; an identifier applied to parentheses must be a built-in function
or a declared opaque name (primes select the derivative order).
"""

from __future__ import annotations

from fractions import Fraction

from .expr import (
    Expr, Rat, Sym, Var, Add, Mul, Pow, Fn, Opaque,
    FN_NAMES, ExprError,
    add, mul, pow_, fn, opaque, sort_key,
)


class ParseError(ExprError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def expect(self, c: str):
        got = self.peek()
        if got != c:
            raise ParseError(f"expected {c!r}, got {got!r}", self.pos)
        self.pos += 1

    def number(self) -> Fraction:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
        return Fraction(self.text[start:self.pos])

    def ident(self) -> str:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]

    def primes(self) -> int:
        n = 0
        while self.pos < len(self.text) and self.text[self.pos] == "'":
            self.pos += 1
            n += 1
        return n


def parse(text: str, variable: str = "z", opaques: tuple[str, ...] = ("f",)) -> Expr:
    """Parse `text` into a canonical Expr with the given context variable."""
    tk = _Tokens(text)
    out = _expr(tk, variable, opaques)
    tk._skip_ws()
    if tk.pos != len(text):
        raise ParseError(f"trailing input {text[tk.pos:]!r}", tk.pos)
    return out


def _expr(tk: _Tokens, v: str, op_names) -> Expr:
    terms = []
    sign = 1
    if tk.peek() == "-":
        tk.take()
        sign = -1
    elif tk.peek() == "+":
        tk.take()
    terms.append(mul(Rat(sign), _term(tk, v, op_names)))
    while tk.peek() in ("+", "-"):
        s = 1 if tk.take() == "+" else -1
        terms.append(mul(Rat(s), _term(tk, v, op_names)))
    return add(*terms)


def _term(tk: _Tokens, v: str, op_names) -> Expr:
    factors = [_factor(tk, v, op_names)]
    while tk.peek() in ("*", "/"):
        c = tk.take()
        f = _factor(tk, v, op_names)
        factors.append(f if c == "*" else pow_(f, -1))
    return mul(*factors)


def _factor(tk: _Tokens, v: str, op_names) -> Expr:
    b = _base(tk, v, op_names)
    if tk.peek() == "^":
        tk.take()
        return pow_(b, _factor(tk, v, op_names))
    return b


def _base(tk: _Tokens, v: str, op_names) -> Expr:
    c = tk.peek()
    if c == "(":
        tk.take()
        inner = _expr(tk, v, op_names)
        tk.expect(")")
        return inner
    if c.isdigit():
        return Rat(tk.number())
    if c.isalpha() or c == "_":
        pos = tk.pos
        name = tk.ident()
        order = tk.primes()
        if tk.peek() == "(":
            tk.take()
            arg = _expr(tk, v, op_names)
            tk.expect(")")
            if name in FN_NAMES:
                if order:
                    raise ParseError(f"primes are not allowed on {name!r}", pos)
                return fn(name, arg)
            if name in op_names:
                return opaque(name, order, arg)
            raise ParseError(f"unknown function {name!r}", pos)
        if order:
            raise ParseError(f"primes require a function application after {name!r}", pos)
        return Var(name) if name == v else Sym(name)
    raise ParseError(f"unexpected character {c!r}", tk.pos)


# ---------------------------------------------------------------------------
# pretty printer

def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _pow_str(e: Pow) -> str:
    base = to_string(e.base)
    if isinstance(e.base, (Add, Mul, Pow)) or (isinstance(e.base, Rat)
                                               and e.base.value < 0):
        base = f"({base})"
    exp = e.exponent
    if isinstance(exp, Rat) and exp.value.denominator == 1 and exp.value >= 0:
        return f"{base}^{exp.value.numerator}"
    if isinstance(exp, (Sym, Var)):
        return f"{base}^{exp.name}"
    return f"{base}^({to_string(exp)})"


def _mul_str(e: Mul) -> str:
    num, den = [], []
    coeff = Fraction(1)
    for f in e.factors:
        if isinstance(f, Rat):
            coeff *= f.value
        elif isinstance(f, Pow) and isinstance(f.exponent, Rat) and f.exponent.value < 0:
            inv = pow_(f.base, Rat(-f.exponent.value))
            den.append(_atom_str(inv))
        else:
            num.append(_atom_str(f))
    out = ""
    cnum = Fraction(coeff.numerator)
    cden = Fraction(coeff.denominator)
    if cnum != 1 or not num:
        out = _frac_str(cnum)
    if num:
        out = "*".join(([out] if out else []) + num)
    if cden != 1:
        den.insert(0, str(cden.numerator))
    for d in den:
        out += f"/{d}"
    return out


def _atom_str(e: Expr) -> str:
    s = to_string(e)
    if isinstance(e, (Add, Mul)) or (isinstance(e, Rat) and e.value < 0):
        return f"({s})"
    return s


def to_string(e: Expr) -> str:
    """Render in a form that parses back to an equal canonical Expr."""
    if isinstance(e, Rat):
        return _frac_str(e.value)
    if isinstance(e, (Sym, Var)):
        return e.name
    if isinstance(e, Fn):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Opaque):
        primes = "'" * e.order
        return f"{e.name}{primes}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return _pow_str(e)
    if isinstance(e, Mul):
        s = _mul_str(e)
        return s
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(sorted(e.terms, key=sort_key)):
            if isinstance(t, Rat):
                neg = t.value < 0
                body = _frac_str(abs(t.value))
            elif isinstance(t, Mul) and isinstance(t.factors[0], Rat) and t.factors[0].value < 0:
                neg = True
                body = to_string(mul(Rat(-t.factors[0].value), *t.factors[1:]))
            else:
                neg = False
                body = to_string(t)
            if i == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)
    raise ExprError(f"unexpected node {type(e)}")
