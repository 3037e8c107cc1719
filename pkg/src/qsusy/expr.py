"""Immutable symbolic expressions over one variable with exact rational constants.

Every constructor returns a canonical form: sums and products are flattened,
rational constants folded exactly, like powers merged (x^a * x^b -> x^(a+b)),
and exp/log folded for rational multiples.  No full rational-function
normalization is attempted; callers that need semantic equality beyond the
canonical form fall back to numeric sampling.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]

EPS_POLE = 1e-10


class ExprError(Exception):
    pass


class EvalError(ExprError):
    pass


class UnboundSymbolError(EvalError):
    pass


class PoleError(EvalError):
    pass


class EvalDomainError(EvalError):
    pass


FN_NAMES = ("exp", "log", "sin", "cos", "tan")


class Expr:
    __slots__ = ("_h", "_key")

    def _hashable(self):
        raise NotImplementedError

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._h != other._h:
            return False
        return self._hashable() == other._hashable()

    def __repr__(self):
        from .parser import to_string

        return to_string(self)

    # arithmetic sugar; int/Fraction operands are coerced to exact constants
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(MINUS_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), pow_(self, -1))

    def __pow__(self, other):
        return pow_(self, as_expr(other))

    def __neg__(self):
        return mul(MINUS_ONE, self)


class Rat(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Rational):
        v = value if isinstance(value, Fraction) else Fraction(value)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "_h", hash(("Rat", v)))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def _hashable(self):
        return self.value


class Sym(Expr):
    """A free named parameter (real-valued)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_h", hash(("Sym", name)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return self.name


class Var(Expr):
    """The designated independent variable of an expression context."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_h", hash(("Var", name)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return self.name


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_h", hash(("Add",) + tuple(t._h for t in terms)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "_h", hash(("Mul",) + tuple(f._h for f in factors)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Expr):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "_h", hash(("Pow", base._h, exponent._h)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return (self.base, self.exponent)


class Fn(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "_h", hash(("Fn", name, arg._h)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return (self.name, self.arg)


class Opaque(Expr):
    """An unspecified function symbol applied at `arg`, carrying a derivative order."""

    __slots__ = ("name", "order", "arg")

    def __init__(self, name: str, order: int, arg: Expr):
        if order < 0:
            raise ExprError("opaque derivative order must be >= 0")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "_h", hash(("Opq", name, order, arg._h)))
        object.__setattr__(self, "_key", None)

    __setattr__ = Rat.__setattr__

    def _hashable(self):
        return (self.name, self.order, self.arg)


ZERO = Rat(0)
ONE = Rat(1)
MINUS_ONE = Rat(-1)
TWO = Rat(2)
HALF = Rat(Fraction(1, 2))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rat(x)
    if isinstance(x, float):
        if x == int(x):
            return Rat(int(x))
        return Rat(Fraction(x))
    raise TypeError(f"cannot coerce {x!r} to Expr")


def rat(p: Rational, q: int = 1) -> Expr:
    return Rat(Fraction(p, q) if q != 1 else Fraction(p))


def sym(name: str) -> Expr:
    return Sym(name)


def var(name: str) -> Expr:
    return Var(name)


# ---------------------------------------------------------------------------
# ordering of canonical children

def sort_key(e: Expr):
    k = e._key
    if k is None:
        if isinstance(e, Rat):
            k = (0, e.value.numerator, e.value.denominator)
        elif isinstance(e, Sym):
            k = (1, e.name)
        elif isinstance(e, Var):
            k = (2, e.name)
        elif isinstance(e, Fn):
            k = (3, e.name, sort_key(e.arg))
        elif isinstance(e, Opaque):
            k = (4, e.name, e.order, sort_key(e.arg))
        elif isinstance(e, Pow):
            k = (5, sort_key(e.base), sort_key(e.exponent))
        elif isinstance(e, Mul):
            k = (6, len(e.factors), tuple(sort_key(f) for f in e.factors))
        else:
            k = (7, len(e.terms), tuple(sort_key(t) for t in e.terms))
        object.__setattr__(e, "_key", k)
    return k


# ---------------------------------------------------------------------------
# canonicalizing constructors

def _coeff_core(t: Expr):
    """Split a non-Rat canonical term into (rational coefficient, coefficient-free core)."""
    if isinstance(t, Mul) and isinstance(t.factors[0], Rat):
        rest = t.factors[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return t.factors[0].value, core
    return Fraction(1), t


def _with_coeff(c: Fraction, core: Expr) -> Expr:
    if c == 1:
        return core
    if isinstance(core, Mul):
        return Mul((Rat(c),) + core.factors)
    return Mul((Rat(c), core))


def add(*terms) -> Expr:
    flat = []
    stack = [as_expr(t) for t in terms]
    for t in stack:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    const = Fraction(0)
    groups: dict[Expr, Fraction] = {}
    for t in flat:
        if isinstance(t, Rat):
            const += t.value
            continue
        c, core = _coeff_core(t)
        groups[core] = groups.get(core, Fraction(0)) + c
    parts = [_with_coeff(c, core) for core, c in groups.items() if c != 0]
    if const != 0:
        parts.append(Rat(const))
    if not parts:
        return ZERO
    if len(parts) == 1:
        return parts[0]
    parts.sort(key=sort_key)
    return Add(tuple(parts))


def mul(*factors) -> Expr:
    flat = []
    for f in (as_expr(f) for f in factors):
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(f)
    coeff = Fraction(1)
    powmap: dict = {}  # base Expr or "exp" sentinel -> list of exponent Exprs
    order: list = []
    _EXP = ("exp-sentinel",)
    for f in flat:
        if isinstance(f, Rat):
            if f.value == 0:
                return ZERO
            coeff *= f.value
            continue
        if isinstance(f, Pow):
            base, e = f.base, f.exponent
        elif isinstance(f, Fn) and f.name == "exp":
            base, e = _EXP, f.arg
        else:
            base, e = f, ONE
        key = base if not isinstance(base, tuple) else base
        if key in powmap:
            powmap[key].append(e)
        else:
            powmap[key] = [e]
            order.append(key)
    parts = []
    for key in order:
        exps = powmap[key]
        etot = exps[0] if len(exps) == 1 else add(*exps)
        if key is _EXP or (isinstance(key, tuple)):
            rebuilt = fn("exp", etot)
        else:
            rebuilt = pow_(key, etot)
        if isinstance(rebuilt, Rat):
            if rebuilt.value == 0:
                return ZERO
            coeff *= rebuilt.value
        elif isinstance(rebuilt, Mul):
            # pow_ may split (e.g. rational-root folding); fold its pieces
            for g in rebuilt.factors:
                if isinstance(g, Rat):
                    coeff *= g.value
                else:
                    parts.append(g)
        else:
            parts.append(rebuilt)
    if coeff == 0:
        return ZERO
    if not parts:
        return Rat(coeff)
    if len(parts) == 1:
        if coeff == 1:
            return parts[0]
        if isinstance(parts[0], Add):
            # a pure scalar multiple of a sum distributes, so that sums cancel
            c = Rat(coeff)
            return add(*(mul(c, t) for t in parts[0].terms))
    if coeff != 1:
        parts.append(Rat(coeff))
    parts.sort(key=sort_key)
    return parts[0] if len(parts) == 1 else Mul(tuple(parts))


def _perfect_root(n: int, q: int):
    if n < 0:
        return None
    r = round(n ** (1.0 / q)) if n > 0 else 0
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def pow_(base, exponent) -> Expr:
    b = as_expr(base)
    e = as_expr(exponent)
    if isinstance(e, Rat):
        if e.value == 0:
            return ONE
        if e.value == 1:
            return b
        if isinstance(b, Rat):
            if e.value.denominator == 1:
                n = e.value.numerator
                if b.value == 0 and n < 0:
                    raise ExprError("0 raised to a negative power")
                return Rat(b.value**n)
            if b.value == 0:
                return ZERO if e.value > 0 else _raise_zero_pow()
            if b.value > 0:
                p, q = e.value.numerator, e.value.denominator
                rn = _perfect_root(b.value.numerator, q)
                rd = _perfect_root(b.value.denominator, q)
                if rn is not None and rd is not None:
                    return Rat(Fraction(rn, rd) ** p)
            return Pow(b, e)
        if e.value.denominator == 1:
            n = e.value.numerator
            if isinstance(b, Mul):
                return mul(*(pow_(f, n) for f in b.factors))
            if isinstance(b, Pow):
                return pow_(b.base, mul(b.exponent, Rat(n)))
        if isinstance(b, Fn) and b.name == "exp":
            return fn("exp", mul(e, b.arg))
    if isinstance(b, Rat) and b.value == 1:
        return ONE
    return Pow(b, e)


def _raise_zero_pow():
    raise ExprError("0 raised to a negative power")


def _split_log_multiple(term: Expr):
    """Return (base, rational exponent) if term == r*log(base), else None."""
    if isinstance(term, Fn) and term.name == "log":
        return term.arg, Fraction(1)
    if isinstance(term, Mul) and len(term.factors) == 2:
        a, b = term.factors
        if isinstance(a, Rat) and isinstance(b, Fn) and b.name == "log":
            return b.arg, a.value
    return None


def fn(name: str, arg) -> Expr:
    a = as_expr(arg)
    if name not in FN_NAMES:
        raise ExprError(f"unknown function {name!r}")
    if name == "exp":
        if a == ZERO:
            return ONE
        if isinstance(a, Fn) and a.name == "log":
            return a.arg
        hit = _split_log_multiple(a)
        if hit is not None:
            return pow_(hit[0], Rat(hit[1]))
        if isinstance(a, Add):
            pows, rest = [], []
            for t in a.terms:
                h = _split_log_multiple(t)
                if h is not None:
                    pows.append(pow_(h[0], Rat(h[1])))
                else:
                    rest.append(t)
            if pows:
                return mul(*pows, Fn("exp", add(*rest)) if rest else ONE)
    elif name == "log":
        if a == ONE:
            return ZERO
        if isinstance(a, Fn) and a.name == "exp":
            return a.arg
        if isinstance(a, Pow) and isinstance(a.exponent, Rat):
            return mul(a.exponent, fn("log", a.base))
    elif name == "sin" or name == "tan":
        if a == ZERO:
            return ZERO
    elif name == "cos":
        if a == ZERO:
            return ONE
    return Fn(name, a)


def opaque(name: str, order: int, arg) -> Expr:
    return Opaque(name, order, as_expr(arg))


# ---------------------------------------------------------------------------
# expansion (distribute products over sums); used by exact-equality checks

def expand(e: Expr) -> Expr:
    if isinstance(e, (Rat, Sym, Var)):
        return e
    if isinstance(e, Add):
        return add(*(expand(t) for t in e.terms))
    if isinstance(e, Mul):
        parts = [expand(f) for f in e.factors]
        sums: list[list[Expr]] = [[ONE]]
        for p in parts:
            terms = list(p.terms) if isinstance(p, Add) else [p]
            sums = [acc + [t] for acc in sums for t in terms]
        return add(*(mul(*combo) for combo in sums))
    if isinstance(e, Pow):
        b = expand(e.base)
        ex = expand(e.exponent)
        if isinstance(b, Add) and isinstance(ex, Rat) and ex.value.denominator == 1:
            n = ex.value.numerator
            # distribute over term tuples; repeated mul() of the whole sum
            # would just re-merge into the power being expanded
            if 0 < n <= 16:
                combos: list[list[Expr]] = [[]]
                for _ in range(n):
                    combos = [acc + [t] for acc in combos for t in b.terms]
                return add(*(mul(*combo) for combo in combos))
            if -16 <= n < 0:
                inner = expand(pow_(b, -n))
                return pow_(inner, MINUS_ONE)
        return pow_(b, ex)
    if isinstance(e, Fn):
        return fn(e.name, expand(e.arg))
    if isinstance(e, Opaque):
        return Opaque(e.name, e.order, expand(e.arg))
    raise ExprError(f"unexpected node {type(e)}")


def equal0(e: Expr) -> bool:
    """True if e expands and canonicalizes to exactly 0."""
    return expand(e) == ZERO


def equal_canonical(a: Expr, b: Expr) -> bool:
    return a == b or equal0(a - b)


# ---------------------------------------------------------------------------
# differentiation

_diff_cache: dict = {}


def _diff1(e: Expr, v: str) -> Expr:
    key = (e, v)
    hit = _diff_cache.get(key)
    if hit is not None:
        return hit
    if isinstance(e, (Rat, Sym)):
        out = ZERO
    elif isinstance(e, Var):
        out = ONE if e.name == v else ZERO
    elif isinstance(e, Add):
        out = add(*(_diff1(t, v) for t in e.terms))
    elif isinstance(e, Mul):
        pieces = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff1(f, v)
            if df == ZERO:
                continue
            pieces.append(mul(df, *fs[:i], *fs[i + 1 :]))
        out = add(*pieces) if pieces else ZERO
    elif isinstance(e, Pow):
        b, ex = e.base, e.exponent
        dex = _diff1(ex, v)
        db = _diff1(b, v)
        if dex == ZERO:
            out = ZERO if db == ZERO else mul(ex, db, pow_(b, ex - 1))
        else:
            out = mul(e, add(mul(dex, fn("log", b)), mul(ex, db, pow_(b, -1))))
    elif isinstance(e, Fn):
        da = _diff1(e.arg, v)
        if da == ZERO:
            out = ZERO
        else:
            a = e.arg
            if e.name == "exp":
                core = e
            elif e.name == "log":
                core = pow_(a, -1)
            elif e.name == "sin":
                core = fn("cos", a)
            elif e.name == "cos":
                core = mul(MINUS_ONE, fn("sin", a))
            else:  # tan
                core = add(ONE, pow_(fn("tan", a), 2))
            out = mul(core, da)
    elif isinstance(e, Opaque):
        da = _diff1(e.arg, v)
        out = ZERO if da == ZERO else mul(Opaque(e.name, e.order + 1, e.arg), da)
    else:
        raise ExprError(f"unexpected node {type(e)}")
    _diff_cache[key] = out
    return out


def diff(e: Expr, v: str, order: int = 1) -> Expr:
    if order < 0:
        raise ExprError("derivative order must be nonnegative")
    out = e
    for _ in range(order):
        out = _diff1(out, v)
    return out


def differentiate(e: Expr, order: int = 1, v: str | None = None) -> Expr:
    """Differentiate with respect to the expression's variable (unique Var)."""
    if v is None:
        names = free_vars(e)
        if len(names) > 1:
            raise ExprError(f"ambiguous variable: {sorted(names)}")
        v = next(iter(names)) if names else "_"
    return diff(e, v, order)


# ---------------------------------------------------------------------------
# substitution

def substitute_var(e: Expr, name: str, repl: Expr) -> Expr:
    if isinstance(e, Var):
        return repl if e.name == name else e
    if isinstance(e, (Rat, Sym)):
        return e
    if isinstance(e, Add):
        return add(*(substitute_var(t, name, repl) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute_var(f, name, repl) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(substitute_var(e.base, name, repl), substitute_var(e.exponent, name, repl))
    if isinstance(e, Fn):
        return fn(e.name, substitute_var(e.arg, name, repl))
    if isinstance(e, Opaque):
        return Opaque(e.name, e.order, substitute_var(e.arg, name, repl))
    raise ExprError(f"unexpected node {type(e)}")


def substitute_param(e: Expr, name: str, repl: Expr) -> Expr:
    if isinstance(e, Sym):
        return repl if e.name == name else e
    if isinstance(e, (Rat, Var)):
        return e
    if isinstance(e, Add):
        return add(*(substitute_param(t, name, repl) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute_param(f, name, repl) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(substitute_param(e.base, name, repl), substitute_param(e.exponent, name, repl))
    if isinstance(e, Fn):
        return fn(e.name, substitute_param(e.arg, name, repl))
    if isinstance(e, Opaque):
        return Opaque(e.name, e.order, substitute_param(e.arg, name, repl))
    raise ExprError(f"unexpected node {type(e)}")


def substitute_opaque(e: Expr, name: str, repl: Expr, repl_var: str | None = None) -> Expr:
    """Replace the opaque symbol `name` by a concrete expression.

    An occurrence of order k becomes the k-th derivative of `repl` evaluated
    at the occurrence's argument.
    """
    if repl_var is None:
        names = free_vars(repl)
        if len(names) > 1:
            raise ExprError(f"ambiguous replacement variable: {sorted(names)}")
        repl_var = next(iter(names)) if names else "_"
    derivs: dict[int, Expr] = {0: repl}

    def image(k: int) -> Expr:
        while k not in derivs:
            m = max(derivs)
            derivs[m + 1] = _diff1(derivs[m], repl_var)
        return derivs[k]

    def walk(x: Expr) -> Expr:
        if isinstance(x, (Rat, Sym, Var)):
            return x
        if isinstance(x, Add):
            return add(*(walk(t) for t in x.terms))
        if isinstance(x, Mul):
            return mul(*(walk(f) for f in x.factors))
        if isinstance(x, Pow):
            return pow_(walk(x.base), walk(x.exponent))
        if isinstance(x, Fn):
            return fn(x.name, walk(x.arg))
        if isinstance(x, Opaque):
            arg = walk(x.arg)
            if x.name != name:
                return Opaque(x.name, x.order, arg)
            return substitute_var(image(x.order), repl_var, arg)
        raise ExprError(f"unexpected node {type(x)}")

    return walk(e)


def substitute(e: Expr, target, repl) -> Expr:
    """Dispatching substitution: target may be a Var, a Sym, or an opaque name."""
    repl = as_expr(repl)
    if isinstance(target, Var):
        return substitute_var(e, target.name, repl)
    if isinstance(target, Sym):
        return substitute_param(e, target.name, repl)
    if isinstance(target, str):
        if target in opaque_names(e):
            return substitute_opaque(e, target, repl)
        if target in free_vars(e):
            return substitute_var(e, target, repl)
        return substitute_param(e, target, repl)
    raise ExprError(f"bad substitution target {target!r}")


# ---------------------------------------------------------------------------
# structure queries

def free_vars(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, Add):
            stack.extend(x.terms)
        elif isinstance(x, Mul):
            stack.extend(x.factors)
        elif isinstance(x, Pow):
            stack.append(x.base)
            stack.append(x.exponent)
        elif isinstance(x, (Fn, Opaque)):
            stack.append(x.arg)
    return out


def free_params(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Sym):
            out.add(x.name)
        elif isinstance(x, Add):
            stack.extend(x.terms)
        elif isinstance(x, Mul):
            stack.extend(x.factors)
        elif isinstance(x, Pow):
            stack.append(x.base)
            stack.append(x.exponent)
        elif isinstance(x, (Fn, Opaque)):
            stack.append(x.arg)
    return out


def opaque_names(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Opaque):
            out.add(x.name)
            stack.append(x.arg)
        elif isinstance(x, Add):
            stack.extend(x.terms)
        elif isinstance(x, Mul):
            stack.extend(x.factors)
        elif isinstance(x, Pow):
            stack.append(x.base)
            stack.append(x.exponent)
        elif isinstance(x, Fn):
            stack.append(x.arg)
    return out


# ---------------------------------------------------------------------------
# numeric evaluation

class NotRationalError(ExprError):
    pass


def evaluate_exact(e: Expr, at: Fraction,
                   params: dict[str, Fraction] | None = None) -> Fraction:
    """Exact rational evaluation; raises NotRationalError on transcendental or
    opaque content and ZeroDivisionError at poles."""

    def ev(x: Expr) -> Fraction:
        if isinstance(x, Rat):
            return x.value
        if isinstance(x, Var):
            return at
        if isinstance(x, Sym):
            if params and x.name in params:
                return params[x.name]
            raise NotRationalError(f"parameter {x.name!r} has no rational value")
        if isinstance(x, Add):
            out = Fraction(0)
            for t in x.terms:
                out += ev(t)
            return out
        if isinstance(x, Mul):
            out = Fraction(1)
            for f in x.factors:
                out *= ev(f)
            return out
        if isinstance(x, Pow):
            expo = ev(x.exponent)
            if expo.denominator != 1:
                raise NotRationalError("non-integer exponent")
            return ev(x.base) ** expo.numerator
        raise NotRationalError(f"{type(x).__name__} node is not rational")

    return ev(e)


class Binding:
    """Numeric values for parameters plus concrete expressions for opaque symbols."""

    def __init__(self, params: dict[str, float] | None = None,
                 funcs: dict[str, Expr] | None = None):
        self.params = dict(params or {})
        self.funcs: dict[str, tuple[str, Expr]] = {}
        self._deriv_cache: dict[tuple[str, int], Expr] = {}
        for name, fe in (funcs or {}).items():
            fe = as_expr(fe)
            names = free_vars(fe)
            if len(names) > 1:
                raise ExprError(f"bound function {name!r} has several variables")
            v = next(iter(names)) if names else "_"
            self.funcs[name] = (v, fe)

    def func_derivative(self, name: str, order: int) -> tuple[str, Expr]:
        if name not in self.funcs:
            raise UnboundSymbolError(f"opaque function {name!r} is not bound")
        v, fe = self.funcs[name]
        key = (name, order)
        if key not in self._deriv_cache:
            self._deriv_cache[key] = diff(fe, v, order)
        return v, self._deriv_cache[key]

    def with_params(self, **extra) -> "Binding":
        b = Binding(self.params | extra, {})
        b.funcs = self.funcs
        b._deriv_cache = self._deriv_cache
        return b


EMPTY_BINDING = Binding()


def evaluate(e: Expr, at: float, bind: Binding | None = None,
             eps_pole: float = EPS_POLE) -> float:
    """Evaluate at a point; every Var is the evaluation point (one variable per context)."""
    b = bind or EMPTY_BINDING
    memo: dict[int, float] = {}

    def ev(x: Expr) -> float:
        key = id(x)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = _ev(x)
        memo[key] = out
        return out

    def _ev(x: Expr) -> float:
        if isinstance(x, Rat):
            return float(x.value)
        if isinstance(x, Var):
            return float(at)
        if isinstance(x, Sym):
            try:
                return float(b.params[x.name])
            except KeyError:
                raise UnboundSymbolError(f"parameter {x.name!r} is not bound") from None
        if isinstance(x, Add):
            return math.fsum(ev(t) for t in x.terms)
        if isinstance(x, Mul):
            out = 1.0
            for f in x.factors:
                out *= ev(f)
            return out
        if isinstance(x, Pow):
            base = ev(x.base)
            expo = ev(x.exponent)
            if expo < 0 and abs(base) < eps_pole:
                raise PoleError(f"divisor magnitude {abs(base):.3e} below pole guard")
            if base < 0:
                if isinstance(x.exponent, Rat) and x.exponent.value.denominator == 1:
                    return base ** x.exponent.value.numerator
                if expo == round(expo):
                    return base ** int(round(expo))
                raise EvalDomainError("negative base with non-integer exponent")
            if base == 0 and expo == 0:
                return 1.0
            try:
                return base**expo
            except OverflowError:
                return math.inf
        if isinstance(x, Fn):
            a = ev(x.arg)
            if x.name == "exp":
                try:
                    return math.exp(a)
                except OverflowError:
                    return math.inf
            if x.name == "log":
                if a <= 0:
                    raise EvalDomainError("log of non-positive value")
                if a < eps_pole:
                    raise PoleError("log argument inside pole guard")
                return math.log(a)
            if x.name == "sin":
                return math.sin(a)
            if x.name == "cos":
                return math.cos(a)
            if abs(math.cos(a)) < eps_pole:
                raise PoleError("tan at a pole")
            return math.tan(a)
        if isinstance(x, Opaque):
            a = ev(x.arg)
            _, d = b.func_derivative(x.name, x.order)
            return evaluate(d, a, b, eps_pole)
        raise ExprError(f"unexpected node {type(x)}")

    return ev(e)
