"""qsusy: quasi-solvable differential operators and their verification suites."""

__version__ = "0.1.0"

from .expr import (  # noqa: F401
    Expr, Rat, Sym, Var, Add, Mul, Pow, Fn, Opaque, Binding,
    ExprError, EvalError, PoleError, UnboundSymbolError, EvalDomainError,
    add, mul, pow_, fn, opaque, rat, sym, var, as_expr,
    diff, differentiate, substitute, substitute_var, substitute_param,
    substitute_opaque, evaluate, expand, equal0, equal_canonical,
)
from .parser import parse, to_string, ParseError  # noqa: F401
