"""Constructors for the named quasi-solvable operator families.

Two independent construction routes are provided wherever the source material
gives one: the J/K-basis sums versus the direct coefficient assembly for the
gauged Hamiltonians, the monomial-family rescalings versus the raw operators,
and the K-gallery versus its conjugated-substituted derivation from the
J-gallery.  Cross-checks between routes live in the verification suites.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .expr import (
    Expr, Rat, Var, ZERO, ONE, MINUS_ONE,
    add, mul, pow_, opaque, as_expr, diff, expand, equal0, var,
)
from .diffop import (
    DiffOp, OperatorError, compose, gauge_conjugate, pullback,
)


class DegenerateFunctionError(OperatorError):
    """The generating function has identically vanishing second derivative."""


class ParameterError(OperatorError):
    pass


# ---------------------------------------------------------------------------
# generating-function context

class FContext:
    """Supplies f, f', f'', ... either as opaque symbols or from a concrete Expr."""

    def __init__(self, f: Expr | None = None, variable: str = "z", name: str = "f"):
        self.variable = variable
        self.name = name
        self.concrete = f
        if f is not None:
            if diff(f, variable, 2) == ZERO:
                raise DegenerateFunctionError(
                    "generating function must have nonzero second derivative")

    def __call__(self, order: int = 0) -> Expr:
        if self.concrete is None:
            return opaque(self.name, order, Var(self.variable))
        return diff(self.concrete, self.variable, order)


def _fctx(f, variable="z") -> FContext:
    if isinstance(f, FContext):
        return f
    return FContext(as_expr(f) if f is not None else None, variable)


# ---------------------------------------------------------------------------
# the J and K galleries (arbitrary generating function)

def build_J(i: int, f: Expr | FContext | None = None, variable: str = "z") -> DiffOp:
    """Second-order operators preserving span{1, x, f(x)}; i in 1..9."""
    if not 1 <= i <= 9:
        raise ParameterError("J index must be in 1..9")
    fc = _fctx(f, variable)
    v = fc.variable
    x = Var(v)
    inv_fpp = pow_(fc(2), -1)
    D1 = DiffOp.d(v)
    D2 = DiffOp.d(v, 2)
    if i == 1:
        return D2.scaled(inv_fpp)
    if i == 2:
        return D2.scaled(mul(x, inv_fpp))
    if i == 3:
        return D2.scaled(mul(fc(0), inv_fpp))
    J4 = D2.scaled(mul(fc(1), inv_fpp)) - D1
    if i == 4:
        return J4
    if i == 5:
        return J4.scaled(x)
    if i == 6:
        return J4.scaled(fc(0))
    J9 = (D2.scaled(mul(add(mul(x, fc(1)), mul(MINUS_ONE, fc(0))), inv_fpp))
          - D1.scaled(x) + DiffOp.identity(v))
    if i == 9:
        return J9
    if i == 7:
        return J9.scaled(x)
    return J9.scaled(fc(0))


def build_K(i: int, f: Expr | FContext | None = None, variable: str = "z") -> DiffOp:
    """Second-order operators preserving (1/f'')·span{1, f', x f' - f}; i in 0..8."""
    if not 0 <= i <= 8:
        raise ParameterError("K index must be in 0..8")
    fc = _fctx(f, variable)
    v = fc.variable
    x = Var(v)
    fpp, fppp, fpppp = fc(2), fc(3), fc(4)
    inv = pow_(fpp, -1)
    K0 = DiffOp(v, {1: inv, 0: mul(fppp, pow_(fpp, -2))})
    if i == 0:
        return K0
    K1 = DiffOp(v, {
        2: inv,
        1: mul(fppp, pow_(fpp, -2)),
        0: mul(add(mul(fpp, fpppp), mul(MINUS_ONE, pow_(fppp, 2))), pow_(fpp, -3)),
    })
    if i == 1:
        return K1
    if i == 2:
        return K1.scaled(x) - K0
    if i == 3:
        return K1.scaled(fc(0)) - K0.scaled(fc(1)) + DiffOp.identity(v)
    if i == 4:
        return K1.scaled(fc(1))
    if i == 5:
        return build_K(2, fc).scaled(fc(1))
    if i == 6:
        return build_K(3, fc).scaled(fc(1))
    wf = add(mul(x, fc(1)), mul(MINUS_ONE, fc(0)))
    if i == 7:
        return build_K(2, fc).scaled(wf)
    return build_K(3, fc).scaled(wf)


def build_P3_minus(f: Expr | FContext | None = None, variable: str = "z") -> DiffOp:
    """(d - f'''/f'') d²; annihilates span{1, x, f}. Leading multiplier dropped."""
    fc = _fctx(f, variable)
    v = fc.variable
    w2 = mul(MINUS_ONE, fc(3), pow_(fc(2), -1))
    return compose(DiffOp(v, {1: ONE, 0: w2}), DiffOp.d(v, 2))


def build_P3_plus(f: Expr | FContext | None = None, variable: str = "z") -> DiffOp:
    """-d² (d + f'''/f''); annihilates the partner space of build_K."""
    fc = _fctx(f, variable)
    v = fc.variable
    w2 = mul(fc(3), pow_(fc(2), -1))
    return compose(DiffOp.d(v, 2), DiffOp(v, {1: ONE, 0: w2})).scaled(MINUS_ONE)


# ---------------------------------------------------------------------------
# general coefficients and their alternative parameterization

def _coe(x) -> Expr:
    return as_expr(x)


@dataclass(frozen=True)
class GeneralCoefficients:
    """The nine constants defining the general space-preserving operator."""

    c0: Expr = ZERO
    c1: Expr = ZERO
    c2: Expr = ZERO
    b0: Expr = ZERO
    b1: Expr = ZERO
    b2: Expr = ZERO
    a0: Expr = ZERO
    a1: Expr = ZERO
    a2: Expr = ZERO

    def __post_init__(self):
        for name in ("c0", "c1", "c2", "b0", "b1", "b2", "a0", "a1", "a2"):
            object.__setattr__(self, name, _coe(getattr(self, name)))

    @classmethod
    def from_integration_constants(cls, C: Iterable) -> "GeneralCoefficients":
        """Build the (c, b, a) set from the eight constants C1..C8."""
        C1, C2, C3, C4, C5, C6, C7, C8 = (as_expr(x) for x in C)
        return cls(
            c2=mul(Rat(-2), C1), c1=mul(Rat(2), C3), c0=add(C4, C5),
            b2=mul(Rat(2), C2), b1=mul(Rat(-2), C5), b0=mul(MINUS_ONE, C6),
            a2=add(C5, mul(MINUS_ONE, C4)), a1=C7, a0=C8,
        )

    def to_integration_constants(self) -> tuple:
        """Invert back to C1..C8; requires the consistency relation c0+b1+a2 = 0."""
        if not equal0(add(self.c0, self.b1, self.a2)):
            raise ParameterError(
                "coefficients do not satisfy c0 + b1 + a2 = 0; "
                "no integration-constant parameterization exists")
        half = Fraction(1, 2)
        return (
            mul(Rat(-half), self.c2), mul(Rat(half), self.b2), mul(Rat(half), self.c1),
            mul(Rat(half), add(self.c0, mul(MINUS_ONE, self.a2))),
            mul(Rat(half), add(self.c0, self.a2)),
            mul(MINUS_ONE, self.b0), self.a1, self.a0,
        )


def build_H_minus(coeffs: GeneralCoefficients, f=None, variable: str = "z") -> DiffOp:
    """Gauged minus Hamiltonian as a J-gallery sum."""
    fc = _fctx(f, variable)
    v = fc.variable
    g = coeffs
    out = DiffOp.zero(v)
    for c, idx in ((mul(MINUS_ONE, g.c2), 8), (mul(MINUS_ONE, g.c1), 7), (g.b2, 6),
                   (add(g.b1, mul(MINUS_ONE, g.c0)), 5), (g.b0, 4),
                   (mul(MINUS_ONE, add(g.a2, mul(MINUS_ONE, g.c0))), 3),
                   (mul(MINUS_ONE, g.a1), 2), (mul(MINUS_ONE, g.a0), 1)):
        if c != ZERO:
            out = out + build_J(idx, fc).scaled(c)
    return out + DiffOp.mult(v, mul(MINUS_ONE, g.c0))


def abc_profile(coeffs: GeneralCoefficients, f=None, variable: str = "z"):
    """The (A, B, C) coefficient functions of the gauged minus Hamiltonian."""
    fc = _fctx(f, variable)
    x = Var(fc.variable)
    g = coeffs
    f0, f1, f2 = fc(0), fc(1), fc(2)
    bracket = add(mul(add(mul(g.c2, x), mul(MINUS_ONE, g.b2)), f0),
                  mul(g.c1, pow_(x, 2)),
                  mul(add(g.c0, mul(MINUS_ONE, g.b1)), x),
                  mul(MINUS_ONE, g.b0))
    C = add(mul(g.c2, f0), mul(g.c1, x), g.c0)
    A_fpp = add(mul(bracket, f1),
                mul(MINUS_ONE, add(C, mul(MINUS_ONE, g.a2)), f0),
                mul(g.a1, x), g.a0)
    A = mul(expand(A_fpp), pow_(f2, -1))
    B = mul(MINUS_ONE, add(bracket, ZERO))
    return A, B, C


def build_H_minus_direct(coeffs: GeneralCoefficients, f=None, variable: str = "z") -> DiffOp:
    """Gauged minus Hamiltonian assembled straight from its (A, B, C) profile."""
    fc = _fctx(f, variable)
    A, B, C = abc_profile(coeffs, fc)
    v = fc.variable
    return DiffOp(v, {2: mul(MINUS_ONE, A), 1: mul(MINUS_ONE, B), 0: mul(MINUS_ONE, C)})


def build_H_plus(coeffs: GeneralCoefficients, f=None, variable: str = "z") -> DiffOp:
    """Gauged plus Hamiltonian as a K-gallery sum."""
    fc = _fctx(f, variable)
    v = fc.variable
    g = coeffs
    out = DiffOp.zero(v)
    for c, idx in ((mul(MINUS_ONE, g.c2), 8), (mul(MINUS_ONE, g.c1), 7), (g.b2, 6),
                   (add(g.b1, mul(MINUS_ONE, g.c0)), 5), (g.b0, 4),
                   (mul(MINUS_ONE, add(g.a2, mul(MINUS_ONE, g.c0))), 3),
                   (mul(MINUS_ONE, g.a1), 2), (mul(MINUS_ONE, g.a0), 1)):
        if c != ZERO:
            out = out + build_K(idx, fc).scaled(c)
    return out + DiffOp.mult(v, mul(MINUS_ONE, g.c0))


def build_H_plus_direct(coeffs: GeneralCoefficients, f=None, variable: str = "z") -> DiffOp:
    """Gauged plus Hamiltonian from the (A, Q, C) route with the supercharge tail."""
    fc = _fctx(f, variable)
    v = fc.variable
    A, B, C = abc_profile(coeffs, fc)
    Ap = diff(A, v)
    Q = add(B, mul(Rat(Fraction(1, 2)), Ap))
    w2 = mul(MINUS_ONE, fc(3), pow_(fc(2), -1))
    zero_term = add(mul(MINUS_ONE, C), mul(Rat(-2), diff(Q, v)),
                    mul(Ap, w2), mul(Rat(2), A, diff(w2, v)))
    return DiffOp(v, {
        2: mul(MINUS_ONE, A),
        1: add(mul(Rat(Fraction(1, 2)), Ap), Q),
        0: zero_term,
    })


# ---------------------------------------------------------------------------
# monomial families (power-function generating functions)

def _lam(x) -> Expr:
    e = as_expr(x)
    if isinstance(e, Rat) and e.value in (0, 1):
        raise ParameterError("family exponent 0 or 1 degenerates the normalization")
    if isinstance(e, Rat) and e.value in (-2, -1, 2, 3):
        warnings.warn(
            f"family exponent {e.value} lies in the documented exclusion range; "
            "the three-dimensional space degenerates to a lower type there",
            stacklevel=3)
    return e


def monomial_J(i: int, lam, variable: str = "z") -> DiffOp:
    """Rescaled J-gallery for f = x^lam, polynomial in the exponent."""
    lam = _lam(lam)
    v = variable
    x = Var(v)
    D1, D2 = DiffOp.d(v), DiffOp.d(v, 2)
    lm1 = add(lam, MINUS_ONE)
    if i == 1:
        return D2.scaled(pow_(x, add(Rat(2), mul(MINUS_ONE, lam))))
    if i == 2:
        return D2.scaled(pow_(x, add(Rat(3), mul(MINUS_ONE, lam))))
    if i == 3:
        return D2.scaled(pow_(x, 2))
    if i == 4:
        return D2.scaled(x) - D1.scaled(lm1)
    if i == 5:
        return D2.scaled(pow_(x, 2)) - D1.scaled(mul(lm1, x))
    if i == 6:
        return D2.scaled(pow_(x, add(lam, ONE))) - D1.scaled(mul(lm1, pow_(x, lam)))
    if i == 7:
        return (D2.scaled(pow_(x, 3)) - D1.scaled(mul(lam, pow_(x, 2)))
                + DiffOp.mult(v, mul(lam, x)))
    if i == 8:
        return (D2.scaled(pow_(x, add(lam, Rat(2))))
                - D1.scaled(mul(lam, pow_(x, add(lam, ONE))))
                + DiffOp.mult(v, mul(lam, pow_(x, lam))))
    raise ParameterError("index must be in 1..8")


def monomial_K(i: int, lam, variable: str = "z") -> DiffOp:
    """Rescaled K-gallery for f = x^lam."""
    lam = _lam(lam)
    v = variable
    x = Var(v)
    D1, D2 = DiffOp.d(v), DiffOp.d(v, 2)
    lm2 = add(lam, Rat(-2))
    lm3 = add(lam, Rat(-3))
    if i == 1:
        return (D2.scaled(pow_(x, add(Rat(2), mul(MINUS_ONE, lam))))
                + D1.scaled(mul(lm2, pow_(x, add(ONE, mul(MINUS_ONE, lam)))))
                - DiffOp.mult(v, mul(lm2, pow_(x, mul(MINUS_ONE, lam)))))
    if i == 2:
        return (D2.scaled(pow_(x, add(Rat(3), mul(MINUS_ONE, lam))))
                + D1.scaled(mul(lm3, pow_(x, add(Rat(2), mul(MINUS_ONE, lam)))))
                - DiffOp.mult(v, mul(Rat(2), lm2, pow_(x, add(ONE, mul(MINUS_ONE, lam))))))
    if i == 3:
        return D2.scaled(pow_(x, 2)) - D1.scaled(mul(Rat(2), x)) + DiffOp.mult(v, Rat(2))
    if i == 4:
        return (D2.scaled(x) + D1.scaled(lm2)
                - DiffOp.mult(v, mul(lm2, pow_(x, -1))))
    if i == 5:
        return (D2.scaled(pow_(x, 2)) + D1.scaled(mul(lm3, x))
                - DiffOp.mult(v, mul(Rat(2), lm2)))
    if i == 6:
        return (D2.scaled(pow_(x, add(lam, ONE))) - D1.scaled(mul(Rat(2), pow_(x, lam)))
                + DiffOp.mult(v, mul(Rat(2), pow_(x, add(lam, MINUS_ONE)))))
    if i == 7:
        return (D2.scaled(pow_(x, 3)) + D1.scaled(mul(lm3, pow_(x, 2)))
                - DiffOp.mult(v, mul(Rat(2), lm2, x)))
    if i == 8:
        return (D2.scaled(pow_(x, add(lam, Rat(2))))
                - D1.scaled(mul(Rat(2), pow_(x, add(lam, ONE))))
                + DiffOp.mult(v, mul(Rat(2), pow_(x, lam))))
    raise ParameterError("index must be in 0..8")


_FAMILY_EXPONENT = {"A": Fraction(2), "B": Fraction(3)}


def monomial_family(kind: str, lam=None, variable: str = "z") -> dict[str, list[DiffOp]]:
    """The rescaled J and K operator lists for a monomial invariant space.

    kind "C" takes a free exponent; kinds "B" and "A" force exponents 3 and 2.
    """
    kind = kind.upper()
    if kind in _FAMILY_EXPONENT:
        lam = Rat(_FAMILY_EXPONENT[kind])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return {"J": [monomial_J(i, lam, variable) for i in range(1, 9)],
                    "K": [monomial_K(i, lam, variable) for i in range(1, 9)]}
    if kind != "C":
        raise ParameterError(f"unknown family kind {kind!r}")
    if lam is None:
        raise ParameterError("kind C requires an exponent")
    return {"J": [monomial_J(i, lam, variable) for i in range(1, 9)],
            "K": [monomial_K(i, lam, variable) for i in range(1, 9)]}


def monomial_normalizers(lam) -> dict[str, Expr]:
    """Scale factors s_i with s_i * J_i == rescaled gallery entry (same for K)."""
    lam = as_expr(lam)
    lm1 = add(lam, MINUS_ONE)
    ll = mul(lam, lm1)
    return {"J1": ll, "J2": ll, "J3": ll, "J4": lm1, "J5": lm1, "J6": lm1,
            "J7": lam, "J8": lam,
            "K1": ll, "K2": ll, "K3": ll, "K4": lm1, "K5": lm1, "K6": lm1,
            "K7": lam, "K8": lam}


# ---------------------------------------------------------------------------
# operators already catalogued elsewhere, by family

def _euler_chain(v: str, pre: Expr, shifts: list[Expr], left_d: bool = False) -> DiffOp:
    """pre * (x d - s1)(x d - s2)...; with left_d the first factor is a bare d."""
    x = Var(v)
    out = DiffOp.identity(v)
    for s in shifts:
        out = compose(out, DiffOp(v, {1: x, 0: mul(MINUS_ONE, as_expr(s))}))
    if left_d:
        out = compose(DiffOp.d(v), out)
    return out.scaled(pre)


def literature_ops(family: str, side: str = "minus", parameter=None,
                   variable: str = "z") -> dict[str, DiffOp]:
    """Previously catalogued second-order operators for each family."""
    family = family.upper()
    v = variable
    x = Var(v)
    D1, D2 = DiffOp.d(v), DiffOp.d(v, 2)
    xd = DiffOp(v, {1: x})
    if family == "X2":
        from .x2 import literature_x2

        ops = {f"{'J' if side == 'minus' else 'K'}{i}": literature_x2(i, side, parameter)
               for i in range(1, 5)}
        return ops
    if family == "C":
        lam = as_expr(parameter)
        if side == "minus":
            return {
                "J0": xd,
                "J0-": _euler_chain(v, ONE, [lam], left_d=True),
                "J00": D2.scaled(pow_(x, 2)),
                "J+0": _euler_chain(v, x, [lam, ONE]),
                "J#-": _euler_chain(v, pow_(x, lam), [lam], left_d=True),
                "J#0": _euler_chain(v, pow_(x, lam), [lam, ONE]),
            }
        lm2 = add(lam, Rat(-2))
        return {
            "K0": xd - DiffOp.identity(v),
            "K0-": _euler_chain(v, pow_(x, -1), [mul(MINUS_ONE, lm2), ONE]),
            "K00": _euler_chain(v, ONE, [ONE, Rat(2)]),
            "K+0": _euler_chain(v, x, [mul(MINUS_ONE, lm2), Rat(2)]),
            "K#-": _euler_chain(v, pow_(x, mul(MINUS_ONE, lam)), [mul(MINUS_ONE, lm2), ONE]),
            "K#0": _euler_chain(v, pow_(x, add(ONE, mul(MINUS_ONE, lam))),
                                [mul(MINUS_ONE, lm2), Rat(2)]),
        }
    if family == "B":
        if side == "minus":
            return {
                "J0": xd,
                "J--": D2,
                "J0-": _euler_chain(v, ONE, [Rat(3)], left_d=True),
                "J00": D2.scaled(pow_(x, 2)),
                "J+0": _euler_chain(v, x, [Rat(3), ONE]),
                "J++": _euler_chain(v, pow_(x, 3), [Rat(3)], left_d=True),
                "J3+": _euler_chain(v, pow_(x, 3), [Rat(3), ONE]),
            }
        return {
            "K0": xd,
            "K--": _euler_chain(v, pow_(x, -2), [MINUS_ONE, Rat(2)]),
            "K0-": _euler_chain(v, pow_(x, -1), [MINUS_ONE, ONE]),
            "K00": D2.scaled(pow_(x, 2)),
            "K+0": _euler_chain(v, x, [Rat(2), MINUS_ONE]),
            "K++": _euler_chain(v, pow_(x, 2), [Rat(2), ONE]),
            "K3+": _euler_chain(v, pow_(x, 3), [Rat(2), ONE]),
        }
    if family == "A":
        ops = {
            "J-": D1,
            "J0": xd,
            "J+": _euler_chain(v, x, [Rat(2)]),
            "J--": D2,
            "J0-": D2.scaled(x),
            "J00": D2.scaled(pow_(x, 2)),
            "J+0": _euler_chain(v, pow_(x, 2), [Rat(2)], left_d=True),
            "J++": _euler_chain(v, pow_(x, 2), [Rat(2), ONE]),
        }
        if side == "minus":
            return ops
        return {"K" + k[1:]: op for k, op in ops.items()}
    raise ParameterError(f"unknown family {family!r}")


@dataclass(frozen=True)
class LiteratureBasisCoefficients:
    family: str
    values: dict


def expand_in_literature_basis(coeffs: GeneralCoefficients, family: str,
                               lam=None) -> LiteratureBasisCoefficients:
    """Coefficients expressing the gauged minus Hamiltonian over the catalogued basis."""
    family = family.upper()
    g = coeffs
    if family == "C":
        lam = as_expr(lam)
        lm1 = add(lam, MINUS_ONE)
        inv_l = pow_(lam, -1)
        inv_lm1 = pow_(lm1, -1)
        inv_ll = mul(inv_l, inv_lm1)
        vals = {
            "a3": mul(g.c1, inv_l),
            "a2": add(mul(MINUS_ONE, add(g.b1, mul(MINUS_ONE, g.c0)), inv_lm1),
                      mul(add(g.a2, mul(MINUS_ONE, g.c0)), inv_ll)),
            "a1": mul(MINUS_ONE, g.b0, inv_lm1),
            "b0": add(g.b1, mul(MINUS_ONE, g.c0)),
            "t8": mul(MINUS_ONE, g.c2, inv_l),
            "t6": mul(g.b2, inv_lm1),
            "t2": mul(MINUS_ONE, g.a1, inv_ll),
            "t1": mul(MINUS_ONE, g.a0, inv_ll),
            "const": mul(MINUS_ONE, g.c0),
        }
        return LiteratureBasisCoefficients("C", vals)
    if family == "B":
        sixth, half, third = Rat(Fraction(1, 6)), Rat(Fraction(1, 2)), Rat(Fraction(1, 3))
        vals = {
            "a++": mul(MINUS_ONE, half, g.b2),
            "a+0": mul(third, g.c1),
            # the c0 term enters with a plus sign (derived by collecting the
            # pure-Euler pieces; the printed map fails the reconstruction check)
            "a00": mul(sixth, add(g.a2, mul(Rat(-3), g.b1), mul(Rat(2), g.c0))),
            "a0-": mul(MINUS_ONE, half, g.b0),
            "a--": mul(sixth, g.a1),
            "b0": add(g.b1, mul(MINUS_ONE, g.c0)),
            "t8": mul(MINUS_ONE, third, g.c2),
            "t1": mul(MINUS_ONE, sixth, g.a0),
            "const": mul(MINUS_ONE, g.c0),
        }
        return LiteratureBasisCoefficients("B", vals)
    if family == "A":
        half = Rat(Fraction(1, 2))
        vals = {
            "a++": mul(half, g.c2),
            "a+0": mul(half, add(mul(Rat(-2), g.b2), g.c1)),
            "a00": mul(half, add(g.a2, mul(Rat(-2), g.b1), g.c0)),
            "a0-": mul(half, add(g.a1, mul(Rat(-2), g.b0))),
            "a--": mul(half, g.a0),
            "b+": mul(half, g.c1),
            "b0": add(mul(MINUS_ONE, g.b1), g.c0),
            "b-": mul(MINUS_ONE, g.b0),
            "const": mul(MINUS_ONE, g.c0),
        }
        return LiteratureBasisCoefficients("A", vals)
    raise ParameterError(f"unknown family {family!r}")


def assemble_from_literature_basis(lb: LiteratureBasisCoefficients, lam=None,
                                   variable: str = "z") -> DiffOp:
    """Rebuild the gauged minus Hamiltonian from literature-basis coefficients."""
    v = variable
    ops = literature_ops(lb.family, "minus", lam, v)
    vals = lb.values
    out = DiffOp.mult(v, vals["const"])
    if lb.family == "C":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = out + monomial_J(8, lam, v).scaled(vals["t8"])
            out = out + monomial_J(6, lam, v).scaled(vals["t6"])
            out = out + monomial_J(2, lam, v).scaled(vals["t2"])
            out = out + monomial_J(1, lam, v).scaled(vals["t1"])
        for name, key in (("J+0", "a3"), ("J00", "a2"), ("J0-", "a1"), ("J0", "b0")):
            out = out + ops[name].scaled(mul(MINUS_ONE, vals[key]))
        return out
    if lb.family == "B":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = out + monomial_J(8, Rat(3), v).scaled(vals["t8"])
            out = out + monomial_J(1, Rat(3), v).scaled(vals["t1"])
        for name, key in (("J++", "a++"), ("J+0", "a+0"), ("J00", "a00"),
                          ("J0-", "a0-"), ("J--", "a--"), ("J0", "b0")):
            out = out + ops[name].scaled(mul(MINUS_ONE, vals[key]))
        return out
    for name, key in (("J++", "a++"), ("J+0", "a+0"), ("J00", "a00"),
                      ("J0-", "a0-"), ("J--", "a--")):
        out = out + ops[name].scaled(mul(MINUS_ONE, vals[key]))
    for name, key in (("J+", "b+"), ("J0", "b0"), ("J-", "b-")):
        out = out + ops[name].scaled(vals[key])
    return out


# ---------------------------------------------------------------------------
# K-gallery from the J-gallery by substitution and conjugation

_K_FROM_J = {
    1: ((1, 1),),
    2: ((4, 1),),
    3: ((5, 1), (3, -1), (0, 1)),
    4: ((2, 1),),
    5: ((5, 1),),
    6: ((7, 1),),
    7: ((6, 1),),
    8: ((8, 1),),
}


def duality_K_from_J(i: int, f: Expr | FContext | None = None,
                     variable: str = "z") -> DiffOp:
    """Construct the i-th K operator from J operators in the derivative variable.

    The recipe: build the J combination in an auxiliary variable w, pull it
    back through w = f'(x) with the image of the opaque symbol being
    x f'(x) - f(x), then conjugate by 1/f''.
    """
    if i not in _K_FROM_J:
        raise ParameterError("K index must be in 1..8")
    fc = _fctx(f, variable)
    v = fc.variable
    aux = v + "_w"
    combo = DiffOp.zero(aux)
    for idx, coeff in _K_FROM_J[i]:
        term = DiffOp.identity(aux) if idx == 0 else build_J(idx, None, aux)
        combo = combo + term.scaled(Rat(coeff))
    x = Var(v)
    phi = fc(1)
    image0 = add(mul(x, fc(1)), mul(MINUS_ONE, fc(0)))
    pulled = pullback(combo, v, phi, {"f": image0})
    return gauge_conjugate(pow_(fc(2), -1), pulled)
