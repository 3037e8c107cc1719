"""Wronskian-frame operators on an arbitrary three-function basis and the
exceptional (codimension-two) polynomial subspaces.

Every operator here has two independent construction routes: the explicit
Wronskian-coefficient formulas, and conjugation of the plain-frame operators
through the substitution z = phi2/phi1, f = phi3/phi1.  The verification suite
cross-checks the routes because these formulas are the highest-transcription-
risk content in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .expr import (
    Expr, Rat, Var, ZERO, ONE, MINUS_ONE, ExprError,
    add, expand, mul, pow_, as_expr, diff, evaluate,
)
from .diffop import DiffOp, compose, gauge_conjugate, pullback
from .families import build_J, build_K, build_P3_minus, build_P3_plus, ParameterError
from .invariance import Subspace, SamplePlan, safe_points, ops_equal_numeric


class FrameError(ExprError):
    pass


U = "u"


@dataclass
class WronskianFrame:
    phi1: Expr
    phi2: Expr
    phi3: Expr
    variable: str = U

    def __post_init__(self):
        v = self.variable
        p = [as_expr(self.phi1), as_expr(self.phi2), as_expr(self.phi3)]
        self.phi1, self.phi2, self.phi3 = p
        dp = [diff(e, v) for e in p]
        self.W21 = add(mul(dp[1], p[0]), mul(MINUS_ONE, p[1], dp[0]))
        self.W31 = add(mul(dp[2], p[0]), mul(MINUS_ONE, p[2], dp[0]))
        self.W32 = add(mul(dp[2], p[1]), mul(MINUS_ONE, p[2], dp[1]))
        self.W3121 = add(mul(diff(self.W31, v), self.W21),
                         mul(MINUS_ONE, self.W31, diff(self.W21, v)))
        # expansion is needed to detect hidden proportionality of the columns
        if expand(self.W21) == ZERO or expand(self.W3121) == ZERO:
            raise FrameError("degenerate frame: a defining Wronskian vanishes identically")

    def wronskian(self, i: int, j: int) -> Expr:
        table = {(2, 1): self.W21, (3, 1): self.W31, (3, 2): self.W32}
        if (i, j) in table:
            return table[(i, j)]
        if (j, i) in table:
            return mul(MINUS_ONE, table[(j, i)])
        raise FrameError(f"no Wronskian W_{i},{j}")

    def span(self) -> Subspace:
        return Subspace([self.phi1, self.phi2, self.phi3], self.variable)

    def partner_span(self) -> Subspace:
        pref = mul(self.phi1, pow_(self.W3121, -1))
        return Subspace([self.W21, self.W31, self.W32], self.variable, pref)

    def check_nondegenerate(self, plan: SamplePlan = SamplePlan()):
        pts = safe_points([self.W21, self.W3121], plan, count=4)
        vals = [abs(evaluate(self.W21, float(x))) for x in pts]
        vals += [abs(evaluate(self.W3121, float(x))) for x in pts]
        if max(vals) < 1e-12:
            raise FrameError("frame Wronskians vanish at all probe points")


def _logd(e: Expr, v: str) -> Expr:
    return mul(diff(e, v), pow_(e, -1))


def _second_order_core(fr: WronskianFrame) -> DiffOp:
    v = fr.variable
    lw21 = _logd(fr.W21, v)
    zero_term = mul(add(mul(diff(fr.W21, v), diff(fr.phi1, v)),
                        mul(MINUS_ONE, fr.W21, diff(fr.phi1, v, 2))),
                    pow_(mul(fr.W21, fr.phi1), -1))
    return DiffOp(v, {2: ONE, 1: mul(MINUS_ONE, lw21), 0: zero_term})


def wronskian_J(i: int, fr: WronskianFrame) -> DiffOp:
    """Operators preserving span(phi1, phi2, phi3), from the printed coefficients."""
    if not 1 <= i <= 9:
        raise ParameterError("index must be in 1..9")
    v = fr.variable
    core = _second_order_core(fr)
    p1sq = pow_(fr.phi1, 2)
    inv3121 = pow_(fr.W3121, -1)
    first_tail = DiffOp(v, {1: ONE, 0: mul(MINUS_ONE, _logd(fr.phi1, v))})
    J1 = core.scaled(mul(fr.W21, p1sq, inv3121))
    if i == 1:
        return J1
    if i == 2:
        return J1.scaled(mul(fr.phi2, pow_(fr.phi1, -1)))
    if i == 3:
        return J1.scaled(mul(fr.phi3, pow_(fr.phi1, -1)))
    J4 = (core.scaled(mul(fr.W31, p1sq, inv3121))
          - first_tail.scaled(mul(p1sq, pow_(fr.W21, -1))))
    if i == 4:
        return J4
    if i == 5:
        return J4.scaled(mul(fr.phi2, pow_(fr.phi1, -1)))
    if i == 6:
        return J4.scaled(mul(fr.phi3, pow_(fr.phi1, -1)))
    J9 = (core.scaled(mul(fr.W32, p1sq, inv3121))
          - first_tail.scaled(mul(fr.phi2, fr.phi1, pow_(fr.W21, -1)))
          + DiffOp.identity(v))
    if i == 9:
        return J9
    if i == 7:
        return J9.scaled(mul(fr.phi2, pow_(fr.phi1, -1)))
    return J9.scaled(mul(fr.phi3, pow_(fr.phi1, -1)))


def wronskian_K(i: int, fr: WronskianFrame) -> DiffOp:
    """Operators preserving the partner span, from the printed coefficients."""
    if not 0 <= i <= 8:
        raise ParameterError("index must be in 0..8")
    v = fr.variable
    l1 = _logd(fr.phi1, v)
    l21 = _logd(fr.W21, v)
    l3121 = _logd(fr.W3121, v)
    K0 = DiffOp(v, {1: ONE, 0: mul(MINUS_ONE, add(l1, l21, mul(MINUS_ONE, l3121)))})
    K0 = K0.scaled(mul(pow_(fr.W21, 2), pow_(fr.W3121, -1)))
    if i == 0:
        return K0
    zero_term = add(
        mul(MINUS_ONE, diff(fr.phi1, v, 2), pow_(fr.phi1, -1)),
        mul(MINUS_ONE, diff(fr.W21, v, 2), pow_(fr.W21, -1)),
        mul(diff(fr.W3121, v, 2), pow_(fr.W3121, -1)),
        mul(Rat(2), pow_(l1, 2)),
        mul(MINUS_ONE, add(l1, mul(MINUS_ONE, l21), l3121), l3121),
    )
    K1 = DiffOp(v, {
        2: ONE,
        1: mul(MINUS_ONE, add(mul(Rat(2), l1), mul(MINUS_ONE, l3121))),
        0: zero_term,
    }).scaled(mul(fr.W21, pow_(fr.phi1, 2), pow_(fr.W3121, -1)))
    if i == 1:
        return K1
    r21 = mul(fr.phi2, pow_(fr.phi1, -1))
    r31 = mul(fr.phi3, pow_(fr.phi1, -1))
    w31_w21 = mul(fr.W31, pow_(fr.W21, -1))
    w32_w21 = mul(fr.W32, pow_(fr.W21, -1))
    K2 = K1.scaled(r21) - K0
    if i == 2:
        return K2
    K3 = K1.scaled(r31) - K0.scaled(w31_w21) + DiffOp.identity(v)
    if i == 3:
        return K3
    if i == 4:
        return K1.scaled(w31_w21)
    if i == 5:
        return K2.scaled(w31_w21)
    if i == 6:
        return K3.scaled(w31_w21)
    if i == 7:
        return K2.scaled(w32_w21)
    return K3.scaled(w32_w21)


def x2_supercharges(fr: WronskianFrame) -> tuple[DiffOp, DiffOp]:
    """Third-order annihilators of the span and of the partner span."""
    v = fr.variable
    l1 = _logd(fr.phi1, v)
    l21 = _logd(fr.W21, v)
    l3121 = _logd(fr.W3121, v)
    minus = compose(compose(
        DiffOp(v, {1: ONE, 0: add(l1, l21, mul(MINUS_ONE, l3121))}),
        DiffOp(v, {1: ONE, 0: add(l1, mul(MINUS_ONE, l21))})),
        DiffOp(v, {1: ONE, 0: mul(MINUS_ONE, l1)}))
    plus = compose(compose(
        DiffOp(v, {1: ONE, 0: l1}),
        DiffOp(v, {1: ONE, 0: add(mul(MINUS_ONE, l1), l21)})),
        DiffOp(v, {1: ONE, 0: add(mul(MINUS_ONE, l1), mul(MINUS_ONE, l21), l3121)}))
    return minus, plus.scaled(MINUS_ONE)


# ---------------------------------------------------------------------------
# conjugation route (cross-check)

def wronskian_J_via_conjugation(i: int, fr: WronskianFrame) -> DiffOp:
    v = fr.variable
    ratio2 = mul(fr.phi2, pow_(fr.phi1, -1))
    ratio3 = mul(fr.phi3, pow_(fr.phi1, -1))
    base = build_J(i, None, "z")
    pulled = pullback(base, v, ratio2, {"f": ratio3})
    return gauge_conjugate(fr.phi1, pulled)


def wronskian_K_via_conjugation(i: int, fr: WronskianFrame) -> DiffOp:
    v = fr.variable
    ratio2 = mul(fr.phi2, pow_(fr.phi1, -1))
    ratio3 = mul(fr.phi3, pow_(fr.phi1, -1))
    base = build_K(i, None, "z")
    pulled = pullback(base, v, ratio2, {"f": ratio3})
    g = mul(pow_(fr.phi1, 3), pow_(fr.W21, -2))
    return gauge_conjugate(g, pulled)


def supercharges_via_conjugation(fr: WronskianFrame) -> tuple[DiffOp, DiffOp]:
    """Cross-check route; rescaled to monic like the explicit factorizations.

    Dropping the overall change-of-variable multiplier in each picture leaves
    the two routes differing by (dz/du)^3 = (W21/phi1^2)^3; the leading factor
    commutes with the gauge, so it is reinstated at the end.
    """
    v = fr.variable
    ratio2 = mul(fr.phi2, pow_(fr.phi1, -1))
    ratio3 = mul(fr.phi3, pow_(fr.phi1, -1))
    lead = pow_(mul(fr.W21, pow_(fr.phi1, -2)), 3)
    minus = gauge_conjugate(fr.phi1,
                            pullback(build_P3_minus(None, "z"), v, ratio2, {"f": ratio3}))
    g = mul(pow_(fr.phi1, 3), pow_(fr.W21, -2))
    plus = gauge_conjugate(g,
                           pullback(build_P3_plus(None, "z"), v, ratio2, {"f": ratio3}))
    return minus.scaled(lead), plus.scaled(lead)


# ---------------------------------------------------------------------------
# the exceptional polynomial content

def _fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float) and x == int(x):
        return Fraction(int(x))
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, Rat):
        return x.value
    raise ParameterError(f"expected a rational parameter, got {x!r}")


def x2_seed_polynomial(n: int, alpha) -> Expr:
    """Degree-(n+1) basis polynomial of the exceptional span."""
    a = _fr(alpha)
    u = Var(U)
    return add(
        mul(Rat(a + n - 2), pow_(u, n + 1)),
        mul(Rat(2 * (a + n - 1) * (a - 1)), pow_(u, n)),
        mul(Rat((a + n) * (a - 1) * a), pow_(u, n - 1)),
    )


def x2_partner_polynomial(n: int, alpha) -> Expr:
    """Degree-(n+1) basis polynomial of the partner exceptional span."""
    a = _fr(alpha)
    u = Var(U)
    return add(
        mul(Rat((a - n) * (a - n + 1)), pow_(u, n + 1)),
        mul(Rat(2 * (a - n - 1) * (a - n + 1) * (a - 1)), pow_(u, n)),
        mul(Rat((a - n - 1) * (a - n) * (a - 1) * a), pow_(u, n - 1)),
    )


def f_alpha(alpha) -> Expr:
    a = _fr(alpha)
    u = Var(U)
    return add(pow_(u, 2), mul(Rat(2 * (a - 1)), u), Rat((a - 1) * a))


def x2_frame(alpha) -> WronskianFrame:
    a = _fr(alpha)
    if a in (0, 1):
        raise ParameterError(f"alpha={a} degenerates the exceptional frame")
    return WronskianFrame(x2_seed_polynomial(1, a), x2_seed_polynomial(2, a),
                          x2_seed_polynomial(3, a), U)


def x2_basis(alpha) -> Subspace:
    return x2_frame(alpha).span()


def x2b_basis(alpha) -> Subspace:
    a = _fr(alpha)
    return Subspace([x2_partner_polynomial(n, a) for n in (1, 2, 3)], U)


_J_GALLERY_CACHE: dict = {}
_K_GALLERY_CACHE: dict = {}
_KB_GALLERY_CACHE: dict = {}


def x2_J_gallery(alpha) -> dict[int, DiffOp]:
    a = _fr(alpha)
    if a not in _J_GALLERY_CACHE:
        fr = x2_frame(a)
        _J_GALLERY_CACHE[a] = {j: wronskian_J(j, fr) for j in range(1, 9)}
    return _J_GALLERY_CACHE[a]


def x2_K_gallery(alpha) -> dict[int, DiffOp]:
    a = _fr(alpha)
    if a not in _K_GALLERY_CACHE:
        fr = x2_frame(a)
        _K_GALLERY_CACHE[a] = {j: wronskian_K(j, fr) for j in range(1, 9)}
    return _K_GALLERY_CACHE[a]


def x2b_conjugated_K(i: int, alpha) -> DiffOp:
    """K-operators conjugated onto the plain partner polynomial span.

    `alpha` labels the partner span; the underlying frame sits at alpha - 3.
    The conjugation multiplies by f_(alpha-3)*f_alpha: the partner span carries
    the inverse of that product as its prefactor, so this lands on the bare
    polynomial span (the printed form shows the factors in the opposite order,
    which fails numerically).
    """
    a = _fr(alpha)
    if a not in _KB_GALLERY_CACHE:
        g = mul(f_alpha(a - 3), f_alpha(a))
        _KB_GALLERY_CACHE[a] = {
            j: gauge_conjugate(g, op) for j, op in x2_K_gallery(a - 3).items()
        }
    return _KB_GALLERY_CACHE[a][i]


# ---------------------------------------------------------------------------
# operators catalogued for the exceptional spans

def literature_x2(i: int, side: str = "minus", alpha=None) -> DiffOp:
    a = _fr(alpha)
    if a in (0, 1):
        raise ParameterError(f"alpha={a} degenerates the exceptional frame")
    u = Var(U)
    D1, D2 = DiffOp.d(U), DiffOp.d(U, 2)
    dm1 = DiffOp(U, {1: ONE, 0: MINUS_ONE})
    fa = f_alpha(a)
    inv_fa = pow_(fa, -1)
    J = side in ("minus", "J", "j")
    if J:
        if i == 1:
            base = D2.scaled(u) - D1.scaled(add(u, Rat(-a + 3)))
            tail = dm1.scaled(mul(Rat(4 * (a - 1)), add(u, Rat(a)), inv_fa))
            return base + tail
        if i == 2:
            base = (D2.scaled(add(pow_(u, 2), Rat((a + 2) * (a - 1))))
                    - D1.scaled(add(pow_(u, 2), mul(Rat(4), u), Rat((a - 1) * (3 * a + 2))))
                    + DiffOp.mult(U, mul(Rat(4), u)))
            tail = dm1.scaled(mul(Rat(-8 * (a - 1)),
                                  add(mul(Rat(a), u), Rat(a * a - 1)), inv_fa))
            return base + tail
        if i == 3:
            base = (D2.scaled(mul(add(u, Rat(2 * a + 2)), pow_(u, 2)))
                    + D1.scaled(add(mul(Rat(a - 5), pow_(u, 2)),
                                    mul(Rat(3 * a * a + a - 8), u),
                                    Rat(4 * (a + 4) * (a - 1))))
                    - DiffOp.mult(U, mul(Rat(4 * (a - 2)), u)))
            tail = dm1.scaled(mul(Rat(-4 * (a - 1)),
                                  add(mul(Rat(a * a + 3 * a - 8), u),
                                      Rat((a + 4) * (a - 1) * a)), inv_fa))
            return base + tail
        if i == 4:
            if a == -1:
                raise ParameterError("alpha=-1 divides the fourth operator by zero")
            den = Fraction(1, 2 * (a + 1))
            base = (D2.scaled(mul(add(mul(Rat(2 * (a + 1)), u),
                                      Rat(3 * a * a + 7 * a + 6)), pow_(u, 3)))
                    - D1.scaled(add(
                        mul(Rat(12 * (a + 1)), pow_(u, 3)),
                        mul(Rat(3 * a**3 + 8 * a**2 + 15 * a + 22), pow_(u, 2)),
                        mul(Rat((a - 1) * (7 * a**3 + 27 * a**2 + 10 * a - 16)), u),
                        Rat(2 * (a - 1) * (a**4 + 8 * a**3 + 29 * a**2 - 6 * a - 40))))
                    + DiffOp.mult(U, add(mul(Rat(24 * (a + 1)), pow_(u, 2)),
                                         mul(Rat(4 * (a - 1) * (3 * a * a + 2 * a - 4)), u))))
            tail = dm1.scaled(mul(Rat(4 * (a - 1)**2),
                                  add(mul(Rat(a**3 + 9 * a**2 - 22 * a - 40), u),
                                      Rat((a**3 + 9 * a**2 - 6 * a - 20) * a)), inv_fa))
            return (base + tail).scaled(Rat(den))
        raise ParameterError("index must be in 1..4")
    if i == 1:
        base = D2.scaled(u) + D1.scaled(add(u, Rat(-a - 3)))
        tail = (D1.scaled(mul(Rat(4 * (a - 1)), add(u, Rat(a)), inv_fa))
                + DiffOp.mult(U, mul(Rat(4 * a), add(u, Rat(a - 1)), inv_fa)))
        return base + tail
    if i == 2:
        base = (D2.scaled(add(pow_(u, 2), Rat((a - 1) * (a - 4))))
                + D1.scaled(add(pow_(u, 2), mul(Rat(-6), u), Rat((a - 1) * (3 * a - 8))))
                - DiffOp.mult(U, mul(Rat(4), u)))
        tail = (D1.scaled(add(mul(Rat(a - 3), u), Rat((a - 1) * (a - 2))))
                + DiffOp.mult(U, add(mul(Rat(a - 2), u), Rat(a * a - 3 * a + 4))))
        return base + tail.scaled(mul(Rat(-8 * (a - 1)), inv_fa))
    if i == 3:
        base = (D2.scaled(mul(add(u, Rat(2 * a - 4)), pow_(u, 2)))
                - D1.scaled(add(mul(Rat(a + 3), pow_(u, 2)),
                                mul(Rat(3 * a * a - 5 * a - 4), u),
                                Rat(-4 * (a - 1) * (a - 2))))
                + DiffOp.mult(U, mul(Rat(4 * a), u)))
        tail = (D1.scaled(add(mul(Rat(a * a - 3 * a + 4), u),
                              Rat(a * (a - 1) * (a - 2))))
                + DiffOp.mult(U, mul(Rat(a), add(mul(Rat(a - 2), u), Rat(a * (a - 3))))))
        return base + tail.scaled(mul(Rat(-4 * (a - 1)), inv_fa))
    if i == 4:
        if a == 2:
            raise ParameterError("alpha=2 divides the fourth partner operator by zero")
        den = Fraction(1, 2 * (a - 2))
        poly4 = a**4 - 11 * a**3 + 32 * a**2 - 36 * a + 16
        cubic = a**3 - 3 * a**2 + 8 * a - 16
        # two of the three printed occurrences of the cubic must read
        # (a-2)(a^2-a+4); as printed the operator fails to preserve the span
        # (established by exact fitting against the conjugated gallery)
        cubic2 = (a - 2) * (a**2 - a + 4)
        base = (D2.scaled(mul(add(mul(Rat(2 * (a - 2)), u),
                                  Rat(3 * a * a - 11 * a + 12)), pow_(u, 3)))
                - D1.scaled(add(
                    mul(Rat(12 * (a - 2)), pow_(u, 3)),
                    mul(Rat(-(3 * a**3 - 36 * a**2 + 97 * a - 84)), pow_(u, 2)),
                    mul(Rat(-(a - 1) * (7 * a**3 - 49 * a**2 + 112 * a - 80)), u),
                    Rat(-2 * (a - 1) * poly4)))
                + DiffOp.mult(U, add(mul(Rat(24 * (a - 2)), pow_(u, 2)),
                                     mul(Rat(-4 * (3 * a**3 - 27 * a**2 + 64 * a - 48)), u))))
        tail = (D1.scaled(mul(Rat(a - 1), add(mul(Rat(cubic), u), Rat(a * cubic2))))
                + DiffOp.mult(U, mul(Rat(a), add(mul(Rat(cubic2), u),
                                                 Rat(a * (a - 1) * (a * a - 3 * a + 4))))))
        return (base + tail.scaled(mul(Rat(4 * (a - 1)), inv_fa))).scaled(Rat(den))
    raise ParameterError("index must be in 1..4")


# ---------------------------------------------------------------------------
# the combination-coefficient table

@dataclass(frozen=True)
class X2Coefficients:
    alpha: Fraction
    table: dict
    bad_rows: frozenset

    def C(self, i: int, j: int) -> Fraction:
        if i in self.bad_rows:
            raise ParameterError(
                f"row {i} has a vanishing denominator at alpha={self.alpha}")
        return self.table.get((i, j), Fraction(0))

    def matrix(self) -> np.ndarray:
        return np.array([[float(self.C(i, j)) for j in range(0, 9)]
                         for i in range(1, 5)])


def cij_coefficients(alpha) -> X2Coefficients:
    """Combination coefficients; rows with a vanishing denominator at this
    parameter are marked unusable instead of poisoning the polynomial rows."""
    a = _fr(alpha)
    t: dict[tuple[int, int], Fraction] = {}
    bad = set()
    t[(1, 2)] = Fraction(2 * (a + 3))
    t[(1, 3)] = Fraction(-2)
    t[(1, 4)] = Fraction(-(a + 2))
    t[(1, 5)] = Fraction(1)
    t[(1, 0)] = Fraction(-2)
    if a in (0, -1):
        bad.add(2)
    else:
        t[(2, 1)] = 2 * (a + 3) * (a + 2) * (a - 1) / (a + 1)
        t[(2, 2)] = -2 * (a - 1) * (3 * a * a + 12 * a + 13) / (a + 1)
        t[(2, 3)] = 2 * (a * a - 3 * a - 2) / (a * (a + 1))
        t[(2, 4)] = (a + 2) * (a - 1) * (3 * a * a + 6 * a + 4) / (a * (a + 1))
        t[(2, 5)] = 4 * (a + 2) / (a * (a + 1))
        t[(2, 6)] = -a / (a + 1)
        t[(2, 7)] = 2 * (a - 1) / a
        t[(2, 0)] = 2 * (a - 2) * (a - 1) / a
    t[(3, 3)] = Fraction(2 * (3 * a * a + 7 * a + 6))
    t[(3, 5)] = Fraction(-(3 * a * a + 5 * a + 4))
    t[(3, 6)] = Fraction(a)
    t[(3, 7)] = Fraction(-2 * (a - 1))
    t[(3, 0)] = Fraction(4 * (a + 4) * (a - 1))
    if a == -1:
        bad.add(4)
    else:
        t[(4, 2)] = Fraction(-2 * a * (a + 3) ** 2 * (a - 1))
        t[(4, 3)] = -(a - 1) * (7 * a**3 + 31 * a**2 + 54 * a + 36) / (a + 1)
        t[(4, 4)] = a * (a + 3) * (a + 2) ** 2 * (a - 1) / (a + 1)
        t[(4, 5)] = (a - 1) * (7 * a**3 + 31 * a**2 + 54 * a + 48) / (2 * (a + 1))
        t[(4, 6)] = -(3 * a**3 - 5 * a**2 - 14 * a - 8) / (2 * (a + 1))
        t[(4, 7)] = (a - 1) * (3 * a * a + a - 12) / (a + 1)
        t[(4, 8)] = 2 * (a - 1) / (a + 1)
        t[(4, 0)] = -4 * (a - 1) * (a**3 + 7 * a**2 - 10) / (a + 1)
    t = {k: Fraction(v) for k, v in t.items()}
    return X2Coefficients(a, t, frozenset(bad))


def kside_constant(i: int, x: Fraction) -> Fraction:
    """Additive constants of the partner-side combination identities.

    Determined by exact rational fitting of the catalogued operators over the
    conjugated gallery at six parameter values each; the printed constant
    column only holds on the minus side.
    """
    x = Fraction(x)
    if i == 1:
        return Fraction(4)
    if i == 2:
        return Fraction(-2) * (x * x + 7 * x - 2) / x
    if i == 3:
        return Fraction(-2) * (5 * x + 3) * (x + 2)
    if i == 4:
        return (x + 2) * (11 * x**3 + 24 * x**2 + 23 * x + 6) / (x + 1)
    raise ParameterError("index must be in 1..4")


def combination_admissible(i: int, side: str, alpha) -> bool:
    """Whether the i-th combination identity is free of parameter singularities."""
    a = _fr(alpha)
    frame_at = a if side in ("minus", "J", "j") else a - 3
    if frame_at in (0, 1):
        return False
    try:
        x2_frame(frame_at)
    except FrameError:
        return False
    if side in ("minus", "J", "j"):
        if i in (2, 4) and a == -1:
            return False
        return True
    if a in (0, 1):
        return False
    if i in (2, 4) and a - 3 == -1:
        return False
    if i == 4 and a == 2:
        return False
    return True


def _exact_zero_operator(op: DiffOp, n_points: int = 72) -> bool:
    """Certify that an operator with rational-function coefficients vanishes.

    The coefficients are evaluated exactly at rational points; a nonzero
    rational function of the degrees arising here cannot vanish at this many
    points, so all-zeros is a proof, not a sample.
    """
    from .expr import NotRationalError, evaluate_exact

    pts = [Fraction(7 * k + 3, 16) for k in range(1, 3 * n_points)]
    for k, c in op.coeffs.items():
        clean = 0
        idx = 0
        while clean < n_points and idx < len(pts):
            x = pts[idx]
            idx += 1
            try:
                val = evaluate_exact(c, x)
            except ZeroDivisionError:
                continue
            if val != 0:
                return False
            clean += 1
        if clean < n_points:
            return False
    return True


def verify_x2_identities(alpha, plan: SamplePlan = SamplePlan(),
                         sides: tuple = ("minus", "plus"), tol: float = 1e-9) -> list[dict]:
    """Check the catalogued operators against combinations of the frame operators.

    For rational parameters the identity is certified exactly; the floating
    check is the fallback for anything outside the rational fragment.
    """
    from .expr import NotRationalError

    a = _fr(alpha)
    results = []
    for side in sides:
        shift = a if side == "minus" else a - 3
        gallery = None
        for i in range(1, 5):
            rid = f"x2:{side}:{i}:alpha={a}"
            if not combination_admissible(i, side, a):
                results.append({"id": rid, "status": "skipped",
                                "reason": "parameter excluded by a printed denominator"})
                continue
            coeffs = cij_coefficients(shift)
            if side == "minus":
                if gallery is None:
                    gallery = x2_J_gallery(a)
                target = literature_x2(i, "minus", a)
                const = coeffs.C(i, 0)
            else:
                if gallery is None:
                    gallery = {j: x2b_conjugated_K(j, a) for j in range(1, 9)}
                target = literature_x2(i, "plus", a)
                const = kside_constant(i, shift)
            combo = DiffOp.mult(U, Rat(const))
            for j in range(1, 9):
                cij = coeffs.C(i, j)
                if cij:
                    combo = combo + gallery[j].scaled(Rat(cij))
            ok, res = ops_equal_numeric(target, combo, None, plan, tol=tol)
            if not ok:
                # floating agreement can drown in coefficient cancellation;
                # the rational fragment admits an exact certificate instead
                try:
                    if _exact_zero_operator(target - combo):
                        ok, res = True, 0.0
                except NotRationalError:
                    pass
            results.append({"id": rid, "status": "passed" if ok else "failed",
                            "residual": res})
    return results
