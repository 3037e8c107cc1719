"""Decide whether an operator preserves or annihilates a finite-dimensional
function space, extract restricted matrices, and verify commutator identities.

Membership is decided numerically: least-squares fit on sample points,
certified on disjoint holdout points.  This covers opaque and transcendental
generating functions where structural equality of canonical forms is too weak.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .expr import (
    Expr, Binding, ZERO, ONE, MINUS_ONE, EvalError, ExprError,
    mul, pow_, fn, var, as_expr, diff, evaluate,
)
from .diffop import DiffOp, compose, commutator, OperatorError
from .families import build_J


class InvarianceError(ExprError):
    pass


class IllConditionedBasisError(InvarianceError):
    pass


class SamplingError(InvarianceError):
    pass


DEFAULT_INTERVALS = ((0.5, 2.5), (3.0, 5.0), (0.15, 0.45), (5.5, 8.0))


@dataclass(frozen=True)
class SamplePlan:
    m: int = 12
    holdout: int = 6
    seed: int = 7
    exclusion: float = 1e-3
    tol: float = 1e-9
    cond_ceiling: float = 1e10
    intervals: tuple = DEFAULT_INTERVALS
    magnitude_cap: float = 1e9

    def reseeded(self, seed: int) -> "SamplePlan":
        return SamplePlan(self.m, self.holdout, seed, self.exclusion, self.tol,
                          self.cond_ceiling, self.intervals, self.magnitude_cap)


@dataclass
class Subspace:
    basis: list
    variable: str = "z"
    prefactor: Expr | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def elements(self) -> list:
        if self.prefactor is None:
            return list(self.basis)
        return [mul(self.prefactor, b) for b in self.basis]


@dataclass
class Verdict:
    passed: bool
    residuals: list
    matrix: np.ndarray | None
    cond: float
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def _safe_value(e: Expr, x: float, bind: Binding | None, cap: float):
    try:
        v = evaluate(e, x, bind)
    except EvalError:
        return None
    if not np.isfinite(v) or abs(v) > cap:
        return None
    return v


def safe_points(exprs: list, plan: SamplePlan, bind: Binding | None = None,
                count: int | None = None, intervals=None) -> np.ndarray:
    """Deterministic draw of points where every expression evaluates cleanly.

    Failed draws become guard-ball centers: later candidates inside the
    exclusion radius of a detected singular point are rejected without
    re-evaluation.
    """
    need = count if count is not None else plan.m + plan.holdout
    rng = np.random.default_rng(plan.seed)
    out: list[float] = []
    bad: list[float] = []
    for lo, hi in (intervals or plan.intervals):
        draws = rng.uniform(lo, hi, size=60 * need)
        for x in draws:
            x = float(x)
            if any(abs(x - g) < plan.exclusion for g in bad):
                continue
            if any(abs(x - p) < plan.exclusion / 10 for p in out):
                continue
            if any(_safe_value(e, x, bind, plan.magnitude_cap) is None for e in exprs):
                bad.append(x)
                continue
            out.append(x)
            if len(out) >= need:
                return np.array(out)
    raise SamplingError(
        f"could only find {len(out)} of {need} usable sample points")


def _value_matrix(exprs: list, points: np.ndarray, bind: Binding | None) -> np.ndarray:
    out = np.empty((len(points), len(exprs)))
    for j, e in enumerate(exprs):
        for i, x in enumerate(points):
            out[i, j] = evaluate(e, float(x), bind)
    return out


def _image_terms(op: DiffOp, elements: list) -> list:
    """Per element, the (coefficient, derivative) pairs of the operator action."""
    out = []
    for b in elements:
        out.append([(c, diff(b, op.var, k)) for k, c in op.coeffs.items()])
    return out


def _image_values(terms: list, points, bind: Binding | None):
    """Signed sums and magnitude sums of the operator-action terms.

    The magnitude column measures how much floating-point cancellation went
    into each image value; residuals are judged relative to it.
    """
    n = len(points)
    Y = np.zeros((n, len(terms)))
    G = np.zeros((n, len(terms)))
    for i, pairs in enumerate(terms):
        for c, db in pairs:
            for p, x in enumerate(points):
                t = evaluate(c, float(x), bind) * evaluate(db, float(x), bind)
                Y[p, i] += t
                G[p, i] += abs(t)
    return Y, G


def check_invariant(op: DiffOp, V: Subspace, plan: SamplePlan = SamplePlan(),
                    bind: Binding | None = None) -> Verdict:
    """Least-squares membership of op(b_i) in span(V), certified on holdouts."""
    if op.var != V.variable:
        raise OperatorError(f"operator in {op.var!r}, space in {V.variable!r}")
    elements = V.elements
    terms = _image_terms(op, elements)
    flat_terms = [e for pairs in terms for pair in pairs for e in pair]
    pts = safe_points(elements + flat_terms, plan, bind)
    fit = pts[:plan.m]
    B_fit = _value_matrix(elements, fit, bind)
    cond = float(np.linalg.cond(B_fit))
    if not np.isfinite(cond) or cond > plan.cond_ceiling:
        raise IllConditionedBasisError(
            f"sampled basis condition number {cond:.3e} exceeds ceiling")
    Y_fit, _ = _image_values(terms, fit, bind)
    # column scaling keeps the solve well-behaved for lopsided bases
    scales = np.maximum(np.linalg.norm(B_fit, axis=0), 1e-300)
    M_hat, *_ = np.linalg.lstsq(B_fit / scales, Y_fit, rcond=None)
    M = M_hat / scales[:, None]
    B_all = _value_matrix(elements, pts, bind)
    Y_all, G_all = _image_values(terms, pts, bind)
    R = Y_all - B_all @ M
    residuals = []
    ok = True
    for i in range(len(elements)):
        scale = 1.0 + max(np.max(G_all[:, i]), np.max(np.abs(B_all)))
        r = float(np.max(np.abs(R[:, i])) / scale)
        residuals.append(r)
        ok = ok and (r <= plan.tol)
    # M returned in the (j, i) layout: column i holds the coordinates of op(b_i)
    return Verdict(ok, residuals, M if ok else None, cond,
                   {"points": pts, "fit_matrix_cond": cond})


def check_annihilates(op: DiffOp, V: Subspace, plan: SamplePlan = SamplePlan(),
                      bind: Binding | None = None) -> Verdict:
    if op.var != V.variable:
        raise OperatorError(f"operator in {op.var!r}, space in {V.variable!r}")
    elements = V.elements
    terms = _image_terms(op, elements)
    flat_terms = [e for pairs in terms for pair in pairs for e in pair]
    pts = safe_points(elements + flat_terms, plan, bind)
    B_all = _value_matrix(elements, pts, bind)
    Y_all, G_all = _image_values(terms, pts, bind)
    residuals = []
    ok = True
    for i in range(len(elements)):
        scale = 1.0 + max(np.max(G_all[:, i]), np.max(np.abs(B_all)))
        r = float(np.max(np.abs(Y_all[:, i])) / scale)
        residuals.append(r)
        ok = ok and (r <= plan.tol)
    return Verdict(ok, residuals, None, float(np.linalg.cond(B_all)), {"points": pts})


def restricted_matrix(op: DiffOp, V: Subspace, plan: SamplePlan = SamplePlan(),
                      bind: Binding | None = None) -> np.ndarray:
    verdict = check_invariant(op, V, plan, bind)
    if not verdict.passed:
        raise InvarianceError(
            f"operator does not preserve the space (residuals {verdict.residuals})")
    return verdict.matrix


# ---------------------------------------------------------------------------
# numeric operator equality

def default_probes(variable: str) -> list:
    x = var(variable)
    return [ONE, x, pow_(x, 2), fn("exp", mul(pow_(as_expr(3), -1), x)), fn("sin", x)]


def ops_equal_numeric(a: DiffOp, b: DiffOp, bind: Binding | None = None,
                      plan: SamplePlan = SamplePlan(), probes: list | None = None,
                      tol: float = 1e-9, n_points: int = 12):
    """Compare operators by their action on probe functions at safe points.

    Differences are judged relative to the summed term magnitudes of the two
    applications, so cancellation-heavy coefficients do not masquerade as
    disagreement.
    """
    if a.var != b.var:
        raise OperatorError("variable tags differ")
    probes = probes if probes is not None else default_probes(a.var)
    worst = 0.0
    for psi in probes:
        pairs_a = [(c, diff(psi, a.var, k)) for k, c in a.coeffs.items()]
        pairs_b = [(c, diff(psi, b.var, k)) for k, c in b.coeffs.items()]
        flat = [e for pair in pairs_a + pairs_b for e in pair]
        pts = safe_points([psi] + flat, plan, bind, count=n_points)
        for x in pts:
            x = float(x)
            va = vb = 0.0
            mag = 0.0
            for c, db in pairs_a:
                t = evaluate(c, x, bind) * evaluate(db, x, bind)
                va += t
                mag += abs(t)
            for c, db in pairs_b:
                t = evaluate(c, x, bind) * evaluate(db, x, bind)
                vb += t
                mag += abs(t)
            rel = abs(va - vb) / (1.0 + mag)
            worst = max(worst, rel)
    return worst <= tol, worst


def op_order_numeric(op: DiffOp, bind: Binding | None = None,
                     plan: SamplePlan = SamplePlan(), tol: float = 1e-8) -> int:
    """Largest derivative order whose coefficient is not numerically zero."""
    order = -1
    for k in sorted(op.coeffs):
        c = op.coeffs[k]
        try:
            pts = safe_points([c], plan, bind, count=6)
        except SamplingError:
            order = max(order, k)
            continue
        vals = [abs(evaluate(c, float(x), bind)) for x in pts]
        if max(vals) > tol:
            order = max(order, k)
    return order


# ---------------------------------------------------------------------------
# the commutator table

def _table(fc) -> dict:
    """RHS of every [J_i, J_j] (i < j) as sums of (aD + b) ∘ J_target terms.

    Targets 1, 4, 9 name gallery operators; target 0 is the identity.
    """
    z = var(fc.variable)
    f, fp, fpp = fc(0), fc(1), fc(2)
    inv = pow_(fpp, -1)
    two = as_expr(2)
    wf = z * fp - f
    return {
        (1, 2): [(two * inv, ZERO, 1)],
        (1, 3): [(two * fp * inv, ONE, 1)],
        (1, 4): [(two, ZERO, 1)],
        (1, 5): [(two * z, ZERO, 1), (two * inv, ZERO, 4)],
        (1, 6): [(two * f, ZERO, 1), (two * fp * inv, ONE, 4)],
        (1, 7): [(two * z * z, -z, 1), (two * inv, ZERO, 9)],
        (1, 8): [(two * z * f, -f, 1), (two * fp * inv, ONE, 9)],
        (2, 3): [(two * wf * inv, z, 1)],
        # multiplier corrected from the printed z f' - f, which fails numerically
        (2, 4): [(two * (z * fpp - fp) * inv, ONE, 1)],
        (2, 5): [(two * z * (z * fpp - fp) * inv, z, 1), (two * z * inv, ZERO, 4)],
        (2, 6): [(two * f * (z * fpp - fp) * inv, f, 1),
                 (two * z * fp * inv, z, 4)],
        (2, 7): [(two * z * (z * z * fpp - z * fp + f) * inv, ZERO, 1),
                 (two * z * inv, ZERO, 9)],
        (2, 8): [(two * f * (z * z * fpp - z * fp + f) * inv, ZERO, 1),
                 (two * z * fp * inv, z, 9)],
        (3, 4): [(two * (f * fpp - fp * fp) * inv, ZERO, 1)],
        (3, 5): [(two * z * (f * fpp - fp * fp) * inv, ZERO, 1),
                 (two * f * inv, ZERO, 4)],
        (3, 6): [(two * f * (f * fpp - fp * fp) * inv, ZERO, 1),
                 (two * f * fp * inv, f, 4)],
        (3, 7): [(two * z * (z * f * fpp - z * fp * fp + f * fp) * inv, ZERO, 1),
                 (two * f * inv, ZERO, 9)],
        (3, 8): [(two * f * (z * f * fpp - z * fp * fp + f * fp) * inv, ZERO, 1),
                 (two * f * fp * inv, f, 9)],
        (4, 5): [(two * fp * inv, MINUS_ONE, 4)],
        (4, 6): [(two * fp * fp * inv, ZERO, 4)],
        (4, 7): [(two * z * f, ZERO, 1), (ZERO, -z, 4), (two * fp * inv, MINUS_ONE, 9)],
        (4, 8): [(two * f * f, ZERO, 1), (ZERO, -f, 4), (two * fp * fp * inv, ZERO, 9)],
        (5, 6): [(two * fp * wf * inv, f, 4)],
        (5, 7): [(two * z * z * f, ZERO, 1), (-two * z * wf * inv, ZERO, 4),
                 (two * z * fp * inv, -z, 9)],
        (5, 8): [(two * z * f * f, ZERO, 1), (-two * f * wf * inv, ZERO, 4),
                 (two * z * fp * fp * inv, ZERO, 9)],
        (6, 7): [(two * z * f * f, ZERO, 1), (-two * fp * wf * inv * z, ZERO, 4),
                 (two * f * fp * inv, -f, 9)],
        (6, 8): [(two * f * f * f, ZERO, 1), (-two * f * fp * wf * inv, ZERO, 4),
                 (two * f * fp * fp * inv, ZERO, 9)],
        (7, 8): [(two * (z * z * fp * fp - 2 * z * f * fp + f * f) * inv, ZERO, 9)],
    }


def commutator_rhs(i: int, j: int, fc) -> DiffOp:
    from .families import _fctx

    fc = _fctx(fc)
    v = fc.variable
    table = _table(fc)
    if i == j:
        return DiffOp.zero(v)
    sign = 1
    if i > j:
        i, j, sign = j, i, -1
    gallery = {1: build_J(1, fc), 4: build_J(4, fc), 9: build_J(9, fc),
               0: DiffOp.identity(v)}
    out = DiffOp.zero(v)
    for a, b, target in table[(i, j)]:
        first = DiffOp(v, {1: a, 0: b})
        out = out + compose(first, gallery[target])
    return out if sign == 1 else out.scaled(MINUS_ONE)


def verify_commutator_table(f, plan: SamplePlan = SamplePlan(),
                            tol: float = 1e-8) -> list[dict]:
    """Check all 28 commutator identities for a concrete generating function."""
    from .families import _fctx

    fc = _fctx(None)
    bind = Binding(funcs={"f": as_expr(f)})
    results = []
    J = {i: build_J(i, fc) for i in range(1, 9)}
    for i in range(1, 9):
        for j in range(i + 1, 9):
            lhs = commutator(J[i], J[j])
            rhs = commutator_rhs(i, j, fc)
            ok, res = ops_equal_numeric(lhs, rhs, bind, plan, tol=tol)
            results.append({"id": f"[J{i},J{j}]", "passed": ok, "residual": res})
    return results


# ---------------------------------------------------------------------------
# Lie-algebra closure of shifted combinations

@dataclass
class ClosureReport:
    commutator_orders: dict
    operator_orders: dict
    second_order: bool
    first_order: bool
    closed: bool
    structure_residuals: dict


def check_lie_closure(alpha_minus, alpha_zero, alpha_plus, f,
                      plan: SamplePlan = SamplePlan(), tol: float = 1e-8) -> ClosureReport:
    """Probe whether J2+α₋J4, J3+α₀J5, J6+α₊J7 close an sl(2)-type algebra."""
    f = as_expr(f)
    am, a0, ap = as_expr(alpha_minus), as_expr(alpha_zero), as_expr(alpha_plus)
    Jm = build_J(2, f) + build_J(4, f).scaled(am)
    J0 = build_J(3, f) + build_J(5, f).scaled(a0)
    Jp = build_J(6, f) + build_J(7, f).scaled(ap)
    c_m0 = commutator(Jm, J0)
    c_p0 = commutator(Jp, J0)
    c_pm = commutator(Jp, Jm)
    orders = {"[J-,J0]": op_order_numeric(c_m0, plan=plan),
              "[J+,J0]": op_order_numeric(c_p0, plan=plan),
              "[J+,J-]": op_order_numeric(c_pm, plan=plan)}
    op_orders = {"J-": op_order_numeric(Jm, plan=plan),
                 "J0": op_order_numeric(J0, plan=plan),
                 "J+": op_order_numeric(Jp, plan=plan)}
    second_order = all(k <= 2 for k in orders.values())
    first_order = all(k <= 1 for k in op_orders.values())
    v = Jm.var
    half = Fraction(1, 2)
    targets = {
        "[J-,J0]=J-/2": (c_m0, Jm.scaled(as_expr(half))),
        "[J+,J0]=-J+/2": (c_p0, Jp.scaled(as_expr(-half))),
        "[J+,J-]=-2J0+1": (c_pm, J0.scaled(as_expr(-2)) + DiffOp.identity(v)),
    }
    resids = {}
    closed = True
    for key, (lhs, rhs) in targets.items():
        try:
            ok, res = ops_equal_numeric(lhs, rhs, None, plan, tol=tol)
        except SamplingError:
            ok, res = False, float("inf")
        resids[key] = res
        closed = closed and ok
    closed = closed and first_order
    return ClosureReport(orders, op_orders, second_order, first_order, closed, resids)


# ---------------------------------------------------------------------------
# search for first-order operators preserving span{1, x, f}

def first_order_preservers(f, degree: int = 4, plan: SamplePlan = SamplePlan(),
                           tol: float = 1e-7):
    """Dimension (mod constants) of {a(x)d + b(x), deg<=degree} preserving span{1,x,f}.

    Returns (dimension, coefficient vectors); the always-present constant
    multiplication operator is projected out.
    """
    f = as_expr(f)
    vname = next(iter({*map(str, ())}), "z")
    from .expr import free_vars

    names = free_vars(f)
    vname = next(iter(names)) if names else "z"
    x = var(vname)
    basis = [ONE, x, f]
    n_par = 2 * (degree + 1)
    pts = safe_points(basis + [diff(b, vname) for b in basis], plan,
                      count=3 * (degree + 3))
    P = len(pts)
    B = _value_matrix(basis, pts, None)
    # projector onto the orthogonal complement of the sampled basis columns
    Qmat, _ = np.linalg.qr(B)
    proj = np.eye(P) - Qmat @ Qmat.T
    rows = []
    for b in basis:
        db = diff(b, vname)
        A = np.empty((P, n_par))
        for k in range(degree + 1):
            mono = pow_(x, k)
            for i, xp in enumerate(pts):
                mv = evaluate(mono, float(xp))
                A[i, k] = mv * evaluate(db, float(xp))
                A[i, degree + 1 + k] = mv * evaluate(b, float(xp))
        rows.append(proj @ A)
    S = np.vstack(rows)
    _, sv, Vt = np.linalg.svd(S)
    null = [Vt[i] for i in range(len(sv)) if sv[i] <= tol * sv[0]] + \
           [Vt[i] for i in range(len(sv), n_par)]
    if not null:
        return 0, []
    N = np.array(null).T  # n_par x k
    const_dir = np.zeros(n_par)
    const_dir[degree + 1] = 1.0
    # remove the trivial constant-multiplication direction
    coeffs, *_ = np.linalg.lstsq(N, const_dir, rcond=None)
    resid = const_dir - N @ coeffs
    if np.linalg.norm(resid) > 1e-6:
        # constants unexpectedly absent; report the raw null space
        return N.shape[1], [N[:, i] for i in range(N.shape[1])]
    Qn, _ = np.linalg.qr(N)
    comp = Qn - np.outer(const_dir, const_dir @ Qn)
    _, sv2, Vt2 = np.linalg.svd(comp)
    keep = [i for i in range(len(sv2)) if sv2[i] > 1e-6]
    dirs = [comp @ Vt2[i] for i in keep]
    return len(keep), dirs
