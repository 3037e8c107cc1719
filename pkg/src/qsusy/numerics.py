"""Independent numerical cross-checks: a finite-difference eigensolver on a
uniform grid, pointwise residual evaluation, and a normalizability probe.

The eigensolver is a plain second-order tridiagonal discretization with
Dirichlet ends; it exists to confirm algebraic spectra, not to compete with
production solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .expr import Expr, Binding, EvalError, ExprError, diff, evaluate


class GridError(ExprError):
    pass


@dataclass(frozen=True)
class Grid:
    q_lo: float
    q_hi: float
    n: int = 2000
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.n < 200:
            raise GridError("need at least 200 grid points")
        if not self.q_hi > self.q_lo:
            raise GridError("empty interval")
        if self.boundary != "dirichlet":
            raise GridError("only Dirichlet ends are supported")

    @property
    def h(self) -> float:
        return (self.q_hi - self.q_lo) / (self.n - 1)

    def interior(self) -> np.ndarray:
        return np.linspace(self.q_lo, self.q_hi, self.n)[1:-1]


def fd_spectrum(V: Expr, grid: Grid, k: int = 6, bind: Binding | None = None,
                on_singular: str = "error") -> np.ndarray:
    """Lowest k eigenvalues of -(1/2) d^2/dq^2 + V with Dirichlet ends."""
    qs = grid.interior()
    vals = np.empty(len(qs))
    barrier = 1e12
    for i, q in enumerate(qs):
        try:
            v = evaluate(V, float(q), bind)
        except EvalError:
            if on_singular == "exclude":
                v = barrier
            else:
                raise GridError(f"potential singular at node q={q}") from None
        if not np.isfinite(v):
            if on_singular == "exclude":
                v = barrier
            else:
                raise GridError(f"potential not finite at node q={q}")
        vals[i] = v
    h = grid.h
    diag = 1.0 / h**2 + vals
    off = np.full(len(qs) - 1, -0.5 / h**2)
    k = min(k, len(qs))
    return eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, k - 1), eigvals_only=True)


def schrodinger_residual(V: Expr, psi: Expr, energy: float, probes,
                         bind: Binding | None = None) -> float:
    """max over probes of |-(1/2)psi'' + V psi - E psi| / (1 + |E psi|)."""
    from .expr import free_vars

    names = free_vars(psi)
    v = next(iter(names)) if names else "q"
    psi2 = diff(psi, v, 2)
    worst = 0.0
    for q in probes:
        q = float(q)
        p = evaluate(psi, q, bind)
        p2 = evaluate(psi2, q, bind)
        vv = evaluate(V, q, bind)
        num = abs(-0.5 * p2 + vv * p - energy * p)
        worst = max(worst, num / (1.0 + abs(energy * p)))
    return worst


def _segment_integral(f, lo: float, hi: float, n: int = 257) -> float:
    """Composite Simpson; n odd."""
    xs = np.linspace(lo, hi, n)
    ys = np.empty(n)
    for i, x in enumerate(xs):
        try:
            y = f(float(x))
        except EvalError:
            y = math.inf
        ys[i] = y if np.isfinite(y) else math.inf
    if not np.all(np.isfinite(ys)):
        return math.inf
    h = (hi - lo) / (n - 1)
    return float(h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum()))


def normalizability_probe(psi: Expr, domain: tuple, bind: Binding | None = None,
                          rungs: int = 6) -> str:
    """Classify |psi|^2 as 'normalizable', 'divergent', or 'inconclusive'.

    The tail integral is evaluated on a geometric ladder toward each open or
    infinite end; the growth ratio of successive rungs decides the verdict.
    """
    lo, hi = domain

    def density(x: float) -> float:
        val = evaluate(psi, x, bind)
        return val * val

    verdicts = []
    anchor_lo = lo if math.isfinite(lo) else (min(0.0, hi) - 1.0 if math.isfinite(hi) else -1.0)
    anchor_hi = hi if math.isfinite(hi) else (max(0.0, lo) + 1.0 if math.isfinite(lo) else 1.0)
    base = max(1.0, abs(anchor_hi - anchor_lo))

    ladders = []
    if not math.isfinite(hi):
        start = anchor_hi
        ladders.append([(start + base * (2**j - 1), start + base * (2**(j + 1) - 1))
                        for j in range(rungs)])
    if not math.isfinite(lo):
        start = anchor_lo
        ladders.append([(start - base * (2**(j + 1) - 1), start - base * (2**j - 1))
                        for j in range(rungs)])
    if math.isfinite(lo) and math.isfinite(hi):
        width = hi - lo
        # approach each endpoint geometrically (open interval: possible blow-up)
        ladders.append([(lo + width / 2**(j + 2), lo + width / 2**(j + 1))
                        for j in range(rungs)])
        ladders.append([(hi - width / 2**(j + 1), hi - width / 2**(j + 2))
                        for j in range(rungs)])

    for ladder in ladders:
        tails = [ _segment_integral(density, a, b) for a, b in ladder ]
        if any(math.isinf(t) for t in tails):
            return "divergent"
        ratios = [t2 / t1 for t1, t2 in zip(tails, tails[1:]) if t1 > 0]
        if not ratios:
            verdicts.append("normalizable")
            continue
        later = ratios[-3:]
        if all(r < 0.9 for r in later):
            verdicts.append("normalizable")
        elif all(r > 1.1 for r in later):
            verdicts.append("divergent")
        else:
            verdicts.append("inconclusive")
    if "divergent" in verdicts:
        return "divergent"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "normalizable"
