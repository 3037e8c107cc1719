from fractions import Fraction

import numpy as np
import pytest

from qsusy import Binding, add, mul, opaque, parse, pow_, rat, var
from qsusy.diffop import DiffOp
from qsusy.families import build_J, monomial_J
from qsusy.invariance import (
    IllConditionedBasisError, SamplePlan, Subspace,
    check_annihilates, check_invariant, check_lie_closure, commutator_rhs,
    first_order_preservers, ops_equal_numeric, restricted_matrix, safe_points,
    verify_commutator_table,
)

z = var("z")


def seed_space(f):
    return Subspace([rat(1), z, f], "z")


class TestCheckInvariant:
    def test_monomial_pass_with_matrix(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            op = monomial_J(3, Fraction(5, 2))
        v = check_invariant(op, seed_space(parse("z^(5/2)")))
        assert v.passed
        lam = 2.5
        want = np.zeros((3, 3))
        want[2, 2] = lam * (lam - 1)
        assert np.allclose(v.matrix, want, atol=1e-9)

    def test_derivative_fails_on_cubic_space(self):
        v = check_invariant(DiffOp.d("z"), seed_space(parse("z^3")))
        assert not v.passed
        assert v.matrix is None

    def test_opaque_exponential(self):
        v = check_invariant(build_J(1), seed_space(parse("exp(z)")),
                            bind=Binding(funcs={"f": parse("exp(z)")}))
        assert v.passed

    def test_degenerate_basis_rejected(self):
        V = Subspace([rat(1), z, mul(2, z)], "z")
        with pytest.raises(IllConditionedBasisError):
            check_invariant(DiffOp.d("z"), V, SamplePlan(cond_ceiling=1e8))


class TestCheckAnnihilates:
    def test_third_derivative_on_quadratics(self):
        v = check_annihilates(DiffOp.d("z", 3),
                              Subspace([rat(1), z, pow_(z, 2)], "z"))
        assert v.passed

    def test_partner_kernel_cubic(self):
        from qsusy.families import build_P3_plus

        op = build_P3_plus(parse("z^3"))
        V = Subspace([rat(1), pow_(z, 2), pow_(z, 3)], "z", prefactor=pow_(z, -1))
        assert check_annihilates(op, V).passed

    def test_derivative_does_not_annihilate(self):
        assert not check_annihilates(DiffOp.d("z"), Subspace([rat(1), z], "z")).passed


class TestRestrictedMatrix:
    def test_diagonal_example(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            op = monomial_J(3, Fraction(2)).scaled(-1)
        M = restricted_matrix(op, Subspace([rat(1), z, pow_(z, 2)], "z"))
        assert np.allclose(M, np.diag([0.0, 0.0, -2.0]), atol=1e-9)

    def test_identity(self):
        M = restricted_matrix(DiffOp.identity("z"), seed_space(parse("z^3")))
        assert np.allclose(M, np.eye(3), atol=1e-9)

    def test_shift_entry(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            op = monomial_J(4, Fraction(3))
        M = restricted_matrix(op, seed_space(parse("z^3")))
        want = np.zeros((3, 3))
        want[0, 1] = -2.0
        assert np.allclose(M, want, atol=1e-9)

    def test_failure_raises(self):
        from qsusy.invariance import InvarianceError

        with pytest.raises(InvarianceError):
            restricted_matrix(DiffOp.d("z"), seed_space(parse("z^3")))


class TestSampling:
    def test_deterministic(self):
        plan = SamplePlan(seed=42)
        a = safe_points([pow_(z, -1)], plan, count=10)
        b = safe_points([pow_(z, -1)], plan, count=10)
        assert np.array_equal(a, b)

    def test_avoids_poles(self):
        plan = SamplePlan(seed=1, intervals=((-1.0, 1.0),))
        pts = safe_points([pow_(z, -1)], plan, count=8)
        assert np.all(np.abs(pts) > 1e-6)

    def test_verdict_stable_across_seeds(self):
        f = parse("exp(z)")
        bind = Binding(funcs={"f": f})
        for i in (1, 4, 8):
            op = build_J(i)
            v1 = check_invariant(op, seed_space(f), SamplePlan(seed=3), bind)
            v2 = check_invariant(op, seed_space(f), SamplePlan(seed=1234), bind)
            assert v1.passed == v2.passed


class TestCommutatorTable:
    @pytest.mark.parametrize("f_text", ["z^3", "exp(z)", "z^(7/3)"])
    def test_all_entries(self, f_text):
        results = verify_commutator_table(parse(f_text), tol=1e-8)
        assert len(results) == 28
        bad = [r for r in results if not r["passed"]]
        assert not bad, bad

    def test_specific_entry_j1_j4(self):
        from qsusy.diffop import commutator, compose

        f = parse("z^3")
        lhs = commutator(build_J(1, f), build_J(4, f))
        rhs = compose(DiffOp("z", {1: rat(2)}), build_J(1, f))
        ok, res = ops_equal_numeric(lhs, rhs)
        assert ok, res

    def test_diagonal_trivially_zero(self):
        from qsusy.diffop import commutator

        f = parse("z^3")
        assert commutator(build_J(2, f), build_J(2, f)).is_zero()

    def test_printed_form_of_one_entry_fails(self):
        # regression guard: the second-row entry with the first-derivative
        # multiplier is reproducible only with the z f'' - f' numerator
        from qsusy.diffop import commutator, compose
        from qsusy.families import FContext

        fc = FContext(None)
        f = parse("z^3")
        bind = Binding(funcs={"f": f})
        lhs = commutator(build_J(2), build_J(4))
        zz = var("z")
        as_printed = compose(
            DiffOp("z", {1: mul(2, add(mul(zz, opaque("f", 1, zz)),
                                       mul(-1, opaque("f", 0, zz))),
                                pow_(opaque("f", 2, zz), -1)),
                         0: rat(1)}),
            build_J(1))
        ok, _ = ops_equal_numeric(lhs, as_printed, bind)
        assert not ok
        corrected = commutator_rhs(2, 4, fc)
        ok, res = ops_equal_numeric(lhs, corrected, bind)
        assert ok, res


class TestLieClosure:
    def test_closure_point(self):
        rep = check_lie_closure(Fraction(2), Fraction(-1, 2), Fraction(1, 2),
                                parse("-z^2/4"))
        assert rep.closed and rep.first_order
        assert max(rep.structure_residuals.values()) < 1e-9

    def test_wrong_product_stays_second_order(self):
        rep = check_lie_closure(Fraction(2), Fraction(-1, 2), Fraction(1),
                                parse("-z^2/4"))
        assert rep.second_order and not rep.closed

    def test_cubic_not_closed(self):
        rep = check_lie_closure(1, Fraction(-1, 2), 1, parse("z^3"))
        assert not rep.closed
        assert max(rep.commutator_orders.values()) == 3


class TestFirstOrderSearch:
    """First-order operators preserving span{1, x, f} exist only for special
    generating functions: the derivative for exponentials, the scaling
    operator for monomial-type spaces, none in the generic case."""

    @pytest.mark.parametrize("text", ["sin(z)", "exp(z) + z^2"])
    def test_generic_functions_have_none(self, text):
        dim, _ = first_order_preservers(parse(text))
        assert dim == 0

    def test_exponential_admits_the_derivative(self):
        dim, dirs = first_order_preservers(parse("exp(z)"))
        assert dim == 1
        d = dirs[0] / np.max(np.abs(dirs[0]))
        a_part, b_part = d[:5], d[5:]
        assert abs(a_part[0]) > 0.9
        assert np.max(np.abs(a_part[1:])) < 1e-6
        assert np.max(np.abs(b_part)) < 1e-6

    def test_shifted_cubic_has_euler_direction(self):
        dim, dirs = first_order_preservers(parse("z^3 + z"))
        assert dim == 1
        d = dirs[0] / np.max(np.abs(dirs[0]))
        a_part, b_part = d[:5], d[5:]
        assert abs(a_part[1]) > 0.9
        mask = np.ones(5, bool)
        mask[1] = False
        assert np.max(np.abs(a_part[mask])) < 1e-6
        assert np.max(np.abs(b_part)) < 1e-6
