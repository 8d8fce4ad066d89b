"""Tests for the successive-approximation lift."""

from fractions import Fraction
from unittest.mock import patch

import pytest

from rlift.core.models import LieBialgebra
from rlift.services.cohochschild import cocycle_condition_residuals
from rlift.services.liebialg import ValidationFailedError, cybe_residual
from rlift.services.liftengine import (
    InternalInvariantError,
    LiftDegreeError,
    check_lift_axioms,
    construct_lift,
    defects,
    extend,
    initial_lift,
    qt_defect,
    qt_identity_residual,
    r_element,
    seeded_perturbation,
)
from tests.conftest import dense_cabling_solve, sl2, triangular


def _abelian(dim):
    """Abelian algebra of dimension ``dim`` with a non-symmetric r."""
    r = {(i, (i + 1) % dim): 1 for i in range(dim)}
    r.update({(i, i): Fraction(1, i + 2) for i in range(dim)})
    return LieBialgebra.from_sparse(dim, {}, r)


class TestTrivialCases:
    """Tests for inputs whose lift is r itself."""

    @pytest.mark.parametrize("dim,N", [(2, 4), (3, 6), (4, 8)])
    def test_abelian_lift_is_r(self, dim, N):
        """Test rho = r for an abelian algebra."""
        state = construct_lift(_abelian(dim), N, verify=True, keep_audit=True)

        assert state.complete
        assert state.rho == r_element(state.context)
        assert check_lift_axioms(state.rho).passed

    def test_zero_r(self):
        """Test r = 0 gives rho = 0."""
        state = construct_lift(sl2({}), 3)
        assert state.rho.is_zero()

    def test_one_dimensional(self):
        """Test a single generator gives rho = r."""
        L = LieBialgebra.from_sparse(1, {}, {(0, 0): Fraction(1, 2)})
        state = construct_lift(L, 5)
        assert state.rho == r_element(state.context)


class TestConstructLift:
    """Tests for the lift of the standard sl2 r-matrix."""

    def test_lift_axioms(self, sl2_lift5):
        """Test the lift modulo m^6 satisfies every axiom exactly."""
        report = check_lift_axioms(sl2_lift5.rho)

        assert report.passed
        assert report.failures() == []

    def test_qt_defect_vanishes(self, sl2_lift5):
        """Test rho12 * rho13 * rho23 = rho23 * rho13 * rho12."""
        assert qt_defect(sl2_lift5.rho).is_zero()

    def test_qt_identity(self, sl2_lift5):
        """Test rho12 * rho^{12,3} = rho^{21,3} * rho12."""
        assert qt_identity_residual(sl2_lift5.rho).is_zero()

    def test_degree_two_is_r(self, sl2_lift5):
        """Test the quadratic part of rho is r."""
        rho = sl2_lift5.rho
        assert rho.graded_component(2) == r_element(rho.context)
        assert rho.graded_component(1).is_zero()

    def test_audit_trail(self, sl2_lift5):
        """Test one audit step per degree."""
        assert [step.degree for step in sl2_lift5.audit] == [3, 4, 5]
        data = sl2_lift5.audit[1].to_dict(records=False)
        assert set(data) == {"degree", "alpha_terms", "beta_terms", "sigma_terms", "qt_residual_terms"}
        assert "sigma" in sl2_lift5.audit[1].to_dict()

    @pytest.mark.parametrize("lift", ["sl2_lift4", "triangular_lift4"])
    @pytest.mark.parametrize("n", [3, 4])
    def test_matches_dense_solve(self, request, lift, n):
        """Test the degree-n part of rho against a dense solve of the cabling identities."""
        state = request.getfixturevalue(lift)
        context = state.context
        lower = state.rho.truncate(n - 1).with_cap(context.cap)
        expected = dense_cabling_solve(context, lower, n)

        assert state.rho.graded_component(n).terms == expected
        # a CYBE solution has no cubic correction; degree 4 is the first nonzero one
        assert bool(expected) == (n == 4)

    def test_triangular_lift(self, triangular_lift4):
        """Test the triangular lift satisfies the axioms."""
        assert check_lift_axioms(triangular_lift4.rho).passed
        assert qt_defect(triangular_lift4.rho).is_zero()

    @pytest.mark.parametrize("seed", [7, 11, 19, 23, 31])
    def test_section_independence(self, sl2_lift5, seed):
        """Test that perturbing the padding section does not change the lift."""
        perturbed = construct_lift(
            sl2(), 5, context=sl2_lift5.context, perturbation=seeded_perturbation(seed)
        )
        assert perturbed.rho.terms == sl2_lift5.rho.terms

    def test_rejects_small_degree(self):
        """Test that the truncation degree is at least 3."""
        with pytest.raises(LiftDegreeError):
            construct_lift(sl2(), 2)

    def test_rejects_context_mismatch(self, sl2_context3):
        """Test that the context cap must equal N."""
        with pytest.raises(LiftDegreeError):
            construct_lift(sl2(), 4, context=sl2_context3)

    def test_validation_gate(self, non_cybe_algebra):
        """Test the gate runs before the lift."""
        with pytest.raises(ValidationFailedError):
            initial_lift(non_cybe_algebra)


class TestExtend:
    """Tests for single steps."""

    def test_degree3_defects_satisfy_cocycle_conditions(self, sl2_context4):
        """Test the defects of rho_3 = r."""
        state = initial_lift(sl2(), context=sl2_context4, validate=False)
        alpha, beta = defects(state)

        residuals = cocycle_condition_residuals(alpha, beta)
        assert all(r.is_zero() for r in residuals.values())
        # the CYBE cancels both defects in degree 3
        assert alpha.graded_component(3).is_zero()
        assert beta.graded_component(3).is_zero()

    def test_step_keeps_lower_degrees(self, sl2_context4, sl2_lift4):
        """Test that extend only adds terms of the current degree."""
        state = initial_lift(sl2(), context=sl2_context4, validate=False)
        state = extend(state)
        state = extend(state)

        assert state.degree == 5
        assert state.rho == sl2_lift4.rho
        assert state.rho.truncate(2) == r_element(sl2_context4)

    def test_complete_state(self, sl2_lift4):
        """Test that a complete state cannot be extended."""
        with pytest.raises(InternalInvariantError):
            extend(sl2_lift4)

    def test_audit_qt_identity(self, sl2_lift5, triangular_lift4):
        """Test the QT identity holds for the section at every recorded step."""
        perturbed = construct_lift(
            sl2(), 5, context=sl2_lift5.context, perturbation=seeded_perturbation(5), keep_audit=True
        )
        for state in (sl2_lift5, triangular_lift4, perturbed):
            assert state.audit
            assert all(step.qt_residual_terms == 0 for step in state.audit)

    def test_qt_identity_failure_raises(self, sl2_context4):
        """Test a nonzero QT residual stops a verified step."""
        residual = sl2_context4.element(3, {(1, 0, 0, 0, 1, 0, 0, 0, 1): 1})
        state = initial_lift(sl2(), context=sl2_context4, validate=False)

        with patch("rlift.services.liftengine.qt_identity_residual", return_value=residual):
            with pytest.raises(InternalInvariantError, match="QT identity"):
                extend(state, verify=True)
            unchecked = extend(state, verify=False, keep_audit=True)

        assert unchecked.audit[-1].qt_residual_terms == 1

    def test_without_audit(self, sl2_context4):
        """Test that the audit trail is optional."""
        state = initial_lift(sl2(), context=sl2_context4, validate=False)
        state = extend(state, keep_audit=False)
        assert state.audit == ()


class TestAxiomFailures:
    """Tests for elements that are not lifts."""

    def test_degree3_perturbation_breaks_cabling(self, sl2_context4, sl2_lift4):
        """Test that adding x_h^2 (x) x_e breaks the first cabling identity."""
        bump = sl2_context4.element(2, {(2, 0, 0, 0, 1, 0): 1})
        report = check_lift_axioms(sl2_lift4.rho + bump)

        assert "gamma.left" in report.failures()
        assert report.axiom_passed("alpha")
        assert report.axiom_passed("delta")

    def test_quadratic_change_breaks_delta(self, sl2_context4, sl2_lift4):
        """Test that changing the quadratic part fails the r check."""
        bump = sl2_context4.element(2, {(1, 0, 0, 1, 0, 0): 1})
        report = check_lift_axioms(sl2_lift4.rho + bump)
        assert "delta" in report.failures()

    def test_qt_defect_of_r_is_cybe(self, sl2_context3, non_cybe_algebra):
        """Test the degree-3 part of psi for r = h (x) e is its CYBE residual."""
        rho = sl2_context3.from_tensor(non_cybe_algebra.r)
        expected = sl2_context3.from_tensor(cybe_residual(non_cybe_algebra))

        assert qt_defect(rho).graded_component(3) == expected
        assert not expected.is_zero()

    def test_qt_defect_of_standard_r(self, sl2_context3):
        """Test psi vanishes in degree 3 for a CYBE solution."""
        assert qt_defect(r_element(sl2_context3)).graded_component(3).is_zero()
