"""Tests for the CBH star product and truncated operators."""

import random
from fractions import Fraction

import pytest

from rlift.services.cbh import (
    OperatorKind,
    PreconditionError,
    TruncatedOperator,
    bk_term,
    exp_operator,
    hamiltonian,
    star,
    star_all,
    star_conjugate,
)
from rlift.services.formalgroup import build_context, random_element
from tests.conftest import abelian


def _m2(context, legs, seed, top=None):
    rng = random.Random(seed)
    return random_element(context, legs, rng, min_degree=2, max_degree=top, density=0.4)


class TestStar:
    """Tests for the CBH product."""

    def test_abelian_star_is_sum(self):
        """Test f * g = f + g when the Poisson bracket vanishes."""
        context = build_context(abelian(), 2, 4)
        f, g = _m2(context, 2, 1), _m2(context, 2, 2)
        assert star(f, g) == f + g

    def test_low_degree_terms(self, sl2_context3):
        """Test f * g = f + g + {f, g}/2 modulo m^4 for bilinear f, g."""
        context = sl2_context3
        f = context.element(2, {(1, 0, 0, 0, 1, 0): 1})
        g = context.element(2, {(0, 1, 0, 0, 0, 1): 1, (0, 0, 1, 1, 0, 0): 2})
        expected = f + g + context.poisson(f, g) * Fraction(1, 2)
        assert star(f, g) == expected

    def test_associativity(self, sl2_context4):
        """Test (f * g) * h = f * (g * h)."""
        f, g, h = (_m2(sl2_context4, 2, seed, top=3) for seed in (3, 4, 5))
        assert star(star(f, g), h) == star(f, star(g, h))

    def test_inverse(self, sl2_context4):
        """Test f * (-f) = 0."""
        f = _m2(sl2_context4, 1, 6)
        assert star(f, -f).is_zero()

    def test_zero_is_unit(self, sl2_context3):
        """Test f * 0 = f."""
        f = _m2(sl2_context3, 2, 7)
        assert star(f, sl2_context3.zero(2)) == f

    def test_rejects_linear_terms(self, sl2_context3):
        """Test that operands must lie in m^2."""
        with pytest.raises(PreconditionError):
            star(sl2_context3.generator(0), sl2_context3.zero(1))

    def test_star_all(self, sl2_context4):
        """Test the left-nested product of several elements."""
        f, g, h = (_m2(sl2_context4, 1, seed) for seed in (8, 9, 10))
        assert star_all([f, g, h]) == star(star(f, g), h)
        assert star_all([f]) == f

    def test_bk_term(self, sl2_context3):
        """Test B_1 = f + g and B_2 = {f, g}/2."""
        f = _m2(sl2_context3, 1, 12)
        g = _m2(sl2_context3, 1, 13)
        assert bk_term(1, f, g) == f + g
        assert bk_term(2, f, g) == sl2_context3.poisson(f, g) * Fraction(1, 2)
        with pytest.raises(PreconditionError):
            bk_term(0, f, g)


class TestOperators:
    """Tests for truncated operators and their exponentials."""

    def test_identity(self, sl2_context3):
        """Test the identity operator."""
        f = _m2(sl2_context3, 2, 14)
        assert TruncatedOperator.identity(sl2_context3, 2).apply(f) == f

    def test_hamiltonian_is_derivation(self, sl2_context3):
        """Test V_rho(fg) = V_rho(f) g + f V_rho(g)."""
        context = sl2_context3
        rho = _m2(context, 2, 15)
        v = hamiltonian(rho)
        f = context.generator(0, 1, 2) + context.generator(2, 2, 2)
        g = context.generator(1, 1, 2)
        assert v(f * g) == v(f) * g + f * v(g)
        assert v(f) == context.poisson(rho, f)

    def test_hamiltonian_shift(self, sl2_context4):
        """Test that {rho, -} raises the filtration by at least one."""
        rho = _m2(sl2_context4, 2, 16)
        v = hamiltonian(rho)
        assert v.shift == 1
        assert v.respects_shift()
        assert v.filtration_shift() >= 1

    def test_exp_is_morphism(self, sl2_context3):
        """Test exp(V_rho) is multiplicative."""
        context = sl2_context3
        op = exp_operator(hamiltonian(_m2(context, 2, 17)))
        f = _m2(context, 2, 18)
        g = context.generator(1, 2, 2) + context.generator(0, 1, 2)
        assert op.kind is OperatorKind.MORPHISM
        assert op(f * g) == op(f) * op(g)

    def test_exp_routes_agree(self, sl2_context3):
        """Test the generator route of exp agrees with the series on every column."""
        context = sl2_context3
        v = hamiltonian(_m2(context, 2, 19))
        linear = TruncatedOperator(context, 2, v.cap, OperatorKind.LINEAR, column=v.column, shift=1)
        by_generators = exp_operator(v)
        by_series = exp_operator(linear)
        for f in [_m2(context, 2, 20), context.generator(2, 1, 2) * context.generator(1, 2, 2)]:
            assert by_generators(f) == by_series(f)

    def test_exp_rejects_shift_zero(self, sl2_context3):
        """Test that only filtration-raising operators are exponentiated."""
        with pytest.raises(PreconditionError):
            exp_operator(TruncatedOperator.identity(sl2_context3, 1))

    def test_star_conjugate_matches_exp(self, sl2_context3):
        """Test rho * f * (-rho) is exp(V_rho)(f)."""
        context = sl2_context3
        rho = _m2(context, 1, 21)
        f = _m2(context, 1, 22)
        assert star_conjugate(rho, f) == star(star(rho, f), -rho)

    def test_compose_and_sub(self, sl2_context3):
        """Test composition and difference of operators."""
        context = sl2_context3
        v = hamiltonian(_m2(context, 2, 23))
        identity = TruncatedOperator.identity(context, 2)
        f = _m2(context, 2, 24)
        assert v.compose(identity)(f) == v(f)
        assert (identity - identity)(f).is_zero()
        assert identity.compose(v).shift == 1

    def test_on_legs_routes_agree(self, sl2_context3):
        """Test embedding a morphism on legs 1 and 3 by images and by columns."""
        context = sl2_context3
        op = exp_operator(hamiltonian(_m2(context, 2, 25)))
        linear = TruncatedOperator(context, 2, op.cap, OperatorKind.LINEAR, column=op.column)
        f = context.generator(0, 1, 3) * context.generator(1, 2, 3) + context.generator(2, 3, 3)
        assert op.on_legs((1, 3), 3)(f) == linear.on_legs((1, 3), 3)(f)

    def test_materialize(self, sl2_context3):
        """Test that materializing produces one column per basis monomial."""
        op = TruncatedOperator.identity(sl2_context3, 1, cap=2)
        columns = op.materialize()
        assert len(columns) == 10
        assert all(columns[e] == sl2_context3.monomial(e) for e in columns)


class TestStarFiltration:
    """Tests for the filtration properties of the CBH product."""

    @pytest.mark.parametrize("context_name", ["sl2_context4", "triangular_context4"])
    def test_top_degree_is_linear(self, request, context_name):
        """Test f * (h + g) = f * h + g and (f + g) * h = f * h + g for g of top degree."""
        context = request.getfixturevalue(context_name)
        f, h = _m2(context, 2, 21), _m2(context, 2, 22)
        rng = random.Random(23)
        g = random_element(context, 2, rng, min_degree=context.cap, max_degree=context.cap, density=0.4)

        assert not g.is_zero()
        assert star(f, h + g) == star(f, h) + g
        assert star(f + g, h) == star(f, h) + g

    @pytest.mark.parametrize("lift", ["sl2_lift4", "triangular_lift4"])
    def test_disjoint_legs_commute(self, request, lift):
        """Test rho13 * rho24 = rho24 * rho13 = rho13 + rho24."""
        rho = request.getfixturevalue(lift).rho
        context = rho.context
        rho13 = context.insert(rho, (1, 3), 4)
        rho24 = context.insert(rho, (2, 4), 4)

        assert star(rho13, rho24) == star(rho24, rho13)
        assert star(rho13, rho24) == rho13 + rho24

    @pytest.mark.parametrize("context_name", ["sl2_context4", "triangular_context4"])
    def test_bk_term_raises_filtration(self, request, context_name):
        """Test B_k(f, g) lies in m^(k+1) for f, g in m^2."""
        context = request.getfixturevalue(context_name)
        f, g = _m2(context, 2, 24), _m2(context, 2, 25)

        assert not context.poisson(f, g).is_zero()
        for k in range(1, context.cap + 2):
            assert bk_term(k, f, g).filtration_degree() >= k + 1
