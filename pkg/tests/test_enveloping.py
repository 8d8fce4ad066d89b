"""Tests for the enveloping algebra of the dual Lie algebra."""

from fractions import Fraction

import pytest

from rlift.services.enveloping import (
    DegreeOverflowError,
    EnvelopingAlgebra,
    PbwElement,
    PbwIndexError,
)
from rlift.services.liebialg import dual_bracket
from rlift.utils.monomials import monomials_up_to
from tests.conftest import sl2, triangular


def flip(t):
    """Swap the tensor factors of a two-factor PBW tensor."""
    return {(right, left): c for (left, right), c in t.items()}


@pytest.fixture
def triangular_envelope():
    """U(g*) for the triangular algebra, where [xi_h, xi_e] = -xi_h."""
    L = triangular()
    return EnvelopingAlgebra(dual_bracket(L), L.bracket, 4)


@pytest.fixture
def sl2_envelope():
    """U(g*) for sl2 with the standard r-matrix."""
    L = sl2()
    return EnvelopingAlgebra(dual_bracket(L), L.bracket, 3)


class TestStraightening:
    """Tests for PBW normal forms."""

    def test_sorted_word_is_fixed(self, triangular_envelope):
        """Test that a PBW monomial is its own normal form."""
        assert triangular_envelope.normalize((0, 1)) == PbwElement({(0, 1): 1})

    def test_commutator_correction(self, triangular_envelope):
        """Test xi_e xi_h = xi_h xi_e + xi_h."""
        assert triangular_envelope.normalize((1, 0)) == PbwElement({(0, 1): 1, (0,): 1})

    def test_index_out_of_range(self, triangular_envelope):
        """Test that an unknown dual basis index is rejected."""
        with pytest.raises(PbwIndexError):
            triangular_envelope.normalize((0, 5))

    def test_multiplication_is_associative(self, sl2_envelope):
        """Test (ab)c = a(bc) on a few words."""
        words = [(2,), (1, 0), (2, 1), (0, 2)]
        elements = [sl2_envelope.normalize(w) for w in words]
        for a in elements:
            for b in elements:
                for c in elements[:2]:
                    left = sl2_envelope.multiply(sl2_envelope.multiply(a, b), c)
                    right = sl2_envelope.multiply(a, sl2_envelope.multiply(b, c))
                    assert left == right

    def test_unit(self, sl2_envelope):
        """Test the empty word is the unit."""
        a = sl2_envelope.normalize((2, 0, 1))
        assert sl2_envelope.multiply(PbwElement.unit(), a) == a
        assert PbwElement.unit().degree == 0
        assert PbwElement().degree == -1


class TestSymmetrization:
    """Tests for Sym and its inverse."""

    def test_sym_of_two_generators(self, triangular_envelope):
        """Test Sym(xi_h xi_e) = xi_h xi_e + 1/2 xi_h."""
        assert triangular_envelope.sym_map((1, 1)) == PbwElement(
            {(0, 1): 1, (0,): Fraction(1, 2)}
        )

    def test_inverse(self, sl2_envelope):
        """Test that Sym^-1 inverts Sym up to degree 3."""
        for exponent in monomials_up_to(3, 3):
            assert sl2_envelope.sym_inverse(sl2_envelope.sym_map(exponent)) == {exponent: 1}

    def test_degree_overflow(self, sl2_envelope):
        """Test that symmetrization refuses degrees above the cap."""
        with pytest.raises(DegreeOverflowError):
            sl2_envelope.sym_map((2, 1, 1))


class TestCoalgebra:
    """Tests for the coproduct and the co-Poisson cobracket."""

    def test_generator_is_primitive(self, triangular_envelope):
        """Test Delta(xi) = xi (x) 1 + 1 (x) xi."""
        coproduct = triangular_envelope.coproduct(PbwElement({(0,): 1}))
        assert coproduct == {((0,), ()): 1, ((), (0,)): 1}

    def test_cobracket_on_generators(self, triangular_envelope):
        """Test delta_U(xi_e) = xi_h (x) xi_e - xi_e (x) xi_h and delta_U(xi_h) = 0."""
        assert triangular_envelope.copoisson_cobracket(PbwElement({(1,): 1})) == {
            ((0,), (1,)): 1,
            ((1,), (0,)): -1,
        }
        assert triangular_envelope.copoisson_cobracket(PbwElement({(0,): 1})) == {}

    def test_cobracket_is_antisymmetric(self, sl2_envelope):
        """Test flip(delta_U(u)) = -delta_U(u) on symmetrized monomials."""
        for exponent in monomials_up_to(3, 3, start=1):
            delta = sl2_envelope.copoisson_cobracket(sl2_envelope.sym_map(exponent))
            assert flip(delta) == {key: -c for key, c in delta.items()}

    def test_co_leibniz(self, sl2_envelope):
        """Test delta_U(uv) = delta_U(u) Delta(v) + Delta(u) delta_U(v)."""
        u = sl2_envelope.normalize((1,))
        v = sl2_envelope.normalize((2, 0))
        left = sl2_envelope.copoisson_cobracket(sl2_envelope.multiply(u, v))
        first = sl2_envelope.tensor_multiply(
            sl2_envelope.copoisson_cobracket(u), sl2_envelope.coproduct(v)
        )
        second = sl2_envelope.tensor_multiply(
            sl2_envelope.coproduct(u), sl2_envelope.copoisson_cobracket(v)
        )
        right = dict(first)
        for key, c in second.items():
            right[key] = right.get(key, 0) + c
        assert left == {key: c for key, c in right.items() if c}

    def test_linear_pairing_reads_structure_constants(self, sl2_envelope):
        """Test <x_i (x) x_j, delta_U(xi_k)> = c_ij^k."""
        L = sl2()
        for k in range(3):
            pairing = sl2_envelope.linear_pairing(
                sl2_envelope.copoisson_cobracket(PbwElement({(k,): 1}))
            )
            expected = {
                (i, j): L.bracket[i][j][k]
                for i in range(3)
                for j in range(3)
                if L.bracket[i][j][k]
            }
            assert pairing == expected
