"""Shared Lie bialgebras, contexts and lifts."""

from fractions import Fraction
from unittest.mock import patch

import pytest
from sympy import Matrix, Rational
from sympy.polys.matrices import DomainMatrix

from rlift.core.models import LieBialgebra
from rlift.services.cbh import star
from rlift.services.formalgroup import build_context
from rlift.services.liftengine import construct_lift
from rlift.utils.monomials import leg_degrees, monomials_of_degree

SL2_BRACKET = {(0, 1, 1): 2, (0, 2, 2): -2, (1, 2, 0): 1}
SL2_R = {(1, 2): 1, (0, 0): Fraction(1, 4)}


def sl2(r: dict[tuple[int, int], Fraction | int] | None = None) -> LieBialgebra:
    """sl2 with basis h, e, f and the standard r-matrix unless ``r`` is given."""
    return LieBialgebra.from_sparse(
        3, SL2_BRACKET, SL2_R if r is None else r, basis_names=("h", "e", "f")
    )


def triangular() -> LieBialgebra:
    """The two-dimensional algebra [h, e] = e with r = h (x) e - e (x) h."""
    return LieBialgebra.from_sparse(
        2, {(0, 1, 1): 1}, {(0, 1): 1, (1, 0): -1}, basis_names=("h", "e")
    )


def abelian() -> LieBialgebra:
    """Two-dimensional abelian algebra with a non-symmetric r."""
    return LieBialgebra.from_sparse(2, {}, {(0, 1): 1, (0, 0): Fraction(1, 2)})


SL2_DOCUMENT = {
    "dim": 3,
    "basis": ["h", "e", "f"],
    "bracket": [[1, 2, 2, "2", "1"], [1, 3, 3, "-2", "1"], [2, 3, 1, "1", "1"]],
    "r": [[2, 3, "1", "1"], [1, 1, "1", "4"]],
}

TRIANGULAR_DOCUMENT = {
    "dim": 2,
    "basis": ["h", "e"],
    "bracket": [[1, 2, 2, 1, 1]],
    "r": [[1, 2, 1, 1], [2, 1, -1, 1]],
}

NON_CYBE_DOCUMENT = {
    "dim": 3,
    "bracket": [[1, 2, 2, "2", "1"], [1, 3, 3, "-2", "1"], [2, 3, 1, "1", "1"]],
    "r": [[1, 2, "1", "1"]],
}


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path):
    """Keep every test away from the user's settings file."""
    import rlift.core.settings as settings_module

    with patch.object(settings_module, "SETTINGS_FILE", tmp_path / "settings.json"):
        settings_module._settings = None
        yield
        settings_module._settings = None


@pytest.fixture
def sl2_algebra():
    """sl2 with the standard r-matrix."""
    return sl2()


@pytest.fixture
def non_cybe_algebra():
    """sl2 with r = h (x) e, which fails the classical Yang-Baxter equation."""
    return sl2({(0, 1): 1})


@pytest.fixture
def triangular_algebra():
    """Two-dimensional triangular Lie bialgebra."""
    return triangular()


@pytest.fixture
def abelian_algebra():
    """Two-dimensional abelian Lie bialgebra."""
    return abelian()


@pytest.fixture(scope="session")
def sl2_context3():
    """Context for sl2 on four legs at cap 3."""
    return build_context(sl2(), 4, 3, cross_check_degree=3)


@pytest.fixture(scope="session")
def sl2_context4():
    """Context for sl2 on four legs at cap 4."""
    return build_context(sl2(), 4, 4, cross_check_degree=4)


@pytest.fixture(scope="session")
def triangular_context4():
    """Context for the triangular algebra at cap 4."""
    return build_context(triangular(), 4, 4, cross_check_degree=4)


@pytest.fixture(scope="session")
def sl2_lift4(sl2_context4):
    """The lift of the standard sl2 r-matrix modulo m^5."""
    return construct_lift(sl2(), 4, context=sl2_context4, verify=True, keep_audit=True)


@pytest.fixture(scope="session")
def sl2_lift5():
    """The lift of the standard sl2 r-matrix modulo m^6."""
    context = build_context(sl2(), 4, 5, cross_check_degree=4)
    return construct_lift(sl2(), 5, context=context, verify=True, keep_audit=True)


@pytest.fixture(scope="session")
def triangular_lift4(triangular_context4):
    """The lift of the triangular r-matrix modulo m^5."""
    return construct_lift(triangular(), 4, context=triangular_context4, verify=True, keep_audit=True)


def cabling_residual(rho, n):
    """Degree-n parts of both cabling identities of rho, keyed by (identity, exponent)."""
    context = rho.context
    rho13 = context.insert(rho, (1, 3), 3)
    rho23 = context.insert(rho, (2, 3), 3)
    rho12 = context.insert(rho, (1, 2), 3)
    sides = {
        "left": context.coproduct_on_leg(rho, 1) - star(rho13, rho23),
        "right": context.coproduct_on_leg(rho, 2) - star(rho13, rho12),
    }
    return {
        (name, e): c
        for name, side in sides.items()
        for e, c in side.graded_component(n).terms.items()
    }


def dense_cabling_solve(context, lower, n, reverse=False):
    """Degree-n correction of ``lower`` from one dense solve over every normalized monomial.

    Each column is the change of the degree-n cabling residual when one monomial is
    added to ``lower``. ``reverse`` lists the unknowns backwards, which moves the pivots.
    """
    unknowns = [e for e in monomials_of_degree(2 * context.dim, n) if all(leg_degrees(e, context.dim))]
    if reverse:
        unknowns.reverse()
    base = cabling_residual(lower, n)
    columns = []
    for e in unknowns:
        shifted = cabling_residual(lower + context.element(2, {e: 1}), n)
        columns.append({k: shifted.get(k, 0) - base.get(k, 0) for k in set(shifted) | set(base)})
    rows = sorted({k for column in columns for k in column if column[k]} | set(base))

    def q(value):
        value = Fraction(value)
        return Rational(value.numerator, value.denominator)

    width = len(unknowns)
    augmented = Matrix(
        len(rows),
        width + 1,
        lambda i, j: -q(base.get(rows[i], 0)) if j == width else q(columns[j].get(rows[i], 0)),
    )
    reduced, pivots = DomainMatrix.from_Matrix(augmented).to_field().rref()
    assert width not in pivots, "cabling equations are inconsistent"
    assert list(pivots) == list(range(width)), "cabling equations leave free unknowns"
    values = reduced.to_Matrix()
    return {
        unknowns[j]: Fraction(int(values[j, width].p), int(values[j, width].q))
        for j in range(width)
        if values[j, width] != 0
    }
