"""Exact sparse linear algebra over QQ.

Systems arrive as lists of sparse rows keyed by arbitrary sortable labels. They are
assembled into sympy ``DomainMatrix`` objects over ``QQ`` and reduced exactly.
"""

from collections.abc import Hashable, Mapping, Sequence
from fractions import Fraction
from typing import Any, TypeVar

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

H = TypeVar("H", bound=Hashable)


class InconsistentSystemError(ValueError):
    """Raised when a linear system has no solution."""

    pass


def to_fraction(value: Any) -> Fraction:
    """Convert a ``QQ`` domain element to a ``Fraction``."""
    return Fraction(int(value.numerator), int(value.denominator))


def _qq(value: Fraction) -> Any:
    return QQ(value.numerator, value.denominator)


def _columns(rows: Sequence[Mapping[H, Fraction]]) -> list[H]:
    return sorted({label for row in rows for label in row})  # type: ignore[type-var]


def _matrix(
    rows: Sequence[Mapping[H, Fraction]], columns: Sequence[H], rhs: Sequence[Fraction] | None = None
) -> DomainMatrix:
    index = {label: j for j, label in enumerate(columns)}
    width = len(columns) + (1 if rhs is not None else 0)
    entries: dict[int, dict[int, Any]] = {}
    for i, row in enumerate(rows):
        line = {index[label]: _qq(Fraction(c)) for label, c in row.items() if c}
        if rhs is not None and rhs[i]:
            line[len(columns)] = _qq(Fraction(rhs[i]))
        if line:
            entries[i] = line
    return DomainMatrix(entries, (len(rows), width), QQ)


def solve(rows: Sequence[Mapping[H, Fraction]], rhs: Sequence[Fraction]) -> dict[H, Fraction]:
    """Canonical solution of ``rows . x = rhs``: free variables are set to zero.

    Args:
        rows: Sparse equations, one mapping label -> coefficient per equation
        rhs: Right-hand sides, aligned with ``rows``

    Returns:
        Nonzero entries of the solution

    Raises:
        InconsistentSystemError: If the system has no solution
    """
    if len(rows) != len(rhs):
        raise ValueError(f"Got {len(rows)} equations but {len(rhs)} right-hand sides")
    columns = _columns(rows)
    if not columns:
        if any(rhs):
            raise InconsistentSystemError("Nonzero right-hand side with no unknowns")
        return {}
    reduced, pivots = _matrix(rows, columns, rhs).rref()
    if len(columns) in pivots:
        raise InconsistentSystemError(
            f"No solution: {len(rows)} equations in {len(columns)} unknowns are inconsistent"
        )
    dense = reduced.to_list()
    solution: dict[H, Fraction] = {}
    for row, pivot in enumerate(pivots):
        value = to_fraction(dense[row][len(columns)])
        if value:
            solution[columns[pivot]] = value
    return solution


def rank(rows: Sequence[Mapping[H, Fraction]]) -> int:
    """Rank of a sparse matrix given by rows."""
    columns = _columns(rows)
    if not columns:
        return 0
    return int(_matrix(rows, columns).rank())


def kernel_basis(
    rows: Sequence[Mapping[H, Fraction]], columns: Sequence[H]
) -> list[dict[H, Fraction]]:
    """Basis of the null space, one vector per free column.

    ``columns`` lists every unknown, including those absent from all rows.
    """
    if not columns:
        return []
    if not any(rows):
        return [{label: Fraction(1)} for label in columns]
    reduced, pivots = _matrix(rows, columns).rref()
    dense = reduced.to_list()
    pivot_set = set(pivots)
    basis = []
    for free in range(len(columns)):
        if free in pivot_set:
            continue
        vector = {columns[free]: Fraction(1)}
        for row, pivot in enumerate(pivots):
            value = to_fraction(dense[row][free])
            if value:
                vector[columns[pivot]] = -value
        basis.append(vector)
    return basis
