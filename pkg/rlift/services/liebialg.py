"""Lie bialgebra structure: validation, cobracket from r, CYBE and the dual Lie algebra.

All tensors are dense and indexed by 0-based basis positions; every check returns the
exact residual so that "zero" means identically zero.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from fractions import Fraction

from rlift.core.models import (
    DualLieAlgebra,
    LieBialgebra,
    SparseTensor,
    Tensor2,
    Tensor3,
    ValidationReport,
)

logger = logging.getLogger(__name__)


class LieBialgebraError(Exception):
    """Base class for errors about the input Lie bialgebra."""

    pass


class StructuralInputError(LieBialgebraError):
    """Raised when the structure tensors have the wrong shape."""

    pass


class NotALieBialgebraError(LieBialgebraError):
    """Raised when the cobracket fails co-Jacobi, so g* is not a Lie algebra."""

    pass


class ValidationFailedError(LieBialgebraError):
    """Raised when the input gate finds a nonzero residual."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"Input validation failed: {', '.join(report.failures())}")


def check_shapes(L: LieBialgebra) -> None:
    """Verify the tensor shapes against ``L.dim``.

    Raises:
        StructuralInputError: If a tensor has the wrong shape
    """
    d = L.dim
    if d < 1:
        raise StructuralInputError(f"Dimension must be positive, got {d}")
    if len(L.basis_names) != d:
        raise StructuralInputError(f"Expected {d} basis names, got {len(L.basis_names)}")
    if len(L.bracket) != d or any(
        len(plane) != d or any(len(row) != d for row in plane) for plane in L.bracket
    ):
        raise StructuralInputError(f"Bracket tensor must have shape {d}x{d}x{d}")
    if len(L.r) != d or any(len(row) != d for row in L.r):
        raise StructuralInputError(f"r must have shape {d}x{d}")
    if L.cobracket is not None and (
        len(L.cobracket) != d
        or any(len(plane) != d or any(len(row) != d for row in plane) for plane in L.cobracket)
    ):
        raise StructuralInputError(f"Cobracket tensor must have shape {d}x{d}x{d}")


def sparse(tensor: Sequence) -> SparseTensor:
    """Nonzero entries of a dense nested tensor, keyed by index tuple."""
    entries: SparseTensor = {}

    def walk(node: Sequence | Fraction, index: tuple[int, ...]) -> None:
        if isinstance(node, (Fraction, int)):
            if node != 0:
                entries[index] = Fraction(node)
            return
        for i, child in enumerate(node):
            walk(child, index + (i,))

    walk(tensor, ())
    return entries


def lie_bracket(L: LieBialgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
    """[x, y] for coordinate vectors x, y."""
    d = L.dim
    result = [Fraction(0)] * d
    for i in range(d):
        if x[i] == 0:
            continue
        for j in range(d):
            if y[j] == 0:
                continue
            coeff = x[i] * y[j]
            for k in range(d):
                if L.bracket[i][j][k]:
                    result[k] += coeff * L.bracket[i][j][k]
    return result


def _jacobi_residual(c: Tensor3, d: int) -> SparseTensor:
    """Cyclic sum [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]."""
    residual: SparseTensor = {}
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for m in range(d):
                    value = sum(
                        (
                            c[i][j][a] * c[a][k][m]
                            + c[j][k][a] * c[a][i][m]
                            + c[k][i][a] * c[a][j][m]
                            for a in range(d)
                        ),
                        Fraction(0),
                    )
                    if value:
                        residual[(i, j, k, m)] = value
    return residual


def _antisymmetry_residual(c: Tensor3, d: int) -> SparseTensor:
    residual: SparseTensor = {}
    for i in range(d):
        for j in range(d):
            for k in range(d):
                value = c[i][j][k] + c[j][i][k]
                if value:
                    residual[(i, j, k)] = value
    return residual


def coboundary_image(
    L: LieBialgebra, t: Tensor2, x: Sequence[Fraction], y: Sequence[Fraction]
) -> list[list[Fraction]]:
    """[t, x (x) 1 + 1 (x) y] as a d x d coefficient matrix.

    With t = sum t[a][b] e_a (x) e_b this is sum t[a][b] ([e_a, x] (x) e_b + e_a (x) [e_b, y]).
    """
    d = L.dim
    result = [[Fraction(0)] * d for _ in range(d)]
    ad_x = [lie_bracket(L, [Fraction(int(a == i)) for i in range(d)], x) for a in range(d)]
    ad_y = [lie_bracket(L, [Fraction(int(b == i)) for i in range(d)], y) for b in range(d)]
    for a in range(d):
        for b in range(d):
            if t[a][b] == 0:
                continue
            for p in range(d):
                if ad_x[a][p]:
                    result[p][b] += t[a][b] * ad_x[a][p]
                if ad_y[b][p]:
                    result[a][p] += t[a][b] * ad_y[b][p]
    return result


def cobracket_from_r(L: LieBialgebra) -> Tensor3:
    """delta(e_k) = [r, e_k (x) 1 + 1 (x) e_k], cached into ``L.cobracket``."""
    if L.cobracket is not None:
        return L.cobracket
    check_shapes(L)
    d = L.dim
    planes = []
    for k in range(d):
        basis_k = [Fraction(int(i == k)) for i in range(d)]
        image = coboundary_image(L, L.r, basis_k, basis_k)
        planes.append(tuple(tuple(row) for row in image))
    L.cobracket = tuple(planes)
    return L.cobracket


def dual_structure_constants(gamma: Tensor3, d: int) -> Tensor3:
    """Structure constants of g*: [xi_i, xi_j] = sum_k gamma[k][i][j] xi_k."""
    return tuple(
        tuple(tuple(gamma[k][i][j] for k in range(d)) for j in range(d)) for i in range(d)
    )


def validate_bialgebra(L: LieBialgebra) -> ValidationReport:
    """Exact residuals of the Lie bialgebra axioms.

    Checks antisymmetry and Jacobi of the bracket, antisymmetry and co-Jacobi of the
    cobracket, and the 1-cocycle condition delta([x,y]) = x.delta(y) - y.delta(x).

    Args:
        L: The Lie bialgebra; its cobracket is derived from r if not given

    Returns:
        ValidationReport keyed by check name

    Raises:
        StructuralInputError: On shape mismatch
    """
    check_shapes(L)
    d = L.dim
    c = L.bracket
    gamma = cobracket_from_r(L)

    cobracket_antisymmetry: SparseTensor = {}
    for k in range(d):
        for i in range(d):
            for j in range(d):
                value = gamma[k][i][j] + gamma[k][j][i]
                if value:
                    cobracket_antisymmetry[(k, i, j)] = value

    cocycle: SparseTensor = {}
    for i in range(d):
        for j in range(d):
            for p in range(d):
                for q in range(d):
                    lhs = sum((c[i][j][a] * gamma[a][p][q] for a in range(d)), Fraction(0))
                    x_dy = sum(
                        (gamma[j][a][q] * c[i][a][p] + gamma[j][p][a] * c[i][a][q] for a in range(d)),
                        Fraction(0),
                    )
                    y_dx = sum(
                        (gamma[i][a][q] * c[j][a][p] + gamma[i][p][a] * c[j][a][q] for a in range(d)),
                        Fraction(0),
                    )
                    value = lhs - x_dy + y_dx
                    if value:
                        cocycle[(i, j, p, q)] = value

    report = ValidationReport(
        residuals={
            "antisymmetry": _antisymmetry_residual(c, d),
            "jacobi": _jacobi_residual(c, d),
            "cobracket_antisymmetry": cobracket_antisymmetry,
            "co_jacobi": _jacobi_residual(dual_structure_constants(gamma, d), d),
            "cocycle": cocycle,
        }
    )
    logger.debug(f"Bialgebra checks for d={d}: failures={report.failures()}")
    return report


def cybe_residual(L: LieBialgebra) -> Tensor3:
    """[r12, r13] + [r12, r23] + [r13, r23] as a dense d x d x d tensor."""
    check_shapes(L)
    d = L.dim
    c = L.bracket
    r = L.r
    out = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    nonzero = [(a, b, r[a][b]) for a in range(d) for b in range(d) if r[a][b]]
    for a, b, rab in nonzero:
        for e, f, ref in nonzero:
            coeff = rab * ref
            for k in range(d):
                # [r12, r13]: [e_a, e_e] (x) e_b (x) e_f
                if c[a][e][k]:
                    out[k][b][f] += coeff * c[a][e][k]
                # [r12, r23]: e_a (x) [e_b, e_e] (x) e_f
                if c[b][e][k]:
                    out[a][k][f] += coeff * c[b][e][k]
                # [r13, r23]: e_a (x) e_e (x) [e_b, e_f]
                if c[b][f][k]:
                    out[a][e][k] += coeff * c[b][f][k]
    return tuple(tuple(tuple(row) for row in plane) for plane in out)


def invariance_residual(L: LieBialgebra) -> SparseTensor:
    """Entries of [r + r21, e_k (x) 1 + 1 (x) e_k] for every basis vector e_k."""
    check_shapes(L)
    d = L.dim
    t = tuple(tuple(L.r[a][b] + L.r[b][a] for b in range(d)) for a in range(d))
    residual: SparseTensor = {}
    for k in range(d):
        basis_k = [Fraction(int(i == k)) for i in range(d)]
        image = coboundary_image(L, t, basis_k, basis_k)
        for p in range(d):
            for q in range(d):
                if image[p][q]:
                    residual[(k, p, q)] = image[p][q]
    return residual


def dual_bracket(L: LieBialgebra) -> DualLieAlgebra:
    """The Lie algebra g* with <[xi, eta], x> = <xi (x) eta, delta(x)>.

    Raises:
        NotALieBialgebraError: If the cobracket fails antisymmetry or co-Jacobi
    """
    gamma = cobracket_from_r(L)
    d = L.dim
    bracket_star = dual_structure_constants(gamma, d)
    if _antisymmetry_residual(bracket_star, d) or _jacobi_residual(bracket_star, d):
        raise NotALieBialgebraError("The cobracket fails antisymmetry or co-Jacobi; g* is not a Lie algebra")
    return DualLieAlgebra(dim=d, bracket_star=bracket_star)


def validation_gate(L: LieBialgebra) -> ValidationReport:
    """All hypotheses of the construction: bialgebra axioms, CYBE and invariance of r + r21."""
    report = validate_bialgebra(L)
    report.residuals["cybe"] = sparse(cybe_residual(L))
    report.residuals["invariance"] = invariance_residual(L)
    if report.passed:
        logger.info(f"Input gate passed for d={L.dim}")
    else:
        logger.info(f"Input gate failed: {', '.join(report.failures())}")
    return report


def require_valid(L: LieBialgebra) -> ValidationReport:
    """Run the gate and raise on any nonzero residual.

    Raises:
        ValidationFailedError: If any residual is nonzero
    """
    report = validation_gate(L)
    if not report.passed:
        raise ValidationFailedError(report)
    return report
