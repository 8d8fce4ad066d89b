"""The co-Hochschild complex of the symmetric coalgebra S(g).

Cochains are homogeneous multi-leg elements of a truncated algebra context. The
coboundary d f = Delta_0(f) - f (x) 1 - 1 (x) f uses the cocommutative coproduct in
which g is primitive; it acts on one chosen leg of a multi-leg cochain and splits that
leg in two. Everything preserves the content (sum of the leg blocks), so every linear
system below decomposes into independent blocks by content.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from rlift.services.formalgroup import AlgebraContext, LegError, TruncatedElement
from rlift.utils.linalg import InconsistentSystemError, kernel_basis, rank, solve
from rlift.utils.monomials import (
    Exponent,
    content,
    join_blocks,
    leg_blocks,
    leg_degrees,
    monomials_of_degree,
    splittings,
)

logger = logging.getLogger(__name__)


class CocycleConditionError(Exception):
    """Raised when the defects (alpha, beta) violate the cocycle conditions."""

    def __init__(self, message: str, residuals: dict[str, TruncatedElement] | None = None):
        self.residuals = residuals or {}
        super().__init__(message)


class CochainDegreeError(ValueError):
    """Raised when a cochain is not homogeneous of the expected degree."""

    pass


@dataclass(frozen=True)
class GradedCochain:
    """A homogeneous degree-n element of S^n(g + ... + g) on ``element.legs`` legs."""

    element: TruncatedElement
    degree: int

    def __post_init__(self) -> None:
        """Check homogeneity."""
        if self.degree < 1:
            raise CochainDegreeError(f"Cochain degree must be positive, got {self.degree}")
        stray = [e for e in self.element.terms if sum(e) != self.degree]
        if stray:
            raise CochainDegreeError(
                f"Cochain has {len(stray)} terms outside degree {self.degree}"
            )

    @property
    def legs(self) -> int:
        """Number of legs."""
        return self.element.legs

    def is_zero(self) -> bool:
        """True for the zero cochain."""
        return self.element.is_zero()


@cache
def _block_coboundary(block: Exponent) -> tuple[tuple[Exponent, Exponent, int], ...]:
    """d(x^block) as (left, right, coefficient) triples."""
    terms: dict[tuple[Exponent, Exponent], int] = {}
    for left, right, weight in splittings(block):
        terms[(left, right)] = terms.get((left, right), 0) + weight
    zero = (0,) * len(block)
    for key in ((block, zero), (zero, block)):
        terms[key] = terms.get(key, 0) - 1
    return tuple((left, right, c) for (left, right), c in sorted(terms.items()) if c)


def _leg_coboundary(exponent: Exponent, leg: int, dim: int) -> Iterable[tuple[Exponent, int]]:
    blocks = leg_blocks(exponent, dim)
    head = join_blocks(blocks[: leg - 1])
    tail = join_blocks(blocks[leg:])
    for left, right, c in _block_coboundary(blocks[leg - 1]):
        yield head + left + right + tail, c


def d_on_leg(f: TruncatedElement, leg: int) -> TruncatedElement:
    """Apply d to leg ``leg`` (1-based); that leg becomes legs (leg, leg + 1).

    Raises:
        LegError: If the leg is out of range
    """
    if not 1 <= leg <= f.legs:
        raise LegError(f"Leg {leg} outside 1..{f.legs}")
    context = f.context
    result: dict[Exponent, Fraction] = {}
    for e, c in f.terms.items():
        for key, weight in _leg_coboundary(e, leg, context.dim):
            total = result.get(key, 0) + c * weight
            if total:
                result[key] = total
            else:
                result.pop(key, None)
    return context.element(f.legs + 1, result, f.cap)


def cohochschild_d(f: TruncatedElement) -> TruncatedElement:
    """d f = Delta_0(f) - f (x) 1 - 1 (x) f for a one-leg element."""
    if f.legs != 1:
        raise LegError(f"cohochschild_d takes a one-leg element, got {f.legs} legs")
    return d_on_leg(f, 1)


def d2_on_legs(f: TruncatedElement, leg: int) -> TruncatedElement:
    """d^(2) acting on legs (leg, leg + 1): (d on leg) - (d on leg + 1)."""
    return d_on_leg(f, leg) - d_on_leg(f, leg + 1)


def d2(f: TruncatedElement) -> TruncatedElement:
    """d^(2)(f) = (d (x) id)(f) - (id (x) d)(f) for a two-leg element."""
    if f.legs != 2:
        raise LegError(f"d2 takes a two-leg element, got {f.legs} legs")
    return d2_on_legs(f, 1)


def cocycle_condition_residuals(
    alpha: TruncatedElement, beta: TruncatedElement
) -> dict[str, TruncatedElement]:
    """Residuals of every condition the defects of a lift step must satisfy.

    * ``counit.alpha.<l>`` / ``counit.beta.<l>``: single-leg counits
    * ``conds1``: (id (x) id (x) d)(alpha) - (d (x) id (x) id)(beta)
    * ``conds2.alpha`` / ``conds2.beta``: (d2 (x) id)(alpha) and (id (x) d2)(beta)
    * ``conds3.alpha`` / ``conds3.beta``: alpha - alpha^{2,1,3} and beta - beta^{1,3,2}
    """
    context = alpha.context
    residuals: dict[str, TruncatedElement] = {}
    for name, element in (("alpha", alpha), ("beta", beta)):
        for leg in range(1, element.legs + 1):
            residuals[f"counit.{name}.{leg}"] = context.counit_on_leg(element, leg)
    residuals["conds1"] = d_on_leg(alpha, 3) - d_on_leg(beta, 1)
    residuals["conds2.alpha"] = d2_on_legs(alpha, 1)
    residuals["conds2.beta"] = d2_on_legs(beta, 2)
    residuals["conds3.alpha"] = alpha - context.insert(alpha, (2, 1, 3), 3)
    residuals["conds3.beta"] = beta - context.insert(beta, (1, 3, 2), 3)
    return residuals


def _normalized_two_leg(dim: int, n: int) -> list[Exponent]:
    """Degree-n two-leg monomials with both legs of positive degree."""
    return [e for e in monomials_of_degree(2 * dim, n) if all(leg_degrees(e, dim))]


def _solve_on_leg(
    context: AlgebraContext, target: TruncatedElement, leg: int, n: int
) -> TruncatedElement:
    """Canonical solution of (d on ``leg``)(sigma) = target among normalized cochains."""
    d = context.dim
    unknowns: dict[Exponent, list[Exponent]] = {}
    for e in _normalized_two_leg(d, n):
        unknowns.setdefault(content(e, d), []).append(e)
    rhs_by_block: dict[Exponent, dict[Exponent, Fraction]] = {}
    for e, c in target.terms.items():
        rhs_by_block.setdefault(content(e, d), {})[e] = c

    solution: dict[Exponent, Fraction] = {}
    for block, rhs in rhs_by_block.items():
        rows: dict[Exponent, dict[Exponent, Fraction]] = {key: {} for key in rhs}
        for unknown in unknowns.get(block, []):
            for key, weight in _leg_coboundary(unknown, leg, d):
                rows.setdefault(key, {})[unknown] = Fraction(weight)
        keys = sorted(rows)
        try:
            solution.update(solve([rows[k] for k in keys], [rhs.get(k, Fraction(0)) for k in keys]))
        except InconsistentSystemError as exc:
            raise CocycleConditionError(
                f"Leg-{leg} coboundary equation has no solution in content block {block}",
                {f"leg{leg}": target},
            ) from exc
    return context.element(2, solution, target.cap)


def solve_sigma(alpha: GradedCochain, beta: GradedCochain, n: int) -> GradedCochain:
    """The unique normalized sigma with (d (x) id) sigma = -alpha and (id (x) d) sigma = -beta.

    Solves each equation separately, then removes the ambiguity g (x) S^{n-1}(g) of the
    first solution using the second one.

    Raises:
        CochainDegreeError: If n < 3 or the cochains are not three-leg of degree n
        CocycleConditionError: If the cocycle conditions fail or no solution exists
    """
    if n < 3:
        raise CochainDegreeError(f"solve_sigma needs degree at least 3, got {n}")
    for name, cochain in (("alpha", alpha), ("beta", beta)):
        if cochain.degree != n or cochain.legs != 3:
            raise CochainDegreeError(f"{name} must be a three-leg cochain of degree {n}")
    context = alpha.element.context
    cap = min(alpha.element.cap, beta.element.cap)
    if alpha.is_zero() and beta.is_zero():
        return GradedCochain(context.zero(2, cap), n)

    residuals = cocycle_condition_residuals(alpha.element, beta.element)
    failed = {name: r for name, r in residuals.items() if not r.is_zero()}
    if failed:
        raise CocycleConditionError(
            f"Cocycle conditions fail: {', '.join(sorted(failed))}", failed
        )

    d = context.dim
    first = _solve_on_leg(context, -alpha.element, 1, n)
    second = _solve_on_leg(context, -beta.element, 2, n)
    difference = first - second
    left_linear = context.element(
        2, {e: c for e, c in difference.terms.items() if sum(leg_blocks(e, d)[0]) == 1}, cap
    )
    remainder = difference - left_linear
    if any(sum(leg_blocks(e, d)[1]) != 1 for e in remainder.terms):
        raise CocycleConditionError(
            "Difference of the partial solutions does not split into g (x) S and S (x) g",
            {"split": remainder},
        )
    sigma = first - left_linear

    checks = {
        "left": d_on_leg(sigma, 1) + alpha.element,
        "right": d_on_leg(sigma, 2) + beta.element,
    }
    failed = {name: r for name, r in checks.items() if not r.is_zero()}
    if failed:
        raise CocycleConditionError(f"sigma fails {', '.join(sorted(failed))}", failed)
    logger.debug(f"Solved sigma in degree {n}: {len(sigma)} terms")
    return GradedCochain(sigma, n)


@dataclass(frozen=True)
class CohomologyDimensions:
    """Cohomology of the normalized complex in one polynomial degree."""

    dim: int
    degree: int
    h0: int
    h1: int
    antisymmetric_rank: int

    def to_dict(self) -> dict[str, int]:
        """Serialize."""
        return {
            "dim": self.dim,
            "degree": self.degree,
            "h0": self.h0,
            "h1": self.h1,
            "antisymmetric_rank": self.antisymmetric_rank,
        }


def _flip(exponent: Exponent, dim: int) -> Exponent:
    left, right = leg_blocks(exponent, dim)
    return right + left


def cohomology_check(dim: int, n: int) -> CohomologyDimensions:
    """dim H^0 and dim H^1 of the normalized complex in polynomial degree n.

    H^0 = Ker(d) on S^n(g), H^1 = Ker(d2) / Im(d) on normalized two-leg cochains. Also
    reports the rank of f -> f - f^{2,1} on Ker(d2); the antisymmetrization identifies
    H^1 with the exterior square, which lives in degree 2.

    Raises:
        CochainDegreeError: If ``dim`` or ``n`` is not positive
    """
    if dim < 1 or n < 1:
        raise CochainDegreeError(f"Need positive dimension and degree, got dim={dim}, n={n}")
    h0 = 0
    kernel_d2 = 0
    image_d = 0
    antisymmetric = 0
    two_leg = _normalized_two_leg(dim, n)
    blocks: dict[Exponent, list[Exponent]] = {}
    for e in two_leg:
        blocks.setdefault(content(e, dim), []).append(e)

    for monomial in monomials_of_degree(dim, n):
        # the one-leg space of a content block is spanned by the block itself
        column = {key: Fraction(c) for key, c in _leg_coboundary(monomial, 1, dim)}
        if column:
            image_d += 1
        else:
            h0 += 1

    for block, unknowns in blocks.items():
        rows: dict[Exponent, dict[Exponent, Fraction]] = {}
        for unknown in unknowns:
            for key, c in _leg_coboundary(unknown, 1, dim):
                entry = rows.setdefault(key, {})
                entry[unknown] = entry.get(unknown, 0) + c
            for key, c in _leg_coboundary(unknown, 2, dim):
                entry = rows.setdefault(key, {})
                entry[unknown] = entry.get(unknown, 0) - c
        matrix = [row for row in rows.values() if any(row.values())]
        basis = kernel_basis(matrix, sorted(unknowns))
        kernel_d2 += len(basis)
        flipped = []
        for vector in basis:
            image: dict[Exponent, Fraction] = dict(vector)
            for e, c in vector.items():
                key = _flip(e, dim)
                image[key] = image.get(key, 0) - c
            flipped.append({k: v for k, v in image.items() if v})
        antisymmetric += rank(flipped)

    result = CohomologyDimensions(
        dim=dim,
        degree=n,
        h0=h0,
        h1=kernel_d2 - image_d,
        antisymmetric_rank=antisymmetric,
    )
    logger.debug(f"Cohomology in degree {n} for dim {dim}: {result.to_dict()}")
    return result
