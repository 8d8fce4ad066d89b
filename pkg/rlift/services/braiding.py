"""The braiding R = exp(V_rho) of O(G* x G*) and its axioms.

R, the leg embeddings R^{i,j}, Delta (x) id and the counits are algebra morphisms of the
truncated algebras, so two composites of them agree iff they agree on the generators.
The checks compare on generators unless ``full`` asks for every basis monomial.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from rlift.core.models import AxiomReport, LieBialgebra
from rlift.services.cbh import TruncatedOperator, exp_operator, hamiltonian
from rlift.services.formalgroup import (
    AlgebraContext,
    ContextMismatchError,
    TruncatedElement,
)
from rlift.services.liebialg import coboundary_image, lie_bracket
from rlift.utils.monomials import leg_degrees, monomials_up_to

logger = logging.getLogger(__name__)

Vector = Sequence[Fraction]
SecondOrderMap = Callable[[Vector, Vector], list[list[Fraction]]]


def _basis_vector(dim: int, index: int) -> list[Fraction]:
    return [Fraction(int(i == index)) for i in range(dim)]


@dataclass
class BraidingOperator:
    """R on the two-leg algebra together with the lift it came from."""

    operator: TruncatedOperator
    rho: TruncatedElement
    _second_order: dict[tuple[int, int], TruncatedElement] = field(default_factory=dict, repr=False)

    @property
    def context(self) -> AlgebraContext:
        """The algebra context."""
        return self.operator.context

    @property
    def cap(self) -> int:
        """Truncation degree."""
        return self.operator.cap

    def apply(self, f: TruncatedElement) -> TruncatedElement:
        """R(f)."""
        return self.operator.apply(f)

    def image(self, index: int, leg: int) -> TruncatedElement:
        """R(x_index) for the generator on ``leg`` (1-based)."""
        return self.operator.generator_image((leg - 1) * self.context.dim + index)

    def second_order(self, index: int, leg: int) -> TruncatedElement:
        """Degree-2 part of (R - id)(x_index on ``leg``), the data [R - id]."""
        key = (index, leg)
        if key not in self._second_order:
            generator = self.context.generator(index, leg, 2)
            self._second_order[key] = (self.image(index, leg) - generator).graded_component(2)
        return self._second_order[key]

    def on_legs(self, legs_map: tuple[int, int], m: int) -> TruncatedOperator:
        """R^{i,j} on the m-leg algebra."""
        return self.operator.on_legs(legs_map, m)

    def images(self) -> dict[tuple[int, int], TruncatedElement]:
        """R(x_i) for every generator, keyed by (0-based index, 1-based leg)."""
        d = self.context.dim
        return {(i, leg): self.image(i, leg) for leg in (1, 2) for i in range(d)}


def braiding_from_lift(rho: TruncatedElement) -> BraidingOperator:
    """R = exp(V_rho).

    Raises:
        PreconditionError: If rho is not in m^2
        ContextMismatchError: If rho is not a two-leg element
    """
    if rho.legs != 2:
        raise ContextMismatchError(f"The lift is a two-leg element, got {rho.legs} legs")
    operator = exp_operator(hamiltonian(rho))
    logger.info(f"Built braiding at cap {rho.cap}")
    return BraidingOperator(operator=operator, rho=rho)


def _sources(context: AlgebraContext, legs: int, cap: int, full: bool) -> Iterator[TruncatedElement]:
    if full:
        for e in monomials_up_to(context.nvars(legs), cap, start=1):
            yield context.monomial(e, legs).truncate(cap)
    else:
        for g in context.generators(legs):
            yield g.truncate(cap)


def _cabling_sides(
    braiding: BraidingOperator, x: TruncatedElement, split_leg: int
) -> tuple[TruncatedElement, TruncatedElement]:
    context = braiding.context
    if split_leg == 1:
        # R13 R23 (Delta (x) id) versus (Delta (x) id) R
        first, second = braiding.on_legs((2, 3), 3), braiding.on_legs((1, 3), 3)
    else:
        # R13 R12 (id (x) Delta) versus (id (x) Delta) R
        first, second = braiding.on_legs((1, 2), 3), braiding.on_legs((1, 3), 3)
    left = second.apply(first.apply(context.coproduct_on_leg(x, split_leg)))
    right = context.coproduct_on_leg(braiding.apply(x), split_leg)
    return left, right


def check_braiding_axioms(braiding: BraidingOperator, *, full: bool = False) -> AxiomReport:
    """Exact residuals of the braiding axioms.

    * ``alpha.left`` / ``alpha.right``: (eps (x) id) R = eps (x) id and (id (x) eps) R = id (x) eps
    * ``beta``: Delta^op - R Delta
    * ``gamma.left`` / ``gamma.right``: the two cabling identities on three legs
    * ``delta.identity``: R is the identity on m / m^2
    * ``delta.second_order``: [R - id](x, y) = (0, [r, x (x) 1 + 1 (x) y], 0)
    * ``poisson``: R({a, b}) - {R a, R b} on generator pairs

    Args:
        braiding: The operator to check
        full: Compare on every basis monomial instead of the generators
    """
    context = braiding.context
    cap = braiding.cap
    L = context.bialgebra
    d = context.dim
    report = AxiomReport(subject="braiding")

    for f in _sources(context, 2, cap, full):
        image = braiding.apply(f)
        report.add("alpha.left", context.counit_on_leg(image, 1) - context.counit_on_leg(f, 1))
        report.add("alpha.right", context.counit_on_leg(image, 2) - context.counit_on_leg(f, 2))

    for f in _sources(context, 1, cap, full):
        report.add(
            "beta",
            context.opposite_coproduct_on_leg(f, 1) - braiding.apply(context.coproduct_on_leg(f, 1)),
        )

    for f in _sources(context, 2, cap, full):
        left, right = _cabling_sides(braiding, f, 1)
        report.add("gamma.left", left - right)
        left, right = _cabling_sides(braiding, f, 2)
        report.add("gamma.right", left - right)

    zero = [Fraction(0)] * d
    for leg in (1, 2):
        for i in range(d):
            generator = context.generator(i, leg, 2)
            report.add("delta.identity", (braiding.image(i, leg) - generator).graded_component(1))
            e_i = _basis_vector(d, i)
            x, y = (e_i, zero) if leg == 1 else (zero, e_i)
            expected = context.from_tensor(coboundary_image(L, L.r, x, y))
            report.add("delta.second_order", braiding.second_order(i, leg) - expected)

    generators = context.generators(2)
    for a, ga in enumerate(generators):
        for gb in generators[a + 1 :]:
            lhs = braiding.apply(context.poisson(ga, gb).truncate(cap))
            rhs = context.poisson(braiding.apply(ga.truncate(cap)), braiding.apply(gb.truncate(cap)))
            report.add("poisson", lhs - rhs)

    logger.info(f"Braiding axioms: failures={report.failures()}")
    return report


def r_plus(L: LieBialgebra, xi: Vector) -> list[Fraction]:
    """r_+(xi) = <r, xi (x) id>."""
    d = L.dim
    return [sum((xi[a] * L.r[a][b] for a in range(d)), Fraction(0)) for b in range(d)]


def r_minus(L: LieBialgebra, xi: Vector) -> list[Fraction]:
    """r_-(xi) = -<r, id (x) xi>."""
    d = L.dim
    return [-sum((L.r[a][b] * xi[b] for b in range(d)), Fraction(0)) for a in range(d)]


def coadjoint(L: LieBialgebra, u: Vector, xi: Vector) -> list[Fraction]:
    """ad*(u)(xi), defined by <ad*(u) xi, x> = -<xi, [u, x]>."""
    d = L.dim
    result = []
    for k in range(d):
        bracket = lie_bracket(L, u, _basis_vector(d, k))
        result.append(-sum((xi[p] * bracket[p] for p in range(d)), Fraction(0)))
    return result


def wx_second_order(L: LieBialgebra) -> SecondOrderMap:
    """Second-order part of the dressing expansion (xi, eta) -> (xi + ad*(r_+ eta) xi, eta + ad*(r_- xi) eta).

    The returned map sends (x, y) to the d x d matrix M of the mixed block of the dual
    expansion: M[p][q] = <ad*(r_- xi_q) xi_p, x> - <ad*(r_+ xi_p) xi_q, y>.
    """
    d = L.dim
    duals = [_basis_vector(d, k) for k in range(d)]
    plus = [r_plus(L, xi) for xi in duals]
    minus = [r_minus(L, xi) for xi in duals]

    def pairing(xi: Vector, x: Vector) -> Fraction:
        return sum((a * b for a, b in zip(xi, x)), Fraction(0))

    def second_order(x: Vector, y: Vector) -> list[list[Fraction]]:
        return [
            [
                pairing(coadjoint(L, minus[q], duals[p]), x)
                - pairing(coadjoint(L, plus[p], duals[q]), y)
                for q in range(d)
            ]
            for p in range(d)
        ]

    return second_order


def mixed_part(f: TruncatedElement) -> TruncatedElement:
    """Terms of leg degrees (1, 1) of a two-leg element."""
    d = f.context.dim
    return f.context.element(
        2, {e: c for e, c in f.terms.items() if leg_degrees(e, d) == (1, 1)}, f.cap
    )


def wx_agreement(braiding: BraidingOperator) -> AxiomReport:
    """Compare the mixed block of [R - id] with the dressing expansion on all d^2 basis pairs."""
    context = braiding.context
    L = context.bialgebra
    d = context.dim
    wx = wx_second_order(L)
    report = AxiomReport(subject="wx")
    for i in range(d):
        for j in range(d):
            second = braiding.second_order(i, 1) + braiding.second_order(j, 2)
            expected = context.from_tensor(wx(_basis_vector(d, i), _basis_vector(d, j)))
            report.add("wx", mixed_part(second) - expected)
    logger.info(f"WX comparison: passed={report.passed}")
    return report


@dataclass
class BraidingDifference:
    """S = R - R' with its leading filtration data."""

    operator: TruncatedOperator
    leading_degree: int | None
    graded: dict[tuple[int, int], TruncatedElement]

    @property
    def is_zero(self) -> bool:
        """True when the two braidings agree."""
        return self.leading_degree is None


def braiding_difference(first: BraidingOperator, second: BraidingOperator) -> BraidingDifference:
    """S = R - R', the smallest k with S(m) not in m^{k+1}, and gr(S) on generators.

    Both operators are algebra morphisms, so S(fg) = S(f) R'(g) + R'(f) S(g) + S(f) S(g)
    and the filtration of S on m is attained on the generators.

    Raises:
        ContextMismatchError: If the braidings act on different algebras
    """
    if first.context is not second.context:
        raise ContextMismatchError("Braidings come from different contexts")
    difference = first.operator.sub(second.operator)
    d = first.context.dim
    columns = {(i, leg): difference.generator_image((leg - 1) * d + i) for leg in (1, 2) for i in range(d)}
    lowest = min((column.filtration_degree() for column in columns.values()), default=math.inf)
    if lowest == math.inf:
        return BraidingDifference(operator=difference, leading_degree=None, graded={})
    k = int(lowest)
    graded = {key: column.graded_component(k) for key, column in columns.items()}
    return BraidingDifference(operator=difference, leading_degree=k, graded=graded)


def quasi_derivation_defect(
    first: BraidingOperator | TruncatedOperator,
    second: BraidingOperator | TruncatedOperator,
    f: TruncatedElement,
    g: TruncatedElement,
) -> TruncatedElement:
    """S(fg) - (S(f) R'(g) + R'(f) S(g) + S(f) S(g)) for S = R - R'."""
    r1 = first.operator if isinstance(first, BraidingOperator) else first
    r2 = second.operator if isinstance(second, BraidingOperator) else second
    context = f.context

    def s(h: TruncatedElement) -> TruncatedElement:
        return r1.apply(h) - r2.apply(h)

    sf, sg = s(f), s(g)
    expected = (
        context.multiply(sf, r2.apply(g))
        + context.multiply(r2.apply(f), sg)
        + context.multiply(sf, sg)
    )
    return s(context.multiply(f, g)) - expected


def as_braiding(operator: TruncatedOperator, rho: TruncatedElement) -> BraidingOperator:
    """Wrap an arbitrary two-leg operator for the axiom checks."""
    return BraidingOperator(operator=operator, rho=rho)

