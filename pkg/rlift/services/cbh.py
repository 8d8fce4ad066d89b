"""CBH star product, Hamiltonian derivations and truncated operators.

The star product f * g = f + g + 1/2 {f, g} + ... is the Baker-Campbell-Hausdorff series
with the Poisson bracket in place of the Lie bracket; it converges on m^2 because the
k-th homogeneous term lands in m^{k+1}.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from enum import Enum
from fractions import Fraction

from rlift.services.formalgroup import (
    AlgebraContext,
    ContextMismatchError,
    LegError,
    TruncatedElement,
)
from rlift.utils.bch import bch_terms
from rlift.utils.monomials import (
    Exponent,
    degree,
    join_blocks,
    leg_blocks,
    monomials_up_to,
    unit,
)

logger = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """Raised when an operand is outside the domain of a series."""

    pass


def _require_m2(*elements: TruncatedElement) -> None:
    for element in elements:
        if element.filtration_degree() < 2:
            raise PreconditionError(
                f"Operand has filtration degree {element.filtration_degree()}, expected at least 2"
            )


def _bch_order(cap: int) -> int:
    # B_k(m^2, m^2) lies in m^{k+1}
    return max(1, cap - 1)


def star(f: TruncatedElement, g: TruncatedElement) -> TruncatedElement:
    """The CBH product f * g, truncated at the smaller cap.

    Raises:
        PreconditionError: If f or g is not in m^2
        ContextMismatchError: If f and g do not share context and leg count
    """
    f._check(g)
    _require_m2(f, g)
    context = f.context
    if not context.poisson_tensor:
        return f + g
    cap = min(f.cap, g.cap)
    total = context.zero(f.legs, cap)
    for term in bch_terms(f, g, context.poisson, _bch_order(cap)):
        total = total + term
    return total


def star_all(elements: Sequence[TruncatedElement]) -> TruncatedElement:
    """Left-nested star product of a nonempty sequence."""
    result = elements[0]
    for element in elements[1:]:
        result = star(result, element)
    return result


def bk_term(k: int, f: TruncatedElement, g: TruncatedElement) -> TruncatedElement:
    """The homogeneous CBH Lie polynomial B_k(f, g) evaluated with the Poisson bracket.

    Raises:
        PreconditionError: If k < 1 or an operand is not in m^2
    """
    if k < 1:
        raise PreconditionError(f"CBH term index must be positive, got {k}")
    f._check(g)
    _require_m2(f, g)
    return bch_terms(f, g, f.context.poisson, k)[k - 1]


class OperatorKind(Enum):
    """How the columns of an operator are produced."""

    LINEAR = "linear"  # arbitrary column function
    DERIVATION = "derivation"  # Leibniz rule from generator images
    MORPHISM = "morphism"  # multiplicative from generator images


class TruncatedOperator:
    """A linear endomorphism of O((G*)^legs) / m^{cap+1}, column by column.

    Columns (images of basis monomials) are computed on demand and memoized.
    Derivations and algebra morphisms are determined by their generator images.
    """

    def __init__(
        self,
        context: AlgebraContext,
        legs: int,
        cap: int,
        kind: OperatorKind,
        *,
        images: Sequence[TruncatedElement] | None = None,
        column: Callable[[Exponent], TruncatedElement] | None = None,
        shift: int = 0,
    ):
        self.context = context
        self.legs = legs
        self.cap = cap
        self.kind = kind
        self.shift = shift
        self.nvars = context.nvars(legs)
        if kind is OperatorKind.LINEAR:
            if column is None:
                raise ValueError("A linear operator needs a column function")
            self._column_fn = column
        else:
            if images is None or len(images) != self.nvars:
                raise ValueError(f"Expected {self.nvars} generator images")
            for image in images:
                if image.context is not context or image.legs != legs:
                    raise ContextMismatchError("Generator image from another algebra")
        self.images = tuple(image.truncate(cap) for image in images) if images else ()
        self._columns: dict[Exponent, TruncatedElement] = {}

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, context: AlgebraContext, legs: int, cap: int | None = None) -> TruncatedOperator:
        """The identity operator."""
        cap = context.cap if cap is None else cap
        return cls(
            context, legs, cap, OperatorKind.MORPHISM,
            images=[g.truncate(cap) for g in context.generators(legs)],
        )

    @classmethod
    def morphism(
        cls, context: AlgebraContext, legs: int, images: Sequence[TruncatedElement], cap: int | None = None
    ) -> TruncatedOperator:
        """Algebra morphism with the given generator images."""
        cap = min(image.cap for image in images) if cap is None else cap
        return cls(context, legs, cap, OperatorKind.MORPHISM, images=images)

    # -- columns ------------------------------------------------------------

    def column(self, exponent: Exponent) -> TruncatedElement:
        """Image of the basis monomial x^exponent."""
        cached = self._columns.get(exponent)
        if cached is not None:
            return cached
        if self.kind is OperatorKind.LINEAR:
            result = self._column_fn(exponent).truncate(self.cap)
        elif degree(exponent) == 0:
            if self.kind is OperatorKind.MORPHISM:
                result = self.context.one(self.legs, self.cap)
            else:
                result = self.context.zero(self.legs, self.cap)
        else:
            i = next(k for k, e in enumerate(exponent) if e)
            rest = exponent[:i] + (exponent[i] - 1,) + exponent[i + 1 :]
            if self.kind is OperatorKind.MORPHISM:
                result = self.context.multiply(self.column(rest), self.images[i])
            else:
                # D(x^rest * x_i) = D(x^rest) x_i + x^rest D(x_i)
                generator = self.context.monomial(unit(self.nvars, i), self.legs)
                monomial = self.context.monomial(rest, self.legs)
                result = self.context.multiply(self.column(rest), generator) + self.context.multiply(
                    monomial, self.images[i]
                )
                result = result.truncate(self.cap)
        self._columns[exponent] = result
        return result

    def generator_image(self, index: int) -> TruncatedElement:
        """Image of the generator with flat index ``index``."""
        return self.column(unit(self.nvars, index))

    def apply(self, f: TruncatedElement) -> TruncatedElement:
        """Apply to an element; the result is truncated at the smaller cap.

        Raises:
            ContextMismatchError: If f lives on another algebra
        """
        if f.context is not self.context or f.legs != self.legs:
            raise ContextMismatchError(f"Operator on {self.legs} legs applied to a {f.legs}-leg element")
        cap = min(self.cap, f.cap)
        result: dict[Exponent, Fraction] = {}
        for e, c in f.terms.items():
            for key, value in self.column(e).terms.items():
                if sum(key) > cap:
                    continue
                total = result.get(key, 0) + c * value
                if total:
                    result[key] = total
                else:
                    result.pop(key, None)
        return TruncatedElement._trusted(self.context, self.legs, cap, result)

    __call__ = apply

    def basis(self) -> Iterator[Exponent]:
        """Basis monomials of the truncated algebra."""
        return monomials_up_to(self.nvars, self.cap)

    def materialize(self) -> dict[Exponent, TruncatedElement]:
        """Every column, keyed by basis monomial."""
        return {e: self.column(e) for e in self.basis()}

    # -- algebra of operators -----------------------------------------------

    def _check(self, other: TruncatedOperator) -> None:
        if other.context is not self.context or other.legs != self.legs:
            raise ContextMismatchError("Operators act on different algebras")

    def compose(self, other: TruncatedOperator) -> TruncatedOperator:
        """self after other."""
        self._check(other)
        cap = min(self.cap, other.cap)
        shift = self.shift + other.shift
        if self.kind is OperatorKind.MORPHISM and other.kind is OperatorKind.MORPHISM:
            return TruncatedOperator(
                self.context, self.legs, cap, OperatorKind.MORPHISM,
                images=[self.apply(image) for image in other.images], shift=shift,
            )
        return TruncatedOperator(
            self.context, self.legs, cap, OperatorKind.LINEAR,
            column=lambda e: self.apply(other.column(e)), shift=shift,
        )

    def sub(self, other: TruncatedOperator) -> TruncatedOperator:
        """Columnwise difference."""
        self._check(other)
        cap = min(self.cap, other.cap)
        return TruncatedOperator(
            self.context, self.legs, cap, OperatorKind.LINEAR,
            column=lambda e: self.column(e) - other.column(e),
            shift=min(self.shift, other.shift),
        )

    __sub__ = sub

    def filtration_shift(self) -> float:
        """Largest s with x^e mapped into m^{|e|+s} for every monomial of positive degree.

        Derivations and filtered morphisms are read off their generator images.
        """
        if self.kind is not OperatorKind.LINEAR and all(
            image.filtration_degree() >= 1 for image in self.images
        ):
            exponents: Iterator[Exponent] = (unit(self.nvars, i) for i in range(self.nvars))
        else:
            exponents = monomials_up_to(self.nvars, self.cap, start=1)
        shift = math.inf
        for e in exponents:
            shift = min(shift, self.column(e).filtration_degree() - degree(e))
        return shift

    def respects_shift(self) -> bool:
        """Whether the declared shift holds."""
        return self.filtration_shift() >= self.shift

    def on_legs(self, legs_map: tuple[int, ...], m: int) -> TruncatedOperator:
        """Act on legs ``legs_map`` (1-based) of an m-leg algebra, identically elsewhere.

        Raises:
            LegError: If the map does not match the operator's legs
        """
        if len(legs_map) != self.legs:
            raise LegError(f"Leg map {legs_map} does not match {self.legs} legs")
        context = self.context
        d = context.dim
        if self.kind is not OperatorKind.LINEAR:
            images = []
            for leg in range(1, m + 1):
                for i in range(d):
                    if leg in legs_map:
                        source = self.images[legs_map.index(leg) * d + i]
                        images.append(context.insert(source, legs_map, m))
                    elif self.kind is OperatorKind.MORPHISM:
                        images.append(context.generator(i, leg, m).truncate(self.cap))
                    else:
                        images.append(context.zero(m, self.cap))
            return TruncatedOperator(context, m, self.cap, self.kind, images=images, shift=self.shift)

        def column(e: Exponent) -> TruncatedElement:
            blocks = leg_blocks(e, d)
            inner = join_blocks([blocks[leg - 1] for leg in legs_map])
            outer = [block if leg + 1 not in legs_map else (0,) * d for leg, block in enumerate(blocks)]
            image = context.insert(self.column(inner), legs_map, m)
            return context.multiply(image, context.monomial(join_blocks(outer), m))

        return TruncatedOperator(context, m, self.cap, OperatorKind.LINEAR, column=column, shift=self.shift)

    def __repr__(self) -> str:
        return (
            f"TruncatedOperator(kind={self.kind.value}, legs={self.legs}, cap={self.cap}, "
            f"shift={self.shift})"
        )


def hamiltonian(rho: TruncatedElement) -> TruncatedOperator:
    """V_rho = {rho, -} as a derivation of filtration shift 1.

    Raises:
        PreconditionError: If rho is not in m^2
    """
    _require_m2(rho)
    context = rho.context
    images = [context.poisson(rho, g) for g in context.generators(rho.legs)]
    return TruncatedOperator(
        context, rho.legs, rho.cap, OperatorKind.DERIVATION, images=images, shift=1
    )


def _exp_series(operator: TruncatedOperator, f: TruncatedElement) -> TruncatedElement:
    total = f
    term = f
    m = 0
    while not term.is_zero():
        m += 1
        if m > operator.cap:
            break
        term = operator.apply(term) * Fraction(1, m)
        total = total + term
    return total


def exp_operator(operator: TruncatedOperator) -> TruncatedOperator:
    """exp(D) = sum D^m / m!, finite because D raises the filtration.

    A derivation exponentiates to the algebra automorphism with images exp(D)(x_v).

    Raises:
        PreconditionError: If the declared shift is below 1
    """
    if operator.shift < 1:
        raise PreconditionError(
            f"Cannot exponentiate an operator of filtration shift {operator.shift}"
        )
    context = operator.context
    if operator.kind is OperatorKind.DERIVATION:
        images = [
            _exp_series(operator, g.truncate(operator.cap)) for g in context.generators(operator.legs)
        ]
        result = TruncatedOperator(
            context, operator.legs, operator.cap, OperatorKind.MORPHISM, images=images
        )
    else:
        result = TruncatedOperator(
            context, operator.legs, operator.cap, OperatorKind.LINEAR,
            column=lambda e: _exp_series(operator, context.monomial(e, operator.legs)),
        )
    logger.debug(f"Exponentiated {operator!r}")
    return result


def star_conjugate(rho: TruncatedElement, f: TruncatedElement) -> TruncatedElement:
    """exp(V_rho)(f), the meaning of rho * f * (-rho).

    Raises:
        PreconditionError: If rho is not in m^2
        ContextMismatchError: If f lives on another algebra
    """
    if f.context is not rho.context or f.legs != rho.legs:
        raise ContextMismatchError("star_conjugate needs elements on the same algebra")
    return exp_operator(hamiltonian(rho)).apply(f)
