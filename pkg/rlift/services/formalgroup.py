"""Truncated function algebras of the dual formal group and its powers.

The function algebra of G* is modelled in exponential coordinates as power series in
the generators x_1, ..., x_d of g (viewed as linear functions on g*). An element on k
legs lives in O((G*)^k) / m^{cap+1}: a sparse map from exponent vectors of length k*d
to nonzero fractions, with every key of total degree at most ``cap``.

Conventions:

* The coproduct transposes the *opposite* product of U(g*):
  <Delta f, u (x) v> = <f, v u>, i.e. Delta(f)(xi, eta) = f(CBH(eta, xi)). With this
  orientation Delta^op - Delta is the cobracket of g on m/m^3, which is what the
  braiding axioms and the cocycle conditions of the lift require.
* The Poisson bracket transposes the co-Poisson cobracket of U(g*):
  <{f, g}, u> = <f (x) g, delta_U(u)>, so {x, y} = [x, y] modulo m^2.
* Pairing of S(g) with S(g*) without 1/n!, symmetrization with 1/n!.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from fractions import Fraction
from operator import add
from typing import Any

from rlift.core.config import DEFAULT_LEGS, MAX_CROSS_CHECK_DEGREE, MIN_DEGREE
from rlift.core.models import LieBialgebra, Tensor2, Tensor3
from rlift.services.enveloping import EnvelopingAlgebra
from rlift.services.liebialg import check_shapes, dual_bracket
from rlift.utils.bch import bch_terms
from rlift.utils.monomials import (
    Exponent,
    degree,
    exponent_factorial,
    join_blocks,
    leg_blocks,
    monomials_up_to,
)

logger = logging.getLogger(__name__)

Scalar = Fraction | int


class ContextError(Exception):
    """Base class for misuse of an algebra context."""

    pass


class ContextMismatchError(ContextError):
    """Raised when elements from different contexts or leg counts are combined."""

    pass


class LegError(ContextError):
    """Raised when a leg index or leg map is invalid."""

    pass


class ConventionMismatchError(Exception):
    """Raised when the dual-model cross-check of the context tables fails."""

    pass


class TruncatedElement:
    """An element of O((G*)^legs) / m^{cap+1}.

    Instances are immutable. Arithmetic between elements truncates at the smaller cap.
    """

    __slots__ = ("context", "legs", "cap", "terms", "_groups", "_support")

    def __init__(
        self,
        context: AlgebraContext,
        legs: int,
        cap: int,
        terms: Mapping[Exponent, Scalar] | None = None,
    ):
        self.context = context
        self.legs = legs
        self.cap = cap
        self.terms: dict[Exponent, Fraction] = {
            e: Fraction(c) for e, c in (terms or {}).items() if c and sum(e) <= cap
        }
        self._groups: dict[int, list[tuple[Exponent, Fraction]]] | None = None
        self._support: frozenset[int] | None = None

    @classmethod
    def _trusted(
        cls, context: AlgebraContext, legs: int, cap: int, terms: dict[Exponent, Fraction]
    ) -> TruncatedElement:
        element = cls.__new__(cls)
        element.context = context
        element.legs = legs
        element.cap = cap
        element.terms = terms
        element._groups = None
        element._support = None
        return element

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no term survives the truncation."""
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        """Coefficient of one monomial."""
        return self.terms.get(tuple(exponent), Fraction(0))

    def constant_term(self) -> Fraction:
        """The counit of the element."""
        return self.coefficient((0,) * (self.legs * self.context.dim))

    def filtration_degree(self) -> float:
        """Smallest total degree of a nonzero term (infinity for zero)."""
        return min((sum(e) for e in self.terms), default=math.inf)

    def graded_component(self, n: int) -> TruncatedElement:
        """The homogeneous part of total degree n."""
        return TruncatedElement._trusted(
            self.context, self.legs, self.cap, {e: c for e, c in self.terms.items() if sum(e) == n}
        )

    def truncate(self, cap: int) -> TruncatedElement:
        """Reduce modulo m^{cap+1}."""
        cap = min(cap, self.cap)
        return TruncatedElement._trusted(
            self.context, self.legs, cap, {e: c for e, c in self.terms.items() if sum(e) <= cap}
        )

    def with_cap(self, cap: int) -> TruncatedElement:
        """Coefficient-preserving section into a larger truncation (zero in new degrees)."""
        if cap > self.context.cap:
            raise ContextError(f"Cap {cap} exceeds the context cap {self.context.cap}")
        if cap < self.cap:
            return self.truncate(cap)
        return TruncatedElement._trusted(self.context, self.legs, cap, dict(self.terms))

    def support_legs(self) -> frozenset[int]:
        """0-based legs on which some term has a nonzero exponent."""
        if self._support is None:
            d = self.context.dim
            legs = set()
            for e in self.terms:
                for leg in range(self.legs):
                    if leg not in legs and any(e[leg * d : (leg + 1) * d]):
                        legs.add(leg)
            self._support = frozenset(legs)
        return self._support

    def degree_groups(self) -> dict[int, list[tuple[Exponent, Fraction]]]:
        """Terms grouped by total degree."""
        if self._groups is None:
            groups: dict[int, list[tuple[Exponent, Fraction]]] = {}
            for e, c in self.terms.items():
                groups.setdefault(sum(e), []).append((e, c))
            self._groups = groups
        return self._groups

    def records(self) -> list[dict[str, Any]]:
        """Sorted ``{exponents, coeff}`` records for serialization."""
        return [
            {"exponents": list(e), "coeff": f"{c.numerator}/{c.denominator}"}
            for e, c in sorted(self.terms.items())
        ]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: TruncatedElement) -> None:
        if other.context is not self.context:
            raise ContextMismatchError("Elements belong to different algebra contexts")
        if other.legs != self.legs:
            raise ContextMismatchError(f"Leg mismatch: {self.legs} vs {other.legs}")

    def __add__(self, other: TruncatedElement) -> TruncatedElement:
        self._check(other)
        cap = min(self.cap, other.cap)
        result = {e: c for e, c in self.terms.items() if sum(e) <= cap}
        for e, c in other.terms.items():
            if sum(e) > cap:
                continue
            total = result.get(e, 0) + c
            if total:
                result[e] = total
            else:
                result.pop(e, None)
        return TruncatedElement._trusted(self.context, self.legs, cap, result)

    def __neg__(self) -> TruncatedElement:
        return TruncatedElement._trusted(
            self.context, self.legs, self.cap, {e: -c for e, c in self.terms.items()}
        )

    def __sub__(self, other: TruncatedElement) -> TruncatedElement:
        return self + (-other)

    def __mul__(self, other: TruncatedElement | Scalar) -> TruncatedElement:
        if isinstance(other, TruncatedElement):
            return self.context.multiply(self, other)
        if other == 0:
            return TruncatedElement._trusted(self.context, self.legs, self.cap, {})
        scalar = Fraction(other)
        return TruncatedElement._trusted(
            self.context, self.legs, self.cap, {e: c * scalar for e, c in self.terms.items()}
        )

    def __rmul__(self, other: Scalar) -> TruncatedElement:
        return self * other

    def __eq__(self, other: object) -> bool:
        """Equality in the common truncation."""
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        if other.context is not self.context or other.legs != self.legs:
            return False
        cap = min(self.cap, other.cap)
        return {e: c for e, c in self.terms.items() if sum(e) <= cap} == {
            e: c for e, c in other.terms.items() if sum(e) <= cap
        }

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"TruncatedElement(legs={self.legs}, cap={self.cap}, terms={len(self.terms)})"


class _DualVector:
    """A g*-valued function: components in the dual basis."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[TruncatedElement]):
        self.components = tuple(components)

    def __add__(self, other: _DualVector) -> _DualVector:
        return _DualVector([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: _DualVector) -> _DualVector:
        return _DualVector([a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, scalar: Scalar) -> _DualVector:
        return _DualVector([a * scalar for a in self.components])


class AlgebraContext:
    """Structure tables of O((G*)^k) / m^{N+1} for one Lie bialgebra.

    Holds the generator coproducts Delta(x_i), the Poisson tensor {x_i, x_j} and lazily
    memoized coproducts of monomials. Build with :func:`build_context`.
    """

    def __init__(self, bialgebra: LieBialgebra, legs: int, cap: int):
        self.bialgebra = bialgebra
        self.dim = bialgebra.dim
        self.legs = legs
        self.cap = cap
        self.dual = dual_bracket(bialgebra)
        self.enveloping = EnvelopingAlgebra(self.dual, bialgebra.bracket, cap + 1)
        self.poisson_tensor: dict[tuple[int, int], TruncatedElement] = {}
        self._generator_coproducts: list[TruncatedElement] = []
        self._coproducts: dict[Exponent, TruncatedElement] = {}
        self._embedded_poisson: dict[tuple[int, int], dict[tuple[int, int], TruncatedElement]] = {}
        self._dual_cobracket: dict[Exponent, dict[tuple[Exponent, Exponent], Fraction]] = {}
        self._sym_products: dict[tuple[Exponent, Exponent], dict[Exponent, Fraction]] = {}

    # -- factories ----------------------------------------------------------

    def nvars(self, legs: int) -> int:
        """Number of variables on ``legs`` legs."""
        return legs * self.dim

    def _check_legs(self, legs: int) -> None:
        if not 1 <= legs <= self.legs:
            raise LegError(f"Leg count {legs} outside 1..{self.legs}")

    def element(
        self, legs: int, terms: Mapping[Sequence[int], Scalar] | None = None, cap: int | None = None
    ) -> TruncatedElement:
        """Element from explicit terms (keys are exponent vectors of length legs*d)."""
        self._check_legs(legs)
        n = self.nvars(legs)
        clean: dict[Exponent, Scalar] = {}
        for e, c in (terms or {}).items():
            key = tuple(e)
            if len(key) != n or any(x < 0 for x in key):
                raise LegError(f"Exponent vector {key} invalid for {legs} legs of dimension {self.dim}")
            clean[key] = clean.get(key, 0) + c
        return TruncatedElement(self, legs, self.cap if cap is None else cap, clean)

    def zero(self, legs: int = 1, cap: int | None = None) -> TruncatedElement:
        """The zero element."""
        return self.element(legs, {}, cap)

    def one(self, legs: int = 1, cap: int | None = None) -> TruncatedElement:
        """The unit."""
        return self.element(legs, {(0,) * self.nvars(legs): 1}, cap)

    def monomial(self, exponent: Sequence[int], legs: int = 1, coeff: Scalar = 1) -> TruncatedElement:
        """A single monomial."""
        return self.element(legs, {tuple(exponent): coeff})

    def generator(self, index: int, leg: int = 1, legs: int = 1) -> TruncatedElement:
        """x_index on leg ``leg`` (1-based) of a ``legs``-leg algebra."""
        if not 1 <= leg <= legs:
            raise LegError(f"Leg {leg} outside 1..{legs}")
        exponent = [0] * self.nvars(legs)
        exponent[(leg - 1) * self.dim + index] = 1
        return self.element(legs, {tuple(exponent): 1})

    def generators(self, legs: int) -> list[TruncatedElement]:
        """All generators x_i^{(l)}, leg by leg."""
        return [self.generator(i, leg, legs) for leg in range(1, legs + 1) for i in range(self.dim)]

    def from_tensor(self, tensor: Tensor2 | Tensor3 | Sequence[Any]) -> TruncatedElement:
        """Multilinear element sum t[i][j]... x_i (x) x_j (x) ... from a dense tensor."""
        legs = 0
        node: Any = tensor
        while isinstance(node, (list, tuple)):
            legs += 1
            node = node[0]
        terms: dict[Exponent, Fraction] = {}

        def walk(node: Any, indices: tuple[int, ...]) -> None:
            if not isinstance(node, (list, tuple)):
                if node:
                    e = [0] * self.nvars(legs)
                    for leg, i in enumerate(indices):
                        e[leg * self.dim + i] = 1
                    terms[tuple(e)] = Fraction(node)
                return
            for i, child in enumerate(node):
                walk(child, indices + (i,))

        walk(tensor, ())
        return self.element(legs, terms)

    # -- product --------------------------------------------------------------

    def multiply(self, f: TruncatedElement, g: TruncatedElement) -> TruncatedElement:
        """Truncated polynomial product.

        Raises:
            ContextMismatchError: If the operands do not share context and leg count
        """
        f._check(g)
        cap = min(f.cap, g.cap)
        result: dict[Exponent, Fraction] = {}
        f_groups = f.degree_groups()
        g_groups = g.degree_groups()
        for da, f_terms in f_groups.items():
            for db, g_terms in g_groups.items():
                if da + db > cap:
                    continue
                for ea, ca in f_terms:
                    for eb, cb in g_terms:
                        key = tuple(map(add, ea, eb))
                        result[key] = result.get(key, 0) + ca * cb
        return TruncatedElement._trusted(
            self, f.legs, cap, {e: c for e, c in result.items() if c}
        )

    def power(self, f: TruncatedElement, n: int) -> TruncatedElement:
        """f**n in the truncation."""
        result = self.one(f.legs, f.cap)
        for _ in range(n):
            result = self.multiply(result, f)
        return result

    # -- leg maps -----------------------------------------------------------

    def insert(self, f: TruncatedElement, legs_map: Sequence[int], m: int) -> TruncatedElement:
        """Place leg ``l`` of f on leg ``legs_map[l-1]`` of an m-leg algebra (1-based).

        ``insert(rho, (1, 3), 3)`` is rho^{1,3}; ``insert(f, (2, 1), 2)`` is the flip.

        Raises:
            LegError: If the map is not injective or out of range
        """
        self._check_legs(m)
        targets = tuple(legs_map)
        if len(targets) != f.legs:
            raise LegError(f"Leg map {targets} does not match {f.legs} legs")
        if len(set(targets)) != len(targets) or any(not 1 <= t <= m for t in targets):
            raise LegError(f"Leg map {targets} is not an injection into 1..{m}")
        d = self.dim
        result: dict[Exponent, Fraction] = {}
        for e, c in f.terms.items():
            blocks = [(0,) * d] * m
            for leg, block in enumerate(leg_blocks(e, d)):
                blocks[targets[leg] - 1] = block
            result[join_blocks(blocks)] = c
        return TruncatedElement._trusted(self, m, f.cap, result)

    def counit_on_leg(self, f: TruncatedElement, leg: int) -> TruncatedElement:
        """Apply the counit to one leg (1-based); the result has one leg fewer."""
        if not 1 <= leg <= f.legs:
            raise LegError(f"Leg {leg} outside 1..{f.legs}")
        d = self.dim
        start, stop = (leg - 1) * d, leg * d
        result: dict[Exponent, Fraction] = {}
        for e, c in f.terms.items():
            if any(e[start:stop]):
                continue
            result[e[:start] + e[stop:]] = c
        if f.legs == 1:
            # counit of a one-leg element is a scalar; represent it as a constant
            return TruncatedElement(self, 1, f.cap, {(0,) * d: result.get((), 0)})
        return TruncatedElement._trusted(self, f.legs - 1, f.cap, result)

    def coproduct_monomial(self, exponent: Exponent) -> TruncatedElement:
        """Delta(x^exponent) as a two-leg element at the context cap."""
        cached = self._coproducts.get(exponent)
        if cached is not None:
            return cached
        if degree(exponent) == 0:
            result = self.one(2)
        else:
            i = next(k for k, e in enumerate(exponent) if e)
            rest = exponent[:i] + (exponent[i] - 1,) + exponent[i + 1 :]
            result = self.multiply(self.coproduct_monomial(rest), self._generator_coproducts[i])
        self._coproducts[exponent] = result
        return result

    def coproduct_on_leg(self, f: TruncatedElement, leg: int) -> TruncatedElement:
        """Apply Delta to one leg (1-based); that leg becomes legs (leg, leg+1)."""
        if not 1 <= leg <= f.legs:
            raise LegError(f"Leg {leg} outside 1..{f.legs}")
        self._check_legs(f.legs + 1)
        d = self.dim
        result: dict[Exponent, Fraction] = {}
        for e, c in f.terms.items():
            blocks = leg_blocks(e, d)
            head = join_blocks(blocks[: leg - 1])
            tail = join_blocks(blocks[leg:])
            room = f.cap - (sum(head) + sum(tail))
            for dd, split_terms in self.coproduct_monomial(blocks[leg - 1]).degree_groups().items():
                if dd > room:
                    continue
                for e2, c2 in split_terms:
                    key = head + e2 + tail
                    result[key] = result.get(key, 0) + c * c2
        return TruncatedElement._trusted(
            self, f.legs + 1, f.cap, {e: c for e, c in result.items() if c}
        )

    def opposite_coproduct_on_leg(self, f: TruncatedElement, leg: int) -> TruncatedElement:
        """Apply Delta^op to one leg (1-based)."""
        split = self.coproduct_on_leg(f, leg)
        order = list(range(1, split.legs + 1))
        order[leg - 1], order[leg] = order[leg], order[leg - 1]
        return self.insert(split, order, split.legs)

    # -- Poisson bracket ------------------------------------------------------

    def _poisson_on(self, legs: int, leg: int) -> dict[tuple[int, int], TruncatedElement]:
        key = (legs, leg)
        cached = self._embedded_poisson.get(key)
        if cached is None:
            targets = (leg + 1,)
            cached = {
                ij: self.insert(pi, targets, legs) if legs > 1 else pi
                for ij, pi in self.poisson_tensor.items()
            }
            self._embedded_poisson[key] = cached
        return cached

    def _partial(self, f: TruncatedElement, var: int) -> TruncatedElement:
        # Keeps the cap of f: every use multiplies by an element of m, so the
        # unknown top-degree part never reaches the result.
        result: dict[Exponent, Fraction] = {}
        for e, c in f.terms.items():
            k = e[var]
            if k:
                result[e[:var] + (k - 1,) + e[var + 1 :]] = c * k
        return TruncatedElement._trusted(self, f.legs, f.cap, result)

    def poisson(self, f: TruncatedElement, g: TruncatedElement) -> TruncatedElement:
        """{f, g}: the biderivation sum pi_ij d_i f d_j g, leg by leg.

        Raises:
            ContextMismatchError: If the operands do not share context and leg count
        """
        f._check(g)
        cap = min(f.cap, g.cap)
        total = TruncatedElement._trusted(self, f.legs, cap, {})
        if not self.poisson_tensor:
            return total
        d = self.dim
        for leg in sorted(f.support_legs() & g.support_legs()):
            pis = self._poisson_on(f.legs, leg)
            df = {i: self._partial(f, leg * d + i) for i in range(d)}
            dg = {j: self._partial(g, leg * d + j) for j in range(d)}
            for i, dfi in df.items():
                if dfi.is_zero():
                    continue
                inner = TruncatedElement._trusted(self, f.legs, cap, {})
                for j, dgj in dg.items():
                    pi = pis.get((i, j))
                    if pi is None or dgj.is_zero():
                        continue
                    inner = inner + self.multiply(pi, dgj)
                if not inner.is_zero():
                    total = total + self.multiply(dfi, inner)
        return total.truncate(cap)

    # -- duality oracles ------------------------------------------------------

    def _dual_cobracket_table(self, u: Exponent) -> dict[tuple[Exponent, Exponent], Fraction]:
        cached = self._dual_cobracket.get(u)
        if cached is None:
            envelope = self.enveloping
            cached = envelope.sym_inverse_tensor(envelope.copoisson_cobracket(envelope.sym_map(u)))
            self._dual_cobracket[u] = cached
        return cached

    def _sym_product(self, left: Exponent, right: Exponent) -> dict[Exponent, Fraction]:
        # Sym^{-1}(Sym xi^right * Sym xi^left), the transpose of the coproduct
        key = (left, right)
        cached = self._sym_products.get(key)
        if cached is None:
            envelope = self.enveloping
            cached = envelope.sym_inverse(
                envelope.multiply(envelope.sym_map(right), envelope.sym_map(left))
            )
            self._sym_products[key] = cached
        return cached

    def __repr__(self) -> str:
        return f"AlgebraContext(dim={self.dim}, legs={self.legs}, cap={self.cap})"


def _dual_bch_coproducts(context: AlgebraContext) -> list[TruncatedElement]:
    """Delta(x_k) = k-th coordinate of CBH(eta, xi), truncated at the context cap."""
    d = context.dim
    xi = _DualVector([context.generator(i, 1, 2) for i in range(d)])
    eta = _DualVector([context.generator(i, 2, 2) for i in range(d)])
    star = context.dual.bracket_star
    pairs = [
        (a, b, [(k, star[a][b][k]) for k in range(d) if star[a][b][k]])
        for a in range(d)
        for b in range(d)
    ]
    pairs = [(a, b, terms) for a, b, terms in pairs if terms]
    if not pairs:
        return [xi.components[k] + eta.components[k] for k in range(d)]

    def bracket(p: _DualVector, q: _DualVector) -> _DualVector:
        components = [context.zero(2) for _ in range(d)]
        for a, b, terms in pairs:
            if p.components[a].is_zero() or q.components[b].is_zero():
                continue
            product = context.multiply(p.components[a], q.components[b])
            for k, c in terms:
                components[k] = components[k] + product * c
        return _DualVector(components)

    series = bch_terms(eta, xi, bracket, context.cap)
    coproducts = []
    for k in range(d):
        total = context.zero(2)
        for term in series:
            total = total + term.components[k]
        coproducts.append(total)
    return coproducts


def _poisson_tensor(context: AlgebraContext) -> dict[tuple[int, int], TruncatedElement]:
    """{x_i, x_j} modulo m^{N+1}, by duality with delta_U on symmetrized monomials."""
    L = context.bialgebra
    if L.is_abelian:
        return {}
    d = context.dim
    envelope = context.enveloping
    coefficients: dict[tuple[int, int], dict[Exponent, Fraction]] = {}
    for u in monomials_up_to(d, context.cap, start=1):
        pairing = envelope.linear_pairing(envelope.copoisson_cobracket(envelope.sym_map(u)))
        if not pairing:
            continue
        weight = Fraction(1, exponent_factorial(u))
        for ij, value in pairing.items():
            coefficients.setdefault(ij, {})[u] = value * weight
    return {ij: context.element(1, terms) for ij, terms in coefficients.items() if terms}


def coproduct_by_duality(context: AlgebraContext, exponent: Exponent, cap: int) -> TruncatedElement:
    """Delta(x^A) recomputed from products of symmetrized monomials in U(g*).

    Uses <Delta x^A, Sym xi^B (x) Sym xi^C> = <x^A, Sym(xi^C) Sym(xi^B)>, keeping terms
    of total degree at most ``cap``.
    """
    d = context.dim
    a_factorial = exponent_factorial(exponent)
    terms: dict[Exponent, Fraction] = {}
    for left in monomials_up_to(d, cap):
        for right in monomials_up_to(d, cap - degree(left)):
            if degree(left) + degree(right) < degree(exponent):
                continue
            value = context._sym_product(left, right).get(exponent)
            if value:
                weight = Fraction(a_factorial, exponent_factorial(left) * exponent_factorial(right))
                terms[left + right] = value * weight
    return context.element(2, terms, cap)


def poisson_by_duality(
    context: AlgebraContext, left: Exponent, right: Exponent, cap: int | None = None
) -> TruncatedElement:
    """{x^A, x^B} recomputed directly as the transpose of delta_U.

    <{x^A, x^B}, Sym xi^u> = <x^A (x) x^B, delta_U(Sym xi^u)>, and x^u/u! is dual to
    Sym xi^u.
    """
    cap = context.cap if cap is None else cap
    d = context.dim
    weight = exponent_factorial(left) * exponent_factorial(right)
    terms: dict[Exponent, Fraction] = {}
    lowest = max(0, degree(left) + degree(right) - 1)
    for u in monomials_up_to(d, cap, start=lowest):
        value = context._dual_cobracket_table(u).get((left, right))
        if value:
            terms[u] = value * Fraction(weight, exponent_factorial(u))
    return context.element(1, terms, cap)


def cross_check(context: AlgebraContext, max_degree: int) -> None:
    """Compare the CBH tables with the PBW-duality route up to ``max_degree``.

    Raises:
        ConventionMismatchError: On any difference
    """
    if max_degree <= 0:
        return
    d = context.dim
    for exponent in monomials_up_to(d, max_degree, start=1):
        expected = coproduct_by_duality(context, exponent, max_degree)
        actual = context.coproduct_monomial(exponent).truncate(max_degree)
        if expected != actual:
            raise ConventionMismatchError(
                f"Coproduct of x^{exponent} disagrees with the dual of U(g*) multiplication"
            )
    poisson_degree = min(max_degree, 3)
    for left in monomials_up_to(d, poisson_degree, start=1):
        for right in monomials_up_to(d, poisson_degree - degree(left) + 1, start=1):
            expected = poisson_by_duality(context, left, right, max_degree)
            actual = context.poisson(context.monomial(left), context.monomial(right))
            if expected != actual.truncate(max_degree):
                raise ConventionMismatchError(
                    f"Poisson bracket of x^{left} and x^{right} disagrees with delta_U"
                )
    logger.debug(f"Dual-model cross-check passed up to degree {max_degree}")


def build_context(
    L: LieBialgebra,
    k: int = DEFAULT_LEGS,
    N: int = MIN_DEGREE,
    cross_check_degree: int = MAX_CROSS_CHECK_DEGREE,
) -> AlgebraContext:
    """Build the structure tables of O((G*)^k) / m^{N+1}.

    Args:
        L: The Lie bialgebra (validated by the caller)
        k: Largest number of legs elements may have
        N: Truncation degree
        cross_check_degree: Degree up to which the CBH tables are compared with the
            PBW-duality route (0 disables the comparison)

    Returns:
        The immutable context

    Raises:
        NotALieBialgebraError: If g* fails Jacobi
        ConventionMismatchError: If the cross-check fails
    """
    check_shapes(L)
    if N < 1:
        raise ContextError(f"Truncation degree must be positive, got {N}")
    if k < 2:
        raise ContextError(f"A context needs at least two legs, got {k}")
    context = AlgebraContext(L, k, N)
    context._generator_coproducts = _dual_bch_coproducts(context)
    context.poisson_tensor = _poisson_tensor(context)
    cross_check(context, min(N, cross_check_degree))
    logger.info(
        f"Built algebra context d={L.dim} legs={k} N={N} "
        f"({len(context.poisson_tensor)} nonzero Poisson entries)"
    )
    return context


def random_element(
    context: AlgebraContext,
    legs: int,
    rng: Any,
    *,
    min_degree: int = 0,
    max_degree: int | None = None,
    density: float = 0.3,
    vanishing_counits: bool = False,
) -> TruncatedElement:
    """Random element with small integer coefficients, for property checks.

    Args:
        context: The algebra context
        legs: Number of legs
        rng: A ``random.Random`` instance
        min_degree: Lowest total degree of a term
        max_degree: Highest total degree (the context cap by default)
        density: Probability that a monomial gets a nonzero coefficient
        vanishing_counits: Only use monomials with every leg of positive degree
    """
    top = context.cap if max_degree is None else max_degree
    d = context.dim
    terms: dict[Exponent, Fraction] = {}
    for e in monomials_up_to(legs * d, top, start=min_degree):
        if vanishing_counits and not all(any(block) for block in leg_blocks(e, d)):
            continue
        if rng.random() < density:
            terms[e] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return context.element(legs, terms)
