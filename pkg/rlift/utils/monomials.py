"""Exponent-vector helpers for sparse polynomials on several legs.

An exponent vector of a k-leg element over a d-dimensional algebra is a tuple of
length k*d; block ``l`` (0-based) holds the exponents of the generators on leg ``l``.
"""

from collections.abc import Iterator
from functools import cache
from itertools import combinations_with_replacement, product
from math import comb, factorial

Exponent = tuple[int, ...]


def degree(exponent: Exponent) -> int:
    """Total degree of a monomial."""
    return sum(exponent)


def unit(nvars: int, index: int) -> Exponent:
    """Exponent vector of the single generator ``index``."""
    return tuple(1 if i == index else 0 for i in range(nvars))


@cache
def monomials_of_degree(nvars: int, deg: int) -> tuple[Exponent, ...]:
    """All exponent vectors in ``nvars`` variables of total degree ``deg``.

    The order is deterministic (lexicographic in the sorted index multiset).
    """
    result = []
    for indices in combinations_with_replacement(range(nvars), deg):
        exponent = [0] * nvars
        for i in indices:
            exponent[i] += 1
        result.append(tuple(exponent))
    return tuple(result)


def monomials_up_to(nvars: int, cap: int, start: int = 0) -> Iterator[Exponent]:
    """All exponent vectors of total degree in ``start..cap``."""
    for deg in range(start, cap + 1):
        yield from monomials_of_degree(nvars, deg)


def leg_blocks(exponent: Exponent, dim: int) -> tuple[Exponent, ...]:
    """Split a multi-leg exponent vector into its per-leg blocks."""
    return tuple(exponent[i : i + dim] for i in range(0, len(exponent), dim))


def join_blocks(blocks: tuple[Exponent, ...] | list[Exponent]) -> Exponent:
    """Concatenate per-leg blocks into one exponent vector."""
    return tuple(e for block in blocks for e in block)


def leg_degrees(exponent: Exponent, dim: int) -> tuple[int, ...]:
    """Total degree on each leg."""
    return tuple(sum(block) for block in leg_blocks(exponent, dim))


def content(exponent: Exponent, dim: int) -> Exponent:
    """Sum of the leg blocks.

    The graded coproduct and the co-Hochschild differentials preserve it, so linear
    systems built from them split into independent blocks by content.
    """
    total = [0] * dim
    for block in leg_blocks(exponent, dim):
        for i, e in enumerate(block):
            total[i] += e
    return tuple(total)


def exponent_factorial(exponent: Exponent) -> int:
    """Product of the factorials of the entries (the multi-index factorial)."""
    result = 1
    for e in exponent:
        result *= factorial(e)
    return result


def splittings(exponent: Exponent) -> Iterator[tuple[Exponent, Exponent, int]]:
    """All ways to write x^a as x^b * x^(a-b), with multinomial weight.

    Yields ``(b, a - b, prod_i C(a_i, b_i))``, i.e. the terms of the standard
    cocommutative coproduct of ``x^a``.
    """
    ranges = [range(e + 1) for e in exponent]
    for left in product(*ranges):
        right = tuple(e - b for e, b in zip(exponent, left))
        weight = 1
        for e, b in zip(exponent, left):
            weight *= comb(e, b)
        yield tuple(left), right, weight


def to_word(exponent: Exponent) -> tuple[int, ...]:
    """Sorted index sequence of a commutative monomial (0-based indices)."""
    return tuple(i for i, e in enumerate(exponent) for _ in range(e))


def from_word(word: tuple[int, ...], nvars: int) -> Exponent:
    """Commutative monomial of an index sequence (0-based indices)."""
    exponent = [0] * nvars
    for i in word:
        exponent[i] += 1
    return tuple(exponent)
