"""Homogeneous terms of the Baker–Campbell–Hausdorff series.

The kernel works for any Lie-algebra-like value type supporting ``+``, ``-`` and
multiplication by a ``Fraction`` on the right, with the bracket passed in. It uses the
recursion

    Z_1 = X + Y
    (n+1) Z_{n+1} = 1/2 [X - Y, Z_n]
                    + sum_{p >= 1, 2p <= n} B_{2p}/(2p)!
                      sum_{k_1 + ... + k_{2p} = n} [Z_{k_1}, [..., [Z_{k_{2p}}, X + Y]...]]

where B_{2p} are Bernoulli numbers and Z_n is the degree-n Lie polynomial of
log(exp X exp Y).
"""

from collections.abc import Callable, Iterator
from fractions import Fraction
from functools import cache
from itertools import combinations
from math import factorial
from typing import Any, Protocol, TypeVar

import sympy


class LieValue(Protocol):
    """Values the kernel can combine."""

    def __add__(self, other: Any, /) -> Any: ...

    def __sub__(self, other: Any, /) -> Any: ...

    def __mul__(self, scalar: Fraction, /) -> Any: ...


V = TypeVar("V", bound=LieValue)


@cache
def bernoulli_weight(index: int) -> Fraction:
    """B_index / index! as an exact fraction."""
    value = sympy.Rational(sympy.bernoulli(index))
    return Fraction(int(value.p), int(value.q)) / factorial(index)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    for cuts in combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def bch_terms(x: V, y: V, bracket: Callable[[V, V], V], order: int) -> list[V]:
    """The homogeneous terms Z_1, ..., Z_order of log(exp x exp y).

    Args:
        x: First argument
        y: Second argument
        bracket: Lie bracket on the value type
        order: Number of terms to compute (at least 1)

    Returns:
        List whose entry ``k - 1`` is Z_k
    """
    total = x + y
    half_difference = (x - y) * Fraction(1, 2)
    terms: list[V] = [total]
    # [Z_k, x + y] is the innermost bracket of every nested term
    inner: dict[int, V] = {}

    for n in range(1, order):
        acc = bracket(half_difference, terms[n - 1])
        for p in range(1, n // 2 + 1):
            weight = bernoulli_weight(2 * p)
            for ks in compositions(n, 2 * p):
                last = ks[-1]
                if last not in inner:
                    inner[last] = bracket(terms[last - 1], total)
                nested = inner[last]
                for k in reversed(ks[:-1]):
                    nested = bracket(terms[k - 1], nested)
                acc = acc + nested * weight
        terms.append(acc * Fraction(1, n + 1))
    return terms
