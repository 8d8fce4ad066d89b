"""PBW machinery for the enveloping algebra U(g*).

Words are tuples of 0-based indices into the dual basis xi_0, ..., xi_{d-1}. A PBW
monomial is a weakly increasing word. Elements of U(g*) (x) U(g*) are dictionaries
keyed by pairs of PBW monomials.

The co-Poisson cobracket delta_U extends the cobracket of g* (the transpose of the
bracket of g) by the co-Leibniz rule; its transpose is the Poisson bracket on the
function algebra of the dual group.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from itertools import product

from sympy.utilities.iterables import multiset_permutations

from rlift.core.models import DualLieAlgebra, Tensor3
from rlift.utils.monomials import Exponent, degree, from_word, to_word

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
PbwTensor = dict[tuple[Word, Word], Fraction]
SymTensor = dict[tuple[Exponent, Exponent], Fraction]


class PbwIndexError(ValueError):
    """Raised when a word uses an index outside the dual basis."""

    pass


class DegreeOverflowError(ValueError):
    """Raised when a request exceeds the degree the algebra was built for."""

    pass


def _accumulate(target: dict, key: object, value: Fraction) -> None:
    total = target.get(key, 0) + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


class PbwElement:
    """Finite linear combination of PBW monomials with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Fraction] | None = None):
        self.terms: dict[Word, Fraction] = {
            word: Fraction(c) for word, c in (terms or {}).items() if c
        }

    @classmethod
    def unit(cls) -> PbwElement:
        """The unit 1 = empty word."""
        return cls({(): Fraction(1)})

    @property
    def degree(self) -> int:
        """Filtration degree: the longest word present (-1 for zero)."""
        return max((len(word) for word in self.terms), default=-1)

    def is_zero(self) -> bool:
        """True for the zero element."""
        return not self.terms

    def __add__(self, other: PbwElement) -> PbwElement:
        result = dict(self.terms)
        for word, c in other.terms.items():
            _accumulate(result, word, c)
        return PbwElement(result)

    def __sub__(self, other: PbwElement) -> PbwElement:
        return self + other * Fraction(-1)

    def __neg__(self) -> PbwElement:
        return self * Fraction(-1)

    def __mul__(self, scalar: Fraction | int) -> PbwElement:
        return PbwElement({word: c * scalar for word, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PbwElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"PbwElement({dict(sorted(self.terms.items()))})"


class EnvelopingAlgebra:
    """U(g*) with straightening, symmetrization and the co-Poisson cobracket.

    All tables are memoized on first use; the object is otherwise immutable.
    """

    def __init__(self, dual: DualLieAlgebra, bracket: Tensor3, cap: int):
        """Create the algebra.

        Args:
            dual: g*, whose structure constants drive the straightening
            bracket: structure constants of g, which define delta_U on generators
            cap: highest degree accepted by the symmetrization map
        """
        self.dim = dual.dim
        self.cap = cap
        self._star = dual.bracket_star
        d = self.dim
        self._star_terms = {
            (a, b): [(k, dual.bracket_star[a][b][k]) for k in range(d) if dual.bracket_star[a][b][k]]
            for a in range(d)
            for b in range(d)
        }
        # delta_U(xi_k) = sum c[a][b][k] xi_a (x) xi_b
        self._delta_terms = {
            k: [(a, b, bracket[a][b][k]) for a in range(d) for b in range(d) if bracket[a][b][k]]
            for k in range(d)
        }
        self._normal: dict[Word, dict[Word, Fraction]] = {}
        self._sym: dict[Exponent, dict[Word, Fraction]] = {}
        self._sym_inverse: dict[Word, dict[Exponent, Fraction]] = {}
        self._cobracket: dict[Word, PbwTensor] = {}

    # -- straightening ------------------------------------------------------

    def _check_word(self, word: Iterable[int]) -> Word:
        word = tuple(word)
        for index in word:
            if not 0 <= index < self.dim:
                raise PbwIndexError(f"Index {index} outside the dual basis of size {self.dim}")
        return word

    def _straighten(self, word: Word) -> dict[Word, Fraction]:
        cached = self._normal.get(word)
        if cached is not None:
            return cached
        descent = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
        if descent is None:
            result = {word: Fraction(1)}
        else:
            a, b = word[descent], word[descent + 1]
            head, tail = word[:descent], word[descent + 2 :]
            # xi_a xi_b = xi_b xi_a + [xi_a, xi_b]
            result = dict(self._straighten(head + (b, a) + tail))
            for k, c in self._star_terms[(a, b)]:
                for w, coeff in self._straighten(head + (k,) + tail).items():
                    _accumulate(result, w, c * coeff)
        self._normal[word] = result
        return result

    def normalize(self, word: Iterable[int]) -> PbwElement:
        """Rewrite a word in the PBW basis.

        Raises:
            PbwIndexError: If an index is out of range
        """
        return PbwElement(self._straighten(self._check_word(word)))

    def multiply(self, p: PbwElement, q: PbwElement) -> PbwElement:
        """Product in U(g*)."""
        result: dict[Word, Fraction] = {}
        for w1, c1 in p.terms.items():
            for w2, c2 in q.terms.items():
                for w, c in self._straighten(w1 + w2).items():
                    _accumulate(result, w, c1 * c2 * c)
        return PbwElement(result)

    # -- symmetrization -----------------------------------------------------

    def _sym_terms(self, exponent: Exponent) -> dict[Word, Fraction]:
        cached = self._sym.get(exponent)
        if cached is not None:
            return cached
        if degree(exponent) > self.cap:
            raise DegreeOverflowError(f"Degree {degree(exponent)} exceeds the cap {self.cap}")
        orderings = [tuple(p) for p in multiset_permutations(list(to_word(exponent)))]
        weight = Fraction(1, len(orderings))
        result: dict[Word, Fraction] = {}
        for ordering in orderings:
            for w, c in self._straighten(ordering).items():
                _accumulate(result, w, weight * c)
        self._sym[exponent] = result
        return result

    def sym_map(self, exponent: Exponent) -> PbwElement:
        """Symmetrization of the commutative monomial xi^exponent.

        Raises:
            DegreeOverflowError: If the degree exceeds the cap
        """
        if len(exponent) != self.dim:
            raise PbwIndexError(f"Exponent vector must have length {self.dim}")
        return PbwElement(self._sym_terms(tuple(exponent)))

    def _sym_inverse_word(self, word: Word) -> dict[Exponent, Fraction]:
        cached = self._sym_inverse.get(word)
        if cached is not None:
            return cached
        exponent = from_word(word, self.dim)
        result: dict[Exponent, Fraction] = {exponent: Fraction(1)}
        # Sym(xi^a) = sorted word + lower-degree corrections
        for w, c in self._sym_terms(exponent).items():
            if w == word:
                continue
            for e, coeff in self._sym_inverse_word(w).items():
                _accumulate(result, e, -c * coeff)
        self._sym_inverse[word] = result
        return result

    def sym_inverse(self, p: PbwElement) -> dict[Exponent, Fraction]:
        """Inverse of the symmetrization map, computed degree by degree."""
        result: dict[Exponent, Fraction] = {}
        for word, c in p.terms.items():
            for e, coeff in self._sym_inverse_word(word).items():
                _accumulate(result, e, c * coeff)
        return result

    def sym_inverse_tensor(self, t: Mapping[tuple[Word, Word], Fraction]) -> SymTensor:
        """Apply the inverse symmetrization to both tensor factors."""
        result: SymTensor = {}
        for (left, right), c in t.items():
            left_image = self._sym_inverse_word(left)
            right_image = self._sym_inverse_word(right)
            for e1, c1 in left_image.items():
                for e2, c2 in right_image.items():
                    _accumulate(result, (e1, e2), c * c1 * c2)
        return result

    # -- coalgebra structure ------------------------------------------------

    def coproduct(self, p: PbwElement) -> PbwTensor:
        """Standard coproduct with primitive generators."""
        result: PbwTensor = {}
        for word, c in p.terms.items():
            n = len(word)
            for mask in product((0, 1), repeat=n):
                left = tuple(word[i] for i in range(n) if mask[i] == 0)
                right = tuple(word[i] for i in range(n) if mask[i] == 1)
                _accumulate(result, (left, right), c)
        return result

    def _cobracket_word(self, word: Word) -> PbwTensor:
        cached = self._cobracket.get(word)
        if cached is not None:
            return cached
        result: PbwTensor = {}
        n = len(word)
        for k in range(n):
            others = [i for i in range(n) if i != k]
            for mask in product((0, 1), repeat=n - 1):
                side = dict(zip(others, mask))
                left_before = tuple(word[i] for i in range(k) if side[i] == 0)
                left_after = tuple(word[i] for i in range(k + 1, n) if side[i] == 0)
                right_before = tuple(word[i] for i in range(k) if side[i] == 1)
                right_after = tuple(word[i] for i in range(k + 1, n) if side[i] == 1)
                for a, b, c in self._delta_terms[word[k]]:
                    left = self._straighten(left_before + (a,) + left_after)
                    right = self._straighten(right_before + (b,) + right_after)
                    for lw, lc in left.items():
                        for rw, rc in right.items():
                            _accumulate(result, (lw, rw), c * lc * rc)
        self._cobracket[word] = result
        return result

    def copoisson_cobracket(self, p: PbwElement) -> PbwTensor:
        """delta_U(p), the co-Leibniz extension of the cobracket of g*."""
        if p.degree > self.cap:
            raise DegreeOverflowError(f"Degree {p.degree} exceeds the cap {self.cap}")
        result: PbwTensor = {}
        for word, c in p.terms.items():
            for key, coeff in self._cobracket_word(word).items():
                _accumulate(result, key, c * coeff)
        return result

    def tensor_multiply(
        self, s: Mapping[tuple[Word, Word], Fraction], t: Mapping[tuple[Word, Word], Fraction]
    ) -> PbwTensor:
        """Product in U(g*) (x) U(g*)."""
        result: PbwTensor = {}
        for (l1, r1), c1 in s.items():
            for (l2, r2), c2 in t.items():
                left = self._straighten(l1 + l2)
                right = self._straighten(r1 + r2)
                for lw, lc in left.items():
                    for rw, rc in right.items():
                        _accumulate(result, (lw, rw), c1 * c2 * lc * rc)
        return result

    def linear_pairing(self, t: Mapping[tuple[Word, Word], Fraction]) -> dict[tuple[int, int], Fraction]:
        """Pair a tensor with x_i (x) x_j for all generator pairs.

        Under the pairing of S(g) with S(g*) and the identification through
        symmetrization, <x_i, u> is the coefficient of xi_i in Sym^{-1}(u).
        """
        result: dict[tuple[int, int], Fraction] = {}
        for (left, right), c in t.items():
            for i, ci in self._linear_part(left).items():
                for j, cj in self._linear_part(right).items():
                    _accumulate(result, (i, j), c * ci * cj)
        return result

    def _linear_part(self, word: Word) -> dict[int, Fraction]:
        return {
            e.index(1): c for e, c in self._sym_inverse_word(word).items() if degree(e) == 1
        }
