"""Free-action correlators on finite-dimensional spaces.

Everything here is exact: the quadratic form, its inverse and all correlator
values are Fractions.  Normalization constants never appear; correlators are
the normalized ones, with the empty product equal to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatchError, GraphStructureError, SingularMatrixError
from .scalars import DEFAULT_POLE_BOUND, LaurentSeries


@dataclass(frozen=True)
class Covector:
    """An element of V*, stored by components in the chosen basis."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components",
                           tuple(Fraction(c) for c in self.components))

    @property
    def dimension(self) -> int:
        return len(self.components)

    @classmethod
    def basis(cls, dimension: int, index: int) -> "Covector":
        return cls(tuple(Fraction(int(i == index)) for i in range(dimension)))


@dataclass(frozen=True)
class BilinearForm:
    """Symmetric positive-definite quadratic form, the free action times two."""

    matrix: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise DimensionMismatchError("matrix is not square", size=d)
        for i in range(d):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise GraphStructureError(
                        f"matrix not symmetric at ({i},{j})")
        # positive definiteness via leading principal minors
        for k in range(1, d + 1):
            if _det([row[:k] for row in rows[:k]]) <= 0:
                raise GraphStructureError(
                    f"leading principal minor of order {k} is not positive")

    @property
    def dimension(self) -> int:
        return len(self.matrix)


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of {1..N}: disjoint ordered pairs (i, j), i < j."""

    pairs: tuple

    def indices(self) -> tuple:
        return tuple(sorted(i for p in self.pairs for i in p))


def _det(rows) -> Fraction:
    # fraction-free enough at desk scale: plain Gaussian elimination
    rows = [list(r) for r in rows]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = Fraction(1) / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return det


def inverse_form(form: BilinearForm) -> tuple:
    """Exact inverse matrix of the form, as a tuple of Fraction rows."""
    n = form.dimension
    aug = [list(form.matrix[i]) + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if aug[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise SingularMatrixError("matrix is singular", column=col)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def pair_value(inverse: Sequence[Sequence[Fraction]], f: Covector,
               g: Covector) -> Fraction:
    """B^{-1}(f, g) evaluated against an explicit inverse matrix."""
    if f.dimension != len(inverse) or g.dimension != len(inverse):
        raise DimensionMismatchError("covector/form dimension mismatch")
    total = Fraction(0)
    for i, fi in enumerate(f.components):
        if not fi:
            continue
        row = inverse[i]
        for j, gj in enumerate(g.components):
            if gj:
                total += fi * row[j] * gj
    return total


def _pair_tuples(items: tuple):
    if not items:
        yield ()
        return
    first = items[0]
    rest = items[1:]
    for i in range(len(rest)):
        head = (first, rest[i])
        for tail in _pair_tuples(rest[:i] + rest[i + 1:]):
            yield (head,) + tail


def enumerate_pairings(n: int) -> list:
    """All perfect matchings of {1..n} with the smallest unmatched index
    always opening the next pair; canonical order, no duplicates."""
    if n < 0 or n % 2:
        raise GraphStructureError(f"no perfect matchings of {n} points", n=n)
    return [Pairing(p) for p in _pair_tuples(tuple(range(1, n + 1)))]


def pairing_count(n: int) -> int:
    """N!/(2^p p!) for even N, the number of Wick pairings."""
    if n % 2:
        return 0
    p = n // 2
    return math.factorial(n) // (2 ** p * math.factorial(p))


def moment_1d(n: int) -> Fraction:
    """Moments of the standard 1D Gaussian: 0 for odd n, N!/(2^p p!) else.

    >>> moment_1d(4)
    Fraction(3, 1)
    >>> moment_1d(5)
    Fraction(0, 1)
    """
    if n < 0:
        raise GraphStructureError("negative moment order", n=n)
    return Fraction(pairing_count(n))


def free_correlator(forms: Iterable[Covector], form: BilinearForm) -> Fraction:
    """Sum over Wick pairings of products of B^{-1}(f_i, f_j).

    Zero for an odd number of forms, one for the empty product.  Computed by
    the pairing recursion (contract the first slot against every other slot)
    with memoization on the multiset of remaining slots, which collapses the
    double-factorial blowup whenever forms repeat.
    """
    forms = list(forms)
    for f in forms:
        if f.dimension != form.dimension:
            raise DimensionMismatchError(
                "covector dimension does not match the form",
                form=form.dimension, covector=f.dimension)
    n = len(forms)
    if n % 2:
        return Fraction(0)
    if n == 0:
        return Fraction(1)
    inverse = inverse_form(form)
    # dedupe identical covectors into symbols
    symbols: list[Covector] = []
    index_of: dict = {}
    counts: list[int] = []
    for f in forms:
        k = index_of.get(f.components)
        if k is None:
            k = len(symbols)
            index_of[f.components] = k
            symbols.append(f)
            counts.append(0)
        counts[k] += 1
    gram = [[pair_value(inverse, a, b) for b in symbols] for a in symbols]
    memo: dict = {}

    def corr(counts_t: tuple) -> Fraction:
        if not any(counts_t):
            return Fraction(1)
        cached = memo.get(counts_t)
        if cached is not None:
            return cached
        i = next(k for k, c in enumerate(counts_t) if c)
        rest = list(counts_t)
        rest[i] -= 1
        total = Fraction(0)
        for j, cj in enumerate(rest):
            if not cj:
                continue
            sub = list(rest)
            sub[j] -= 1
            total += cj * gram[i][j] * corr(tuple(sub))
        memo[counts_t] = total
        return total

    return corr(tuple(counts))


def perturbed_partition_1d(truncation: int) -> LaurentSeries:
    """Power series in the source J for the linearly perturbed 1D action:
    sum of J^{2i} / (2^i i!) up to the requested degree."""
    terms = {}
    i = 0
    while 2 * i <= truncation:
        terms[2 * i] = Fraction(1, 2 ** i * math.factorial(i))
        i += 1
    return LaurentSeries(terms, truncation, DEFAULT_POLE_BOUND)
