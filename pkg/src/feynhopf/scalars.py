"""Exact scalars: rationals, polynomials in the scale variable t, and
truncated Laurent series in eps.

The Laurent coefficient ring is duck-typed: plain ``Fraction`` values for
ordinary computations, ``TPoly`` values when scale dependence has to stay
exact.  A series keeps exponents in ``[-pole_bound, truncation]``;
multiplication truncates above ``truncation`` and refuses (hard error, never
silent) to push a nonzero coefficient below ``-pole_bound``.

No floating point appears anywhere in this module.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import PoleOverflowError, TruncationMismatchError

Rational = Fraction

DEFAULT_TRUNCATION = 16
DEFAULT_POLE_BOUND = 8


def rational_from_string(text: str) -> Fraction:
    """Parse "p/q" or "p" into an exact rational."""
    return Fraction(text.strip())


def rational_to_string(value: Fraction) -> str:
    """Inverse of :func:`rational_from_string`; omits "/1"."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class TPoly:
    """Polynomial in the formal scale variable t with Fraction coefficients.

    Coefficients are stored densely by degree with the trailing zeros
    stripped, so the zero polynomial has an empty tuple.  Instances are
    immutable; all arithmetic returns new objects.  Mixed arithmetic with
    ``int`` and ``Fraction`` treats the scalar as a constant polynomial.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # immutability by convention, enforced
        raise AttributeError("TPoly is immutable")

    @classmethod
    def constant(cls, c) -> "TPoly":
        return cls((Fraction(c),))

    @classmethod
    def variable(cls) -> "TPoly":
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def evaluate(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return TPoly(
            tuple(self.coefficient(i) + other.coefficient(i) for i in range(n))
        )

    __radd__ = __add__

    def __neg__(self):
        return TPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return TPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return TPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        acc = TPoly.constant(1)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def __eq__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(rational_to_string(c))
            elif k == 1:
                parts.append(f"{rational_to_string(c)}*t")
            else:
                parts.append(f"{rational_to_string(c)}*t^{k}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [rational_to_string(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "TPoly":
        return cls(tuple(rational_from_string(s) for s in obj))


def _as_tpoly(value):
    if isinstance(value, TPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return TPoly((Fraction(value),))
    return NotImplemented


def _is_scalar_coeff(value) -> bool:
    return isinstance(value, (int, Fraction, TPoly))


class LaurentSeries:
    """Truncated Laurent series in eps with exact coefficients.

    ``terms`` maps exponent -> coefficient, holding only nonzero entries with
    exponents in ``[-pole_bound, truncation]``.  Coefficients above the
    truncation order are dropped on construction (they are outside the
    representable window); a nonzero coefficient below ``-pole_bound`` is a
    hard :class:`PoleOverflowError`.
    """

    __slots__ = ("_terms", "truncation", "pole_bound")

    def __init__(self, terms=None, truncation: int = DEFAULT_TRUNCATION,
                 pole_bound: int = DEFAULT_POLE_BOUND):
        if truncation < 0 or pole_bound < 0:
            raise ValueError("truncation and pole_bound must be non-negative")
        clean = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for k, c in items:
                k = int(k)
                if isinstance(c, int):
                    c = Fraction(c)
                if not c:
                    continue
                if k > truncation:
                    continue
                if k < -pole_bound:
                    raise PoleOverflowError(
                        f"exponent {k} below pole bound -{pole_bound}",
                        exponent=k, pole_bound=pole_bound)
                prev = clean.get(k)
                c = c if prev is None else prev + c
                if c:
                    clean[k] = c
                elif prev is not None:
                    del clean[k]
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "truncation", truncation)
        object.__setattr__(self, "pole_bound", pole_bound)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    @classmethod
    def zero(cls, truncation=DEFAULT_TRUNCATION, pole_bound=DEFAULT_POLE_BOUND):
        return cls({}, truncation, pole_bound)

    @classmethod
    def one(cls, truncation=DEFAULT_TRUNCATION, pole_bound=DEFAULT_POLE_BOUND):
        return cls({0: Fraction(1)}, truncation, pole_bound)

    @classmethod
    def monomial(cls, coeff, exponent, truncation=DEFAULT_TRUNCATION,
                 pole_bound=DEFAULT_POLE_BOUND):
        return cls({exponent: coeff}, truncation, pole_bound)

    def terms(self):
        """Sorted (exponent, coefficient) pairs."""
        return tuple(sorted(self._terms.items()))

    def coefficient(self, k: int):
        return self._terms.get(k, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def min_exponent(self):
        return min(self._terms) if self._terms else None

    def _require_compatible(self, other: "LaurentSeries"):
        if self.truncation != other.truncation:
            raise TruncationMismatchError(
                f"truncation orders differ: {self.truncation} != {other.truncation}",
                left=self.truncation, right=other.truncation)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._require_compatible(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return LaurentSeries(out, self.truncation,
                             max(self.pole_bound, other.pole_bound))

    def __neg__(self):
        return LaurentSeries({k: -c for k, c in self._terms.items()},
                             self.truncation, self.pole_bound)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return laurent_mul(self, other)
        if _is_scalar_coeff(other):
            if not other:
                return LaurentSeries.zero(self.truncation, self.pole_bound)
            return LaurentSeries({k: c * other for k, c in self._terms.items()},
                                 self.truncation, self.pole_bound)
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar_coeff(other):
            return self.__mul__(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        if self.truncation != other.truncation:
            return False
        if set(self._terms) != set(other._terms):
            return False
        return all(other._terms[k] == c for k, c in self._terms.items())

    def map_coefficients(self, fn) -> "LaurentSeries":
        return LaurentSeries({k: fn(c) for k, c in self._terms.items()},
                             self.truncation, self.pole_bound)

    def pole_part(self) -> "LaurentSeries":
        return LaurentSeries({k: c for k, c in self._terms.items() if k < 0},
                             self.truncation, self.pole_bound)

    def regular_part(self) -> "LaurentSeries":
        return LaurentSeries({k: c for k, c in self._terms.items() if k >= 0},
                             self.truncation, self.pole_bound)

    def at_zero(self):
        """Value at eps = 0; only meaningful when the series is regular."""
        return self.coefficient(0)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items()):
            cs = repr(c) if isinstance(c, TPoly) else rational_to_string(c)
            if isinstance(c, TPoly) and not c.is_constant():
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            elif k == 1:
                parts.append(f"{cs}*eps")
            else:
                parts.append(f"{cs}*eps^{k}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        out = []
        for k, c in sorted(self._terms.items()):
            if isinstance(c, TPoly):
                out.append([k, c.to_json()])
            else:
                out.append([k, rational_to_string(c)])
        return {"truncation": self.truncation, "pole_bound": self.pole_bound,
                "terms": out}

    @classmethod
    def from_json(cls, obj) -> "LaurentSeries":
        terms = {}
        for k, c in obj["terms"]:
            if isinstance(c, list):
                terms[int(k)] = TPoly.from_json(c)
            else:
                terms[int(k)] = rational_from_string(c)
        return cls(terms, int(obj["truncation"]), int(obj["pole_bound"]))


def laurent_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a + b


def laurent_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Cauchy product truncated above; overflow below the pole bound is fatal.

    Cancellation is honoured: only a *nonzero* total coefficient below the
    bound raises, so e.g. (1/eps - 1)(1/eps + 1) with P = 1 is fine while
    (1/eps)^2 is not.
    """
    a._require_compatible(b)
    trunc = a.truncation
    bound = max(a.pole_bound, b.pole_bound)
    out: dict = {}
    for ka, ca in a._terms.items():
        for kb, cb in b._terms.items():
            k = ka + kb
            if k > trunc:
                continue
            s = out.get(k, 0) + ca * cb
            if s:
                out[k] = s
            elif k in out:
                del out[k]
    for k in out:
        if k < -bound:
            raise PoleOverflowError(
                f"product needs eps^{k} but pole bound is {bound}",
                exponent=k, pole_bound=bound)
    return LaurentSeries(out, trunc, bound)


def ms_project(a: LaurentSeries) -> LaurentSeries:
    """Minimal subtraction: the strictly negative (pole) part of a series."""
    return a.pole_part()


def exp_eps_poly(c, truncation: int = DEFAULT_TRUNCATION,
                 pole_bound: int = DEFAULT_POLE_BOUND) -> LaurentSeries:
    """exp(c*eps) as a regular series, sum of c^j eps^j / j! up to order K.

    ``c`` may be an int, a Fraction or a TPoly; the coefficient ring of the
    result follows the input.
    """
    if isinstance(c, int):
        c = Fraction(c)
    terms = {}
    power = TPoly.constant(1) if isinstance(c, TPoly) else Fraction(1)
    for j in range(truncation + 1):
        coeff = power * Fraction(1, math.factorial(j))
        if coeff:
            terms[j] = coeff
        power = power * c
    return LaurentSeries(terms, truncation, pole_bound)


def lift_to_tpoly(a: LaurentSeries) -> LaurentSeries:
    """Reinterpret Fraction coefficients as constant polynomials in t."""
    def lift(c):
        return c if isinstance(c, TPoly) else TPoly.constant(c)
    return a.map_coefficients(lift)


def evaluate_t(a: LaurentSeries, t_value) -> LaurentSeries:
    """Evaluate every TPoly coefficient at a rational t."""
    def ev(c):
        return c.evaluate(t_value) if isinstance(c, TPoly) else c
    return a.map_coefficients(ev)
