"""Exact classical Bernoulli-type numbers, used as q -> 1 reference values."""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .characters import CycloValue, DirichletCharacter
from .numerics import DomainError, composition_counts

__all__ = [
    "RationalSeries",
    "bernoulli",
    "bernoulli_poly",
    "generalized_bernoulli",
    "multi_gen_bernoulli",
]


class RationalSeries:
    """Truncated power series sum_{k<=order} c_k t^k with Fraction coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = [Fraction(c) for c in coeffs]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def exp_linear(cls, a, order: int) -> "RationalSeries":
        """e^{a t}."""
        a = Fraction(a)
        out, c = [], Fraction(1)
        for k in range(order + 1):
            out.append(c)
            c = c * a / (k + 1)
        return cls(out)

    @classmethod
    def monomial(cls, k: int, order: int) -> "RationalSeries":
        c = [Fraction(0)] * (order + 1)
        if k <= order:
            c[k] = Fraction(1)
        return cls(c)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def _pair(self, other: "RationalSeries"):
        k = min(self.order, other.order)
        return self.coeffs[: k + 1], other.coeffs[: k + 1]

    def __add__(self, other):
        if not isinstance(other, RationalSeries):
            other = RationalSeries([other] + [0] * self.order)
        a, b = self._pair(other)
        return RationalSeries([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return RationalSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalSeries) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, RationalSeries):
            f = Fraction(other)
            return RationalSeries([c * f for c in self.coeffs])
        a, b = self._pair(other)
        n = len(a)
        out = [Fraction(0)] * n
        for i, x in enumerate(a):
            if x:
                for j in range(n - i):
                    out[i + j] += x * b[j]
        return RationalSeries(out)

    __rmul__ = __mul__

    def __pow__(self, r: int):
        out = RationalSeries.monomial(0, self.order)
        for _ in range(r):
            out = out * self
        return out

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return len(self.coeffs)

    def inverse(self) -> "RationalSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        inv = [1 / c0]
        for k in range(1, len(self.coeffs)):
            s = sum(self.coeffs[j] * inv[k - j] for j in range(1, k + 1))
            inv.append(-s / c0)
        return RationalSeries(inv)

    def __truediv__(self, other: "RationalSeries") -> "RationalSeries":
        """Divide after cancelling the t-power of ``other``.

        The numerator's coefficients below that power must vanish; the
        quotient loses that many orders.
        """
        v = other.valuation()
        if v > other.order:
            raise ZeroDivisionError("division by the zero series")
        if any(self.coeffs[:v]):
            raise ArithmeticError("quotient is not a power series: numerator has lower-order terms")
        num = RationalSeries(self.coeffs[v:])
        den = RationalSeries(other.coeffs[v:])
        return num * den.inverse()

    def exp(self) -> "RationalSeries":
        """exp of a series with zero constant term."""
        if self.coeffs[0] != 0:
            raise ArithmeticError("exp needs a zero constant term")
        n = len(self.coeffs)
        out = [Fraction(1)] + [Fraction(0)] * (n - 1)
        # f' = g' f
        for k in range(1, n):
            out[k] = sum(j * self.coeffs[j] * out[k - j] for j in range(1, k + 1)) / k
        return RationalSeries(out)


_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n < 0:
        raise DomainError("n must be >= 0")
    table = _BERNOULLI
    for m in range(len(table), n + 1):
        # sum_{k<=m} C(m+1, k) B_k = 0
        s = sum(comb(m + 1, k) * table[k] for k in range(m))
        table.append(-s / (m + 1))
    return table[n]


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum(comb(n, k) * bernoulli(k) * x ** (n - k) for k in range(n + 1))


def generalized_bernoulli(n: int, chi: DirichletCharacter) -> CycloValue:
    """B_{n,chi} = f^{n-1} sum_a chi(a) B_n(a/f)."""
    f = chi.modulus
    terms = []
    for a in range(1, f + 1):
        z = chi(a)
        if z is not None:
            terms.append((z, Fraction(f) ** (n - 1) * bernoulli_poly(n, Fraction(a, f))))
    return CycloValue.from_terms(terms)


def multi_gen_bernoulli(n: int, r: int, chi: DirichletCharacter) -> CycloValue:
    """Coefficient of t^n/n! in sum_{a in [1,f]^r} chi(sum a) t^r e^{(sum a) t} / (e^{f t} - 1)^r."""
    if n < 0 or r < 1:
        raise DomainError("need n >= 0 and r >= 1")
    f = chi.modulus
    order = n + r + 2
    denom = (RationalSeries.exp_linear(f, order) - 1) ** r
    shift = RationalSeries.monomial(r, order)
    terms = []
    for total, count in composition_counts(r, f).items():
        z = chi(total)
        if z is None:
            continue
        quotient = (shift * RationalSeries.exp_linear(total, order)) / denom
        if quotient.order < n:
            raise ArithmeticError(f"series order {quotient.order} too small for n = {n}")
        terms.append((z, count * quotient[n] * factorial(n)))
    return CycloValue.from_terms(terms)
