"""Dirichlet characters with exact root-of-unity values.

Characters mod f are enumerated over a fixed generator list of (Z/f)^*:
primes ascending; the smallest primitive root for odd prime powers; 3 for
modulus 4; (-1, 5) for 2^k with k >= 3.  The index of a character is its
position in the lexicographic order of exponent tuples over those
generators, so index 0 is always the principal character.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import mpmath
from mpmath import mpc
from sympy import Poly, cyclotomic_poly, divisors, factorint, symbols
from sympy.ntheory import primitive_root

from .numerics import DomainError

__all__ = [
    "RootOfUnity",
    "CycloValue",
    "DirichletCharacter",
    "characters_mod",
    "char_eval",
    "conductor_of",
    "parse_character",
    "induce",
    "character_sum",
]


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """exp(2*pi*i*angle) with angle a rational in [0, 1)."""

    angle: Fraction

    def __post_init__(self):
        object.__setattr__(self, "angle", Fraction(self.angle) % 1)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.angle + other.angle)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(-self.angle)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.angle * k)

    @property
    def order(self) -> int:
        return self.angle.denominator

    def to_mpc(self) -> mpc:
        t = 2 * mpmath.mpf(self.angle.numerator) / self.angle.denominator
        return mpc(mpmath.cospi(t), mpmath.sinpi(t))


ONE = RootOfUnity(Fraction(0))


@functools.lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, constant term first."""
    x = symbols("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(m, x), x).all_coeffs()))


def _reduce(coeffs: list[Fraction], m: int) -> tuple[Fraction, ...]:
    phi = _cyclotomic(m)
    deg = len(phi) - 1
    c = list(coeffs) + [Fraction(0)] * max(0, deg - len(coeffs))
    for k in range(len(c) - 1, deg - 1, -1):
        lead = c[k]
        if lead:
            shift = k - deg
            for j, p in enumerate(phi):
                c[shift + j] -= lead * p
    return tuple(c[:deg])


class CycloValue:
    """An exact element of Q(zeta_m), stored in the power basis mod Phi_m."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: Iterable[Fraction]):
        self.m = m
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @classmethod
    def zero(cls) -> "CycloValue":
        return cls(1, [Fraction(0)])

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[RootOfUnity, Fraction]]) -> "CycloValue":
        terms = [(z, Fraction(c)) for z, c in terms if c]
        m = 1
        for z, _ in terms:
            m = math.lcm(m, z.order)
        raw = [Fraction(0)] * m
        for z, c in terms:
            raw[int(z.angle * m)] += c
        return cls(m, _reduce(raw, m))

    @classmethod
    def rational(cls, c) -> "CycloValue":
        return cls(1, [Fraction(c)])

    def _lift(self, big: int) -> "CycloValue":
        if big == self.m:
            return self
        step = big // self.m
        raw = [Fraction(0)] * big
        for k, c in enumerate(self.coeffs):
            raw[k * step] += c
        return CycloValue(big, _reduce(raw, big))

    def __add__(self, other) -> "CycloValue":
        if not isinstance(other, CycloValue):
            other = CycloValue.rational(other)
        m = math.lcm(self.m, other.m)
        a, b = self._lift(m), other._lift(m)
        return CycloValue(m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "CycloValue":
        return CycloValue(self.m, [-c for c in self.coeffs])

    def __sub__(self, other) -> "CycloValue":
        return self + (-other if isinstance(other, CycloValue) else -Fraction(other))

    def __mul__(self, other) -> "CycloValue":
        if isinstance(other, RootOfUnity):
            m = math.lcm(self.m, other.order)
            lifted = self._lift(m)
            shift = int(other.angle * m)
            raw = [Fraction(0)] * (m + len(lifted.coeffs))
            for k, c in enumerate(lifted.coeffs):
                raw[(k + shift) % m] += c
            return CycloValue(m, _reduce(raw[:m], m))
        if isinstance(other, CycloValue):
            m = math.lcm(self.m, other.m)
            a, b = self._lift(m), other._lift(m)
            raw = [Fraction(0)] * (2 * m)
            for i, x in enumerate(a.coeffs):
                if x:
                    for j, y in enumerate(b.coeffs):
                        raw[i + j] += x * y
            return CycloValue(m, _reduce(raw, m))
        f = Fraction(other)
        return CycloValue(self.m, [c * f for c in self.coeffs])

    __rmul__ = __mul__

    def conjugate(self) -> "CycloValue":
        raw = [Fraction(0)] * self.m
        for k, c in enumerate(self.coeffs):
            raw[(-k) % self.m] += c
        return CycloValue(self.m, _reduce(raw, self.m))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloValue):
            try:
                other = CycloValue.rational(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.as_rational()) if self.is_rational() else hash(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def to_mpc(self) -> mpc:
        total = mpc(0)
        for k, c in enumerate(self.coeffs):
            if c:
                z = RootOfUnity(Fraction(k, self.m)).to_mpc()
                total += z * (mpmath.mpf(c.numerator) / c.denominator)
        return total

    def __repr__(self) -> str:
        if self.is_rational():
            return f"CycloValue({self.as_rational()})"
        return f"CycloValue(m={self.m}, {list(map(str, self.coeffs))})"


def _components(f: int) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(prime power, generators, generator orders) per prime of f."""
    comps = []
    for p, k in sorted(factorint(f).items()):
        pk = p**k
        if p == 2:
            if k == 1:
                continue
            if k == 2:
                comps.append((pk, (3,), (2,)))
            else:
                comps.append((pk, (pk - 1, 5), (2, 2 ** (k - 2))))
        else:
            comps.append((pk, (int(primitive_root(pk)),), (pk // p * (p - 1),)))
    return comps


def _dlog_table(pk: int, gens: tuple[int, ...], orders: tuple[int, ...]) -> dict[int, tuple[int, ...]]:
    table = {}
    for exps in itertools.product(*(range(o) for o in orders)):
        v = 1
        for g, e in zip(gens, exps):
            v = v * pow(g, e, pk) % pk
        table[v] = exps
    return table


@functools.lru_cache(maxsize=None)
def _group_data(f: int):
    comps = _components(f)
    tables = [_dlog_table(pk, g, o) for pk, g, o in comps]
    orders = tuple(o for _, _, os_ in comps for o in os_)
    logs: list[Optional[tuple[int, ...]]] = []
    for n in range(f):
        if math.gcd(n, f) != 1:
            logs.append(None)
            continue
        exps: tuple[int, ...] = ()
        for (pk, _, _), table in zip(comps, tables):
            exps += table[n % pk]
        logs.append(exps)
    return comps, orders, tuple(logs)


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod ``modulus`` given by generator exponents."""

    modulus: int
    exponents: tuple[int, ...]
    index: int = 0
    _angles: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError(f"modulus must be >= 1, got {self.modulus}")
        _, orders, logs = _group_data(self.modulus)
        if len(self.exponents) != len(orders):
            raise DomainError("exponent tuple does not match the generator list")
        angles = []
        for lg in logs:
            if lg is None:
                angles.append(None)
            else:
                a = sum(Fraction(e * l, o) for e, l, o in zip(self.exponents, lg, orders))
                angles.append(a % 1)
        if self.modulus == 1:
            angles = [Fraction(0)]
        object.__setattr__(self, "_angles", tuple(angles))

    def __call__(self, n: int) -> Optional[RootOfUnity]:
        a = self._angles[n % self.modulus]
        return None if a is None else RootOfUnity(a)

    def value(self, n: int) -> mpc:
        z = self(n)
        return mpc(0) if z is None else z.to_mpc()

    def angle(self, n: int) -> Optional[Fraction]:
        return self._angles[n % self.modulus]

    @property
    def spec(self) -> str:
        return f"{self.modulus}:{self.index}"

    @functools.cached_property
    def order(self) -> int:
        return math.lcm(*(a.denominator for a in self._angles if a is not None))

    @property
    def is_principal(self) -> bool:
        return self.order == 1

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @functools.cached_property
    def conductor(self) -> int:
        return conductor_of(self)[0]

    @property
    def primitive(self) -> bool:
        return self.conductor == self.modulus

    def __str__(self) -> str:
        return f"chi[{self.spec}]"


@functools.lru_cache(maxsize=None)
def characters_mod(f: int) -> tuple[DirichletCharacter, ...]:
    """Every character mod f in canonical order; index 0 is principal."""
    if f < 1:
        raise DomainError(f"modulus must be >= 1, got {f}")
    _, orders, _ = _group_data(f)
    exps = itertools.product(*(range(o) for o in orders))
    return tuple(DirichletCharacter(f, e, i) for i, e in enumerate(exps))


def char_eval(chi: DirichletCharacter, n: int) -> Union[RootOfUnity, int]:
    """Exact value chi(n): a RootOfUnity, or 0 when gcd(n, f) > 1."""
    z = chi(n)
    return 0 if z is None else z


def conductor_of(chi: DirichletCharacter) -> tuple[int, bool]:
    f = chi.modulus
    for d in divisors(f):
        if all(
            chi._angles[n] == 0
            for n in range(1, f, d)
            if chi._angles[n] is not None
        ):
            return int(d), d == f
    raise AssertionError("unreachable: d = f always qualifies")


def parse_character(spec: str) -> DirichletCharacter:
    """Resolve ``"<modulus>:<index>"`` against :func:`characters_mod`."""
    try:
        f_text, i_text = spec.split(":")
        f, i = int(f_text), int(i_text)
    except ValueError as exc:
        raise DomainError(f"bad character spec {spec!r}; expected '<modulus>:<index>'") from exc
    chars = characters_mod(f)
    if not 0 <= i < len(chars):
        raise DomainError(f"character index {i} out of range for modulus {f} ({len(chars)} characters)")
    return chars[i]


def induce(chi: DirichletCharacter, m: int) -> DirichletCharacter:
    """The character mod m (a multiple of chi's modulus) induced by chi."""
    if m % chi.modulus:
        raise DomainError(f"{m} is not a multiple of {chi.modulus}")
    for cand in characters_mod(m):
        if all(
            cand._angles[n] == chi._angles[n % chi.modulus]
            for n in range(m)
            if cand._angles[n] is not None
        ):
            return cand
    raise AssertionError("no induced character found")


def character_sum(chi: DirichletCharacter, weights: dict[int, Fraction] | None = None) -> CycloValue:
    """Exact sum over a in [1, f] of chi(a) * weights[a] (weights default to 1)."""
    terms = []
    for a in range(1, chi.modulus + 1):
        z = chi(a)
        if z is not None:
            w = Fraction(1) if weights is None else Fraction(weights.get(a, 0))
            terms.append((z, w))
    return CycloValue.from_terms(terms)
