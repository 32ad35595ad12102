"""Precision context, the deformation parameter q, and scalar primitives.

Every high-precision value in the package is an ``mpmath`` ``mpf``/``mpc``;
exact values are ``fractions.Fraction``.  The two never mix implicitly, so
conversions go through :func:`to_mpf`.
"""

from __future__ import annotations

import functools
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterator, Union

import gmpy2
import mpmath
from mpmath import mp, mpc, mpf

__all__ = [
    "QDirichletError",
    "DomainError",
    "TruncationError",
    "PoleProximityError",
    "PrecisionCtx",
    "DEFAULT_CTX",
    "QParam",
    "to_mpf",
    "to_mpc",
    "exact_qpow",
    "qbracket",
    "lfactor",
    "cpow",
    "tail_cutoff",
    "certified_sum",
    "composition_counts",
]

Exact = Union[int, Fraction]


class QDirichletError(Exception):
    """Base class for evaluation failures raised by this package."""


class DomainError(QDirichletError, ValueError):
    pass


class TruncationError(QDirichletError, ArithmeticError):
    """No truncation length within ``max_terms`` certifies the requested bound."""

    def __init__(self, message: str, best_bound):
        super().__init__(message)
        self.best_bound = best_bound


class PoleProximityError(QDirichletError, ValueError):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


@dataclass(frozen=True)
class PrecisionCtx:
    """Working precision and truncation policy.

    Values are reported to ``digits`` significant digits; all arithmetic runs
    at ``digits + guard``.  Certified tails are pushed below
    ``10**-(digits + guard)`` and route comparisons use the looser
    ``10**-(digits - 2*guard)``.
    """

    digits: int = 50
    guard: int = 12
    max_terms: int = 200_000
    pole_radius: float = 1e-6

    def __post_init__(self):
        if self.digits < 10:
            raise DomainError(f"digits must be >= 10, got {self.digits}")
        if self.guard < 5:
            raise DomainError(f"guard must be >= 5, got {self.guard}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms}")
        if not self.pole_radius > 0:
            raise DomainError("pole_radius must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "PrecisionCtx":
        """Defaults overridable via ``QDIRICHLET_DIGITS`` / ``QDIRICHLET_MAX_TERMS``."""
        kwargs = {
            "digits": _env_int("QDIRICHLET_DIGITS", cls.digits),
            "max_terms": _env_int("QDIRICHLET_MAX_TERMS", cls.max_terms),
        }
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    @property
    def work_dps(self) -> int:
        return self.digits + self.guard

    @property
    def tail_target(self) -> mpf:
        return mpf(10) ** -(self.digits + self.guard)

    @property
    def route_tolerance(self) -> mpf:
        """Relative tolerance for two-route agreement inside one module."""
        return mpf(10) ** -(self.digits - self.guard)

    @property
    def identity_tolerance(self) -> mpf:
        """Relative tolerance used by the verification harness."""
        return mpf(10) ** -(self.digits - 2 * self.guard)

    @contextmanager
    def workprec(self, extra: int = 0) -> Iterator[None]:
        with mp.workdps(self.work_dps + max(0, int(extra))):
            yield


DEFAULT_CTX = PrecisionCtx()


def to_mpf(x) -> mpf:
    if isinstance(x, mpf):
        return +x
    if isinstance(x, (Fraction, Rational)) and not isinstance(x, int):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def to_mpc(x) -> mpc:
    if isinstance(x, mpc):
        return +x
    if isinstance(x, complex):
        return mpc(x.real, x.imag)
    return mpc(to_mpf(x))


@dataclass(frozen=True)
class QParam:
    """The deformation parameter 0 < q < 1.

    ``value`` is an exact ``Fraction`` when possible (enabling exact
    arithmetic downstream) or an ``mpf`` otherwise.
    """

    value: Union[Fraction, mpf]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        v = self.value
        if isinstance(v, (int, Rational)) and not isinstance(v, Fraction):
            v = Fraction(v)
        elif isinstance(v, float):
            v = Fraction(v)
        elif isinstance(v, str):
            v = Fraction(v.strip())
        elif isinstance(v, mpc):
            raise DomainError("q must be real")
        object.__setattr__(self, "value", v)
        if not (0 < v < 1):
            raise DomainError(f"q must lie strictly between 0 and 1, got {v}")

    @classmethod
    def parse(cls, text: str) -> "QParam":
        """Parse ``"p/r"`` or a decimal; decimals snap to denominator 10**k."""
        try:
            return cls(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse q from {text!r}") from exc

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __str__(self) -> str:
        return str(self.value) if self.exact else mpmath.nstr(self.value, 30)

    def pow(self, k: int) -> "QParam":
        if k < 1:
            raise DomainError("only positive integer powers of q stay in (0,1)")
        return QParam(self.value**k)

    def _cached(self, key: str, fn: Callable[[], mpf]) -> mpf:
        slot = (key, mp.prec)
        hit = self._cache.get(slot)
        if hit is None:
            hit = self._cache[slot] = fn()
        return +hit

    def mp(self) -> mpf:
        return self._cached("q", lambda: to_mpf(self.value))

    @property
    def log_q(self) -> mpf:
        return self._cached("log", lambda: mpmath.log(self.mp()))

    @property
    def one_minus_q_inv(self) -> mpf:
        return self._cached("inv", lambda: 1 / (1 - self.mp()))

    @property
    def l_factor(self) -> mpf:
        return self._cached("L", lambda: (self.mp() - 1) / self.log_q)


def _iroot_exact(n: int, d: int):
    root, ok = gmpy2.iroot(n, d)
    return int(root) if ok else None


def exact_qpow(q: Fraction, x) -> Fraction | None:
    """Return q**x as a Fraction when it is rational, else None."""
    x = Fraction(x)
    if x.denominator == 1:
        return q ** int(x)
    num = _iroot_exact(q.numerator, x.denominator)
    den = _iroot_exact(q.denominator, x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** x.numerator


def qpow(q: QParam, x) -> Fraction | mpf:
    """q**x, exact when possible."""
    if q.exact and isinstance(x, (int, Fraction)):
        exact = exact_qpow(q.value, x)
        if exact is not None:
            return exact
    return q.mp() ** to_mpf(x)


def qbracket(x, q: QParam, ctx: PrecisionCtx = DEFAULT_CTX) -> Fraction | mpf:
    """The q-number (1 - q**x)/(1 - q) for real x >= 0.

    Exact whenever q**x is rational (always, for integer x and rational q).
    """
    if x < 0:
        raise DomainError(f"qbracket requires x >= 0, got {x}")
    if isinstance(x, float):
        x = Fraction(x)
    with ctx.workprec():
        p = qpow(q, x)
        if isinstance(p, Fraction):
            return (1 - p) / (1 - q.value)
        return (1 - p) * q.one_minus_q_inv


def lfactor(q: QParam, ctx: PrecisionCtx = DEFAULT_CTX) -> mpf:
    """L = (q - 1)/log q, the zeroth q-Bernoulli number."""
    with ctx.workprec():
        return q.l_factor


def cpow(base, exponent, ctx: PrecisionCtx = DEFAULT_CTX) -> mpc:
    """base**exponent on the real-log branch; base must be positive."""
    with ctx.workprec():
        b = to_mpf(base)
        if b <= 0:
            raise DomainError(f"cpow requires a positive base, got {b}")
        return mpmath.exp(to_mpc(exponent) * mpmath.log(b))


@functools.lru_cache(maxsize=4096)
def _tail_cutoff(qv: mpf, degree: int, target: mpf, max_terms: int) -> int:
    def ratio(n: int) -> mpf:
        return qv * (mpf(n + 2) / (n + 1)) ** degree

    def bound(n: int) -> mpf:
        rho = ratio(n)
        if rho >= 1:
            return mpmath.inf
        return mpf(n + 1) ** degree * qv**n / (1 - rho)

    # the bound is strictly decreasing once ratio(n) < 1
    lo = 1
    if degree > 0 and ratio(lo) >= 1:
        start = int(1 / (float(1 / qv) ** (1.0 / degree) - 1)) if qv < 1 else max_terms
        lo = max(1, start - 2)
        while lo <= max_terms and ratio(lo) >= 1:
            lo += 1
    if lo > max_terms or bound(max_terms) > target:
        raise TruncationError(
            f"no N <= {max_terms} certifies tail <= {mpmath.nstr(target, 5)}",
            bound(max_terms),
        )
    if bound(lo) <= target:
        return lo
    hi = max_terms
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def tail_cutoff(q, poly_degree: int, target, ctx: PrecisionCtx = DEFAULT_CTX) -> int:
    """Smallest N >= 1 with a closed-form certificate that
    ``sum_{m >= N} (m+1)**poly_degree * q**m <= target``.
    """
    if poly_degree < 0:
        raise DomainError("poly_degree must be non-negative")
    with ctx.workprec():
        t = to_mpf(target)
        if t <= 0:
            raise DomainError("target must be positive")
        qv = q.mp() if isinstance(q, QParam) else to_mpf(q)
        return _tail_cutoff(qv, poly_degree, t, ctx.max_terms)


def certified_sum(
    term: Callable[[int], mpf | mpc],
    ratio: QParam | mpf,
    degree: int,
    scale: mpf,
    ctx: PrecisionCtx,
) -> tuple[mpf | mpc, mpf, int]:
    """Sum ``term(m)`` for m >= 0 given ``|term(m)| <= scale * (m+1)**degree * ratio**m``.

    Returns (value, error_bound, terms_used); must be called inside
    ``ctx.workprec``.  The bound covers the certified tail plus a roundoff
    allowance.
    """
    target = ctx.tail_target
    scale = abs(scale)
    if scale == 0:
        return mpf(0), mpf(0), 0
    n = tail_cutoff(ratio, degree, target / scale, ctx)
    terms = [term(m) for m in range(n)]
    value = mpmath.fsum(terms)
    roundoff = mpmath.fsum(abs(t) for t in terms) * n * mpmath.eps
    return value, target + roundoff, n


@functools.lru_cache(maxsize=256)
def composition_counts(r: int, f: int) -> dict[int, int]:
    """Number of r-tuples in [1, f]**r with each possible total A."""
    if r < 1 or f < 1:
        raise DomainError("composition_counts needs r >= 1 and f >= 1")
    counts = {0: 1}
    for _ in range(r):
        nxt: dict[int, int] = {}
        for total, c in counts.items():
            for a in range(1, f + 1):
                nxt[total + a] = nxt.get(total + a, 0) + c
        counts = nxt
    return dict(sorted(counts.items()))


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def int_log10(x: Fraction | int) -> int:
    """Rough decimal magnitude of a nonzero exact number."""
    x = abs(Fraction(x))
    if x == 0:
        return 0
    return len(str(x.numerator)) - len(str(x.denominator))


def ceil_log10(x: float) -> int:
    return int(math.ceil(math.log10(x))) if x > 0 else 0
