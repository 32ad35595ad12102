"""q-Bernoulli numbers and polynomials, plain, multiple and character-twisted.

Every quantity has at least two independent routes:

* ``beta_q``: the binomial recurrence, or the explicit alternating sum.
* ``beta_q_poly``: binomial expansion over ``beta_q``, or the generating
  series in ``t`` summed with a certified tail.
* ``multi_B``: the r-fold generating series (collapsed by composition
  counting), the binomial shift formula, or a finite "geometric"
  resummation that is exact for rational q.
* ``gen_beta_chi`` / ``multi_gen_beta_chi``: the character-twisted series,
  or closed forms through the base change q -> q^f.

For rational q the non-series routes are carried out in exact arithmetic:
``TowerElem`` for values involving L = (q-1)/log q, ``Fraction`` otherwise,
and ``CycloValue`` once character values enter.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import mpmath
from mpmath import mp, mpc, mpf

from .characters import CycloValue, DirichletCharacter
from .numerics import (
    DEFAULT_CTX,
    DomainError,
    PrecisionCtx,
    QParam,
    certified_sum,
    composition_counts,
    int_log10,
    qbracket,
    qpow,
    to_mpf,
)
from .results import EvalResult

__all__ = [
    "TowerElem",
    "QBernTable",
    "qbern_table",
    "CharacterWarning",
    "beta_q",
    "recurrence_residual",
    "beta_q_poly",
    "multi_B",
    "gen_beta_chi",
    "multi_gen_beta_chi",
]


class CharacterWarning(UserWarning):
    """A closed form was evaluated outside its range of validity."""


@dataclass(frozen=True)
class TowerElem:
    """Exact a + b*L with L = (q-1)/log q for a fixed rational q."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __add__(self, other):
        if isinstance(other, TowerElem):
            return TowerElem(self.a + other.a, self.b + other.b)
        return TowerElem(self.a + Fraction(other), self.b)

    __radd__ = __add__

    def __neg__(self):
        return TowerElem(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, TowerElem):
            if self.b and c.b:
                raise ArithmeticError("L**2 is outside the tower")
            return TowerElem(self.a * c.a, self.a * c.b + self.b * c.a)
        c = Fraction(c)
        return TowerElem(self.a * c, self.b * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return TowerElem(self.a / c, self.b / c)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def realize(self, q: QParam, ctx: PrecisionCtx = DEFAULT_CTX) -> mpf:
        # a and b*L can be huge and nearly cancel near q = 1
        extra = max(int_log10(self.a) if self.a else 0, int_log10(self.b) if self.b else 0, 0) + 10
        with ctx.workprec(extra):
            return to_mpf(self.a) + to_mpf(self.b) * q.l_factor


L_ELEM = TowerElem(Fraction(0), Fraction(1))


class QBernTable:
    """Memoized beta_{0..N,q}: exact towers for rational q, numeric otherwise."""

    def __init__(self, q: QParam):
        self.q = q
        self._rec: list[TowerElem] = [L_ELEM]
        self._numeric: dict[int, list[mpf]] = {}

    def tower(self, n: int) -> TowerElem:
        if not self.q.exact:
            raise DomainError("exact tower values need rational q")
        q = self.q.value
        rec = self._rec
        for m in range(len(rec), n + 1):
            # sum_{k<=m} C(m,k) q^k beta_k - beta_m = delta_{m,1}
            s = sum((rec[k] * (comb(m, k) * q**k) for k in range(m)), TowerElem())
            rhs = TowerElem(Fraction(int(m == 1))) - s
            rec.append(rhs / (q**m - 1))
        return rec[n]

    def numeric(self, n: int) -> mpf:
        """beta_{n,q} at the current working precision."""
        key = mp.prec
        vals = self._numeric.setdefault(key, [])
        if not vals:
            vals.append(self.q.l_factor)
        q = self.q.mp()
        for m in range(len(vals), n + 1):
            s = mpmath.fsum(comb(m, k) * q**k * vals[k] for k in range(m))
            vals.append((int(m == 1) - s) / (q**m - 1))
        return vals[n]


@functools.lru_cache(maxsize=64)
def qbern_table(q: QParam) -> QBernTable:
    return QBernTable(q)


def _explicit_tower(n: int, q: Fraction) -> TowerElem:
    # i = 0 term of i/[i]_q is its limit L
    total = L_ELEM
    for i in range(1, n + 1):
        total += Fraction(comb(n, i) * (-1) ** i * i) * (1 - q) / (1 - q**i)
    return total / (1 - q) ** n


def _explicit_numeric(n: int, q: QParam) -> mpf:
    qm = q.mp()
    terms = [q.l_factor] + [comb(n, i) * (-1) ** i * i * (1 - qm) / (1 - qm**i) for i in range(1, n + 1)]
    return mpmath.fsum(terms) * q.one_minus_q_inv**n


def _cancel_digits(n: int, q: QParam) -> int:
    """Decimal digits lost to cancellation in sums of size (1-q)^-n."""
    return int(math.ceil(n * -math.log10(1 - float(to_mpf(q.value))))) + 5


def beta_q(n: int, q: QParam, route: str = "recurrence", ctx: PrecisionCtx = DEFAULT_CTX):
    """beta_{n,q}: a TowerElem for rational q, an mpf otherwise."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if route not in ("recurrence", "explicit"):
        raise DomainError(f"unknown beta_q route {route!r}")
    if q.exact:
        return qbern_table(q).tower(n) if route == "recurrence" else _explicit_tower(n, q.value)
    with ctx.workprec(_cancel_digits(n, q)):
        return qbern_table(q).numeric(n) if route == "recurrence" else _explicit_numeric(n, q)


def beta_q_value(n: int, q: QParam, route: str = "recurrence", ctx: PrecisionCtx = DEFAULT_CTX) -> mpf:
    v = beta_q(n, q, route, ctx)
    return v.realize(q, ctx) if isinstance(v, TowerElem) else v


def recurrence_residual(n: int, q: QParam) -> TowerElem:
    """sum_k C(n,k) q^k beta_k - beta_n - delta_{n,1}, exactly."""
    table = qbern_table(q)
    qv = q.value
    s = sum((table.tower(k) * (comb(n, k) * qv**k) for k in range(n + 1)), TowerElem())
    return s - table.tower(n) - int(n == 1)


def _beta_poly_tower(n: int, x, q: QParam) -> TowerElem | None:
    if not q.exact:
        return None
    qx = qpow(q, Fraction(x))
    if not isinstance(qx, Fraction):
        return None
    bx = (1 - qx) / (1 - q.value)
    table = qbern_table(q)
    return sum(
        (table.tower(i) * (comb(n, i) * qx**i * bx ** (n - i)) for i in range(n + 1)),
        TowerElem(),
    )


def beta_q_poly(n: int, x, q: QParam, route: str = "binomial", ctx: PrecisionCtx = DEFAULT_CTX, full: bool = False):
    """beta_{n,q}(x) for x >= 0, by binomial expansion or the generating series."""
    if n < 0 or x < 0:
        raise DomainError("need n >= 0 and x >= 0")
    if isinstance(x, float):
        x = Fraction(x)
    if route == "binomial":
        tower = _beta_poly_tower(n, x, q)
        if tower is not None:
            res = EvalResult(tower.realize(q, ctx), mpf(0), "binomial", n + 1, "exact", exact=tower)
        else:
            with ctx.workprec(_cancel_digits(n, q)):
                qx = qpow(q, x)
                bx = qbracket(x, q, ctx)
                table = qbern_table(q)
                val = mpmath.fsum(
                    comb(n, i) * to_mpf(qx) ** i * table.numeric(i) * to_mpf(bx) ** (n - i) for i in range(n + 1)
                )
            res = EvalResult(val, mpf(0), "binomial", n + 1, "certified")
    elif route == "series":
        with ctx.workprec(_cancel_digits(n, q)):
            lead = q.l_factor * q.one_minus_q_inv**n
            if n == 0:
                res = EvalResult(lead, mpf(0), "series", 0, "certified")
            else:
                qm = q.mp()
                qx = to_mpf(qpow(q, x))
                inv = q.one_minus_q_inv

                def term(m: int) -> mpf:
                    p = qx * qm**m
                    return p * ((1 - p) * inv) ** (n - 1)

                s, bound, used = certified_sum(term, q, 0, n * qx * inv ** (n - 1), ctx)
                res = EvalResult(lead - n * s, n * bound, "series", used, "certified")
    else:
        raise DomainError(f"unknown beta_q_poly route {route!r}")
    return res if full else res.value


def _falling(n: int, r: int) -> int:
    return factorial(n) // factorial(n - r)


@functools.lru_cache(maxsize=4096)
def _multi_B_geometric_exact(n: int, r: int, qv: Fraction, qx: Fraction) -> Fraction:
    if n < r:
        return Fraction(0)
    j = n - r
    s = sum(
        Fraction(comb(j, i) * (-1) ** i) * qx ** (i + 1) / (1 - qv ** (i + 1)) ** r for i in range(j + 1)
    )
    return (-1) ** r * _falling(n, r) * s / (1 - qv) ** j


def _multi_B_geometric_numeric(n: int, r: int, q: QParam, qx: mpf) -> mpf:
    if n < r:
        return mpf(0)
    j = n - r
    qm = q.mp()
    s = mpmath.fsum(comb(j, i) * (-1) ** i * qx ** (i + 1) / (1 - qm ** (i + 1)) ** r for i in range(j + 1))
    return (-1) ** r * _falling(n, r) * s * q.one_minus_q_inv**j


def _qx_exact(q: QParam, x) -> Fraction | None:
    if not q.exact or not isinstance(x, (int, Fraction)):
        return None
    v = qpow(q, x)
    return v if isinstance(v, Fraction) else None


def multi_B_exact(n: int, r: int, x, q: QParam, route: str = "binomial", variant: str = "corrected") -> Fraction | None:
    """B^{(r)}_{n,q}(x) as a Fraction when q and q**x are rational, else None."""
    x = Fraction(x)
    qx = _qx_exact(q, x)
    if qx is None:
        return None
    qv = q.value
    if route == "geometric":
        return _multi_B_geometric_exact(n, r, qv, qx)
    if route != "binomial":
        raise DomainError(f"no exact form for route {route!r}")
    if n < r:
        return Fraction(0)
    bx = (1 - qx) / (1 - qv)
    total = Fraction(0)
    for k in range(r, n + 1):
        power = k if variant == "printed" else k - r + 1
        total += comb(n, k) * bx ** (n - k) * qx**power * _multi_B_geometric_exact(k, r, qv, Fraction(1))
    return total


def multi_B(
    n: int,
    r: int,
    x,
    q: QParam,
    route: str = "series",
    ctx: PrecisionCtx = DEFAULT_CTX,
    variant: str = "corrected",
    full: bool = False,
):
    """Multiple q-Bernoulli polynomial B^{(r)}_{n,q}(x).

    ``route="binomial"`` expands around x = 0.  The shift identity carries
    q^{x(k-r+1)}; ``variant="printed"`` uses q^{xk} instead, which is only
    right for r = 1 and is kept to measure the discrepancy.
    """
    if n < 0 or r < 1 or x < 0:
        raise DomainError("need n >= 0, r >= 1, x >= 0")
    if isinstance(x, float):
        x = Fraction(x)
    if n < r:
        res = EvalResult(mpf(0), mpf(0), route, 0, "exact", exact=Fraction(0))
        return res if full else res.value
    if route in ("binomial", "geometric"):
        exact = multi_B_exact(n, r, x, q, route, variant)
        if exact is not None:
            with ctx.workprec():
                res = EvalResult(to_mpf(exact), mpf(0), route, n + 1, "exact", exact=exact)
            return res if full else res.value
        with ctx.workprec(_cancel_digits(n, q) + 5 * r):
            qx = to_mpf(qpow(q, x))
            if route == "geometric":
                val = _multi_B_geometric_numeric(n, r, q, qx)
            else:
                bx = (1 - qx) * q.one_minus_q_inv
                terms = []
                for k in range(r, n + 1):
                    power = k if variant == "printed" else k - r + 1
                    terms.append(comb(n, k) * bx ** (n - k) * qx**power * _multi_B_geometric_numeric(k, r, q, mpf(1)))
                val = mpmath.fsum(terms)
        res = EvalResult(val, mpf(0), route, n + 1, "certified")
        return res if full else res.value
    if route != "series":
        raise DomainError(f"unknown multi_B route {route!r}")
    j = n - r
    with ctx.workprec(_cancel_digits(n, q)):
        qm = q.mp()
        qx = to_mpf(qpow(q, x))
        inv = q.one_minus_q_inv

        def term(s: int) -> mpf:
            p = qx * qm**s
            return comb(s + r - 1, r - 1) * p * ((1 - p) * inv) ** j

        pref = _falling(n, r)
        s, bound, used = certified_sum(term, q, r - 1, pref * qx * inv**j, ctx)
        res = EvalResult((-1) ** r * pref * s, pref * bound, "series", used, "certified")
    return res if full else res.value


def _check_character(chi: DirichletCharacter, route: str) -> tuple[str, ...]:
    flags = []
    if chi.is_principal:
        flags.append("principal")
    elif not chi.primitive:
        flags.append("non-primitive")
    if flags and route == "closed":
        warnings.warn(
            f"closed form for {chi} is only established for nontrivial primitive characters",
            CharacterWarning,
            stacklevel=3,
        )
    return tuple(flags)


def gen_beta_chi_exact(n: int, chi: DirichletCharacter, q: QParam) -> tuple[CycloValue, CycloValue]:
    """Closed form [f]^{n-1} sum_a chi(a) beta_{n,q^f}(a/f) split as (rational part, L_{q^f} part).

    The L part vanishes for nontrivial chi.
    """
    f = chi.modulus
    Q = q.pow(f)
    scale = Fraction(qbracket(f, q)) ** (n - 1)
    rat, lpart = [], []
    for a in range(1, f + 1):
        z = chi(a)
        if z is None:
            continue
        tower = _beta_poly_tower(n, Fraction(a, f), Q)
        rat.append((z, scale * tower.a))
        lpart.append((z, scale * tower.b))
    return CycloValue.from_terms(rat), CycloValue.from_terms(lpart)


def gen_beta_chi(
    n: int,
    chi: DirichletCharacter,
    q: QParam,
    route: str = "series",
    ctx: PrecisionCtx = DEFAULT_CTX,
    full: bool = False,
):
    """Generalized q-Bernoulli number beta_{n,chi,q}."""
    if n < 0:
        raise DomainError("n must be >= 0")
    flags = _check_character(chi, route)
    f = chi.modulus
    if route == "closed":
        if q.exact:
            rat, lpart = gen_beta_chi_exact(n, chi, q)
            extra = max([int_log10(c) for c in rat.coeffs + lpart.coeffs if c] + [0]) + 10
            with ctx.workprec(extra):
                val = rat.to_mpc()
                if not lpart.is_zero():
                    val += lpart.to_mpc() * q.pow(f).l_factor
            exact = rat if lpart.is_zero() else None
            res = EvalResult(val, mpf(0), "closed", n + 1, "exact" if exact is not None else "certified", flags, exact)
        else:
            Q = q.pow(f)
            with ctx.workprec(_cancel_digits(n, q)):
                scale = to_mpf(qbracket(f, q, ctx)) ** (n - 1)
                val = mpc(0)
                for a in range(1, f + 1):
                    if chi(a) is not None:
                        val += chi.value(a) * scale * beta_q_poly(n, Fraction(a, f), Q, "binomial", ctx)
            res = EvalResult(val, mpf(0), "closed", n + 1, "certified", flags)
    elif route == "series":
        if n == 0:
            res = EvalResult(mpc(0), mpf(0), "series", 0, "exact", flags, CycloValue.zero())
        else:
            with ctx.workprec(_cancel_digits(n, q)):
                qm = q.mp()
                qf = qm**f
                inv = q.one_minus_q_inv
                total, bound, used = mpc(0), mpf(0), 0
                for a in range(1, f + 1):
                    if chi(a) is None:
                        continue
                    qa = qm**a

                    def term(m: int) -> mpf:
                        p = qa * qf**m
                        return p * ((1 - p) * inv) ** (n - 1)

                    s, b, u = certified_sum(term, q.pow(f), 0, n * qa * inv ** (n - 1), ctx)
                    total += chi.value(a) * s
                    bound += n * b
                    used += u
                res = EvalResult(-n * total, bound, "series", used, "certified", flags)
    else:
        raise DomainError(f"unknown gen_beta_chi route {route!r}")
    return res if full else res.value


def multi_gen_beta_chi_exact(
    n: int, r: int, chi: DirichletCharacter, q: QParam, variant: str = "corrected"
) -> CycloValue:
    """[F]^{n-r} sum_{A} #(A) chi(A) B^{(r)}_{n,q^F}(A/F) exactly (rational q).

    ``variant="printed"`` scales by [F]^n instead of [F]^{n-r}.
    """
    if not q.exact:
        raise DomainError("exact closed form needs rational q")
    F = chi.modulus
    Q = q.pow(F)
    bF = qbracket(F, q)
    scale = bF ** (n if variant == "printed" else n - r)
    terms = []
    for total, count in composition_counts(r, F).items():
        z = chi(total)
        if z is None:
            continue
        b = multi_B_exact(n, r, Fraction(total, F), Q, "binomial")
        terms.append((z, count * scale * b))
    return CycloValue.from_terms(terms)


def multi_gen_beta_chi(
    n: int,
    r: int,
    chi: DirichletCharacter,
    q: QParam,
    route: str = "series",
    ctx: PrecisionCtx = DEFAULT_CTX,
    variant: str = "corrected",
    full: bool = False,
):
    """Multiple generalized q-Bernoulli number beta^{(r)}_{n,chi,q}.

    The closed route is the base-change formula with exponent n - r on
    [F]_q; ``variant="printed"`` uses exponent n for comparison.
    """
    if n < 0 or r < 1:
        raise DomainError("need n >= 0 and r >= 1")
    flags = _check_character(chi, route)
    if n < r:
        res = EvalResult(mpc(0), mpf(0), route, 0, "exact", flags, CycloValue.zero())
        return res if full else res.value
    F = chi.modulus
    counts = composition_counts(r, F)
    if route == "closed":
        if q.exact:
            exact = multi_gen_beta_chi_exact(n, r, chi, q, variant)
            extra = max([int_log10(c) for c in exact.coeffs if c] + [0]) + 10
            with ctx.workprec(extra):
                res = EvalResult(exact.to_mpc(), mpf(0), "closed", n + 1, "exact", flags, exact)
        else:
            with ctx.workprec(_cancel_digits(n, q) + 5 * r):
                Q = q.pow(F)
                bF = to_mpf(qbracket(F, q, ctx))
                scale = bF ** (n if variant == "printed" else n - r)
                val = mpc(0)
                for total, count in counts.items():
                    if chi(total) is None:
                        continue
                    b = multi_B(n, r, Fraction(total, F), Q, "binomial", ctx)
                    val += chi.value(total) * count * b
                res = EvalResult(val * scale, mpf(0), "closed", n + 1, "certified", flags)
    elif route == "series":
        j = n - r
        pref = _falling(n, r)
        with ctx.workprec(_cancel_digits(n, q)):
            qm = q.mp()
            qF = qm**F
            inv = q.one_minus_q_inv
            total_val, bound, used = mpc(0), mpf(0), 0
            for total, count in counts.items():
                if chi(total) is None:
                    continue
                qa = qm**total

                def term(m: int) -> mpf:
                    p = qa * qF**m
                    return comb(m + r - 1, r - 1) * p * ((1 - p) * inv) ** j

                s, b, u = certified_sum(term, q.pow(F), r - 1, qa * inv**j, ctx)
                total_val += chi.value(total) * count * s
                bound += count * b
                used += u
            res = EvalResult((-1) ** r * pref * total_val, pref * bound, "series", used, "certified", flags)
    else:
        raise DomainError(f"unknown multi_gen_beta_chi route {route!r}")
    return res if full else res.value
