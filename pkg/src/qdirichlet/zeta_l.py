"""Multiple q-zeta, partial zeta H and the multiple Dirichlet q-L-function.

Series routes converge for every complex s because 0 < q < 1, so they are
the ground truth.  ``negint`` routes go through the exact q-Bernoulli closed
forms; ``expansion`` routes sum a binomial expansion in powers of
[F]_q/[A]_q with the smallest-term rule and are only ever heuristic.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from .characters import DirichletCharacter
from .numerics import (
    DEFAULT_CTX,
    DomainError,
    PoleProximityError,
    PrecisionCtx,
    QParam,
    composition_counts,
    qbracket,
    qpow,
    tail_cutoff,
    to_mpc,
    to_mpf,
)
from .qbernoulli import _cancel_digits, multi_B, multi_B_exact, multi_gen_beta_chi
from .results import EvalResult

__all__ = ["EvalResult", "LParams", "as_s", "negative_integer", "multi_qzeta", "H", "L"]

EXPANSION_MAX_TERMS = 400


def as_s(s) -> mpc:
    if isinstance(s, str):
        s = complex(s.replace(" ", "").replace("i", "j"))
    return to_mpc(s)


def negative_integer(s) -> int | None:
    """n if s == -n for an integer n >= 0, else None."""
    if isinstance(s, (int, Fraction)):
        v = Fraction(s)
        return int(-v) if v.denominator == 1 and v <= 0 else None
    z = as_s(s)
    if z.imag != 0 or z.real > 0 or z.real != mpmath.floor(z.real):
        return None
    return int(-z.real)


class LParams:
    """Bundle of the arguments of L_q^r(s, chi)."""

    def __init__(self, r: int, s, chi: DirichletCharacter, q: QParam):
        if r < 1:
            raise DomainError("r must be >= 1")
        self.r, self.s, self.chi, self.q = r, as_s(s), chi, q

    def __repr__(self) -> str:
        return f"LParams(r={self.r}, s={self.s}, chi={self.chi.spec}, q={self.q})"


def _power_factory(s: mpc):
    """Return f(b) = b**(-s) for b > 0, using real arithmetic when s is real."""
    if s.imag == 0:
        sr = s.real
        return lambda b: b ** (-sr)
    return lambda b: mpmath.exp(-s * mpmath.log(b))


def _bracket_bound(s: mpc, lower: mpf, upper: mpf) -> mpf:
    """sup |b**(-s)| over lower <= b <= upper."""
    re = s.real
    return upper ** (-re) if re <= 0 else lower ** (-re)


def _shifted_zeta_sum(r: int, s: mpc, qx: mpf, q: QParam, ctx: PrecisionCtx):
    """sum_{M>=0} C(M+r-1, r-1) p_M [.]^(-s) with p_M = q^x q^M, [.] = (1-p_M)/(1-q)."""
    qm = q.mp()
    inv = q.one_minus_q_inv
    power = _power_factory(s)
    lower = (1 - qx) * inv
    scale = qx * _bracket_bound(s, lower, inv)
    n = tail_cutoff(q, r - 1, ctx.tail_target / scale, ctx)
    terms = []
    p = qx
    for m in range(n):
        terms.append(comb(m + r - 1, r - 1) * p * power((1 - p) * inv))
        p *= qm
    value = mpmath.fsum(terms)
    roundoff = mpmath.fsum(abs(t) for t in terms) * n * mpmath.eps
    return to_mpc(value), ctx.tail_target + roundoff, n


def _flags(chi: DirichletCharacter) -> tuple[str, ...]:
    if chi.is_principal:
        return ("principal",)
    if not chi.primitive:
        return ("non-primitive",)
    return ()


def multi_qzeta(r: int, s, x, q: QParam, route: str = "series", ctx: PrecisionCtx = DEFAULT_CTX) -> EvalResult:
    """zeta_{r,q}(s, x) = sum_{n_1..n_r >= 0} q^{N+x} / [N+x]_q^s with N = n_1 + ... + n_r."""
    if r < 1:
        raise DomainError("r must be >= 1")
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    if isinstance(x, float):
        x = Fraction(x)
    if route == "series":
        with ctx.workprec():
            sv = as_s(s)
            qx = to_mpf(qpow(q, x))
            val, bound, used = _shifted_zeta_sum(r, sv, qx, q, ctx)
        return EvalResult(val, bound, "series", used, "certified")
    if route == "negint":
        n = negative_integer(s)
        if n is None:
            raise DomainError(f"negint route needs s = -n with integer n >= 0, got {s}")
        flags = ("n=0",) if n == 0 else ()
        coef = Fraction((-1) ** r * factorial(n), factorial(n + r))
        exact = multi_B_exact(n + r, r, x, q, "binomial")
        with ctx.workprec(_cancel_digits(n + r, q)):
            if exact is not None:
                return EvalResult(to_mpc(coef * exact), mpf(0), "negint", n + r + 1, "exact", flags, coef * exact)
            b = multi_B(n + r, r, x, q, "binomial", ctx)
            return EvalResult(to_mpc(to_mpf(coef) * b), mpf(0), "negint", n + r + 1, "certified", flags)
    raise DomainError(f"unknown multi_qzeta route {route!r}")


def _check_pole(r: int, s: mpc, ctx: PrecisionCtx) -> None:
    for j in range(1, r + 1):
        if abs(s - j) < ctx.pole_radius:
            raise PoleProximityError(f"s = {mpmath.nstr(s, 10)} lies within {ctx.pole_radius} of the pole s = {j}")


def _smallest_term_sum(terms_iter, finite: bool, ctx: PrecisionCtx) -> tuple[mpc, mpf, int]:
    """Sum an expansion by the smallest-term rule; returns (value, estimate, terms)."""
    partial = mpc(0)
    best, best_k, best_partial = None, 0, mpc(0)
    k = -1
    for k, t in enumerate(terms_iter):
        mag = abs(t)
        if finite:
            partial += t
            continue
        if t == 0 and best is None:
            # leading coefficients below order r vanish identically
            continue
        if best is None or mag < best:
            best, best_k, best_partial = mag, k, partial
        partial += t
        if mag <= ctx.tail_target * abs(partial):
            return partial, mag, k + 1
        if k - best_k >= 8:
            # terms have grown for a while: stop before the smallest one
            return best_partial, best, best_k
    if finite:
        return partial, mpf(0), k + 1
    return best_partial, (best if best is not None else mpf(0)), best_k


def _H_expansion_A(
    r: int, s: mpc, A: int, F: int, q: QParam, ctx: PrecisionCtx, variant: str
) -> tuple[mpc, mpf, int]:
    """Binomial expansion of H for total A, in powers of ([F]_q/[A]_q) q^A.

    The corrected form uses B^{(r)}_{k, q^F} and an extra factor q^{A(1-r)};
    the printed form uses B^{(r)}_{k, q} and omits that factor.
    """
    _check_pole(r, s, ctx)
    base = q if variant == "printed" else q.pow(F)
    bA = to_mpf(qbracket(A, q, ctx))
    bF = to_mpf(qbracket(F, q, ctx))
    z = bF / bA * to_mpf(qpow(q, A))
    alpha = r - s
    pref = mpmath.exp(alpha * mpmath.log(bA)) / bF**r / mpmath.fprod([s - j for j in range(1, r + 1)])
    if variant != "printed":
        pref *= to_mpf(qpow(q, A)) ** (1 - r)
    finite = alpha.imag == 0 and alpha.real >= 0 and alpha.real == mpmath.floor(alpha.real)
    limit = int(alpha.real) + 1 if finite else min(EXPANSION_MAX_TERMS, ctx.max_terms)

    def terms():
        c = mpc(1)
        zk = mpf(1)
        for k in range(limit):
            if k >= r:
                exact = multi_B_exact(k, r, 0, base, "geometric") if k <= 40 else None
                bk = to_mpf(exact) if exact is not None else multi_B(k, r, 0, base, "series", ctx)
                yield c * zk * bk
            else:
                yield mpc(0)
            c = c * (alpha - k) / (k + 1)
            zk *= z

    value, estimate, used = _smallest_term_sum(terms(), finite, ctx)
    return pref * value, abs(pref) * estimate, used


def _H_series_A(r: int, s: mpc, A: int, F: int, q: QParam, ctx: PrecisionCtx) -> tuple[mpc, mpf, int]:
    # [F]^{-s} zeta_{r, q^F}(s, A/F)
    Q = q.pow(F)
    bF = to_mpf(qbracket(F, q, ctx))
    scale = mpmath.exp(-s * mpmath.log(bF))
    val, bound, used = _shifted_zeta_sum(r, s, to_mpf(qpow(q, A)), Q, ctx)
    return scale * val, abs(scale) * bound, used


def _validate_a(r: int, a: Sequence[int], F: int) -> int:
    if F < 1:
        raise DomainError("F must be >= 1")
    if len(a) != r:
        raise DomainError(f"need exactly r = {r} residues, got {len(a)}")
    if any(not 1 <= ai <= F for ai in a):
        raise DomainError(f"residues must lie in [1, F] = [1, {F}], got {list(a)}")
    return sum(a)


def H(
    r: int,
    s,
    a: Sequence[int],
    F: int,
    q: QParam,
    route: str = "series",
    ctx: PrecisionCtx = DEFAULT_CTX,
    variant: str = "corrected",
) -> EvalResult:
    """Partial zeta H_{r,q}(s; a_1..a_r | F): the sum over m_i > 0, m_i = a_i mod F."""
    if r < 1:
        raise DomainError("r must be >= 1")
    A = _validate_a(r, a, F)
    sv = as_s(s)
    if route == "series":
        with ctx.workprec():
            val, bound, used = _H_series_A(r, sv, A, F, q, ctx)
        return EvalResult(val, bound, "series", used, "certified")
    if route == "negint":
        n = negative_integer(s)
        if n is None:
            raise DomainError(f"negint route needs s = -n with integer n >= 0, got {s}")
        flags = ("n=0",) if n == 0 else ()
        bF = qbracket(F, q, ctx)
        coef = Fraction((-1) ** r * factorial(n), factorial(n + r))
        Q = q.pow(F)
        exact = multi_B_exact(n + r, r, Fraction(A, F), Q, "binomial")
        with ctx.workprec(_cancel_digits(n + r, q)):
            if exact is not None and isinstance(bF, Fraction):
                v = bF**n * coef * exact
                return EvalResult(to_mpc(v), mpf(0), "negint", n + r + 1, "exact", flags, v)
            b = multi_B(n + r, r, Fraction(A, F), Q, "binomial", ctx)
            return EvalResult(to_mpc(to_mpf(bF) ** n * to_mpf(coef) * b), mpf(0), "negint", n + r + 1, "certified", flags)
    if route == "expansion":
        with ctx.workprec(10):
            val, est, used = _H_expansion_A(r, sv, A, F, q, ctx, variant)
        return EvalResult(val, est, "expansion", used, "heuristic", (variant,))
    raise DomainError(f"unknown H route {route!r}")


def L(
    r: int,
    s,
    chi: DirichletCharacter,
    q: QParam,
    route: str = "series",
    ctx: PrecisionCtx = DEFAULT_CTX,
    variant: str = "corrected",
) -> EvalResult:
    """Multiple Dirichlet q-L-function L_q^r(s, chi).

    The defining series groups the tuples n_i >= 1 by their total m, which
    carries weight C(m-1, r-1).
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    sv = as_s(s)
    flags = _flags(chi)
    F = chi.modulus
    if route == "series":
        with ctx.workprec():
            qm = q.mp()
            inv = q.one_minus_q_inv
            power = _power_factory(sv)
            scale = qm * _bracket_bound(sv, mpf(1), inv)
            n = tail_cutoff(q, r - 1, ctx.tail_target / scale, ctx)
            classes: dict[int, list] = {}
            p = qm
            for m in range(1, n + 1):
                c = m % F
                if chi.angle(c) is not None and m >= r:
                    classes.setdefault(c, []).append(comb(m - 1, r - 1) * p * power((1 - p) * inv))
                p *= qm
            total = mpc(0)
            roundoff = mpf(0)
            for c, terms in sorted(classes.items()):
                total += chi.value(c) * mpmath.fsum(terms)
                roundoff += mpmath.fsum(abs(t) for t in terms)
            bound = ctx.tail_target + roundoff * n * mpmath.eps
        return EvalResult(total, bound, "series", n, "certified", flags)
    counts = composition_counts(r, F)
    if route == "decomposition":
        with ctx.workprec():
            total, bound, used = mpc(0), mpf(0), 0
            for A, count in counts.items():
                if chi(A) is None:
                    continue
                v, b, u = _H_series_A(r, sv, A, F, q, ctx)
                total += chi.value(A) * count * v
                bound += count * b
                used += u
        return EvalResult(total, bound, "decomposition", used, "certified", flags)
    if route == "negint":
        n = negative_integer(s)
        if n is None:
            raise DomainError(f"negint route needs s = -n with integer n >= 0, got {s}")
        if n == 0:
            flags += ("n=0",)
        coef = Fraction((-1) ** r * factorial(n), factorial(n + r))
        beta = multi_gen_beta_chi(n + r, r, chi, q, "closed", ctx, full=True)
        with ctx.workprec(_cancel_digits(n + r, q)):
            if beta.exact is not None:
                exact = beta.exact * coef
                return EvalResult(exact.to_mpc(), mpf(0), "negint", beta.terms_used, "exact", flags, exact)
            return EvalResult(beta.value * to_mpf(coef), mpf(0), "negint", beta.terms_used, "certified", flags)
    if route == "expansion":
        with ctx.workprec(10):
            total, est, used = mpc(0), mpf(0), 0
            for A, count in counts.items():
                if chi(A) is None:
                    continue
                v, e, u = _H_expansion_A(r, sv, A, F, q, ctx, variant)
                total += chi.value(A) * count * v
                est += count * e
                used += u
        return EvalResult(total, est, "expansion", used, "heuristic", flags + (variant,))
    raise DomainError(f"unknown L route {route!r}")
