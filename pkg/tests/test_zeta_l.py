from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpc, mpf

from qdirichlet.characters import characters_mod, parse_character
from qdirichlet.numerics import DEFAULT_CTX, DomainError, PoleProximityError, PrecisionCtx, QParam
from qdirichlet.zeta_l import H, L, multi_qzeta

HALF = QParam(Fraction(1, 2))
TOL = PrecisionCtx().identity_tolerance
CHI3, CHI4, CHI5 = (parse_character(s) for s in ("3:1", "4:1", "5:1"))


def agree(a, b, tol=TOL):
    with DEFAULT_CTX.workprec():
        va, vb = mpmath.mpmathify(getattr(a, "value", a)), mpmath.mpmathify(getattr(b, "value", b))
        floor = max(abs(va), mpf(10) ** -DEFAULT_CTX.digits)
        slack = (getattr(a, "error_bound", 0) + getattr(b, "error_bound", 0)) / floor
        return abs(va - vb) / floor <= tol + slack


def brute(terms, n=400):
    """Plain partial sum at 70 digits, used as an independent oracle."""
    with mpmath.workdps(70):
        return mpmath.fsum(terms(m) for m in range(1, n))


class TestZeta:
    def test_spot_value(self):
        for route in ("series", "negint"):
            v = multi_qzeta(1, -1, 1, HALF, route)
            with DEFAULT_CTX.workprec():
                assert abs(v.value - mpf(4) / 3) < mpf(10) ** -45

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_s_zero(self, r):
        x = Fraction(1, 2)
        with DEFAULT_CTX.workprec():
            expected = mpmath.sqrt(mpf(1) / 2) / (mpf(1) / 2) ** r
            assert agree(multi_qzeta(r, 0, x, HALF), expected)

    def test_frozen_negint(self):
        assert multi_qzeta(2, -2, Fraction(1, 2), QParam(Fraction(1, 4)), "negint").exact == Fraction(712832, 893025)

    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("x", [Fraction(1), Fraction(1, 2)])
    @pytest.mark.parametrize("q", ["1/2", "9/10"])
    def test_negint_matches_series(self, r, x, q):
        Q = QParam.parse(q)
        for n in range(1, 5):
            assert agree(multi_qzeta(r, -n, x, Q, "series"), multi_qzeta(r, -n, x, Q, "negint"))

    def test_negint_needs_integer(self):
        with pytest.raises(DomainError):
            multi_qzeta(1, -1.5, 1, HALF, "negint")
        with pytest.raises(DomainError):
            multi_qzeta(1, 2, 0, HALF)

    def test_n_zero_flagged(self):
        assert "n=0" in multi_qzeta(2, 0, 1, HALF, "negint").flags


class TestH:
    def test_trivial_modulus(self):
        for s in (-2, mpc(0.5, 2), 3):
            assert agree(H(1, s, [1], 1, HALF), multi_qzeta(1, s, 1, HALF))

    def test_base_change_brute_force(self):
        lhs = H(1, 2, [1], 4, HALF)
        with mpmath.workdps(70):
            q = mpf(1) / 2
            direct = brute(lambda m: q ** (4 * m - 3) / ((1 - q ** (4 * m - 3)) / (1 - q)) ** 2)
            Q = q**4
            inner = brute(lambda m: Q ** (m - 1 + mpf(1) / 4) / ((1 - Q ** (m - 1 + mpf(1) / 4)) / (1 - Q)) ** 2)
            rhs = ((1 - q**4) / (1 - q)) ** -2 * inner
            assert abs(direct - rhs) < mpf(10) ** -60
        assert agree(lhs, direct)

    def test_frozen_negint(self):
        assert H(2, -1, [1, 2], 3, HALF, "negint").exact == Fraction(1168, 3969)

    @pytest.mark.parametrize("F", [3, 4])
    @pytest.mark.parametrize("q", ["1/2", "9/10"])
    def test_negint_matches_series(self, F, q):
        Q = QParam.parse(q)
        for a in ([1], [F], [1, F - 1], [2, 2, F]):
            for n in range(1, 5):
                assert agree(H(len(a), -n, a, F, Q, "series"), H(len(a), -n, a, F, Q, "negint"))

    @pytest.mark.parametrize("a", [[0], [5], [1, 2, 3]])
    def test_bad_residues(self, a):
        with pytest.raises(DomainError):
            H(2 if len(a) == 3 else 1, -1, a, 4, HALF)

    def test_expansion_refuses_poles(self):
        with pytest.raises(PoleProximityError):
            H(2, 2 + mpf("1e-9"), [1, 1], 4, HALF, "expansion")
        # the series route converges everywhere
        assert H(2, 2, [1, 1], 4, HALF).error_bound < mpf(10) ** -50

    @pytest.mark.parametrize("s", [-2, -0.5, 3.2])
    def test_expansion_benign(self, s):
        ser = H(1, s, [4], 4, HALF)
        exp = H(1, s, [4], 4, HALF, "expansion")
        assert exp.mode == "heuristic"
        with DEFAULT_CTX.workprec():
            assert abs(exp.value - ser.value) <= mpf("1e-6") * abs(ser.value)

    def test_expansion_higher_order(self):
        for s in (-2, 3.2):
            ser = H(3, s, [1, 2, 3], 4, HALF)
            exp = H(3, s, [1, 2, 3], 4, HALF, "expansion")
            with DEFAULT_CTX.workprec():
                assert abs(exp.value - ser.value) <= mpf("1e-30") * abs(ser.value)


class TestL:
    def test_alternating_pattern(self):
        s = mpf("0.7")
        v = L(1, s, CHI4, HALF)
        with mpmath.workdps(70):
            q = mpf(1) / 2
            sign = {1: 1, 3: -1}
            direct = brute(lambda m: sign.get(m % 4, 0) * q**m * ((1 - q**m) / (1 - q)) ** -s)
        assert agree(v, direct)

    def test_frozen_negint(self):
        assert L(1, -2, CHI3, HALF, "negint").exact.as_rational() == Fraction(88, 1533)

    def test_negint_brute_force(self):
        with mpmath.workdps(70):
            q = mpf(1) / 2
            sign = {1: 1, 2: -1}
            direct = brute(lambda m: sign.get(m % 3, 0) * q**m * ((1 - q**m) / (1 - q)) ** 2)
            assert abs(direct - mpf(88) / 1533) < mpf(10) ** -60

    @pytest.mark.parametrize("chi", [CHI3, CHI4, CHI5], ids=["3:1", "4:1", "5:1"])
    @pytest.mark.parametrize("q", ["1/2", "9/10"])
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_interpolation(self, chi, q, r):
        Q = QParam.parse(q)
        for n in range(1, 6):
            assert agree(L(r, -n, chi, Q, "series"), L(r, -n, chi, Q, "negint"))

    @pytest.mark.parametrize("s", [mpc(-0.5, 1.5), mpf("3.2")])
    @pytest.mark.parametrize("r", [1, 2])
    def test_decomposition(self, s, r):
        assert agree(L(r, s, CHI5, HALF, "series"), L(r, s, CHI5, HALF, "decomposition"))

    @given(st.floats(-4, 6, allow_nan=False), st.sampled_from(["3:1", "4:1", "8:1", "12:3"]))
    @settings(max_examples=15)
    def test_real_character_real_values(self, s, spec):
        chi = parse_character(spec)
        if all(chi(a) is None or chi(a).angle in (0, Fraction(1, 2)) for a in range(chi.modulus)):
            v = L(2, s, chi, HALF).value
            with DEFAULT_CTX.workprec():
                assert abs(v.imag) <= PrecisionCtx().route_tolerance * max(abs(v), 1)

    def test_doubling_changes_nothing(self):
        ctx = DEFAULT_CTX
        for s in (-3, mpc(0.25, 4), 2.5):
            v = L(2, s, CHI5, HALF, ctx=ctx)
            with ctx.workprec():
                q = mpf(1) / 2
                N = 2 * v.terms_used
                sv = mpmath.mpmathify(s)
                longer = mpmath.fsum(
                    (m - 1) * (CHI5.value(m) if CHI5(m) is not None else 0) * q**m * ((1 - q**m) / (1 - q)) ** -sv
                    for m in range(2, N)
                )
                assert abs(longer - v.value) <= mpf(10) ** -ctx.digits

    def test_principal_flag(self):
        assert "principal" in L(1, 2, characters_mod(5)[0], HALF).flags
        assert "non-primitive" in L(1, 2, parse_character("8:2"), HALF).flags

    def test_expansion_l_blocks_at_negative_integer(self):
        # at s = -2 every block expansion terminates, so agreement is to working precision
        ser = L(1, -2, CHI4, HALF)
        exp = L(1, -2, CHI4, HALF, "expansion")
        with DEFAULT_CTX.workprec():
            assert abs(ser.value - exp.value) <= mpf(10) ** -40 * abs(ser.value)
