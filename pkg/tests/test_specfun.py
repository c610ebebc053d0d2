"""Oracle and refinement tests for the transcendental enclosures.

mpmath (at 60 decimal digits) serves as the independent oracle for every
transcendental value; sympy checks the exact rational identities.
"""

import math
from fractions import Fraction

import mpmath
import pytest
import sympy

from covcert.rigor import Interval
from covcert import specfun as sf

mpmath.mp.dps = 60

PREC = 160


def _contains_mp(iv: Interval, value: "mpmath.mpf") -> bool:
    return mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= value <= mpmath.mpf(
        iv.hi.numerator
    ) / iv.hi.denominator


# ---------------------------------------------------------------------------
# exact rational layers


def test_bernoulli_against_sympy():
    for n in range(0, 40):
        expected = Fraction(sympy.Rational(sympy.bernoulli(n)))
        if n == 1:
            # recent sympy uses the B(1) = +1/2 convention; ours is -1/2
            assert sf.bernoulli_number(n) == -expected
        else:
            assert sf.bernoulli_number(n) == expected


def test_zeta_even_exact_small_values():
    assert sf.zeta_even_exact(1) == Fraction(1, 6)
    assert sf.zeta_even_exact(2) == Fraction(1, 90)
    assert sf.zeta_even_exact(3) == Fraction(1, 945)


def test_zeta_even_exact_against_sympy():
    x = sympy.symbols("x")
    for j in range(1, 12):
        expected = sympy.zeta(2 * j) / sympy.pi ** (2 * j)
        assert sf.zeta_even_exact(j) == Fraction(sympy.Rational(expected))


def test_generalized_bernoulli_L_coeff():
    # L(2, chi_5) = (4/125) pi^2 sqrt(5)
    assert sf.dirichlet_L_even_coeff(5, 1) == Fraction(4, 125)


def test_bernoulli_polynomial_identities():
    # B_n(0) equals the Bernoulli number
    for n in range(0, 10):
        assert sf.bernoulli_polynomial(n, Fraction(0)) == sf.bernoulli_number(n)
    # B_2(x) = x^2 - x + 1/6
    assert sf.bernoulli_polynomial(2, Fraction(1, 3)) == Fraction(1, 9) - Fraction(
        1, 3
    ) + Fraction(1, 6)


def test_kronecker_symbol_against_sympy():
    from sympy import jacobi_symbol

    for a in range(-30, 31):
        for n in range(1, 30, 2):  # odd n: Kronecker == Jacobi
            assert sf.kronecker_symbol(a, n) == jacobi_symbol(a, n)


def test_dirichlet_character_is_kronecker():
    for D in sf.SUPPORTED_L_MODULI:
        values = [sf.dirichlet_character(D, k) for k in range(1, D + 1)]
        # multiplicative, period D, trivial exactly on residues coprime to D
        for k in range(1, D + 1):
            assert sf.dirichlet_character(D, k + D) == values[k - 1]
            if math.gcd(k, D) > 1:
                assert values[k - 1] == 0


# ---------------------------------------------------------------------------
# mpmath oracles for the transcendental enclosures


def test_pi_enclosure_oracle():
    iv = sf.pi_enclosure(PREC)
    assert _contains_mp(iv, mpmath.pi)
    assert iv.width() < Fraction(1, 2**150)


@pytest.mark.parametrize(
    "r",
    [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 3), Fraction(-147),
     Fraction(46, 100), Fraction(25, 7), Fraction(-2949, 20)],
)
def test_exp_oracle(r):
    iv = sf._exp_point(r, PREC)
    value = mpmath.exp(mpmath.mpf(r.numerator) / r.denominator)
    assert _contains_mp(iv, value)
    assert iv.width() / iv.lo < Fraction(1, 2**130)


@pytest.mark.parametrize(
    "r", [Fraction(2), Fraction(1, 2), Fraction(5760), Fraction(3, 7),
          Fraction(2689, 125), Fraction(10**12), Fraction(1, 10**12)]
)
def test_log_oracle(r):
    iv = sf._log_point(r, PREC)
    value = mpmath.log(mpmath.mpf(r.numerator) / r.denominator)
    assert _contains_mp(iv, value)


def test_log_of_nonpositive_rejected():
    with pytest.raises(sf.LogOfNonPositive):
        sf._log_point(Fraction(0), PREC)
    with pytest.raises(sf.LogOfNonPositive):
        sf.log_enclosure(Interval(-1, 1), PREC)


def test_sqrt_oracle():
    for r in (Fraction(2), Fraction(5), Fraction(49), Fraction(3, 11)):
        iv = sf.sqrt_enclosure(Interval.exact(r), PREC)
        assert _contains_mp(iv, mpmath.sqrt(mpmath.mpf(r.numerator) / r.denominator))
    assert sf.sqrt_enclosure(Interval.exact(49), PREC).contains(7)


def test_sqrt_negative_rejected():
    with pytest.raises(sf.NonPositiveArgument):
        sf.sqrt_enclosure(Interval(-2, -1), PREC)


@pytest.mark.parametrize(
    "x", [Fraction(1, 2), Fraction(3), Fraction(11, 10), Fraction(16, 10),
          Fraction(299, 100), Fraction(25, 2)]
)
def test_gamma_oracle(x):
    iv = sf.gamma_enclosure(Interval.exact(x), PREC)
    value = mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator)
    assert _contains_mp(iv, value)


def test_gamma_half_is_sqrt_pi():
    g = sf.gamma_enclosure(Interval.exact(Fraction(1, 2)), PREC)
    sqrt_pi = sf.sqrt_enclosure(sf.pi_enclosure(PREC), PREC)
    g.intersect(sqrt_pi)  # raises if disjoint


def test_gamma_recurrence_containment():
    # Gamma(x+1) = x Gamma(x) on interval arguments
    for lo, hi in ((Fraction(3, 2), Fraction(8, 5)), (Fraction(3), Fraction(13, 4))):
        x = Interval(lo, hi)
        lhs = sf.gamma_enclosure(x + Interval.exact(1), PREC)
        rhs = x * sf.gamma_enclosure(x, PREC)
        lhs.intersect(rhs)


def test_gamma_interval_spanning_minimum():
    # interval straddling the minimum of Gamma keeps a sound floor
    iv = sf.gamma_enclosure(Interval(Fraction(14, 10), Fraction(15, 10)), PREC)
    minimum = mpmath.gamma(1.4616321449683623)
    assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= minimum
    assert iv.lo > Fraction(8, 10)


@pytest.mark.parametrize(
    "s", [Fraction(2), Fraction(4), Fraction(11, 5), Fraction(599, 100),
          Fraction(3, 2), Fraction(21, 2)]
)
def test_zeta_oracle(s):
    iv = sf.zeta_real_enclosure(Interval.exact(s), PREC)
    assert _contains_mp(iv, mpmath.zeta(mpmath.mpf(s.numerator) / s.denominator))


def test_zeta_requires_argument_above_one():
    with pytest.raises(sf.ArgumentNotGreaterThanOne):
        sf.zeta_real_enclosure(Interval.exact(1), PREC)


def test_zeta_cross_consistency_even_integers():
    """Euler-Maclaurin route intersects the exact pi-power route, j <= 10."""
    pi_iv = sf.pi_enclosure(PREC)
    for j in range(1, 11):
        em = sf.zeta_real_enclosure(Interval.exact(2 * j), PREC)
        exact = Interval.exact(sf.zeta_even_exact(j)) * pi_iv.pow_int(2 * j)
        em.intersect(exact)


def test_hurwitz_oracle():
    for s, a in ((Fraction(2), Fraction(1, 5)), (Fraction(4), Fraction(3, 8)),
                 (Fraction(11, 5), Fraction(7, 12))):
        iv = sf._hurwitz_point(s, a, PREC)
        value = mpmath.zeta(
            mpmath.mpf(s.numerator) / s.denominator,
            mpmath.mpf(a.numerator) / a.denominator,
        )
        assert _contains_mp(iv, value)


@pytest.mark.parametrize("D", sf.SUPPORTED_L_MODULI)
def test_dirichlet_L_oracle(D):
    s = Fraction(2)
    iv = sf.dirichlet_L_enclosure(D, Interval.exact(s), PREC)
    chi = [sf.dirichlet_character(D, k) for k in range(1, D + 1)]
    value = mpmath.mpf(D) ** (-2) * mpmath.fsum(
        chi[a - 1] * mpmath.zeta(2, mpmath.mpf(a) / D) for a in range(1, D + 1)
    )
    assert _contains_mp(iv, value)


def test_dirichlet_L_even_exact_cross_check():
    # interval route intersects the exact coefficient route at s = 2, 4
    pi_iv = sf.pi_enclosure(PREC)
    for D in (5, 8):
        sqrt_D = sf.sqrt_enclosure(Interval.exact(D), PREC)
        for j in (1, 2):
            iv = sf.dirichlet_L_enclosure(D, Interval.exact(2 * j), PREC)
            exact = (
                Interval.exact(sf.dirichlet_L_even_coeff(D, j))
                * pi_iv.pow_int(2 * j)
                * sqrt_D
            )
            iv.intersect(exact)


def test_unsupported_modulus_rejected():
    with pytest.raises(sf.UnsupportedModulus):
        sf.dirichlet_L_enclosure(7, Interval.exact(2), PREC)


def test_alpha_oracle():
    iv = sf.alpha_enclosure(Interval.exact(Fraction(599, 100)), PREC)
    s = mpmath.mpf("5.99")
    value = mpmath.pi ** (s / 2) / (mpmath.gamma(s / 2) * mpmath.zeta(s))
    assert _contains_mp(iv, value)
    assert abs(iv.midpoint() - Fraction("15.2199430285")) < Fraction(1, 10**9)


def test_stirling_brackets_factorials():
    """The factorial bracketing encloses n! exactly for n <= 100."""
    for n in range(1, 101):
        lo, hi = sf.stirling_bounds(n, 96)
        fact = math.factorial(n)
        assert lo.hi < fact < hi.lo or (lo.hi <= fact <= hi.lo)


def test_exp_log_roundtrip():
    x = Interval(Fraction(3, 2), Fraction(8, 5))
    back = sf.log_enclosure(sf.exp_enclosure(x, PREC), PREC)
    assert x.subset_of(back)


# ---------------------------------------------------------------------------
# refinement never widens


def _refinement_cases():
    yield lambda p: sf.pi_enclosure(p)
    yield lambda p: sf._exp_point(Fraction(46, 100), p)
    yield lambda p: sf._exp_point(Fraction(-2949, 20), p)
    yield lambda p: sf._log_point(Fraction(2689, 125), p)
    yield lambda p: sf.sqrt_enclosure(Interval.exact(5), p)
    yield lambda p: sf.gamma_enclosure(Interval.exact(Fraction(11, 10)), p)
    yield lambda p: sf.zeta_real_enclosure(Interval.exact(Fraction(11, 5)), p)
    yield lambda p: sf._hurwitz_point(Fraction(2), Fraction(1, 5), p)
    yield lambda p: sf.dirichlet_L_enclosure(5, Interval.exact(2), p)
    yield lambda p: sf.alpha_enclosure(Interval.exact(Fraction(22, 10)), p)
    yield lambda p: sf.rational_pow_point(Fraction(5), Fraction(21, 2), p)


@pytest.mark.parametrize("make", list(_refinement_cases()))
def test_refinement_never_widens(make):
    previous = None
    for prec in (64, 96, 128, 192, 256):
        current = make(prec)
        if previous is not None:
            assert current.subset_of(previous), prec
        previous = current


def test_point_cache_intersection_is_sound():
    sf._clear_point_cache()
    wide = sf._exp_point(Fraction(1), 64)
    narrow = sf._exp_point(Fraction(1), 256)
    assert narrow.subset_of(wide)
    assert _contains_mp(narrow, mpmath.e)
