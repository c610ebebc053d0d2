"""Certified enclosures of the transcendental functions the bounds need.

Provides pi, exp, log, sqrt, Gamma, the Riemann and Hurwitz zeta functions,
real Dirichlet L-functions, and the Robbins factorial brackets.  Every
routine returns an :class:`~covcert.rigor.Interval` that provably contains
the exact value: series are truncated with explicit remainder bounds, and
all intermediate arithmetic is outward-rounded interval arithmetic.

Point evaluations are memoized through a refinement cache: asking for more
precision re-evaluates the series at a higher working precision and
intersects with the previous enclosure, so increasing precision never widens
any result.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Tuple

from .rigor import Interval, Rational, coarsen_relative

GUARD_BITS = 16

SUPPORTED_L_MODULI = (5, 8, 12, 13, 17, 21, 24)


class LogOfNonPositive(ValueError):
    """log requested of an interval touching (-inf, 0]."""


class NonPositiveArgument(ValueError):
    """Gamma (or sqrt) requested outside its supported domain."""


class ArgumentNotGreaterThanOne(ValueError):
    """zeta/L requested at or below the abscissa of convergence."""


class UnsupportedModulus(ValueError):
    """Dirichlet L requested for a modulus outside the catalog."""


# ---------------------------------------------------------------------------
# refinement cache for point enclosures


_POINT_CACHE: Dict[tuple, Tuple[int, Interval]] = {}


def _cached_point(key: tuple, prec: int, compute: Callable[[int], Interval]) -> Interval:
    """Memoized point enclosure with guaranteed refinement nesting.

    ``compute(q)`` must return an enclosure of the same exact real number for
    any working precision q.  The cache keeps the narrowest core seen so far
    (intersection of recomputations), so results at higher precision are
    always subsets of results at lower precision.
    """
    needed = prec + GUARD_BITS
    entry = _POINT_CACHE.get(key)
    if entry is None or entry[0] < needed:
        q = max(needed, 2 * entry[0] if entry else 0, 128)
        core = compute(q)
        if entry is not None:
            core = core.intersect(entry[1])
        entry = (q, core)
        _POINT_CACHE[key] = entry
    return coarsen_relative(entry[1], prec + 8)


def _clear_point_cache() -> None:
    """Test hook: reset memoized enclosures."""
    _POINT_CACHE.clear()


# ---------------------------------------------------------------------------
# Bernoulli numbers and exact even zeta values


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    # sum_{j=0}^{n} C(n+1, j) B_j = 0
    acc = Fraction(0)
    for j in range(n):
        acc += math.comb(n + 1, j) * bernoulli_number(j)
    return -acc / (n + 1)


def zeta_even_exact(j: int) -> Fraction:
    """Exact rational c with zeta(2j) = c * pi^(2j)."""
    if not 1 <= j <= 64:
        raise ValueError("zeta_even_exact supports 1 <= j <= 64")
    k = 2 * j
    c = (-1) ** (j + 1) * bernoulli_number(k) * Fraction(2 ** (k - 1), math.factorial(k))
    return Fraction(c)


# ---------------------------------------------------------------------------
# pi, ln 2, e


def _atan_inv_core(x: int, q: int) -> Interval:
    """Enclosure of arctan(1/x) for integer x >= 2 (alternating series)."""
    threshold = Fraction(1, 1 << (q + 16))
    acc = Fraction(0)
    k = 0
    while True:
        term = Fraction((-1) ** k, (2 * k + 1) * x ** (2 * k + 1))
        acc += term
        k += 1
        nxt = Fraction(1, (2 * k + 1) * x ** (2 * k + 1))
        if nxt < threshold:
            return Interval(acc - nxt, acc + nxt)


def pi_enclosure(precision_bits: int) -> Interval:
    """Interval containing pi, width <= 2^(-precision_bits + 4)."""
    if precision_bits < 16:
        raise ValueError("precision_bits must be >= 16")

    def compute(q: int) -> Interval:
        a5 = _atan_inv_core(5, q)
        a239 = _atan_inv_core(239, q)
        sixteen = Interval.exact(16)
        four = Interval.exact(4)
        return (sixteen * a5 - four * a239).coarsen(q + 8)

    return _cached_point(("pi",), precision_bits, compute)


def _ln2(prec: int) -> Interval:
    def compute(q: int) -> Interval:
        # 2 atanh(1/3) = 2 sum u^(2j+1)/(2j+1), u = 1/3
        threshold = Fraction(1, 1 << (q + 16))
        acc = Fraction(0)
        j = 0
        while True:
            acc += Fraction(2, (2 * j + 1) * 3 ** (2 * j + 1))
            j += 1
            tail = Fraction(2, (2 * j + 1) * 3 ** (2 * j + 1)) * Fraction(9, 8)
            if tail < threshold:
                return Interval(acc, acc + tail)

    return _cached_point(("ln2",), prec, compute)


def _euler_e(prec: int) -> Interval:
    def compute(q: int) -> Interval:
        threshold = Fraction(1, 1 << (q + 16))
        acc = Fraction(0)
        term = Fraction(1)
        k = 0
        while True:
            acc += term
            k += 1
            term /= k
            if 2 * term < threshold:
                return Interval(acc, acc + 2 * term)

    return _cached_point(("e",), prec, compute)


# ---------------------------------------------------------------------------
# exp and log at rational points


def _exp_point(r: Fraction, prec: int) -> Interval:
    def compute(q: int) -> Interval:
        work = q + 32
        n = (2 * r.numerator + r.denominator) // (2 * r.denominator)  # round
        f = r - n
        # series sum f^k / k!, |f| <= 1/2, tail <= 2 |next term|
        threshold = Fraction(1, 1 << (q + 16))
        term = Interval.exact(1)
        acc = Interval.exact(1)
        f_iv = Interval.exact(f).coarsen(work)
        k = 0
        while True:
            k += 1
            term = (term * f_iv).coarsen(work)
            term = Interval(term.lo / k, term.hi / k)
            acc = (acc + term).coarsen(work)
            bound = max(abs(term.lo), abs(term.hi))
            if bound * 2 < threshold:
                acc = acc + Interval(-2 * bound, 2 * bound)
                break
        if n != 0:
            acc = acc * _euler_e(q).pow_int(int(n))
        return coarsen_relative(acc, q + 8)

    return _cached_point(("exp", r), prec, compute)


def _log_point(r: Fraction, prec: int) -> Interval:
    if r <= 0:
        raise LogOfNonPositive(f"log of non-positive point {r}")

    def compute(q: int) -> Interval:
        work = q + 32
        k = r.numerator.bit_length() - r.denominator.bit_length()
        m = r / Fraction(2) ** k  # m in [1/2, 2)
        if m > Fraction(4, 3):
            k += 1
            m /= 2
        elif m < Fraction(2, 3):
            k -= 1
            m *= 2
        u = (m - 1) / (m + 1)  # |u| <= 1/5
        u_iv = Interval.exact(u).coarsen(work)
        u_sq = (u_iv * u_iv).coarsen(work)
        threshold = Fraction(1, 1 << (q + 16))
        power = u_iv
        acc = Interval.exact(0)
        j = 0
        while True:
            term = Interval(power.lo / (2 * j + 1), power.hi / (2 * j + 1))
            acc = (acc + term).coarsen(work)
            j += 1
            power = (power * u_sq).coarsen(work)
            tail = max(abs(power.lo), abs(power.hi)) * Fraction(25, 24) / (2 * j + 1)
            if 2 * tail < threshold:
                acc = acc + Interval(-2 * tail, 2 * tail)
                break
        result = Interval(2 * acc.lo, 2 * acc.hi)
        if k != 0:
            result = result + Interval.exact(k) * _ln2(q)
        return result.coarsen(q + 8)

    return _cached_point(("log", r), prec, compute)


def exp_enclosure(x: Interval, precision_bits: int = 256) -> Interval:
    lo = _exp_point(x.lo, precision_bits)
    hi = lo if x.is_point() else _exp_point(x.hi, precision_bits)
    return Interval(lo.lo, hi.hi)


def log_enclosure(x: Interval, precision_bits: int = 256) -> Interval:
    if x.lo <= 0:
        raise LogOfNonPositive(f"log of interval {x} touching zero")
    lo = _log_point(x.lo, precision_bits)
    hi = lo if x.is_point() else _log_point(x.hi, precision_bits)
    return Interval(lo.lo, hi.hi)


def _sqrt_point_lo(r: Fraction, bits: int) -> Fraction:
    scale = 1 << (2 * bits)
    s = math.isqrt(r.numerator * scale // r.denominator)
    return Fraction(s, 1 << bits)


def sqrt_enclosure(x: Interval, precision_bits: int = 256) -> Interval:
    """Outward enclosure of sqrt over a nonnegative interval."""
    if x.lo < 0:
        raise NonPositiveArgument(f"sqrt of interval {x} with negative part")
    bits = precision_bits + GUARD_BITS
    lo = _sqrt_point_lo(x.lo, bits)
    hi = _sqrt_point_lo(x.hi, bits) + Fraction(2, 1 << bits)
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# Gamma via the Stirling series


_STIRLING_TERMS = 10
_STIRLING_SHIFT_TARGET = 8


def _lngamma_point(x: Fraction, prec: int) -> Interval:
    if x <= 0:
        raise NonPositiveArgument(f"lngamma of non-positive point {x}")

    def compute(q: int) -> Interval:
        shift = 0
        y = x
        while y < _STIRLING_SHIFT_TARGET:
            y += 1
            shift += 1
        ln_y = _log_point(y, q)
        ln_2pi = _ln2(q) + log_enclosure(pi_enclosure(q), q)
        y_iv = Interval.exact(y)
        acc = (y_iv - Interval.exact(Fraction(1, 2))) * ln_y - y_iv
        acc = acc + Interval(ln_2pi.lo / 2, ln_2pi.hi / 2)
        for k in range(1, _STIRLING_TERMS + 1):
            coeff = bernoulli_number(2 * k) / Fraction((2 * k) * (2 * k - 1))
            acc = acc + Interval.exact(coeff / y ** (2 * k - 1))
        # remainder of the real-argument Stirling series is bounded by the
        # magnitude of the first omitted term
        k = _STIRLING_TERMS + 1
        rem = abs(bernoulli_number(2 * k)) / Fraction((2 * k) * (2 * k - 1)) / y ** (2 * k - 1)
        acc = acc + Interval(-rem, rem)
        for i in range(shift):
            acc = acc - _log_point(x + i, q)
        return acc.coarsen(q + 8)

    return _cached_point(("lngamma", x), prec, compute)


def _gamma_point(x: Fraction, prec: int) -> Interval:
    return exp_enclosure(_lngamma_point(x, prec), prec)


# lower bound for Gamma over (1, 2); the true minimum is ~0.885603
_GAMMA_DIP_FLOOR = Fraction(8855, 10000)


def gamma_enclosure(x: Interval, precision_bits: int = 256) -> Interval:
    if x.lo <= 0:
        raise NonPositiveArgument(f"gamma of interval {x} touching zero")
    lo_enc = _gamma_point(x.lo, precision_bits)
    hi_enc = lo_enc if x.is_point() else _gamma_point(x.hi, precision_bits)
    result = lo_enc.hull(hi_enc)
    # an interior minimum can occur only near the dip of Gamma in (1, 2)
    if x.lo < Fraction(147, 100) and x.hi > Fraction(145, 100):
        result = Interval(min(result.lo, _GAMMA_DIP_FLOOR), result.hi)
    return result


# ---------------------------------------------------------------------------
# rational powers


def rational_pow_point(base: Fraction, exponent: Fraction, prec: int) -> Interval:
    """Enclosure of base**exponent for rational base > 0."""
    if exponent.denominator == 1:
        return Interval.exact(base ** int(exponent))
    if base <= 0:
        raise NonPositiveArgument(f"rational power of non-positive base {base}")
    return exp_enclosure(
        Interval.exact(exponent) * _log_point(base, prec), prec
    )


def pow_frac(x: Interval, exponent: Fraction, precision_bits: int = 256) -> Interval:
    """Enclosure of x**exponent for a positive interval x."""
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return x.pow_int(int(exponent))
    if x.lo <= 0:
        raise NonPositiveArgument(f"fractional power of {x} touching zero")
    if exponent.denominator == 2:
        return sqrt_enclosure(x.pow_int(int(exponent.numerator)), precision_bits)
    return exp_enclosure(
        Interval.exact(exponent) * log_enclosure(x, precision_bits), precision_bits
    )


# ---------------------------------------------------------------------------
# Hurwitz/Riemann zeta via Euler-Maclaurin


_EM_CORRECTION_TERMS = 10


def _pochhammer(s: Fraction, length: int) -> Fraction:
    acc = Fraction(1)
    for i in range(length):
        acc *= s + i
    return acc


def _rational_neg_pow(base: Fraction, s: Fraction, q: int) -> Interval:
    """Enclosure of base**(-s)."""
    if s.denominator == 1:
        return Interval.exact(Fraction(1) / base ** int(s))
    return exp_enclosure(Interval.exact(-s) * _log_point(base, q), q)


def _hurwitz_point(s: Fraction, a: Fraction, prec: int) -> Interval:
    """Hurwitz zeta(s, a) for rational s > 1 and 0 < a <= 1."""

    def compute(q: int) -> Interval:
        m = _EM_CORRECTION_TERMS
        n_cut = 28 if q <= 350 else 48
        acc = Interval.exact(0)
        for k in range(n_cut):
            acc = acc + _rational_neg_pow(k + a, s, q)
            acc = acc.coarsen(q + 32)
        edge = n_cut + a
        edge_pow = _rational_neg_pow(edge, s, q)  # edge^(-s)
        acc = acc + edge_pow * Interval.exact(edge) / Interval.exact(s - 1)
        acc = acc + Interval(edge_pow.lo / 2, edge_pow.hi / 2)
        inv_edge = Fraction(1) / edge
        for j in range(1, m + 1):
            coeff = (
                bernoulli_number(2 * j)
                / Fraction(math.factorial(2 * j))
                * _pochhammer(s, 2 * j - 1)
                * inv_edge ** (2 * j - 1)
            )
            acc = acc + edge_pow * Interval.exact(coeff)
            acc = acc.coarsen(q + 32)
        # remainder: |R| <= 2.6 (s)_(2m+1) (2 pi)^(-(2m+1)) edge^(-s-2m) / (s+2m)
        # from the periodic-Bernoulli integral form of the remainder
        pi_lo = pi_enclosure(64).lo
        rem_coeff = (
            Fraction(26, 10)
            * _pochhammer(s, 2 * m + 1)
            / (2 * pi_lo) ** (2 * m + 1)
            * inv_edge ** (2 * m)
            / (s + 2 * m)
        )
        rem = rem_coeff * max(abs(edge_pow.lo), abs(edge_pow.hi))
        acc = acc + Interval(-rem, rem)
        return acc.coarsen(q + 8)

    return _cached_point(("hurwitz", s, a), prec, compute)


def zeta_real_enclosure(s: Interval, precision_bits: int = 256) -> Interval:
    """Enclosure of the Riemann zeta function on an interval s with s.lo > 1."""
    if s.lo <= 1:
        raise ArgumentNotGreaterThanOne(f"zeta requested at {s}")
    # zeta is strictly decreasing on (1, oo)
    hi = _hurwitz_point(s.lo, Fraction(1), precision_bits)
    lo = hi if s.is_point() else _hurwitz_point(s.hi, Fraction(1), precision_bits)
    return Interval(lo.lo, hi.hi)


# ---------------------------------------------------------------------------
# Dirichlet characters and L-functions


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n >= 0."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # factor out twos from n
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def dirichlet_character(D: int, k: int) -> int:
    """Real primitive character mod D (fundamental discriminant D > 0)."""
    return kronecker_symbol(D, k)


def dirichlet_L_enclosure(D: int, s: Interval, precision_bits: int = 256) -> Interval:
    """Enclosure of L(s, chi_D) for catalog moduli, via Hurwitz zeta."""
    if D not in SUPPORTED_L_MODULI:
        raise UnsupportedModulus(f"modulus {D} not supported")
    if s.lo <= 1:
        raise ArgumentNotGreaterThanOne(f"L requested at {s}")

    def at_point(sp: Fraction) -> Interval:
        acc = Interval.exact(0)
        for a in range(1, D + 1):
            chi = dirichlet_character(D, a)
            if chi == 0:
                continue
            term = _hurwitz_point(sp, Fraction(a, D), precision_bits)
            acc = acc + (term if chi == 1 else -term)
        return acc * _rational_neg_pow(Fraction(D), sp, precision_bits + GUARD_BITS)

    if s.is_point():
        return at_point(s.lo).coarsen(precision_bits + 8)
    # mean-value widening: |L'(sigma)| <= sum_(k>=2) ln(k) k^(-sigma)
    base = at_point(s.lo)
    sigma = s.lo
    deriv = Interval.exact(0)
    for k in range(2, 20):
        deriv = deriv + _log_point(Fraction(k), 64) * _rational_neg_pow(
            Fraction(k), sigma, 64
        )
    tail = (
        _log_point(Fraction(20), 64) / Interval.exact(sigma - 1)
        + Interval.exact(Fraction(1) / (sigma - 1) ** 2)
    ) * rational_pow_point(Fraction(20), 1 - sigma, 64)
    slack = (deriv.hi + tail.hi) * s.width()
    return Interval(base.lo - slack, base.hi + slack).coarsen(precision_bits + 8)


def bernoulli_polynomial(n: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for i in range(n + 1):
        acc += math.comb(n, i) * bernoulli_number(i) * x ** (n - i)
    return acc


def generalized_bernoulli(D: int, n: int) -> Fraction:
    """Generalized Bernoulli number B_(n, chi_D) for fundamental D > 0."""
    acc = Fraction(0)
    for a in range(1, D + 1):
        chi = dirichlet_character(D, a)
        if chi:
            acc += chi * bernoulli_polynomial(n, Fraction(a, D))
    return Fraction(D) ** (n - 1) * acc


def dirichlet_L_even_coeff(D: int, j: int) -> Fraction:
    """Exact rational c with L(2j, chi_D) = c * pi^(2j) * sqrt(D).

    Closed form for real primitive even characters at positive even
    integers, via generalized Bernoulli numbers.
    """
    if D not in SUPPORTED_L_MODULI:
        raise UnsupportedModulus(f"modulus {D} not supported")
    k = 2 * j
    b = generalized_bernoulli(D, k)
    sign = (-1) ** (1 + j)
    return Fraction(sign * 2**k, D**k) * b / (2 * math.factorial(k))


# ---------------------------------------------------------------------------
# alpha and the Robbins brackets


def alpha_enclosure(s: Interval, precision_bits: int = 256) -> Interval:
    """Enclosure of pi^(s/2) / (Gamma(s/2) zeta(s)) for s.lo > 1."""
    if s.lo <= 1:
        raise ArgumentNotGreaterThanOne(f"alpha requested at {s}")
    pi_iv = pi_enclosure(precision_bits)
    half = Interval(s.lo / 2, s.hi / 2)
    if s.is_point():
        numerator = pow_frac(pi_iv, s.lo / 2, precision_bits)
    else:
        numerator = exp_enclosure(half * log_enclosure(pi_iv, precision_bits), precision_bits)
    denom = gamma_enclosure(half, precision_bits) * zeta_real_enclosure(s, precision_bits)
    return (numerator / denom).coarsen(precision_bits + 8)


def stirling_bounds(n: int, precision_bits: int = 256) -> Tuple[Interval, Interval]:
    """Robbins brackets: sqrt(2 pi n) (n/e)^n e^(1/(12n+1)) < n! < ... e^(1/12n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pi_iv = pi_enclosure(precision_bits)
    root = sqrt_enclosure(Interval.exact(2 * n) * pi_iv, precision_bits)
    e_iv = _euler_e(precision_bits)
    core = root * Interval.exact(Fraction(n) ** n) / e_iv.pow_int(n)
    lower = core * _exp_point(Fraction(1, 12 * n + 1), precision_bits)
    upper = core * _exp_point(Fraction(1, 12 * n), precision_bits)
    return lower.coarsen(precision_bits + 8), upper.coarsen(precision_bits + 8)
