"""Global covolume bounds and discriminant cutoffs.

Implements the reference covolume constants Pi(n) and Psi(n), the lattice
covolume quantity S(Lambda), the counting-function lower bounds F and O,
the three feasibility conditions on a bound pair (A, E), and the various
discriminant cutoff formulas used to enumerate candidate fields.

All decimal constants appearing in the formulas are stored as exact
rationals; printed decimal values in certificates are reporting artifacts
only and never feed back into a comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .rigor import Comparison, Interval, Rational, coarsen_relative, iv_compare
from .numberfields import (
    NumberFieldRecord,
    UnsupportedField,
    _verify_checksum,
    data_dir,
    dedekind_zeta_enclosure,
    dedekind_zeta_quadratic_exact_coeff,
)
from .specfun import (
    _exp_point,
    log_enclosure,
    pi_enclosure,
    pow_frac,
    zeta_even_exact,
    zeta_real_enclosure,
)


class DenominatorNotPositive(ValueError):
    """Degree-threshold denominator could not be certified positive."""


class MalformedTable(ValueError):
    """Bound-pair table does not parse."""


@dataclass(frozen=True)
class OdlyzkoPair:
    """A pair (A, E) certifying D_K >= A^d * exp(-E) for totally real K."""

    A: Fraction
    E: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "E", Fraction(self.E))
        if self.A <= 1:
            raise ValueError(f"bound pair needs A > 1, got A={self.A}")
        if self.E <= 0:
            raise ValueError(f"bound pair needs E > 0, got E={self.E}")


def f_n(n: int) -> Fraction:
    """Exponent f(n) = n^2 + n/2 - 3 appearing in the counting bounds."""
    return Fraction(2 * n * n + n - 6, 2)


@dataclass(frozen=True)
class RankParams:
    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("rank must be >= 2")

    @property
    def f(self) -> Fraction:
        return f_n(self.n)


# ---------------------------------------------------------------------------
# reference covolume constants


@lru_cache(maxsize=None)
def pi_n_coefficient(n: int) -> Fraction:
    """Exact rational c with Pi(n) = c * pi^(-n(n+1))."""
    if not 2 <= n <= 64:
        raise ValueError("rank out of supported range [2, 64]")
    num = 1
    for j in range(1, n + 1):
        num *= math.factorial(2 * j - 1)
    return Fraction(num, 1 << (n * (n + 1)))


def pi_n(n: int, precision_bits: int = 256) -> Interval:
    """Enclosure of Pi(n) = prod_{j<=n} (2j-1)! / (2 pi)^(2j)."""
    c = pi_n_coefficient(n)
    return coarsen_relative(
        Interval.exact(c) * pi_enclosure(precision_bits).pow_int(-n * (n + 1)),
        precision_bits + 8,
    )


@lru_cache(maxsize=None)
def psi_n_exact(n: int) -> Fraction:
    """Exact value of Psi(n) = Pi(n) * prod_{j<=n} zeta(2j).

    The pi powers cancel exactly: zeta(2j) is a rational multiple of
    pi^(2j) and the exponents sum to n(n+1).
    """
    c = pi_n_coefficient(n)
    for j in range(1, n + 1):
        c *= zeta_even_exact(j)
    return c


def psi_n(n: int, precision_bits: int = 256) -> Interval:
    """Interval route for Psi(n), cross-checkable against psi_n_exact."""
    acc = pi_n(n, precision_bits)
    for j in range(1, n + 1):
        acc = acc * zeta_real_enclosure(Interval.exact(2 * j), precision_bits)
    return coarsen_relative(acc, precision_bits + 8)


ZETA_PRODUCT_UPPER = Fraction(183, 100)


def zeta_product_enclosure(J: int = 20, precision_bits: int = 256) -> Interval:
    """Enclosure of the infinite product prod_{j>=1} zeta(2j).

    Partial product up to J is exact up to the pi enclosure; the tail is
    bracketed by [1, exp(sum_{j>J} 2 * 2^(-2j))] since zeta(s) <= 1 + 2^(1-s)
    for s >= 2 and log(1+x) <= x.
    """
    coeff = Fraction(1)
    for j in range(1, J + 1):
        coeff *= zeta_even_exact(j)
    partial = Interval.exact(coeff) * pi_enclosure(precision_bits).pow_int(
        J * (J + 1)
    )
    tail_sum = Fraction(2, 3) * Fraction(1, 4**J)
    tail = Interval(Fraction(1), _exp_point(tail_sum, 64).hi)
    return (partial * tail).coarsen(precision_bits + 8)


def zeta_product_upper(precision_bits: int = 256) -> Fraction:
    """The certified constant 1.83 bounding prod zeta(2j) from above."""
    enclosure = zeta_product_enclosure(20, precision_bits)
    if not enclosure.hi < ZETA_PRODUCT_UPPER:
        raise ValueError("failed to certify the zeta-product constant")
    return ZETA_PRODUCT_UPPER


# ---------------------------------------------------------------------------
# lattice covolume quantity S(Lambda)


def S_lambda(field: NumberFieldRecord, n: int, precision_bits: int = 256) -> Interval:
    """Enclosure of S = D^(n(2n+1)/2) * Pi(n)^d * prod_{j<=n} zeta_K(2j)."""
    if n not in (2, 3):
        raise ValueError("S(Lambda) supported for n in {2, 3}")
    d, D = field.degree, field.discriminant
    acc = pow_frac(
        Interval.exact(D), Fraction(n * (2 * n + 1), 2), precision_bits
    ) * pi_n(n, precision_bits).pow_int(d)
    for j in range(1, n + 1):
        acc = acc * dedekind_zeta_enclosure(field, 2 * j, precision_bits)
    return coarsen_relative(acc, precision_bits + 8)


def s_lambda_shifted(
    field: NumberFieldRecord, n: int, precision_bits: int = 256
) -> Interval:
    """S(Lambda) / 2^(2d - 1), the normalized covolume of the model lattice."""
    shift = Fraction(1, 1 << (2 * field.degree - 1))
    return coarsen_relative(
        S_lambda(field, n, precision_bits) * Interval.exact(shift),
        precision_bits + 8,
    )


def s_lambda_quotient(
    field: NumberFieldRecord, n: int, precision_bits: int = 256
) -> Interval:
    """Quotient Psi(n) / (S(Lambda) / 2^(2d-1)) comparing against Sp_2n(Z)."""
    return (
        Interval.exact(psi_n_exact(n)) / s_lambda_shifted(field, n, precision_bits)
    ).coarsen(precision_bits + 8)


def s_lambda_quotient_exact(field: NumberFieldRecord, n: int) -> Fraction:
    """Exact value of the quotient for Q and real quadratic fields.

    For quadratic fields every zeta_K(2j) is a rational multiple of
    pi^(4j) sqrt(D), so the pi powers cancel against Pi(n)^2 and the
    half-integer powers of D combine to the integer power D^(n(n+1)).
    """
    if field.degree == 1:
        return Fraction(1)
    if field.degree != 2:
        raise UnsupportedField("exact quotient known only for degree <= 2")
    D = field.discriminant
    coeff = pi_n_coefficient(n) ** 2
    for j in range(1, n + 1):
        coeff *= dedekind_zeta_quadratic_exact_coeff(D, j)
    S_shifted = Fraction(D) ** (n * (n + 1)) * coeff / (1 << 3)
    return psi_n_exact(n) / S_shifted


def adjusted_quotient(
    field: NumberFieldRecord, n: int, unit_index: int, precision_bits: int = 256
) -> Interval:
    """Quotient rescaled by unit_index / 2^(2d-1).

    The model lattice's covolume carries a factor 2^(2d-1) / [U^+ : U^2];
    values below 1 certify that the field cannot beat the rational lattice.
    """
    scale = Fraction(unit_index, 1 << (2 * field.degree - 1))
    return (
        s_lambda_quotient(field, n, precision_bits) * Interval.exact(scale)
    ).coarsen(precision_bits + 8)


# ---------------------------------------------------------------------------
# counting-function lower bounds F and O


_COEFF_7_6 = Fraction(38, 5)
_COEFF_0_46 = Fraction(46, 100)
_COEFF_750 = Fraction(1, 750)


def F_bound(d: int, D: Interval, n: int, precision_bits: int = 256) -> Interval:
    """F(d, D, n) = (1/750) D^(n^2+n/2-3) (7.6 e^0.46 Pi(n))^d."""
    if D.lo < 1:
        raise ValueError("discriminant interval must have D.lo >= 1")
    e_part = _exp_point(_COEFF_0_46, precision_bits)
    inner = Interval.exact(_COEFF_7_6) * e_part * pi_n(n, precision_bits)
    return coarsen_relative(
        Interval.exact(_COEFF_750)
        * pow_frac(D, f_n(n), precision_bits)
        * inner.pow_int(d),
        precision_bits + 8,
    )


def O_bound(n: int, d: int, pair: OdlyzkoPair, precision_bits: int = 256) -> Interval:
    """O(n, d, A, E) = (1/750) e^(-E f(n)) (7.6 e^0.46 A^f(n) Pi(n))^d."""
    f = f_n(n)
    e_decay = _exp_point(-pair.E * f, precision_bits)
    e_part = _exp_point(_COEFF_0_46, precision_bits)
    a_pow = pow_frac(Interval.exact(pair.A), f, precision_bits)
    inner = Interval.exact(_COEFF_7_6) * e_part * a_pow * pi_n(n, precision_bits)
    return coarsen_relative(
        Interval.exact(_COEFF_750) * e_decay * inner.pow_int(d),
        precision_bits + 8,
    )


def normalized_O(n: int, d: int, pair: OdlyzkoPair, precision_bits: int = 256) -> Interval:
    """Pi(n)^(-1) O(n, d, A, E), the quantity compared against 1.83."""
    return coarsen_relative(
        O_bound(n, d, pair, precision_bits) / pi_n(n, precision_bits),
        precision_bits + 8,
    )


# ---------------------------------------------------------------------------
# feasibility conditions on a bound pair


def lemma35_conditions(
    pair: OdlyzkoPair, precision_bits: int = 256
) -> Dict[str, bool]:
    """Certify the three sufficient conditions on (A, E).

    cond_a: 2 log A - E >= log(2 pi) + 1 - log 5 (monotone chain condition)
    cond_b: A > 5.66 (positivity of the inner factor for all ranks)
    cond_c: -E + 2 log A > (log 9.47 - log Pi(4)) / f(4) (base case at n=4)

    A condition is reported True only when the interval comparison is
    certain; an overlap verdict yields False.
    """
    log_A = log_enclosure(Interval.exact(pair.A), precision_bits)
    two_pi = Interval.exact(2) * pi_enclosure(precision_bits)
    log_2pi = log_enclosure(two_pi, precision_bits)
    log_5 = log_enclosure(Interval.exact(5), precision_bits)
    one = Interval.exact(1)

    lhs_a = Interval.exact(2) * log_A - Interval.exact(pair.E)
    rhs_a = log_2pi + one - log_5
    cond_a = iv_compare(lhs_a, rhs_a) is Comparison.CERTAINLY_GREATER

    cond_b = pair.A > Fraction(566, 100)

    log_pi4 = log_enclosure(pi_n(4, precision_bits), precision_bits)
    log_947 = log_enclosure(Interval.exact(Fraction(947, 100)), precision_bits)
    rhs_c = (log_947 - log_pi4) / Interval.exact(f_n(4))
    lhs_c = Interval.exact(-pair.E) + Interval.exact(2) * log_A
    cond_c = iv_compare(lhs_c, rhs_c) is Comparison.CERTAINLY_GREATER

    return {"cond_a": cond_a, "cond_b": cond_b, "cond_c": cond_c}


def claim_a_sufficient(pair: OdlyzkoPair, n: int, precision_bits: int = 256) -> bool:
    """Per-rank sufficient condition 4 log A - 2E >= 2 log 2pi + 2 - 2 log(2n+1)."""
    log_A = log_enclosure(Interval.exact(pair.A), precision_bits)
    log_2pi = log_enclosure(
        Interval.exact(2) * pi_enclosure(precision_bits), precision_bits
    )
    log_odd = log_enclosure(Interval.exact(2 * n + 1), precision_bits)
    lhs = Interval.exact(4) * log_A - Interval.exact(2 * pair.E)
    rhs = Interval.exact(2) * log_2pi + Interval.exact(2) - Interval.exact(2) * log_odd
    return iv_compare(lhs, rhs) is Comparison.CERTAINLY_GREATER


def claim_a_direct(pair: OdlyzkoPair, n: int, precision_bits: int = 256) -> bool:
    """Certify Pi(n+1)^(-1) O(n+1,2,pair) > Pi(n)^(-1) O(n,2,pair) directly."""
    lo_rank = normalized_O(n, 2, pair, precision_bits)
    hi_rank = normalized_O(n + 1, 2, pair, precision_bits)
    return iv_compare(hi_rank, lo_rank) is Comparison.CERTAINLY_GREATER


def claim_b_condition(pair: OdlyzkoPair, n: int, precision_bits: int = 256) -> bool:
    """Certify 7.6 e^0.46 A^f(n) Pi(n) >= 1 at the given rank."""
    e_part = _exp_point(_COEFF_0_46, precision_bits)
    a_pow = pow_frac(Interval.exact(pair.A), f_n(n), precision_bits)
    inner = Interval.exact(_COEFF_7_6) * e_part * a_pow * pi_n(n, precision_bits)
    return iv_compare(inner, Interval.exact(1)) is Comparison.CERTAINLY_GREATER


def n3_degree_threshold(pair: OdlyzkoPair, precision_bits: int = 256) -> Interval:
    """Rank-3 degree threshold (7.5 E - 8.25) / (7.5 log A - 12.99).

    Degrees strictly above the threshold are excluded at rank 3.  The
    denominator must be certified positive.
    """
    log_A = log_enclosure(Interval.exact(pair.A), precision_bits)
    denom = Interval.exact(Fraction(15, 2)) * log_A - Interval.exact(
        Fraction(1299, 100)
    )
    if denom.lo <= 0:
        raise DenominatorNotPositive(
            f"7.5 log A - 12.99 not certified positive at A = {pair.A}"
        )
    numer = Interval.exact(Fraction(15, 2) * pair.E - Fraction(33, 4))
    return (numer / denom).coarsen(precision_bits + 8)


def pi_ratio(n: int, precision_bits: int = 256) -> Interval:
    """Enclosure of Pi(n+1)/Pi(n) = (2n+1)! / (2 pi)^(2n+2)."""
    fact = math.factorial(2 * n + 1)
    two_pi = Interval.exact(2) * pi_enclosure(precision_bits)
    return (Interval.exact(fact) / two_pi.pow_int(2 * n + 2)).coarsen(
        precision_bits + 8
    )


# ---------------------------------------------------------------------------
# discriminant cutoffs


def _proto_multiplier(n: int, d: int) -> int:
    """Power of two entering the refined discriminant cutoff.

    The generic cutoff carries 2^(2d-1).  For n = 2 the sharp unit-index
    bound [U^+ : U^2] <= 2^(d-1) improves it to 2^(d-1); for n = 3 at
    degree 2 the intermediate refinement gives 2^d.
    """
    if n == 2:
        return 1 << (d - 1)
    if n == 3 and d == 2:
        return 1 << d
    return 1 << (2 * d - 1)


def proto_D_bound(n: int, d: int, h: int, precision_bits: int = 256) -> Interval:
    """Discriminant cutoff (1.83 m(n,d) h Pi(n)^(1-d))^(1/(n^2+n/2))."""
    if n < 2 or d < 1 or h < 1:
        raise ValueError("need n >= 2, d >= 1, h >= 1")
    base = (
        Interval.exact(ZETA_PRODUCT_UPPER * _proto_multiplier(n, d) * h)
        * pow_frac(pi_n(n, precision_bits), Fraction(1 - d), precision_bits)
    ).coarsen(precision_bits + 8)
    return pow_frac(base, Fraction(2, n * (2 * n + 1)), precision_bits).coarsen(
        precision_bits + 8
    )


# rational lower bound for e^0.46 used in the rank-3 cutoff; a smaller
# denominator there only weakens (enlarges) the cutoff, keeping it valid
_E_046_LOWER = Fraction(158, 100)


def n3_D_bound(d: int, precision_bits: int = 256) -> Interval:
    """Rank-3 cutoff (1372.5 Pi(3)^(1-d) (7.6 * 1.58)^(-d))^(1/7.5)."""
    if d not in (2, 3):
        raise ValueError("rank-3 cutoff supported for d in {2, 3}")
    base = (
        Interval.exact(Fraction(27450, 20))
        * pow_frac(pi_n(3, precision_bits), Fraction(1 - d), precision_bits)
        * Interval.exact((_COEFF_7_6 * _E_046_LOWER) ** (-d))
    ).coarsen(precision_bits + 8)
    return pow_frac(base, Fraction(2, 15), precision_bits).coarsen(precision_bits + 8)


def n2_D_bound(d: int, precision_bits: int = 256) -> Interval:
    """Rank-2 cutoff (11 * 0.00019^(-d) / 960)^(1/3.9)."""
    if d not in (2, 3, 4, 5):
        raise ValueError("rank-2 cutoff supported for d in {2, 3, 4, 5}")
    base = Fraction(11, 960) * Fraction(19, 100000) ** (-d)
    return pow_frac(
        Interval.exact(base), Fraction(10, 39), precision_bits
    ).coarsen(precision_bits + 8)


# ---------------------------------------------------------------------------
# the vendored bound-pair table


def load_odlyzko_table(path: Optional[str] = None) -> Tuple[OdlyzkoPair, ...]:
    """Load the vendored (A, E) table: CSV rows of exact decimal strings."""
    from pathlib import Path

    p = Path(path) if path else data_dir() / "odlyzko.csv"
    if not p.exists():
        raise FileNotFoundError(p)
    _verify_checksum(p)
    pairs: List[OdlyzkoPair] = []
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedTable(f"line {lineno}: expected 'A,E', got {line!r}")
        try:
            pairs.append(OdlyzkoPair(Fraction(parts[0]), Fraction(parts[1])))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedTable(f"line {lineno}: {exc}") from exc
    return tuple(pairs)
