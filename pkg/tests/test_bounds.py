"""Tests for the covolume constants, counting bounds, and cutoffs."""

import math
from fractions import Fraction

import mpmath
import pytest

from covcert.rigor import Comparison, Interval, iv_compare
from covcert import bounds as b
from covcert import numberfields as nf

mpmath.mp.dps = 50

PREC = 160


def _close(iv: Interval, printed: str, rel=Fraction(1, 200)) -> bool:
    """Enclosure midpoint within the given relative distance of a printed value."""
    target = Fraction(printed)
    return abs(iv.midpoint() - target) <= rel * target


# ---------------------------------------------------------------------------
# Pi, Psi, zeta product


def test_pi_n_coefficients():
    assert b.pi_n_coefficient(2) == Fraction(3, 32)
    assert b.pi_n_coefficient(3) == Fraction(45, 256)


def test_pi_4_printed_value():
    assert _close(b.pi_n(4, PREC), "3.9465e-10", Fraction(1, 1000))


def test_psi_exact_values():
    assert b.psi_n_exact(2) == Fraction(1, 5760)
    assert b.psi_n_exact(3) == Fraction(1, 2903040)


def test_psi_interval_contains_exact():
    for n in (2, 3, 4, 5):
        assert b.psi_n(n, PREC).contains(b.psi_n_exact(n))


def test_f_n():
    assert b.f_n(2) == 2
    assert b.f_n(3) == Fraction(15, 2)
    assert b.f_n(4) == 15
    assert b.RankParams(3).f == Fraction(15, 2)
    with pytest.raises(ValueError):
        b.RankParams(1)


def test_zeta_product_bounded():
    enclosure = b.zeta_product_enclosure(20, PREC)
    assert enclosure.hi < Fraction("1.83")
    assert enclosure.lo > Fraction("1.82")
    assert b.zeta_product_upper(PREC) == Fraction("1.83")


def test_zeta_product_single_factor():
    # with only one factor the lower endpoint is zeta(2); the tail bracket
    # is wide but still contains the full product
    iv = b.zeta_product_enclosure(1, PREC)
    assert abs(iv.lo - Fraction("1.6449")) < Fraction(1, 1000)
    assert iv.contains(b.zeta_product_enclosure(20, PREC).midpoint())


def test_zeta_product_partial_monotone():
    previous = None
    for J in (1, 2, 5, 10, 20):
        coeff = Fraction(1)
        from covcert.specfun import zeta_even_exact, pi_enclosure

        for j in range(1, J + 1):
            coeff *= zeta_even_exact(j)
        partial = Interval.exact(coeff) * pi_enclosure(PREC).pow_int(J * (J + 1))
        if previous is not None:
            assert partial.lo > previous.hi
        previous = partial


def test_pi_ratio_crossover():
    """Pi(n+1)/Pi(n) = (2n+1)!/(2 pi)^(2n+2) crosses 1 between n=7 and n=8.

    (Direct exact check; the ratio is below 1 only for n <= 7, so any
    claim that the crossover happens later is refuted here.)
    """
    for n in range(2, 8):
        assert b.pi_ratio(n, PREC).hi < 1, n
    for n in range(8, 21):
        assert b.pi_ratio(n, PREC).lo > 1, n
    # the same fact by exact integer arithmetic: (2n+1)!^? vs (2pi)^(2n+2)
    assert math.factorial(15) < float((2 * math.pi) ** 16)
    assert math.factorial(17) > float((2 * math.pi) ** 18)


# ---------------------------------------------------------------------------
# S(Lambda) and quotients


def test_s_lambda_Q_collapses_to_psi(catalog):
    iv = b.S_lambda(catalog[0], 2, PREC)
    assert iv.contains(b.psi_n_exact(2))


def test_quotient_exact_values(catalog):
    f5 = nf.field_by_discriminant(catalog, 2, 5)
    f8 = nf.field_by_discriminant(catalog, 2, 8)
    assert b.s_lambda_quotient_exact(f5, 2) == 40
    assert b.s_lambda_quotient_exact(f8, 2) == Fraction(32, 11)
    assert b.s_lambda_quotient_exact(f5, 3) == Fraction(200, 67)


def test_quotient_interval_matches_exact(catalog):
    for D, n in ((5, 2), (8, 2), (5, 3)):
        field = nf.field_by_discriminant(catalog, 2, D)
        iv = b.s_lambda_quotient(field, n, PREC)
        assert iv.contains(b.s_lambda_quotient_exact(field, n)), (D, n)


def test_shifted_covolume_printed_values(catalog):
    f5 = nf.field_by_discriminant(catalog, 2, 5)
    f49 = nf.field_by_discriminant(catalog, 3, 49)
    assert _close(b.s_lambda_shifted(f5, 2, PREC), "4.34e-6")
    assert _close(b.s_lambda_shifted(f49, 2, PREC), "8.75e-6")
    assert _close(b.s_lambda_shifted(f5, 3, PREC), "1.154e-7")


def test_quotient_printed_values(catalog):
    f49 = nf.field_by_discriminant(catalog, 3, 49)
    assert _close(b.s_lambda_quotient(f49, 2, PREC), "19.85")


def test_adjusted_quotient_rulings(catalog):
    """Only the discriminant-5 field at rank 2 survives the global stage."""
    cases = [
        ((2, 5), 2, True),
        ((2, 8), 2, False),
        ((3, 49), 2, False),
        ((2, 5), 3, False),
    ]
    for (d, D), n, survives in cases:
        field = nf.field_by_discriminant(catalog, d, D)
        index = nf.totally_positive_index(field)
        adjusted = b.adjusted_quotient(field, n, index, PREC)
        verdict = iv_compare(adjusted, Interval.exact(1))
        expected = (
            Comparison.CERTAINLY_GREATER if survives else Comparison.CERTAINLY_LESS
        )
        assert verdict is expected, (d, D, n)


def test_adjusted_quotient_exact_survivor(catalog):
    f5 = nf.field_by_discriminant(catalog, 2, 5)
    assert b.s_lambda_quotient_exact(f5, 2) / 8 == 5


# ---------------------------------------------------------------------------
# F and O bounds


def test_F_bound_basic():
    iv = b.F_bound(1, Interval.exact(1), 2, PREC)
    # (1/750) * 7.6 * e^0.46 * Pi(2)
    value = (
        mpmath.mpf("7.6")
        * mpmath.exp(mpmath.mpf("0.46"))
        * 3
        / (32 * mpmath.pi**6)
        / 750
    )
    lo = mpmath.mpf(iv.lo.numerator) / iv.lo.denominator
    hi = mpmath.mpf(iv.hi.numerator) / iv.hi.denominator
    assert lo <= value <= hi


def test_F_monotone_in_D():
    small = b.F_bound(2, Interval.exact(10), 3, PREC)
    large = b.F_bound(2, Interval.exact(20), 3, PREC)
    assert large.lo > small.hi


def test_O_equals_F_at_substituted_D(table):
    pair = b.OdlyzkoPair(Fraction("6.894"), Fraction("2.2667"))
    n, d = 4, 2
    o_val = b.O_bound(n, d, pair, PREC)
    from covcert.specfun import _exp_point, pow_frac

    D_sub = pow_frac(Interval.exact(pair.A), Fraction(d), PREC) * _exp_point(
        -pair.E, PREC
    )
    f_val = b.F_bound(d, D_sub, n, PREC)
    o_val.intersect(f_val)  # raises if disjoint


def test_lemma35_conditions_examples():
    good = b.OdlyzkoPair(Fraction("6.894"), Fraction("2.2667"))
    assert b.lemma35_conditions(good, PREC) == {
        "cond_a": True,
        "cond_b": True,
        "cond_c": True,
    }
    low_A = b.OdlyzkoPair(Fraction(5), Fraction("2.2667"))
    assert not b.lemma35_conditions(low_A, PREC)["cond_b"]
    big_E = b.OdlyzkoPair(Fraction("6.894"), Fraction(10))
    verdicts = b.lemma35_conditions(big_E, PREC)
    assert not verdicts["cond_a"]
    assert verdicts["cond_b"]


def test_normalized_O_exceeds_threshold():
    pair = b.OdlyzkoPair(Fraction("6.894"), Fraction("2.2667"))
    assert b.normalized_O(4, 2, pair, PREC).lo > Fraction("1.83")


def test_claim_a_chain_direct_and_sufficient():
    pair = b.OdlyzkoPair(Fraction("6.894"), Fraction("2.2667"))
    for n in range(2, 21):
        assert b.claim_a_direct(pair, n, PREC), n
        assert b.claim_a_sufficient(pair, n, PREC), n


def test_claim_b_range():
    pair = b.OdlyzkoPair(Fraction("6.894"), Fraction("2.2667"))
    for n in range(3, 15):
        assert b.claim_b_condition(pair, n, PREC), n


# ---------------------------------------------------------------------------
# discriminant cutoffs


@pytest.mark.parametrize(
    "n,d,printed",
    [
        (3, 2, "5.277"),
        (3, 3, "28.087"),
        (2, 2, "8.220"),
        (2, 3, "59.879"),
        (2, 4, "436.18"),
        (2, 5, "3177.29"),
    ],
)
def test_proto_D_bound_values(n, d, printed):
    assert _close(b.proto_D_bound(n, d, 1, PREC), printed)


def test_proto_D_bound_monotone_in_h():
    small = b.proto_D_bound(2, 2, 1, PREC)
    large = b.proto_D_bound(2, 2, 3, PREC)
    assert large.lo > small.hi


def test_proto_D_bound_integer_floors():
    assert int(b.proto_D_bound(2, 3, 1, PREC).hi) == 59
    assert int(b.proto_D_bound(2, 2, 1, PREC).hi) == 8


def test_n3_D_bound_values():
    d2 = b.n3_D_bound(2, PREC)
    d3 = b.n3_D_bound(3, PREC)
    assert abs(d2.midpoint() - Fraction("10.63")) < Fraction(1, 50)
    assert abs(d3.midpoint() - Fraction("60.09")) < Fraction(1, 50)
    assert d2.hi < 49  # no quadratic field with D >= 11 survives at rank 3


@pytest.mark.parametrize(
    "d,printed",
    [(2, "25.74"), (3, "231.65"), (4, "2084.50"), (5, "18757.18")],
)
def test_n2_D_bound_values(d, printed):
    iv = b.n2_D_bound(d, PREC)
    assert abs(iv.midpoint() - Fraction(printed)) < Fraction(1, 50)


def test_n3_degree_threshold():
    pair = b.OdlyzkoPair(Fraction("13.047"), Fraction("3.8667"))
    iv = b.n3_degree_threshold(pair, PREC)
    assert abs(iv.midpoint() - Fraction("3.31")) < Fraction(1, 50)
    with pytest.raises(b.DenominatorNotPositive):
        b.n3_degree_threshold(b.OdlyzkoPair(Fraction(2), Fraction(2)), PREC)


def test_cutoff_preconditions():
    with pytest.raises(ValueError):
        b.n3_D_bound(4, PREC)
    with pytest.raises(ValueError):
        b.n2_D_bound(6, PREC)
    with pytest.raises(ValueError):
        b.proto_D_bound(1, 2, 1, PREC)
    with pytest.raises(ValueError):
        b.F_bound(1, Interval.exact(Fraction(1, 2)), 2, PREC)


# ---------------------------------------------------------------------------
# table loading


def test_table_contents(table):
    assert len(table) == 32
    pairs = {(p.A, p.E) for p in table}
    assert (Fraction("6.894"), Fraction("2.2667")) in pairs
    assert (Fraction("13.047"), Fraction("3.8667")) in pairs
    assert (Fraction("21.512"), Fraction("6.0001")) in pairs
    assert all(p.A > 1 and p.E > 0 for p in table)
    As = [p.A for p in table]
    assert As == sorted(As)


def test_pair_invariants():
    with pytest.raises(ValueError):
        b.OdlyzkoPair(Fraction(1), Fraction(1))
    with pytest.raises(ValueError):
        b.OdlyzkoPair(Fraction(2), Fraction(0))


def test_malformed_table(tmp_path):
    p = tmp_path / "odlyzko.csv"
    p.write_text("4.816,1.4136\nbadline\n")
    with pytest.raises(b.MalformedTable):
        b.load_odlyzko_table(str(p))
    with pytest.raises(FileNotFoundError):
        b.load_odlyzko_table(str(tmp_path / "missing.csv"))
