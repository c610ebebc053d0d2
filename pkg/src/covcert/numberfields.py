"""Totally real number field records and their certified arithmetic data.

Covers the candidate field catalog (a vendored snapshot with checksums),
fundamental units from Pell's equation, totally-positive unit indices via
certified sign computations, regulator and class-number bounds, Dedekind
zeta enclosures, and prime splitting data.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .rigor import Interval, Rational
from . import specfun
from .specfun import (
    Interval as _Interval,  # noqa: F401  (re-export convenience)
    dirichlet_L_enclosure,
    dirichlet_L_even_coeff,
    exp_enclosure,
    gamma_enclosure,
    pi_enclosure,
    pow_frac,
    zeta_even_exact,
    zeta_real_enclosure,
    _exp_point,
)


class MalformedCatalog(ValueError):
    """Catalog stream does not parse."""


class InvariantViolation(ValueError):
    """A catalog record violates a structural invariant."""


class UnsupportedField(ValueError):
    """Operation requested for a field outside its supported set."""


class UnsupportedArgument(ValueError):
    """Zeta argument outside the supported set."""


# ---------------------------------------------------------------------------
# polynomials with exact rational arithmetic (coefficients ascending)


def poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[Fraction]) -> List[Fraction]:
    return [Fraction(i * c) for i, c in enumerate(coeffs)][1:]


def _poly_trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a = _poly_trim(a)
        if not a:
            break
    return a


def sturm_real_root_count(coeffs: Sequence[int]) -> int:
    """Number of distinct real roots of a squarefree integer polynomial."""
    p0 = _poly_trim([Fraction(c) for c in coeffs])
    chain = [p0, _poly_trim(poly_derivative(p0))]
    while chain[-1]:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])

    def sign_changes_at_infinity(direction: int) -> int:
        signs = []
        for p in chain:
            if not p:
                continue
            lead = p[-1]
            s = lead if direction > 0 else lead * (-1) ** (len(p) - 1)
            signs.append(1 if s > 0 else -1)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return sign_changes_at_infinity(-1) - sign_changes_at_infinity(1)


def isolate_real_roots(coeffs: Sequence[int], width_bits: int = 64) -> List[Interval]:
    """Isolating intervals for all real roots of a squarefree polynomial.

    Brackets sign changes on a grid of step 1/4 inside the root bound, then
    bisects each bracket down to width 2**-width_bits.  The number of
    brackets is verified against the Sturm count.
    """
    expected = sturm_real_root_count(coeffs)
    bound = 1 + max(abs(c) for c in coeffs[:-1]) // abs(coeffs[-1]) + 1
    step = Fraction(1, 4)
    grid_point = Fraction(-bound)
    brackets: List[Tuple[Fraction, Fraction]] = []
    prev_val = poly_eval(coeffs, grid_point)
    while grid_point < bound:
        nxt = grid_point + step
        val = poly_eval(coeffs, nxt)
        if prev_val == 0:
            brackets.append((grid_point, grid_point))
        elif val != 0 and (prev_val < 0) != (val < 0):
            brackets.append((grid_point, nxt))
        grid_point, prev_val = nxt, val
    if poly_eval(coeffs, Fraction(bound)) == 0:
        brackets.append((Fraction(bound), Fraction(bound)))
    if len(brackets) != expected:
        raise InvariantViolation(
            f"root isolation found {len(brackets)} brackets, Sturm count {expected}"
        )
    target = Fraction(1, 1 << width_bits)
    roots = []
    for lo, hi in brackets:
        flo = poly_eval(coeffs, lo)
        while hi - lo > target:
            mid = (lo + hi) / 2
            fmid = poly_eval(coeffs, mid)
            if fmid == 0:
                lo = hi = mid
                break
            if (flo < 0) != (fmid < 0):
                hi = mid
            else:
                lo, flo = mid, fmid
        roots.append(Interval(lo, hi))
    return roots


# ---------------------------------------------------------------------------
# field records and the catalog


@dataclass(frozen=True)
class NumberFieldRecord:
    label: str
    degree: int
    discriminant: int
    class_number: int
    polynomial: Tuple[int, ...]  # ascending, monic
    is_totally_real: bool = True

    def __post_init__(self) -> None:
        if self.polynomial[-1] != 1:
            raise InvariantViolation(f"{self.label}: polynomial is not monic")
        if len(self.polynomial) - 1 != self.degree:
            raise InvariantViolation(f"{self.label}: degree mismatch")
        if self.degree == 1 and (self.discriminant != 1 or self.class_number != 1):
            raise InvariantViolation(f"{self.label}: rational field invariants")
        if self.degree > 1:
            if sturm_real_root_count(self.polynomial) != self.degree:
                raise InvariantViolation(f"{self.label}: not totally real")


def load_catalog(source) -> List[NumberFieldRecord]:
    """Parse the line-delimited catalog: label|d_K|D_K|h_K|poly_coeffs(csv)."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 5:
            raise MalformedCatalog(f"line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            label = parts[0].strip()
            d, D, h = (int(p) for p in parts[1:4])
            coeffs = tuple(int(c) for c in parts[4].split(","))
        except ValueError as exc:
            raise MalformedCatalog(f"line {lineno}: {exc}") from exc
        records.append(NumberFieldRecord(label, d, D, h, coeffs))
    records.sort(key=lambda r: (r.degree, r.discriminant))
    return records


def data_dir() -> Path:
    override = os.environ.get("COVCERT_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def _verify_checksum(path: Path) -> None:
    manifest = path.parent / "CHECKSUMS"
    if not manifest.exists():
        return
    digests = {}
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        digest, name = line.split()
        digests[name] = digest
    if path.name in digests:
        actual = hashlib.sha256(path.read_bytes()).hexdigest()
        if actual != digests[path.name]:
            raise InvariantViolation(f"checksum mismatch for {path.name}")


@lru_cache(maxsize=4)
def default_catalog(path: Optional[str] = None) -> Tuple[NumberFieldRecord, ...]:
    p = Path(path) if path else data_dir() / "fields.catalog"
    if not p.exists():
        raise FileNotFoundError(p)
    _verify_checksum(p)
    return tuple(load_catalog(p.read_bytes()))


def fields_by_degree_below(
    catalog: Iterable[NumberFieldRecord], degree: int, bound: Rational
) -> List[NumberFieldRecord]:
    return [f for f in catalog if f.degree == degree and f.discriminant < bound]


def field_by_label(catalog: Iterable[NumberFieldRecord], label: str) -> NumberFieldRecord:
    for f in catalog:
        if f.label == label:
            return f
    raise UnsupportedField(f"no field labelled {label!r}")


def field_by_discriminant(
    catalog: Iterable[NumberFieldRecord], degree: int, discriminant: int
) -> NumberFieldRecord:
    for f in catalog:
        if f.degree == degree and f.discriminant == discriminant:
            return f
    raise UnsupportedField(f"no field with (d, D) = ({degree}, {discriminant})")


# ---------------------------------------------------------------------------
# units


def pell_fundamental_unit(D: int) -> Tuple[int, int]:
    """Minimal positive (a, b) with a^2 - D b^2 = +-4, searched ascending in b."""
    b = 1
    while True:
        for target in (D * b * b - 4, D * b * b + 4):
            if target > 0:
                a = math.isqrt(target)
                if a * a == target:
                    return (a, b)
        b += 1


def pell_norm(D: int) -> int:
    a, b = pell_fundamental_unit(D)
    return a * a - D * b * b


_CUBIC_49_POLY = (-1, -2, 1, 1)  # x^3 + x^2 - 2x - 1


def _certain_sign(iv: Interval) -> Optional[int]:
    if iv.lo > 0:
        return 1
    if iv.hi < 0:
        return -1
    return None


def _cubic49_unit_signs() -> List[Tuple[int, int]]:
    """Certified signs of the fundamental units at each real embedding.

    The units are eps1 = alpha and eps2 = alpha^2 - 1 where alpha runs over
    the three real roots of the defining cubic.  Root enclosures are bisected
    until both unit enclosures exclude zero.
    """
    signs = []
    for bits in (64, 128, 256):
        roots = isolate_real_roots(_CUBIC_49_POLY, width_bits=bits)
        signs = []
        ok = True
        for root in roots:
            eps1 = root
            eps2 = root * root - Interval.exact(1)
            s1, s2 = _certain_sign(eps1), _certain_sign(eps2)
            if s1 is None or s2 is None:
                ok = False
                break
            signs.append((s1, s2))
        if ok:
            return signs
    raise InvariantViolation("could not certify unit signs for the cubic field")


def totally_positive_index(field: NumberFieldRecord) -> int:
    """Index [U_K^+ : U_K^2] of squares inside the totally positive units."""
    if field.degree == 1:
        return 1
    if field.degree == 2:
        # norm -4 branch: the fundamental unit has a negative conjugate, so
        # no class other than the trivial one is totally positive
        return 1 if pell_norm(field.discriminant) == -4 else 2
    if field.degree == 3 and field.discriminant == 49:
        signs = _cubic49_unit_signs()
        count = 0
        for unit_sign in (1, -1):
            for l1 in (0, 1):
                for l2 in (0, 1):
                    if all(
                        unit_sign * s1**l1 * s2**l2 > 0 for s1, s2 in signs
                    ):
                        count += 1
        return count
    raise UnsupportedField(f"unit index not supported for {field.label}")


# ---------------------------------------------------------------------------
# regulator / class number bounds


def zimmert_lower(d: int, precision_bits: int = 256) -> Interval:
    """Regulator lower bound 0.04 e^(0.46 d)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    e_part = _exp_point(Fraction(46 * d, 100), precision_bits)
    return Interval(e_part.lo / 25, e_part.hi / 25)


def brauer_siegel_H(
    d: int, D: Interval, t: Rational, precision_bits: int = 256
) -> Interval:
    """Upper bound H(d, D, t) for R_K h_K:

    2 t (t+1) (Gamma((t+1)/2) / (2 pi^((1+t)/2)))^d D^((1+t)/2) zeta(t+1)^d
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    if D.lo < 1:
        raise ValueError("discriminant interval must have D.lo >= 1")
    half = (t + 1) / 2
    pi_iv = pi_enclosure(precision_bits)
    gamma_part = gamma_enclosure(Interval.exact(half), precision_bits)
    pi_pow = pow_frac(pi_iv, half, precision_bits)
    ratio = gamma_part / (Interval.exact(2) * pi_pow)
    zeta_part = zeta_real_enclosure(Interval.exact(t + 1), precision_bits)
    return (
        Interval.exact(2 * t * (t + 1))
        * ratio.pow_int(d)
        * pow_frac(D, half, precision_bits)
        * zeta_part.pow_int(d)
    ).coarsen(precision_bits + 8)


# ---------------------------------------------------------------------------
# prime splitting


@dataclass(frozen=True)
class SplittingResult:
    kind: str  # split, inert, ramified
    residue_cardinalities: Tuple[int, ...]


def splitting_type(field: NumberFieldRecord, p: int) -> SplittingResult:
    if field.degree == 2:
        D = field.discriminant
        if D % p == 0:
            return SplittingResult("ramified", (p,))
        symbol = specfun.kronecker_symbol(D, p)
        if symbol == 1:
            return SplittingResult("split", (p, p))
        return SplittingResult("inert", (p * p,))
    if field.degree == 3:
        degrees = _cubic_splitting_degrees(field.polynomial, field.discriminant, p)
        cards = tuple(sorted(p**g for g in degrees))
        if field.discriminant % p == 0:
            kind = "ramified"
        elif len(cards) == 3:
            kind = "split"
        else:
            kind = "inert"
        return SplittingResult(kind, cards)
    raise UnsupportedField(f"splitting not supported for {field.label}")


def padic_square_test(x: int, p: int) -> bool:
    """Whether x is a square in the field of p-adic numbers."""
    if x == 0:
        raise ValueError("x must be nonzero")
    if x < 0:
        # negative numbers can still be p-adic squares for odd p
        pass
    n = 0
    u = x
    while u % p == 0:
        u //= p
        n += 1
    if n % 2 == 1:
        return False
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1


# ---------------------------------------------------------------------------
# Dedekind zeta enclosures


def _poly_mod_p(coeffs: Sequence[int], p: int) -> Tuple[int, ...]:
    return tuple(c % p for c in coeffs)


def _polmul_mod(a, b, f, p):
    """Multiply polynomials (low-degree tuples) modulo monic cubic f, mod p."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce modulo f (monic cubic): x^3 = -(f2 x^2 + f1 x + f0)
    while len(prod) > 3:
        top = prod.pop()
        if top:
            k = len(prod) - 3
            for i in range(3):
                prod[k + i] = (prod[k + i] - top * f[i]) % p
    while len(prod) < 3:
        prod.append(0)
    return tuple(prod)


def _xp_mod(f: Sequence[int], p: int) -> Tuple[int, ...]:
    """x^p modulo the monic cubic f, over F_p, by square and multiply."""
    result = (1, 0, 0)
    base = (0, 1, 0)
    e = p
    while e:
        if e & 1:
            result = _polmul_mod(result, base, f, p)
        base = _polmul_mod(base, base, f, p)
        e >>= 1
    return result


def _gcd_deg_with_cubic(g: Sequence[int], f_full: Sequence[int], p: int) -> int:
    """Degree of gcd(g, f) over F_p where f is the monic cubic (full coeffs)."""
    a = [c % p for c in f_full]
    b = [c % p for c in g]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        b_monic = [(c * inv) % p for c in b]
        r = list(a)
        while len(r) >= len(b_monic) and r:
            lead = r[-1]
            shift = len(r) - len(b_monic)
            if lead:
                for i, c in enumerate(b_monic):
                    r[shift + i] = (r[shift + i] - lead * c) % p
            r = trim(r)
            if not r:
                break
        a, b = b_monic, r
    return len(a) - 1 if a else -1


@lru_cache(maxsize=8)
def _cubic_splitting_table(poly: Tuple[int, ...], disc: int, limit: int) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """(p, residue degrees) for all primes p < limit, via factoring mod p.

    Valid when disc(poly) equals the field discriminant (index 1), so the
    residue degrees are the degrees of the distinct irreducible factors.
    """
    is_comp = bytearray(limit)
    table = []
    for p in range(2, limit):
        if is_comp[p]:
            continue
        for multiple in range(p * p, limit, p):
            is_comp[multiple] = 1
        table.append((p, _cubic_splitting_degrees(poly, disc, p)))
    return tuple(table)


def _cubic_splitting_degrees(poly: Tuple[int, ...], disc: int, p: int) -> Tuple[int, ...]:
    """Degrees of the distinct irreducible factors of the cubic mod p."""
    if disc % p == 0:
        # small ramified primes: factor by exhaustive root search
        roots = [r for r in range(p) if poly_eval(poly, Fraction(r)) % p == 0]
        if not roots:
            return (3,)
        if len(roots) >= 2:
            # a repeated factor of a cubic is linear, so two distinct roots
            # means shape (x-r)^2 (x-s)
            return tuple(1 for _ in roots)

        # single root r: shape (x-r)^e * cofactor; test the multiplicity
        def divide_once(cs, root):
            out = []
            carry = 0
            for c in reversed(cs):
                carry = (carry * root + c) % p
                out.append(carry)
            out.pop()  # remainder, zero by construction at a root
            return list(reversed(out))

        r = roots[0]
        q1 = divide_once([c % p for c in poly], r)
        carry = 0
        for c in reversed(q1):
            carry = (carry * r + c) % p
        if carry == 0:
            return (1,)  # (x-r)^2 or (x-r)^3 with the same root
        return (1, 2)  # simple root times an irreducible quadratic
    xp = _xp_mod(_poly_mod_p(poly, p), p)
    # gcd(x^p - x, f): subtract x
    g = [xp[0], (xp[1] - 1) % p, xp[2]]
    r = _gcd_deg_with_cubic(g, poly, p)
    if r <= 0:
        return (3,)
    if r == 3:
        return (1, 1, 1)
    if r == 1:
        return (1, 2)
    raise InvariantViolation(f"unexpected root count {r} for squarefree cubic mod {p}")


_EULER_PRODUCT_LIMIT = 100_000


@lru_cache(maxsize=None)
def _cubic_zeta_point(poly: Tuple[int, ...], disc: int, s: int, precision_bits: int) -> Interval:
    limit = _EULER_PRODUCT_LIMIT
    prod = Interval.exact(1)
    work = precision_bits + 32
    for p, degrees in _cubic_splitting_table(poly, disc, limit):
        factor = Interval.exact(1)
        for g in degrees:
            factor = factor * Interval.exact(1 - Fraction(1, p ** (s * g)))
        prod = (prod / factor).coarsen(work)
    # primes above the cutoff: 1 <= tail <= exp(6 P^(1-s) / (s-1))
    tail_exp = Fraction(6) * Fraction(1, limit ** (s - 1)) / (s - 1)
    tail_hi = _exp_point(tail_exp, 64).hi
    return (prod * Interval(Fraction(1), tail_hi)).coarsen(precision_bits + 8)


def dedekind_zeta_enclosure(
    field: NumberFieldRecord, s: int, precision_bits: int = 256
) -> Interval:
    """Enclosure of zeta_K(s) at even s in {2, 4, 6}."""
    if s not in (2, 4, 6):
        raise UnsupportedArgument(f"zeta_K supported at s in {{2,4,6}}, got {s}")
    if field.degree == 1:
        c = zeta_even_exact(s // 2)
        return (Interval.exact(c) * pi_enclosure(precision_bits).pow_int(s)).coarsen(
            precision_bits + 8
        )
    if field.degree == 2:
        if field.discriminant not in specfun.SUPPORTED_L_MODULI:
            raise UnsupportedField(f"no L-data for {field.label}")
        z = zeta_real_enclosure(Interval.exact(s), precision_bits)
        L = dirichlet_L_enclosure(field.discriminant, Interval.exact(s), precision_bits)
        return (z * L).coarsen(precision_bits + 8)
    if field.degree == 3 and field.discriminant == 49:
        return _cubic_zeta_point(field.polynomial, field.discriminant, s, precision_bits)
    raise UnsupportedField(f"zeta_K not supported for {field.label}")


def dedekind_zeta_quadratic_exact_coeff(D: int, j: int) -> Fraction:
    """Exact rational c with zeta_K(2j) = c * pi^(4j) * sqrt(D) for quadratic K."""
    return zeta_even_exact(j) * dirichlet_L_even_coeff(D, j)
