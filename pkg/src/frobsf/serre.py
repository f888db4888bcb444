"""Serre-curve level data and squarefree density constants.

A curve y^2 = x^3 + ax + b with squarefree discriminant kernel delta_sf
determines a level m_e (twice |delta_sf| when delta_sf = 1 mod 4, four
times otherwise).  Under the Serre hypothesis the mod-m_e image of Galois
is exactly the kernel of the quadratic character

    psi(g) = eps(g mod 2) * kronecker(d_fund, det g),

where eps is the sign character of GL2(F_2) acting on the three nonzero
vectors of F_2^2, and d_fund is the fundamental discriminant attached to
delta_sf (so kronecker(d_fund, .) is a character modulo a divisor of m_e).
Away from m_e the image is all of GL2, and at mixed levels it is the full
CRT product of the two pieces.

Counting solutions of f(tr, det) = 0 inside ker psi at a level L divisible
by both n^2 and m_e uses [psi = 1] = (1 + psi)/2: the count splits into a
plain term and a psi-twisted term, and both factor over the primes of L by
CRT.  Odd primes contribute trace/det fiber counts, plain or twisted by
the Legendre component of psi; the 2-part is enumerated directly over
matrices mod 2^k (k <= 3), because eps is not a function of trace and
determinant.  The twisted term vanishes unless n is divisible by 2 and by
every odd prime of m_e, since any missing prime contributes a full
character sum over its GL2 factor.

The per-curve constant is then an exact finite Euler-like product over the
primes of m_e (with its one nontrivial correction divisor) times the
generic product over primes away from m_e, truncated at ell_max with a
measured-constant tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .bipoly import BiPoly, eval_mod
from .errors import BudgetError, SingularCurveError
from .gl2 import FAST_PRIME_MAX, _odd_counts, gl2_order, local_density
from .integers import (
    factorize,
    is_squarefree,
    kronecker,
    primes_up_to,
    squarefree_part,
)

DEFAULT_ELL_MAX = 101


@dataclass(frozen=True)
class Curve:
    """Short Weierstrass curve y^2 = x^3 + ax + b over Q (nonsingular)."""

    a: int
    b: int

    def __post_init__(self):
        if 4 * self.a**3 + 27 * self.b**2 == 0:
            raise SingularCurveError(
                f"discriminant vanishes for (a, b) = ({self.a}, {self.b})"
            )

    @property
    def delta(self) -> int:
        """-(4a^3 + 27b^2), the (scaled) discriminant used throughout."""
        return -(4 * self.a**3 + 27 * self.b**2)


@dataclass(frozen=True)
class SerreData:
    """Level data derived from a curve's discriminant.

    two_char names the 2-part of kronecker(d_fund, .): "trivial", "chi_m4",
    "chi_8" or "chi_m8" according to the signed residue of delta_sf.
    """

    curve: Curve
    delta: int
    delta_sf: int
    d_fund: int
    m_e: int
    odd_primes: tuple[int, ...]
    two_exp: int
    two_char: str


@lru_cache(maxsize=None)
def serre_data(curve: Curve) -> SerreData:
    """Compute the level m_e and the character decomposition for a curve."""
    delta = curve.delta
    delta_sf = squarefree_part(delta)
    if delta_sf % 4 == 1:
        m_e = 2 * abs(delta_sf)
        d_fund = delta_sf
    else:
        m_e = 4 * abs(delta_sf)
        d_fund = 4 * delta_sf
    if delta_sf % 2 == 0:
        half = delta_sf // 2
        two_char = "chi_8" if half % 4 == 1 else "chi_m8"
    elif delta_sf % 4 == 1:
        two_char = "trivial"
    else:
        two_char = "chi_m4"
    odd_primes = tuple(p for p, _ in factorize(m_e).factors if p != 2)
    two_exp = next(e for p, e in factorize(m_e).factors if p == 2)
    return SerreData(
        curve=curve,
        delta=delta,
        delta_sf=delta_sf,
        d_fund=d_fund,
        m_e=m_e,
        odd_primes=odd_primes,
        two_exp=two_exp,
        two_char=two_char,
    )


@lru_cache(maxsize=None)
def _epsilon(a: int, b: int, c: int, d: int) -> int:
    """Sign of the permutation g mod 2 induces on the nonzero vectors of F_2^2."""
    vectors = ((1, 0), (0, 1), (1, 1))
    index = {v: i for i, v in enumerate(vectors)}
    image = []
    for vx, vy in vectors:
        w = ((a * vx + b * vy) % 2, (c * vx + d * vy) % 2)
        if w == (0, 0):
            raise ValueError("matrix not invertible mod 2")
        image.append(index[w])
    if len(set(image)) != 3:
        raise ValueError("matrix not invertible mod 2")
    # parity of a permutation of three points: identity and 3-cycles are even
    fixed = sum(1 for i, j in enumerate(image) if i == j)
    return 1 if fixed in (0, 3) else -1


def psi(g: tuple[int, int, int, int], sd: SerreData) -> int:
    """The quadratic character cutting out the mod-m_e image, on g = (a, b, c, d)."""
    a, b, c, d = g
    det = a * d - b * c
    if math.gcd(det, sd.m_e) != 1:
        raise ValueError(f"matrix {g} is not invertible mod m_e = {sd.m_e}")
    return _epsilon(a % 2, b % 2, c % 2, d % 2) * kronecker(sd.d_fund, det % sd.m_e)


_CHI2_TABLE = {
    "trivial": (1, 1, 1, 1),
    "chi_m4": (1, -1, 1, -1),  # indexed by (det mod 8) // 2 over odd det: 1,3,5,7
    "chi_8": (1, -1, -1, 1),
    "chi_m8": (1, 1, -1, -1),
}


def _chi2(two_char: str, det: int) -> int:
    return _CHI2_TABLE[two_char][(det % 8) // 2]


@lru_cache(maxsize=None)
def _two_part_counts(
    f: BiPoly, level_exp: int, cond_exp: int, two_char: str
) -> tuple[int, int]:
    """Plain and psi-twisted counts over GL2(Z/2^level_exp) with the
    f-condition imposed mod 2^cond_exp.

    eps depends on the matrix mod 2 (not only on trace and det), so this is
    a direct enumeration; the level never exceeds 2^3, i.e. 4096 matrices.
    """
    q = 1 << level_exp
    cond = 1 << cond_exp
    if cond_exp:
        f_ok = [
            [eval_mod(f, t, d, cond) == 0 for d in range(cond)] for t in range(cond)
        ]
    plain = 0
    twisted = 0
    rng = range(q)
    for a in rng:
        for d in rng:
            ad = a * d
            t = a + d
            for b in rng:
                for c in rng:
                    det = ad - b * c
                    if det % 2 == 0:
                        continue
                    if cond_exp and not f_ok[t % cond][det % cond]:
                        continue
                    plain += 1
                    twisted += _epsilon(a % 2, b % 2, c % 2, d % 2) * _chi2(
                        two_char, det
                    )
    return plain, twisted


def _curve_part(sd: SerreData, f: BiPoly, n2: int) -> Fraction:
    """|C_{E,f}(n2^2)| / |G_E(n2^2)| for squarefree n2 | m_e.

    Computed at level L = lcm(n2^2, m_e) as (plain + twisted)/|GL2(L)|,
    with both terms factored over the primes of L.  Odd primes of m_e away
    from n2 carry no f-condition: their plain factor cancels and their
    twisted factor is a full character sum, hence zero.
    """
    plain = Fraction(1)
    twisted = Fraction(1)
    for p in sd.odd_primes:
        if n2 % p == 0:
            cnt, tw = _odd_counts(f, p, 2)
            den = gl2_order(p * p)
            plain *= Fraction(cnt, den)
            twisted *= Fraction(tw, den)
        else:
            twisted = Fraction(0)
    cond_exp = 2 if n2 % 2 == 0 else 0
    level_exp = max(cond_exp, sd.two_exp)
    p2, s2 = _two_part_counts(f, level_exp, cond_exp, sd.two_char)
    den2 = gl2_order(1 << level_exp)
    plain *= Fraction(p2, den2)
    twisted *= Fraction(s2, den2)
    return plain + twisted


def ratio_cef(curve: Curve, f: BiPoly, n: int) -> Fraction:
    """|C_{E,f}(n^2)| / |G_E(n^2)| for squarefree n >= 1, exactly.

    Splits n into the part away from m_e (generic GL2 density) and the part
    inside m_e (kernel-of-psi density via _curve_part).
    """
    if n < 1 or not is_squarefree(n):
        raise ValueError(f"need squarefree n >= 1, got {n}")
    return _ratio(serre_data(curve), f, n)


def _ratio(sd: SerreData, f: BiPoly, n: int) -> Fraction:
    result = Fraction(1)
    n2 = 1
    for p, _ in factorize(n).factors if n > 1 else ():
        if sd.m_e % p == 0:
            n2 *= p
        else:
            result *= local_density(f, p)
    return result * _curve_part(sd, f, n2)


@dataclass(frozen=True)
class SerreConstant:
    """A truncated density constant with its exact and estimated parts.

    value = finite_part * generic_part exactly; tail_estimate bounds the
    error from primes beyond ell_max (and, for truncated curve constants,
    from dropped level primes).
    """

    kind: str
    value: Fraction
    ell_max: int
    tail_estimate: float
    finite_part: Fraction
    generic_part: Fraction
    local_factors: tuple[tuple[int, Fraction], ...]
    dropped_primes: tuple[int, ...] = ()

    @property
    def value_float(self) -> float:
        return float(self.value)


@lru_cache(maxsize=4)
def _prime_square_tail(ell_max: int) -> float:
    """sum over primes p > ell_max of 1/p^2, numerically with a remainder bound."""
    horizon = 100_000
    ps = primes_up_to(horizon)
    ps = ps[ps > ell_max].astype(float)
    return float((1.0 / (ps * ps)).sum()) + 1.0 / horizon


def _measured_key_constant(local_factors: tuple[tuple[int, Fraction], ...]) -> float:
    return max(float(ell * ell * rho) for ell, rho in local_factors)


def _check_f(f: BiPoly) -> None:
    if f.is_constant:
        raise ValueError("constant polynomials do not define a sequence")


def constant_generic(f: BiPoly, ell_max: int = DEFAULT_ELL_MAX) -> SerreConstant:
    """prod over primes ell <= ell_max of (1 - local_density(f, ell)),
    the density constant for a generic (full-image) curve."""
    _check_f(f)
    if ell_max < 2:
        raise ValueError(f"need ell_max >= 2, got {ell_max}")
    if ell_max > FAST_PRIME_MAX:
        raise BudgetError(f"ell_max {ell_max} exceeds fiber budget {FAST_PRIME_MAX}")
    locals_: list[tuple[int, Fraction]] = []
    product = Fraction(1)
    for ell in map(int, primes_up_to(ell_max)):
        rho = local_density(f, ell)
        locals_.append((ell, rho))
        product *= 1 - rho
    factors = tuple(locals_)
    tail = _measured_key_constant(factors) * _prime_square_tail(ell_max)
    return SerreConstant(
        kind="generic",
        value=product,
        ell_max=ell_max,
        tail_estimate=tail,
        finite_part=Fraction(1),
        generic_part=product,
        local_factors=factors,
    )


def constant_serre(
    curve: Curve,
    f: BiPoly,
    ell_max: int = DEFAULT_ELL_MAX,
    allow_truncation: bool = False,
) -> SerreConstant:
    """The curve-specific constant: finite part over the level m_e times the
    generic product away from m_e, truncated at ell_max.

    The finite part is the Moebius-alternating sum of ratio_cef over the
    squarefree divisors of m_e.  Level primes above ell_max (or the fiber
    budget) are rejected unless allow_truncation is set, in which case
    their near-1 factors are dropped and the loss is absorbed into
    tail_estimate (2C/p^2 per dropped prime: one generic-shaped factor and
    one dominated twisted correction).
    """
    _check_f(f)
    if ell_max < 2:
        raise ValueError(f"need ell_max >= 2, got {ell_max}")
    if ell_max > FAST_PRIME_MAX:
        raise BudgetError(f"ell_max {ell_max} exceeds fiber budget {FAST_PRIME_MAX}")
    sd = serre_data(curve)
    dropped = tuple(p for p in sd.odd_primes if p > ell_max)
    if dropped and not allow_truncation:
        raise BudgetError(
            f"m_e = {sd.m_e} has prime factor(s) {dropped} above ell_max = "
            f"{ell_max}; pass allow_truncation to fold them into the tail"
        )
    kept = [p for p in sd.odd_primes if p not in dropped]
    # Moebius sum over squarefree divisors built from the kept level primes.
    finite = Fraction(0)
    divisors = [(1, 1)]
    for p in [2] + kept:
        divisors.extend([(d * p, -sign) for d, sign in divisors])
    for div, sign in divisors:
        finite += sign * _curve_part(sd, f, div)
    locals_: list[tuple[int, Fraction]] = []
    generic = Fraction(1)
    for ell in map(int, primes_up_to(ell_max)):
        rho = local_density(f, ell)
        locals_.append((ell, rho))
        if sd.m_e % ell:
            generic *= 1 - rho
    factors = tuple(locals_)
    c_measured = _measured_key_constant(factors)
    tail = c_measured * _prime_square_tail(ell_max)
    tail += sum(2.0 * c_measured / (p * p) for p in dropped)
    return SerreConstant(
        kind="curve",
        value=finite * generic,
        ell_max=ell_max,
        tail_estimate=tail,
        finite_part=finite,
        generic_part=generic,
        local_factors=factors,
        dropped_primes=dropped,
    )
