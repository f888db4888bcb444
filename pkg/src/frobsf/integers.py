"""Number-theoretic substrate: primes, factorization, squarefree structure,
and quadratic symbols.

Everything here is exact integer arithmetic.  All functions are pure and
deterministic; tables are immutable after construction, so they can be
shared freely across threads or forked workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, FactorizationError

# Deterministic Miller-Rabin witness set; correct for every n < 3.3e24,
# far beyond anything the trial-division/rho pipeline below will meet.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Trial division strips primes up to this bound before rho takes over.
_TRIAL_PRIME_BOUND = 10_000

_RHO_ITER_BUDGET = 2_000_000

# Memory guards: the sieves below cost one byte per flag.
PRIME_SIEVE_CAP = 200_000_000
SQUAREFREE_TABLE_CAP = 200_000_000


def primes_up_to(x: int) -> np.ndarray:
    """All primes <= x, ascending, as an int64 array."""
    if x < 2:
        raise ValueError(f"need x >= 2, got {x}")
    if x > PRIME_SIEVE_CAP:
        raise CapacityError(f"sieve bound {x} exceeds cap {PRIME_SIEVE_CAP}")
    flags = np.ones(x + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(x) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(_TRIAL_PRIME_BOUND))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of odd composite n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    iterations = 0
    for c in range(1, 100):
        y, r, q = 2, 1, 1
        g, x, ys = 1, 2, 2
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
                iterations += m
                if iterations > _RHO_ITER_BUDGET:
                    raise FactorizationError(f"rho budget exhausted on {n}")
            r *= 2
        if g == n:
            # backtrack one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationError(f"rho failed on {n}")


@dataclass(frozen=True)
class Factorization:
    """Signed factorization: value = sign * prod(p_i ** e_i), primes ascending."""

    value: int
    sign: int
    factors: tuple[tuple[int, int], ...]

    def reconstruct(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out


def factorize(n: int) -> Factorization:
    """Full signed factorization of a nonzero integer."""
    if n == 0:
        raise ValueError("0 has no factorization")
    sign = -1 if n < 0 else 1
    m = abs(n)
    counts: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _brent_rho(m)
        stack.append(d)
        stack.append(m // d)
    factors = tuple(sorted(counts.items()))
    return Factorization(value=n, sign=sign, factors=factors)


def squarefree_part(n: int) -> int:
    """The unique squarefree d with n = d * m^2, sign carried by d."""
    fac = factorize(n)
    d = fac.sign
    for p, e in fac.factors:
        if e % 2:
            d *= p
    return d


def is_squarefree(n: int) -> bool:
    """Squarefreeness of |n|; 0 is not squarefree, units are."""
    if n == 0:
        return False
    n = abs(n)
    if n == 1:
        return True
    return all(e == 1 for _, e in factorize(n).factors)


def mu(n: int) -> int:
    """Moebius function of n >= 1."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n == 1:
        return 1
    fac = factorize(n)
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if len(fac.factors) % 2 else 1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), the full extension of Jacobi to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        if a < 0:
            result = -1
        n = -n
    # strip the even part of n
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi(a, n) for odd n >= 1 by reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class SquarefreeTable:
    """Boolean squarefree flags for 0..bound (flag[0] is False)."""

    bound: int
    flags: np.ndarray

    def __getitem__(self, n: int) -> bool:
        if not 0 <= n <= self.bound:
            raise IndexError(f"{n} outside table bound {self.bound}")
        return bool(self.flags[n])

    @property
    def count(self) -> int:
        return int(self.flags.sum())


def squarefree_table(bound: int) -> SquarefreeTable:
    """Sieve squarefree flags up to bound by striking multiples of p^2."""
    if bound < 1:
        raise ValueError(f"need bound >= 1, got {bound}")
    if bound > SQUAREFREE_TABLE_CAP:
        raise CapacityError(f"table bound {bound} exceeds cap {SQUAREFREE_TABLE_CAP}")
    flags = np.ones(bound + 1, dtype=bool)
    flags[0] = False
    for p in primes_up_to(math.isqrt(bound)) if bound >= 4 else ():
        sq = int(p) * int(p)
        flags[sq::sq] = False
    return SquarefreeTable(bound=bound, flags=flags)


def squarefree_divisors(n: int) -> list[int]:
    """Ascending list of squarefree divisors of |n| (always contains 1)."""
    divs = [1]
    for p, _ in factorize(abs(n)).factors:
        # materialize first: extending from a live view of divs never ends
        divs.extend([d * p for d in divs])
    return sorted(divs)
