"""Exact counting in GL2(Z/mZ) organized by (trace, determinant) fibers.

The number of invertible 2x2 matrices mod q with prescribed trace T and
determinant D never needs matrix enumeration: fixing the diagonal entry a,
the off-diagonal pair (b, c) must satisfy bc = a(T - a) - D, and the number
of such pairs mod p^e depends only on the p-adic valuation of the right
side.  Summing over a gives

    M(T, D) = sum_a count_bc_pairs(a(T - a) - D, q).

For odd prime q = p the sum collapses to the classical closed form

    M(T, D) = p^2 + p * chi_p(T^2 - 4D)          (chi_p(0) = 0),

and for odd q = p^2 it collapses to a four-case function of
Delta = T^2 - 4D mod p^2, obtained from the valuation structure above plus
Hensel lifting of the characteristic quadratic a^2 - Ta + D:

    chi_p(Delta) = +1        ->  p^3 (p + 1)
    chi_p(Delta) = -1        ->  p^3 (p - 1)
    v_p(Delta) = 1           ->  p^2 (p^2 - 1)
    Delta = 0 mod p^2        ->  p^2 (p^2 + p - 1)

Those closed forms turn the count of {g : f(tr g, det g) = 0 mod q} into a
single masked sweep over the (T, D) grid -- O(q^2) vectorized cells instead
of O(q^4) matrices -- which is what makes exact local densities at every
prime up to a few hundred practical.  Character-twisted counts (weights
chi(det g)) ride along in the same sweep.

For q = 2^e, and for the rare deeper odd powers, a materialized fiber table
is built instead (cyclic cross-correlation of the bc-pair counts against
the parabola a(T - a), one FFT per trace row, with an exactness guard).

Counts are exact integers; densities are Fractions formed by callers.
A brute-force matrix enumeration oracle for tiny moduli is included for
cross-checking everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .bipoly import BiPoly, eval_mod
from .errors import BudgetError
from .integers import factorize, kronecker

# Odd-p^2 closed-form sweep budget: the sweep touches p^4 grid cells.
FAST_PRIME_MAX = 257

# Materialized fiber-table budget: q^2 table entries, q FFTs of length q.
FIBER_Q_MAX = 2500

# Brute-force matrix enumeration budget: m^4 matrices.
ORACLE_M_MAX = 16

_CHUNK_CELLS = 1 << 21

Character = str | tuple[str, int]


def gl2_order(m: int) -> int:
    """|GL2(Z/mZ)|; multiplicative, p^(4e-3)(p-1)(p^2-1) at p^e."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m == 1:
        return 1
    order = 1
    for p, e in factorize(m).factors:
        order *= p ** (4 * e - 3) * (p - 1) * (p * p - 1)
    return order


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"need a prime power >= 2, got {q}")
    fac = factorize(q).factors
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    return fac[0]


def count_bc_pairs(k: int, q: int) -> int:
    """#{(b, c) mod q : bc = k mod q} for a prime power q = p^e.

    Only the valuation of k matters: v < e gives (v+1)(p-1)p^(e-1) pairs,
    and k = 0 gives e(p-1)p^(e-1) + p^e.
    """
    p, e = _prime_power(q)
    k %= q
    if k == 0:
        return e * (p - 1) * p ** (e - 1) + q
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return (v + 1) * (p - 1) * p ** (e - 1)


def _bc_count_table(p: int, e: int) -> np.ndarray:
    """count_bc_pairs(k, p^e) for every residue k, as an int64 array."""
    q = p**e
    base = (p - 1) * p ** (e - 1)
    table = np.empty(q, dtype=np.int64)
    idx = np.arange(q)
    vals = np.full(q, base, dtype=np.int64)
    power = p
    mult = 2
    while power < q:
        vals[idx % power == 0] = mult * base
        power *= p
        mult += 1
    table[:] = vals
    table[0] = e * base + q
    return table


@dataclass(frozen=True)
class TraceDetFiber:
    """Fiber counts M(T, D) for one prime-power modulus.

    table[T, D] is the number of g in GL2(Z/qZ) with tr g = T, det g = D;
    columns with non-unit D are zero.
    """

    modulus: int
    table: np.ndarray

    def count(self, trace: int, det: int) -> int:
        q = self.modulus
        return int(self.table[trace % q, det % q])

    def total(self) -> int:
        return int(self.table.sum())


@lru_cache(maxsize=8)
def trace_det_fiber(q: int) -> TraceDetFiber:
    """Materialize the full (T, D) fiber table for a prime power q.

    Row T of the table is the cyclic cross-correlation of the histogram of
    a(T - a) against the bc-pair counts; each row is one length-q FFT.  The
    result is rounded back to integers and guarded by the exact group-order
    total, so FFT roundoff cannot leak through silently.
    """
    p, e = _prime_power(q)
    if q > FIBER_Q_MAX:
        raise BudgetError(f"fiber table modulus {q} exceeds budget {FIBER_Q_MAX}")
    cnt = _bc_count_table(p, e).astype(np.float64)
    cnt_f = np.fft.rfft(cnt)
    a = np.arange(q, dtype=np.int64)
    table = np.empty((q, q), dtype=np.int64)
    for trace in range(q):
        hist = np.bincount((a * (trace - a)) % q, minlength=q).astype(np.float64)
        row = np.fft.irfft(np.fft.rfft(hist) * np.conj(cnt_f), n=q)
        table[trace] = np.rint(row).astype(np.int64)
    table[:, np.arange(q) % p == 0] = 0
    fiber = TraceDetFiber(modulus=q, table=table)
    if fiber.total() != gl2_order(q):
        raise ArithmeticError(f"fiber table for q={q} failed the total check")
    return fiber


def _legendre_table(p: int) -> np.ndarray:
    """chi_p over [0, p) as int64 (chi_p(0) = 0)."""
    x = np.arange(p, dtype=np.int64)
    tab = np.full(p, -1, dtype=np.int64)
    tab[(x * x) % p] = 1
    tab[0] = 0
    return tab


def _coeff_rows(f: BiPoly, t_vals: np.ndarray, q: int) -> list[np.ndarray]:
    """A_j(T) = sum_i c_ij T^i mod q for each y-degree j, over a vector of T."""
    grid = f.coeff_grid()
    deg_x = len(grid) - 1
    powers = [np.ones_like(t_vals)]
    for _ in range(deg_x):
        powers.append((powers[-1] * t_vals) % q)
    rows = []
    for j in range(len(grid[0])):
        acc = np.zeros_like(t_vals)
        for i in range(deg_x + 1):
            c = grid[i][j] % q
            if c:
                acc = (acc + c * powers[i]) % q
        rows.append(acc)
    return rows


def _f_values(rows: list[np.ndarray], d_vals: np.ndarray, q: int) -> np.ndarray:
    """Horner in the y direction: f(T, D) mod q on the chunk x D grid."""
    acc = np.broadcast_to(rows[-1][:, None], (rows[-1].size, d_vals.size)).copy()
    for j in range(len(rows) - 2, -1, -1):
        acc = (acc * d_vals[None, :] + rows[j][:, None]) % q
    return acc


@lru_cache(maxsize=None)
def _odd_counts(f: BiPoly, p: int, e: int) -> tuple[int, int]:
    """(plain, Legendre-twisted) counts of f(tr, det) = 0 mod p^e in
    GL2(Z/p^e Z) for odd p and e in {1, 2}, via the closed-form fibers."""
    if p > FAST_PRIME_MAX:
        raise BudgetError(f"odd fiber sweep prime {p} exceeds budget {FAST_PRIME_MAX}")
    q = p**e
    leg = _legendre_table(p)
    if e == 1:
        fiber_of_delta = p * p + p * leg
    else:
        idx = np.arange(q, dtype=np.int64)
        modp = idx % p
        fiber_of_delta = np.where(
            idx == 0,
            p * p * (p * p + p - 1),
            np.where(
                modp == 0,
                p * p * (p * p - 1),
                np.where(leg[modp] == 1, p**3 * (p + 1), p**3 * (p - 1)),
            ),
        ).astype(np.int64)
    d_vals = np.arange(q, dtype=np.int64)
    unit = (d_vals % p) != 0
    chi_d = leg[d_vals % p]
    plain = 0
    twisted = 0
    rows_per_chunk = max(1, _CHUNK_CELLS // q)
    for start in range(0, q, rows_per_chunk):
        t_vals = np.arange(start, min(start + rows_per_chunk, q), dtype=np.int64)
        rows = _coeff_rows(f, t_vals, q)
        vals = _f_values(rows, d_vals, q)
        delta = ((t_vals * t_vals % q)[:, None] - 4 * d_vals[None, :]) % q
        mask = (vals == 0) & unit[None, :]
        fib = fiber_of_delta[delta]
        plain += int(fib[mask].sum())
        twisted += int((fib * chi_d[None, :])[mask].sum())
    return plain, twisted


_CHAR_KINDS = ("trivial", "legendre", "chi_m4", "chi_8", "chi_m8")


def _normalize_char(chi: Character) -> tuple[str, int]:
    if chi == "trivial":
        return ("trivial", 1)
    if isinstance(chi, tuple) and len(chi) == 2 and chi[0] == "legendre":
        p = chi[1]
        if p == 2 or not factorize(p).factors == ((p, 1),):
            raise ValueError(f"legendre character needs an odd prime, got {p}")
        return ("legendre", p)
    if chi in ("chi_m4", "chi_8", "chi_m8"):
        return (str(chi), 8 if chi != "chi_m4" else 4)
    raise ValueError(f"unknown character {chi!r}; kinds: {_CHAR_KINDS}")


def _char_values(kind: str, param: int, q: int) -> np.ndarray:
    """chi(D) over D in [0, q), zero off the character's unit group."""
    d = np.arange(q, dtype=np.int64)
    if kind == "trivial":
        return np.ones(q, dtype=np.int64)
    if kind == "legendre":
        if q % param:
            raise ValueError(f"legendre modulus {param} does not divide q={q}")
        return _legendre_table(param)[d % param]
    if q % param:
        raise ValueError(f"character {kind} needs {param} | q, got q={q}")
    if kind == "chi_m4":
        table = np.array([0, 1, 0, -1], dtype=np.int64)
        return table[d % 4]
    if kind == "chi_8":
        table = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int64)
        return table[d % 8]
    table = np.array([0, 1, 0, 1, 0, -1, 0, -1], dtype=np.int64)
    return table[d % 8]


@lru_cache(maxsize=None)
def _fiber_sweep(f: BiPoly, q: int, kind: str, param: int) -> int:
    """Generic prime-power path: sum of chi(D) * M(T, D) over the solution
    grid of f(T, D) = 0 mod q, using the materialized fiber table."""
    fiber = trace_det_fiber(q)
    weights = _char_values(kind, param, q)
    d_vals = np.arange(q, dtype=np.int64)
    total = 0
    rows_per_chunk = max(1, _CHUNK_CELLS // q)
    for start in range(0, q, rows_per_chunk):
        t_vals = np.arange(start, min(start + rows_per_chunk, q), dtype=np.int64)
        rows = _coeff_rows(f, t_vals, q)
        vals = _f_values(rows, d_vals, q)
        mask = vals == 0
        block = fiber.table[start : start + t_vals.size] * weights[None, :]
        total += int(block[mask].sum())
    return total


def _pp_count(f: BiPoly, p: int, e: int) -> int:
    if p != 2 and e <= 2:
        return _odd_counts(f, p, e)[0]
    return _fiber_sweep(f, p**e, "trivial", 1)


def count_cf(f: BiPoly, m: int) -> int:
    """#{g in GL2(Z/mZ) : f(tr g, det g) = 0 mod m}; multiplicative via CRT."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m == 1:
        return 1
    total = 1
    for p, e in factorize(m).factors:
        total *= _pp_count(f, p, e)
    return total


def count_cf_twisted(f: BiPoly, q: int, chi: Character) -> int:
    """sum of chi(det g) over {g in GL2(Z/qZ) : f(tr g, det g) = 0 mod q}.

    q must be a prime power and chi a real character mod q' | q: "trivial",
    ("legendre", p) with p | q odd, or one of "chi_m4", "chi_8", "chi_m8"
    at 2-powers.
    """
    p, e = _prime_power(q)
    kind, param = _normalize_char(chi)
    if kind == "trivial":
        return count_cf(f, q)
    if kind == "legendre" and p == param and p != 2 and e <= 2:
        return _odd_counts(f, p, e)[1]
    return _fiber_sweep(f, q, kind, param)


def local_density(f: BiPoly, ell: int) -> Fraction:
    """count_cf(f, ell^2) / gl2_order(ell^2) as an exact Fraction."""
    return Fraction(count_cf(f, ell * ell), gl2_order(ell * ell))


def enumerate_oracle(
    f: BiPoly, m: int, predicate: Callable[[int, int, int, int], bool] | None = None
) -> int:
    """Brute-force count over all m^4 matrices, for cross-checking.

    Counts g = [[a, b], [c, d]] in GL2(Z/mZ) with f(tr g, det g) = 0 mod m,
    optionally restricted by predicate(a, b, c, d).  Pure Python on purpose:
    this is the oracle the vectorized paths are judged against.
    """
    if m > ORACLE_M_MAX:
        raise BudgetError(f"oracle modulus {m} exceeds budget {ORACLE_M_MAX}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    f_ok = [
        [eval_mod(f, t, d, m) == 0 for d in range(m)] for t in range(m)
    ]
    unit = [math.gcd(d, m) == 1 for d in range(m)]
    count = 0
    rng = range(m)
    for a in rng:
        for d in rng:
            t = (a + d) % m
            ad = a * d
            for b in rng:
                for c in rng:
                    det = (ad - b * c) % m
                    if not unit[det]:
                        continue
                    if not f_ok[t][det]:
                        continue
                    if predicate is not None and not predicate(a, b, c, d):
                        continue
                    count += 1
    return count
