"""Frobenius traces by quadratic character sums, the integer sequences they
generate, and empirical squarefree statistics over prime ranges.

For a good prime p >= 5 the trace is a_p = -sum_x chi_p(x^3 + ax + b),
computed with one quadratic-residue table and one vectorized pass over
F_p, so a full sweep to X costs O(X^2 / log X) word operations -- fine to
X = 10^6 at desk scale.  Squarefree testing of the resulting f(a_p, p)
values shares one sieved flag table across all primes of a sweep.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bipoly import BiPoly, eval_int
from .errors import BadReductionError, BudgetError, CapacityError
from .integers import factorize, is_prime, primes_up_to, squarefree_table
from .serre import (
    DEFAULT_ELL_MAX,
    Curve,
    SerreConstant,
    constant_generic,
    constant_serre,
    ratio_cef,
)

# Sweeps refuse x_max beyond this unless the caller raises the cap.
AP_X_MAX_CAP = 1_000_000

# x*(x^2+a)+b must stay below 2^63 in the one-reduction trace kernel.
_TRACE_P_CAP = 2_000_000

# Squarefree divisibility moduli reported by default: squarefree n in 2..20.
DEFAULT_DIVISIBILITY_NS = (2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19)

THREADS_ENV_VAR = "FROBSF_THREADS"


def _bad_primes(curve: Curve) -> set[int]:
    return {2, 3} | {p for p, _ in factorize(curve.delta).factors}


class _TraceWorkspace:
    """Reusable buffers for the per-prime character-sum kernel."""

    def __init__(self, p_max: int):
        if p_max > _TRACE_P_CAP:
            raise CapacityError(f"prime {p_max} exceeds kernel cap {_TRACE_P_CAP}")
        self.x = np.arange(p_max, dtype=np.int64)
        self.work = np.empty(p_max, dtype=np.int64)
        self.chi = np.empty(p_max, dtype=np.int8)
        self.gath = np.empty(p_max, dtype=np.int8)

    def trace_at(self, a: int, b: int, p: int) -> int:
        """-sum_x chi_p(x^3 + ax + b), one reduction pass per prime.

        The cubic is accumulated unreduced (bounded by p^3 + p^2 < 2^63
        for p <= 2e6), so the only modular reductions are the half-range
        square pass that seeds the residue table and the final one.
        """
        x = self.x[:p]
        half = (p + 1) // 2
        w = self.work[:half]
        np.multiply(x[:half], x[:half], out=w)
        w %= p
        chi = self.chi[:p]
        chi.fill(-1)
        chi[w] = 1
        chi[0] = 0
        v = self.work[:p]
        np.multiply(x, x, out=v)
        v += a % p
        v *= x
        v += b % p
        v %= p
        g = self.gath[:p]
        np.take(chi, v, out=g)
        return -int(g.sum(dtype=np.int64))


def ap(curve: Curve, p: int) -> int:
    """The Frobenius trace a_p at a single good prime p >= 5."""
    if p < 5 or not is_prime(p):
        raise BadReductionError(f"need a good prime >= 5, got {p}")
    if curve.delta % p == 0:
        raise BadReductionError(f"p = {p} divides the discriminant {curve.delta}")
    trace = _TraceWorkspace(p).trace_at(curve.a, curve.b, p)
    if trace * trace > 4 * p:
        raise ArithmeticError(f"trace {trace} at p = {p} violates the Hasse bound")
    return trace


@dataclass(frozen=True)
class ApSeries:
    """Traces at every good prime <= x_max, plus the skipped primes."""

    curve: Curve
    x_max: int
    primes: np.ndarray
    traces: np.ndarray
    skipped: tuple[int, ...]


def ap_series(curve: Curve, x_max: int, x_max_cap: int = AP_X_MAX_CAP) -> ApSeries:
    """Traces at all good primes <= x_max (2, 3 and bad primes skipped)."""
    if x_max < 5:
        raise ValueError(f"need x_max >= 5, got {x_max}")
    if x_max > x_max_cap:
        raise CapacityError(f"x_max {x_max} exceeds cap {x_max_cap}")
    all_primes = primes_up_to(x_max)
    bad = _bad_primes(curve)
    ws = _TraceWorkspace(int(all_primes[-1]))
    ps: list[int] = []
    traces: list[int] = []
    skipped: list[int] = []
    for p in map(int, all_primes):
        if p in bad:
            skipped.append(p)
            continue
        t = ws.trace_at(curve.a, curve.b, p)
        if t * t > 4 * p:
            raise ArithmeticError(f"trace {t} at p = {p} violates the Hasse bound")
        ps.append(p)
        traces.append(t)
    return ApSeries(
        curve=curve,
        x_max=x_max,
        primes=np.array(ps, dtype=np.int64),
        traces=np.array(traces, dtype=np.int64),
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class DivisibilityRow:
    """Observed vs. predicted count of good primes with n^2 | f(a_p, p)."""

    n: int
    observed: int
    expected_ratio: Fraction
    expected_count: float


@dataclass(frozen=True)
class SfReport:
    """Empirical squarefree statistics for one curve and sequence."""

    curve: Curve
    f: BiPoly
    x_max: int
    pi_x: int
    good_count: int
    skipped: tuple[int, ...]
    sf_count: int
    zero_count: int
    empirical_ratio: float
    constant: SerreConstant | None
    divisibility: tuple[DivisibilityRow, ...]


def pi_sf(
    curve: Curve,
    f: BiPoly,
    x_max: int,
    ns: tuple[int, ...] = DEFAULT_DIVISIBILITY_NS,
    series: ApSeries | None = None,
    ell_max: int = DEFAULT_ELL_MAX,
    with_constant: bool = True,
) -> SfReport:
    """Count good primes p <= x_max with f(a_p, p) squarefree.

    Values f(a_p, p) = 0 are counted separately (zero_count) and never as
    squarefree.  One shared squarefree table covers all |f(a_p, p)|; its
    capacity bounds the usable size of f's values.  Each requested n gets
    an (observed, expected) divisibility row, the prediction being the
    exact kernel density ratio_cef(curve, f, n) scaled by pi_x.
    """
    if f.is_constant:
        raise ValueError("constant polynomials do not define a sequence")
    if series is None:
        series = ap_series(curve, x_max)
    elif series.curve != curve or series.x_max < x_max:
        raise ValueError("supplied series does not cover this curve and range")
    keep = series.primes <= x_max
    good_p = series.primes[keep]
    good_t = series.traces[keep]
    pi_x = int(len(primes_up_to(x_max)))
    fvals = [eval_int(f, int(t), int(p)) for t, p in zip(good_t, good_p)]
    zero_count = sum(1 for v in fvals if v == 0)
    bound = max((abs(v) for v in fvals), default=1)
    table = squarefree_table(max(bound, 1))
    arr = np.array(fvals, dtype=np.int64) if fvals else np.zeros(0, dtype=np.int64)
    nz = arr[arr != 0]
    sf_count = int(table.flags[np.abs(nz)].sum())
    rows = []
    for n in ns:
        nn = n * n
        observed = int((arr % nn == 0).sum()) if arr.size else 0
        ratio = ratio_cef(curve, f, n)
        rows.append(
            DivisibilityRow(
                n=n,
                observed=observed,
                expected_ratio=ratio,
                expected_count=float(ratio) * pi_x,
            )
        )
    constant = (
        constant_serre(curve, f, ell_max, allow_truncation=True)
        if with_constant
        else None
    )
    return SfReport(
        curve=curve,
        f=f,
        x_max=x_max,
        pi_x=pi_x,
        good_count=int(good_p.size),
        skipped=tuple(p for p in series.skipped if p <= x_max),
        sf_count=sf_count,
        zero_count=zero_count,
        empirical_ratio=sf_count / pi_x,
        constant=constant,
        divisibility=tuple(rows),
    )


@dataclass(frozen=True)
class FamilyReport:
    """Box average of per-curve values against the generic constant."""

    mode: str
    a_bound: int
    b_bound: int
    f: BiPoly
    ell_max: int
    x_max: int | None
    total_curves: int
    evaluated: int
    skipped: tuple[tuple[int, int, str], ...]
    sample_size: int | None
    seed: int | None
    mean_value: Fraction | float
    generic: SerreConstant
    deviation: float

    @property
    def mean_float(self) -> float:
        return float(self.mean_value)


def _box_curves(a_bound: int, b_bound: int) -> list[Curve]:
    out = []
    for a in range(-a_bound, a_bound + 1):
        for b in range(-b_bound, b_bound + 1):
            if 4 * a**3 + 27 * b**2 != 0:
                out.append(Curve(a, b))
    return out


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
    return max(1, threads)


def _family_eval(args) -> tuple[int, int, str | None, Fraction | float | None]:
    a, b, f, mode, x_max, ell_max = args
    curve = Curve(a, b)
    try:
        if mode == "constants":
            value = constant_serre(curve, f, ell_max, allow_truncation=True).value
        else:
            value = pi_sf(curve, f, x_max, with_constant=False).empirical_ratio
    except (BudgetError, CapacityError) as exc:
        return a, b, str(exc), None
    return a, b, None, value


def family_average(
    a_bound: int,
    b_bound: int,
    f: BiPoly,
    mode: str = "constants",
    *,
    x_max: int | None = None,
    ell_max: int = DEFAULT_ELL_MAX,
    sample_size: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
) -> FamilyReport:
    """Average the per-curve value over the box |a| <= A, |b| <= B.

    mode "constants" averages exact truncated constants; mode "empirical"
    averages observed squarefree ratios up to x_max.  An optional seeded
    sample keeps the empirical mode affordable; results are deterministic
    for a fixed (box, mode, sample_size, seed) regardless of thread count.
    """
    if mode not in ("constants", "empirical"):
        raise ValueError(f"mode must be 'constants' or 'empirical', got {mode!r}")
    if mode == "empirical" and x_max is None:
        raise ValueError("empirical mode needs x_max")
    if f.is_constant:
        raise ValueError("constant polynomials do not define a sequence")
    curves = _box_curves(a_bound, b_bound)
    total = len(curves)
    if sample_size is not None:
        if not 1 <= sample_size <= total:
            raise ValueError(f"sample_size {sample_size} outside 1..{total}")
        rng = random.Random(seed)
        curves = [curves[i] for i in sorted(rng.sample(range(total), sample_size))]
    # Warm the shared local-density caches once before any fan-out.
    generic = constant_generic(f, ell_max)
    jobs = [(c.a, c.b, f, mode, x_max, ell_max) for c in curves]
    workers = _resolve_threads(threads)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_family_eval, jobs, chunksize=64))
    else:
        results = [_family_eval(job) for job in jobs]
    skipped = tuple((a, b, msg) for a, b, msg, _ in results if msg is not None)
    values = [v for _, _, msg, v in results if msg is None]
    if not values:
        raise BudgetError("no curve in the box was computable")
    if mode == "constants":
        mean_value: Fraction | float = sum(values, Fraction(0)) / len(values)
    else:
        mean_value = math.fsum(values) / len(values)
    deviation = abs(float(mean_value) - float(generic.value))
    return FamilyReport(
        mode=mode,
        a_bound=a_bound,
        b_bound=b_bound,
        f=f,
        ell_max=ell_max,
        x_max=x_max,
        total_curves=total,
        evaluated=len(values),
        skipped=skipped,
        sample_size=sample_size,
        seed=seed,
        mean_value=mean_value,
        generic=generic,
        deviation=deviation,
    )
