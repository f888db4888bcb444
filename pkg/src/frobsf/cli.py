"""Command-line front end: constants, trace sweeps, squarefree experiments.

Subcommands:
    constant-generic   exact generic density constant for a polynomial
    constant-serre     per-curve constant (level-aware finite part)
    ap                 one trace, or the full series to x_max
    pi-sf              empirical squarefree counts vs. predictions
    family-average     box average of constants or empirical ratios
    verify             built-in oracle suite, PASS/FAIL per check

Reports are deterministic for a fixed config.  JSON is rendered with
sorted keys, two-space indent, UTF-8 and a trailing newline; exact
rationals appear as "num/den" strings and floats are clamped to 12
significant digits, so re-reading a report and re-rendering it gives
identical bytes (the wall_clock_s field is the one value that differs
between runs).  CSV uses RFC-4180 quoting with LF line endings.

Exit codes: 0 success, 2 invalid input, 3 budget or capacity exceeded,
1 unexpected failure (and verify failures).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .bipoly import FROBDISC, KOBLITZ, BiPoly, eval_mod, parse_poly
from .errors import CapacityError, FrobsfError
from .frobenius import (
    DEFAULT_DIVISIBILITY_NS,
    SfReport,
    ap,
    ap_series,
    family_average,
    pi_sf,
)
from .gl2 import (
    count_cf,
    count_cf_twisted,
    enumerate_oracle,
    gl2_order,
    local_density,
    trace_det_fiber,
)
from .integers import is_squarefree, kronecker, squarefree_table
from .serre import (
    DEFAULT_ELL_MAX,
    Curve,
    SerreConstant,
    constant_generic,
    constant_serre,
    psi,
    serre_data,
)

COMMANDS = (
    "constant-generic",
    "constant-serre",
    "ap",
    "pi-sf",
    "family-average",
    "verify",
)


@dataclass(frozen=True)
class RunConfig:
    """One fully-validated invocation; run() consumes nothing else."""

    command: str
    f: str | None = None
    curve: tuple[int, int] | None = None
    p: int | None = None
    x_max: int | None = None
    ell_max: int = DEFAULT_ELL_MAX
    a_bound: int | None = None
    b_bound: int | None = None
    mode: str = "constants"
    ns: tuple[int, ...] | None = None
    sample_size: int | None = None
    seed: int = 0
    threads: int | None = None
    allow_truncation: bool = False
    output: str = "-"
    fmt: str | None = None


# ---------------------------------------------------------------------------
# rendering


def _f12(x: float) -> float:
    """Clamp to 12 significant digits (stable across re-rendering)."""
    return float(f"{x:.12g}")


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def render_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _constant_doc(sc: SerreConstant) -> dict:
    return {
        "kind": sc.kind,
        "constant": _frac(sc.value),
        "constant_float": _f12(sc.value_float),
        "ell_max": sc.ell_max,
        "tail_estimate": _f12(sc.tail_estimate),
        "finite_part": _frac(sc.finite_part),
        "generic_part": _frac(sc.generic_part),
        "local_factors": [[ell, _frac(rho)] for ell, rho in sc.local_factors],
        "dropped_primes": list(sc.dropped_primes),
    }


def _sf_doc(report: SfReport) -> dict:
    doc = {
        "x_max": report.x_max,
        "pi_x": report.pi_x,
        "good_count": report.good_count,
        "skipped_primes": list(report.skipped),
        "sf_count": report.sf_count,
        "zero_count": report.zero_count,
        "empirical_ratio": _f12(report.empirical_ratio),
        "divisibility": [
            {
                "n": row.n,
                "observed": row.observed,
                "expected_ratio": _frac(row.expected_ratio),
                "expected_count": _f12(row.expected_count),
            }
            for row in report.divisibility
        ],
    }
    if report.constant is not None:
        doc["constant"] = _constant_doc(report.constant)
    return doc


def _sf_csv(report: SfReport) -> str:
    rows: list[list] = [["n", "observed", "expected_count", "expected_ratio"]]
    for row in report.divisibility:
        rows.append(
            [
                row.n,
                row.observed,
                f"{row.expected_count:.12g}",
                _frac(row.expected_ratio),
            ]
        )
    sc = report.constant
    expected_sf = sc.value_float * report.pi_x if sc is not None else ""
    rows.append(
        [
            "sf",
            report.sf_count,
            f"{expected_sf:.12g}" if sc is not None else "",
            _frac(sc.value) if sc is not None else "",
        ]
    )
    return _render_csv(rows)


# ---------------------------------------------------------------------------
# command bodies


def _parse_f(text: str) -> BiPoly:
    return parse_poly(text)


def _need(config: RunConfig, field: str):
    value = getattr(config, field)
    if value is None:
        raise ValueError(f"{config.command} requires --{field.replace('_', '-')}")
    return value


def _cmd_constant_generic(config: RunConfig) -> tuple[dict, str | None]:
    f = _parse_f(_need(config, "f"))
    sc = constant_generic(f, config.ell_max)
    doc = {
        "command": config.command,
        "inputs": {"f": config.f, "ell_max": config.ell_max},
        "f": str(f),
    }
    doc.update(_constant_doc(sc))
    return doc, None


def _cmd_constant_serre(config: RunConfig) -> tuple[dict, str | None]:
    f = _parse_f(_need(config, "f"))
    a, b = _need(config, "curve")
    curve = Curve(a, b)
    sc = constant_serre(curve, f, config.ell_max, config.allow_truncation)
    sd = serre_data(curve)
    doc = {
        "command": config.command,
        "inputs": {
            "f": config.f,
            "curve": [a, b],
            "ell_max": config.ell_max,
            "allow_truncation": config.allow_truncation,
        },
        "f": str(f),
        "delta": sd.delta,
        "delta_sf": sd.delta_sf,
        "m_e": sd.m_e,
    }
    doc.update(_constant_doc(sc))
    return doc, None


def _cmd_ap(config: RunConfig) -> tuple[dict, str | None]:
    a, b = _need(config, "curve")
    curve = Curve(a, b)
    if (config.p is None) == (config.x_max is None):
        raise ValueError("ap requires exactly one of --p or --x-max")
    if config.p is not None:
        trace = ap(curve, config.p)
        doc = {
            "command": config.command,
            "inputs": {"curve": [a, b], "p": config.p},
            "p": config.p,
            "a_p": trace,
        }
        return doc, _render_csv([["p", "a_p"], [config.p, trace]])
    series = ap_series(curve, config.x_max)
    pairs = [[int(p), int(t)] for p, t in zip(series.primes, series.traces)]
    doc = {
        "command": config.command,
        "inputs": {"curve": [a, b], "x_max": config.x_max},
        "x_max": series.x_max,
        "good_count": len(pairs),
        "skipped_primes": list(series.skipped),
    }
    if config.fmt == "csv":
        text = _render_csv([["p", "a_p"]] + pairs)
        return doc, text
    doc["pairs"] = pairs
    return doc, None


def _cmd_pi_sf(config: RunConfig) -> tuple[dict, str | None]:
    f = _parse_f(_need(config, "f"))
    a, b = _need(config, "curve")
    x_max = _need(config, "x_max")
    curve = Curve(a, b)
    ns = config.ns if config.ns is not None else DEFAULT_DIVISIBILITY_NS
    for n in ns:
        if n < 2 or not is_squarefree(n):
            raise ValueError(f"divisibility modulus {n} is not squarefree >= 2")
    report = pi_sf(curve, f, x_max, ns=ns, ell_max=config.ell_max)
    doc = {
        "command": config.command,
        "inputs": {
            "f": config.f,
            "curve": [a, b],
            "x_max": x_max,
            "ell_max": config.ell_max,
            "ns": list(ns),
        },
        "f": str(f),
    }
    doc.update(_sf_doc(report))
    if config.fmt == "csv":
        return doc, _sf_csv(report)
    return doc, None


def _cmd_family_average(config: RunConfig) -> tuple[dict, str | None]:
    f = _parse_f(_need(config, "f"))
    a_bound = _need(config, "a_bound")
    b_bound = _need(config, "b_bound")
    report = family_average(
        a_bound,
        b_bound,
        f,
        mode=config.mode,
        x_max=config.x_max,
        ell_max=config.ell_max,
        sample_size=config.sample_size,
        seed=config.seed,
        threads=config.threads,
    )
    mean = report.mean_value
    doc = {
        "command": config.command,
        "inputs": {
            "f": config.f,
            "a_bound": a_bound,
            "b_bound": b_bound,
            "mode": config.mode,
            "x_max": config.x_max,
            "ell_max": config.ell_max,
            "sample_size": config.sample_size,
            "seed": config.seed,
        },
        "f": str(f),
        "mode": report.mode,
        "total_curves": report.total_curves,
        "evaluated": report.evaluated,
        "skipped": [[sa, sb, msg] for sa, sb, msg in report.skipped],
        "mean": _frac(mean) if isinstance(mean, Fraction) else _f12(mean),
        "mean_float": _f12(report.mean_float),
        "deviation": _f12(report.deviation),
        "generic": _constant_doc(report.generic),
    }
    return doc, None


_COMMAND_BODIES = {
    "constant-generic": _cmd_constant_generic,
    "constant-serre": _cmd_constant_serre,
    "ap": _cmd_ap,
    "pi-sf": _cmd_pi_sf,
    "family-average": _cmd_family_average,
}


def run(config: RunConfig) -> int:
    """Execute a config, write the report, map failures to exit codes."""
    if config.command == "verify":
        return _run_verify(config)
    try:
        start = time.perf_counter()
        doc, csv_text = _COMMAND_BODIES[config.command](config)
        doc["wall_clock_s"] = _f12(time.perf_counter() - start)
        if config.fmt == "csv":
            if csv_text is None:
                raise ValueError(f"{config.command} has no CSV format")
            _emit(csv_text, config.output)
        else:
            _emit(render_json(doc), config.output)
        return 0
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FrobsfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


# ---------------------------------------------------------------------------
# verify


def _check_gl2_order() -> None:
    for m in (2, 3, 4, 5, 6):
        found = 0
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    for d in range(m):
                        if math.gcd(a * d - b * c, m) == 1:
                            found += 1
        assert found == gl2_order(m), (m, found, gl2_order(m))


def _check_count_enumeration() -> None:
    for f in (KOBLITZ, FROBDISC):
        for m in range(2, 10):
            assert count_cf(f, m) == enumerate_oracle(f, m), (str(f), m)


def _check_disc_identity() -> None:
    assert local_density(FROBDISC, 2) == Fraction(2, 3)
    for ell in (3, 5, 7):
        want = Fraction(ell * ell + ell - 1, ell * ell * (ell * ell - 1))
        assert local_density(FROBDISC, ell) == want, ell


def _check_trace_identity() -> None:
    for ell in (2, 3, 5, 7):
        want = Fraction(
            ell**3 - ell - 1, ell * ell * (ell * ell - 1) * (ell - 1)
        )
        assert local_density(KOBLITZ, ell) == want, ell


def _check_fiber_formula() -> None:
    for p in (3, 5, 7, 11):
        fiber = trace_det_fiber(p)
        for t in range(p):
            for d in range(1, p):
                want = p * p + p * kronecker(t * t - 4 * d, p)
                assert fiber.count(t, d) == want, (p, t, d)


def _check_twisted_enumeration() -> None:
    q, p = 9, 3
    for f in (KOBLITZ, FROBDISC):
        f_ok = [[eval_mod(f, t, d, q) == 0 for d in range(q)] for t in range(q)]
        total = 0
        for a in range(q):
            for d in range(q):
                ad, t = a * d, (a + d) % q
                for b in range(q):
                    for c in range(q):
                        det = (ad - b * c) % q
                        if det % p and f_ok[t][det]:
                            total += kronecker(det, p)
        assert total == count_cf_twisted(f, q, ("legendre", p)), str(f)


def _check_kronecker() -> None:
    for a in range(-20, 21):
        for n1 in range(1, 16, 2):
            for n2 in range(1, 16, 2):
                lhs = kronecker(a, n1 * n2)
                rhs = kronecker(a, n1) * kronecker(a, n2)
                assert lhs == rhs, (a, n1, n2)


def _check_squarefree_table() -> None:
    table = squarefree_table(10_000)
    for n in range(1, 10_001):
        direct = all(n % (p * p) for p in range(2, math.isqrt(n) + 1))
        assert table[n] == direct, n


def _check_psi_homomorphism() -> None:
    sd = serre_data(Curve(-1, 0))
    assert sd.m_e == 2
    mats = [
        (a, b, c, d)
        for a in range(2)
        for b in range(2)
        for c in range(2)
        for d in range(2)
        if (a * d - b * c) % 2
    ]
    for g in mats:
        for h in mats:
            gh = (
                g[0] * h[0] + g[1] * h[2],
                g[0] * h[1] + g[1] * h[3],
                g[2] * h[0] + g[3] * h[2],
                g[2] * h[1] + g[3] * h[3],
            )
            assert psi(gh, sd) == psi(g, sd) * psi(h, sd), (g, h)


def _check_ap_naive() -> None:
    for a, b in ((-1, 0), (0, 1), (2, 3)):
        curve = Curve(a, b)
        for p in (5, 7, 11, 13, 17, 19, 23):
            if curve.delta % p == 0:
                continue
            points = 1
            for x in range(p):
                rhs = (x * x * x + a * x + b) % p
                for y in range(p):
                    if (y * y) % p == rhs:
                        points += 1
            assert ap(curve, p) == p + 1 - points, (a, b, p)


_VERIFY_CHECKS = (
    ("gl2-order-enumeration", _check_gl2_order),
    ("count-vs-oracle", _check_count_enumeration),
    ("disc-local-identity", _check_disc_identity),
    ("trace-local-identity", _check_trace_identity),
    ("fiber-closed-form", _check_fiber_formula),
    ("twisted-vs-enumeration", _check_twisted_enumeration),
    ("kronecker-multiplicative", _check_kronecker),
    ("squarefree-table", _check_squarefree_table),
    ("psi-homomorphism", _check_psi_homomorphism),
    ("ap-vs-naive", _check_ap_naive),
)


def _run_verify(config: RunConfig) -> int:
    lines = []
    failed = 0
    for name, check in _VERIFY_CHECKS:
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failed += 1
            lines.append(f"FAIL {name}: {exc!r}")
        else:
            lines.append(f"PASS {name}")
    lines.append(f"{len(_VERIFY_CHECKS) - failed}/{len(_VERIFY_CHECKS)} checks passed")
    _emit("\n".join(lines) + "\n", config.output)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# argument parsing


def _curve_arg(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers 'a,b', got {text!r}")


def _ns_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'n1,n2,...', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frobsf",
        description="Squarefree densities of polynomial values at Frobenius traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, fmt_default: str) -> None:
        p.add_argument("--output", default="-", help="report path ('-' = stdout)")
        p.add_argument(
            "--format",
            dest="fmt",
            choices=("json", "csv"),
            default=fmt_default,
        )

    p = sub.add_parser("constant-generic", help="generic density constant")
    p.add_argument("--f", required=True, help="polynomial text or builtin name")
    p.add_argument("--ell-max", type=int, default=DEFAULT_ELL_MAX)
    add_common(p, "json")

    p = sub.add_parser("constant-serre", help="per-curve density constant")
    p.add_argument("--f", required=True)
    p.add_argument("--curve", type=_curve_arg, required=True, metavar="A,B")
    p.add_argument("--ell-max", type=int, default=DEFAULT_ELL_MAX)
    p.add_argument("--allow-truncation", action="store_true")
    add_common(p, "json")

    p = sub.add_parser("ap", help="Frobenius trace(s)")
    p.add_argument("--curve", type=_curve_arg, required=True, metavar="A,B")
    p.add_argument("--p", type=int)
    p.add_argument("--x-max", type=int)
    add_common(p, "csv")

    p = sub.add_parser("pi-sf", help="empirical squarefree statistics")
    p.add_argument("--f", required=True)
    p.add_argument("--curve", type=_curve_arg, required=True, metavar="A,B")
    p.add_argument("--x-max", type=int, required=True)
    p.add_argument("--ell-max", type=int, default=DEFAULT_ELL_MAX)
    p.add_argument("--ns", type=_ns_arg, default=None, metavar="N1,N2,...")
    add_common(p, "csv")

    p = sub.add_parser("family-average", help="box average vs. generic constant")
    p.add_argument("--f", required=True)
    p.add_argument("--a-bound", type=int, required=True)
    p.add_argument("--b-bound", type=int, required=True)
    p.add_argument("--mode", choices=("constants", "empirical"), default="constants")
    p.add_argument("--x-max", type=int)
    p.add_argument("--ell-max", type=int, default=DEFAULT_ELL_MAX)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    add_common(p, "json")

    p = sub.add_parser("verify", help="run the built-in oracle suite")
    p.add_argument("--output", default="-")

    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if v is not None}
    fields.setdefault("command", "verify")
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in fields.items() if k in known})


def _normalize_argv(argv: list[str]) -> list[str]:
    """Glue '--curve -1,0' into '--curve=-1,0' so negative entries parse."""
    out: list[str] = []
    expect_value = False
    for tok in argv:
        if expect_value:
            out[-1] = f"{out[-1]}={tok}"
            expect_value = False
        elif tok == "--curve":
            out.append(tok)
            expect_value = True
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    ns = build_parser().parse_args(_normalize_argv(list(argv)))
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
