"""Integer bivariate polynomials f(x, y): canonical term form, exact and
modular evaluation, formal partials, and the built-in sequence definitions.

Throughout the package the first variable x stands for a Frobenius trace
and the second variable y for the prime, so f(a_p, p) is the integer
sequence under study.  The two built-ins are

    koblitz   y + 1 - x     (the group order #E(F_p))
    frobdisc  x^2 - 4*y     (the discriminant of the Frobenius quadratic)

Coefficients are arbitrary Python integers; degrees are capped at 8 per
variable so that modular grid evaluation stays in fixed-width arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import PolyParseError
from .integers import is_prime

MAX_DEGREE = 8

_VARS = ("x", "y")


@dataclass(frozen=True)
class BiPoly:
    """Canonical sparse form: ((deg_x, deg_y, coeff), ...) sorted lexicographically,
    no zero coefficients, no repeated monomials."""

    terms: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for dx, dy, c in self.terms:
            if dx < 0 or dy < 0:
                raise ValueError(f"negative exponent in term {(dx, dy, c)}")
            if dx > MAX_DEGREE or dy > MAX_DEGREE:
                raise ValueError(
                    f"degree {max(dx, dy)} exceeds cap {MAX_DEGREE} in term {(dx, dy, c)}"
                )
            if c == 0:
                raise ValueError(f"zero coefficient term {(dx, dy)}")
            if (dx, dy) in seen:
                raise ValueError(f"repeated monomial {(dx, dy)}")
            seen.add((dx, dy))
        if self.terms != tuple(sorted(self.terms)):
            raise ValueError("terms not in canonical order")

    @property
    def deg_x(self) -> int:
        return max((dx for dx, _, _ in self.terms), default=0)

    @property
    def deg_y(self) -> int:
        return max((dy for _, dy, _ in self.terms), default=0)

    @property
    def is_constant(self) -> bool:
        return all(dx == 0 and dy == 0 for dx, dy, _ in self.terms)

    def coeff_grid(self) -> list[list[int]]:
        """Dense (deg_x+1) x (deg_y+1) coefficient grid, grid[i][j] on x^i y^j."""
        grid = [[0] * (self.deg_y + 1) for _ in range(self.deg_x + 1)]
        for dx, dy, c in self.terms:
            grid[dx][dy] = c
        return grid

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        # render highest-degree terms first, the way the expressions read
        for dx, dy, c in sorted(self.terms, reverse=True):
            mono = "*".join(
                ([] if dx == 0 else [f"x^{dx}" if dx > 1 else "x"])
                + ([] if dy == 0 else [f"y^{dy}" if dy > 1 else "y"])
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+{body}" if c > 0 else f"-{body}")
        return "".join(pieces)


def bipoly(terms: Iterable[tuple[int, int, int]]) -> BiPoly:
    """Normalizing constructor: merges repeated monomials, drops zeros."""
    acc: dict[tuple[int, int], int] = {}
    for dx, dy, c in terms:
        acc[(dx, dy)] = acc.get((dx, dy), 0) + c
    canon = tuple(
        sorted((dx, dy, c) for (dx, dy), c in acc.items() if c != 0)
    )
    return BiPoly(canon)


KOBLITZ = bipoly([(0, 1, 1), (0, 0, 1), (1, 0, -1)])
FROBDISC = bipoly([(2, 0, 1), (0, 1, -4)])

_BUILTINS = {"koblitz": KOBLITZ, "frobdisc": FROBDISC}


def builtin(name: str) -> BiPoly:
    """Look up a named built-in sequence polynomial."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin {name!r}; have {sorted(_BUILTINS)}"
        ) from None


def eval_int(f: BiPoly, x: int, y: int) -> int:
    """Exact integer evaluation."""
    return sum(c * x**dx * y**dy for dx, dy, c in f.terms)


def eval_mod(f: BiPoly, x: int, y: int, m: int) -> int:
    """f(x, y) mod m, in [0, m)."""
    if m < 1:
        raise ValueError(f"need modulus >= 1, got {m}")
    x %= m
    y %= m
    total = 0
    for dx, dy, c in f.terms:
        total += c * pow(x, dx, m) * pow(y, dy, m)
    return total % m


def partial(f: BiPoly, var: str) -> BiPoly:
    """Formal partial derivative with respect to 'x' or 'y'."""
    if var not in _VARS:
        raise ValueError(f"var must be one of {_VARS}, got {var!r}")
    out = []
    for dx, dy, c in f.terms:
        if var == "x" and dx > 0:
            out.append((dx - 1, dy, c * dx))
        elif var == "y" and dy > 0:
            out.append((dx, dy - 1, c * dy))
    return bipoly(out)


def count_singular_pairs(f: BiPoly, p: int) -> int:
    """#{(x, y) in F_p x F_p*: f = f_x = f_y = 0 at (x, y)}, by enumeration.

    A nonzero count signals that f fails to cut a smooth curve over F_p,
    which degrades the sieve heuristics the density constants rest on.
    """
    if p > 200:
        raise ValueError(f"enumeration capped at p <= 200, got {p}")
    if p < 2 or not is_prime(p):
        raise ValueError(f"need a prime p, got {p}")
    fx = partial(f, "x")
    fy = partial(f, "y")
    count = 0
    for x in range(p):
        for y in range(1, p):
            if (
                eval_mod(f, x, y, p) == 0
                and eval_mod(fx, x, y, p) == 0
                and eval_mod(fy, x, y, p) == 0
            ):
                count += 1
    return count


# ---------------------------------------------------------------------------
# text -> BiPoly


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch in _VARS:
            tokens.append(("var", ch, i))
            i += 1
            continue
        if ch in "+-":
            tokens.append(("sign", -1 if ch == "-" else 1, i))
            i += 1
            continue
        if ch == "*":
            tokens.append(("mul", None, i))
            i += 1
            continue
        if ch == "^":
            tokens.append(("pow", None, i))
            i += 1
            continue
        raise PolyParseError(f"unexpected character {ch!r}", i)
    return tokens


def parse_poly(text: str) -> BiPoly:
    """Parse '3*x^2*y - 4*y + 1' style text, or a builtin name, into a BiPoly.

    Grammar: [sign] term {sign term}; term: factor {'*' factor};
    factor: INT | VAR ['^' INT].  Errors carry the byte offset of the
    offending token.
    """
    stripped = text.strip()
    if stripped in _BUILTINS:
        return _BUILTINS[stripped]
    tokens = _tokenize(text)
    if not tokens:
        raise PolyParseError("empty polynomial", 0)
    terms: list[tuple[int, int, int]] = []
    pos = 0
    n = len(tokens)

    def fail(msg: str, at: int | None = None) -> PolyParseError:
        offset = tokens[at][2] if at is not None and at < n else len(text)
        return PolyParseError(msg, offset)

    while pos < n:
        sign = 1
        if tokens[pos][0] == "sign":
            sign = tokens[pos][1]
            pos += 1
        elif terms:
            raise fail("expected '+' or '-' between terms", pos)
        coeff = sign
        dx = dy = 0
        expect_factor = True
        while True:
            if expect_factor:
                if pos >= n:
                    raise fail("dangling operator", None)
                kind, value, _ = tokens[pos]
                if kind == "int":
                    coeff *= value
                    pos += 1
                elif kind == "var":
                    exp = 1
                    pos += 1
                    if pos < n and tokens[pos][0] == "pow":
                        pos += 1
                        if pos >= n or tokens[pos][0] != "int":
                            raise fail("'^' needs an integer exponent", pos)
                        exp = tokens[pos][1]
                        pos += 1
                    if exp > MAX_DEGREE:
                        raise fail(f"exponent {exp} exceeds cap {MAX_DEGREE}", pos - 1)
                    if value == "x":
                        dx += exp
                    else:
                        dy += exp
                else:
                    raise fail("expected a number or variable", pos)
                expect_factor = False
            elif pos < n and tokens[pos][0] == "mul":
                pos += 1
                expect_factor = True
            else:
                break
        if dx > MAX_DEGREE or dy > MAX_DEGREE:
            raise fail(f"term degree exceeds cap {MAX_DEGREE}", pos - 1)
        terms.append((dx, dy, coeff))
    try:
        return bipoly(terms)
    except ValueError as exc:
        raise PolyParseError(str(exc), 0) from None
