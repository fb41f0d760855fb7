"""
Units Module - Runtime Physical Units

A Unit is an exponent vector over the seven SI base dimensions plus a
decimal scale relative to the coherent SI unit. Units are plain immutable
values built at runtime, so new ones can be registered without touching
the library.

Scales are stored as exact rationals, which keeps compositions of power-of-ten
scales exact: angstrom * angstrom is exactly 1e-20 m^2 and its square root is
exactly angstrom again.

Textual grammar:
    [NUMBER ['/' NUMBER] '*'] SYMBOL['^'n] (('*' | '/') SYMBOL['^'n])*

Example:
    from src.units import parse_unit, format_unit, angstrom, m

    velocity = parse_unit("m/s")
    area = angstrom ** 2
    print(format_unit(area))           # angstrom^2
    print(area.factor_to(m ** 2))      # 1e-20
"""

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .errors import UnitError, UnitOverflowError, UnitParseError


BASE_SYMBOLS: Tuple[str, ...] = ("m", "kg", "s", "A", "K", "mol", "cd")

# Storable exponent range; leaving it is an error, never wraparound
EXP_MIN = -128
EXP_MAX = 127

# Exponent search window used when composing a unit string from scaled symbols
_SEARCH_POWERS = tuple(k for k in range(-8, 9) if k != 0)

ScaleLike = Union[Fraction, int, float, str]


def _as_fraction(value: ScaleLike) -> Fraction:
    """Convert a scale to an exact rational; floats go through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise UnitError("unit scale must be numeric")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise UnitError(f"unit scale must be finite, got {value!r}")
        return Fraction(repr(value))
    return Fraction(str(value))


def _check_exps(exps: Tuple[int, ...]) -> Tuple[int, ...]:
    for e in exps:
        if e < EXP_MIN or e > EXP_MAX:
            raise UnitOverflowError(
                f"unit exponent {e} outside storable range [{EXP_MIN}, {EXP_MAX}]"
            )
    return exps


@dataclass(frozen=True)
class Unit:
    """
    Immutable physical unit.

    Attributes:
        scale: Multiplier to the coherent SI unit (exact rational, > 0)
        exps: Exponents over (m, kg, s, A, K, mol, cd)
        name: Display name for table entries; ignored by equality
    """

    scale: Fraction = Fraction(1)
    exps: Tuple[int, ...] = (0,) * len(BASE_SYMBOLS)
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        scale = _as_fraction(self.scale)
        if scale <= 0:
            raise UnitError(f"unit scale must be positive, got {scale}")
        exps = tuple(int(e) for e in self.exps)
        if len(exps) != len(BASE_SYMBOLS):
            raise UnitError(
                f"unit needs {len(BASE_SYMBOLS)} exponents, got {len(exps)}"
            )
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "exps", _check_exps(exps))

    def compatible(self, other: "Unit") -> bool:
        """True if both units measure the same dimension."""
        return self.exps == other.exps

    @property
    def is_dimensionless(self) -> bool:
        """True for dimensionless units with scale 1 (counts and rad included)."""
        return self.scale == 1 and not any(self.exps)

    def factor_to(self, target: "Unit") -> float:
        """
        Multiplicative factor converting values in this unit to target.

        Raises:
            UnitError: If the units are not compatible
        """
        if not self.compatible(target):
            raise UnitError(
                f"cannot convert {format_unit(self)} to {format_unit(target)}"
            )
        return float(self.scale / target.scale)

    def __mul__(self, other: "Unit") -> "Unit":
        return unit_mul(self, other)

    def __truediv__(self, other: "Unit") -> "Unit":
        return unit_div(self, other)

    def __pow__(self, n: int) -> "Unit":
        return unit_pow(self, n)

    def __str__(self) -> str:
        return format_unit(self)

    def __repr__(self) -> str:
        return f"Unit({format_unit(self)})"


def _base(index: int) -> Tuple[int, ...]:
    exps = [0] * len(BASE_SYMBOLS)
    exps[index] = 1
    return tuple(exps)


class NamedUnitTable:
    """
    Mapping of unit symbols to units.

    Registration order matters for formatting: when several entries match a
    unit exactly, the first registered wins (so plain dimensionless prints as
    "dimensionless", never "counts").
    """

    def __init__(self):
        self._entries: Dict[str, Unit] = {}

    def register(self, symbol: str, unit: Unit) -> Unit:
        """
        Add a symbol to the table.

        Args:
            symbol: Identifier-like unit symbol
            unit: Unit the symbol stands for

        Returns:
            The registered unit, carrying the symbol as display name
        """
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", symbol):
            raise UnitParseError(f"invalid unit symbol {symbol!r}", symbol)
        named = Unit(scale=unit.scale, exps=unit.exps, name=symbol)
        self._entries[symbol] = named
        _format_cached.cache_clear()
        return named

    def lookup(self, symbol: str) -> Unit:
        """Get the unit for a symbol, raising UnitParseError if unknown."""
        try:
            return self._entries[symbol]
        except KeyError:
            raise UnitParseError(f"unknown unit symbol {symbol!r}", symbol) from None

    def find(self, unit: Unit) -> Optional[str]:
        """First symbol whose unit equals unit exactly, or None."""
        for symbol, entry in self._entries.items():
            if entry == unit:
                return symbol
        return None

    def scaled_symbols(self) -> List[Tuple[str, Unit]]:
        """Entries with a scale other than 1, in registration order."""
        return [(s, u) for s, u in self._entries.items() if u.scale != 1]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


def register_unit(symbol: str, scale: ScaleLike, exps: Tuple[int, ...]) -> Unit:
    """Register a new unit symbol in the default table."""
    return TABLE.register(symbol, Unit(scale=scale, exps=exps))


def unit_mul(a: Unit, b: Unit) -> Unit:
    """Product of two units: scales multiply, exponents add."""
    exps = tuple(x + y for x, y in zip(a.exps, b.exps))
    return Unit(scale=a.scale * b.scale, exps=_check_exps(exps))


def unit_div(a: Unit, b: Unit) -> Unit:
    """Quotient of two units: scales divide, exponents subtract."""
    exps = tuple(x - y for x, y in zip(a.exps, b.exps))
    return Unit(scale=a.scale / b.scale, exps=_check_exps(exps))


def unit_pow(a: Unit, n: int) -> Unit:
    """Integer power of a unit."""
    if isinstance(n, bool) or int(n) != n:
        raise UnitError(f"unit power must be an integer, got {n!r}")
    n = int(n)
    exps = tuple(x * n for x in a.exps)
    return Unit(scale=a.scale ** n, exps=_check_exps(exps))


def _exact_sqrt(value: Fraction) -> Fraction:
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return Fraction(repr(math.sqrt(float(value))))


def unit_sqrt(a: Unit) -> Unit:
    """
    Square root of a unit.

    Raises:
        UnitError: If any exponent is odd
    """
    if any(e % 2 for e in a.exps):
        raise UnitError(f"cannot take square root of unit {format_unit(a)}")
    return Unit(scale=_exact_sqrt(a.scale), exps=tuple(e // 2 for e in a.exps))


def as_unit(value: Union[Unit, str, None]) -> Unit:
    """Accept a Unit, a unit string or None (dimensionless)."""
    if value is None:
        return dimensionless
    if isinstance(value, Unit):
        return value
    if isinstance(value, str):
        return parse_unit(value)
    raise UnitError(f"cannot interpret {value!r} as a unit")


_TERM = re.compile(
    r"\s*(?:(?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?)"
    r"|(?P<sym>[A-Za-z_][A-Za-z_0-9]*))"
    r"(?:\s*\^\s*(?P<exp>[-+]?[0-9]+))?\s*"
)


def parse_unit(text: str, table: Optional[NamedUnitTable] = None) -> Unit:
    """
    Parse a unit string.

    Args:
        text: Unit text, e.g. "m/s^2" or "angstrom"
        table: Symbol table (default: the module table)

    Returns:
        Parsed Unit; a bare table symbol keeps its display name

    Raises:
        UnitParseError: On unknown symbols or malformed text
    """
    table = table or TABLE
    stripped = text.strip() if isinstance(text, str) else ""
    if not stripped:
        raise UnitParseError(f"empty unit string {text!r}", "")
    if stripped in table:
        return table.lookup(stripped)

    result = dimensionless
    op = "*"
    pos = 0
    first = True
    # a leading factor may be written as num/den
    in_factor = False
    while True:
        match = _TERM.match(stripped, pos)
        if not match or match.end() == pos:
            token = stripped[pos:].split()[0] if stripped[pos:].split() else stripped[pos:]
            raise UnitParseError(f"unexpected token {token!r} in unit {text!r}", token)
        if match.group("num") is not None:
            denominator = in_factor and op == "/"
            if not (first or denominator) or match.group("exp") is not None:
                token = match.group(0).strip()
                raise UnitParseError(
                    f"numeric factor only allowed at the start of {text!r}", token
                )
            term = Unit(scale=Fraction(match.group("num")))
            in_factor = first
        else:
            term = table.lookup(match.group("sym"))
            in_factor = False
        power = int(match.group("exp")) if match.group("exp") is not None else 1
        term = unit_pow(term, power)
        result = unit_mul(result, term) if op == "*" else unit_div(result, term)
        first = False
        pos = match.end()
        if pos >= len(stripped):
            break
        op = stripped[pos]
        if op not in "*/":
            raise UnitParseError(f"unexpected token {op!r} in unit {text!r}", op)
        pos += 1
    return result


def _term(symbol: str, power: int) -> str:
    return symbol if power == 1 else f"{symbol}^{power}"


def _join_terms(terms: List[Tuple[str, int]]) -> str:
    positive = [_term(sym, p) for sym, p in terms if p > 0]
    negative = [_term(sym, -p) for sym, p in terms if p < 0]
    if not positive:
        return "*".join(_term(sym, p) for sym, p in terms)
    text = "*".join(positive)
    for item in negative:
        text += "/" + item
    return text


def _base_terms(exps: Tuple[int, ...]) -> List[Tuple[str, int]]:
    return [(sym, e) for sym, e in zip(BASE_SYMBOLS, exps) if e]


def _compose(unit: Unit, table: NamedUnitTable) -> Optional[str]:
    """Express unit as scaled table symbols times base symbols, cheapest first."""
    scaled = table.scaled_symbols()
    candidates = []
    for (sym, su), k in itertools.product(scaled, _SEARCH_POWERS):
        candidates.append((abs(k), ((sym, su, k),)))
    for (pair, (k1, k2)) in itertools.product(
        itertools.combinations(scaled, 2),
        itertools.product(_SEARCH_POWERS, _SEARCH_POWERS),
    ):
        (s1, u1), (s2, u2) = pair
        candidates.append((abs(k1) + abs(k2), ((s1, u1, k1), (s2, u2, k2))))
    candidates.sort(key=lambda c: c[0])

    for _, picks in candidates:
        scale = Fraction(1)
        exps = list(unit.exps)
        for _, su, k in picks:
            scale *= su.scale ** k
            exps = [e - k * x for e, x in zip(exps, su.exps)]
        if scale != unit.scale:
            continue
        terms = [(sym, k) for sym, _, k in picks] + _base_terms(tuple(exps))
        return _join_terms(terms)
    return None


def _format_scale(scale: Fraction) -> str:
    """Shortest decimal that parses back to scale exactly, else num/den."""
    decimal = repr(float(scale))
    if Fraction(decimal) == scale:
        return decimal
    return f"{scale.numerator}/{scale.denominator}"


@lru_cache(maxsize=1024)
def _format_cached(scale: Fraction, exps: Tuple[int, ...]) -> str:
    unit = Unit(scale=scale, exps=exps)
    symbol = TABLE.find(unit)
    if symbol is not None:
        return symbol
    if scale == 1:
        return _join_terms(_base_terms(exps))
    composed = _compose(unit, TABLE)
    if composed is not None:
        return composed
    factor = _format_scale(scale)
    if not any(exps):
        return factor
    return factor + "*" + "*".join(_term(sym, e) for sym, e in _base_terms(exps))


def format_unit(unit: Unit) -> str:
    """
    Render a unit as text.

    Named units print their symbol. Otherwise an exact table match is
    preferred, then a product of scaled table symbols and base symbols.
    """
    if unit.name is not None:
        return unit.name
    return _format_cached(unit.scale, unit.exps)


TABLE = NamedUnitTable()

dimensionless = TABLE.register("dimensionless", Unit())
counts = TABLE.register("counts", Unit())
rad = TABLE.register("rad", Unit())
m = TABLE.register("m", Unit(exps=_base(0)))
kg = TABLE.register("kg", Unit(exps=_base(1)))
s = TABLE.register("s", Unit(exps=_base(2)))
A = TABLE.register("A", Unit(exps=_base(3)))
K = TABLE.register("K", Unit(exps=_base(4)))
mol = TABLE.register("mol", Unit(exps=_base(5)))
cd = TABLE.register("cd", Unit(exps=_base(6)))
angstrom = TABLE.register("angstrom", Unit(scale=Fraction(1, 10**10), exps=_base(0)))
us = TABLE.register("us", Unit(scale=Fraction(1, 10**6), exps=_base(2)))
ms = TABLE.register("ms", Unit(scale=Fraction(1, 10**3), exps=_base(2)))
ns = TABLE.register("ns", Unit(scale=Fraction(1, 10**9), exps=_base(2)))

