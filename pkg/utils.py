"""
Shared helpers: exact number formatting and source loading
"""

from fractions import Fraction
from pathlib import Path
from typing import Union

from errors import InvalidWeight, ParseError


def _terminates(denominator: int) -> bool:
    for prime in (2, 5):
        while denominator % prime == 0:
            denominator //= prime
    return denominator == 1


def format_rational(value: Fraction) -> str:
    """Integer when integral, exact decimal when finite, otherwise 'p/q'"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    if not _terminates(value.denominator):
        return f"{value.numerator}/{value.denominator}"

    places = 0
    scaled = abs(value)
    while scaled.denominator != 1:
        scaled *= 10
        places += 1
    digits = str(scaled.numerator).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def json_number(value: Fraction) -> Union[int, str]:
    """JSON form of an exact score: an integer, or its format_rational text"""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return format_rational(value)


def parse_weight(text: str) -> Fraction:
    """Positive decimal or 'p/q' weight"""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidWeight(f"not a number: '{text}'", details={"weight": text})
    if value <= 0:
        raise InvalidWeight(f"weights must be positive, got {text}", details={"weight": text})
    return value


def load_source(path: Union[str, Path], kind: str):
    """Read a UTF-8 input file into a SourceDocument"""
    # Lazy import to avoid circular imports
    from schemas import SourceDocument

    path = Path(path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = raw[:e.start].decode("utf-8")
        line = prefix.count("\n") + 1
        column = len(prefix) - prefix.rfind("\n")
        raise ParseError(f"invalid UTF-8 byte 0x{raw[e.start]:02x}",
                         details={"offset": e.start}, line=line, column=column)
    return SourceDocument(path=str(path), text=text, kind=kind)
