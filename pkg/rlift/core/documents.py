"""Input documents and artifact serialization.

A Lie bialgebra document has the fields ``dim``, optional ``basis`` names, ``bracket`` as
a list of ``[i, j, k, num, den]`` entries meaning [e_i, e_j] contains (num/den) e_k, and
``r`` as a list of ``[i, j, num, den]`` entries. Indices are 1-based; numerators and
denominators are integers or integer strings. JSON documents are read as YAML.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any

import yaml

from rlift.core.models import LieBialgebra, OutputFormat

if TYPE_CHECKING:
    from rlift.services.formalgroup import TruncatedElement

_INTEGER = re.compile(r"^[+-]?\d+$")


class InputFormatError(ValueError):
    """Raised when an input document is malformed."""

    pass


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool):
        raise InputFormatError(f"{where}: booleans are not numbers")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and _INTEGER.match(value.strip()):
        return int(value.strip())
    raise InputFormatError(f"{where}: expected an integer, got {value!r}")


def _rational(num: Any, den: Any, where: str) -> Fraction:
    numerator = _integer(num, where)
    denominator = _integer(den, where)
    if denominator == 0:
        raise InputFormatError(f"{where}: zero denominator")
    return Fraction(numerator, denominator)


def _index(value: Any, dim: int, where: str) -> int:
    index = _integer(value, where)
    if not 1 <= index <= dim:
        raise InputFormatError(f"{where}: index {index} outside 1..{dim}")
    return index - 1


def _entries(data: dict[str, Any], key: str, width: int) -> list[list[Any]]:
    entries = data.get(key) or []
    if not isinstance(entries, list):
        raise InputFormatError(f"'{key}' must be a list")
    for n, entry in enumerate(entries, start=1):
        if not isinstance(entry, list) or len(entry) != width:
            raise InputFormatError(f"{key} entry {n}: expected a list of {width} values")
    return entries


def bialgebra_from_dict(data: Any) -> LieBialgebra:
    """Build a LieBialgebra from a parsed document.

    Raises:
        InputFormatError: On malformed rationals, out-of-range indices, [x, x] != 0
            or conflicting entries
    """
    if not isinstance(data, dict):
        raise InputFormatError("Document must be a mapping with 'dim', 'bracket' and 'r'")
    if "dim" not in data:
        raise InputFormatError("Missing field 'dim'")
    dim = _integer(data["dim"], "dim")
    if dim < 1:
        raise InputFormatError(f"dim must be positive, got {dim}")

    basis = data.get("basis") or []
    if basis:
        if not isinstance(basis, list) or len(basis) != dim:
            raise InputFormatError(f"'basis' must list {dim} names")
        if len(set(map(str, basis))) != dim:
            raise InputFormatError("Basis names must be distinct")

    bracket: dict[tuple[int, int, int], Fraction] = {}
    for n, (i, j, k, num, den) in enumerate(_entries(data, "bracket", 5), start=1):
        where = f"bracket entry {n}"
        a, b, c = (_index(v, dim, where) for v in (i, j, k))
        value = _rational(num, den, where)
        if a == b:
            if value:
                raise InputFormatError(f"{where}: [x, x] must vanish")
            continue
        key, signed = ((a, b, c), value) if a < b else ((b, a, c), -value)
        if key in bracket and bracket[key] != signed:
            raise InputFormatError(f"{where}: conflicts with an earlier entry for the same bracket")
        bracket[key] = signed

    r: dict[tuple[int, int], Fraction] = {}
    for n, (i, j, num, den) in enumerate(_entries(data, "r", 4), start=1):
        where = f"r entry {n}"
        key2 = (_index(i, dim, where), _index(j, dim, where))
        value = _rational(num, den, where)
        if key2 in r and r[key2] != value:
            raise InputFormatError(f"{where}: conflicts with an earlier entry")
        r[key2] = value

    return LieBialgebra.from_sparse(
        dim,
        {key: v for key, v in bracket.items() if v},
        {key: v for key, v in r.items() if v},
        basis_names=tuple(str(name) for name in basis),
    )


def parse_input(text: str) -> LieBialgebra:
    """Parse a JSON or YAML document into a LieBialgebra.

    Raises:
        InputFormatError: If the text is not valid YAML/JSON or violates the schema
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise InputFormatError(f"Invalid document: {e}")
    return bialgebra_from_dict(data)


def load_bialgebra(path: Path) -> LieBialgebra:
    """Read and parse an input document.

    Raises:
        InputFormatError: If the file can't be read or parsed
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(f"Cannot read {path}: {e}")
    return parse_input(text)


def fraction_string(value: Fraction) -> str:
    """``num/den`` with the denominator always present."""
    return f"{value.numerator}/{value.denominator}"


def serialize_bialgebra(L: LieBialgebra) -> dict[str, Any]:
    """Canonical document for L: one orientation per bracket, entries sorted."""
    d = L.dim
    bracket = [
        [i + 1, j + 1, k + 1, str(L.bracket[i][j][k].numerator), str(L.bracket[i][j][k].denominator)]
        for i in range(d)
        for j in range(i + 1, d)
        for k in range(d)
        if L.bracket[i][j][k]
    ]
    r = [
        [i + 1, j + 1, str(L.r[i][j].numerator), str(L.r[i][j].denominator)]
        for i in range(d)
        for j in range(d)
        if L.r[i][j]
    ]
    return {"dim": d, "basis": list(L.basis_names), "bracket": bracket, "r": r}


def element_records(element: TruncatedElement) -> list[dict[str, Any]]:
    """Sorted ``{exponents, coeff}`` records of an element."""
    return element.records()


def generator_key(index: int, leg: int) -> str:
    """Artifact key of the generator x_index on a leg (both 1-based)."""
    return f"x{index}@{leg}"


def dump_document(data: dict[str, Any], output_format: OutputFormat = OutputFormat.JSON) -> str:
    """Deterministic JSON or YAML text of an artifact document."""
    if output_format is OutputFormat.YAML:
        return yaml.safe_dump(data, sort_keys=True, default_flow_style=None, allow_unicode=True)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
