"""Tests for input documents and artifact serialization."""

import json
from fractions import Fraction

import pytest
import yaml

from rlift.core.documents import (
    InputFormatError,
    bialgebra_from_dict,
    dump_document,
    fraction_string,
    generator_key,
    load_bialgebra,
    parse_input,
    serialize_bialgebra,
)
from rlift.core.models import OutputFormat
from tests.conftest import SL2_DOCUMENT, TRIANGULAR_DOCUMENT, sl2, triangular


class TestParseInput:
    """Tests for reading Lie bialgebra documents."""

    def test_sl2_document(self):
        """Test the sl2 document gives the fixture algebra."""
        L = parse_input(json.dumps(SL2_DOCUMENT))
        expected = sl2()

        assert L.dim == 3
        assert L.basis_names == ("h", "e", "f")
        assert L.bracket == expected.bracket
        assert L.r == expected.r
        assert L.r[0][0] == Fraction(1, 4)

    def test_yaml_document(self):
        """Test YAML input with integer values."""
        L = parse_input(yaml.safe_dump(TRIANGULAR_DOCUMENT))
        assert L.bracket == triangular().bracket
        assert L.r == triangular().r

    def test_default_basis_names(self):
        """Test that missing basis names are filled in."""
        L = bialgebra_from_dict({"dim": 2, "bracket": [], "r": []})
        assert L.basis_names == ("e1", "e2")

    def test_reversed_orientation(self):
        """Test that [e_j, e_i] entries are stored with the opposite sign."""
        L = bialgebra_from_dict({"dim": 2, "bracket": [[2, 1, 2, -1, 1]], "r": []})
        assert L.bracket[0][1][1] == 1
        assert L.bracket[1][0][1] == -1

    def test_load_from_file(self, tmp_path):
        """Test loading a document from disk."""
        path = tmp_path / "sl2.json"
        path.write_text(json.dumps(SL2_DOCUMENT))
        assert load_bialgebra(path).r == sl2().r

    def test_missing_file(self, tmp_path):
        """Test that an unreadable file is an input error."""
        with pytest.raises(InputFormatError, match="Cannot read"):
            load_bialgebra(tmp_path / "missing.json")


class TestMalformedInput:
    """Tests for rejected documents."""

    @pytest.mark.parametrize(
        "document,message",
        [
            ({"dim": 2, "bracket": [[1, 1, 2, 1, 1]], "r": []}, r"\[x, x\] must vanish"),
            ({"dim": 2, "bracket": [[1, 3, 2, 1, 1]], "r": []}, "outside 1..2"),
            ({"dim": 2, "bracket": [], "r": [[1, 2, 1, 0]]}, "zero denominator"),
            ({"dim": 2, "bracket": [], "r": [[1, 2, "0.5", 1]]}, "expected an integer"),
            ({"dim": 2, "bracket": [], "r": [[1, 2, 0.5, 1]]}, "expected an integer"),
            ({"dim": 2, "bracket": [], "r": [[1, 2, True, 1]]}, "booleans"),
            ({"dim": 2, "bracket": [[1, 2, 2]], "r": []}, "list of 5 values"),
            ({"bracket": [], "r": []}, "Missing field 'dim'"),
            ({"dim": 0, "bracket": [], "r": []}, "positive"),
            ({"dim": 2, "basis": ["h"], "bracket": [], "r": []}, "must list 2 names"),
            ({"dim": 2, "basis": ["h", "h"], "bracket": [], "r": []}, "distinct"),
        ],
    )
    def test_rejected(self, document, message):
        """Test that malformed documents raise InputFormatError."""
        with pytest.raises(InputFormatError, match=message):
            bialgebra_from_dict(document)

    def test_conflicting_bracket(self):
        """Test that [e1, e2] and [e2, e1] must agree."""
        document = {"dim": 2, "bracket": [[1, 2, 2, 1, 1], [2, 1, 2, 1, 1]], "r": []}
        with pytest.raises(InputFormatError, match="conflicts"):
            bialgebra_from_dict(document)

    def test_conflicting_r(self):
        """Test that r entries may not repeat with different values."""
        document = {"dim": 2, "bracket": [], "r": [[1, 2, 1, 1], [1, 2, 2, 1]]}
        with pytest.raises(InputFormatError, match="conflicts"):
            bialgebra_from_dict(document)

    def test_not_a_mapping(self):
        """Test that a list document is rejected."""
        with pytest.raises(InputFormatError):
            parse_input("[1, 2, 3]")

    def test_invalid_syntax(self):
        """Test that unparseable text is rejected."""
        with pytest.raises(InputFormatError, match="Invalid document"):
            parse_input("dim: [1, 2")


class TestSerialization:
    """Tests for canonical output."""

    def test_round_trip(self):
        """Test that the canonical document parses back to the same algebra."""
        document = serialize_bialgebra(sl2())
        L = bialgebra_from_dict(document)

        assert L.bracket == sl2().bracket
        assert L.r == sl2().r
        assert document["bracket"][0] == [1, 2, 2, "2", "1"]

    def test_fraction_string(self):
        """Test the denominator is always written."""
        assert fraction_string(Fraction(3)) == "3/1"
        assert fraction_string(Fraction(-1, 4)) == "-1/4"

    def test_generator_key(self):
        """Test the braiding artifact keys."""
        assert generator_key(2, 1) == "x2@1"

    def test_json_is_sorted(self):
        """Test JSON output has sorted keys and a trailing newline."""
        text = dump_document({"b": 1, "a": {"d": 2, "c": 3}})

        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"c"') < text.index('"d"')
        assert dump_document({"a": 1, "b": 2}) == dump_document({"b": 2, "a": 1})

    def test_yaml_output(self):
        """Test YAML output parses back to the same data."""
        data = {"status": "ok", "lift": [{"exponents": [1, 0], "coeff": "1/2"}]}
        text = dump_document(data, OutputFormat.YAML)

        assert yaml.safe_load(text) == data
        assert text.startswith("lift:")
