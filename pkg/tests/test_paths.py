"""Tests for input and output path validation."""

import pytest

from rlift.utils.paths import PathValidationError, validate_input_path, validate_output_path


class TestValidateInputPath:
    """Tests for validate_input_path."""

    def test_existing_file(self, tmp_path):
        """Test an existing file resolves."""
        path = tmp_path / "in.json"
        path.write_text("{}")
        assert validate_input_path(str(path)) == path.resolve()

    def test_missing(self, tmp_path):
        """Test a missing file is rejected."""
        with pytest.raises(PathValidationError, match="does not exist"):
            validate_input_path(tmp_path / "missing.json")

    def test_directory(self, tmp_path):
        """Test a directory is rejected."""
        with pytest.raises(PathValidationError, match="not a file"):
            validate_input_path(tmp_path)


class TestValidateOutputPath:
    """Tests for validate_output_path."""

    def test_new_file(self, tmp_path):
        """Test a new file in an existing directory is accepted."""
        assert validate_output_path(tmp_path / "out.json") == (tmp_path / "out.json").resolve()

    def test_directory(self, tmp_path):
        """Test a directory is rejected."""
        with pytest.raises(PathValidationError, match="is a directory"):
            validate_output_path(tmp_path)

    def test_missing_parent(self, tmp_path):
        """Test a missing parent directory is rejected."""
        with pytest.raises(PathValidationError, match="directory does not exist"):
            validate_output_path(tmp_path / "nowhere" / "out.json")
