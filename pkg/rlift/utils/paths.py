"""Path validation utilities for rlift."""

from pathlib import Path


class PathValidationError(Exception):
    """Raised when a path fails validation."""

    pass


def validate_input_path(path: str | Path) -> Path:
    """Validate that an input document exists and is a regular file.

    Args:
        path: Path to validate

    Returns:
        Resolved Path object

    Raises:
        PathValidationError: If path doesn't exist or isn't a file
    """
    path_obj = Path(path).expanduser().resolve()

    if not path_obj.exists():
        raise PathValidationError(f"Input file does not exist: {path_obj}")

    if not path_obj.is_file():
        raise PathValidationError(f"Input path is not a file: {path_obj}")

    return path_obj


def validate_output_path(path: str | Path) -> Path:
    """Validate that an artifact can be written to ``path``.

    The parent directory must exist and the path itself must not be a directory.

    Raises:
        PathValidationError: If the location is not writable as a file
    """
    path_obj = Path(path).expanduser().resolve()

    if path_obj.is_dir():
        raise PathValidationError(f"Output path is a directory: {path_obj}")

    if not path_obj.parent.is_dir():
        raise PathValidationError(f"Output directory does not exist: {path_obj.parent}")

    return path_obj
