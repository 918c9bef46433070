"""Utility functions and error handling for polidna."""

import hashlib
import json
import shutil
import tempfile
from pathlib import Path
from typing import Any

from .constants import EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_NUMERICAL_ERROR, STAGING_PREFIX


class PolidnaError(Exception):
    """Base exception for polidna errors."""

    exit_code = EXIT_FAILURE


class InputError(PolidnaError):
    """Bad input data, parameters or configuration."""

    exit_code = EXIT_INPUT_ERROR


class NumericalError(PolidnaError):
    """A numerical precondition failed."""

    exit_code = EXIT_NUMERICAL_ERROR


class ConfigError(InputError):
    """Configuration-related errors."""

    pass


class MalformedRecord(InputError):
    """A record in an input file does not follow the schema."""

    def __init__(
        self,
        message: str,
        source: str | None = None,
        line: int | None = None,
        field: str | None = None,
    ):
        self.source = source
        self.line = line
        self.field = field
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"ingest: {', '.join(where)}: " if where else "ingest: "
        super().__init__(prefix + message)


class UnknownVoteString(MalformedRecord):
    """A vote string that maps to none of Yes, No, NotVoting."""

    pass


class DuplicateVote(MalformedRecord):
    """The same (voter, bill) pair appears twice."""

    pass


class UnknownGroup(InputError):
    pass


class EmptyAfterCleaning(InputError):
    pass


class InvalidParameter(InputError):
    pass


class InvalidPermutation(InputError):
    pass


class OrderMismatch(InputError):
    pass


class VoterNotFound(InputError):
    pass


class GroupTooSmall(InputError):
    """A group has fewer members than the covariance estimate needs."""

    def __init__(self, group: str, size: int):
        self.group = group
        self.size = size
        super().__init__(
            f"gmm: group '{group}' has {size} member(s); at least 2 are needed "
            "(use --merge-small-into to fold it into another group)"
        )


class IoError(InputError):
    pass


class ZeroVarianceColumn(NumericalError):
    pass


class KTooLarge(NumericalError):
    pass


class RankDeficient(KTooLarge):
    """More components requested than the numerical rank supports."""

    pass


class ZeroMatrix(NumericalError):
    pass


class DeflationExhausted(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    pass


class SingularCovariance(NumericalError):
    pass


class DimensionMismatch(NumericalError):
    pass


def sha256_file(file_path: Path) -> str:
    """Hex SHA-256 digest of a file's bytes."""
    digest = hashlib.sha256()
    with file_path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def dumps_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_json_safely(data: Any, file_path: Path) -> None:
    """Save JSON data safely with atomic write."""
    save_text_safely(dumps_json(data), file_path)


def save_text_safely(content: str, file_path: Path) -> None:
    """Save text content safely with atomic write."""
    temp_file = file_path.with_suffix(file_path.suffix + ".tmp")
    try:
        with temp_file.open("w", encoding="utf-8", newline="") as f:
            f.write(content)
        temp_file.replace(file_path)
    except OSError as e:
        if temp_file.exists():
            temp_file.unlink()
        raise IoError(f"cannot write {file_path}: {e}") from e


class ArtifactStage:
    """Collects a run's artifacts in a hidden directory and publishes them together.

    Files are written under ``path`` and moved into ``target`` by ``publish``;
    ``discard`` drops everything so failed runs leave no partial artifact set.
    """

    def __init__(self, target: Path):
        self.target = Path(target)
        parent = self.target.parent
        parent.mkdir(parents=True, exist_ok=True)
        self.path = Path(tempfile.mkdtemp(prefix=STAGING_PREFIX, dir=parent))
        self.files: list[str] = []

    def file(self, name: str) -> Path:
        """Reserve an artifact name and return its staging path."""
        if name not in self.files:
            self.files.append(name)
        return self.path / name

    def publish(self) -> list[Path]:
        """Move every staged artifact into the target directory."""
        try:
            self.target.mkdir(parents=True, exist_ok=True)
            published = []
            for name in self.files:
                destination = self.target / name
                (self.path / name).replace(destination)
                published.append(destination)
            return published
        except OSError as e:
            raise IoError(f"cannot publish artifacts to {self.target}: {e}") from e
        finally:
            self.discard()

    def discard(self) -> None:
        shutil.rmtree(self.path, ignore_errors=True)


def parse_csv_list(value: str | None) -> list[str] | None:
    """Split a comma-separated option value, dropping blanks."""
    if value is None:
        return None
    items = [item.strip() for item in value.split(",")]
    return [item for item in items if item]


def parse_int_list(value: str | None, option: str) -> list[int] | None:
    """Split a comma-separated list of integers (e.g. ``20,20,5``)."""
    items = parse_csv_list(value)
    if items is None:
        return None
    try:
        return [int(item) for item in items]
    except ValueError:
        raise InvalidParameter(f"{option} expects comma-separated integers, got '{value}'") from None


def format_percent(fraction: float) -> str:
    """Format a fraction in [0, 1] as a percentage with two decimals."""
    return f"{100.0 * fraction:.2f}%"
