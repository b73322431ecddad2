"""File formats: CSV eigenvalue lists and JSON matrices."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .densop import matrix_from_json, matrix_to_json
from .eigenlist import EigenvalueList
from .errors import ParseError

__all__ = ["parse_list_csv", "read_list_csv", "format_list_csv", "read_matrix_json",
           "write_matrix_json", "atomic_write"]


def parse_list_csv(text: str) -> EigenvalueList:
    """One nonnegative decimal per line, nonincreasing.

    Blank lines and lines starting with ``#`` are skipped.
    """
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            x = float(line)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", line=lineno) from None
        if x != x or x in (float("inf"), float("-inf")):
            raise ParseError(f"not finite: {line!r}", line=lineno)
        if x < 0:
            raise ParseError(f"negative entry {x!r}", line=lineno)
        if values and x > values[-1]:
            raise ParseError(f"{x!r} exceeds the previous entry {values[-1]!r}", line=lineno)
        values.append(x)
    return EigenvalueList(values)


def read_list_csv(path) -> EigenvalueList:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_list_csv(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def format_list_csv(lst: EigenvalueList, comments: dict | None = None) -> str:
    lines = [f"# {k}={v!r}" for k, v in (comments or {}).items()]
    lines += [repr(float(x)) for x in lst]
    return "\n".join(lines) + "\n"


def read_matrix_json(path):
    try:
        return matrix_from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read matrix from {path}: {exc}") from None


def write_matrix_json(path, matrix) -> None:
    atomic_write(path, json.dumps(matrix_to_json(matrix)) + "\n")


def atomic_write(path, text: str) -> None:
    """Write through a temporary file so readers never see partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
