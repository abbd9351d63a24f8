"""Deterministic JSON and CSV emitters shared by the CLI stages."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import ValidationError


def canonical_json(obj) -> str:
    """Canonical serialization: sorted keys, full repr precision, no
    trailing whitespace.  Identical inputs yield byte-identical output."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(canonical_json(obj))
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc
    return path


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
            writer.writerow(header)
            for row in rows:
                writer.writerow(["" if v is None else v for v in row])
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path: str | Path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
