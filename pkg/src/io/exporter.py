# src/io/exporter.py

import csv
import json
from pathlib import Path


def _ensure_parent(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def export_csv(rows, path, fieldnames=None):
    """
    Writes a list of dicts as comma-separated text with a header row
    and LF line endings. Column order follows `fieldnames` or the first row.
    """

    path = _ensure_parent(path)
    rows = list(rows)

    if fieldnames is None:
        if not rows:
            return
        fieldnames = list(rows[0].keys())

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def read_csv(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV not found: {path}")

    with open(path, "r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def export_json(payload, path):
    path = _ensure_parent(path)

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"JSON not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
