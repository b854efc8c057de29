# src/io/samples.py

from pathlib import Path

import numpy as np

from src.io.exporter import export_csv, export_json, read_json
from src.kernels.samples import SampleSet
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger()


def _parse_rows(lines, path):
    rows = []
    seen = False
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        first, seen = not seen, True
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError:
            # header: first non-blank line
            if first:
                continue
            raise InputError(f"{path}:{lineno}: non-numeric value in '{line}'")
    return rows


def read_samples_csv(path, measure_tag="p") -> SampleSet:
    """
    One point per row, columns = coordinates. A leading header row is skipped.
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Sample file not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        rows = _parse_rows(f.readlines(), path)

    if not rows:
        raise InputError(f"Sample file {path} contains no points", flag="xp" if measure_tag == "p" else "xq")
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"Sample file {path} has rows of different dimension")

    samples = SampleSet(points=np.asarray(rows, dtype=float), measure_tag=measure_tag)
    logger.info(f"[IO] Read {samples.size} points (d={samples.dim}) from {path}")
    return samples


def write_samples_csv(samples: SampleSet, path):
    header = [f"x{j}" for j in range(samples.dim)]
    rows = [dict(zip(header, (repr(float(v)) for v in p))) for p in samples.points]
    export_csv(rows, path, fieldnames=header)


def read_samples_json(path) -> SampleSet:
    return SampleSet.from_dict(read_json(path))


def write_samples_json(samples: SampleSet, path):
    export_json(samples.to_dict(), path)


def load_samples(path, measure_tag="p") -> SampleSet:
    """Dispatch on extension: .json container or CSV."""
    if Path(path).suffix.lower() == ".json":
        samples = read_samples_json(path)
        if samples.measure_tag != measure_tag:
            samples = SampleSet(samples.points, measure_tag=measure_tag, seed=samples.seed)
        return samples
    return read_samples_csv(path, measure_tag=measure_tag)
