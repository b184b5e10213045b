import hashlib
import json
import logging
import math
import sys
from enum import Enum
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from .errors import EmptyInput, IoError, ParseError
from .types import *


__all__ = [
    "load_csv", "save_csv", "content_digest", "seeded_rng", "derive_rng", "derive_seed",
    "to_jsonable", "dumps_report", "write_report", "read_report",
]

log = logging.getLogger(__name__)

_SEED_MASK = 2 ** 64 - 1


########################################################
#
#   CSV
#
########################################################

def _is_number(text: str) -> bool:
    try:
        return math.isfinite(float(text))
    except ValueError:
        return False


def load_csv(path: str | Path, column: str | int | None = None) -> TimeSeries:
    """
    Read one value column of a CSV file. A header row is detected when the first cell of the value column is not a
    number. Gaps are rejected, never imputed.

    @param path: The CSV file
    @param column: Name or position of the value column, defaults to the last column
    @return: The values in file order
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise EmptyInput(f"{str(path)!r} is empty")
    except pd.errors.ParserError as e:
        raise ParseError(0, column if column is not None else -1, f"{str(path)!r} is not a valid CSV file: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(f"Cannot read {str(path)!r}: {e}")

    first_row = [cell.strip() for cell in frame.iloc[0]]
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if column not in first_row:
            raise ParseError(1, column, f"Column {column!r} not found in header of {str(path)!r}")
        position = first_row.index(column)
    else:
        position = int(column) if column is not None else frame.shape[1] - 1
        if not -frame.shape[1] <= position < frame.shape[1]:
            raise ParseError(1, position, f"{str(path)!r} has no column {position}")
        position %= frame.shape[1]

    cells = frame.iloc[:, position].str.strip()
    has_header = not _is_number(cells.iloc[0])
    first_data_row = 2 if has_header else 1
    if has_header:
        cells = cells.iloc[1:]
    if cells.empty:
        raise EmptyInput(f"{str(path)!r} contains no data rows")

    values = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0]) + first_data_row
        name = first_row[position] if has_header else position
        raise ParseError(row, name, f"Row {row} of {str(path)!r} has no numeric value in column {name!r}")

    log.debug(f"Loaded {values.size} values from {str(path)!r}")
    return TimeSeries(values)


def save_csv(series: TimeSeries, target: str | Path | IO, header: str = "value"):
    """ Write a single-column CSV; floats are written with their shortest round-trip representation """
    frame = pd.DataFrame({header: series.values})
    try:
        frame.to_csv(target, index=False, lineterminator="\n")
    except OSError as e:
        raise IoError(f"Cannot write {target!r}: {e}")


########################################################
#
#   Digests and randomness
#
########################################################

def content_digest(matrix: SegmentMatrix | np.ndarray) -> str:
    """ 128-bit digest of the raw numeric content of a segment matrix """
    rows = matrix.rows if isinstance(matrix, SegmentMatrix) else matrix
    rows = np.ascontiguousarray(rows, dtype=float)
    digest = hashlib.blake2b(digest_size=16)
    digest.update(repr(rows.shape).encode())
    digest.update(rows.tobytes())
    return digest.hexdigest()


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _SEED_MASK)


def derive_seed(seed: int, *keys: str) -> int:
    """ Independent 64-bit seed for a named sub-task, e.g. an (algorithm, dataset) pair """
    digest = hashlib.blake2b(digest_size=8)
    for key in keys:
        digest.update(key.encode())
        digest.update(b"\0")
    sequence = np.random.SeedSequence([int(seed) & _SEED_MASK, int.from_bytes(digest.digest(), "little")])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def derive_rng(seed: int, *keys: str) -> np.random.Generator:
    return seeded_rng(derive_seed(seed, *keys))


########################################################
#
#   Reports
#
########################################################

def to_jsonable(value):
    """ Convert numpy values, enums and dataclasses with C{dump} into plain JSON types, NaN becomes null """
    # numpy arrays and scalars have a dump() of their own
    if isinstance(value, (np.ndarray, np.generic)):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "dump") and callable(value.dump):
        return to_jsonable(value.dump())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def dumps_report(report: Report) -> str:
    return json.dumps(to_jsonable(report.dump()), indent=2, allow_nan=False) + "\n"


def write_report(report: Report, path: str | Path | None = None):
    """ Write the report to C{path}, or to standard output when no path is given """
    text = dumps_report(report)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise IoError(f"Cannot write report to {str(path)!r}: {e}")


def read_report(path: str | Path) -> Report:
    try:
        return Report.load(json.loads(Path(path).read_text()))
    except OSError as e:
        raise IoError(f"Cannot read report {str(path)!r}: {e}")
