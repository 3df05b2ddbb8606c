"""File formats: front / ensemble / objective-table JSON, ensemble CSV,
point CSV and the time-series CSV reader.

JSON documents keep a canonical field order so the same object serialises
to the same bytes; floats go through the standard repr round trip, so a
read-back reproduces the arrays bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from datetime import datetime, timezone

import numpy as np

from .ensembles import FrontEnsemble, ObjectiveTable
from .errors import DataFormatError
from .geometry import DirectionGrid, GridFront


def grid_to_dict(grid: DirectionGrid) -> dict:
    return {
        "scheme": grid.scheme,
        "seed": grid.seed,
        "directions": grid.directions.tolist(),
    }


def grid_from_dict(data: dict) -> DirectionGrid:
    try:
        return DirectionGrid(
            np.asarray(data["directions"], dtype=float),
            scheme=data.get("scheme", "user-supplied"),
            seed=data.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"bad grid document: {exc}") from exc


def grid_hash(grid: DirectionGrid) -> str:
    """Stable short identifier of a grid's exact contents."""
    payload = json.dumps(grid_to_dict(grid), separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def front_to_dict(front: GridFront) -> dict:
    return {
        "reference": front.reference.tolist(),
        "grid": grid_to_dict(front.grid),
        "lengths": front.lengths.tolist(),
    }


def front_from_dict(data: dict) -> GridFront:
    try:
        return GridFront(
            np.asarray(data["reference"], dtype=float),
            grid_from_dict(data["grid"]),
            np.asarray(data["lengths"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataFormatError):
            raise
        raise DataFormatError(f"bad front document: {exc}") from exc


def ensemble_to_dict(e: FrontEnsemble, labels=None, bounds=None) -> dict:
    doc = {
        "reference": e.reference.tolist(),
        "grid": grid_to_dict(e.grid),
        "lengths": e.lengths.tolist(),
    }
    if labels is not None:
        doc["labels"] = list(labels)
    if bounds is not None:
        lower, upper = bounds
        doc["bounds"] = {"lower": list(map(float, lower)), "upper": list(map(float, upper))}
    if e.source is not None:
        doc["source"] = objective_table_to_dict(e.source)
    return doc


def ensemble_from_dict(data: dict) -> FrontEnsemble:
    try:
        source = None
        if "source" in data:
            source = objective_table_from_dict(data["source"])
        return FrontEnsemble(
            np.asarray(data["reference"], dtype=float),
            grid_from_dict(data["grid"]),
            np.asarray(data["lengths"], dtype=float),
            source=source,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataFormatError):
            raise
        raise DataFormatError(f"bad ensemble document: {exc}") from exc


def objective_table_to_dict(table: ObjectiveTable) -> dict:
    return {
        "inputs": list(table.input_ids),
        "samples": table.samples.tolist(),
    }


def objective_table_from_dict(data: dict) -> ObjectiveTable:
    try:
        return ObjectiveTable(tuple(data["inputs"]), np.asarray(data["samples"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"bad objective table document: {exc}") from exc


def dump_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON in {path}: {exc}") from exc


_CSV_HEADER = re.compile(r"^#?\s*eta:(?P<eta>\[[^\]]*\])\s+grid_ref:(?P<ref>[0-9a-f]+)\s*$")


def write_ensemble_csv(e: FrontEnsemble, path) -> None:
    """Lengths matrix as CSV under a header naming the reference and grid.

    The grid itself is not embedded; the header carries its content hash and
    a reader must supply the matching grid.
    """
    eta = json.dumps(e.reference.tolist(), separators=(",", ":"))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# eta:{eta} grid_ref:{grid_hash(e.grid)}\n")
        writer = csv.writer(fh)
        for row in e.lengths:
            writer.writerow([repr(float(v)) for v in row])


def read_ensemble_csv(path, grid: DirectionGrid) -> FrontEnsemble:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        match = _CSV_HEADER.match(header.strip())
        if not match:
            raise DataFormatError("ensemble CSV must start with '# eta:[..] grid_ref:<hash>'")
        if match.group("ref") != grid_hash(grid):
            raise DataFormatError("grid hash does not match the supplied grid")
        eta = np.asarray(json.loads(match.group("eta")), dtype=float)
        try:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        except ValueError as exc:
            raise DataFormatError(f"non-numeric length value: {exc}") from exc
    if not rows:
        raise DataFormatError("ensemble CSV has no length rows")
    return FrontEnsemble(eta, grid, np.asarray(rows, dtype=float))


def read_points_csv(path) -> np.ndarray:
    """Objective points, one vector per row; a non-numeric first row is a header."""
    with open(path, "r", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataFormatError("points file is empty")
    start = 0
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        start = 1
    try:
        pts = np.asarray([[float(cell) for cell in row] for row in rows[start:]], dtype=float)
    except ValueError as exc:
        raise DataFormatError(f"non-numeric point value: {exc}") from exc
    if pts.size == 0:
        raise DataFormatError("points file has no data rows")
    return pts


def read_series_csv(path) -> tuple[list[datetime], np.ndarray, list[str]]:
    """Time-series CSV: header ``timestamp,<name1>,...,<nameM>``.

    Timestamps are ISO-8601 and normalised to UTC; empty cells are missing
    values (NaN).  Returns (timestamps, values, column labels).
    """
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("series CSV is empty") from None
        if not header or header[0].strip().lower() != "timestamp":
            raise DataFormatError("series CSV must start with a 'timestamp' column")
        labels = [name.strip() for name in header[1:]]
        if not labels:
            raise DataFormatError("series CSV needs at least one value column")
        stamps: list[datetime] = []
        values: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            try:
                ts = datetime.fromisoformat(row[0].strip().replace("Z", "+00:00"))
            except ValueError as exc:
                raise DataFormatError(f"line {lineno}: bad timestamp {row[0]!r}") from exc
            if ts.tzinfo is None:
                ts = ts.replace(tzinfo=timezone.utc)
            ts = ts.astimezone(timezone.utc)
            cells = row[1:] + [""] * (len(labels) - len(row) + 1)
            parsed = []
            for cell in cells[: len(labels)]:
                cell = cell.strip()
                if not cell:
                    parsed.append(float("nan"))
                    continue
                try:
                    parsed.append(float(cell))
                except ValueError as exc:
                    raise DataFormatError(f"line {lineno}: bad value {cell!r}") from exc
            stamps.append(ts)
            values.append(parsed)
    if not stamps:
        raise DataFormatError("series CSV has no data rows")
    return stamps, np.asarray(values, dtype=float), labels


def canonical_json(doc: dict) -> str:
    """The canonical serialisation used for byte-identical outputs."""
    buf = io.StringIO()
    json.dump(doc, buf, indent=2)
    buf.write("\n")
    return buf.getvalue()
