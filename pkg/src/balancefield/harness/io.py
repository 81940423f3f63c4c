"""
File formats.

Metrics CSV
    first line ``# balancefield metrics v1``, then a header row with the
    columns in :data:`METRIC_COLUMNS` (``compare`` prepends ``model``).
    Floats are written with ``repr`` so files are byte-stable.

Volume snapshot
    ASCII header, one ``key = value`` per line, closed by ``end_header``::

        balancefield-snapshot v1
        dims = 64 64 64
        spacing = 1.0
        boundary = mirror
        step = 120
        time = 0.6666666666666666
        model = balanced
        width = 6.0
        end_header

    followed by ``prod(dims)`` little-endian float64 values, x varying fastest.
"""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from ..grid import Field, GridSpec

METRICS_SCHEMA = "# balancefield metrics v1"
SNAPSHOT_MAGIC = "balancefield-snapshot v1"


@dataclass(frozen=True)
class MetricsRow:
    step: int
    time: float
    radius: float
    area: float
    volume: float
    energy_total: float
    energy_bilaplacian: float
    energy_gradient: float
    energy_well: float
    max_abs_phi: float
    mean_K_S: float

    def __post_init__(self) -> None:
        for name, value in zip(METRIC_COLUMNS, astuple(self)):
            if not math.isfinite(value):
                raise ValueError(f"metrics column {name} is not finite: {value}")


METRIC_COLUMNS = [f.name for f in fields(MetricsRow)]


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_metrics_csv(path: str | Path, rows, prefix: dict[str, str] | None = None) -> Path:
    """Write rows; ``prefix`` maps extra leading column names to values (same for all rows)."""
    path = Path(path)
    prefix = prefix or {}
    with path.open("w", newline="") as fh:
        fh.write(METRICS_SCHEMA + "\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(list(prefix) + METRIC_COLUMNS)
        for r in rows:
            wr.writerow(list(prefix.values()) + [_fmt(x) for x in astuple(r)])
    return path


def write_tagged_metrics_csv(path: str | Path, tagged: list[tuple[str, list[MetricsRow]]]) -> Path:
    """Several runs in one file, distinguished by a leading ``model`` column."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(METRICS_SCHEMA + "\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["model"] + METRIC_COLUMNS)
        for tag, rows in tagged:
            for r in rows:
                wr.writerow([tag] + [_fmt(x) for x in astuple(r)])
    return path


def read_metrics_csv(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open() as fh:
        first = fh.readline().rstrip("\n")
        if first != METRICS_SCHEMA:
            raise ValueError(f"unexpected metrics schema line {first!r}")
        return list(csv.DictReader(fh))


def write_snapshot(path: str | Path, f: Field, step: int = 0, time: float = 0.0, model: str = "", width: float = 0.0) -> Path:
    g = f.grid
    header = [
        SNAPSHOT_MAGIC,
        "dims = " + " ".join(str(n) for n in g.dims),
        f"spacing = {g.spacing!r}",
        f"boundary = {g.boundary}",
        f"step = {int(step)}",
        f"time = {float(time)!r}",
        f"model = {model}",
        f"width = {float(width)!r}",
        "end_header",
    ]
    payload = np.ravel(f.values, order="F").astype("<f8").tobytes()
    path = Path(path)
    path.write_bytes(("\n".join(header) + "\n").encode("ascii") + payload)
    return path


def read_snapshot(path: str | Path) -> tuple[Field, dict[str, str]]:
    data = Path(path).read_bytes()
    marker = b"end_header\n"
    end = data.find(marker)
    if end < 0 or not data.startswith(SNAPSHOT_MAGIC.encode()):
        raise ValueError(f"{path} is not a balancefield snapshot")
    lines = data[:end].decode("ascii").splitlines()[1:]
    meta = dict((s.strip() for s in line.split("=", 1)) for line in lines)
    dims = tuple(int(x) for x in meta["dims"].split())
    payload = data[end + len(marker):]
    n = math.prod(dims)
    if len(payload) != 8 * n:
        raise ValueError(f"snapshot payload has {len(payload)} bytes, expected {8 * n}")
    values = np.frombuffer(payload, dtype="<f8").reshape(dims, order="F")
    grid = GridSpec(dims, float(meta["spacing"]), meta["boundary"])
    return Field(grid, values), meta
