"""Reading and writing: PGM images, solution CSVs and JSON run reports."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

SCHEMA_VERSION = "1"


class PgmError(ValueError):
    pass


# ---------------------------------------------------------------- PGM


def _tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PgmError("truncated PGM header")
        out.append(data[start:pos])
    return out, pos


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a P2 (ASCII) or P5 (binary) graymap; returns ``(pixels, maxval)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported format {magic!r}; only P2 and P5 graymaps are read")
    try:
        (w, h, maxval), pos = _tokens(data, 3, 2)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise PgmError(f"malformed PGM header: {exc}") from exc
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise PgmError(f"invalid PGM dimensions {width}x{height} or maxval {maxval}")
    count = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        raw = data[pos:pos + count * dtype.itemsize]
        if len(raw) != count * dtype.itemsize:
            raise PgmError("truncated P5 pixel data")
        pixels = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    else:
        try:
            pixels = np.array([int(t) for t in data[pos:].split()[:count]], dtype=np.int64)
        except ValueError as exc:
            raise PgmError(f"non-integer P2 pixel: {exc}") from exc
        if pixels.size != count:
            raise PgmError("truncated P2 pixel data")
    if pixels.size and (pixels.min() < 0 or pixels.max() > maxval):
        raise PgmError("pixel value outside [0, maxval]")
    return pixels.reshape(height, width), maxval


def write_pgm(path, pixels, maxval: int = 255, binary: bool = True, comments=()) -> None:
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("pixels must be a 2-D array")
    if pixels.size and (pixels.min() < 0 or pixels.max() > maxval):
        raise ValueError("pixel value outside [0, maxval]")
    height, width = pixels.shape
    header = ("P5" if binary else "P2") + "\n"
    header += "".join(f"# {c}\n" for c in comments)
    header += f"{width} {height}\n{maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            dtype = np.uint8 if maxval < 256 else ">u2"
            fh.write(pixels.astype(dtype).tobytes())
        else:
            for row in pixels:
                fh.write((" ".join(str(int(p)) for p in row) + "\n").encode("ascii"))


def load_image_vector(path) -> tuple[np.ndarray, np.ndarray]:
    """Flatten a graymap row-major into ``(xs, ys)``, both scaled to ``[0, 1]``."""
    pixels, maxval = read_pgm(path)
    ys = pixels.reshape(-1).astype(np.float64) / maxval
    n = ys.size
    xs = np.arange(n) / (n - 1) if n > 1 else np.zeros(1)
    return xs, ys


def synthetic_image(size: int = 128) -> np.ndarray:
    """Deterministic 8-bit test image with fine row-to-row structure.

    A chirped band pattern along the rows, a slow column wave and a faint
    checkerboard; once flattened row-major it is a long multiscale signal.
    """
    r, c = np.mgrid[0:size, 0:size] / (size - 1.0)
    img = (0.5
           + 0.3 * np.sin(2 * np.pi * (4 * r + 12 * r * r)) * np.exp(-0.5 * ((c - 0.5) / 0.35) ** 2)
           + 0.1 * np.cos(2 * np.pi * 3 * c)
           + 0.05 * ((np.floor(r * 16) + np.floor(c * 16)) % 2))
    return np.round(np.clip(img, 0.0, 1.0) * 255).astype(np.uint8)


# ---------------------------------------------------------------- CSV


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_solution_csv(xs, u_pred, u_exact=None, path="solution.csv") -> None:
    xs = np.asarray(xs, dtype=np.float64)
    u_pred = np.asarray(u_pred, dtype=np.float64)
    if xs.shape != u_pred.shape or (u_exact is not None and np.shape(u_exact) != xs.shape):
        raise ValueError("xs, u_pred and u_exact must have equal length")
    if u_exact is None:
        write_csv(path, ["x", "u_pred"], zip(xs, u_pred))
    else:
        u_exact = np.asarray(u_exact, dtype=np.float64)
        write_csv(path, ["x", "u_pred", "u_exact", "abs_err"],
                  zip(xs, u_pred, u_exact, np.abs(u_pred - u_exact)))


def read_csv_columns(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    cols = list(zip(*rows)) if rows else [()] * len(header)
    return {name: np.array([float(v) for v in col]) for name, col in zip(header, cols)}


def read_xy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column numeric CSV with a header row; the first column is x."""
    try:
        cols = list(read_csv_columns(path).values())
    except (OSError, StopIteration, ValueError) as exc:
        raise OSError(f"cannot read dataset {path}: {exc}") from exc
    if len(cols) < 2 or cols[0].size == 0:
        raise OSError(f"dataset {path} needs a header and at least one row of two columns")
    return cols[0], cols[1]


# ---------------------------------------------------------------- reports


@dataclass
class RunReport:
    command: str
    config: dict
    problem: dict
    conditioning: dict
    train_seconds: float
    artifacts: dict = field(default_factory=dict)
    metrics: Optional[dict] = None
    extra: Optional[dict] = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


TIMING_KEYS = ("train_seconds",)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return _NONFINITE[str(obj)]
    return obj


# strict JSON has no Infinity/NaN literals
_NONFINITE = {"inf": "Infinity", "-inf": "-Infinity", "nan": "NaN"}
_RESTORE = {v: float(k) for k, v in _NONFINITE.items()}


def _restore(obj):
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    if isinstance(obj, str) and obj in _RESTORE:
        return _RESTORE[obj]
    return obj


def write_report(report: RunReport, path) -> None:
    text = json.dumps(_jsonable(report.to_dict()), sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def read_report(path) -> RunReport:
    with open(path) as fh:
        d = _restore(json.load(fh))
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {version!r}; expected {SCHEMA_VERSION!r}")
    missing = {"command", "config", "problem", "conditioning", "train_seconds"} - d.keys()
    if missing:
        raise ValueError(f"report is missing required keys: {sorted(missing)}")
    return RunReport(**d)


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
