"""Figure data as files: matrix heatmaps (PGM), spectra and scaling tables (CSV)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .io import write_csv, write_pgm
from .linalg import SingularSpectrum, as_matrix

MAX_HEATMAP_SIZE = 2000
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class HeatmapExport:
    rows: int
    cols: int
    normalization: str
    pool_factor: int
    pixels: np.ndarray = field(repr=False)


def max_abs_pool(m: np.ndarray, k: int) -> np.ndarray:
    """Downsample by ``k`` in both directions, keeping the largest-magnitude entry of each block."""
    if k == 1:
        return m
    r, c = m.shape
    pr, pc = -r % k, -c % k
    padded = np.pad(m, ((0, pr), (0, pc)))
    blocks = padded.reshape((r + pr) // k, k, (c + pc) // k, k).transpose(0, 2, 1, 3)
    blocks = blocks.reshape(blocks.shape[0], blocks.shape[1], k * k)
    idx = np.abs(blocks).argmax(axis=2)
    return np.take_along_axis(blocks, idx[..., None], axis=2)[..., 0]


def heatmap_pixels(m, normalization: str = "linear") -> np.ndarray:
    """Map a matrix to 8-bit gray levels.

    ``linear`` stretches ``[min, max]`` onto ``[0, 255]`` (a constant matrix
    becomes mid-gray).  ``log-abs`` maps ``log10|m|`` from the 1e-300 floor up
    to the largest magnitude, so exact zeros are black.
    """
    m = np.asarray(m, dtype=np.float64)
    if normalization == "linear":
        lo, hi = m.min(), m.max()
        if hi == lo:
            return np.full(m.shape, 128, dtype=np.uint8)
        scaled = (m - lo) / (hi - lo)
    elif normalization == "log-abs":
        logs = np.log10(np.maximum(np.abs(m), LOG_FLOOR))
        lo = math.log10(LOG_FLOOR)
        hi = logs.max()
        if hi == lo:
            return np.zeros(m.shape, dtype=np.uint8)
        scaled = (logs - lo) / (hi - lo)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return np.round(scaled * 255).astype(np.uint8)


def export_heatmap(m, normalization: str = "linear", path="heatmap.pgm",
                   full_resolution: bool = False, max_size: int = MAX_HEATMAP_SIZE) -> HeatmapExport:
    m = as_matrix(m)
    k = 1 if full_resolution else max(1, math.ceil(max(m.shape) / max_size))
    pixels = heatmap_pixels(max_abs_pool(m, k), normalization)
    write_pgm(path, pixels, 255, binary=True,
              comments=[f"source {m.shape[0]}x{m.shape[1]}", f"pool {k}", f"normalization {normalization}"])
    return HeatmapExport(m.shape[0], m.shape[1], normalization, k, pixels)


def export_spectrum(spectrum: SingularSpectrum, path="spectrum.csv") -> None:
    s = spectrum.values
    write_csv(path, ["index", "singular_value", "squared_value"],
              ((i, float(v), float(v * v)) for i, v in enumerate(s)))


def scaling_table(results, path="scaling.csv") -> None:
    """``results`` is a sequence of ``(epsilon, SolveResult)`` pairs."""
    results = list(results)
    if not results:
        raise ValueError("scaling_table needs at least one result")
    rows = []
    for eps, res in results:
        wm, ws = res.report.weight_stats
        rm, rs = res.report.residual_stats
        mae = res.metrics.mae if res.metrics is not None else float("nan")
        rows.append((float(eps), wm, ws, rm, rs, float(mae)))
    write_csv(path, ["epsilon", "weight_mean", "weight_std", "residual_mean", "residual_std", "mae"], rows)
