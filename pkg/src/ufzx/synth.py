"""Synthetic field generators used by the experiment scripts and the test suite."""
from __future__ import annotations

import numpy as np

from .container import DataField


def white_noise(rng, n: int, width: float = 1.0, offset: float = 0.0) -> np.ndarray:
    return (rng.uniform(-width, width, n) + offset).astype(np.float32)


def random_walk(rng, n: int, step: float = 1.0, start: float = 0.0) -> np.ndarray:
    return (np.cumsum(rng.normal(0.0, step, n)) + start).astype(np.float32)


def plateaus(rng, n: int, n_levels: int = 6, spread: float = 10.0) -> np.ndarray:
    """Piecewise-constant field with random level lengths."""
    levels = rng.normal(0.0, spread, n_levels)
    edges = np.sort(rng.choice(np.arange(1, n), size=min(n_levels - 1, n - 1), replace=False))
    lengths = np.diff(np.concatenate([[0], edges, [n]]))
    return np.repeat(levels[: len(lengths)], lengths).astype(np.float32)


def smooth_ridges(
    rng,
    n: int,
    spacing: tuple[int, int] = (100, 300),
    texture: float = 4.0,
    texture_scale: int = 16,
) -> np.ndarray:
    """Piecewise-linear field with smooth small-scale texture.

    Vertices every spacing[0]..spacing[1] samples at uniform random levels, plus Gaussian-
    smoothed noise at `texture` times the base per-sample step. Block statistics are close to
    scale-invariant, the property real smooth simulation fields show.
    """
    pts = [0]
    while pts[-1] < n:
        pts.append(pts[-1] + int(rng.integers(spacing[0], spacing[1])))
    pts = np.asarray(pts)
    pts[-1] = max(pts[-1], n)
    levels = rng.uniform(-1.0, 1.0, len(pts))
    y = np.interp(np.arange(n), pts, levels)
    step = 2.0 * np.abs(np.diff(levels)).mean() / ((spacing[0] + spacing[1]) / 2)
    half = 3 * texture_scale
    kernel = np.exp(-0.5 * (np.arange(-half, half + 1) / texture_scale) ** 2)
    kernel /= kernel.sum()
    hf = np.convolve(rng.normal(0.0, 1.0, n), kernel, mode="same")
    sd = hf.std()
    if sd > 0:
        hf *= texture * step / sd
    return (y + hf + rng.normal(0.0, 3.0)).astype(np.float32)


def field_from(values: np.ndarray, dims=None) -> DataField:
    values = np.asarray(values, dtype=np.float32)
    return DataField(values, dims if dims is not None else (len(values.ravel()),))
