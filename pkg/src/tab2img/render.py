"""Grayscale image emission: per-sample rasters, cell manifest, color legend."""
from __future__ import annotations

import colorsys
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .igtd import PixelLayout
from .noise import AugmentedDataset

PAD_NAME = "PAD"
LEGEND_SCALE = 24


class RenderError(ValueError):
    pass


def quantize(values: np.ndarray) -> np.ndarray:
    """Map [0, 1] to 0..255, rounding halves away from zero (0.5 -> 128)."""
    v = np.asarray(values, dtype=float)
    if v.size and (np.min(v) < 0.0 or np.max(v) > 1.0):
        bad = float(v[np.argmax((v < 0.0) | (v > 1.0))])
        raise RenderError(f"feature value {bad!r} outside [0, 1]")
    return np.floor(255.0 * v + 0.5).astype(np.uint8)


def render_sample(sample: np.ndarray, layout: PixelLayout) -> np.ndarray:
    sample = np.asarray(sample, dtype=float)
    if sample.shape != (layout.n_features,):
        raise RenderError(
            f"sample has {sample.shape} values, layout assigns {layout.n_features}"
        )
    flat = np.zeros(layout.grid.n_cells, dtype=np.uint8)
    flat[layout.assignment[: layout.n_features]] = quantize(sample)
    return flat.reshape(layout.grid.rows, layout.grid.cols)


@dataclass(frozen=True)
class CellRecord:
    row: int
    col: int
    feature: str
    source_feature: str
    kind: str
    is_padding: bool
    is_noisy: bool


@dataclass(frozen=True)
class ImageBundle:
    images: tuple
    image_paths: tuple
    manifest: tuple
    manifest_path: Path
    legend: np.ndarray
    legend_path: Path


def build_manifest(ds: AugmentedDataset, layout: PixelLayout) -> tuple:
    """One CellRecord per grid cell, row-major. Originals carry self-lineage."""
    names = ds.all_names()
    kinds = ds.all_kinds()
    lineage = ds.lineage()
    n_orig = ds.base.n_features
    by_cell = {}
    for e in range(layout.n_features):
        by_cell[layout.cell_of(e)] = e
    records = []
    for r in range(layout.grid.rows):
        for c in range(layout.grid.cols):
            e = by_cell.get((r, c))
            if e is None:
                records.append(CellRecord(r, c, PAD_NAME, "", "", True, False))
            else:
                records.append(
                    CellRecord(
                        r, c, names[e], lineage[names[e]], kinds[e].kind,
                        False, e >= n_orig,
                    )
                )
    return tuple(records)


def _palette(ds: AugmentedDataset) -> dict:
    """RGB per feature: one hue per original, copies lighter; padding gray."""
    originals = ds.base.feature_names
    hues = {name: i / len(originals) for i, name in enumerate(originals)}
    colors = {}
    for name, source in ds.lineage().items():
        s, v = (0.75, 0.85) if name == source else (0.42, 0.95)
        rgb = colorsys.hsv_to_rgb(hues[source], s, v)
        colors[name] = tuple(int(round(255 * ch)) for ch in rgb)
    colors[PAD_NAME] = (128, 128, 128)
    return colors


def render_legend(ds: AugmentedDataset, layout: PixelLayout) -> np.ndarray:
    colors = _palette(ds)
    raster = np.zeros((layout.grid.rows, layout.grid.cols, 3), dtype=np.uint8)
    for rec in build_manifest(ds, layout):
        raster[rec.row, rec.col] = colors[rec.feature]
    return np.repeat(np.repeat(raster, LEGEND_SCALE, axis=0), LEGEND_SCALE, axis=1)


def emit(ds: AugmentedDataset, layout: PixelLayout, out_dir: Path,
         dataset_name: str | None = None) -> ImageBundle:
    """Write one PNG per sample, manifest.csv, legend.png, legend_colors.csv."""
    out_dir = Path(out_dir)
    name = dataset_name or ds.base.name
    columns = np.column_stack(ds.all_columns())
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    width = max(len(str(ds.base.n_samples - 1)), 1)
    images = []
    paths = []
    seen = set()
    for i in range(ds.base.n_samples):
        raster = render_sample(columns[i], layout)
        fname = f"{name}_{i:0{width}d}_{ds.base.labels[i]}.png"
        if fname in seen:
            raise RenderError(f"duplicate output name {fname!r}")
        seen.add(fname)
        path = images_dir / fname
        Image.fromarray(raster, mode="L").save(path)
        images.append(raster)
        paths.append(path)

    manifest = build_manifest(ds, layout)
    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "feature", "source_feature", "kind",
                    "is_padding", "is_noisy"])
        for rec in manifest:
            w.writerow([rec.row, rec.col, rec.feature, rec.source_feature,
                        rec.kind, rec.is_padding, rec.is_noisy])

    legend = render_legend(ds, layout)
    legend_path = out_dir / "legend.png"
    Image.fromarray(legend, mode="RGB").save(legend_path)
    colors = _palette(ds)
    with open(out_dir / "legend_colors.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["feature", "source_feature", "r", "g", "b"])
        lineage = ds.lineage()
        for feat in list(ds.all_names()) + [PAD_NAME]:
            r, g, b = colors[feat]
            w.writerow([feat, lineage.get(feat, ""), r, g, b])

    return ImageBundle(tuple(images), tuple(paths), manifest, manifest_path,
                       legend, legend_path)
