"""Command-line pipeline: table in, per-sample grayscale images out.

Subcommands:
  transform  run ingest -> normalize -> importance -> noise -> layout -> images
  inspect    locate a feature (and its noisy copies) inside a finished run
  report     emit the original-vs-copy correlation blocks plus figures

Each transform stage aborts with its own exit code (ingest 2, featsel 3,
noise 4, igtd 5, render 6) and leaves a partial_run.json marker so scripted
callers can tell how far a failed run got. A finished run directory is fully
reproducible: the same config and seed give byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import csv
import difflib
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlation import DistanceMatrix, distance_matrix
from .dataset import (
    DatasetError,
    TypedDataset,
    ingest,
    normalize,
    split,
    undersample,
    write_normalized_csv,
)
from .featsel import FeatureSelectionError, ImportanceVector, ensemble_importance
from .igtd import (
    LayoutError,
    PixelLayout,
    choose_grid,
    optimize,
    pad_distances,
    pixel_distances,
    rank_matrix,
)
from .noise import HENG, HONG, NoiseError, generate, plan
from .render import PAD_NAME, RenderError, emit

ENV_OUT_ROOT = "TAB2IMG_OUT_ROOT"
PARTIAL_MARKER = "partial_run.json"

_STAGE_CODES = {"ingest": 2, "featsel": 3, "noise": 4, "igtd": 5, "render": 6}
_ERROR_STAGES = (
    (DatasetError, "ingest"),
    (FeatureSelectionError, "featsel"),
    (NoiseError, "noise"),
    (LayoutError, "igtd"),
    (RenderError, "render"),
)


class StageFailure(RuntimeError):
    def __init__(self, stage: str, original: Exception):
        super().__init__(f"[{stage}] {original}")
        self.stage = stage
        self.original = original


@contextmanager
def _stage(name: str):
    """Tag exceptions with the pipeline stage; typed errors keep their home."""
    try:
        yield
    except StageFailure:
        raise
    except Exception as exc:
        for err_type, home in _ERROR_STAGES:
            if isinstance(exc, err_type):
                name = home
                break
        raise StageFailure(name, exc) from exc


@dataclass(frozen=True)
class RunConfig:
    data: str
    label_column: str
    schema: str | None = None
    mode: str = HENG
    target_side: int | None = None
    target_min_assoc: float = 0.9
    seed: int = 0
    undersample: bool = False
    splits: dict | None = None          # {"train_fraction": float, "repeats": int}
    out_dir: str | None = None

    def validate(self) -> None:
        if not self.data:
            raise ValueError("data path is required (flag --data or config key 'data')")
        if not self.label_column:
            raise ValueError("label column is required (--label-column or 'label_column')")
        if self.mode not in (HONG, HENG):
            raise ValueError(f"mode must be {HONG} or {HENG}, got {self.mode!r}")
        if self.splits is not None:
            keys = set(self.splits)
            if keys != {"train_fraction", "repeats"}:
                raise ValueError(f"splits needs train_fraction and repeats, got {sorted(keys)}")

    def to_json_dict(self) -> dict:
        # out_dir stays null so two runs of one config into different
        # destinations produce byte-identical artifact sets
        return {
            "data": self.data,
            "label_column": self.label_column,
            "schema": self.schema,
            "mode": self.mode,
            "target_side": self.target_side,
            "target_min_assoc": self.target_min_assoc,
            "seed": self.seed,
            "undersample": self.undersample,
            "splits": self.splits,
            "out_dir": None,
        }


def load_config(path: str | None, overrides: dict) -> RunConfig:
    base: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            base = json.load(fh)
        unknown = set(base) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged = {**base, **{k: v for k, v in overrides.items() if v is not None}}
    merged.setdefault("data", "")
    merged.setdefault("label_column", "")
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


def resolve_out_dir(cfg: RunConfig) -> Path:
    if cfg.out_dir:
        return Path(cfg.out_dir)
    root = Path(os.environ.get(ENV_OUT_ROOT, "."))
    stem = Path(cfg.data).stem or "run"
    return root / f"{stem}_{cfg.mode.lower()}_seed{cfg.seed}"


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_indices(path: Path, indices) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index"])
        for i in indices:
            w.writerow([int(i)])


def _write_importance(path: Path, imp: ImportanceVector) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["feature", "raw", "normalized"])
        for name, raw, norm in zip(imp.feature_names, imp.raw, imp.normalized):
            w.writerow([name, repr(float(raw)), repr(float(norm))])


def _write_noise_report(path: Path, noisy) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "source_feature", "noise_type", "planned_power",
                    "achieved_power", "achieved_assoc", "assoc_kind",
                    "degenerate", "best_effort"])
        for nf in noisy:
            w.writerow([nf.name, nf.source_name, nf.noise_type,
                        repr(float(nf.planned_power)), repr(float(nf.achieved_power)),
                        repr(float(nf.achieved_assoc)), nf.assoc_kind,
                        nf.degenerate, nf.best_effort])


def _write_matrix(path: Path, names, matrix: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["feature"] + list(names))
        for name, row in zip(names, matrix):
            w.writerow([name] + [repr(float(v)) for v in row])


def _write_layout(path: Path, layout: PixelLayout, names) -> None:
    flat = [PAD_NAME] * layout.grid.n_cells
    for e in range(layout.n_features):
        flat[int(layout.assignment[e])] = names[e]
    cells = [
        flat[r * layout.grid.cols:(r + 1) * layout.grid.cols]
        for r in range(layout.grid.rows)
    ]
    _write_json(path, {
        "rows": layout.grid.rows,
        "cols": layout.grid.cols,
        "cells": cells,
        "n_features": layout.n_features,
        "initial_error": layout.initial_error,
        "final_error": layout.final_error,
        "iterations": layout.iterations,
        "swaps": layout.swaps,
        "error_trace": list(layout.error_trace),
    })


def run_pipeline(ds: TypedDataset, cfg: RunConfig, out_dir: Path,
                 fit_indices=None) -> None:
    """One full transform into one directory (optionally train-fit normalized)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with _stage("ingest"):
        norm, _ = normalize(ds, fit_indices)
        write_normalized_csv(norm, out_dir / "normalized.csv")
    importance = None
    if cfg.mode == HENG:
        with _stage("featsel"):
            importance = ensemble_importance(norm, seed=cfg.seed)
            _write_importance(out_dir / "importance.csv", importance)
    with _stage("igtd"):
        grid, budget = choose_grid(ds.n_features, cfg.target_side)
    with _stage("noise"):
        noise_plan = plan(importance, ds.n_features, budget, cfg.mode, kinds=norm.kinds)
        aug = generate(norm, noise_plan, cfg.seed, cfg.target_min_assoc)
        _write_noise_report(out_dir / "noise_report.csv", aug.noisy)
    with _stage("igtd"):
        typed = aug.to_typed()
        dm: DistanceMatrix = distance_matrix(typed)
        _write_matrix(out_dir / "correlation_matrix.csv", dm.names, dm.assoc)
        _write_matrix(out_dir / "distance_matrix.csv", dm.names, dm.d)
        padded = pad_distances(dm.d, grid.n_cells - typed.n_features)
        feat_rank = rank_matrix(padded)
        pix_rank = rank_matrix(pixel_distances(grid))
        layout = optimize(feat_rank, pix_rank, grid, seed=cfg.seed,
                          n_features=typed.n_features)
        _write_layout(out_dir / "layout.json", layout, typed.feature_names)
    with _stage("render"):
        emit(aug, layout, out_dir, dataset_name=ds.name)


def cmd_transform(cfg: RunConfig) -> int:
    out_dir = resolve_out_dir(cfg)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / PARTIAL_MARKER).unlink(missing_ok=True)
        with _stage("ingest"):
            ds = ingest(cfg.data, cfg.label_column, schema=_load_schema(cfg.schema))
            if cfg.undersample:
                ds = undersample(ds, cfg.seed)
        if cfg.splits is not None:
            with _stage("ingest"):
                pairs = split(ds, float(cfg.splits["train_fraction"]),
                              int(cfg.splits["repeats"]), cfg.seed)
            for r, (train_idx, test_idx) in enumerate(pairs):
                sub = out_dir / f"split_{r:02d}"
                sub.mkdir(parents=True, exist_ok=True)
                _write_indices(sub / "train_indices.csv", train_idx)
                _write_indices(sub / "test_indices.csv", test_idx)
                run_pipeline(ds, cfg, sub, fit_indices=train_idx)
        else:
            run_pipeline(ds, cfg, out_dir)
        _write_json(out_dir / "run_config.json", cfg.to_json_dict())
        return 0
    except StageFailure as failure:
        code = _STAGE_CODES[failure.stage]
        print(f"tab2img transform failed at stage {failure.stage}: "
              f"{failure.original}", file=sys.stderr)
        try:
            _write_json(out_dir / PARTIAL_MARKER, {
                "stage": failure.stage,
                "exit_code": code,
                "error": str(failure.original),
            })
        except OSError:
            pass
        return code


def _load_schema(path: str | None) -> dict | None:
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        schema = json.load(fh)
    if not isinstance(schema, dict):
        raise DatasetError("schema file must hold a {feature: kind} object")
    return schema


def _read_manifest(run_dir: Path) -> list:
    path = run_dir / "manifest.csv"
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; is {run_dir} a finished run?")
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _read_noise_report(run_dir: Path) -> dict:
    path = run_dir / "noise_report.csv"
    if not path.exists():
        return {}
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["name"]: row for row in csv.DictReader(fh)}


def cmd_inspect(run_dir: Path, feature: str) -> int:
    try:
        manifest = _read_manifest(run_dir)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    if feature == PAD_NAME:
        pads = [row for row in manifest if row["is_padding"] == "True"]
        print(f"{len(pads)} padding cell(s)")
        for row in pads:
            print(f"  ({row['row']}, {row['col']})")
        return 0

    own = [row for row in manifest if row["feature"] == feature]
    copies = [
        row for row in manifest
        if row["source_feature"] == feature and row["feature"] != feature
    ]
    if not own and not copies:
        known = sorted({row["feature"] for row in manifest} - {PAD_NAME})
        hints = difflib.get_close_matches(feature, known, n=5)
        print(f"unknown feature {feature!r}"
              + (f"; close matches: {', '.join(hints)}" if hints else ""),
              file=sys.stderr)
        return 1

    report = _read_noise_report(run_dir)
    for row in own:
        print(f"{feature}: cell ({row['row']}, {row['col']}), kind {row['kind']}")
    print(f"{len(copies)} noisy cop{'y' if len(copies) == 1 else 'ies'}")
    for row in copies:
        line = f"  {row['feature']}: cell ({row['row']}, {row['col']})"
        meta = report.get(row["feature"])
        if meta is not None:
            line += (f", {meta['noise_type']} power {float(meta['achieved_power']):g}"
                     f", assoc {float(meta['achieved_assoc']):.4f} ({meta['assoc_kind']})")
            if meta["best_effort"] == "True":
                line += " [best effort]"
        print(line)

    layout_path = run_dir / "layout.json"
    if layout_path.exists():
        with open(layout_path, encoding="utf-8") as fh:
            lay = json.load(fh)
        print(f"layout: {lay['rows']}x{lay['cols']}, error "
              f"{lay['initial_error']} -> {lay['final_error']} "
              f"({lay['swaps']} swaps, {lay['iterations']} iterations)")
    return 0


def _block_order(names: list, report: dict) -> list:
    copies: dict = {}
    for name in names:
        meta = report.get(name)
        if meta is not None:
            copies.setdefault(meta["source_feature"], []).append(name)
    order = []
    for name in names:
        if name in report:
            continue
        order.append(name)
        order.extend(copies.get(name, []))
    return order


def cmd_report(run_dir: Path) -> int:
    corr_path = run_dir / "correlation_matrix.csv"
    if not corr_path.exists():
        print(f"{corr_path} not found; is {run_dir} a finished run?", file=sys.stderr)
        return 1
    with open(corr_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    names = rows[0][1:]
    matrix = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    report = _read_noise_report(run_dir)

    order = _block_order(names, report)
    pos = {name: i for i, name in enumerate(names)}
    idx = np.array([pos[name] for name in order])
    blocks = matrix[np.ix_(idx, idx)]

    report_dir = run_dir / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    _write_matrix(report_dir / "correlation_blocks.csv", order, blocks)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 6))
    im = ax.imshow(blocks, cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_title("feature associations, originals beside their copies")
    step = max(1, len(order) // 32)
    ax.set_xticks(range(0, len(order), step))
    ax.set_xticklabels(order[::step], rotation=90, fontsize=5)
    ax.set_yticks(range(0, len(order), step))
    ax.set_yticklabels(order[::step], fontsize=5)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(report_dir / "correlation_heatmap.png", dpi=150)
    plt.close(fig)

    layout_path = run_dir / "layout.json"
    if layout_path.exists():
        with open(layout_path, encoding="utf-8") as fh:
            lay = json.load(fh)
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(lay["error_trace"], lw=1.0)
        ax.set_xlabel("iteration")
        ax.set_ylabel("rank error")
        ax.set_title(f"layout optimization, {lay['initial_error']} -> {lay['final_error']}")
        fig.tight_layout()
        fig.savefig(report_dir / "error_trace.png", dpi=150)
        plt.close(fig)
    print(str(report_dir))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tab2img",
        description="Turn a low-dimensional mixed-type table into per-sample "
                    "grayscale images via noisy-feature augmentation and "
                    "rank-matched pixel layout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="run the full pipeline")
    t.add_argument("--config", help="JSON file with RunConfig keys")
    t.add_argument("--data", help="input CSV path")
    t.add_argument("--label-column", help="class column header")
    t.add_argument("--schema", help="JSON {feature: kind} overriding inference")
    t.add_argument("--mode", choices=[HONG, HENG], help=f"noise allocation (default {HENG})")
    t.add_argument("--target-side", type=int, help="grid side override")
    t.add_argument("--target-min-assoc", type=float,
                   help="auto-power acceptance threshold (default 0.9)")
    t.add_argument("--seed", type=int, help="master seed (default 0)")
    t.add_argument("--undersample", action="store_true", default=None,
                   help="downsample every class to the minority count")
    t.add_argument("--train-fraction", type=float,
                   help="with --repeats: emit per-split subdirectories")
    t.add_argument("--repeats", type=int, help="number of stratified splits")
    t.add_argument("--out", help=f"output directory (default under ${ENV_OUT_ROOT})")

    i = sub.add_parser("inspect", help="locate a feature inside a finished run")
    i.add_argument("run_dir", type=Path)
    i.add_argument("feature", help=f"feature name, or {PAD_NAME} for padding cells")

    r = sub.add_parser("report", help="correlation blocks and figures for a run")
    r.add_argument("run_dir", type=Path)

    args = parser.parse_args(argv)
    if args.command == "inspect":
        return cmd_inspect(args.run_dir, args.feature)
    if args.command == "report":
        return cmd_report(args.run_dir)

    splits = None
    if args.train_fraction is not None or args.repeats is not None:
        if args.train_fraction is None or args.repeats is None:
            parser.error("--train-fraction and --repeats go together")
        splits = {"train_fraction": args.train_fraction, "repeats": args.repeats}
    overrides = {
        "data": args.data,
        "label_column": args.label_column,
        "schema": args.schema,
        "mode": args.mode,
        "target_side": args.target_side,
        "target_min_assoc": args.target_min_assoc,
        "seed": args.seed,
        "undersample": args.undersample,
        "splits": splits,
        "out_dir": args.out,
    }
    try:
        cfg = load_config(args.config, overrides)
    except (OSError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    return cmd_transform(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
