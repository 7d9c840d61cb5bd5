/**
 * Readers for the run directories the image pipeline writes. The harness
 * touches nothing but these files: per-sample PNGs, manifest.csv,
 * normalized.csv, run_config.json and the split index lists. That keeps the
 * component boundary on disk.
 */
import * as fs from "node:fs";
import * as path from "node:path";
import Papa from "papaparse";
import { readGray } from "./png.js";

export interface CellRecord {
  row: number;
  col: number;
  feature: string;
  sourceFeature: string;
  kind: string;
  isPadding: boolean;
  isNoisy: boolean;
}

export interface SampleImage {
  index: number;
  label: string;
  path: string;
  /** row-major intensities scaled to [0, 1] */
  pixels: Float32Array;
}

export interface Tabular {
  featureNames: string[];
  rows: number[][];
  labels: string[];
}

export interface ImageBundle {
  dir: string;
  rows: number;
  cols: number;
  manifest: CellRecord[];
  images: SampleImage[];
  /** sorted unique labels; class index = position here */
  classes: string[];
  tabular: Tabular;
}

export interface SplitBundle {
  train: number[];
  test: number[];
  bundle: ImageBundle;
}

export interface RunDir {
  dir: string;
  config: Record<string, unknown>;
  /** present for split runs, in split_00.. order */
  splits: SplitBundle[];
  /** present for single runs */
  bundle: ImageBundle | null;
}

function parseCsv(file: string): string[][] {
  const text = fs.readFileSync(file, "utf-8");
  const res = Papa.parse<string[]>(text, { delimiter: ",", skipEmptyLines: true });
  if (res.errors.length > 0) {
    throw new Error(`${file}: ${res.errors[0].message}`);
  }
  return res.data;
}

export function readManifest(dir: string): CellRecord[] {
  const rows = parseCsv(path.join(dir, "manifest.csv"));
  const header = rows[0].join(",");
  if (header !== "row,col,feature,source_feature,kind,is_padding,is_noisy") {
    throw new Error(`unexpected manifest header: ${header}`);
  }
  return rows.slice(1).map(r => ({
    row: Number(r[0]),
    col: Number(r[1]),
    feature: r[2],
    sourceFeature: r[3],
    kind: r[4],
    isPadding: r[5] === "True",
    isNoisy: r[6] === "True",
  }));
}

export function readNormalized(dir: string): Tabular {
  const rows = parseCsv(path.join(dir, "normalized.csv"));
  const header = rows[0];
  const featureNames = header.slice(0, -1);
  const data: number[][] = [];
  const labels: string[] = [];
  for (const r of rows.slice(1)) {
    if (r.length !== header.length) {
      throw new Error(`normalized.csv row width ${r.length}, want ${header.length}`);
    }
    data.push(r.slice(0, -1).map(v => {
      const x = Number(v);
      if (!Number.isFinite(x)) throw new Error(`bad numeric cell ${v}`);
      return x;
    }));
    labels.push(r[r.length - 1]);
  }
  return { featureNames, rows: data, labels };
}

const IMAGE_NAME = /^(.+)_(\d+)_(.+)\.png$/;

export function readImages(dir: string): SampleImage[] {
  const imgDir = path.join(dir, "images");
  const names = fs.readdirSync(imgDir).filter(n => n.endsWith(".png"));
  const out: SampleImage[] = [];
  for (const name of names) {
    const m = IMAGE_NAME.exec(name);
    if (!m) throw new Error(`cannot parse image name ${name}`);
    const file = path.join(imgDir, name);
    const gray = readGray(file);
    const pixels = new Float32Array(gray.pixels.length);
    for (let i = 0; i < pixels.length; i++) pixels[i] = gray.pixels[i] / 255;
    out.push({ index: Number(m[2]), label: m[3], path: file, pixels });
  }
  out.sort((a, b) => a.index - b.index);
  out.forEach((img, i) => {
    if (img.index !== i) throw new Error(`image indices not contiguous at ${img.index}`);
  });
  return out;
}

export function readIndices(file: string): number[] {
  const rows = parseCsv(file);
  if (rows[0].join(",") !== "index") throw new Error(`unexpected header in ${file}`);
  return rows.slice(1).map(r => Number(r[0]));
}

export function readBundle(dir: string): ImageBundle {
  const manifest = readManifest(dir);
  const rows = Math.max(...manifest.map(c => c.row)) + 1;
  const cols = Math.max(...manifest.map(c => c.col)) + 1;
  const images = readImages(dir);
  const tabular = readNormalized(dir);
  if (tabular.rows.length !== images.length) {
    throw new Error(`${images.length} images but ${tabular.rows.length} normalized rows`);
  }
  images.forEach((img, i) => {
    if (img.pixels.length !== rows * cols) {
      throw new Error(`image ${img.path} is not ${rows}x${cols}`);
    }
    if (img.label !== tabular.labels[i]) {
      throw new Error(`label mismatch at sample ${i}: ${img.label} vs ${tabular.labels[i]}`);
    }
  });
  const classes = [...new Set(tabular.labels)].sort();
  return { dir, rows, cols, manifest, images, classes, tabular };
}

export function labelCodes(labels: readonly string[], classes: readonly string[]): number[] {
  return labels.map(l => {
    const c = classes.indexOf(l);
    if (c < 0) throw new Error(`label ${l} not in classes`);
    return c;
  });
}

export function readRun(dir: string): RunDir {
  const config = JSON.parse(fs.readFileSync(path.join(dir, "run_config.json"), "utf-8"));
  const splitDirs = fs.readdirSync(dir)
    .filter(n => /^split_\d+$/.test(n))
    .sort();
  if (splitDirs.length === 0) {
    return { dir, config, splits: [], bundle: readBundle(dir) };
  }
  const splits = splitDirs.map(n => {
    const sub = path.join(dir, n);
    return {
      train: readIndices(path.join(sub, "train_indices.csv")),
      test: readIndices(path.join(sub, "test_indices.csv")),
      bundle: readBundle(sub),
    };
  });
  return { dir, config, splits, bundle: null };
}
