import { describe, it, expect } from "vitest";

import {
  readManifest,
  readBundle,
  readIndices,
  readRun,
  labelCodes,
} from "../src/bundle.js";

const TAE = "fixtures/tae_run";
const HEP = "fixtures/hepatitis_splits";

describe("readManifest", () => {
  it("parses every grid cell with typed fields", () => {
    const cells = readManifest(TAE);
    expect(cells).toHaveLength(64);
    for (const c of cells) {
      expect(Number.isInteger(c.row)).toBe(true);
      expect(Number.isInteger(c.col)).toBe(true);
      expect(typeof c.isPadding).toBe("boolean");
      expect(typeof c.isNoisy).toBe("boolean");
      expect(c.feature.length).toBeGreaterThan(0);
      expect(c.sourceFeature.length).toBeGreaterThan(0);
    }
    expect(cells.some(c => c.isNoisy)).toBe(true);
    const derived = cells.filter(c => c.isNoisy);
    for (const c of derived) expect(c.feature).not.toBe(c.sourceFeature);
  });
});

describe("readBundle", () => {
  const bundle = readBundle(TAE);

  it("loads one image per tabular row, in index order", () => {
    expect(bundle.images).toHaveLength(151);
    expect(bundle.tabular.rows).toHaveLength(151);
    bundle.images.forEach((img, i) => expect(img.index).toBe(i));
  });

  it("derives grid dimensions from the manifest", () => {
    expect(bundle.rows).toBe(8);
    expect(bundle.cols).toBe(8);
    for (const img of bundle.images) expect(img.pixels).toHaveLength(64);
  });

  it("keeps pixel intensities inside [0, 1]", () => {
    for (const img of bundle.images) {
      for (const v of img.pixels) {
        expect(v).toBeGreaterThanOrEqual(0);
        expect(v).toBeLessThanOrEqual(1);
      }
    }
  });

  it("sorts class names and codes labels against them", () => {
    expect(bundle.classes).toEqual([...bundle.classes].sort());
    const codes = labelCodes(bundle.tabular.labels, bundle.classes);
    codes.forEach((c, i) => {
      expect(bundle.classes[c]).toBe(bundle.tabular.labels[i]);
    });
  });

  it("agrees with the filename label for every image", () => {
    bundle.images.forEach((img, i) => {
      expect(img.label).toBe(bundle.tabular.labels[i]);
    });
  });

  it("quantizes original cells from the normalized table", () => {
    // byte value must equal round(255 * normalized) wherever the cell is a
    // direct (non-derived) copy of a tabular column
    const col = new Map(bundle.tabular.featureNames.map((f, j) => [f, j]));
    let checked = 0;
    for (const cell of bundle.manifest) {
      if (cell.isNoisy || !col.has(cell.feature)) continue;
      const j = col.get(cell.feature)!;
      for (const img of bundle.images.slice(0, 10)) {
        const byte = Math.round(img.pixels[cell.row * bundle.cols + cell.col] * 255);
        const expected = Math.floor(255 * bundle.tabular.rows[img.index][j] + 0.5);
        expect(byte).toBe(expected);
        checked++;
      }
    }
    expect(checked).toBeGreaterThan(0);
  });
});

describe("readRun", () => {
  it("exposes a single bundle when the run has no splits", () => {
    const run = readRun(TAE);
    expect(run.splits).toHaveLength(0);
    expect(run.bundle).not.toBeNull();
    expect(run.config.mode).toBe("HoNG");
  });

  it("loads every split with its own bundle and indices", () => {
    const run = readRun(HEP);
    expect(run.splits).toHaveLength(5);
    expect(run.config.splits.repeats).toBe(5);
    for (const s of run.splits) {
      expect(s.bundle.images).toHaveLength(64);
      const all = [...s.train, ...s.test].sort((a, b) => a - b);
      expect(all).toEqual(Array.from({ length: 64 }, (_, i) => i));
      const overlap = new Set(s.train);
      expect(s.test.some(i => overlap.has(i))).toBe(false);
    }
  });

  it("reads index files as plain integer lists", () => {
    const ids = readIndices(`${HEP}/split_00/train_indices.csv`);
    expect(ids.length).toBeGreaterThan(0);
    for (const i of ids) expect(Number.isInteger(i)).toBe(true);
  });
});
