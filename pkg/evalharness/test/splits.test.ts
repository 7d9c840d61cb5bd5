import { describe, it, expect } from "vitest";

import { stratifiedSplits, stratifiedKFold, assertDisjoint } from "../src/splits.js";

const y = [
  ...Array(40).fill(0),
  ...Array(20).fill(1),
  ...Array(10).fill(2),
];

describe("stratifiedSplits", () => {
  it("keeps per-class proportions on both sides", () => {
    for (const { train, test } of stratifiedSplits(y, 5, 0.8, 0)) {
      const count = (ids: number[], c: number) => ids.filter(i => y[i] === c).length;
      expect(count(train, 0)).toBe(32);
      expect(count(train, 1)).toBe(16);
      expect(count(train, 2)).toBe(8);
      expect(count(test, 0)).toBe(8);
      expect(count(test, 1)).toBe(4);
      expect(count(test, 2)).toBe(2);
    }
  });

  it("partitions every index exactly once per repeat", () => {
    for (const { train, test } of stratifiedSplits(y, 3, 0.8, 1)) {
      const all = [...train, ...test].sort((a, b) => a - b);
      expect(all).toEqual(y.map((_, i) => i));
    }
  });

  it("never leaves a class empty on either side", () => {
    const tiny = [0, 0, 1, 1];
    for (const { train, test } of stratifiedSplits(tiny, 4, 0.9, 3)) {
      for (const c of [0, 1]) {
        expect(train.some(i => tiny[i] === c)).toBe(true);
        expect(test.some(i => tiny[i] === c)).toBe(true);
      }
    }
  });

  it("varies across repeats but not across calls", () => {
    const a = stratifiedSplits(y, 5, 0.8, 7);
    const b = stratifiedSplits(y, 5, 0.8, 7);
    expect(a).toEqual(b);
    expect(a[0].train).not.toEqual(a[1].train);
  });

  it("rejects degenerate inputs", () => {
    expect(() => stratifiedSplits(y, 5, 1.5, 0)).toThrow("outside (0, 1)");
    expect(() => stratifiedSplits(y, 0, 0.8, 0)).toThrow("repeats must be >= 1");
    expect(() => stratifiedSplits([0, 0, 1], 2, 0.8, 0)).toThrow("class 1 has 1 sample(s)");
  });
});

describe("stratifiedKFold", () => {
  it("partitions positions into k balanced folds", () => {
    const folds = stratifiedKFold(y, 5, 0);
    expect(folds).toHaveLength(5);
    const all = folds.flat().sort((a, b) => a - b);
    expect(all).toEqual(y.map((_, i) => i));
    for (const fold of folds) {
      expect(fold.filter(i => y[i] === 0).length).toBe(8);
      expect(fold.filter(i => y[i] === 1).length).toBe(4);
      expect(fold.filter(i => y[i] === 2).length).toBe(2);
    }
  });

  it("spreads remainders no wider than one sample", () => {
    const ys = [0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
    const folds = stratifiedKFold(ys, 3, 2);
    const sizes = folds.map(f => f.length).sort((a, b) => a - b);
    expect(sizes[2] - sizes[0]).toBeLessThanOrEqual(2);
    expect(folds.flat().sort((a, b) => a - b)).toEqual(ys.map((_, i) => i));
  });

  it("rejects k < 2", () => {
    expect(() => stratifiedKFold(y, 1, 0)).toThrow("need k >= 2 folds");
  });
});

describe("assertDisjoint", () => {
  it("accepts disjoint index sets", () => {
    expect(() => assertDisjoint([0, 1, 2], [3, 4])).not.toThrow();
  });

  it("flags any shared index", () => {
    expect(() => assertDisjoint([0, 1, 2], [2, 3])).toThrow(
      "index 2 appears in both fit and test sets",
    );
  });
});
