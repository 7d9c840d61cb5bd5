import { describe, it, expect } from "vitest";

import {
  LassoLogistic,
  Knn,
  SvmRbf,
  Cart,
  BASELINE_SPECS,
} from "../src/baselines.js";
import { aucScore } from "../src/metrics.js";
import { mulberry32 } from "../src/rng.js";

/** Two well-separated uniform clouds in 4-D, deterministic. */
function blobs(nPerClass: number, seed: number) {
  const rand = mulberry32(seed);
  const X: number[][] = [];
  const y: number[] = [];
  for (let c = 0; c < 2; c++) {
    const lo = c === 0 ? 0.0 : 0.7;
    for (let i = 0; i < nPerClass; i++) {
      X.push(Array.from({ length: 4 }, () => lo + 0.3 * rand()));
      y.push(c);
    }
  }
  return { X, y };
}

const fitHalf = (model: { fit: Function; scores: Function }) => {
  const { X, y } = blobs(40, 5);
  const trainIdx = X.map((_, i) => i).filter(i => i % 2 === 0);
  const testIdx = X.map((_, i) => i).filter(i => i % 2 === 1);
  model.fit(trainIdx.map(i => X[i]), trainIdx.map(i => y[i]), 2);
  const scores = model.scores(testIdx.map(i => X[i]));
  return aucScore(scores, testIdx.map(i => y[i]), 2);
};

describe("separable data", () => {
  it.each([
    ["lasso", () => new LassoLogistic(1.0)],
    ["knn", () => new Knn(3)],
    ["svm", () => new SvmRbf(1.0, 1e-2)],
    ["dt", () => new Cart(4)],
  ])("%s ranks two clean clouds almost perfectly", (_name, make) => {
    expect(fitHalf(make())).toBeGreaterThanOrEqual(0.95);
  });
});

describe("constant features", () => {
  it.each([
    ["lasso", () => new LassoLogistic(1.0)],
    ["knn", () => new Knn(3)],
    ["svm", () => new SvmRbf(1.0, 1e-2)],
    ["dt", () => new Cart(4)],
  ])("%s falls back to chance AUC on constant inputs", (_name, make) => {
    const X = Array.from({ length: 20 }, () => [0.5, 0.5]);
    const y = X.map((_, i) => (i < 10 ? 0 : 1));
    const m = make();
    m.fit(X, y, 2);
    expect(aucScore(m.scores(X), y, 2)).toBe(0.5);
  });
});

describe("multiclass scoring", () => {
  it("separates three clouds with macro AUC 1", () => {
    const rand = mulberry32(11);
    const centers = [[0, 0], [1, 0], [0.5, 1]];
    const X: number[][] = [];
    const y: number[] = [];
    for (let c = 0; c < 3; c++) {
      for (let i = 0; i < 15; i++) {
        X.push([centers[c][0] + 0.2 * rand(), centers[c][1] + 0.2 * rand()]);
        y.push(c);
      }
    }
    for (const make of [() => new Knn(3), () => new Cart(4), () => new LassoLogistic(2.0), () => new SvmRbf(2.0, 1e-2)]) {
      const m = make();
      m.fit(X, y, 3);
      expect(aucScore(m.scores(X), y, 3)).toBeGreaterThan(0.99);
    }
  });
});

describe("Knn", () => {
  it("votes with the single nearest neighbor at k=1", () => {
    const m = new Knn(1);
    m.fit([[0], [0.1], [1.0], [1.1]], [0, 0, 1, 1], 2);
    expect(m.scores([[0.05], [1.05]])).toEqual([[1, 0], [0, 1]]);
  });

  it("returns vote fractions at larger k", () => {
    const m = new Knn(3);
    m.fit([[0], [0.1], [0.2], [1.0]], [0, 0, 1, 1], 2);
    // neighbors of 0.05: 0, 0.1, 0.2 -> votes 2:1
    expect(m.scores([[0.05]])[0][0]).toBeCloseTo(2 / 3, 12);
    expect(m.scores([[0.05]])[0][1]).toBeCloseTo(1 / 3, 12);
  });

  it("breaks distance ties by training order", () => {
    const m = new Knn(1);
    m.fit([[0], [2]], [0, 1], 2);
    expect(m.scores([[1]])).toEqual([[1, 0]]);
  });

  it("clamps k to the training-set size", () => {
    const m = new Knn(11);
    m.fit([[0], [1]], [0, 1], 2);
    expect(() => m.scores([[0.5]])).not.toThrow();
  });

  it("rejects k < 1", () => {
    expect(() => new Knn(0)).toThrow("k must be >= 1");
  });
});

describe("Cart", () => {
  it("finds the midpoint threshold on one feature", () => {
    const m = new Cart(2);
    m.fit([[1], [2], [3], [4]], [0, 0, 1, 1], 2);
    expect(m.scores([[1.5]])).toEqual([[1, 0]]);
    expect(m.scores([[2.4]])).toEqual([[1, 0]]);
    expect(m.scores([[2.6]])).toEqual([[0, 1]]);
  });

  it("needs depth 2 for an interaction, depth 1 fails it", () => {
    const X: number[][] = [];
    const y: number[] = [];
    for (let rep = 0; rep < 5; rep++) {
      for (const [a, b] of [[0, 0], [0, 1], [1, 0], [1, 1]]) {
        X.push([a, b]);
        y.push(a ^ b);
      }
    }
    const shallow = new Cart(1);
    shallow.fit(X, y, 2);
    expect(aucScore(shallow.scores(X), y, 2)).toBe(0.5);

    const deep = new Cart(2);
    deep.fit(X, y, 2);
    expect(aucScore(deep.scores(X), y, 2)).toBe(1);
  });

  it("rejects depth < 1", () => {
    expect(() => new Cart(0)).toThrow("maxDepth must be >= 1");
  });
});

describe("LassoLogistic", () => {
  it("drives noise weights to exactly zero under strong penalty", () => {
    const rand = mulberry32(3);
    const X: number[][] = [];
    const y: number[] = [];
    for (let i = 0; i < 200; i++) {
      const c = i % 2;
      X.push([c === 0 ? rand() * 0.3 : 0.7 + rand() * 0.3, rand(), rand(), rand()]);
      y.push(c);
    }
    const strong = new LassoLogistic(0.15);
    strong.fit(X, y, 2);
    const w = (strong as any).models[0].w as Float64Array;
    expect(Math.abs(w[0])).toBeGreaterThan(0);
    for (const j of [1, 2, 3]) expect(w[j]).toBe(0);
  });
});

describe("SvmRbf", () => {
  it("pulls scores toward the margin sign", () => {
    const { X, y } = blobs(20, 9);
    const m = new SvmRbf(1.0, 1e-2);
    m.fit(X, y, 2);
    const s = m.scores(X);
    const pos = s.filter((_, i) => y[i] === 1).map(r => r[1]);
    const neg = s.filter((_, i) => y[i] === 0).map(r => r[1]);
    expect(Math.min(...pos)).toBeGreaterThan(Math.max(...neg));
  });
});

describe("hyperparameter grids", () => {
  const byName = Object.fromEntries(BASELINE_SPECS.map(s => [s.name, s]));

  it("covers the four model families", () => {
    expect(Object.keys(byName).sort()).toEqual(["dt", "knn", "lasso", "svm"]);
  });

  it("spans the documented ranges", () => {
    const Cs = byName.lasso.configs.map((c: any) => c.C);
    expect(Math.min(...Cs)).toBeCloseTo(10 ** -1.5, 10);
    expect(Math.max(...Cs)).toBeCloseTo(10 ** 0.4, 10);

    expect(byName.knn.configs.map((c: any) => c.k)).toEqual([1, 3, 5, 7, 9, 11]);

    const gammas = [...new Set(byName.svm.configs.map((c: any) => c.gamma))];
    expect(gammas.sort((a, b) => b - a)).toEqual([1e-2, 1e-3, 1e-4, 1e-5]);
    const svmCs = byName.svm.configs.map((c: any) => c.C);
    expect(Math.min(...svmCs)).toBeCloseTo(10 ** -0.9, 10);
    expect(Math.max(...svmCs)).toBeCloseTo(10 ** 0.9, 10);

    expect(byName.dt.configs.map((c: any) => c.depth)).toEqual([2, 3, 4, 5, 6, 7, 8]);
  });
});
