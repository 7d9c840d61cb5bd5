/**
 * The four reference tabular models: L1-regularized logistic regression
 * (one-vs-rest), K nearest neighbours, RBF-kernel SVM trained with SMO,
 * and a gini CART tree. All consume the normalized feature matrix; scores
 * are per-class and only their ranking matters downstream.
 */
import { mulberry32, randInt } from "./rng.js";

export interface Classifier {
  fit(X: number[][], y: number[], nClasses: number): void;
  /** [nSamples][nClasses] */
  scores(X: number[][]): number[][];
}

export interface ModelSpec {
  name: string;
  configs: Record<string, number>[];
  make(cfg: Record<string, number>): Classifier;
}

function sigmoid(z: number): number {
  return z >= 0 ? 1 / (1 + Math.exp(-z)) : Math.exp(z) / (1 + Math.exp(z));
}

// ---------------------------------------------------------------- lasso

/** Largest singular value squared of [X | 1], by power iteration. */
function specNormSq(X: number[][], iters = 30): number {
  const n = X.length;
  const d = X[0].length + 1;
  let v = new Float64Array(d).fill(1 / Math.sqrt(d));
  let lambda = 0;
  for (let t = 0; t < iters; t++) {
    const u = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      let s = v[d - 1];
      const row = X[i];
      for (let j = 0; j < d - 1; j++) s += row[j] * v[j];
      u[i] = s;
    }
    const w = new Float64Array(d);
    for (let i = 0; i < n; i++) {
      const row = X[i];
      for (let j = 0; j < d - 1; j++) w[j] += row[j] * u[i];
      w[d - 1] += u[i];
    }
    let norm = 0;
    for (let j = 0; j < d; j++) norm += w[j] * w[j];
    norm = Math.sqrt(norm);
    if (norm === 0) return 1;
    lambda = norm;
    for (let j = 0; j < d; j++) v[j] = w[j] / norm;
  }
  return lambda;
}

/** One L1-penalized logistic fit (labels +-1), proximal gradient descent. */
function fitLassoBinary(
  X: number[][], z: Int8Array, C: number, maxIter: number,
): { w: Float64Array; b: number } {
  const n = X.length;
  const d = X[0].length;
  const alpha = 1 / (C * n); // penalty weight paired with mean log loss
  const L = Math.max(specNormSq(X) / (4 * n), 1e-12);
  const step = 1 / L;
  const w = new Float64Array(d);
  let b = 0;
  for (let it = 0; it < maxIter; it++) {
    const gw = new Float64Array(d);
    let gb = 0;
    for (let i = 0; i < n; i++) {
      const row = X[i];
      let m = b;
      for (let j = 0; j < d; j++) m += w[j] * row[j];
      const coeff = -z[i] * sigmoid(-z[i] * m) / n;
      for (let j = 0; j < d; j++) gw[j] += coeff * row[j];
      gb += coeff;
    }
    let delta = Math.abs(step * gb);
    b -= step * gb;
    const thr = step * alpha;
    for (let j = 0; j < d; j++) {
      const raw = w[j] - step * gw[j];
      const next = raw > thr ? raw - thr : raw < -thr ? raw + thr : 0;
      delta = Math.max(delta, Math.abs(next - w[j]));
      w[j] = next;
    }
    if (delta < 1e-8) break;
  }
  return { w, b };
}

export class LassoLogistic implements Classifier {
  private models: { w: Float64Array; b: number }[] = [];
  private nClasses = 0;
  constructor(private C: number, private maxIter = 400) {}

  fit(X: number[][], y: number[], nClasses: number): void {
    this.nClasses = nClasses;
    this.models = [];
    for (let c = 0; c < nClasses; c++) {
      const z = Int8Array.from(y, v => (v === c ? 1 : -1));
      this.models.push(fitLassoBinary(X, z, this.C, this.maxIter));
    }
  }

  scores(X: number[][]): number[][] {
    return X.map(row => {
      const out = new Array<number>(this.nClasses);
      for (let c = 0; c < this.nClasses; c++) {
        const { w, b } = this.models[c];
        let m = b;
        for (let j = 0; j < row.length; j++) m += w[j] * row[j];
        out[c] = sigmoid(m);
      }
      return out;
    });
  }
}

// ------------------------------------------------------------------ knn

export class Knn implements Classifier {
  private X: number[][] = [];
  private y: number[] = [];
  private nClasses = 0;
  constructor(private k: number) {
    if (k < 1) throw new Error("k must be >= 1");
  }

  fit(X: number[][], y: number[], nClasses: number): void {
    this.X = X;
    this.y = y;
    this.nClasses = nClasses;
  }

  scores(X: number[][]): number[][] {
    const k = Math.min(this.k, this.X.length);
    return X.map(q => {
      const dist = this.X.map((row, i) => {
        let s = 0;
        for (let j = 0; j < q.length; j++) {
          const diff = row[j] - q[j];
          s += diff * diff;
        }
        return { d: s, i };
      });
      dist.sort((a, b) => a.d - b.d || a.i - b.i);
      const votes = new Array<number>(this.nClasses).fill(0);
      for (let t = 0; t < k; t++) votes[this.y[dist[t].i]] += 1;
      return votes.map(v => v / k);
    });
  }
}

// ------------------------------------------------------------------ svm

function rbfKernel(a: number[], b: number[], gamma: number): number {
  let s = 0;
  for (let j = 0; j < a.length; j++) {
    const diff = a[j] - b[j];
    s += diff * diff;
  }
  return Math.exp(-gamma * s);
}

/** Binary soft-margin SMO on a precomputed kernel. Labels +-1. */
function smo(
  K: Float64Array, n: number, z: Int8Array, C: number,
  tol = 1e-3, maxPasses = 8, maxSweeps = 400, seed = 0x5eed,
): { alpha: Float64Array; b: number } {
  const alpha = new Float64Array(n);
  let b = 0;
  const rand = mulberry32(seed);
  const f = (i: number) => {
    let s = b;
    for (let t = 0; t < n; t++) {
      if (alpha[t] !== 0) s += alpha[t] * z[t] * K[t * n + i];
    }
    return s;
  };
  let passes = 0;
  let sweeps = 0;
  while (passes < maxPasses && sweeps < maxSweeps) {
    sweeps++;
    let changed = 0;
    for (let i = 0; i < n; i++) {
      const Ei = f(i) - z[i];
      if (!((z[i] * Ei < -tol && alpha[i] < C) || (z[i] * Ei > tol && alpha[i] > 0))) {
        continue;
      }
      let j = randInt(rand, n - 1);
      if (j >= i) j++;
      const Ej = f(j) - z[j];
      const ai = alpha[i];
      const aj = alpha[j];
      let lo: number;
      let hi: number;
      if (z[i] !== z[j]) {
        lo = Math.max(0, aj - ai);
        hi = Math.min(C, C + aj - ai);
      } else {
        lo = Math.max(0, ai + aj - C);
        hi = Math.min(C, ai + aj);
      }
      if (lo === hi) continue;
      const eta = 2 * K[i * n + j] - K[i * n + i] - K[j * n + j];
      if (eta >= 0) continue;
      let ajNew = aj - (z[j] * (Ei - Ej)) / eta;
      ajNew = Math.min(Math.max(ajNew, lo), hi);
      if (Math.abs(ajNew - aj) < 1e-7) continue;
      const aiNew = ai + z[i] * z[j] * (aj - ajNew);
      alpha[i] = aiNew;
      alpha[j] = ajNew;
      const b1 = b - Ei - z[i] * (aiNew - ai) * K[i * n + i] - z[j] * (ajNew - aj) * K[i * n + j];
      const b2 = b - Ej - z[i] * (aiNew - ai) * K[i * n + j] - z[j] * (ajNew - aj) * K[j * n + j];
      if (aiNew > 0 && aiNew < C) b = b1;
      else if (ajNew > 0 && ajNew < C) b = b2;
      else b = (b1 + b2) / 2;
      changed++;
    }
    passes = changed === 0 ? passes + 1 : 0;
  }
  return { alpha, b };
}

export class SvmRbf implements Classifier {
  private X: number[][] = [];
  private machines: { alphaZ: Float64Array; b: number }[] = [];
  private nClasses = 0;
  constructor(private C: number, private gamma: number) {}

  fit(X: number[][], y: number[], nClasses: number): void {
    this.X = X;
    this.nClasses = nClasses;
    this.machines = [];
    const n = X.length;
    const K = new Float64Array(n * n);
    for (let i = 0; i < n; i++) {
      K[i * n + i] = 1;
      for (let j = i + 1; j < n; j++) {
        const v = rbfKernel(X[i], X[j], this.gamma);
        K[i * n + j] = v;
        K[j * n + i] = v;
      }
    }
    for (let c = 0; c < nClasses; c++) {
      const z = Int8Array.from(y, v => (v === c ? 1 : -1));
      const { alpha, b } = smo(K, n, z, this.C);
      const alphaZ = new Float64Array(n);
      for (let i = 0; i < n; i++) alphaZ[i] = alpha[i] * z[i];
      this.machines.push({ alphaZ, b });
    }
  }

  scores(X: number[][]): number[][] {
    return X.map(q => {
      const kq = this.X.map(row => rbfKernel(row, q, this.gamma));
      return this.machines.map(({ alphaZ, b }) => {
        let s = b;
        for (let i = 0; i < kq.length; i++) {
          if (alphaZ[i] !== 0) s += alphaZ[i] * kq[i];
        }
        return s;
      });
    });
  }
}

// ----------------------------------------------------------------- cart

interface TreeNode {
  feature?: number;
  threshold?: number;
  left?: TreeNode;
  right?: TreeNode;
  proportions?: number[];
}

function gini(counts: number[], total: number): number {
  if (total === 0) return 0;
  let s = 1;
  for (const c of counts) {
    const p = c / total;
    s -= p * p;
  }
  return s;
}

export class Cart implements Classifier {
  private root: TreeNode | null = null;
  private nClasses = 0;
  constructor(private maxDepth: number, private minSplit = 2) {
    if (maxDepth < 1) throw new Error("maxDepth must be >= 1");
  }

  fit(X: number[][], y: number[], nClasses: number): void {
    this.nClasses = nClasses;
    this.root = this.build(X, y, Array.from(y.keys()), 0);
  }

  private leaf(y: number[], idx: number[]): TreeNode {
    const counts = new Array<number>(this.nClasses).fill(0);
    for (const i of idx) counts[y[i]]++;
    return { proportions: counts.map(c => c / idx.length) };
  }

  private build(X: number[][], y: number[], idx: number[], depth: number): TreeNode {
    const counts = new Array<number>(this.nClasses).fill(0);
    for (const i of idx) counts[y[i]]++;
    const pure = counts.filter(c => c > 0).length <= 1;
    if (pure || depth >= this.maxDepth || idx.length < this.minSplit) {
      return this.leaf(y, idx);
    }
    const parentImpurity = gini(counts, idx.length);
    let best: { f: number; thr: number; gain: number } | null = null;
    const nFeatures = X[0].length;
    for (let f = 0; f < nFeatures; f++) {
      const sortedIdx = idx.slice().sort((a, b) => X[a][f] - X[b][f] || a - b);
      const leftCounts = new Array<number>(this.nClasses).fill(0);
      const rightCounts = counts.slice();
      for (let t = 0; t < sortedIdx.length - 1; t++) {
        const i = sortedIdx[t];
        leftCounts[y[i]]++;
        rightCounts[y[i]]--;
        const a = X[sortedIdx[t]][f];
        const bv = X[sortedIdx[t + 1]][f];
        if (a === bv) continue;
        const nL = t + 1;
        const nR = sortedIdx.length - nL;
        const gain = parentImpurity
          - (nL / sortedIdx.length) * gini(leftCounts, nL)
          - (nR / sortedIdx.length) * gini(rightCounts, nR);
        if (best === null || gain > best.gain + 1e-12) {
          best = { f, thr: (a + bv) / 2, gain };
        }
      }
    }
    if (best === null) return this.leaf(y, idx);
    const leftIdx = idx.filter(i => X[i][best!.f] <= best!.thr);
    const rightIdx = idx.filter(i => X[i][best!.f] > best!.thr);
    return {
      feature: best.f,
      threshold: best.thr,
      left: this.build(X, y, leftIdx, depth + 1),
      right: this.build(X, y, rightIdx, depth + 1),
    };
  }

  scores(X: number[][]): number[][] {
    if (!this.root) throw new Error("fit before scoring");
    return X.map(row => {
      let node = this.root!;
      while (node.proportions === undefined) {
        node = row[node.feature!] <= node.threshold! ? node.left! : node.right!;
      }
      return node.proportions.slice();
    });
  }
}

// ----------------------------------------------------------- model grids

function logspace(lo: number, hi: number, n: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i++) {
    out.push(Math.pow(10, lo + ((hi - lo) * i) / (n - 1)));
  }
  return out;
}

/** The search ranges each model is tuned over. */
export const BASELINE_SPECS: ModelSpec[] = [
  {
    name: "lasso",
    configs: logspace(-1.5, 0.4, 5).map(C => ({ C })),
    make: cfg => new LassoLogistic(cfg.C),
  },
  {
    name: "knn",
    configs: [1, 3, 5, 7, 9, 11].map(k => ({ k })),
    make: cfg => new Knn(cfg.k),
  },
  {
    name: "svm",
    configs: [1e-2, 1e-3, 1e-4, 1e-5].flatMap(gamma =>
      logspace(-0.9, 0.9, 5).map(C => ({ C, gamma }))),
    make: cfg => new SvmRbf(cfg.C, cfg.gamma),
  },
  {
    name: "dt",
    configs: [2, 3, 4, 5, 6, 7, 8].map(depth => ({ depth })),
    make: cfg => new Cart(cfg.depth),
  },
];
