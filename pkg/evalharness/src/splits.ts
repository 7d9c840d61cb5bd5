import { shuffled, substream } from "./rng.js";

export interface SplitPair {
  train: number[];
  test: number[];
}

/**
 * Stratified train/test pairs, one per repeat. Within each class the train
 * share is round(fraction * count), clamped so both sides keep a sample.
 * Mirrors the split lists the pipeline writes, for callers without them.
 */
export function stratifiedSplits(
  y: readonly number[],
  repeats: number,
  trainFraction: number,
  seed: number,
): SplitPair[] {
  if (!(trainFraction > 0 && trainFraction < 1)) {
    throw new Error(`trainFraction ${trainFraction} outside (0, 1)`);
  }
  if (repeats < 1) throw new Error("repeats must be >= 1");
  const byClass = new Map<number, number[]>();
  y.forEach((c, i) => {
    const ids = byClass.get(c) ?? [];
    ids.push(i);
    byClass.set(c, ids);
  });
  for (const [c, ids] of byClass) {
    if (ids.length < 2) throw new Error(`class ${c} has ${ids.length} sample(s)`);
  }
  const classOrder = [...byClass.keys()].sort((a, b) => a - b);
  const out: SplitPair[] = [];
  for (let r = 0; r < repeats; r++) {
    const rand = substream(seed, 101, r);
    const train: number[] = [];
    const test: number[] = [];
    for (const c of classOrder) {
      const ids = shuffled(byClass.get(c)!, rand);
      let nTrain = Math.round(trainFraction * ids.length);
      nTrain = Math.min(Math.max(nTrain, 1), ids.length - 1);
      train.push(...ids.slice(0, nTrain));
      test.push(...ids.slice(nTrain));
    }
    train.sort((a, b) => a - b);
    test.sort((a, b) => a - b);
    out.push({ train, test });
  }
  return out;
}

/**
 * Stratified k folds for hyperparameter selection: shuffled class members
 * dealt round-robin, so fold sizes differ by at most one per class.
 */
export function stratifiedKFold(y: readonly number[], k: number, seed: number): number[][] {
  if (k < 2) throw new Error("need k >= 2 folds");
  const folds: number[][] = Array.from({ length: k }, () => []);
  const byClass = new Map<number, number[]>();
  y.forEach((c, i) => {
    const ids = byClass.get(c) ?? [];
    ids.push(i);
    byClass.set(c, ids);
  });
  const classOrder = [...byClass.keys()].sort((a, b) => a - b);
  const rand = substream(seed, 202);
  for (const c of classOrder) {
    const ids = shuffled(byClass.get(c)!, rand);
    ids.forEach((id, j) => folds[j % k].push(id));
  }
  for (const fold of folds) fold.sort((a, b) => a - b);
  return folds;
}

/** Leakage tripwire: fitting indices must never meet test indices. */
export function assertDisjoint(fit: readonly number[], test: readonly number[]): void {
  const seen = new Set(fit);
  for (const t of test) {
    if (seen.has(t)) throw new Error(`index ${t} appears in both fit and test sets`);
  }
}
