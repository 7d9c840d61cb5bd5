/**
 * Evaluation protocol shared by the tabular baselines and the CNN path:
 * stratified 80/20 splits repeated 5 times, hyperparameters chosen by
 * 5-fold cross-validation on the train side only, AUCROC mean and std
 * over the repeats (macro one-vs-rest when multiclass).
 */
import * as fs from "node:fs";
import { aucScore, meanStd } from "./metrics.js";
import { ModelSpec } from "./baselines.js";
import { shuffled, substream } from "./rng.js";
import { SplitPair, assertDisjoint, stratifiedKFold, stratifiedSplits } from "./splits.js";

export interface EvalProtocol {
  repeats: number;
  trainFraction: number;
  cvFolds: number;
  seed: number;
}

export const DEFAULT_PROTOCOL: EvalProtocol = {
  repeats: 5,
  trainFraction: 0.8,
  cvFolds: 5,
  seed: 0,
};

export interface RepeatResult {
  auc: number;
  chosen: Record<string, number>;
}

export interface ProtocolResult {
  model: string;
  mean: number;
  std: number;
  perRepeat: RepeatResult[];
}

/** One repeat's data: its own feature matrix (normalization may be split-fitted). */
export interface RepeatData {
  X: number[][];
  y: number[];
  train: number[];
  test: number[];
}

function subset<T>(rows: readonly T[], idx: readonly number[]): T[] {
  return idx.map(i => rows[i]);
}

/**
 * Mean CV score for one config; folds whose held-out side lacks both
 * outcomes (possible under shuffled-label controls) are skipped.
 */
function cvScore(
  spec: ModelSpec, cfg: Record<string, number>,
  X: number[][], y: number[], nClasses: number, folds: number[][],
): number {
  const scores: number[] = [];
  for (const fold of folds) {
    const holdout = new Set(fold);
    const fitIdx: number[] = [];
    for (let i = 0; i < y.length; i++) if (!holdout.has(i)) fitIdx.push(i);
    assertDisjoint(fitIdx, fold);
    const model = spec.make(cfg);
    try {
      model.fit(subset(X, fitIdx), subset(y, fitIdx), nClasses);
      scores.push(aucScore(model.scores(subset(X, fold)), subset(y, fold), nClasses));
    } catch {
      continue; // degenerate fold
    }
  }
  if (scores.length === 0) return Number.NEGATIVE_INFINITY;
  return scores.reduce((a, b) => a + b, 0) / scores.length;
}

function evalRepeat(
  spec: ModelSpec, data: RepeatData, nClasses: number, cvFolds: number, cvSeed: number,
): RepeatResult {
  const { X, y, train, test } = data;
  assertDisjoint(train, test);
  const Xtr = subset(X, train);
  const ytr = subset(y, train);

  let chosen = spec.configs[0];
  if (spec.configs.length > 1) {
    const folds = stratifiedKFold(ytr, cvFolds, cvSeed);
    let bestScore = Number.NEGATIVE_INFINITY;
    for (const cfg of spec.configs) {
      const s = cvScore(spec, cfg, Xtr, ytr, nClasses, folds);
      if (s > bestScore) {
        bestScore = s;
        chosen = cfg;
      }
    }
  }

  const model = spec.make(chosen);
  model.fit(Xtr, ytr, nClasses);
  const auc = aucScore(model.scores(subset(X, test)), subset(y, test), nClasses);
  return { auc, chosen };
}

/** Protocol over explicit per-repeat data, e.g. split-fitted normalizations. */
export function evaluateRepeats(
  spec: ModelSpec,
  repeats: readonly RepeatData[],
  nClasses: number,
  protocol: EvalProtocol = DEFAULT_PROTOCOL,
): ProtocolResult {
  if (repeats.length === 0) throw new Error("no repeats to evaluate");
  const perRepeat = repeats.map((data, r) =>
    evalRepeat(spec, data, nClasses, protocol.cvFolds, protocol.seed + 7919 * r));
  const { mean, std } = meanStd(perRepeat.map(r => r.auc));
  return { model: spec.name, mean, std, perRepeat };
}

/** Protocol over a single feature matrix, splits drawn here (or supplied). */
export function evaluateTabular(
  spec: ModelSpec,
  X: number[][],
  y: number[],
  nClasses: number,
  protocol: EvalProtocol = DEFAULT_PROTOCOL,
  presetSplits?: SplitPair[],
): ProtocolResult {
  const splits = presetSplits
    ?? stratifiedSplits(y, protocol.repeats, protocol.trainFraction, protocol.seed);
  if (splits.length !== protocol.repeats) {
    throw new Error(`${splits.length} splits for ${protocol.repeats} repeats`);
  }
  const repeats = splits.map(({ train, test }) => ({ X, y, train, test }));
  return evaluateRepeats(spec, repeats, nClasses, protocol);
}

/** Label permutation for the chance-level control. */
export function shuffledLabels(y: readonly number[], seed: number, repeat = 0): number[] {
  return shuffled(y, substream(seed, 777, repeat));
}

export interface ResultRow {
  model: string;
  dataset: string;
  mean: number;
  std: number;
}

export function writeResultsCsv(path: string, rows: readonly ResultRow[]): void {
  const lines = ["model,dataset,mean_aucroc,std"];
  for (const r of rows) {
    lines.push(`${r.model},${r.dataset},${r.mean},${r.std}`);
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
