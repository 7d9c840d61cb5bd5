/**
 * The image classifier: a single convolution, max-pool, flatten and two
 * dense layers. Binary tasks end in one sigmoid unit with binary cross
 * entropy, multiclass in softmax with categorical cross entropy. Training
 * stops early on validation loss and halves the learning rate on plateau.
 * Hyperparameters come from a small fixed grid searched by cross-validation
 * rather than a randomized sweep.
 */
import * as tf from "@tensorflow/tfjs";
import { ImageBundle, SampleImage, labelCodes } from "./bundle.js";
import { aucScore, meanStd } from "./metrics.js";
import { ProtocolResult, RepeatResult } from "./protocol.js";
import { Rand, randInt, range, substream } from "./rng.js";
import { assertDisjoint, stratifiedKFold } from "./splits.js";

export interface CnnConfig {
  filters: number;
  kernelSize: number;
  denseUnits: number;
  learningRate: number;
  dropout: number;
}

/** Four points spanning the tuned dimensions. */
export const CNN_GRID: CnnConfig[] = [
  { filters: 8, kernelSize: 3, denseUnits: 32, learningRate: 3e-3, dropout: 0.25 },
  { filters: 16, kernelSize: 3, denseUnits: 64, learningRate: 3e-3, dropout: 0.25 },
  { filters: 8, kernelSize: 5, denseUnits: 16, learningRate: 1e-3, dropout: 0.4 },
  { filters: 16, kernelSize: 5, denseUnits: 32, learningRate: 1e-3, dropout: 0.4 },
];

export interface TrainOptions {
  maxEpochs: number;
  batchSize: number;
  /** epochs without val-loss improvement before stopping */
  patience: number;
  /** epochs without improvement before halving the learning rate */
  plateauPatience: number;
  minLearningRate: number;
  seed: number;
}

export const DEFAULT_TRAIN: TrainOptions = {
  maxEpochs: 60,
  batchSize: 16,
  patience: 8,
  plateauPatience: 4,
  minLearningRate: 1e-5,
  seed: 0,
};

export function buildCnn(
  rows: number, cols: number, nClasses: number, cfg: CnnConfig, seed: number,
): tf.Sequential {
  if (nClasses < 2) throw new Error("need at least 2 classes");
  const model = tf.sequential();
  model.add(tf.layers.conv2d({
    filters: cfg.filters,
    kernelSize: cfg.kernelSize,
    padding: "same",
    activation: "relu",
    inputShape: [rows, cols, 1],
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed }),
  }));
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({
    units: cfg.denseUnits,
    activation: "relu",
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
  }));
  model.add(tf.layers.dropout({ rate: cfg.dropout, seed: seed + 2 }));
  const binary = nClasses === 2;
  model.add(tf.layers.dense({
    units: binary ? 1 : nClasses,
    activation: binary ? "sigmoid" : "softmax",
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
  }));
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: binary ? "binaryCrossentropy" : "categoricalCrossentropy",
  });
  return model;
}

export function imagesToTensor(
  images: readonly SampleImage[], idx: readonly number[], rows: number, cols: number,
): tf.Tensor4D {
  const data = new Float32Array(idx.length * rows * cols);
  idx.forEach((i, t) => data.set(images[i].pixels, t * rows * cols));
  return tf.tensor4d(data, [idx.length, rows, cols, 1]);
}

export function labelsToTensor(
  y: readonly number[], idx: readonly number[], nClasses: number,
): tf.Tensor2D {
  if (nClasses === 2) {
    return tf.tensor2d(idx.map(i => [y[i]]), [idx.length, 1]);
  }
  const data = new Float32Array(idx.length * nClasses);
  idx.forEach((i, t) => {
    data[t * nClasses + y[i]] = 1;
  });
  return tf.tensor2d(data, [idx.length, nClasses]);
}

/**
 * Seeded epoch loop around model.fit. Keeps the best-validation weights
 * and restores them before returning.
 */
export async function trainCnn(
  model: tf.Sequential,
  xFit: tf.Tensor4D, yFit: tf.Tensor2D,
  xVal: tf.Tensor4D, yVal: tf.Tensor2D,
  opts: TrainOptions = DEFAULT_TRAIN,
): Promise<{ bestValLoss: number; epochs: number }> {
  const n = xFit.shape[0];
  const rand: Rand = substream(opts.seed, 303);
  let best = Number.POSITIVE_INFINITY;
  let bestWeights: tf.Tensor[] | null = null;
  let sinceBest = 0;
  let sincePlateau = 0;
  let epoch = 0;
  const optimizer = model.optimizer as unknown as { learningRate: number };
  for (; epoch < opts.maxEpochs; epoch++) {
    const order = range(n);
    for (let i = n - 1; i > 0; i--) {
      const j = randInt(rand, i + 1);
      const tmp = order[i];
      order[i] = order[j];
      order[j] = tmp;
    }
    const xEpoch = tf.gather(xFit, order);
    const yEpoch = tf.gather(yFit, order);
    const history = await model.fit(xEpoch, yEpoch, {
      epochs: 1,
      batchSize: Math.min(opts.batchSize, n),
      shuffle: false,
      validationData: [xVal, yVal],
      verbose: 0,
    });
    xEpoch.dispose();
    yEpoch.dispose();
    const valLoss = history.history.val_loss[0] as number;
    if (valLoss < best - 1e-6) {
      best = valLoss;
      sinceBest = 0;
      sincePlateau = 0;
      if (bestWeights) bestWeights.forEach(w => w.dispose());
      bestWeights = model.getWeights().map(w => w.clone());
    } else {
      sinceBest++;
      sincePlateau++;
    }
    if (sincePlateau >= opts.plateauPatience) {
      optimizer.learningRate = Math.max(optimizer.learningRate / 2, opts.minLearningRate);
      sincePlateau = 0;
    }
    if (sinceBest >= opts.patience) {
      epoch++;
      break;
    }
  }
  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach(w => w.dispose());
  }
  return { bestValLoss: best, epochs: epoch };
}

export async function cnnScores(
  model: tf.LayersModel, x: tf.Tensor4D, nClasses: number,
): Promise<number[][]> {
  const pred = model.predict(x) as tf.Tensor2D;
  const raw = await pred.array();
  pred.dispose();
  if (nClasses === 2) return raw.map(r => [1 - r[0], r[0]]);
  return raw;
}

function checkTwoClasses(y: readonly number[], idx: readonly number[]): void {
  const seen = new Set<number>();
  for (const i of idx) seen.add(y[i]);
  if (seen.size < 2) throw new Error("train split holds fewer than 2 classes");
}

/** Carve a stratified validation slice out of a fit index list. */
function carveVal(
  y: readonly number[], idx: readonly number[], fraction: number, rand: Rand,
): { fit: number[]; val: number[] } {
  const byClass = new Map<number, number[]>();
  for (const i of idx) {
    const ids = byClass.get(y[i]) ?? [];
    ids.push(i);
    byClass.set(y[i], ids);
  }
  const fit: number[] = [];
  const val: number[] = [];
  for (const c of [...byClass.keys()].sort((a, b) => a - b)) {
    const ids = byClass.get(c)!.slice();
    for (let i = ids.length - 1; i > 0; i--) {
      const j = randInt(rand, i + 1);
      const tmp = ids[i];
      ids[i] = ids[j];
      ids[j] = tmp;
    }
    let nVal = Math.round(fraction * ids.length);
    nVal = Math.min(Math.max(nVal, 1), ids.length - 1);
    val.push(...ids.slice(0, nVal));
    fit.push(...ids.slice(nVal));
  }
  fit.sort((a, b) => a - b);
  val.sort((a, b) => a - b);
  return { fit, val };
}

async function fitAndScore(
  bundle: ImageBundle, y: number[],
  fitIdx: number[], valIdx: number[], scoreIdx: number[],
  cfg: CnnConfig, opts: TrainOptions, seed: number,
): Promise<number[][]> {
  checkTwoClasses(y, fitIdx);
  const nClasses = bundle.classes.length;
  const model = buildCnn(bundle.rows, bundle.cols, nClasses, cfg, seed);
  const xFit = imagesToTensor(bundle.images, fitIdx, bundle.rows, bundle.cols);
  const yFit = labelsToTensor(y, fitIdx, nClasses);
  const xVal = imagesToTensor(bundle.images, valIdx, bundle.rows, bundle.cols);
  const yVal = labelsToTensor(y, valIdx, nClasses);
  const xScore = imagesToTensor(bundle.images, scoreIdx, bundle.rows, bundle.cols);
  try {
    await trainCnn(model, xFit, yFit, xVal, yVal, { ...opts, seed });
    return await cnnScores(model, xScore, nClasses);
  } finally {
    xFit.dispose();
    yFit.dispose();
    xVal.dispose();
    yVal.dispose();
    xScore.dispose();
    model.dispose();
  }
}

export interface CnnSplitInput {
  bundle: ImageBundle;
  train: number[];
  test: number[];
}

export interface CnnProtocolOptions {
  grid: CnnConfig[];
  train: TrainOptions;
  cvFolds: number;
  seed: number;
}

export const DEFAULT_CNN_PROTOCOL: CnnProtocolOptions = {
  grid: CNN_GRID,
  train: DEFAULT_TRAIN,
  cvFolds: 5,
  seed: 0,
};

/**
 * One repeat: pick a config by stratified CV on the train side (the held
 * fold doubles as the early-stopping monitor), refit on the whole train
 * side with an internal validation carve, score the untouched test side.
 */
export async function evalCnnSplit(
  input: CnnSplitInput,
  opts: CnnProtocolOptions,
  repeat: number,
  labelOverride?: number[],
): Promise<RepeatResult & { model: tf.Sequential }> {
  const { bundle, train, test } = input;
  assertDisjoint(train, test);
  const nClasses = bundle.classes.length;
  const y = labelOverride ?? labelCodes(bundle.tabular.labels, bundle.classes);

  let chosen = opts.grid[0];
  if (opts.grid.length > 1) {
    const yTrain = train.map(i => y[i]);
    const folds = stratifiedKFold(yTrain, opts.cvFolds, opts.seed + 7919 * repeat);
    let bestCv = Number.NEGATIVE_INFINITY;
    for (let g = 0; g < opts.grid.length; g++) {
      const cfg = opts.grid[g];
      const foldAucs: number[] = [];
      for (let f = 0; f < folds.length; f++) {
        const holdout = new Set(folds[f]);
        const fitIdx = train.filter((_, t) => !holdout.has(t));
        const valIdx = folds[f].map(t => train[t]);
        assertDisjoint(fitIdx, test);
        assertDisjoint(valIdx, test);
        try {
          const scores = await fitAndScore(
            bundle, y, fitIdx, valIdx, valIdx, cfg, opts.train,
            opts.seed + 100000 * repeat + 1000 * g + f,
          );
          foldAucs.push(aucScore(scores, valIdx.map(i => y[i]), nClasses));
        } catch {
          continue; // degenerate fold
        }
      }
      if (foldAucs.length === 0) continue;
      const mean = foldAucs.reduce((a, b) => a + b, 0) / foldAucs.length;
      if (mean > bestCv) {
        bestCv = mean;
        chosen = cfg;
      }
    }
  }

  checkTwoClasses(y, train);
  const rand = substream(opts.seed, 404, repeat);
  const { fit, val } = carveVal(y, train, 0.2, rand);
  const finalSeed = opts.seed + 100000 * repeat + 99991;
  const model = buildCnn(bundle.rows, bundle.cols, nClasses, chosen, finalSeed);
  const xFit = imagesToTensor(bundle.images, fit, bundle.rows, bundle.cols);
  const yFit = labelsToTensor(y, fit, nClasses);
  const xVal = imagesToTensor(bundle.images, val, bundle.rows, bundle.cols);
  const yVal = labelsToTensor(y, val, nClasses);
  const xTest = imagesToTensor(bundle.images, test, bundle.rows, bundle.cols);
  try {
    await trainCnn(model, xFit, yFit, xVal, yVal, { ...opts.train, seed: finalSeed });
    const scores = await cnnScores(model, xTest, nClasses);
    const auc = aucScore(scores, test.map(i => y[i]), nClasses);
    return { auc, chosen: chosen as unknown as Record<string, number>, model };
  } finally {
    xFit.dispose();
    yFit.dispose();
    xVal.dispose();
    yVal.dispose();
    xTest.dispose();
  }
}

/**
 * Full protocol over the split directories of one run. Returns the mean
 * and std over repeats; models are disposed unless `keepModels`.
 */
export async function evalCnnProtocol(
  inputs: readonly CnnSplitInput[],
  opts: CnnProtocolOptions = DEFAULT_CNN_PROTOCOL,
  labelOverrides?: number[][],
): Promise<ProtocolResult> {
  if (inputs.length === 0) throw new Error("no splits to evaluate");
  const perRepeat: RepeatResult[] = [];
  for (let r = 0; r < inputs.length; r++) {
    const res = await evalCnnSplit(inputs[r], opts, r, labelOverrides?.[r]);
    res.model.dispose();
    perRepeat.push({ auc: res.auc, chosen: res.chosen });
  }
  const { mean, std } = meanStd(perRepeat.map(x => x.auc));
  return { model: "cnn", mean, std, perRepeat };
}
