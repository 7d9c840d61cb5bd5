/**
 * Gradient-weighted class activation maps. The class score is differentiated
 * against the last convolutional feature maps; spatial means of those
 * gradients weight the maps, the weighted sum is ReLU-clipped, upsampled to
 * the image size, then min-max normalized. Cells resolve back to feature
 * names through the pixel manifest, and padding cells never appear in the
 * top-k report.
 */
import * as tf from "@tensorflow/tfjs";
import { CellRecord } from "./bundle.js";
import { writeRgb } from "./png.js";

export interface Attribution {
  row: number;
  col: number;
  value: number;
  feature: string;
  sourceFeature: string;
}

export interface Overlay {
  rows: number;
  cols: number;
  /** row-major, [0, 1] */
  heatmap: Float32Array;
  /** strongest non-padding cells, highest first */
  topk: Attribution[];
  /** true when the map had no spread and normalization was skipped */
  degenerate: boolean;
}

function lastConvIndex(model: tf.LayersModel): number {
  let idx = -1;
  model.layers.forEach((layer, i) => {
    if (layer.getClassName() === "Conv2D") idx = i;
  });
  if (idx < 0) throw new Error("model has no convolutional layer");
  return idx;
}

/**
 * Raw class activation map for one image, as the [0,1]-normalized raster
 * plus the degenerate flag.
 */
export function classActivationMap(
  model: tf.LayersModel,
  pixels: Float32Array,
  rows: number,
  cols: number,
  classIndex: number,
): { heatmap: Float32Array; degenerate: boolean } {
  const convIdx = lastConvIndex(model);
  const convLayer = model.layers[convIdx];

  const holder: { heatmap?: Float32Array; degenerate?: boolean } = {};
  tf.tidy(() => {
    const head = tf.model({ inputs: model.inputs, outputs: convLayer.output as tf.SymbolicTensor });
    const convShape = (convLayer.output as tf.SymbolicTensor).shape.slice(1) as number[];
    const tailInput = tf.input({ shape: convShape });
    let x: tf.SymbolicTensor = tailInput;
    for (let i = convIdx + 1; i < model.layers.length; i++) {
      x = model.layers[i].apply(x) as tf.SymbolicTensor;
    }
    const tail = tf.model({ inputs: tailInput, outputs: x });

    const img = tf.tensor4d(pixels, [1, rows, cols, 1]);
    const convOut = head.predict(img) as tf.Tensor4D;
    const scoreOf = (a: tf.Tensor4D) => {
      const out = tail.apply(a) as tf.Tensor;
      const flat = out.flatten();
      const k = flat.shape[0] === 1 ? 0 : classIndex;
      return flat.slice([k], [1]).reshape([]) as tf.Scalar;
    };
    const grads = tf.grad(scoreOf as (a: tf.Tensor) => tf.Scalar)(convOut);
    const weights = grads.mean([1, 2], true); // [1,1,1,filters]
    let cam = tf.relu(convOut.mul(weights).sum(3)).squeeze([0]) as tf.Tensor2D;
    if (cam.shape[0] !== rows || cam.shape[1] !== cols) {
      cam = tf.image
        .resizeBilinear(cam.expandDims(2) as tf.Tensor3D, [rows, cols], true)
        .squeeze([2]);
    }
    const lo = cam.min().dataSync()[0];
    const hi = cam.max().dataSync()[0];
    if (hi - lo <= 1e-12) {
      holder.heatmap = new Float32Array(rows * cols);
      holder.degenerate = true;
    } else {
      const norm = cam.sub(lo).div(hi - lo);
      holder.heatmap = new Float32Array(norm.dataSync());
      holder.degenerate = false;
    }
  });
  return { heatmap: holder.heatmap!, degenerate: holder.degenerate! };
}

/**
 * Full overlay: activation map plus the k hottest cells that map to real
 * features. Padding cells are filtered via the manifest, never by value.
 */
export function gradcam(
  model: tf.LayersModel,
  pixels: Float32Array,
  manifest: readonly CellRecord[],
  classIndex: number,
  k = 10,
): Overlay {
  const rows = Math.max(...manifest.map(c => c.row)) + 1;
  const cols = Math.max(...manifest.map(c => c.col)) + 1;
  if (pixels.length !== rows * cols) {
    throw new Error(`image has ${pixels.length} pixels, manifest grid is ${rows}x${cols}`);
  }
  const { heatmap, degenerate } = classActivationMap(model, pixels, rows, cols, classIndex);

  const live = manifest.filter(c => !c.isPadding);
  const ranked = live
    .map(c => ({
      row: c.row,
      col: c.col,
      value: heatmap[c.row * cols + c.col],
      feature: c.feature,
      sourceFeature: c.sourceFeature,
    }))
    .sort((a, b) => b.value - a.value || a.row - b.row || a.col - b.col);
  return { rows, cols, heatmap, topk: ranked.slice(0, Math.min(k, ranked.length)), degenerate };
}

/** Heat ramp from dark blue through red to yellow. */
function heatColor(h: number): [number, number, number] {
  const r = Math.min(1, 2 * h);
  const g = Math.max(0, 2 * h - 1);
  const b = Math.max(0, 1 - 2 * h) * 0.5;
  return [Math.round(255 * r), Math.round(255 * g), Math.round(255 * b)];
}

/**
 * Blend the activation map over the grayscale sample and write a PNG with
 * the same pixel dimensions.
 */
export function writeOverlayPng(
  path: string,
  pixels: Float32Array,
  overlay: Overlay,
  alpha = 0.55,
): void {
  const { rows, cols, heatmap } = overlay;
  const rgb = new Uint8Array(rows * cols * 3);
  for (let i = 0; i < rows * cols; i++) {
    const gray = Math.round(255 * pixels[i]);
    const [hr, hg, hb] = heatColor(heatmap[i]);
    rgb[i * 3] = Math.round((1 - alpha) * gray + alpha * hr);
    rgb[i * 3 + 1] = Math.round((1 - alpha) * gray + alpha * hg);
    rgb[i * 3 + 2] = Math.round((1 - alpha) * gray + alpha * hb);
  }
  writeRgb(path, cols, rows, rgb);
}
