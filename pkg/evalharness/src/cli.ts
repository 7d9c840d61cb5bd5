#!/usr/bin/env node
/**
 * Entry points:
 *   evalharness baselines <run_dir> [--out results.csv] [--control] [--seed N]
 *   evalharness cnn <run_dir> [--out results.csv] [--seed N]
 *   evalharness gradcam <run_dir> [--out-dir overlays] [--samples N] [--topk K] [--seed N]
 *
 * A run directory is whatever the image pipeline wrote: run_config.json plus
 * either split_XX subdirectories or a single bundle.
 */
import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";
import { BASELINE_SPECS } from "./baselines.js";
import { ImageBundle, RunDir, labelCodes, readRun } from "./bundle.js";
import { CNN_GRID, DEFAULT_CNN_PROTOCOL, evalCnnProtocol, evalCnnSplit } from "./cnn.js";
import { gradcam, writeOverlayPng } from "./gradcam.js";
import {
  DEFAULT_PROTOCOL, ProtocolResult, RepeatData, ResultRow,
  evaluateRepeats, shuffledLabels, writeResultsCsv,
} from "./protocol.js";
import { substream } from "./rng.js";
import { shuffled } from "./rng.js";
import { stratifiedSplits } from "./splits.js";

function datasetName(run: RunDir): string {
  const data = run.config["data"];
  if (typeof data === "string") return path.basename(data).replace(/\.csv$/, "");
  return path.basename(run.dir);
}

/** Per-repeat tabular views: on-disk split indices when present. */
export function tabularRepeats(run: RunDir, seed: number, repeats: number): RepeatData[] {
  if (run.splits.length > 0) {
    return run.splits.map(s => ({
      X: s.bundle.tabular.rows,
      y: labelCodes(s.bundle.tabular.labels, s.bundle.classes),
      train: s.train,
      test: s.test,
    }));
  }
  const bundle = run.bundle!;
  const y = labelCodes(bundle.tabular.labels, bundle.classes);
  return stratifiedSplits(y, repeats, 0.8, seed).map(({ train, test }) => ({
    X: bundle.tabular.rows, y, train, test,
  }));
}

function printResult(res: ProtocolResult): void {
  const per = res.perRepeat.map(r => r.auc.toFixed(3)).join(" ");
  console.log(`${res.model.padEnd(16)} AUCROC ${res.mean.toFixed(4)} +- ${res.std.toFixed(4)}  [${per}]`);
}

function cmdBaselines(runDir: string, out: string | undefined, control: boolean, seed: number): number {
  const run = readRun(runDir);
  const name = datasetName(run);
  const repeats = tabularRepeats(run, seed, DEFAULT_PROTOCOL.repeats);
  const nClasses = run.splits.length > 0
    ? run.splits[0].bundle.classes.length
    : run.bundle!.classes.length;
  const protocol = { ...DEFAULT_PROTOCOL, seed, repeats: repeats.length };
  const rows: ResultRow[] = [];
  for (const spec of BASELINE_SPECS) {
    const res = evaluateRepeats(spec, repeats, nClasses, protocol);
    printResult(res);
    rows.push({ model: spec.name, dataset: name, mean: res.mean, std: res.std });
    if (control) {
      const nullRepeats = repeats.map((d, r) => ({
        ...d, y: shuffledLabels(d.y, seed, r),
      }));
      const nullRes = evaluateRepeats(spec, nullRepeats, nClasses, protocol);
      printResult({ ...nullRes, model: `${spec.name}_shuffled` });
      rows.push({
        model: `${spec.name}_shuffled`, dataset: name, mean: nullRes.mean, std: nullRes.std,
      });
    }
  }
  if (out) {
    writeResultsCsv(out, rows);
    console.log(`wrote ${out}`);
  }
  return 0;
}

async function cmdCnn(runDir: string, out: string | undefined, seed: number): Promise<number> {
  const run = readRun(runDir);
  if (run.splits.length === 0) {
    console.error("cnn needs a run with split_XX directories (--train-fraction/--repeats)");
    return 1;
  }
  const name = datasetName(run);
  const inputs = run.splits.map(s => ({ bundle: s.bundle, train: s.train, test: s.test }));
  const res = await evalCnnProtocol(inputs, { ...DEFAULT_CNN_PROTOCOL, seed });
  printResult(res);
  res.perRepeat.forEach((r, i) => {
    console.log(`  repeat ${i}: auc ${r.auc.toFixed(4)} config ${JSON.stringify(r.chosen)}`);
  });
  if (out) {
    writeResultsCsv(out, [{ model: "cnn", dataset: name, mean: res.mean, std: res.std }]);
    console.log(`wrote ${out}`);
  }
  return 0;
}

async function cmdGradcam(
  runDir: string, outDir: string, samples: number, topk: number, seed: number,
): Promise<number> {
  const run = readRun(runDir);
  let bundle: ImageBundle;
  let train: number[];
  let test: number[];
  if (run.splits.length > 0) {
    bundle = run.splits[0].bundle;
    train = run.splits[0].train;
    test = run.splits[0].test;
  } else {
    bundle = run.bundle!;
    const y = labelCodes(bundle.tabular.labels, bundle.classes);
    [{ train, test }] = stratifiedSplits(y, 1, 0.8, seed);
  }
  const y = labelCodes(bundle.tabular.labels, bundle.classes);
  const input = { bundle, train, test };
  const { model } = await evalCnnSplit(
    input, { grid: [CNN_GRID[0]], train: DEFAULT_CNN_PROTOCOL.train, cvFolds: 5, seed }, 0,
  );

  fs.mkdirSync(outDir, { recursive: true });
  const rand = substream(seed, 909);
  const picked = shuffled(test, rand).slice(0, Math.min(samples, test.length)).sort((a, b) => a - b);
  const counts = new Map<string, number>();
  const lines = ["sample,label,rank,row,col,value,feature,source_feature"];
  for (const i of picked) {
    const img = bundle.images[i];
    const overlay = gradcam(model, img.pixels, bundle.manifest, y[i], topk);
    const stem = path.basename(img.path).replace(/\.png$/, "");
    writeOverlayPng(path.join(outDir, `${stem}_cam.png`), img.pixels, overlay);
    overlay.topk.forEach((att, rank) => {
      lines.push([i, img.label, rank + 1, att.row, att.col,
        att.value.toFixed(6), att.feature, att.sourceFeature].join(","));
      counts.set(att.sourceFeature, (counts.get(att.sourceFeature) ?? 0) + 1);
    });
    if (overlay.degenerate) console.log(`sample ${i}: degenerate (flat) activation map`);
  }
  fs.writeFileSync(path.join(outDir, "attributions.csv"), lines.join("\n") + "\n");
  model.dispose();

  const rankedSources = [...counts.entries()].sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1));
  console.log(`top-${topk} source features over ${picked.length} test images:`);
  for (const [feat, n] of rankedSources.slice(0, 10)) {
    console.log(`  ${feat.padEnd(24)} ${n}`);
  }
  console.log(`wrote overlays + attributions.csv under ${outDir}`);
  return 0;
}

export async function main(argv = process.argv.slice(2)): Promise<number> {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      out: { type: "string" },
      "out-dir": { type: "string", default: "overlays" },
      samples: { type: "string", default: "12" },
      topk: { type: "string", default: "10" },
      seed: { type: "string", default: "0" },
      control: { type: "boolean", default: false },
    },
  });
  const [command, runDir] = positionals;
  if (!command || !runDir) {
    console.error("usage: evalharness <baselines|cnn|gradcam> <run_dir> [options]");
    return 2;
  }
  const seed = Number(values.seed);
  if (command === "baselines") {
    return cmdBaselines(runDir, values.out, values.control ?? false, seed);
  }
  if (command === "cnn") {
    return cmdCnn(runDir, values.out, seed);
  }
  if (command === "gradcam") {
    return cmdGradcam(runDir, values["out-dir"]!, Number(values.samples), Number(values.topk), seed);
  }
  console.error(`unknown command ${command}`);
  return 2;
}

const entry = process.argv[1];
if (entry && (entry.endsWith("cli.js") || entry.endsWith("evalharness"))) {
  main().then(code => {
    process.exitCode = code;
  });
}
