/**
 * AUCROC via the rank statistic. Midranks resolve tied scores, so models
 * that emit coarse scores (KNN vote fractions, tree leaf shares) are still
 * comparable.
 */
export function aucBinary(scores: ArrayLike<number>, positive: ArrayLike<boolean>): number {
  const n = scores.length;
  if (n !== positive.length) {
    throw new Error(`scores (${n}) and labels (${positive.length}) differ in length`);
  }
  let nPos = 0;
  for (let i = 0; i < n; i++) if (positive[i]) nPos++;
  const nNeg = n - nPos;
  if (nPos === 0 || nNeg === 0) {
    throw new Error("AUCROC needs both classes present");
  }
  const order = Array.from({ length: n }, (_, i) => i);
  order.sort((a, b) => scores[a] - scores[b]);

  // midrank within each tie group
  const ranks = new Float64Array(n);
  let i = 0;
  while (i < n) {
    let j = i;
    while (j + 1 < n && scores[order[j + 1]] === scores[order[i]]) j++;
    const mid = (i + j) / 2 + 1; // ranks are 1-based
    for (let t = i; t <= j; t++) ranks[order[t]] = mid;
    i = j + 1;
  }

  let rankSum = 0;
  for (let k = 0; k < n; k++) if (positive[k]) rankSum += ranks[k];
  return (rankSum - (nPos * (nPos + 1)) / 2) / (nPos * nNeg);
}

/**
 * One-vs-rest macro average over classes. `scores[i][c]` is the score for
 * sample i belonging to class c. Classes missing a positive or negative in
 * `y` cannot produce an AUC and are skipped from the average.
 */
export function aucMacroOvr(scores: number[][], y: number[], nClasses: number): number {
  const parts: number[] = [];
  for (let c = 0; c < nClasses; c++) {
    const pos = y.map(v => v === c);
    let nPos = 0;
    for (const p of pos) if (p) nPos++;
    if (nPos === 0 || nPos === y.length) continue;
    parts.push(aucBinary(scores.map(row => row[c]), pos));
  }
  if (parts.length === 0) throw new Error("no class with both outcomes present");
  return parts.reduce((a, b) => a + b, 0) / parts.length;
}

/**
 * Protocol metric: binary tasks score class 1, multiclass macro-averages
 * one-vs-rest.
 */
export function aucScore(scores: number[][], y: number[], nClasses: number): number {
  if (nClasses < 2) throw new Error("need at least 2 classes");
  if (nClasses === 2) {
    return aucBinary(scores.map(row => row[1]), y.map(v => v === 1));
  }
  return aucMacroOvr(scores, y, nClasses);
}

export function meanStd(xs: readonly number[]): { mean: number; std: number } {
  const n = xs.length;
  if (n === 0) throw new Error("empty sample");
  const mean = xs.reduce((a, b) => a + b, 0) / n;
  if (n === 1) return { mean, std: 0 };
  const ss = xs.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return { mean, std: Math.sqrt(ss / (n - 1)) };
}
