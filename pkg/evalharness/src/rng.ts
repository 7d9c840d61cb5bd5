/**
 * Small deterministic RNG so splits and shuffles reproduce across runs.
 * Mulberry32: 32-bit state, good enough statistical quality for sampling
 * indices, and trivially portable.
 */
export type Rand = () => number;

export function mulberry32(seed: number): Rand {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Derive an independent stream from a base seed and a few route integers. */
export function substream(seed: number, ...route: number[]): Rand {
  // FNV-1a over the route keeps streams for (seed, r) and (seed, r') apart
  let h = 0x811c9dc5 ^ (seed >>> 0);
  for (const part of route) {
    h = Math.imul(h ^ (part >>> 0), 0x01000193);
    h >>>= 0;
  }
  return mulberry32(h);
}

export function randInt(rand: Rand, n: number): number {
  return Math.floor(rand() * n);
}

/** Fisher-Yates, returns a new array. */
export function shuffled<T>(items: readonly T[], rand: Rand): T[] {
  const out = items.slice();
  for (let i = out.length - 1; i > 0; i--) {
    const j = randInt(rand, i + 1);
    const tmp = out[i];
    out[i] = out[j];
    out[j] = tmp;
  }
  return out;
}

export function range(n: number): number[] {
  const out = new Array<number>(n);
  for (let i = 0; i < n; i++) out[i] = i;
  return out;
}
