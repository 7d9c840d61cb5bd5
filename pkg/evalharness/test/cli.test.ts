import { describe, it, expect } from "vitest";

import { main, tabularRepeats } from "../src/cli.js";
import { readRun } from "../src/bundle.js";

describe("main", () => {
  it("exits 2 without a command and run directory", async () => {
    expect(await main([])).toBe(2);
    expect(await main(["baselines"])).toBe(2);
  });

  it("exits 2 on an unknown command", async () => {
    expect(await main(["frobnicate", "fixtures/tae_run"])).toBe(2);
  });

  it("refuses the cnn protocol on a run without splits", async () => {
    expect(await main(["cnn", "fixtures/tae_run"])).toBe(1);
  });
});

describe("tabularRepeats", () => {
  it("uses the on-disk split indices when the run has them", () => {
    const run = readRun("fixtures/hepatitis_splits");
    const repeats = tabularRepeats(run, 0, 5);
    expect(repeats).toHaveLength(5);
    repeats.forEach((rep, i) => {
      expect(rep.train).toEqual(run.splits[i].train);
      expect(rep.test).toEqual(run.splits[i].test);
      expect(rep.X).toHaveLength(64);
    });
  });

  it("draws seeded stratified splits otherwise", () => {
    const run = readRun("fixtures/tae_run");
    const repeats = tabularRepeats(run, 3, 5);
    expect(repeats).toHaveLength(5);
    const n = run.bundle!.images.length;
    for (const rep of repeats) {
      expect([...rep.train, ...rep.test].sort((a, b) => a - b))
        .toEqual(Array.from({ length: n }, (_, i) => i));
    }
    expect(tabularRepeats(run, 3, 5)).toEqual(repeats);
  });
});
