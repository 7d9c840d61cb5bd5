import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

const root = path.dirname(path.dirname(fileURLToPath(import.meta.url)));

/** Build the pipeline run directories once; the script itself is idempotent. */
export default function setup(): void {
  const wanted = [
    "fixtures/dermat_splits/run_config.json",
    "fixtures/hepatitis_splits/run_config.json",
    "fixtures/tae_run/run_config.json",
  ];
  if (wanted.every(f => fs.existsSync(path.join(root, f)))) return;
  execFileSync("bash", [path.join(root, "scripts", "make-fixtures.sh")], {
    cwd: root,
    stdio: "inherit",
  });
}
