/** CLI: rq1 | rq3 | figures | all over a corpus CSV.
 *
 *   node dist/cli.js rq1 --corpus corpus.csv --model svd --target SP --out-dir out
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { pathToFileURL } from "node:url";

import { loadCorpus } from "./csv.js";
import { writeFigures } from "./figures.js";
import { FairnessTarget, rq1Regression, topImportance } from "./regression.js";
import { rq3Subgroups, subgroupTableToCsv } from "./subgroups.js";

interface Args {
  command: string;
  corpus: string;
  model: string;
  target: FairnessTarget;
  outDir: string;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  if (!command || !["rq1", "rq3", "figures", "all"].includes(command)) {
    throw new Error("usage: cli.js <rq1|rq3|figures|all> --corpus FILE [--model ID] " +
      "[--target SP|EO] [--out-dir DIR]");
  }
  const opts: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`bad argument pair: ${key} ${value ?? ""}`);
    }
    opts[key.slice(2)] = value;
  }
  if (!opts["corpus"]) throw new Error("--corpus is required");
  const target = (opts["target"] ?? "SP").toUpperCase();
  if (target !== "SP" && target !== "EO") throw new Error("--target must be SP or EO");
  return {
    command,
    corpus: opts["corpus"],
    model: opts["model"] ?? "svd",
    target: target as FairnessTarget,
    outDir: opts["out-dir"] ?? "analysis-out",
  };
}

function runRq1(args: Args): void {
  const corpus = loadCorpus(args.corpus);
  const result = rq1Regression(corpus, args.model, args.target);
  mkdirSync(args.outDir, { recursive: true });
  const lines = ["model,target,r2,assortativity_share,rows_used,top_importance"];
  lines.push([result.modelId, result.target, result.r2.toFixed(4),
    result.assortativityShare.toFixed(1), result.rowsUsed, topImportance(result)].join(","));
  lines.push("");
  lines.push("measure,importance");
  for (const [name, value] of Object.entries(result.importances)) {
    lines.push(`${name},${value.toFixed(6)}`);
  }
  const path = join(args.outDir, `rq1_${args.model}_${args.target}.csv`);
  writeFileSync(path, lines.join("\n") + "\n");
  console.log(`R2=${result.r2.toFixed(3)} assortativity_share=${result.assortativityShare.toFixed(1)}% ` +
    `top=${topImportance(result)} -> ${path}`);
}

function runRq3(args: Args): void {
  const corpus = loadCorpus(args.corpus);
  const table = rq3Subgroups(corpus, args.model);
  mkdirSync(args.outDir, { recursive: true });
  const path = join(args.outDir, `rq3_${args.model}.csv`);
  writeFileSync(path, subgroupTableToCsv(table));
  console.log(`wrote ${path} (${table.cells.length} cells)`);
}

function runFigures(args: Args): void {
  const corpus = loadCorpus(args.corpus);
  const manifest = writeFigures(corpus, args.outDir);
  console.log(`wrote ${manifest.files.length} figures to ${args.outDir}`);
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    if (args.command === "rq1" || args.command === "all") runRq1(args);
    if (args.command === "rq3" || args.command === "all") runRq3(args);
    if (args.command === "figures" || args.command === "all") runFigures(args);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
