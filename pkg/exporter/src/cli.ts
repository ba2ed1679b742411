#!/usr/bin/env node
/**
 * embed-posts: HateXplain-style JSON in, engine corpus file out.
 *
 * Tokenized posts are truncated to --max-tokens, embedded by the chosen
 * encoder, reduced to --out-dim through a projection fitted on the train
 * split (persisted to --projection; reused if the file already exists),
 * and written in the corpus format the engine's loader validates.
 */

import { existsSync, readFileSync } from "node:fs";

import { buildCorpus, MAX_TOKENS, OUT_DIM, writeCorpus } from "./corpus.js";
import { DEFAULT_TARGET_TAGS, filterTargetSubset, parseHateXplain } from "./hatexplain.js";
import { loadEncoder } from "./encoder.js";
import { Projection } from "./projection.js";

interface Args {
  input: string;
  out: string;
  projection: string;
  encoder: string;
  maxTokens: number;
  outDim: number;
  seed: number;
  filterTargets: boolean;
  tags: string[];
  labels?: string[];
}

function usage(): never {
  console.error(
    [
      "usage: corpus-exporter --input posts.json --out corpus.jsonl --projection proj.json",
      "  [--encoder hashed] [--max-tokens 512] [--out-dim 128] [--seed 0]",
      "  [--no-filter] [--tags islam,muslim] [--labels normal,offensive,hatespeech]",
    ].join("\n"),
  );
  process.exit(1);
}

function parseArgs(argv: string[]): Args {
  const args: Args = {
    input: "",
    out: "",
    projection: "",
    encoder: "hashed",
    maxTokens: MAX_TOKENS,
    outDim: OUT_DIM,
    seed: 0,
    filterTargets: true,
    tags: DEFAULT_TARGET_TAGS,
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) usage();
      return argv[i];
    };
    switch (flag) {
      case "--input": args.input = next(); break;
      case "--out": args.out = next(); break;
      case "--projection": args.projection = next(); break;
      case "--encoder": args.encoder = next(); break;
      case "--max-tokens": args.maxTokens = Number(next()); break;
      case "--out-dim": args.outDim = Number(next()); break;
      case "--seed": args.seed = Number(next()); break;
      case "--no-filter": args.filterTargets = false; break;
      case "--tags": args.tags = next().split(",").map((t) => t.trim()); break;
      case "--labels": args.labels = next().split(",").map((t) => t.trim()); break;
      case "--help": usage();
      default: console.error(`unknown flag ${flag}`); usage();
    }
  }
  if (!args.input || !args.out || !args.projection) usage();
  return args;
}

export function run(argv: string[]): number {
  const args = parseArgs(argv);

  let encoder;
  try {
    encoder = loadEncoder(args.encoder);
  } catch (err) {
    console.error(`encoder load failure: ${(err as Error).message}`);
    return 1;
  }

  const doc = JSON.parse(readFileSync(args.input, "utf-8"));
  const parsed = parseHateXplain(doc);
  let posts = parsed.posts;
  console.error(
    `parsed ${posts.length} posts (${parsed.droppedNoMajority} dropped without label majority)`,
  );
  if (args.filterTargets) {
    const filtered = filterTargetSubset(posts, args.tags);
    console.error(
      `target filter [${args.tags.join(", ")}]: kept ${filtered.kept.length}, ` +
        `dropped ${filtered.dropped}, skipped ${filtered.skippedNoTargets} without target fields`,
    );
    posts = filtered.kept;
  }

  const projection = existsSync(args.projection)
    ? Projection.load(args.projection)
    : undefined;
  const result = buildCorpus(posts, encoder, {
    maxTokens: args.maxTokens,
    outDim: args.outDim,
    seed: args.seed,
    labelScheme: args.labels,
    projection,
  });
  if (result.skippedEmptyText > 0) {
    console.error(`warning: skipped ${result.skippedEmptyText} posts with empty text`);
  }
  if (!projection) {
    result.projection.save(args.projection);
    console.error(`fitted projection written to ${args.projection}`);
  }
  writeCorpus(result, args.out);
  console.error(
    `wrote ${result.records.length} records (F=${result.header.feature_dim}, ` +
      `K=${result.header.num_classes}, ${result.truncated} truncated) to ${args.out}`,
  );
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  try {
    process.exit(run(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}
