/**
 * The export pipeline: truncate, embed, reduce, and write the corpus file
 * consumed by the engine (header line plus one JSON record per line).
 */

import { writeFileSync } from "node:fs";

import { mulberry32 } from "./encoder.js";
import { Projection } from "./projection.js";
import type { CorpusRecord, Encoder, RawPost } from "./types.js";

export const MAX_TOKENS = 512;
export const OUT_DIM = 128;

export type Split = "train" | "val" | "test";

const SPLITS: Split[] = ["train", "val", "test"];
const RATIOS = [0.6, 0.2, 0.2];

/** Deterministic 6:2:2 assignment: seeded shuffle, floored counts, leftover to train then val. */
export function assignSplits(count: number, seed: number): Split[] {
  const order = [...Array(count).keys()];
  const uniform = mulberry32(seed);
  for (let i = count - 1; i > 0; i--) {
    const j = Math.floor(uniform() * (i + 1));
    [order[i], order[j]] = [order[j], order[i]];
  }
  const counts = RATIOS.map((r) => Math.floor(count * r));
  let leftover = count - counts.reduce((a, b) => a + b, 0);
  for (let i = 0; leftover > 0; i = (i + 1) % 2) {
    counts[i] += 1;
    leftover -= 1;
  }
  const splits = new Array<Split>(count);
  let cursor = 0;
  SPLITS.forEach((split, s) => {
    for (let k = 0; k < counts[s]; k++) {
      splits[order[cursor]] = split;
      cursor += 1;
    }
  });
  return splits;
}

export interface ExportOptions {
  maxTokens?: number;
  outDim?: number;
  seed?: number;
  labelScheme?: string[];
  /** Reuse a fitted projection instead of fitting on the train split. */
  projection?: Projection;
}

export interface ExportResult {
  records: CorpusRecord[];
  header: { feature_dim: number; num_classes: number };
  projection: Projection;
  skippedEmptyText: number;
  truncated: number;
}

export function buildCorpus(
  posts: RawPost[],
  encoder: Encoder,
  options: ExportOptions = {},
): ExportResult {
  const maxTokens = options.maxTokens ?? MAX_TOKENS;
  const outDim = options.outDim ?? OUT_DIM;
  const seed = options.seed ?? 0;
  const scheme = options.labelScheme ?? inferLabelScheme(posts);

  const labelIndex = new Map(scheme.map((name, i) => [name, i] as const));
  const usable: RawPost[] = [];
  let skippedEmptyText = 0;
  for (const post of posts) {
    if (post.tokens.length === 0 || post.text.trim() === "") {
      skippedEmptyText += 1;
      continue;
    }
    if (!labelIndex.has(post.label)) {
      throw new Error(
        `label ${JSON.stringify(post.label)} not in scheme [${scheme.join(", ")}]`,
      );
    }
    usable.push(post);
  }
  if (usable.length === 0) {
    throw new Error("no usable posts to export");
  }

  let truncated = 0;
  const tokenized = usable.map((post) => {
    if (post.tokens.length > maxTokens) truncated += 1;
    return post.tokens.slice(0, maxTokens);
  });
  const encoded = tokenized.map((tokens) => encoder.encode(tokens));

  const splits = assignSplits(usable.length, seed);
  const projection =
    options.projection ??
    Projection.fit(
      encoded.filter((_, i) => splits[i] === "train"),
      outDim,
      seed,
    );

  const records: CorpusRecord[] = usable.map((post, i) => ({
    id: post.id,
    label: labelIndex.get(post.label)!,
    split: splits[i],
    embedding: projection.apply(encoded[i]),
    text: post.text,
  }));
  return {
    records,
    header: { feature_dim: projection.outDim, num_classes: scheme.length },
    projection,
    skippedEmptyText,
    truncated,
  };
}

function inferLabelScheme(posts: RawPost[]): string[] {
  return [...new Set(posts.map((p) => p.label))].sort();
}

export function writeCorpus(result: ExportResult, path: string): void {
  const lines = [JSON.stringify(result.header)];
  for (const rec of result.records) {
    lines.push(
      JSON.stringify({
        id: rec.id,
        label: rec.label,
        split: rec.split,
        embedding: rec.embedding,
        text: rec.text,
      }),
    );
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
