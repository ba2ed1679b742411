import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { beforeAll, describe, expect, it } from "vitest";

import {
  assignSplits,
  buildCorpus,
  writeCorpus,
} from "../src/corpus.js";
import { HashedEncoder, loadEncoder } from "../src/encoder.js";
import { filterTargetSubset, parseHateXplain } from "../src/hatexplain.js";
import { Projection } from "../src/projection.js";
import { run } from "../src/cli.js";
import type { RawPost } from "../src/types.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const ENGINE_SRC = resolve(HERE, "../../src");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "exporter-"));
}

/** Deterministic HateXplain-style fixture. */
function fixtureDoc(count: number): Record<string, unknown> {
  const doc: Record<string, unknown> = {};
  const labels = ["hatespeech", "offensive", "normal"];
  const words = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta"];
  for (let i = 0; i < count; i++) {
    const label = labels[i % 3];
    const targeted = i % 5 < 2; // 2 of every 5 posts target Islam
    const tokens = Array.from(
      { length: 5 + (i % 9) },
      (_, k) => words[(i * 3 + k * 5) % words.length],
    );
    doc[`post${i}`] = {
      post_id: `post${i}`,
      post_tokens: tokens,
      annotators: [
        { label, target: targeted ? ["Islam"] : ["None"] },
        { label, target: targeted ? ["Islam", "Women"] : ["None"] },
        { label: labels[(i + 1) % 3], target: [] },
      ],
    };
  }
  return doc;
}

describe("parseHateXplain", () => {
  it("takes the majority label and unions targets", () => {
    const { posts } = parseHateXplain({
      a: {
        post_id: "a",
        post_tokens: ["hello", "world"],
        annotators: [
          { label: "normal", target: ["Islam"] },
          { label: "normal", target: ["Women"] },
          { label: "offensive", target: [] },
        ],
      },
    });
    expect(posts).toHaveLength(1);
    expect(posts[0].label).toBe("normal");
    expect(posts[0].targets).toEqual(["Islam", "Women"]);
    expect(posts[0].text).toBe("hello world");
  });

  it("drops posts without a label majority", () => {
    const { posts, droppedNoMajority } = parseHateXplain({
      a: {
        post_tokens: ["x"],
        annotators: [
          { label: "normal" },
          { label: "offensive" },
          { label: "hatespeech" },
        ],
      },
    });
    expect(posts).toHaveLength(0);
    expect(droppedNoMajority).toBe(1);
  });
});

describe("filterTargetSubset", () => {
  const post = (id: string, targets?: string[]): RawPost => ({
    id,
    text: "t",
    tokens: ["t"],
    label: "normal",
    targets: targets ?? [],
  });

  it("keeps Islam-targeted posts", () => {
    const { kept } = filterTargetSubset([post("a", ["Islam"])]);
    expect(kept).toHaveLength(1);
  });

  it("drops posts targeting only other groups", () => {
    const { kept, dropped } = filterTargetSubset([post("a", ["Women"])]);
    expect(kept).toHaveLength(0);
    expect(dropped).toBe(1);
  });

  it("skips posts lacking target annotations, with a count", () => {
    const { kept, skippedNoTargets } = filterTargetSubset([post("a")]);
    expect(kept).toHaveLength(0);
    expect(skippedNoTargets).toBe(1);
  });

  it("keeps 4 from a mixed corpus of 10", () => {
    const posts = [
      ...Array.from({ length: 4 }, (_, i) => post(`islam${i}`, ["Islam"])),
      ...Array.from({ length: 6 }, (_, i) => post(`other${i}`, ["None"])),
    ];
    expect(filterTargetSubset(posts).kept).toHaveLength(4);
  });
});

describe("assignSplits", () => {
  it("splits ten records 6:2:2", () => {
    const splits = assignSplits(10, 0);
    const count = (s: string) => splits.filter((x) => x === s).length;
    expect(count("train")).toBe(6);
    expect(count("val")).toBe(2);
    expect(count("test")).toBe(2);
  });

  it("is deterministic in the seed", () => {
    expect(assignSplits(25, 7)).toEqual(assignSplits(25, 7));
    expect(assignSplits(25, 7)).not.toEqual(assignSplits(25, 8));
  });
});

describe("HashedEncoder", () => {
  it("is deterministic and shape-stable", () => {
    const enc = new HashedEncoder(32);
    const a = enc.encode(["some", "tokens"]);
    const b = new HashedEncoder(32).encode(["some", "tokens"]);
    expect([...a]).toEqual([...b]);
    expect(a).toHaveLength(32);
  });

  it("rejects unknown encoder names", () => {
    expect(() => loadEncoder("bert-base-uncased")).toThrow(/not available/);
  });
});

describe("buildCorpus", () => {
  const makePosts = (n: number): RawPost[] =>
    Array.from({ length: n }, (_, i) => ({
      id: `p${i}`,
      text: `text ${i}`,
      tokens: ["text", String(i)],
      label: i % 2 === 0 ? "normal" : "hatespeech",
      targets: ["Islam"],
    }));

  it("skips empty posts with a warning count", () => {
    const posts = makePosts(6);
    posts[2] = { ...posts[2], tokens: [], text: "" };
    const result = buildCorpus(posts, new HashedEncoder(16), { outDim: 4 });
    expect(result.skippedEmptyText).toBe(1);
    expect(result.records).toHaveLength(5);
  });

  it("truncates to the token cap", () => {
    const posts = makePosts(5);
    posts[0] = {
      ...posts[0],
      tokens: Array.from({ length: 900 }, (_, k) => `tok${k}`),
    };
    const result = buildCorpus(posts, new HashedEncoder(16), {
      outDim: 4,
      maxTokens: 512,
    });
    expect(result.truncated).toBe(1);
  });

  it("tokens beyond the cap cannot influence the embedding", () => {
    const enc = new HashedEncoder(16);
    const base = Array.from({ length: 512 }, (_, k) => `tok${k}`);
    const a = buildCorpus(
      [{ id: "a", text: "x", tokens: [...base, "extra1"], label: "normal", targets: [] }],
      enc,
      { outDim: 4, seed: 3 },
    );
    const b = buildCorpus(
      [{ id: "a", text: "x", tokens: [...base, "entirely-different"], label: "normal", targets: [] }],
      enc,
      { outDim: 4, seed: 3 },
    );
    expect(a.records[0].embedding).toEqual(b.records[0].embedding);
  });

  it("rejects labels outside the scheme", () => {
    const posts = makePosts(3);
    expect(() =>
      buildCorpus(posts, new HashedEncoder(8), { outDim: 2, labelScheme: ["normal"] }),
    ).toThrow(/label/);
  });
});

describe("end-to-end export (50-record fixture)", () => {
  let dir: string;
  let corpusPath: string;

  beforeAll(() => {
    dir = tmp();
    const input = join(dir, "posts.json");
    writeFileSync(input, JSON.stringify(fixtureDoc(50)), "utf-8");
    corpusPath = join(dir, "corpus.jsonl");
    const code = run([
      "--input", input,
      "--out", corpusPath,
      "--projection", join(dir, "projection.json"),
      "--no-filter",
      "--labels", "normal,offensive,hatespeech",
      "--seed", "1",
    ]);
    expect(code).toBe(0);
  });

  it("writes the documented header and record shape", () => {
    const lines = readFileSync(corpusPath, "utf-8").trim().split("\n");
    const header = JSON.parse(lines[0]);
    expect(header).toEqual({ feature_dim: 128, num_classes: 3 });
    for (const line of lines.slice(1)) {
      const rec = JSON.parse(line);
      expect(Object.keys(rec).sort()).toEqual(
        ["embedding", "id", "label", "split", "text"],
      );
      expect(rec.embedding).toHaveLength(128);
      expect([0, 1, 2]).toContain(rec.label);
      expect(["train", "val", "test"]).toContain(rec.split);
      for (const v of rec.embedding) expect(Number.isFinite(v)).toBe(true);
    }
  });

  it("passes the engine's corpus validation (build-graph loads it)", () => {
    const proc = spawnSync(
      "python3",
      [
        "-m", "textgnn.cli", "build-graph",
        "--corpus", corpusPath,
        "--out", join(dir, "graph.jsonl"),
        "--threshold", "0.9",
      ],
      { env: { ...process.env, PYTHONPATH: ENGINE_SRC }, encoding: "utf-8" },
    );
    expect(proc.status, proc.stderr).toBe(0);
    expect(proc.stdout).toContain("nodes=");
  });

  it("re-running with the persisted projection is byte-identical", () => {
    const second = join(dir, "corpus2.jsonl");
    const code = run([
      "--input", join(dir, "posts.json"),
      "--out", second,
      "--projection", join(dir, "projection.json"),
      "--no-filter",
      "--labels", "normal,offensive,hatespeech",
      "--seed", "1",
    ]);
    expect(code).toBe(0);
    expect(readFileSync(second)).toEqual(readFileSync(corpusPath));
  });

  it("filtering keeps only the targeted subset", () => {
    const filtered = join(dir, "islam.jsonl");
    const code = run([
      "--input", join(dir, "posts.json"),
      "--out", filtered,
      "--projection", join(dir, "projection-islam.json"),
      "--labels", "normal,offensive,hatespeech",
      "--seed", "1",
    ]);
    expect(code).toBe(0);
    const lines = readFileSync(filtered, "utf-8").trim().split("\n");
    expect(lines.length - 1).toBe(20); // 2 of every 5 posts in the fixture
  });

  it("projection sidecar round-trips", () => {
    const loaded = Projection.load(join(dir, "projection.json"));
    expect(loaded.outDim).toBe(128);
    expect(loaded.inDim).toBe(768);
    const probe = new HashedEncoder(768).encode(["alpha", "beta"]);
    const again = Projection.load(join(dir, "projection.json"));
    expect(loaded.apply(probe)).toEqual(again.apply(probe));
  });
});
