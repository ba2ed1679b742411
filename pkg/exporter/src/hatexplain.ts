/**
 * Parsing and target-group filtering for HateXplain-style corpora.
 *
 * The input is a JSON object keyed by post id; each entry carries
 * `post_tokens` and per-annotator `label` plus `target` lists. The
 * record's label is the majority annotator vote (no majority: dropped),
 * its target set the union over annotators.
 */

import type { RawPost } from "./types.js";

interface Annotation {
  label?: string;
  target?: string[];
}

interface RawEntry {
  post_id?: string;
  post_tokens?: string[];
  annotators?: Annotation[];
}

export interface ParseResult {
  posts: RawPost[];
  droppedNoMajority: number;
}

export function parseHateXplain(doc: Record<string, RawEntry>): ParseResult {
  const posts: RawPost[] = [];
  let droppedNoMajority = 0;
  for (const [key, entry] of Object.entries(doc)) {
    const tokens = entry.post_tokens ?? [];
    const annotators = entry.annotators ?? [];
    const votes = new Map<string, number>();
    for (const a of annotators) {
      if (a.label !== undefined) {
        votes.set(a.label, (votes.get(a.label) ?? 0) + 1);
      }
    }
    const label = majority(votes);
    if (label === null) {
      droppedNoMajority += 1;
      continue;
    }
    const targets = new Set<string>();
    let sawTargetField = false;
    for (const a of annotators) {
      if (a.target !== undefined) {
        sawTargetField = true;
        for (const t of a.target) targets.add(t);
      }
    }
    posts.push({
      id: entry.post_id ?? key,
      text: tokens.join(" "),
      tokens,
      label,
      targets: sawTargetField ? [...targets].sort() : [],
    });
  }
  return { posts, droppedNoMajority };
}

function majority(votes: Map<string, number>): string | null {
  let best: string | null = null;
  let bestCount = 0;
  let tied = true;
  for (const [label, count] of [...votes.entries()].sort()) {
    if (count > bestCount) {
      best = label;
      bestCount = count;
      tied = false;
    } else if (count === bestCount) {
      tied = true;
    }
  }
  return tied ? null : best;
}

export const DEFAULT_TARGET_TAGS = ["islam", "muslim"];

export interface FilterResult {
  kept: RawPost[];
  dropped: number;
  skippedNoTargets: number;
}

/** Keep posts whose target set mentions any of the given tags. */
export function filterTargetSubset(
  posts: RawPost[],
  tags: string[] = DEFAULT_TARGET_TAGS,
): FilterResult {
  const wanted = new Set(tags.map((t) => t.toLowerCase()));
  const kept: RawPost[] = [];
  let dropped = 0;
  let skippedNoTargets = 0;
  for (const post of posts) {
    if (post.targets.length === 0) {
      skippedNoTargets += 1;
      continue;
    }
    if (post.targets.some((t) => wanted.has(t.toLowerCase()))) {
      kept.push(post);
    } else {
      dropped += 1;
    }
  }
  return { kept, dropped, skippedNoTargets };
}
