/**
 * Sentence encoders.
 *
 * The default "hashed" encoder needs no downloaded weights: each token
 * deterministically seeds a pseudo-random Gaussian vector (so equal tokens
 * share a direction across runs and machines), and the sentence vector is
 * the mean over token vectors, mirroring mean pooling over encoder states.
 * Real pretrained encoders can be plugged in behind the same interface;
 * they only need to honor `hiddenSize` and deterministic output.
 */

import type { Encoder } from "./types.js";

export const DEFAULT_HIDDEN_SIZE = 768;

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** mulberry32: small deterministic PRNG over a 32-bit state. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Standard normal samples via Box-Muller over mulberry32. */
export function gaussianStream(seed: number): () => number {
  const uniform = mulberry32(seed);
  let spare: number | null = null;
  return () => {
    if (spare !== null) {
      const v = spare;
      spare = null;
      return v;
    }
    let u = 0;
    while (u === 0) u = uniform();
    const r = Math.sqrt(-2.0 * Math.log(u));
    const theta = 2.0 * Math.PI * uniform();
    spare = r * Math.sin(theta);
    return r * Math.cos(theta);
  };
}

export class HashedEncoder implements Encoder {
  readonly name = "hashed";
  readonly hiddenSize: number;
  private cache = new Map<string, Float64Array>();

  constructor(hiddenSize: number = DEFAULT_HIDDEN_SIZE) {
    this.hiddenSize = hiddenSize;
  }

  private tokenVector(token: string): Float64Array {
    let vec = this.cache.get(token);
    if (!vec) {
      const draw = gaussianStream(fnv1a(token));
      vec = new Float64Array(this.hiddenSize);
      for (let i = 0; i < this.hiddenSize; i++) {
        vec[i] = draw() / Math.sqrt(this.hiddenSize);
      }
      this.cache.set(token, vec);
    }
    return vec;
  }

  encode(tokens: string[]): Float64Array {
    const out = new Float64Array(this.hiddenSize);
    if (tokens.length === 0) return out;
    for (const token of tokens) {
      const vec = this.tokenVector(token.toLowerCase());
      for (let i = 0; i < this.hiddenSize; i++) out[i] += vec[i];
    }
    for (let i = 0; i < this.hiddenSize; i++) out[i] /= tokens.length;
    return out;
  }
}

export function loadEncoder(name: string): Encoder {
  if (name === "hashed") return new HashedEncoder();
  throw new Error(
    `encoder ${JSON.stringify(name)} is not available; "hashed" is built in`,
  );
}
