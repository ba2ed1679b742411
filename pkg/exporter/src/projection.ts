/**
 * Persisted linear reduction from encoder width to the corpus feature size.
 *
 * Fitted once on the training split (centering on the train mean) with a
 * seeded Gaussian map scaled to roughly preserve norms; the sidecar file
 * stores the mean, seed, and dimensions, so reloading reproduces the exact
 * same projection without refitting.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { gaussianStream } from "./encoder.js";

export interface ProjectionData {
  in_dim: number;
  out_dim: number;
  seed: number;
  mean: number[];
}

export class Projection {
  readonly inDim: number;
  readonly outDim: number;
  readonly seed: number;
  readonly mean: Float64Array;
  private matrix: Float64Array; // row-major out_dim x in_dim

  constructor(data: ProjectionData) {
    this.inDim = data.in_dim;
    this.outDim = data.out_dim;
    this.seed = data.seed;
    this.mean = Float64Array.from(data.mean);
    if (this.mean.length !== this.inDim) {
      throw new Error(
        `projection mean has ${this.mean.length} entries, expected ${this.inDim}`,
      );
    }
    const draw = gaussianStream(data.seed);
    this.matrix = new Float64Array(this.outDim * this.inDim);
    const scale = 1.0 / Math.sqrt(this.outDim);
    for (let i = 0; i < this.matrix.length; i++) {
      this.matrix[i] = draw() * scale;
    }
  }

  static fit(trainVectors: Float64Array[], outDim: number, seed: number): Projection {
    if (trainVectors.length === 0) {
      throw new Error("cannot fit a projection on an empty training split");
    }
    const inDim = trainVectors[0].length;
    const mean = new Float64Array(inDim);
    for (const vec of trainVectors) {
      for (let i = 0; i < inDim; i++) mean[i] += vec[i];
    }
    for (let i = 0; i < inDim; i++) mean[i] /= trainVectors.length;
    return new Projection({
      in_dim: inDim,
      out_dim: outDim,
      seed,
      mean: [...mean],
    });
  }

  apply(vec: Float64Array): number[] {
    if (vec.length !== this.inDim) {
      throw new Error(`vector has ${vec.length} dims, projection expects ${this.inDim}`);
    }
    const out = new Array<number>(this.outDim);
    for (let o = 0; o < this.outDim; o++) {
      let acc = 0;
      const row = o * this.inDim;
      for (let i = 0; i < this.inDim; i++) {
        acc += this.matrix[row + i] * (vec[i] - this.mean[i]);
      }
      out[o] = acc;
    }
    return out;
  }

  save(path: string): void {
    const data: ProjectionData = {
      in_dim: this.inDim,
      out_dim: this.outDim,
      seed: this.seed,
      mean: [...this.mean],
    };
    writeFileSync(path, JSON.stringify(data) + "\n", "utf-8");
  }

  static load(path: string): Projection {
    const data = JSON.parse(readFileSync(path, "utf-8")) as ProjectionData;
    return new Projection(data);
  }
}
