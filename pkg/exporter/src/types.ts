/** A labeled raw post with target-group annotations. */
export interface RawPost {
  id: string;
  text: string;
  tokens: string[];
  label: string;
  targets: string[];
}

/** One line of the engine's corpus file. */
export interface CorpusRecord {
  id: string;
  label: number;
  split: "train" | "val" | "test";
  embedding: number[];
  text: string;
}

export interface CorpusHeader {
  feature_dim: number;
  num_classes: number;
}

/** Sentence encoders map a (already truncated) token sequence to a vector. */
export interface Encoder {
  readonly name: string;
  readonly hiddenSize: number;
  encode(tokens: string[]): Float64Array;
}
