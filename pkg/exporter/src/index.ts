export { buildCorpus, writeCorpus, assignSplits, MAX_TOKENS, OUT_DIM } from "./corpus.js";
export { HashedEncoder, loadEncoder, mulberry32, gaussianStream } from "./encoder.js";
export {
  DEFAULT_TARGET_TAGS,
  filterTargetSubset,
  parseHateXplain,
} from "./hatexplain.js";
export { Projection } from "./projection.js";
export type { CorpusRecord, Encoder, RawPost } from "./types.js";
export { run } from "./cli.js";
