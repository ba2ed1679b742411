"""Command-line pipeline: build-graph, train, eval, explain.

Every command is a pure function of its input files, flags, and seed;
re-running writes byte-identical outputs. A JSON config file may supply
any flag value; explicit flags win over the config file.

Exit codes: 0 success, 1 validation/config error, 2 I/O error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import SplitSpec, assign_splits, load_corpus
from .errors import DivergenceError, ValidationError
from .explain import ExplainerConfig, explain_node, render_explanation
from .graph import DEFAULT_THRESHOLD, build_graph, graph_stats, load_graph, save_graph
from .model import ModelConfig, forward, load_checkpoint, save_checkpoint
from .train import TrainConfig, evaluate, train


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; here 2 is reserved for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"error: {message}") from None


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return doc


def _merge(args: argparse.Namespace, config: dict, key: str, default):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def cmd_build_graph(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    threshold = float(_merge(args, config, "threshold", DEFAULT_THRESHOLD))
    corpus = load_corpus(args.corpus)
    g = build_graph(corpus, threshold=threshold)
    save_graph(g, args.out)
    print(graph_stats(g).format())
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    seed = int(_merge(args, config, "seed", 0))
    corpus = load_corpus(args.corpus)
    corpus = assign_splits(
        corpus,
        SplitSpec(
            ratios=tuple(_merge(args, config, "split-ratios", (0.6, 0.2, 0.2))),
            seed=seed,
        ),
    )
    g = load_graph(args.graph, corpus.ids)
    model_cfg = ModelConfig(
        feature_dim=corpus.feature_dim,
        num_classes=corpus.num_classes,
        hidden_dim=int(_merge(args, config, "hidden-dim", 64)),
        leaky_slope=float(_merge(args, config, "leaky-slope", 0.2)),
        init_seed=seed,
    )
    train_cfg = TrainConfig(
        epochs=int(_merge(args, config, "epochs", 200)),
        learning_rate=float(_merge(args, config, "learning-rate", 0.001)),
        beta1=float(_merge(args, config, "beta1", 0.9)),
        beta2=float(_merge(args, config, "beta2", 0.999)),
        eps=float(_merge(args, config, "eps", 1e-8)),
        seed=seed,
    )
    params, report = train(corpus, g, model_cfg, train_cfg)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(params, model_cfg, out_dir / "checkpoint.json")
    (out_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    print(
        f"test accuracy={report.test_accuracy:.4f} "
        f"macro_f1={report.test_macro_f1:.4f} best_epoch={report.best_epoch}"
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    g = load_graph(args.graph, corpus.ids)
    params, model_cfg = load_checkpoint(args.checkpoint)
    if model_cfg.feature_dim != corpus.feature_dim or model_cfg.num_classes != corpus.num_classes:
        raise ValidationError(
            f"checkpoint was built for F={model_cfg.feature_dim}, K={model_cfg.num_classes}; "
            f"corpus has F={corpus.feature_dim}, K={corpus.num_classes}"
        )
    res = forward(corpus.feature_matrix(), g, params, model_cfg)
    idx = corpus.split_indices(args.split)
    acc, f1 = evaluate(res.probs, corpus.labels(), idx)
    print(f"{args.split} accuracy={acc:.4f} macro_f1={f1:.4f}")
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    corpus = load_corpus(args.corpus)
    g = load_graph(args.graph, corpus.ids)
    params, model_cfg = load_checkpoint(args.checkpoint)
    if model_cfg.feature_dim != corpus.feature_dim or model_cfg.num_classes != corpus.num_classes:
        raise ValidationError(
            f"checkpoint was built for F={model_cfg.feature_dim}, K={model_cfg.num_classes}; "
            f"corpus has F={corpus.feature_dim}, K={corpus.num_classes}"
        )
    expl_cfg = ExplainerConfig(
        epochs=int(_merge(args, config, "explain-epochs", 100)),
        learning_rate=float(_merge(args, config, "explain-learning-rate", 0.01)),
        top_k_edges=int(_merge(args, config, "top-k-edges", 10)),
        seed=int(_merge(args, config, "seed", 0)),
    )
    expl = explain_node(corpus, g, params, model_cfg, args.node, expl_cfg)
    document = render_explanation(expl, format=args.format)
    if args.out:
        Path(args.out).write_text(document, encoding="utf-8")
    else:
        print(document, end="" if document.endswith("\n") else "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="textgnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, default=None, help="seed for every stochastic step (default 0)")

    p = sub.add_parser("build-graph", help="build the similarity graph from a corpus")
    common(p)
    p.add_argument("--corpus", required=True, help="corpus file (line-delimited JSON)")
    p.add_argument("--out", required=True, help="graph output file")
    p.add_argument(
        "--threshold", type=float, default=None,
        help=f"cosine similarity cutoff (default {DEFAULT_THRESHOLD})",
    )

    p = sub.add_parser("train", help="train the graph encoder")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True, help="output directory for checkpoint and report")
    p.add_argument("--epochs", type=int, default=None, help="training epochs (default 200)")
    p.add_argument("--learning-rate", type=float, default=None, help="Adam learning rate (default 0.001)")
    p.add_argument("--beta1", type=float, default=None, help="Adam first-moment decay (default 0.9)")
    p.add_argument("--beta2", type=float, default=None, help="Adam second-moment decay (default 0.999)")
    p.add_argument("--eps", type=float, default=None, help="Adam epsilon (default 1e-8)")
    p.add_argument("--hidden-dim", type=int, default=None, help="hidden width (default 64)")
    p.add_argument("--leaky-slope", type=float, default=None, help="LeakyReLU slope (default 0.2)")

    p = sub.add_parser("eval", help="evaluate a checkpoint on one split")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test", choices=("train", "val", "test"))

    p = sub.add_parser("explain", help="explain one node's prediction")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--node", required=True, help="node id to explain")
    p.add_argument("--format", default="json", choices=("json", "dot"))
    p.add_argument("--out", default=None, help="write the document here instead of stdout")
    p.add_argument("--explain-epochs", type=int, default=None)
    p.add_argument("--explain-learning-rate", type=float, default=None)
    p.add_argument("--top-k-edges", type=int, default=None)

    return parser


_COMMANDS = {
    "build-graph": cmd_build_graph,
    "train": cmd_train,
    "eval": cmd_eval,
    "explain": cmd_explain,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        if isinstance(exc.code, str):  # usage error from _Parser.error
            print(exc.code, file=sys.stderr)
            return 1
        raise
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
