import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import torch

from lm_core import DivergenceError
from validation import ValidationError

from .commands import cmd_evaluate, cmd_prepare, cmd_summarize, cmd_train, cmd_train_tokenizer
from .run_config import RunConfig, UsageError, apply_config_file, read_config_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGENCE = 3

# Options each command needs once flags and the config file are merged.
REQUIRED: Dict[str, Tuple[str, ...]] = {
    "prepare": ("input", "out_dir"),
    "train-tokenizer": ("input", "out"),
    "train": ("input", "vocab", "out"),
    "summarize": ("checkpoint", "vocab"),
    "evaluate": ("input",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _bool_flag(parser: argparse.ArgumentParser, name: str, help: str) -> None:
    parser.add_argument(name, action=argparse.BooleanOptionalAction, default=None, help=help)


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags override its values")
    common.add_argument("--verbose", action="store_true", default=False, help="log debug messages")
    common.add_argument("--quiet", action="store_true", default=False, help="hide progress bars")
    common.add_argument("--threads", type=int, default=1, help="torch CPU threads (default: 1)")
    return common


def _add_prepare(subparsers, common) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("prepare", parents=[common], help="clean and split a JSON-Lines corpus")
    parser.add_argument("--input", help="raw corpus with text/summary records")
    parser.add_argument("--out-dir", help="directory for train.jsonl, test.jsonl and stats.json")
    parser.add_argument("--test-fraction", type=float, default=0.1, help="share of records held out for testing")
    parser.add_argument("--seed", type=int, default=0, help="seed of the split shuffle")
    parser.add_argument("--skip-cleaning", action="store_true", default=False, help="keep every record")
    parser.add_argument("--min-summary-tokens", type=int, help="shortest summary kept, in words")
    parser.add_argument("--max-summary-tokens", type=int, help="longest summary kept, in words")
    parser.add_argument("--overlap-n", type=int, help="n-gram size of the summary/text overlap filter")
    parser.add_argument("--min-overlap", type=float, help="lowest summary n-gram overlap kept")
    parser.add_argument("--max-overlap", type=float, help="highest summary n-gram overlap kept")
    parser.set_defaults(handler=cmd_prepare)
    return parser


def _add_train_tokenizer(subparsers, common) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("train-tokenizer", parents=[common], help="learn a byte-level BPE vocabulary")
    parser.add_argument("--input", help="training corpus")
    parser.add_argument("--out", help="vocabulary file to write")
    parser.add_argument("--vocab-size", type=int, default=1024, help="target vocabulary size (default: 1024)")
    parser.set_defaults(handler=cmd_train_tokenizer)
    return parser


def _add_train(subparsers, common) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("train", parents=[common], help="fine-tune the language model")
    parser.add_argument("--input", help="training corpus")
    parser.add_argument("--vocab", help="vocabulary file")
    parser.add_argument("--out", help="checkpoint file to write")
    parser.add_argument("--init-checkpoint", help="start from this checkpoint instead of a fresh model")
    parser.add_argument("--d-model", type=int, help="model width")
    parser.add_argument("--n-layers", type=int, help="transformer blocks")
    parser.add_argument("--n-heads", type=int, help="attention heads per block")
    parser.add_argument("--d-ff", type=int, help="feed-forward width")
    parser.add_argument("--max-context", type=int, help="longest sequence the model accepts")
    parser.add_argument("--dropout", type=float, help="dropout probability")
    parser.add_argument("--learning-rate", type=float, help="Adam step size")
    parser.add_argument("--batch-size", type=int, help="sequences per step")
    parser.add_argument("--epochs", type=int, help="passes over the corpus")
    parser.add_argument("--seed", type=int, help="seed of initialisation, batch order and dropout")
    parser.add_argument("--grad-clip", type=float, help="gradient norm bound")
    parser.add_argument("--max-length", type=int, help="truncate training sequences to this many tokens")
    parser.add_argument(
        "--loss-on", choices=("full", "summary"), default="full", help="tokens that count towards the loss"
    )
    parser.set_defaults(handler=cmd_train)
    return parser


def _add_generation_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("generation")
    group.add_argument("--preset", choices=("paper",), help="published replication settings; flags override them")
    group.add_argument("--temperature", type=float, help="temperature in [0, 1]; 0 ranks by model probability")
    group.add_argument("--top-k", type=int, help="top_k: keep the k most probable tokens")
    group.add_argument("--top-p", type=float, help="top_p: keep the smallest mass reaching p")
    group.add_argument("--num-beams", type=int, help="num_beams: live hypotheses per step")
    _bool_flag(group, "--early-stopping", "early_stopping: stop once num_beams hypotheses finished")
    group.add_argument("--no-repeat-ngram-size", type=int, help="no_repeat_ngram_size: forbid repeated n-grams")
    group.add_argument("--repetition-penalty", type=float, help="repetition_penalty: >= 1, 1 disables it")
    group.add_argument("--max-new-tokens", type=int, help="generation budget in tokens")
    group.add_argument("--length-penalty", type=float, help="divide finished scores by length ** value")
    _bool_flag(group, "--penalize-prompt-tokens", "count prompt tokens as seen for the repetition penalty")
    group.add_argument(
        "--no-repeat-ngram-scope", choices=("generated", "all"), help="tokens checked for repeated n-grams"
    )


def _add_summarize(subparsers, common) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("summarize", parents=[common], help="generate summaries")
    parser.add_argument("--checkpoint", help="trained checkpoint")
    parser.add_argument("--vocab", help="vocabulary file")
    parser.add_argument("--input", help="JSON-Lines records with a text field")
    parser.add_argument("--text", help="summarize this text instead of an input file")
    parser.add_argument("--out", help="JSON-Lines output; stdout when omitted")
    parser.add_argument("--workers", type=int, default=1, help="records summarized in parallel")
    parser.add_argument("--zero-shot", action="store_true", default=False, help="use the 'TL;DR:' prompt")
    _add_generation_options(parser)
    parser.set_defaults(handler=cmd_summarize)
    return parser


def _add_evaluate(subparsers, common) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("evaluate", parents=[common], help="score generated summaries")
    parser.add_argument("--input", help="summarize output with generated (and summary) fields")
    parser.add_argument("--references", help="reference records with a summary field, matched by index")
    parser.add_argument("--out", help="write the JSON report here as well")
    parser.add_argument("--scale", type=int, choices=(1, 100), default=1, help="show ROUGE and BLEU x100")
    parser.add_argument(
        "--embeddings", choices=("hash", "none"), default="hash", help="BERTScore embeddings; none skips it"
    )
    parser.add_argument("--workers", type=int, default=1, help="examples scored in parallel")
    parser.set_defaults(handler=cmd_evaluate)
    return parser


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="desk-summarizer", description="Desk-scale abstractive summarization toolkit.")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    common = _common_options()
    commands = {}
    for add in (_add_prepare, _add_train_tokenizer, _add_train, _add_summarize, _add_evaluate):
        sub = add(subparsers, common)
        commands[sub.prog.split()[-1]] = sub
    return parser, commands


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parses the command line, folding in the --config file so that flags
    override file values and file values override defaults.
    """
    parser, commands = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        apply_config_file(commands[args.command], read_config_file(args.config))
        args = parser.parse_args(argv)

    missing = [name for name in REQUIRED[args.command] if getattr(args, name, None) is None]
    if args.command == "summarize" and args.input is None and args.text is None:
        missing.append("input or text")
    if missing:
        raise UsageError(f"{args.command}: missing required option(s): {', '.join(missing)}")
    return args


def _report_error(error: BaseException, code: int) -> int:
    payload = {"error": type(error).__name__, "message": str(error), "exit_code": code}
    for attribute in ("line", "field", "step"):
        value = getattr(error, attribute, None)
        if value is not None:
            payload[attribute] = value
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_arguments(argv)
    except UsageError as e:
        return _report_error(e, EXIT_USAGE)
    except (ValidationError, OSError) as e:
        return _report_error(e, EXIT_DATA)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    torch.set_num_threads(args.threads)
    torch.use_deterministic_algorithms(True)

    try:
        return args.handler(RunConfig(args))
    except UsageError as e:
        return _report_error(e, EXIT_USAGE)
    except DivergenceError as e:
        return _report_error(e, EXIT_DIVERGENCE)
    except (ValidationError, OSError, UnicodeDecodeError) as e:
        return _report_error(e, EXIT_DATA)
