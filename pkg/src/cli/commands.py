import json
import logging
import os

from data import CleaningStats, clean, format_example, iter_records, load_corpus, split, write_corpus, write_records
from decoding import summarize_many
from lm_core import Checkpoint, ContextOverflow, encode_training_example, init_model, train
from metrics import HashingEmbeddingProvider, evaluate_corpus
from tokenizer import Vocab, build_vocab
from validation import ValidationError

from .run_config import RunConfig

logger = logging.getLogger(__name__)


def cmd_prepare(run: RunConfig) -> int:
    """Cleans a raw corpus and writes train.jsonl, test.jsonl and stats.json."""
    pairs = load_corpus(run.get("input"))
    if run.get("skip_cleaning"):
        kept, stats, cleaning = pairs, CleaningStats(total=len(pairs), kept=len(pairs)), None
    else:
        cfg = run.cleaning_config()
        kept, stats = clean(pairs, cfg)
        cleaning = cfg.dict

    train_pairs, test_pairs = split(kept, run.get("test_fraction"), run.get("seed"))
    out_dir = run.get("out_dir")
    os.makedirs(out_dir, exist_ok=True)
    write_corpus(os.path.join(out_dir, "train.jsonl"), train_pairs)
    write_corpus(os.path.join(out_dir, "test.jsonl"), test_pairs)

    summary = {
        "cleaning": stats.dict,
        "cleaning_config": cleaning,
        "test_fraction": run.get("test_fraction"),
        "seed": run.get("seed"),
        "train": len(train_pairs),
        "test": len(test_pairs),
    }
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8", newline="\n") as file:
        file.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    print(f"kept {stats.kept} of {stats.total} records")
    print(f"wrote {len(train_pairs)} train and {len(test_pairs)} test records to {out_dir}")
    return 0


def cmd_train_tokenizer(run: RunConfig) -> int:
    """Learns a BPE vocabulary from the formatted training examples."""
    pairs = load_corpus(run.get("input"))
    vocab = build_vocab([format_example(pair) for pair in pairs], run.get("vocab_size"))
    vocab.save(run.get("out"))
    print(f"wrote vocabulary of {len(vocab)} tokens to {run.get('out')}")
    return 0


def cmd_train(run: RunConfig) -> int:
    """Fine-tunes a fresh or existing checkpoint on the formatted training pairs."""
    vocab = Vocab.load(run.get("vocab"))
    pairs = load_corpus(run.get("input"))
    cfg = run.train_config()

    if run.get("init_checkpoint"):
        ckpt = Checkpoint.load(run.get("init_checkpoint"))
        if ckpt.config.vocab_size != len(vocab):
            raise ValidationError(
                f"Checkpoint vocabulary size {ckpt.config.vocab_size} does not match vocabulary of {len(vocab)}"
            )
    else:
        ckpt = init_model(run.model_config(len(vocab)), seed=cfg.seed)

    max_length = cfg.max_length or ckpt.config.max_context
    if max_length > ckpt.config.max_context:
        raise ValidationError(f"max_length {max_length} exceeds max_context {ckpt.config.max_context}")

    examples = []
    for index, pair in enumerate(pairs):
        try:
            examples.append(encode_training_example(vocab, pair, max_length, cfg.summary_only_loss))
        except ContextOverflow as e:
            logger.warning("Skipping record %d: %s", index + 1, e)
    if len(examples) < len(pairs):
        print(f"skipped {len(pairs) - len(examples)} records whose summary does not fit {max_length} tokens")

    def report(epoch: int, value: float) -> None:
        print(f"epoch {epoch + 1}: loss {value:.6f}", flush=True)

    trained = train(ckpt, examples, cfg, on_epoch=report, progress=not run.get("quiet"))
    trained.save(run.get("out"))
    print(f"wrote checkpoint with {trained.num_parameters} parameters to {run.get('out')}")
    return 0


def cmd_summarize(run: RunConfig) -> int:
    """Generates one summary per input record; records that fail get an error entry."""
    ckpt = Checkpoint.load(run.get("checkpoint"))
    vocab = Vocab.load(run.get("vocab"))
    cfg = run.generation_config()
    logger.info("Generation settings: %s", cfg.dict)

    if run.get("text") is not None:
        records = [{"text": run.get("text")}]
    else:
        records = [record for _, record in iter_records(run.get("input"), required=("text",))]
    for record in records:
        if not isinstance(record["text"], str):
            raise ValidationError("Record field 'text' must be a string")

    results = summarize_many(
        ckpt,
        vocab,
        [record["text"] for record in records],
        cfg,
        workers=run.get("workers"),
        zero_shot=run.get("zero_shot"),
        progress=not run.get("quiet"),
        return_exceptions=True,
    )

    entries = []
    for record, result in zip(records, results):
        entry = {"text": record["text"]}
        if isinstance(result, Exception):
            entry["generated"] = ""
            entry["error"] = {"type": type(result).__name__, "message": str(result)}
        else:
            entry["generated"] = result
        if "summary" in record:
            entry["summary"] = record["summary"]
        entries.append(entry)

    if run.get("out"):
        write_records(run.get("out"), entries)
        print(f"wrote {len(entries)} summaries to {run.get('out')}")
    else:
        for entry in entries:
            print(json.dumps(entry, ensure_ascii=False))
    return 0


def _field(path: str, name: str) -> list:
    values = []
    for number, record in iter_records(path, required=(name,)):
        if not isinstance(record[name], str):
            raise ValidationError(f"{path}:{number}: field '{name}' must be a string")
        values.append(record[name])
    return values


def cmd_evaluate(run: RunConfig) -> int:
    """Scores generated summaries against references, matched by record index."""
    generated = _field(run.get("input"), "generated")
    references = _field(run.get("references") or run.get("input"), "summary")
    if len(generated) != len(references):
        raise ValidationError(f"{len(generated)} generated summaries but {len(references)} references")

    provider = HashingEmbeddingProvider() if run.get("embeddings") == "hash" else None
    report = evaluate_corpus(list(zip(generated, references)), provider, workers=run.get("workers"))

    print(report.format_table(scale=run.get("scale")))
    print(report.to_json())
    if run.get("out"):
        with open(run.get("out"), "w", encoding="utf-8", newline="\n") as file:
            file.write(report.to_json() + "\n")
    return 0
