import json

import numpy as np
import pytest

from cli import main
from data import ArticlePair, write_corpus
from decoding import GenerationConfig, summarize
from lm_core import Checkpoint
from tokenizer import Vocab

WORDS = (
    "river city market bank fire council school road bridge storm harbor train station museum park garden "
    "festival mayor police doctor farmer teacher budget vote league final snow rain winter summer north south "
    "east west tower island forest valley village airport hospital library factory theater stadium court prison"
).split()


def memorization_pairs(count=32, seed=7):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        words = list(rng.choice(WORDS, size=8, replace=False))
        pairs.append(ArticlePair(" ".join(words), " ".join(words[2:6])))
    return pairs


@pytest.fixture(scope="module")
def memorized(tmp_path_factory):
    root = tmp_path_factory.mktemp("memorized")
    pairs = memorization_pairs()
    train_path = root / "train.jsonl"
    write_corpus(str(train_path), pairs)
    vocab = root / "vocab.bpe"
    assert main(["train-tokenizer", "--input", str(train_path), "--out", str(vocab), "--vocab-size", "400", "--quiet"]) == 0
    ckpt = root / "model.ckpt"
    args = [
        "train", "--input", str(train_path), "--vocab", str(vocab), "--out", str(ckpt),
        "--d-model", "64", "--n-layers", "2", "--n-heads", "4", "--d-ff", "128", "--max-context", "128",
        "--learning-rate", "0.003", "--batch-size", "8", "--epochs", "400", "--seed", "0",
        "--loss-on", "summary", "--quiet",
    ]
    assert main(args) == 0
    return root, pairs, train_path, vocab, ckpt


def test_training_loss_falls_below_threshold(memorized):
    _, _, _, _, ckpt = memorized
    assert Checkpoint.load(str(ckpt)).epoch_losses[-1] < 0.1


def test_replication_preset_reproduces_training_summaries(memorized):
    _, pairs, _, vocab, ckpt = memorized
    loaded, vocabulary = Checkpoint.load(str(ckpt)), Vocab.load(str(vocab))
    cfg = GenerationConfig.preset("paper")
    matches = sum(summarize(loaded, vocabulary, pair.text, cfg) == pair.summary for pair in pairs)
    assert matches >= 29


def test_summarize_command_with_replication_preset(memorized):
    root, pairs, train_path, vocab, ckpt = memorized
    out = root / "generated.jsonl"
    args = ["summarize", "--checkpoint", str(ckpt), "--vocab", str(vocab), "--input", str(train_path)]
    assert main(args + ["--out", str(out), "--preset", "paper", "--quiet"]) == 0
    entries = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    assert len(entries) == len(pairs)
    assert sum(entry["generated"] == entry["summary"] for entry in entries) >= 29
