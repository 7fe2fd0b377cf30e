import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from validation import ValidationError, validate_number

from .bertscore import EmbeddingProvider, bert_score
from .bleu import bleu
from .prf import PRF
from .rouge import rouge_l, rouge_n
from .text import tokenize_for_metrics

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExampleScores:
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF
    bleu: float
    bertscore: Optional[PRF]
    empty_candidate: bool

    @property
    def short_text(self) -> bool:
        return self.rouge1.short_text or self.rouge2.short_text or self.rougeL.short_text


@dataclass(frozen=True)
class ScoreReport:
    """Corpus means of every metric, one row per column of the results table."""

    rouge1: PRF
    rouge2: PRF
    rougeL: PRF
    bleu: float
    bertscore: Optional[PRF]
    n_examples: int
    n_short: int = 0
    n_empty_candidates: int = 0

    @property
    def dict(self) -> dict:
        values = {
            "rouge1_f1": self.rouge1.f1,
            "rouge2_f1": self.rouge2.f1,
            "rougeL_f1": self.rougeL.f1,
            "bleu": self.bleu,
        }
        if self.bertscore is not None:
            values.update(
                bertscore_precision=self.bertscore.precision,
                bertscore_recall=self.bertscore.recall,
                bertscore_f1=self.bertscore.f1,
            )
        return values

    def to_json(self) -> str:
        return json.dumps(self.dict)

    def format_table(self, scale: int = 1) -> str:
        """
        Renders the report as a two-column text table.

        With `scale` 100, ROUGE and BLEU are shown as percentages while the
        BERTScore rows stay on the 0-1 scale.
        """
        if scale not in (1, 100):
            raise ValidationError(f"scale must be 1 or 100, got {scale}")
        rows: List[Tuple[str, float]] = [
            ("ROUGE-1 F1", self.rouge1.f1 * scale),
            ("ROUGE-2 F1", self.rouge2.f1 * scale),
            ("ROUGE-L F1", self.rougeL.f1 * scale),
            ("BLEU", self.bleu * scale),
        ]
        if self.bertscore is not None:
            rows += [
                ("BERTscore: P", self.bertscore.precision),
                ("BERTscore: R", self.bertscore.recall),
                ("BERTscore: F1", self.bertscore.f1),
            ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{'Metric':<{width}}  Score"]
        lines += [f"{name:<{width}}  {value:.4f}" for name, value in rows]
        lines.append(f"{'examples':<{width}}  {self.n_examples}")
        return "\n".join(lines)


def score_example(candidate: str, reference: str, provider: Optional[EmbeddingProvider] = None) -> ExampleScores:
    candidate_tokens = tokenize_for_metrics(candidate)
    bertscore = None
    if provider is not None:
        reference_tokens = tokenize_for_metrics(reference)
        if candidate_tokens and reference_tokens:
            bertscore = bert_score(provider.embed(candidate_tokens), provider.embed(reference_tokens))
        else:
            bertscore = PRF.short()
    return ExampleScores(
        rouge1=rouge_n(candidate, reference, 1),
        rouge2=rouge_n(candidate, reference, 2),
        rougeL=rouge_l(candidate, reference),
        bleu=bleu(candidate, reference),
        bertscore=bertscore,
        empty_candidate=not candidate_tokens,
    )


def _mean_prf(scores: Sequence[PRF]) -> PRF:
    return PRF(
        precision=float(np.mean([s.precision for s in scores])),
        recall=float(np.mean([s.recall for s in scores])),
        f1=float(np.mean([s.f1 for s in scores])),
    )


def evaluate_corpus(
    pairs: Sequence[Tuple[str, str]],
    provider: Optional[EmbeddingProvider] = None,
    workers: int = 1,
) -> ScoreReport:
    """
    Scores (generated, reference) pairs and averages every metric.

    Args:
        pairs: Generated summary and reference summary per example.
        provider: Embeddings for BERTScore; without one BERTScore is left out.
        workers: Threads scoring examples in parallel. Means are taken in input order.

    Returns:
        ScoreReport: Arithmetic means over the examples.
    """
    if not pairs:
        raise ValidationError("Cannot evaluate an empty corpus")
    validate_number(workers, "workers", types=int, minimum=1)

    def run(pair: Tuple[str, str]) -> ExampleScores:
        return score_example(pair[0], pair[1], provider)

    if workers == 1:
        scores = [run(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            scores = list(executor.map(run, pairs))

    report = ScoreReport(
        rouge1=_mean_prf([s.rouge1 for s in scores]),
        rouge2=_mean_prf([s.rouge2 for s in scores]),
        rougeL=_mean_prf([s.rougeL for s in scores]),
        bleu=float(np.mean([s.bleu for s in scores])),
        bertscore=_mean_prf([s.bertscore for s in scores]) if provider is not None else None,
        n_examples=len(scores),
        n_short=sum(s.short_text for s in scores),
        n_empty_candidates=sum(s.empty_candidate for s in scores),
    )
    logger.info("Scored %d examples (%d short, %d empty)", report.n_examples, report.n_short, report.n_empty_candidates)
    return report
