from .prf import PRF
from .text import tokenize_for_metrics, lcs_length
from .rouge import rouge_n, rouge_l
from .bleu import bleu
from .bertscore import EmbeddingProvider, HashingEmbeddingProvider, DimensionError, bert_score
from .report import ScoreReport, ExampleScores, score_example, evaluate_corpus
