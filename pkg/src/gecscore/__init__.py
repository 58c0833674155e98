"""GECScore: zero-shot machine-generated text detection via grammar-correction similarity."""

from .attacks import PerturbationConfig, paraphrase, perturb_chars, robustness_eval
from .calibration import RocPoint, Threshold, auroc, roc_points, select_threshold
from .corpus import (
    HUMAN,
    LLM,
    UNKNOWN,
    LengthBin,
    TextSample,
    bin_by_length,
    load_corpus,
    segment_sentences,
    sliding_windows,
)
from .detection import DetectFailure, Verdict, detect, detect_batch
from .gec import GecBackendConfig, correct, inject_errors
from .harness import ClassStats, EvalReport, ablate_length, class_statistics, evaluate, run
from .scoring import ScoreSet, gecscore_set, raw_scores, score_new_sample, softmax
from .similarity import (
    MetricSpec,
    SimilarityValue,
    bleu,
    chrf,
    compute_similarity,
    edit_distance,
    external_similarity,
    gleu,
    meteor,
    metric_spec,
    orient,
    rouge_l,
    rouge_n,
    ter,
)

__version__ = "0.1.0"
