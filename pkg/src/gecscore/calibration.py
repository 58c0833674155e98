"""ROC construction, AUROC, and Youden-J threshold selection.

The positive class is always "llm" and the classification rule is strict:
predict llm iff score > threshold.  Candidate thresholds are the midpoints
between consecutive distinct scores plus -inf/+inf sentinels, which realize
every achievable confusion matrix.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import HUMAN, LLM
from .errors import CalibrationError


@dataclass
class RocPoint:
    threshold: float
    tpr: float
    fpr: float
    j: float


@dataclass
class Threshold:
    epsilon: float
    j_at_epsilon: float
    tpr: float
    fpr: float
    n_pos: int
    n_neg: int
    metric: object = None


def _split_scores(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = list(labels)
    if len(scores) != len(labels):
        raise CalibrationError(
            f"length mismatch: {len(scores)} scores vs {len(labels)} labels"
        )
    bad = sorted({l for l in labels if l not in (HUMAN, LLM)})
    if bad:
        raise CalibrationError(f"labels must be 'human' or 'llm', got {bad}")
    is_pos = np.array([l == LLM for l in labels], dtype=bool)
    pos = scores[is_pos]
    neg = scores[~is_pos]
    if len(pos) == 0 or len(neg) == 0:
        raise CalibrationError("calibration needs at least one sample of each class")
    return pos, neg


def candidate_thresholds(scores) -> np.ndarray:
    distinct = np.unique(np.asarray(scores, dtype=np.float64))
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate(([-np.inf], mids, [np.inf]))


def roc_points(scores, labels) -> list[RocPoint]:
    """One RocPoint per candidate threshold, in increasing threshold order."""
    pos, neg = _split_scores(scores, labels)
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    points = []
    for eps in candidate_thresholds(np.concatenate((pos, neg))):
        tp = len(pos) - int(np.searchsorted(pos_sorted, eps, side="right"))
        fp = len(neg) - int(np.searchsorted(neg_sorted, eps, side="right"))
        tpr = tp / len(pos)
        fpr = fp / len(neg)
        points.append(RocPoint(threshold=float(eps), tpr=tpr, fpr=fpr, j=tpr - fpr))
    return points


def auroc(scores, labels) -> float:
    """Rank statistic: P(random positive outscores random negative), ties count half.

    Internally exact integer arithmetic (doubled ranks) with a single final
    division, routed so that flipping the positive class yields exactly
    1 - auroc.
    """
    pos, neg = _split_scores(scores, labels)
    all_scores = np.concatenate((pos, neg))
    order = np.argsort(all_scores, kind="mergesort")
    ranks2 = np.empty(len(all_scores), dtype=np.int64)  # doubled 1-based ranks
    sorted_scores = all_scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks2[order[i : j + 1]] = i + j + 2  # 2 * (average rank)
        i = j + 1
    n_pos, n_neg = len(pos), len(neg)
    u2 = int(ranks2[:n_pos].sum()) - n_pos * (n_pos + 1)  # = 2 * (wins + ties/2)
    d2 = 2 * n_pos * n_neg
    if u2 >= d2 - u2:
        return u2 / d2
    # Values below 0.5 are derived from the complementary division, so the
    # label-flipped AUROC is exactly 1 - this value (1 - x is exact for x >= 0.5).
    return 1.0 - (d2 - u2) / d2


def select_threshold(scores, labels) -> Threshold:
    """Maximize TPR + (1 - FPR); ties break to lowest FPR, then smallest epsilon."""
    pos, neg = _split_scores(scores, labels)
    best = None
    for pt in roc_points(scores, labels):
        key = (-pt.j, pt.fpr, pt.threshold)
        if best is None or key < best[0]:
            best = (key, pt)
    pt = best[1]
    # Direct confusion recount at the chosen threshold.
    tp = int((pos > pt.threshold).sum())
    fp = int((neg > pt.threshold).sum())
    return Threshold(
        epsilon=pt.threshold,
        j_at_epsilon=pt.j,
        tpr=tp / len(pos),
        fpr=fp / len(neg),
        n_pos=len(pos),
        n_neg=len(neg),
    )


def roc_csv(points: list[RocPoint]) -> str:
    lines = ["threshold,tpr,fpr,j"]
    for p in points:
        lines.append(f"{p.threshold!r},{p.tpr!r},{p.fpr!r},{p.j!r}")
    return "\n".join(lines) + "\n"
