"""Native similarity metrics plus the uniform similarity orientation.

Every metric compares a candidate (the corrected text) against a reference
(the original text under detection).  Distance-like metrics (TER, edit
distance) are oriented via 1/(1+d) so the whole family feeds the same scoring
pipeline with "higher means more similar" semantics.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import requests

from . import _kernels
from .errors import MetricError, ProtocolError, ServiceError, TransportError
from .textproc import TokenSeq, char_ngrams, overlap, tokenize_words, word_ngrams

HIGHER_IS_SIMILAR = "higher_is_similar"
LOWER_IS_SIMILAR = "lower_is_similar"

_DISTANCE_KINDS = {"ter", "edit_distance"}
_NATIVE_KINDS = {
    "bleu",
    "gleu",
    "chrf",
    "ter",
    "edit_distance",
    "rouge1",
    "rouge2",
    "rougeL",
    "meteor",
}
KINDS = _NATIVE_KINDS | {"external"}

# CLI metric names -> (kind, extra params)
CLI_METRIC_NAMES = {
    "bleu": ("bleu", {}),
    "gleu": ("gleu", {}),
    "chrf": ("chrf", {}),
    "ter": ("ter", {}),
    "edit": ("edit_distance", {}),
    "rouge1": ("rouge1", {}),
    "rouge2": ("rouge2", {}),
    "rougel": ("rougeL", {}),
    "meteor": ("meteor", {}),
    "bleurt": ("external", {"external_name": "bleurt"}),
}


@dataclass(frozen=True)
class MetricSpec:
    kind: str
    params: dict = field(default_factory=dict)
    direction: str = HIGHER_IS_SIMILAR

    def name(self) -> str:
        if self.kind == "external":
            return self.params.get("external_name", "external")
        return self.kind


def metric_spec(kind: str, **params) -> MetricSpec:
    """Build a validated MetricSpec with documented defaults filled in."""
    if kind not in KINDS:
        raise MetricError(f"unknown metric kind {kind!r}")
    filled = dict(params)
    if kind in ("bleu", "gleu"):
        filled.setdefault("max_n", 4)
        if filled["max_n"] < 1:
            raise MetricError("max_n must be >= 1")
    if kind == "chrf":
        filled.setdefault("char_n", 6)
        filled.setdefault("beta", 2.0)
        if filled["char_n"] < 1:
            raise MetricError("char_n must be >= 1")
        if filled["beta"] <= 0:
            raise MetricError("beta must be > 0")
    if kind == "external" and "external_name" not in filled:
        filled["external_name"] = "bleurt"
    direction = LOWER_IS_SIMILAR if kind in _DISTANCE_KINDS else HIGHER_IS_SIMILAR
    return MetricSpec(kind=kind, params=filled, direction=direction)


@dataclass
class SimilarityValue:
    metric: MetricSpec
    raw: float
    oriented: float
    warning: bool = False


# --------------------------------------------------------------------------
# n-gram metrics
# --------------------------------------------------------------------------


def bleu(candidate: TokenSeq, reference: TokenSeq, max_n: int = 4) -> float:
    """Sentence BLEU with brevity penalty.

    Orders with zero matched n-grams use the smoothed precision
    1/(2 * candidate n-gram count); orders where the candidate has no n-grams
    at all are excluded, so exact matches score 1.0 regardless of length.
    """
    if max_n < 1:
        raise MetricError("max_n must be >= 1")
    if len(candidate) == 0 or len(reference) == 0:
        return 0.0
    log_sum = 0.0
    used = 0
    for n in range(1, max_n + 1):
        cand = word_ngrams(candidate, n)
        total = cand.total()
        if total == 0:
            continue
        matched = overlap(cand, word_ngrams(reference, n))
        p = matched / total if matched > 0 else 1.0 / (2.0 * total)
        log_sum += math.log(p)
        used += 1
    if used == 0:
        return 0.0
    geo = math.exp(log_sum / used)
    bp = min(1.0, math.exp(1.0 - len(reference) / len(candidate)))
    return geo * bp


def gleu(candidate: TokenSeq, reference: TokenSeq, max_n: int = 4) -> float:
    """Sentence GLEU: min(precision, recall) of clipped n-gram matches, n=1..max_n."""
    if max_n < 1:
        raise MetricError("max_n must be >= 1")
    if len(candidate) == 0 or len(reference) == 0:
        return 0.0
    matched = 0
    total_cand = 0
    total_ref = 0
    for n in range(1, max_n + 1):
        cand = word_ngrams(candidate, n)
        ref = word_ngrams(reference, n)
        matched += overlap(cand, ref)
        total_cand += cand.total()
        total_ref += ref.total()
    precision = matched / total_cand if total_cand else 0.0
    recall = matched / total_ref if total_ref else 0.0
    return min(precision, recall)


def chrf(candidate: str, reference: str, max_char_n: int = 6, beta: float = 2.0) -> float:
    """Character n-gram F-beta averaged over orders 1..max_char_n.

    Whitespace is stripped before n-gram extraction.  Orders where neither
    side has any n-grams are excluded from the average.
    """
    if max_char_n < 1:
        raise MetricError("max_char_n must be >= 1")
    if beta <= 0:
        raise MetricError("beta must be > 0")
    beta2 = beta * beta
    f_sum = 0.0
    used = 0
    for n in range(1, max_char_n + 1):
        cand = char_ngrams(candidate, n, strip_ws=True)
        ref = char_ngrams(reference, n, strip_ws=True)
        tc, tr = cand.total(), ref.total()
        if tc == 0 and tr == 0:
            continue
        matched = overlap(cand, ref)
        p = matched / tc if tc else 0.0
        r = matched / tr if tr else 0.0
        f = (1 + beta2) * p * r / (beta2 * p + r) if (p + r) > 0 else 0.0
        f_sum += f
        used += 1
    return f_sum / used if used else 0.0


# --------------------------------------------------------------------------
# edit-distance family
# --------------------------------------------------------------------------


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over Unicode scalar values, O(min(|a|,|b|)) memory."""
    return _kernels.levenshtein_codes(_kernels.str_to_codes(a), _kernels.str_to_codes(b))


def _word_distance(a_ids, b_ids) -> int:
    return _kernels.levenshtein_codes(a_ids, b_ids)


def ter(
    hypothesis: TokenSeq,
    reference: TokenSeq,
    max_shift_len: int = 10,
    max_shift_dist: int = 50,
) -> float:
    """Translation edit rate: (word edits + shifts) / |reference|.

    Shift search is greedy best-improvement over all contiguous hypothesis
    spans (length <= max_shift_len, displacement <= max_shift_dist): the move
    that most reduces the remaining word edit distance is applied for cost 1,
    until no move reduces it.  Exhaustive by construction, so intended for
    sentence-scale inputs.
    """
    if len(reference) == 0:
        raise MetricError("TER reference must be non-empty")
    hyp_ids, ref_ids = _kernels.tokens_to_ids(hypothesis.tokens, reference.tokens)
    cur = list(hyp_ids)
    shifts = 0
    while True:
        arr = np.asarray(cur, dtype=np.int32)
        base = _word_distance(arr, ref_ids)
        if base == 0:
            break
        best_gain = 0
        best = None
        n = len(cur)
        for start in range(n):
            for length in range(1, min(max_shift_len, n - start) + 1):
                span = cur[start : start + length]
                rest = cur[:start] + cur[start + length :]
                for target in range(0, n - length + 1):
                    if target == start or abs(target - start) > max_shift_dist:
                        continue
                    moved = rest[:target] + span + rest[target:]
                    d = _word_distance(np.asarray(moved, dtype=np.int32), ref_ids)
                    gain = base - d
                    if gain > best_gain:
                        best_gain = gain
                        best = moved
        if best is None:
            break
        cur = best
        shifts += 1
    final = _word_distance(np.asarray(cur, dtype=np.int32), ref_ids)
    return (shifts + final) / len(reference)


# --------------------------------------------------------------------------
# ROUGE / METEOR
# --------------------------------------------------------------------------


def rouge_n(candidate: TokenSeq, reference: TokenSeq, n: int) -> float:
    if n < 1:
        raise MetricError("n must be >= 1")
    if len(candidate) < n or len(reference) < n:
        return 0.0
    cand = word_ngrams(candidate, n)
    ref = word_ngrams(reference, n)
    matched = overlap(cand, ref)
    p = matched / cand.total()
    r = matched / ref.total()
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def rouge_l(candidate: TokenSeq, reference: TokenSeq) -> float:
    if len(candidate) == 0 or len(reference) == 0:
        return 0.0
    cand_ids, ref_ids = _kernels.tokens_to_ids(candidate.tokens, reference.tokens)
    lcs = _kernels.lcs_codes(cand_ids, ref_ids)
    p = lcs / len(candidate)
    r = lcs / len(reference)
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def meteor(candidate: TokenSeq, reference: TokenSeq) -> float:
    """Exact-match METEOR: greedy left-to-right unigram alignment.

    F_mean = 10PR/(R+9P); penalty = 0.5 * (chunks/matches)^3 where chunks are
    maximal runs contiguous in both sequences under the chosen alignment.
    No stemming or synonymy.
    """
    if len(candidate) == 0 or len(reference) == 0:
        return 0.0
    ref_tokens = reference.tokens
    used = [False] * len(ref_tokens)
    pairs: list[tuple[int, int]] = []
    for ci, tok in enumerate(candidate.tokens):
        for rj, rtok in enumerate(ref_tokens):
            if not used[rj] and rtok == tok:
                used[rj] = True
                pairs.append((ci, rj))
                break
    m = len(pairs)
    if m == 0:
        return 0.0
    p = m / len(candidate)
    r = m / len(reference)
    f_mean = 10 * p * r / (r + 9 * p)
    chunks = 0
    prev = None
    for ci, rj in pairs:  # pairs are already in candidate order
        if prev is None or ci != prev[0] + 1 or rj != prev[1] + 1:
            chunks += 1
        prev = (ci, rj)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1.0 - penalty)


# --------------------------------------------------------------------------
# orientation and dispatch
# --------------------------------------------------------------------------


def orient(metric: MetricSpec, raw: float, warning: bool = False) -> SimilarityValue:
    if not math.isfinite(raw):
        raise MetricError(f"non-finite raw similarity {raw!r} for {metric.name()}")
    if metric.direction == LOWER_IS_SIMILAR:
        if raw < 0:
            raise MetricError(f"negative distance {raw!r} for {metric.name()}")
        return SimilarityValue(metric=metric, raw=raw, oriented=1.0 / (1.0 + raw), warning=warning)
    if metric.kind == "external":
        raw = min(1.0, max(0.0, raw))
    return SimilarityValue(metric=metric, raw=raw, oriented=raw, warning=warning)


def compute_similarity(
    metric: MetricSpec, original: str, corrected: str, lowercase: bool = True
) -> SimilarityValue:
    """Sim(original, corrected) oriented so higher always means more similar.

    The original text is the reference; the corrected text is the candidate.
    """
    if metric.kind == "external":
        raise MetricError("external metrics are computed in batch via external_similarity")
    warning = not original.strip() or not corrected.strip()
    if metric.kind == "chrf":
        cand, ref = (corrected, original)
        if lowercase:
            cand, ref = cand.lower(), ref.lower()
        raw = chrf(cand, ref, metric.params["char_n"], metric.params["beta"])
        return orient(metric, raw, warning)
    if metric.kind == "edit_distance":
        a, b = (corrected, original)
        if lowercase:
            a, b = a.lower(), b.lower()
        return orient(metric, float(edit_distance(a, b)), warning)
    cand = tokenize_words(corrected, lowercase)
    ref = tokenize_words(original, lowercase)
    if metric.kind == "bleu":
        raw = bleu(cand, ref, metric.params["max_n"])
    elif metric.kind == "gleu":
        raw = gleu(cand, ref, metric.params["max_n"])
    elif metric.kind == "ter":
        if len(ref) == 0:
            raise MetricError("TER reference must be non-empty")
        return orient(metric, ter(cand, ref), warning)
    elif metric.kind == "rouge1":
        raw = rouge_n(cand, ref, 1)
    elif metric.kind == "rouge2":
        raw = rouge_n(cand, ref, 2)
    elif metric.kind == "rougeL":
        raw = rouge_l(cand, ref)
    elif metric.kind == "meteor":
        raw = meteor(cand, ref)
    else:  # pragma: no cover - guarded by metric_spec
        raise MetricError(f"unhandled metric kind {metric.kind!r}")
    return orient(metric, raw, warning)


def external_similarity(
    pairs: list[tuple[str, str]],
    name: str,
    endpoint: str,
    timeout: float = 60.0,
    batch_size: int = 32,
) -> list[float]:
    """Score (original, corrected) pairs via the /v1/similarity service protocol.

    Returns one score per pair, order-aligned, clamped to [0, 1].
    """
    if not endpoint:
        raise TransportError("no similarity service endpoint configured")
    url = endpoint.rstrip("/") + "/v1/similarity"
    scores: list[float] = []
    for off in range(0, len(pairs), batch_size):
        batch = pairs[off : off + batch_size]
        body = {"pairs": [{"a": a, "b": b} for a, b in batch], "metric": name}
        try:
            resp = requests.post(url, json=body, timeout=timeout)
        except requests.RequestException as exc:
            raise TransportError(f"similarity request failed: {exc}") from exc
        if resp.status_code != 200:
            raise ServiceError(
                f"similarity service returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            got = resp.json()["scores"]
        except (ValueError, KeyError) as exc:
            raise ProtocolError("malformed similarity response") from exc
        if not isinstance(got, list) or len(got) != len(batch):
            raise ProtocolError(
                f"count mismatch: sent {len(batch)} pairs, got "
                f"{len(got) if isinstance(got, list) else 'non-list'} scores"
            )
        for s in got:
            if not isinstance(s, (int, float)) or not math.isfinite(float(s)):
                raise ProtocolError(f"non-finite similarity score {s!r}")
            scores.append(min(1.0, max(0.0, float(s))))
    return scores
