"""Raw similarity scores and their softmax amplification over a sample set."""

from dataclasses import dataclass

import numpy as np

from . import gec, similarity
from .corpus import TextSample
from .errors import GecScoreError, MetricError
from .similarity import MetricSpec


@dataclass
class ScoreSet:
    sample_ids: list[str]
    raw: np.ndarray
    amplified: np.ndarray
    metric: MetricSpec
    n: int

    def validate(self) -> None:
        assert len(self.sample_ids) == len(self.raw) == len(self.amplified) == self.n
        assert abs(float(self.amplified.sum()) - 1.0) <= 1e-9
        assert np.all(self.amplified > 0) and np.all(self.amplified < 1)


def softmax(raw) -> np.ndarray:
    """Numerically stable softmax: e^(s_i - max) / sum_j e^(s_j - max).

    The denominator is summed in sorted order, so permuting the input permutes
    the output bit-identically.
    """
    x = np.asarray(raw, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("softmax input must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(x)):
        raise ValueError("softmax input must be finite")
    e = np.exp(x - x.max())
    return e / np.sort(e).sum()


def raw_scores(
    samples: list[TextSample],
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
) -> list[tuple[str, float]]:
    """Oriented similarity Sim(x, g(x)) per sample, order-aligned with the input."""
    if not samples:
        raise ValueError("raw_scores requires at least one sample")
    texts = [s.text for s in samples]
    corrected = gec.correct(texts, backend)
    if metric.kind == "external":
        endpoint = metric.params.get("endpoint") or service_url
        values = similarity.external_similarity(
            list(zip(texts, corrected)), metric.name(), endpoint
        )
        return [
            (s.id, similarity.orient(metric, v).oriented) for s, v in zip(samples, values)
        ]
    out = []
    for s, text, fixed in zip(samples, texts, corrected):
        try:
            value = similarity.compute_similarity(metric, text, fixed, lowercase)
        except GecScoreError as exc:
            raise MetricError(f"metric failed for sample {s.id!r}: {exc}") from exc
        out.append((s.id, value.oriented))
    return out


def gecscore_set(
    samples: list[TextSample],
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
) -> ScoreSet:
    """Softmax-amplified similarity scores over the whole sample set."""
    if len(samples) < 2:
        raise ValueError("gecscore_set requires at least 2 samples")
    scored = raw_scores(samples, backend, metric, lowercase, service_url)
    ids = [sid for sid, _ in scored]
    raw = np.array([v for _, v in scored], dtype=np.float64)
    return ScoreSet(sample_ids=ids, raw=raw, amplified=softmax(raw), metric=metric, n=len(ids))


def score_new_sample(
    existing: ScoreSet,
    new_sample: TextSample,
    backend: gec.GecBackendConfig,
    lowercase: bool = True,
    service_url: str | None = None,
) -> tuple[ScoreSet, float]:
    """Expand the set with one sample and re-amplify; raw scores of existing ids are reused."""
    if new_sample.id in existing.sample_ids:
        raise ValueError(f"duplicate sample id {new_sample.id!r}")
    (_, new_raw), = raw_scores([new_sample], backend, existing.metric, lowercase, service_url)
    ids = existing.sample_ids + [new_sample.id]
    raw = np.append(existing.raw, new_raw)
    amplified = softmax(raw)
    updated = ScoreSet(
        sample_ids=ids, raw=raw, amplified=amplified, metric=existing.metric, n=len(ids)
    )
    return updated, float(amplified[-1])
