"""End-to-end detection: expand, correct, score, amplify, calibrate, decide."""

import json
from dataclasses import dataclass

import numpy as np

from . import gec, scoring
from .calibration import select_threshold
from .corpus import HUMAN, LLM, TextSample
from .errors import CalibrationError, GecScoreError
from .similarity import MetricSpec


@dataclass
class Verdict:
    sample_id: str
    amplified_score: float
    epsilon: float
    is_llm: bool
    metric: str
    n_preliminary: int

    def to_dict(self) -> dict:
        return {
            "id": self.sample_id,
            "score": self.amplified_score,
            "epsilon": self.epsilon,
            "is_llm": self.is_llm,
            "metric": self.metric,
            "n_preliminary": self.n_preliminary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class DetectFailure:
    sample_id: str
    error: str

    def to_dict(self) -> dict:
        return {"id": self.sample_id, "error": self.error}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_preliminary(preliminary: list[TextSample]) -> list[str]:
    labels = [s.label for s in preliminary]
    unl = [s.id for s in preliminary if s.label not in (HUMAN, LLM)]
    if unl:
        raise CalibrationError(f"cannot calibrate: unlabeled preliminary samples {unl[:5]}")
    if HUMAN not in labels or LLM not in labels:
        raise CalibrationError("cannot calibrate: preliminary set needs both classes")
    return labels


def _verdict_from_raw(
    prelim_raw: np.ndarray,
    labels: list[str],
    input_id: str,
    input_raw: float,
    metric: MetricSpec,
) -> Verdict:
    amplified = scoring.softmax(np.append(prelim_raw, input_raw))
    thr = select_threshold(amplified[:-1], labels)
    score = float(amplified[-1])
    return Verdict(
        sample_id=input_id,
        amplified_score=score,
        epsilon=thr.epsilon,
        is_llm=bool(score > thr.epsilon),
        metric=metric.name(),
        n_preliminary=len(labels),
    )


def detect(
    preliminary: list[TextSample],
    input_sample: TextSample,
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
) -> Verdict:
    """Run the full detection pipeline for one input sample.

    The input joins the softmax pool, but the threshold is calibrated on the
    labeled preliminary scores only; its own label (if any) is ignored.
    """
    labels = _check_preliminary(preliminary)
    if any(s.id == input_sample.id for s in preliminary):
        raise ValueError(f"input id {input_sample.id!r} already present in preliminary set")
    scored = scoring.raw_scores(
        preliminary + [input_sample], backend, metric, lowercase, service_url
    )
    raw = np.array([v for _, v in scored], dtype=np.float64)
    return _verdict_from_raw(raw[:-1], labels, input_sample.id, float(raw[-1]), metric)


def detect_batch(
    preliminary: list[TextSample],
    inputs: list[TextSample],
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
):
    """Detect each input independently: per-input softmax over preliminary + that input.

    A failing input yields a DetectFailure entry; other verdicts are unaffected.
    """
    labels = _check_preliminary(preliminary)
    prelim_scored = scoring.raw_scores(preliminary, backend, metric, lowercase, service_url)
    prelim_raw = np.array([v for _, v in prelim_scored], dtype=np.float64)
    # Correct each distinct input text once.
    raw_by_text: dict[str, float] = {}
    results = []
    for sample in inputs:
        try:
            if any(s.id == sample.id for s in preliminary):
                raise ValueError(f"input id {sample.id!r} already present in preliminary set")
            if sample.text in raw_by_text:
                input_raw = raw_by_text[sample.text]
            else:
                (_, input_raw), = scoring.raw_scores(
                    [sample], backend, metric, lowercase, service_url
                )
                raw_by_text[sample.text] = input_raw
            results.append(
                _verdict_from_raw(prelim_raw, labels, sample.id, input_raw, metric)
            )
        except (GecScoreError, ValueError) as exc:
            results.append(DetectFailure(sample_id=sample.id, error=str(exc)))
    return results
