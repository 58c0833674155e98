"""Corpus ingestion, sentence segmentation, windowing and length binning.

Corpus files are UTF-8 JSONL, one object per line:
    {"id": "...", "text": "...", "label": "human"|"llm"|null,
     "model": "..."|null, "domain": "..."|null}
Unknown keys are ignored.
"""

import json
from dataclasses import dataclass, field

from .errors import CorpusError

HUMAN = "human"
LLM = "llm"
UNKNOWN = "unknown"

_LABELS = {HUMAN, LLM, UNKNOWN}

# Token-final abbreviations that never terminate a sentence.
ABBREVIATIONS = frozenset(
    {"mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "etc.", "e.g.", "i.e.", "vs."}
)

_TERMINATORS = ".!?"


@dataclass
class TextSample:
    id: str
    text: str
    label: str = UNKNOWN
    source_model: str | None = None
    domain: str | None = None
    word_count: int = field(init=False)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("sample id must be non-empty")
        if not self.text.strip():
            raise CorpusError(f"sample {self.id!r}: empty text")
        if self.label not in _LABELS:
            raise CorpusError(f"sample {self.id!r}: unknown label {self.label!r}")
        self.word_count = len(self.text.split())


@dataclass
class LengthBin:
    lower: int
    upper: int
    samples: list[TextSample] = field(default_factory=list)


def load_corpus(path, require_label: bool = False) -> list[TextSample]:
    samples: list[TextSample] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}: line {lineno}: record must be a JSON object")
            sid = obj.get("id")
            text = obj.get("text")
            if not isinstance(sid, str) or not sid:
                raise CorpusError(f"{path}: line {lineno}: missing or empty id")
            if not isinstance(text, str) or not text.strip():
                raise CorpusError(f"{path}: line {lineno}: empty text")
            if sid in seen:
                raise CorpusError(
                    f"{path}: line {lineno}: duplicate id {sid!r} (first seen on line {seen[sid]})"
                )
            seen[sid] = lineno
            label = obj.get("label")
            if label is None:
                if require_label:
                    raise CorpusError(f"{path}: line {lineno}: sample {sid!r} has no label")
                label = UNKNOWN
            elif label not in (HUMAN, LLM):
                raise CorpusError(f"{path}: line {lineno}: unknown label {label!r}")
            samples.append(
                TextSample(
                    id=sid,
                    text=text,
                    label=label,
                    source_model=obj.get("model"),
                    domain=obj.get("domain"),
                )
            )
    return samples


def sample_to_record(sample: TextSample) -> dict:
    return {
        "id": sample.id,
        "text": sample.text,
        "label": None if sample.label == UNKNOWN else sample.label,
        "model": sample.source_model,
        "domain": sample.domain,
    }


def write_corpus(path, samples) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(sample_to_record(s), ensure_ascii=False) + "\n")


def segment_sentences(text: str) -> list[str]:
    """Rule-based splitter: boundary after . ! ? followed by an uppercase word or EOT.

    Tokens from the fixed abbreviation list never split.  Joining the segments
    with single spaces reproduces the whitespace-collapsed token stream.
    """
    tokens = text.split()
    if not tokens:
        return []
    segments: list[str] = []
    current: list[str] = []
    for i, tok in enumerate(tokens):
        current.append(tok)
        if tok[-1] in _TERMINATORS and tok.lower() not in ABBREVIATIONS:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or nxt[:1].isupper():
                segments.append(" ".join(current))
                current = []
    if current:
        segments.append(" ".join(current))
    return segments


def sliding_windows(sentences: list[str], n: int) -> list[str]:
    """All contiguous runs of exactly n sentences, joined with single spaces."""
    if n < 1:
        raise ValueError("window size must be >= 1")
    if len(sentences) < n:
        return []
    return [" ".join(sentences[i : i + n]) for i in range(len(sentences) - n + 1)]


def bin_by_length(samples, width: int) -> list[LengthBin]:
    """Partition samples into [0,w), [w,2w), ... bins by word_count; empty bins omitted."""
    if width < 1:
        raise ValueError("bin width must be >= 1")
    bins: dict[int, LengthBin] = {}
    for s in samples:
        k = s.word_count // width
        b = bins.get(k)
        if b is None:
            b = bins[k] = LengthBin(lower=k * width, upper=(k + 1) * width)
        b.samples.append(s)
    return [bins[k] for k in sorted(bins)]
