"""Model backends: deterministic builtins plus transformer-checkpoint adapters.

The builtin backends keep the service testable and byte-stable without any
model downloads; the HF adapters load the configured checkpoints once at
startup and decode greedily so the correction function stays deterministic.
"""

import re
from collections import Counter

from .config import GEC_INSTRUCTION

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")

# Small correction table for the builtin backend (deterministic stand-in for a
# neural GEC model; the primary component ships the full rule catalog).
_BUILTIN_MISSPELLINGS = {
    "teh": "the", "hte": "the", "taht": "that", "thier": "their",
    "recieve": "receive", "beleive": "believe", "becuase": "because",
    "seperate": "separate", "definately": "definitely", "occured": "occurred",
    "untill": "until", "wich": "which", "freind": "friend", "wierd": "weird",
    "goverment": "government", "langauge": "language", "enviroment": "environment",
    "tommorow": "tomorrow", "buisness": "business", "realy": "really",
    "diffrent": "different", "remeber": "remember", "suprise": "surprise",
    "grammer": "grammar",
}
_DUP_RE = re.compile(r"\b(\w+)(?:\s+\1\b)+", re.IGNORECASE)
_A_VOWEL = re.compile(r"\b([Aa])\b(\s+)(?=[aeiouAEIOU])")
_AN_CONS = re.compile(r"\b([Aa])n\b(\s+)(?=[^aeiouAEIOU\W])")


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_SPLIT.split(text) if s.strip()]


def chunk_by_tokens(text: str, max_tokens: int) -> list[str]:
    """Sentence-aligned chunks of at most max_tokens words (overlong sentences go alone)."""
    if len(text.split()) <= max_tokens:
        return [text]
    chunks: list[str] = []
    current: list[str] = []
    count = 0
    for sentence in split_sentences(text):
        n = len(sentence.split())
        if current and count + n > max_tokens:
            chunks.append(" ".join(current))
            current, count = [], 0
        current.append(sentence)
        count += n
    if current:
        chunks.append(" ".join(current))
    return chunks


class BuiltinRulesGec:
    """Deterministic correction: misspellings, duplicate words, articles, casing."""

    name = "builtin:rules"

    def __init__(self):
        self.ready = False

    def load(self):
        self.ready = True

    def _correct_one(self, text: str) -> str:
        out = []
        for token in text.split():
            i, j = 0, len(token)
            while i < j and not token[i].isalnum():
                i += 1
            while j > i and not token[j - 1].isalnum():
                j -= 1
            core = token[i:j]
            fix = _BUILTIN_MISSPELLINGS.get(core.lower())
            if fix is not None:
                if core[:1].isupper():
                    fix = fix[:1].upper() + fix[1:]
                token = token[:i] + fix + token[j:]
            out.append(token)
        text = " ".join(out)
        text = _DUP_RE.sub(lambda m: m.group(1), text)
        text = _A_VOWEL.sub(lambda m: m.group(1) + "n" + m.group(2), text)
        text = _AN_CONS.sub(lambda m: m.group(1) + m.group(2), text)
        sentences = split_sentences(text)
        fixed = []
        for s in sentences:
            for k, ch in enumerate(s):
                if ch.isalpha():
                    if ch.islower():
                        s = s[:k] + ch.upper() + s[k + 1 :]
                    break
            fixed.append(s)
        text = " ".join(fixed) if fixed else text
        if text and text[-1] not in ".!?":
            text += "."
        return text

    def correct(self, texts: list[str]) -> list[str]:
        return [self._correct_one(t) for t in texts]


class BuiltinCharFSim:
    """Character n-gram F2 similarity (orders 1..6), clamped to [0, 1]."""

    name = "builtin:chrf"

    def __init__(self):
        self.ready = False

    def load(self):
        self.ready = True

    @staticmethod
    def _ngrams(text: str, n: int) -> Counter:
        s = "".join(text.split())
        return Counter(s[i : i + n] for i in range(len(s) - n + 1))

    def _score_one(self, a: str, b: str) -> float:
        total_f, used = 0.0, 0
        for n in range(1, 7):
            ca, cb = self._ngrams(a, n), self._ngrams(b, n)
            ta, tb = sum(ca.values()), sum(cb.values())
            if ta == 0 and tb == 0:
                continue
            match = sum(min(v, ca[g]) for g, v in cb.items())
            p = match / tb if tb else 0.0
            r = match / ta if ta else 0.0
            total_f += 5 * p * r / (4 * p + r) if (p + r) > 0 else 0.0
            used += 1
        return total_f / used if used else 0.0

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        return [self._score_one(a, b) for a, b in pairs]


class BuiltinRotateParaphrase:
    """Deterministic stand-in paraphraser: rotates the first sentence to the end."""

    name = "builtin:rotate"

    def __init__(self):
        self.ready = False

    def load(self):
        self.ready = True

    def paraphrase(self, texts: list[str]) -> list[str]:
        out = []
        for t in texts:
            sentences = split_sentences(t)
            if len(sentences) > 1:
                out.append(" ".join(sentences[1:] + sentences[:1]))
            else:
                out.append(t)
        return out


class HfSeq2SeqGec:
    """Instruction-prefixed seq2seq correction (CoEdIT-style checkpoint), greedy decoding."""

    def __init__(self, model_id: str, max_input_tokens: int, device: str):
        self.name = model_id
        self.max_input_tokens = max_input_tokens
        self.device = device
        self.ready = False
        self._pipe = None

    def load(self):
        from transformers import pipeline  # heavy import deferred to startup

        self._pipe = pipeline(
            "text2text-generation",
            model=self.name,
            device=-1 if self.device == "cpu" else 0,
        )
        self.ready = True

    def correct(self, texts: list[str]) -> list[str]:
        out = []
        for text in texts:
            result = self._pipe(
                GEC_INSTRUCTION + text, do_sample=False, num_beams=1, max_length=1024
            )
            out.append(result[0]["generated_text"].strip())
        return out


class HfBleurtSim:
    """BLEURT-style regression checkpoint; scores clamped to [0, 1]."""

    def __init__(self, model_id: str, device: str):
        self.name = model_id
        self.device = device
        self.ready = False
        self._model = None
        self._tokenizer = None

    def load(self):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self._tokenizer = AutoTokenizer.from_pretrained(self.name)
        self._model = AutoModelForSequenceClassification.from_pretrained(self.name)
        self._model.eval()
        self._torch = torch
        self.ready = True

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        scores = []
        with self._torch.no_grad():
            for a, b in pairs:
                inputs = self._tokenizer(
                    a, b, return_tensors="pt", truncation=True, max_length=512
                )
                value = float(self._model(**inputs).logits.flatten()[0])
                scores.append(min(1.0, max(0.0, value)))
        return scores


class HfParaphrase:
    """T5-style paraphrase checkpoint, greedy decoding."""

    def __init__(self, model_id: str, device: str):
        self.name = model_id
        self.device = device
        self.ready = False
        self._pipe = None

    def load(self):
        from transformers import pipeline

        self._pipe = pipeline(
            "text2text-generation",
            model=self.name,
            device=-1 if self.device == "cpu" else 0,
        )
        self.ready = True

    def paraphrase(self, texts: list[str]) -> list[str]:
        out = []
        for t in texts:
            result = self._pipe(
                "paraphrase: " + t + " </s>", do_sample=False, num_beams=1, max_length=1024
            )
            out.append(result[0]["generated_text"].strip())
        return out


def make_gec_backend(config):
    if config.gec_model_id == "builtin:rules":
        return BuiltinRulesGec()
    return HfSeq2SeqGec(config.gec_model_id, config.max_input_tokens, config.device)


def make_similarity_backend(config):
    if config.similarity_model_id == "builtin:chrf":
        return BuiltinCharFSim()
    return HfBleurtSim(config.similarity_model_id, config.device)


def make_paraphrase_backend(config):
    if not config.paraphrase_model_id:
        return None
    if config.paraphrase_model_id == "builtin:rotate":
        return BuiltinRotateParaphrase()
    return HfParaphrase(config.paraphrase_model_id, config.device)
