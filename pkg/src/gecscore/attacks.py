"""Adversarial robustness harness: character perturbation and paraphrase plumbing.

The character attack is a scorer-free stand-in for model-guided token
selection: it perturbs the longest eligible tokens first, which approximates
"key token" targeting without query access to a victim model.
"""

import logging
import math
import random
import re
from dataclasses import dataclass, field

import requests

from . import gec
from .corpus import LLM, TextSample
from .errors import ProtocolError, ServiceError, TransportError

log = logging.getLogger(__name__)

ALL_OPS = ("swap_adjacent_chars", "substitute_char", "delete_char", "insert_char")
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_TOKEN_SPLIT = re.compile(r"(\s+)")


@dataclass(frozen=True)
class PerturbationConfig:
    rate: float
    ops: tuple = field(default=ALL_OPS)
    seed: int = 0
    min_token_len: int = 3

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must be in [0, 1]")
        unknown = [op for op in self.ops if op not in ALL_OPS]
        if unknown:
            raise ValueError(f"unknown ops: {unknown}")
        if self.rate > 0 and not self.ops:
            raise ValueError("ops must be non-empty when rate > 0")


def _feasible_ops(ops, token_len: int):
    return [op for op in ops if op != "swap_adjacent_chars" or token_len >= 2]


def _perturb_token(token: str, op: str, rng: random.Random) -> str:
    if op == "swap_adjacent_chars":
        p = rng.randrange(len(token) - 1)
        return token[:p] + token[p + 1] + token[p] + token[p + 2 :]
    if op == "substitute_char":
        p = rng.randrange(len(token))
        ch = rng.choice(_ALPHABET)
        while ch == token[p]:
            ch = rng.choice(_ALPHABET)
        return token[:p] + ch + token[p + 1 :]
    if op == "delete_char":
        p = rng.randrange(len(token))
        return token[:p] + token[p + 1 :]
    p = rng.randrange(len(token) + 1)  # insert_char
    return token[:p] + rng.choice(_ALPHABET) + token[p:]


def perturb_chars(text: str, config: PerturbationConfig) -> str:
    """Apply one seeded character edit to ceil(rate * N) tokens, longest first.

    Only tokens of length >= min_token_len are eligible; whitespace is
    preserved exactly.  Deterministic for a fixed (text, config).
    """
    if config.rate == 0.0:
        return text
    parts = _TOKEN_SPLIT.split(text)
    word_idx = [i for i in range(0, len(parts), 2) if parts[i]]
    n_words = len(word_idx)
    if n_words == 0:
        return text
    # ceil(rate * N) with a tiny guard against float fuzz in rate * N
    want = min(n_words, max(1, math.ceil(config.rate * n_words - 1e-9)))
    eligible = [i for i in word_idx if len(parts[i]) >= config.min_token_len]
    chosen = sorted(eligible, key=lambda i: (-len(parts[i]), i))[:want]
    if len(chosen) < want:
        log.warning(
            "perturb_chars: only %d of %d requested tokens eligible", len(chosen), want
        )
    rng = random.Random(config.seed)
    ops = sorted(config.ops)
    for i in sorted(chosen):
        feasible = _feasible_ops(ops, len(parts[i]))
        if not feasible:
            continue
        op = feasible[rng.randrange(len(feasible))]
        parts[i] = _perturb_token(parts[i], op, rng)
    return "".join(parts)


def paraphrase(texts: list[str], endpoint: str, timeout: float = 120.0) -> list[str]:
    """Order-aligned paraphrases via POST /v1/paraphrase."""
    if not texts:
        return []
    if not endpoint:
        raise TransportError("no paraphrase service endpoint configured")
    url = endpoint.rstrip("/") + "/v1/paraphrase"
    try:
        resp = requests.post(url, json={"texts": texts}, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"paraphrase request failed: {exc}") from exc
    if resp.status_code != 200:
        raise ServiceError(f"paraphrase service returned {resp.status_code}: {resp.text[:200]}")
    try:
        out = resp.json()["paraphrased"]
    except (ValueError, KeyError) as exc:
        raise ProtocolError("malformed paraphrase response") from exc
    if not isinstance(out, list) or len(out) != len(texts):
        raise ProtocolError(
            f"count mismatch: sent {len(texts)} texts, got "
            f"{len(out) if isinstance(out, list) else 'non-list'}"
        )
    return [str(t) for t in out]


def apply_attack(
    samples: list[TextSample],
    attack: str,
    attack_params,
    endpoint: str | None = None,
) -> list[TextSample]:
    """Attack LLM-labeled samples only (the evasion threat model); others pass through."""
    if attack == "none":
        return list(samples)
    if attack == "chars":
        config: PerturbationConfig = attack_params
        out = []
        for s in samples:
            if s.label != LLM:
                out.append(s)
                continue
            per_text = PerturbationConfig(
                rate=config.rate,
                ops=config.ops,
                seed=gec.derive_seed(config.seed, s.id),
                min_token_len=config.min_token_len,
            )
            out.append(
                TextSample(
                    id=s.id,
                    text=perturb_chars(s.text, per_text),
                    label=s.label,
                    source_model=s.source_model,
                    domain=s.domain,
                )
            )
        return out
    if attack == "paraphrase":
        llm_samples = [s for s in samples if s.label == LLM]
        rewritten = paraphrase([s.text for s in llm_samples], endpoint)
        by_id = {s.id: t for s, t in zip(llm_samples, rewritten)}
        return [
            TextSample(
                id=s.id,
                text=by_id.get(s.id, s.text),
                label=s.label,
                source_model=s.source_model,
                domain=s.domain,
            )
            for s in samples
        ]
    raise ValueError(f"unknown attack {attack!r}")


def robustness_eval(
    samples: list[TextSample],
    attack: str,
    attack_params,
    backend: gec.GecBackendConfig,
    metric,
    lowercase: bool = True,
    endpoint: str | None = None,
    service_url: str | None = None,
):
    """Evaluate before and after attacking the LLM-labeled texts, recalibrating each time.

    Returns (before, after) EvalReports.
    """
    from . import harness  # local import to avoid a module cycle

    before = harness.evaluate(samples, backend, metric, lowercase, service_url)
    attacked = apply_attack(samples, attack, attack_params, endpoint)
    after = harness.evaluate(attacked, backend, metric, lowercase, service_url)
    return before, after
