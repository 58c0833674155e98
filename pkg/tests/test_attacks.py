import random

import pytest

import synthdata
from gecscore.attacks import (
    ALL_OPS,
    PerturbationConfig,
    apply_attack,
    paraphrase,
    perturb_chars,
    robustness_eval,
)
from gecscore.corpus import HUMAN, LLM, TextSample
from gecscore.errors import ProtocolError, TransportError
from gecscore.gec import GecBackendConfig
from gecscore.similarity import compute_similarity, edit_distance, metric_spec

RULES = GecBackendConfig(kind="rules")
CHRF = metric_spec("chrf")


def test_config_validation():
    with pytest.raises(ValueError):
        PerturbationConfig(rate=1.5)
    with pytest.raises(ValueError):
        PerturbationConfig(rate=0.5, ops=("explode",))
    with pytest.raises(ValueError):
        PerturbationConfig(rate=0.5, ops=())
    assert PerturbationConfig(rate=0.0, ops=()).rate == 0.0


def test_rate_zero_identity():
    text = "hello world, nothing changes"
    assert perturb_chars(text, PerturbationConfig(rate=0.0)) == text


def test_deterministic():
    text = synthdata.clean_text(0, 50)
    cfg = PerturbationConfig(rate=0.3, seed=1234)
    assert perturb_chars(text, cfg) == perturb_chars(text, cfg)


def test_delete_full_rate():
    out = perturb_chars("hello world", PerturbationConfig(rate=1.0, ops=("delete_char",), seed=5))
    parts = out.split()
    assert len(parts) == 2
    assert len(parts[0]) == 4 and len(parts[1]) == 4
    assert edit_distance("hello world", out) == 2


def test_per_token_edit_bound():
    text = synthdata.clean_text(1, 60)
    for seed in range(5):
        cfg = PerturbationConfig(rate=1.0, seed=seed)
        out = perturb_chars(text, cfg)
        orig_tokens = text.split()
        new_tokens = out.split()
        assert len(orig_tokens) == len(new_tokens)
        for a, b in zip(orig_tokens, new_tokens):
            assert edit_distance(a, b) <= 2


def test_whitespace_preserved():
    text = "alpha\tbeta\n\ngamma  delta"
    out = perturb_chars(text, PerturbationConfig(rate=1.0, seed=0))
    assert out.split(" ")[0].count("\t") == text.split(" ")[0].count("\t")
    assert out.count("\n") == text.count("\n")


def test_short_tokens_skipped():
    out = perturb_chars("a of it in", PerturbationConfig(rate=1.0, seed=0))
    assert out == "a of it in"


def test_length_ratio_bounds():
    rng = random.Random(2)
    for i in range(20):
        text = synthdata.clean_text(i, 30)
        cfg = PerturbationConfig(rate=rng.random(), seed=i)
        out = perturb_chars(text, cfg)
        assert 0.5 <= len(out) / len(text) <= 2.0


def test_prefers_longer_tokens():
    text = "hi extraordinarily no"
    cfg = PerturbationConfig(rate=0.34, seed=3)  # 1 of 3 tokens
    out = perturb_chars(text, cfg)
    toks = out.split()
    assert toks[0] == "hi" and toks[2] == "no"
    assert toks[1] != "extraordinarily"


def test_monotone_damage():
    text = synthdata.clean_text(7, 150)
    means = []
    for rate in (0.0, 0.1, 0.3, 0.5):
        vals = [
            compute_similarity(
                CHRF, text, perturb_chars(text, PerturbationConfig(rate=rate, seed=t))
            ).oriented
            for t in range(100)
        ]
        means.append(sum(vals) / len(vals))
    for lo, hi in zip(means, means[1:]):
        assert lo >= hi - 0.01


def test_apply_attack_targets_llm_only():
    samples = [
        TextSample(id="h", text="human text stays untouched here.", label=HUMAN),
        TextSample(id="l", text="machine text gets perturbed here.", label=LLM),
    ]
    out = apply_attack(samples, "chars", PerturbationConfig(rate=1.0, seed=0))
    assert out[0].text == samples[0].text
    assert out[1].text != samples[1].text
    assert out[1].label == LLM


def test_attack_none_before_equals_after():
    samples = synthdata.build_detection_corpus(12, 12, seed=1, min_words=60)
    before, after = robustness_eval(samples, "none", None, RULES, CHRF, lowercase=False)
    assert before == after


def test_attack_asymmetry_small_rate():
    samples = synthdata.build_detection_corpus(15, 15, seed=2, min_words=80)
    cfg = PerturbationConfig(rate=0.05, seed=0)
    before, after = robustness_eval(samples, "chars", cfg, RULES, CHRF, lowercase=False)
    assert after.auroc <= before.auroc + 0.02
    assert after.auroc >= before.auroc - 0.10


class _FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}
        self.text = str(payload)

    def json(self):
        return self._payload


def test_paraphrase_protocol(monkeypatch):
    def fake_post(url, json=None, timeout=None):
        assert url.endswith("/v1/paraphrase")
        return _FakeResponse(payload={"paraphrased": [t[::-1] for t in json["texts"]]})

    monkeypatch.setattr("gecscore.attacks.requests.post", fake_post)
    assert paraphrase(["ab", "cd"], "http://svc") == ["ba", "dc"]
    assert paraphrase([], "http://svc") == []


def test_paraphrase_errors(monkeypatch):
    import requests as _requests

    monkeypatch.setattr(
        "gecscore.attacks.requests.post",
        lambda url, json=None, timeout=None: _FakeResponse(payload={"paraphrased": ["x"]}),
    )
    with pytest.raises(ProtocolError):
        paraphrase(["a", "b"], "http://svc")

    def boom(url, json=None, timeout=None):
        raise _requests.ConnectionError("nope")

    monkeypatch.setattr("gecscore.attacks.requests.post", boom)
    with pytest.raises(TransportError):
        paraphrase(["a"], "http://svc")
