"""Metric tests: frozen hand-derived oracle values plus seeded property checks."""

import math
import random
from collections import Counter

import numpy as np
import pytest

from gecscore import _kernels
from gecscore.errors import MetricError, ProtocolError, ServiceError, TransportError
from gecscore.similarity import (
    HIGHER_IS_SIMILAR,
    LOWER_IS_SIMILAR,
    MetricSpec,
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
from gecscore.textproc import TokenSeq, tokenize_words


def tw(text):
    return tokenize_words(text, lowercase=True)


# ---------------------------------------------------------------- oracles


def lev_oracle(a: str, b: str) -> int:
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return d[m][n]


def lcs_oracle(a, b) -> int:
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if a[i - 1] == b[j - 1]:
                d[i][j] = d[i - 1][j - 1] + 1
            else:
                d[i][j] = max(d[i - 1][j], d[i][j - 1])
    return d[m][n]


def ngram_multiset(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def clipped_matches(cand_tokens, ref_tokens, n):
    c = ngram_multiset(cand_tokens, n)
    r = ngram_multiset(ref_tokens, n)
    return sum(min(v, r[g]) for g, v in c.items())


# ---------------------------------------------------------------- BLEU


def test_bleu_identical():
    seq = tw("a b c d e f g h i j")
    assert bleu(seq, seq) == 1.0


def test_bleu_repeated_token_clipping():
    # p1 = 1/4 clipped; smoothed p2 = 1/6, p3 = 1/4, p4 = 1/2; BP = 1
    expected = (0.25 * (1 / 6) * 0.25 * 0.5) ** 0.25
    got = bleu(tw("the the the the"), tw("the cat"))
    assert got == pytest.approx(expected, abs=1e-9)


def test_bleu_zero_overlap_ten_tokens():
    # all orders smoothed: p_n = 1/(2*(10-n+1)); BP = 1
    expected = (1 / 20 * 1 / 18 * 1 / 16 * 1 / 14) ** 0.25
    got = bleu(tw("q w e r t y u i o p"), tw("z x c v b n m k l f"))
    assert got == pytest.approx(expected, abs=1e-9)


def test_bleu_empty_inputs():
    assert bleu(TokenSeq([]), tw("a b")) == 0.0
    assert bleu(tw("a b"), TokenSeq([])) == 0.0


def test_bleu_short_exact_match_unaffected_by_smoothing():
    seq = tw("a b")
    assert bleu(seq, seq) == 1.0


def test_bleu_brevity_penalty():
    # candidate half the reference length: BP = e^(1-2) = e^-1
    cand = tw("a b c d e")
    ref = tw("a b c d e f g h i j")
    got = bleu(cand, ref)
    p1 = 1.0
    p2 = 1.0
    p3 = 1.0  # all candidate n-grams appear in the reference
    p4 = 1.0
    assert got == pytest.approx(math.exp(-1.0) * (p1 * p2 * p3 * p4) ** 0.25, abs=1e-9)


# ---------------------------------------------------------------- GLEU


def test_gleu_identical():
    seq = tw("a b c d e")
    assert gleu(seq, seq) == 1.0


def test_gleu_half_reference_matches_bruteforce():
    cand_tokens = ["a", "b", "c", "d", "e"]
    ref_tokens = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]
    matched = sum(clipped_matches(cand_tokens, ref_tokens, n) for n in range(1, 5))
    tc = sum(max(0, len(cand_tokens) - n + 1) for n in range(1, 5))
    tr = sum(max(0, len(ref_tokens) - n + 1) for n in range(1, 5))
    expected = min(matched / tc, matched / tr)
    got = gleu(TokenSeq(cand_tokens), TokenSeq(ref_tokens))
    assert got == pytest.approx(expected, abs=1e-12)


def test_gleu_zero_overlap():
    assert gleu(tw("a b c"), tw("x y z")) == 0.0


# ---------------------------------------------------------------- chrF


def test_chrf_identical():
    assert chrf("same text here", "same text here") == 1.0


def test_chrf_disjoint():
    assert chrf("abc", "xyz") == 0.0


def test_chrf_hand_example():
    # orders 1..4 give F2 = 3/4, 2/3, 1/2, 0; orders 5,6 excluded -> 23/48
    assert chrf("abcd", "abce") == pytest.approx(23 / 48, abs=1e-9)


def test_chrf_empty():
    assert chrf("", "") == 0.0


def test_chrf_beta_weights_recall():
    # recall-heavy beta: a candidate missing content scores lower than one adding noise
    ref = "abcdefgh"
    missing = chrf("abcd", ref)
    adding = chrf("abcdefghxyzq", ref)
    assert missing < adding


# ---------------------------------------------------------------- TER


def test_ter_identical():
    seq = tw("a b c d")
    assert ter(seq, seq) == 0.0


def test_ter_single_substitution():
    assert ter(tw("a b x d"), tw("a b c d")) == 0.25


def test_ter_adjacent_transposition_uses_one_shift():
    ref = [f"t{i}" for i in range(10)]
    hyp = list(ref)
    hyp[4], hyp[5] = hyp[5], hyp[4]
    assert ter(TokenSeq(hyp), TokenSeq(ref)) == pytest.approx(0.1)


def test_ter_empty_reference_rejected():
    with pytest.raises(MetricError):
        ter(tw("a"), TokenSeq([]))


def test_ter_upper_bound_property():
    rng = random.Random(3)
    vocab = list("abcdef")
    for _ in range(30):
        ref = rng.choices(vocab, k=rng.randint(1, 8))
        hyp = rng.choices(vocab, k=rng.randint(0, 8))
        plain = _kernels.levenshtein_codes(*_kernels.tokens_to_ids(hyp, ref))
        assert ter(TokenSeq(hyp), TokenSeq(ref)) <= plain / len(ref) + 1e-12


# ---------------------------------------------------------------- edit distance


def test_edit_distance_examples():
    assert edit_distance("kitten", "sitting") == 3
    assert edit_distance("abc", "abc") == 0
    assert edit_distance("", "abc") == 3


def test_edit_distance_oracle_equivalence_both_paths():
    rng = random.Random(42)
    alphabet = "abcde"
    for _ in range(300):
        a = "".join(rng.choices(alphabet, k=rng.randint(0, 20)))
        b = "".join(rng.choices(alphabet, k=rng.randint(0, 20)))
        want = lev_oracle(a, b)
        ca, cb = _kernels.str_to_codes(a), _kernels.str_to_codes(b)
        assert edit_distance(a, b) == want
        assert _kernels._levenshtein_np(ca, cb) == want


def test_edit_distance_symmetry_and_triangle():
    rng = random.Random(7)
    alphabet = "abc"
    for _ in range(100):
        a, b, c = (
            "".join(rng.choices(alphabet, k=rng.randint(0, 12))) for _ in range(3)
        )
        assert edit_distance(a, b) == edit_distance(b, a)
        assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


def test_lcs_oracle_equivalence_both_paths():
    rng = random.Random(11)
    for _ in range(200):
        a = rng.choices("abcd", k=rng.randint(0, 15))
        b = rng.choices("abcd", k=rng.randint(0, 15))
        want = lcs_oracle(a, b)
        ia, ib = _kernels.tokens_to_ids(a, b)
        assert _kernels.lcs_codes(ia, ib) == want
        assert _kernels._lcs_np(ia, ib) == want


def test_unicode_edit_distance():
    assert edit_distance("café", "cafe") == 1
    assert edit_distance("\U0001f600", "") == 1


# ---------------------------------------------------------------- ROUGE


def test_rouge_n_examples():
    seq = tw("a b c")
    assert rouge_n(seq, seq, 1) == 1.0
    assert rouge_n(tw("a b"), tw("x y"), 1) == 0.0
    # P=1, R=2/3 -> F1=0.8
    assert rouge_n(tw("the cat"), tw("the dog cat"), 1) == pytest.approx(0.8, abs=1e-9)


def test_rouge_n_too_short():
    assert rouge_n(tw("a"), tw("a b"), 2) == 0.0


def test_rouge_l_examples():
    seq = tw("a b c")
    assert rouge_l(seq, seq) == 1.0
    assert rouge_l(tw("the cat"), tw("the dog cat")) == pytest.approx(0.8, abs=1e-9)
    assert rouge_l(tw("a b"), tw("x y")) == 0.0


# ---------------------------------------------------------------- METEOR


def test_meteor_identical_closed_form():
    for m in (1, 2, 5, 10):
        toks = [f"w{i}" for i in range(m)]
        seq = TokenSeq(toks)
        assert meteor(seq, seq) == pytest.approx(1 - 0.5 / m**3, abs=1e-12)


def test_meteor_zero_overlap():
    assert meteor(tw("a b"), tw("x y")) == 0.0


def test_meteor_reversed_candidate():
    toks = ["w1", "w2", "w3", "w4"]
    assert meteor(TokenSeq(list(reversed(toks))), TokenSeq(toks)) == pytest.approx(0.5)


# ---------------------------------------------------------------- orientation


def test_metric_spec_directions():
    assert metric_spec("ter").direction == LOWER_IS_SIMILAR
    assert metric_spec("edit_distance").direction == LOWER_IS_SIMILAR
    for kind in ("bleu", "gleu", "chrf", "rouge1", "rouge2", "rougeL", "meteor", "external"):
        assert metric_spec(kind).direction == HIGHER_IS_SIMILAR


def test_orient_examples():
    ed = metric_spec("edit_distance")
    assert orient(ed, 0.0).oriented == 1.0
    assert orient(ed, 3.0).oriented == 0.25
    assert orient(metric_spec("bleu"), 0.7).oriented == 0.7


def test_orient_rejects_nonfinite():
    with pytest.raises(MetricError):
        orient(metric_spec("bleu"), float("nan"))
    with pytest.raises(MetricError):
        orient(metric_spec("edit_distance"), float("inf"))
    with pytest.raises(MetricError):
        orient(metric_spec("ter"), -1.0)


def test_orient_monotone_for_distances():
    ed = metric_spec("ter")
    rng = random.Random(5)
    values = sorted(rng.uniform(0, 50) for _ in range(50))
    oriented = [orient(ed, v).oriented for v in values]
    for lo, hi in zip(oriented, oriented[1:]):
        assert lo >= hi
    assert all(0 < v <= 1 for v in oriented)


def test_orient_clamps_external():
    ext = metric_spec("external", external_name="bleurt")
    assert orient(ext, 1.7).oriented == 1.0
    assert orient(ext, -0.3).oriented == 0.0


def test_self_similarity_all_native_metrics():
    rng = random.Random(9)
    for _ in range(10):
        words = [rng.choice(["cat", "dog", "sun", "sky", "run"]) for _ in range(rng.randint(2, 9))]
        text = " ".join(words)
        for kind in ("bleu", "gleu", "chrf", "rouge1", "rouge2", "rougeL"):
            v = compute_similarity(metric_spec(kind), text, text)
            assert v.oriented == 1.0, kind
        assert compute_similarity(metric_spec("ter"), text, text).oriented == 1.0
        assert compute_similarity(metric_spec("edit_distance"), text, text).oriented == 1.0
        m = len(tokenize_words(text, True))
        got = compute_similarity(metric_spec("meteor"), text, text).oriented
        assert got == pytest.approx(1 - 0.5 / m**3, abs=1e-12)


def test_compute_similarity_empty_sets_warning():
    v = compute_similarity(metric_spec("bleu"), " ", "x")
    assert v.oriented == 0.0 and v.warning


# ---------------------------------------------------------------- external protocol


class _FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}
        self.text = str(payload)

    def json(self):
        return self._payload


def test_external_similarity_aligned(monkeypatch):
    def fake_post(url, json=None, timeout=None):
        assert url.endswith("/v1/similarity")
        assert json["metric"] == "bleurt"
        return _FakeResponse(payload={"scores": [0.5] * len(json["pairs"])})

    monkeypatch.setattr("gecscore.similarity.requests.post", fake_post)
    scores = external_similarity([("a", "b")] * 3, "bleurt", "http://svc")
    assert scores == [0.5, 0.5, 0.5]


def test_external_similarity_count_mismatch(monkeypatch):
    monkeypatch.setattr(
        "gecscore.similarity.requests.post",
        lambda url, json=None, timeout=None: _FakeResponse(payload={"scores": [0.5, 0.5]}),
    )
    with pytest.raises(ProtocolError, match="count mismatch"):
        external_similarity([("a", "b")] * 3, "bleurt", "http://svc")


def test_external_similarity_transport_error(monkeypatch):
    import requests as _requests

    def fake_post(url, json=None, timeout=None):
        raise _requests.ConnectionError("boom")

    monkeypatch.setattr("gecscore.similarity.requests.post", fake_post)
    with pytest.raises(TransportError):
        external_similarity([("a", "b")], "bleurt", "http://svc")


def test_external_similarity_service_error(monkeypatch):
    monkeypatch.setattr(
        "gecscore.similarity.requests.post",
        lambda url, json=None, timeout=None: _FakeResponse(status_code=500, payload={}),
    )
    with pytest.raises(ServiceError):
        external_similarity([("a", "b")], "bleurt", "http://svc")
