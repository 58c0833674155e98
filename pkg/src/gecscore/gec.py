"""Grammar-correction backends and the matched error injector.

Three backends implement the correction function g:
  * identity - returns inputs verbatim.
  * rules    - deterministic corrector driven by data/error_rules.txt; it is
               the exact inverse of `inject_errors`, which makes the whole
               detection pipeline testable offline.
  * http     - POST /v1/correct against an external correction service.

The rules corrector normalizes whitespace (runs collapse to single spaces)
before applying rule passes, so inputs that are already single-spaced and
error-free are returned unchanged.
"""

import random
import re
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import requests

from .corpus import ABBREVIATIONS
from .errors import GecError, ProtocolError, ServiceError, TransportError

DUPLICATE_WORD = "duplicate_word"
ARTICLE_AGREEMENT = "article_agreement"
VERB_3SG = "verb_3sg"
MISSPELLING = "misspelling"
CAPITALIZATION = "capitalization"
TERMINAL_PUNCT = "terminal_punct"

_MAX_PASSES = 10
_PRONOUNS = {"he", "she", "it"}
_VOWELS = "aeiouAEIOU"


@dataclass(frozen=True)
class GecBackendConfig:
    kind: str = "rules"
    endpoint: str | None = None
    timeout: float = 30.0
    batch_size: int = 16
    cache_enabled: bool = True
    max_in_flight: int = 4

    def __post_init__(self):
        if self.kind not in ("identity", "rules", "http"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if (self.kind == "http") != (self.endpoint is not None):
            raise ValueError("endpoint must be set for http backends and only for them")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass
class ErrorCatalog:
    rules: list[tuple[str, str, str, str]]
    misspellings: dict[str, str]            # wrong -> right
    misspelling_inverse: dict[str, list[str]]  # right -> wrongs, file order
    verbs_3sg: dict[str, str]               # base -> 3sg form
    verbs_inverse: dict[str, str]           # 3sg form -> base
    classes: list[str]                      # class application order
    verb_pattern: re.Pattern = field(repr=False, default=None)

    @property
    def class_names(self) -> list[str]:
        return list(self.classes)


_catalog: ErrorCatalog | None = None


def load_catalog() -> ErrorCatalog:
    global _catalog
    if _catalog is not None:
        return _catalog
    rules = []
    misspellings: dict[str, str] = {}
    inverse: dict[str, list[str]] = {}
    verbs: dict[str, str] = {}
    verbs_inv: dict[str, str] = {}
    classes: list[str] = []
    text = resources.files("gecscore").joinpath("data/error_rules.txt").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise GecError(f"malformed catalog row: {line!r}")
        rule_id, cls, a1, a2 = parts
        rules.append((rule_id, cls, a1, a2))
        if cls not in classes:
            classes.append(cls)
        if cls == MISSPELLING:
            misspellings[a1] = a2
            inverse.setdefault(a2, []).append(a1)
        elif cls == VERB_3SG:
            verbs[a1] = a2
            verbs_inv[a2] = a1
    bases = "|".join(sorted(verbs, key=len, reverse=True))
    pattern = re.compile(rf"\b([Hh]e|[Ss]he|[Ii]t)(\s+)({bases})\b")
    _catalog = ErrorCatalog(
        rules=rules,
        misspellings=misspellings,
        misspelling_inverse=inverse,
        verbs_3sg=verbs,
        verbs_inverse=verbs_inv,
        classes=classes,
        verb_pattern=pattern,
    )
    return _catalog


_WS_RE = re.compile(r"\s+")
_DUP_RE = re.compile(r"\b(\w+)(?:\s+\1\b)+", re.IGNORECASE)
_A_BEFORE_VOWEL = re.compile(rf"\b([Aa])\b(\s+)(?=[{_VOWELS}])")
_AN_BEFORE_CONSONANT = re.compile(rf"\b([Aa])n\b(\s+)(?=[^{_VOWELS}\W])")


def _match_case(replacement: str, original: str) -> str:
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def _split_core(token: str) -> tuple[str, str, str]:
    """Return (leading punct, alphanumeric core, trailing punct)."""
    i, j = 0, len(token)
    while i < j and not token[i].isalnum():
        i += 1
    while j > i and not token[j - 1].isalnum():
        j -= 1
    return token[:i], token[i:j], token[j:]


def _fix_misspellings(text: str, cat: ErrorCatalog) -> str:
    out = []
    for token in text.split(" "):
        pre, core, post = _split_core(token)
        fix = cat.misspellings.get(core.lower())
        if fix is not None:
            token = pre + _match_case(fix, core) + post
        out.append(token)
    return " ".join(out)


def _collapse_duplicates(text: str) -> str:
    return _DUP_RE.sub(lambda m: m.group(1), text)


def _fix_articles(text: str) -> str:
    text = _A_BEFORE_VOWEL.sub(lambda m: m.group(1) + "n" + m.group(2), text)
    return _AN_BEFORE_CONSONANT.sub(lambda m: m.group(1) + m.group(2), text)


def _fix_verbs(text: str, cat: ErrorCatalog) -> str:
    return cat.verb_pattern.sub(
        lambda m: m.group(1) + m.group(2) + cat.verbs_3sg[m.group(3)], text
    )


def _sentence_start_indices(tokens: list[str]) -> list[int]:
    """Indices of tokens that begin a sentence.

    Unlike corpus.segment_sentences, the boundary here does not require the
    following word to be uppercase: a lowercase word after a terminator is
    exactly the capitalization error this rule exists to repair.
    """
    starts = []
    at_start = True
    for i, tok in enumerate(tokens):
        if at_start:
            starts.append(i)
            at_start = False
        if tok[-1] in ".!?" and tok.lower() not in ABBREVIATIONS:
            at_start = True
    return starts


def _fix_capitalization(text: str) -> str:
    tokens = text.split(" ")
    for i in _sentence_start_indices(tokens):
        tok = tokens[i]
        for j, ch in enumerate(tok):
            if ch.isalpha():
                if ch.islower():
                    tokens[i] = tok[:j] + ch.upper() + tok[j + 1 :]
                break
    return " ".join(tokens)


def _fix_terminal(text: str) -> str:
    if text and text[-1] not in ".!?":
        return text + "."
    return text


def correct_text_rules(text: str) -> str:
    """Apply the catalog rules to fixpoint (at most 10 passes)."""
    cat = load_catalog()
    current = _WS_RE.sub(" ", text.strip())
    for _ in range(_MAX_PASSES):
        nxt = _fix_misspellings(current, cat)
        nxt = _collapse_duplicates(nxt)
        nxt = _fix_articles(nxt)
        nxt = _fix_verbs(nxt, cat)
        nxt = _fix_capitalization(nxt)
        nxt = _fix_terminal(nxt)
        if nxt == current:
            return current
        current = nxt
    raise GecError("non-converging rules")


def _http_correct_batch(batch: list[str], config: GecBackendConfig, indices: list[int]):
    url = config.endpoint.rstrip("/") + "/v1/correct"
    try:
        resp = requests.post(url, json={"texts": batch}, timeout=config.timeout)
    except requests.RequestException as exc:
        raise TransportError(f"correction request failed for batch {indices}: {exc}") from exc
    if resp.status_code != 200:
        raise ServiceError(
            f"correction service returned {resp.status_code} for batch {indices}: {resp.text[:200]}"
        )
    try:
        corrected = resp.json()["corrected"]
    except (ValueError, KeyError) as exc:
        raise ProtocolError(f"malformed correction response for batch {indices}") from exc
    if not isinstance(corrected, list) or len(corrected) != len(batch):
        raise ProtocolError(
            f"count mismatch for batch {indices}: sent {len(batch)}, got "
            f"{len(corrected) if isinstance(corrected, list) else 'non-list'}"
        )
    return corrected


def _correct_http(texts: list[str], config: GecBackendConfig) -> list[str]:
    if config.cache_enabled:
        unique = list(dict.fromkeys(texts))
    else:
        unique = list(texts)
    batches = [unique[i : i + config.batch_size] for i in range(0, len(unique), config.batch_size)]
    offsets = [i for i in range(0, len(unique), config.batch_size)]
    results: list[str | None] = [None] * len(unique)
    if len(batches) == 1:
        results = _http_correct_batch(batches[0], config, list(range(len(unique))))
    else:
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            futures = [
                pool.submit(
                    _http_correct_batch, b, config, list(range(off, off + len(b)))
                )
                for b, off in zip(batches, offsets)
            ]
            for fut, off in zip(futures, offsets):
                out = fut.result()
                results[off : off + len(out)] = out
    if config.cache_enabled:
        lookup = dict(zip(unique, results))
        return [lookup[t] for t in texts]
    return list(results)


def correct(texts: list[str], config: GecBackendConfig) -> list[str]:
    """Correct `texts` with the configured backend; output is order-aligned."""
    if config.kind == "identity":
        return list(texts)
    if config.kind == "rules":
        if config.cache_enabled:
            cache: dict[str, str] = {}
            out = []
            for t in texts:
                if t not in cache:
                    cache[t] = correct_text_rules(t)
                out.append(cache[t])
            return out
        return [correct_text_rules(t) for t in texts]
    return _correct_http(texts, config)


# --------------------------------------------------------------------------
# Error injection (the synthetic inverse of the rules backend)
# --------------------------------------------------------------------------


@dataclass
class InjectionResult:
    text: str
    requested: int
    injected: int

    @property
    def shortfall(self) -> int:
        return self.requested - self.injected


def derive_seed(base_seed: int, key: str) -> int:
    """Stable per-item seed derivation (used by attack/corpus builders)."""
    return (base_seed * 1_000_003 + zlib.crc32(key.encode("utf-8"))) & 0x7FFFFFFF


def _enumerate_sites(tokens: list[str], cat: ErrorCatalog) -> dict[str, list[int]]:
    sites: dict[str, list[int]] = {c: [] for c in cat.classes}
    starts = set(_sentence_start_indices(tokens))
    for i, tok in enumerate(tokens):
        pre, core, post = _split_core(tok)
        if not core:
            continue
        low = core.lower()
        if not pre and core.isalpha():
            sites[DUPLICATE_WORD].append(i)
        if low in cat.misspelling_inverse:
            sites[MISSPELLING].append(i)
        if (
            low in ("a", "an")
            and tok == core
            and i + 1 < len(tokens)
            and tokens[i + 1][:1].isalnum()
        ):
            sites[ARTICLE_AGREEMENT].append(i)
        if low in cat.verbs_inverse and i > 0 and tokens[i - 1].lower() in _PRONOUNS:
            sites[VERB_3SG].append(i)
        if i in starts and core[:1].isupper():
            sites[CAPITALIZATION].append(i)
    if tokens and tokens[-1].endswith("."):
        sites[TERMINAL_PUNCT].append(len(tokens) - 1)
    return sites


def inject_errors_detailed(
    text: str, k: int, seed: int, classes=None
) -> InjectionResult:
    """Inject up to k seeded catalog errors; each token hosts at most one.

    `classes` optionally restricts the draw to a subset of catalog classes.
    Sites are enumerated once on the input text, the class is drawn uniformly
    among classes with remaining sites, then a site of that class uniformly.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    cat = load_catalog()
    if classes is None:
        class_order = list(cat.classes)
    else:
        unknown = [c for c in classes if c not in cat.classes]
        if unknown:
            raise ValueError(f"unknown catalog classes: {unknown}")
        class_order = [c for c in cat.classes if c in set(classes)]
    tokens = text.split()
    sites = {c: s for c, s in _enumerate_sites(tokens, cat).items() if c in class_order}
    rng = random.Random(seed)
    chosen: list[tuple[int, str, str | None]] = []  # (token index, class, payload)
    used: set[int] = set()
    for _ in range(k):
        available = [c for c in class_order if sites.get(c)]
        if not available:
            break
        cls = available[rng.randrange(len(available))]
        pool = sites[cls]
        idx = pool[rng.randrange(len(pool))]
        payload = None
        if cls == MISSPELLING:
            core = _split_core(tokens[idx])[1]
            wrongs = cat.misspelling_inverse[core.lower()]
            payload = wrongs[rng.randrange(len(wrongs))]
        chosen.append((idx, cls, payload))
        used.add(idx)
        for pool in sites.values():
            if idx in pool:
                pool.remove(idx)
    for idx, cls, payload in sorted(chosen, key=lambda c: c[0], reverse=True):
        tok = tokens[idx]
        pre, core, post = _split_core(tok)
        if cls == DUPLICATE_WORD:
            tokens[idx] = core + " " + tok
        elif cls == MISSPELLING:
            tokens[idx] = pre + _match_case(payload, core) + post
        elif cls == ARTICLE_AGREEMENT:
            flipped = "an" if core.lower() == "a" else "a"
            tokens[idx] = pre + _match_case(flipped, core) + post
        elif cls == VERB_3SG:
            base = cat.verbs_inverse[core.lower()]
            tokens[idx] = pre + _match_case(base, core) + post
        elif cls == CAPITALIZATION:
            for j, ch in enumerate(tok):
                if ch.isalpha():
                    tokens[idx] = tok[:j] + ch.lower() + tok[j + 1 :]
                    break
        elif cls == TERMINAL_PUNCT:
            tokens[idx] = tok[:-1]
            if not tokens[idx]:
                tokens.pop(idx)
    return InjectionResult(text=" ".join(tokens), requested=k, injected=len(chosen))


def inject_errors(text: str, k: int, seed: int, classes=None) -> str:
    """See inject_errors_detailed; returns the transformed text only."""
    return inject_errors_detailed(text, k, seed, classes).text
