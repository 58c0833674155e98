"""Deterministic synthetic corpora for the test and acceptance suites.

The generator emits text that is a fixpoint of the rules corrector: articles
match the vowel-letter rule, pronoun subjects take the catalog's 3sg verb
forms, vocabulary avoids every wrong-form in the misspelling dictionary, and
each sentence is capitalized and terminated.  Most sentences contain at least
one injectable site for the misspelling/article/verb classes, which the
length-ablation build relies on.
"""

import random

from gecscore import corpus, gec
from gecscore.corpus import HUMAN, LLM, TextSample

# Adjectives and nouns drawn from the correction dictionary's right-hand sides,
# so misspelling sites are plentiful.  Adjectives are never placed directly
# after an article (several start with vowels).
ADJ = [
    "different", "beautiful", "necessary", "familiar", "similar", "peculiar",
    "brilliant", "important", "persistent", "relevant", "practical", "visible",
    "successful", "mysterious", "miniature", "excellent", "independent", "noticeable",
]
MISSPELLABLE_NOUN = [
    "government", "language", "library", "business", "restaurant", "calendar",
    "colleague", "committee", "environment", "equipment", "experience", "grammar",
    "knowledge", "license", "maintenance", "medicine", "neighbor", "occasion",
    "opportunity", "performance", "possession", "professor", "promise", "quarter",
    "schedule", "secretary", "speech", "stomach", "strength", "surprise",
    "temperature", "vegetable", "vehicle", "article", "address", "amount",
    "appearance", "career", "ceiling", "commission", "comparison", "criticism",
    "curriculum", "decision", "description", "development", "difficulty", "field",
]
# Consonant-initial nouns for "a X"; vowel-initial nouns for "an X".
CONS_NOUN = [
    "teacher", "morning", "garden", "letter", "window", "picture", "village",
    "market", "winter", "harbor", "kitchen", "valley", "station", "journal",
    "bridge", "forest", "meadow", "cottage", "museum", "theater",
]
VOWEL_NOUN = [
    "afternoon", "evening", "orange", "umbrella", "engineer", "artist", "apple",
    "answer", "idea", "office", "island", "oven", "anchor", "orchard", "eagle",
    "insect", "arrow", "emblem", "acorn", "uncle",
]
VERB_3SG = [
    "walks", "talks", "wants", "needs", "seems", "looks", "moves", "plays",
    "turns", "starts", "helps", "calls", "asks", "works", "believes", "carries",
    "watches", "follows", "creates", "opens", "closes", "remembers", "loves",
    "considers", "appears", "serves", "enjoys", "expects", "reaches", "suggests",
    "raises", "requires", "reports", "decides", "returns", "explains", "hopes",
    "develops", "drives", "visits", "describes", "climbs",
]
ADV = [
    "quietly", "slowly", "carefully", "eagerly", "often", "rarely", "gently",
    "quickly", "calmly", "proudly",
]
PRONOUN = ["He", "She", "It"]


def _sentence(rng: random.Random) -> str:
    kind = rng.randrange(6)
    pro = rng.choice(PRONOUN)
    verb = rng.choice(VERB_3SG)
    adj = rng.choice(ADJ)
    mnoun = rng.choice(MISSPELLABLE_NOUN)
    cnoun = rng.choice(CONS_NOUN)
    vnoun = rng.choice(VOWEL_NOUN)
    noun = rng.choice(CONS_NOUN + VOWEL_NOUN)
    adv = rng.choice(ADV)
    if kind == 0:
        return f"{pro} {verb} the {adj} {noun} near the {cnoun}."
    if kind == 1:
        return f"The {cnoun} {verb} a {rng.choice(CONS_NOUN)} during the {mnoun}."
    if kind == 2:
        return f"{pro} {verb} an {vnoun} behind the {mnoun}."
    if kind == 3:
        return f"The {adj} {noun} seems rather {rng.choice(ADJ)} in the {mnoun}."
    if kind == 4:
        return f"{pro} {verb} {adv} toward a {cnoun} with the {mnoun}."
    return f"Every {mnoun} holds a {rng.choice(CONS_NOUN)} for the {adj} {noun}."


def clean_text(seed: int, min_words: int = 300) -> str:
    """A deterministic clean text with at least `min_words` whitespace tokens."""
    rng = random.Random(seed)
    sentences: list[str] = []
    words = 0
    while words < min_words:
        s = _sentence(rng)
        sentences.append(s)
        words += len(s.split())
    return " ".join(sentences)


def build_detection_corpus(
    n_human: int = 200,
    n_llm: int = 200,
    seed: int = 0,
    min_words: int = 300,
    k_human=(3, 8),
    k_llm=(0, 1),
) -> list[TextSample]:
    """The synthetic hypothesis corpus: noisy "human" texts vs near-clean "llm" texts."""
    samples: list[TextSample] = []
    rng = random.Random(seed)
    for i in range(n_human):
        text = clean_text(gec.derive_seed(seed, f"h{i}"), min_words)
        k = rng.randint(*k_human)
        noisy = gec.inject_errors(text, k, gec.derive_seed(seed, f"hk{i}"))
        samples.append(TextSample(id=f"human-{i:04d}", text=noisy, label=HUMAN))
    for i in range(n_llm):
        text = clean_text(gec.derive_seed(seed, f"l{i}"), min_words)
        k = rng.randint(*k_llm)
        noisy = gec.inject_errors(text, k, gec.derive_seed(seed, f"lk{i}")) if k else text
        samples.append(TextSample(id=f"llm-{i:04d}", text=noisy, label=LLM))
    return samples


def build_ablation_corpus(
    n_per_class: int = 40,
    seed: int = 0,
    min_words: int = 320,
) -> list[TextSample]:
    """Length-ablation corpus with contrasting error profiles.

    Human texts carry one small error per sentence (misspelling/article/verb),
    so every sentence window is noisy at a roughly constant density.  LLM texts
    carry one or two duplicated-word errors per whole text: large character
    edits, sparse in any window.
    """
    samples: list[TextSample] = []
    rng = random.Random(seed)
    dense_classes = [gec.MISSPELLING, gec.ARTICLE_AGREEMENT, gec.VERB_3SG]
    for i in range(n_per_class):
        text = clean_text(gec.derive_seed(seed, f"ah{i}"), min_words)
        noisy_sentences = []
        for j, sentence in enumerate(corpus.segment_sentences(text)):
            noisy_sentences.append(
                gec.inject_errors(
                    sentence, 1, gec.derive_seed(seed, f"ah{i}.{j}"), classes=dense_classes
                )
            )
        samples.append(TextSample(id=f"human-{i:04d}", text=" ".join(noisy_sentences), label=HUMAN))
    for i in range(n_per_class):
        text = clean_text(gec.derive_seed(seed, f"al{i}"), min_words)
        k = rng.randint(1, 2)
        noisy = gec.inject_errors(
            text, k, gec.derive_seed(seed, f"alk{i}"), classes=[gec.DUPLICATE_WORD]
        )
        samples.append(TextSample(id=f"llm-{i:04d}", text=noisy, label=LLM))
    return samples
