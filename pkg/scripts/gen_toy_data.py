#!/usr/bin/env python3
"""Regenerate the bundled toy fixture under data/toy/ (deterministic).

The corpus is 50 annotated sentences of template Swedish-ish construction
text in which each ground-truth synonym pair occurs in shared sentence
templates, so co-occurrence features carry real signal. Embeddings are the
random-indexing context vectors trained on the same corpus.
"""

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from synrank.candidates import save_ground_truth
from synrank.corpus import Document, PhraseJoiner, Sentence, Token, read_term_list
from synrank.semantics import EmbeddingTable, save_embeddings, train_random_index
from synrank.corpus import write_annotated_corpus

OUT = Path(__file__).resolve().parents[1] / "data" / "toy"

GROUND_TRUTH = {
    "apparatskåp": {"elskåp"},
    "väg": {"gata"},
    "bro": {"viadukt"},
    "hus": {"byggnad"},
    "betongplatta": {"bottenplatta"},
    "räcke": {"barriär"},
}

# nouns that fill the object slot of the installation/inspection templates
PAIRED_TERMS = sorted({t for t in GROUND_TRUTH} | {s for v in GROUND_TRUTH.values() for s in v})
FILLER_NOUNS = [
    "tunnel", "kabel", "vägg", "tak", "golv", "dörr", "pelare", "balk",
    "mur", "ramp", "spår", "ledning", "grund", "skåp", "apparat", "platta",
]
BACKGROUND_NOUNS = ["artikel", "historia", "musik", "film", "bok", "stad", "språk", "ö"]


def noun(lemma, head, deprel):
    return Token(lemma, lemma, "NOUN", head, deprel)


def install_sentence(obj, place, verb="installera", extra=None):
    """montör <verb> ett <obj> i <place> [vid <extra>]"""
    tokens = [
        noun("montör", 1, "nsubj"),
        Token(verb, verb, "VERB", None, None),
        Token("ett", "ett", "DET", 3, "det"),
        noun(obj, 1, "obj"),
        Token("i", "i", "ADP", 5, "case"),
        noun(place, 1, "obl"),
    ]
    if extra:
        tokens.append(Token("vid", "vid", "ADP", 7, "case"))
        tokens.append(noun(extra, 1, "obl"))
    return Sentence(tuple(tokens))


def inspect_sentence(subj, obj):
    """<subj> kräver en <obj> av armerad betong"""
    return Sentence(
        (
            noun(subj, 1, "nsubj"),
            Token("kräva", "kräva", "VERB", None, None),
            Token("en", "en", "DET", 3, "det"),
            noun(obj, 1, "obj"),
            Token("av", "av", "ADP", 6, "case"),
            Token("armerad", "armerad", "ADJ", 6, "amod"),
            noun("betong", 1, "obl"),
        )
    )


def background_sentence(rng):
    a, b = rng.sample(BACKGROUND_NOUNS, 2)
    return Sentence(
        (
            noun(a, 1, "nsubj"),
            Token("beskriva", "beskriva", "VERB", None, None),
            Token("en", "en", "DET", 3, "det"),
            noun(b, 1, "obj"),
        )
    )


def main():
    rng = random.Random(20240501)
    OUT.mkdir(parents=True, exist_ok=True)

    domain_sents = []
    # each pair member appears in the same three templates with shared slots
    for target in sorted(GROUND_TRUTH):
        pair_place = rng.choice(FILLER_NOUNS[:8])
        for term in sorted({target} | GROUND_TRUTH[target]):
            domain_sents.append(install_sentence(term, pair_place))
            domain_sents.append(inspect_sentence(rng.choice(FILLER_NOUNS[:8]), term))
            domain_sents.append(install_sentence(term, rng.choice(FILLER_NOUNS[8:]), verb="besiktiga"))
    # filler sentences so non-synonym candidates exist and co-occur randomly
    while len(domain_sents) < 42:
        obj, place = rng.sample(FILLER_NOUNS, 2)
        domain_sents.append(install_sentence(obj, place, extra=rng.choice(FILLER_NOUNS)))
    rng.shuffle(domain_sents)

    background_sents = [background_sentence(rng) for _ in range(8)]

    domain_docs = [
        Document(f"toy-domain-{i}", "domain", (s,)) for i, s in enumerate(domain_sents)
    ]
    background_docs = [
        Document(f"toy-background-{i}", "background", (s,)) for i, s in enumerate(background_sents)
    ]

    write_annotated_corpus(domain_docs, OUT / "corpus.domain.tsv")
    write_annotated_corpus(background_docs, OUT / "corpus.background.tsv")

    (OUT / "terms.txt").write_text("armerad betong\n", encoding="utf-8")
    save_ground_truth(GROUND_TRUTH, OUT / "ground_truth.tsv", header="toy ground truth")

    joiner = PhraseJoiner(read_term_list(OUT / "terms.txt"))
    joined_docs = [
        Document(d.id, d.source, tuple(joiner(s) for s in d.sentences))
        for d in domain_docs + background_docs
    ]
    ri = train_random_index(joined_docs, dimension=24, seeds_per_vector=4, rng_seed=7)
    table = EmbeddingTable(24, dict(sorted(ri.context_vectors.items())))
    save_embeddings(table, OUT / "embeddings.txt")

    config = {
        "corpora": {
            "domain": ["corpus.domain.tsv"],
            "background": ["corpus.background.tsv"],
        },
        "term_list": "terms.txt",
        "ground_truth": "ground_truth.tsv",
        "embeddings": "embeddings.txt",
        "window_width": 16,
        "filter": {"min_tf": 3, "min_domain_ratio": 1.0, "min_noun_ratio": 0.5},
        "ri": {"dimension": 64, "seeds_per_vector": 4},
        "logreg": {"l2": 1.0},
        "lambdamart": {"n_trees": 15, "max_leaves": 8, "min_samples_leaf": 3},
        "folds": 3,
        "seed": 42,
        "train_negatives": 30,
        "eval_negatives": 30,
        "toefl_n": [3, 10],
        "toefl_repeats": 2,
        "recall_n": [5, 10],
        "methods": ["pmi", "embeddingsim", "linsim", "logreg", "lambdamart"],
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")

    total = len(domain_sents) + len(background_sents)
    print(f"wrote {total} sentences ({len(domain_sents)} domain / {len(background_sents)} background) to {OUT}")


if __name__ == "__main__":
    main()
