"""Synthetic corpus with planted synonym pairs for trend tests.

Each pair (target, synonym) shares dedicated context words and co-occurs
directly a few times, so every feature family carries signal; a slice of
filler terms also appears in pair contexts or co-occurs with targets,
supplying confusable negatives whose interference grows with the TOEFL
candidate count n.
"""

import random

from synrank.corpus import Document, Sentence, Token


def _noun(lemma, head=None, deprel=None):
    return Token(lemma, lemma, "NOUN", head, deprel)


def _ctx(lemma, head, deprel):
    # context words are tagged ADJ so the noun-ratio filter keeps them out
    # of the candidate pool
    return Token(lemma, lemma, "ADJ", head, deprel)


def context_sentence(c1, term, c2):
    return Sentence((_ctx(c1, 1, "amod"), _noun(term), _ctx(c2, 1, "nmod")))


def cooccur_sentence(a, b):
    return Sentence((_noun(a), _ctx("och", 0, "cc"), _noun(b, 0, "conj")))


def filler_sentence(nouns):
    tokens = [_noun(nouns[0])]
    tokens.extend(_noun(n, 0, "conj") for n in nouns[1:])
    return Sentence(tuple(tokens))


def _random_names(rng, count):
    """Uniform 6-letter names so no lexical feature separates the classes."""
    names = set()
    while len(names) < count:
        names.add("".join(rng.choice("abcdefghij") for _ in range(6)))
    return sorted(names)


def synthetic_corpus(n_pairs=40, n_fillers=1150, hard_per_pair=8, seed=1):
    """Returns (documents, ground truth). All documents are domain-source.

    ``hard_per_pair`` fillers per pair nearly replicate the synonym's
    profile: the same shared context (the synonym's own context is half
    diluted) and competitive direct co-occurrence counts. At large n most of
    them enter the sample and some overtake the synonym, which is what
    drives the accuracy decay."""
    rng = random.Random(seed)
    names = _random_names(rng, 2 * n_pairs + n_fillers)
    rng.shuffle(names)
    targets = names[:n_pairs]
    synonyms = names[n_pairs:2 * n_pairs]
    fillers = names[2 * n_pairs:]
    hard = [
        fillers[i * hard_per_pair:(i + 1) * hard_per_pair] for i in range(n_pairs)
    ]
    soft = fillers[n_pairs * hard_per_pair:]

    sentences = []
    for i in range(n_pairs):
        c1, c2 = f"ctxa{i:02d}", f"ctxb{i:02d}"
        alt1, alt2 = f"ctxc{i:02d}", f"ctxd{i:02d}"
        for _ in range(4):
            sentences.append(context_sentence(c1, targets[i], c2))
        # repetition counts are drawn from overlapping ranges: the synonym's
        # profile stochastically dominates the hard confusables' but no
        # count ratio separates the classes exactly
        for _ in range(rng.choice((2, 3))):
            sentences.append(context_sentence(c1, synonyms[i], c2))
        for _ in range(rng.choice((1, 2))):
            sentences.append(context_sentence(alt1, synonyms[i], alt2))
        for _ in range(rng.choice((2, 3))):
            sentences.append(cooccur_sentence(targets[i], synonyms[i]))
        for j, f in enumerate(hard[i]):
            # the first two confusables are strong across every feature at
            # once (full context repetition and top co-occurrence), the rest
            # draw middling counts
            ctx_reps = 4 if j < 2 else rng.choice((1, 2, 3))
            cooccur_reps = 3 if j < 2 else rng.choice((1, 2, 3))
            for _ in range(ctx_reps):
                sentences.append(context_sentence(c1, f, c2))
            for _ in range(cooccur_reps):
                sentences.append(cooccur_sentence(targets[i], f))
        # soft confusables: one-shot appearances in the pair's contexts
        for f in rng.sample(soft, 6):
            sentences.append(context_sentence(c1, f, c2))
        for f in rng.sample(soft, 3):
            sentences.append(cooccur_sentence(targets[i], f))
    for f in fillers:
        sentences.append(filler_sentence([f] + rng.sample(fillers, 3)))
    # synonyms also occur in generic noise sentences, keeping their n-gram
    # slot denominators comparable to the fillers'
    for s in synonyms:
        for _ in range(rng.choice((1, 2))):
            sentences.append(filler_sentence([s] + rng.sample(fillers, 3)))
    rng.shuffle(sentences)

    docs = [
        Document(f"synth-{i}", "domain", (sentence,)) for i, sentence in enumerate(sentences)
    ]
    truth = {targets[i]: {synonyms[i]} for i in range(n_pairs)}
    return docs, truth
