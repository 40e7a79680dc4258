import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synrank.corpus import Document, Sentence, Token


def make_sentence(*lemmas, pos=None, heads=None, deprels=None):
    tokens = []
    for i, lemma in enumerate(lemmas):
        tokens.append(
            Token(
                surface=lemma,
                lemma=lemma,
                pos=pos[i] if pos else None,
                head=heads[i] if heads else None,
                deprel=deprels[i] if deprels else None,
            )
        )
    return Sentence(tuple(tokens))


def make_doc(doc_id, source, *sentences):
    return Document(doc_id, source, tuple(sentences))


@pytest.fixture
def annotated_file(tmp_path):
    """Two documents, three sentences, full annotations."""
    content = (
        "# newdoc id = d1\n"
        "1\tEtt\tett\tDET\t2\tdet\n"
        "2\tHus\thus\tNOUN\t0\troot\n"
        "\n"
        "1\tHuset\thus\tNOUN\t2\tnsubj\n"
        "2\tstår\tstå\tVERB\t0\troot\n"
        "3\tdär\tdär\tADV\t2\tadvmod\n"
        "\n"
        "# newdoc id = d2\n"
        "1\tBetong\tbetong\tNOUN\t0\troot\n"
        "\n"
    )
    path = tmp_path / "corpus.tsv"
    path.write_text(content, encoding="utf-8")
    return path
