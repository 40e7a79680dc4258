"""Corpus reading, normalization, sentence windows, and the crawl-budget rule.

Two input formats are supported:

* annotated TSV: ``# newdoc id = <id>`` comment lines start a document,
  token rows are ``INDEX FORM LEMMA POS HEAD DEPREL`` (tab-separated,
  HEAD 1-based with 0 = root, ``_`` = missing), blank line ends a sentence;
* plain text: one document per blank-line-separated block, sentences split
  on ``.?!``, tokens on non-word characters. POS and dependency fields are
  unavailable in this mode.

Lemmas are lowercased on ingestion. A user-supplied term list can join
adjacent lemmas into single underscore-joined multiword terms so that all
downstream counting treats phrases as atomic terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DuplicateDocId, EmptyCorpus, ParseError

SOURCES = ("domain", "background", "web")

_PLAIN_TOKEN = re.compile(r"\w+", re.UNICODE)
_PLAIN_SENT_SPLIT = re.compile(r"[.?!]+")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str | None = None
    head: int | None = None  # 0-based index into the sentence, None = root
    deprel: str | None = None

    def __post_init__(self):
        if not self.lemma or any(c.isspace() for c in self.lemma):
            raise ValueError(f"lemma must be non-empty and whitespace-free: {self.lemma!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens):
            if tok.head is None:
                continue
            if not 0 <= tok.head < n:
                raise ValueError(f"token {i}: head {tok.head} out of range 0..{n - 1}")
            if tok.head == i:
                raise ValueError(f"token {i}: head is a self-loop")
        self._check_forest()

    def _check_forest(self):
        # follow head links from every token; a cycle revisits a node
        for start in range(len(self.tokens)):
            seen = set()
            i = start
            while i is not None:
                if i in seen:
                    raise ValueError(f"dependency cycle through token {start}")
                seen.add(i)
                i = self.tokens[i].head

    def __len__(self):
        return len(self.tokens)

    @property
    def lemmas(self) -> tuple[str, ...]:
        return tuple(tok.lemma for tok in self.tokens)


@dataclass(frozen=True)
class Document:
    id: str
    source: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}, expected one of {SOURCES}")


def windows(sentence: Sentence | Iterable[str], width: int = 16) -> Iterator[tuple[str, ...]]:
    """Yield one window per start position, truncated at the sentence end.

    A sentence of L tokens yields exactly L windows; no window crosses a
    sentence boundary.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    terms = sentence.lemmas if isinstance(sentence, Sentence) else tuple(sentence)
    for start in range(len(terms)):
        yield terms[start:start + width]


def crawl_budget(result_count: int) -> int:
    """Number of websites to crawl for a term with the given result count."""
    if result_count < 0:
        raise ValueError("result_count must be >= 0")
    if result_count <= 10_000:
        return 2500
    if result_count < 100_000:
        return 1000
    return 500


def read_term_list(path) -> list[str]:
    """Read one term per line; internal spaces become underscores."""
    terms = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            term = line.strip().lower()
            if not term or term.startswith("#"):
                continue
            terms.append("_".join(term.split()))
    return terms


class PhraseJoiner:
    """Greedy longest-match joining of adjacent lemmas into multiword terms."""

    def __init__(self, terms: Iterable[str]):
        # index multiword terms by their first lemma, longest first
        self._by_first: dict[str, list[tuple[str, ...]]] = {}
        for term in terms:
            parts = tuple(term.split("_"))
            if len(parts) < 2:
                continue
            self._by_first.setdefault(parts[0], []).append(parts)
        for options in self._by_first.values():
            options.sort(key=len, reverse=True)

    def __call__(self, sentence: Sentence) -> Sentence:
        if not self._by_first:
            return sentence
        tokens = sentence.tokens
        lemmas = [t.lemma for t in tokens]
        spans = []  # (start, end) of each output token in the input
        i = 0
        while i < len(tokens):
            matched = None
            for parts in self._by_first.get(lemmas[i], ()):
                if tuple(lemmas[i:i + len(parts)]) == parts:
                    matched = len(parts)
                    break
            spans.append((i, i + (matched or 1)))
            i += matched or 1
        if all(end - start == 1 for start, end in spans):
            return sentence
        return Sentence(tuple(self._merge_span(tokens, spans, k) for k in range(len(spans))))

    @staticmethod
    def _merge_span(tokens, spans, k) -> Token:
        start, end = spans[k]
        group = tokens[start:end]
        if len(group) == 1:
            tok = group[0]
            head = _remap_head(tok.head, spans)
            if head == k:  # head fell inside this token's own span
                head = None
            return Token(tok.surface, tok.lemma, tok.pos, head, tok.deprel)
        # the phrase head is the first token whose head lies outside the span
        head_tok = next(
            (t for t in group if t.head is None or not start <= t.head < end), group[0]
        )
        pos = next((t.pos for t in group if t.pos == "NOUN"), group[0].pos)
        head = _remap_head(head_tok.head, spans)
        if head == k:
            head = None
        return Token(
            surface=" ".join(t.surface for t in group),
            lemma="_".join(t.lemma for t in group),
            pos=pos,
            head=head,
            deprel=head_tok.deprel,
        )


def _remap_head(head, spans):
    if head is None:
        return None
    for k, (start, end) in enumerate(spans):
        if start <= head < end:
            return k
    return None


def read_annotated_corpus(path, source: str, phrase_joiner: PhraseJoiner | None = None) -> Iterator[Document]:
    """Yield Documents from an annotated TSV file, in file order.

    Raises ParseError (with line number) on malformed rows, DuplicateDocId
    on a repeated ``# newdoc`` id, and EmptyCorpus when the file holds no
    documents.
    """
    yielded = 0
    seen_ids = set()
    doc_id = None
    sentences: list[Sentence] = []
    rows: list[tuple[int, list[str]]] = []  # (line number, fields)

    def flush_sentence(lineno):
        nonlocal rows
        if not rows:
            return
        if doc_id is None:
            raise ParseError("token row before any '# newdoc id =' line", rows[0][0], path)
        tokens = []
        n = len(rows)
        for lno, fields in rows:
            idx, form, lemma, pos, head, deprel = fields
            try:
                head_i = int(head)
            except ValueError:
                raise ParseError(f"HEAD is not an integer: {head!r}", lno, path) from None
            if head_i < 0 or head_i > n:
                raise ParseError(f"HEAD {head_i} out of range for a {n}-token sentence", lno, path)
            tokens.append(
                Token(
                    surface=form,
                    lemma=lemma.lower(),
                    pos=None if pos == "_" else pos,
                    head=None if head_i == 0 else head_i - 1,
                    deprel=None if deprel == "_" else deprel,
                )
            )
        try:
            sentence = Sentence(tuple(tokens))
        except ValueError as exc:
            raise ParseError(str(exc), rows[0][0], path) from None
        if phrase_joiner is not None:
            sentence = phrase_joiner(sentence)
        sentences.append(sentence)
        rows = []

    with open(path, encoding="utf-8") as f:
        lineno = 0
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if line.startswith("# newdoc id ="):
                flush_sentence(lineno)
                if doc_id is not None:
                    yield Document(doc_id, source, tuple(sentences))
                    yielded += 1
                    sentences = []
                doc_id = line.split("=", 1)[1].strip()
                if not doc_id:
                    raise ParseError("empty document id", lineno, path)
                if doc_id in seen_ids:
                    raise DuplicateDocId(f"{path}:{lineno}: duplicate document id {doc_id!r}")
                seen_ids.add(doc_id)
            elif line.startswith("#"):
                continue
            elif not line.strip():
                flush_sentence(lineno)
            else:
                fields = line.split("\t")
                if len(fields) != 6:
                    raise ParseError(f"expected 6 tab-separated fields, got {len(fields)}", lineno, path)
                rows.append((lineno, fields))
        flush_sentence(lineno + 1)
    if doc_id is not None:
        yield Document(doc_id, source, tuple(sentences))
        yielded += 1
    if yielded == 0:
        raise EmptyCorpus(f"{path}: no documents")


def write_annotated_corpus(docs: Iterable[Document], path) -> None:
    """Write documents in the annotated TSV format (inverse of the reader)."""
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            f.write(f"# newdoc id = {doc.id}\n")
            for sentence in doc.sentences:
                for i, tok in enumerate(sentence.tokens, start=1):
                    head = 0 if tok.head is None else tok.head + 1
                    f.write(
                        "\t".join(
                            (str(i), tok.surface, tok.lemma, tok.pos or "_", str(head), tok.deprel or "_")
                        )
                        + "\n"
                    )
                f.write("\n")


def read_plain_corpus(path, source: str, phrase_joiner: PhraseJoiner | None = None) -> Iterator[Document]:
    """Yield Documents from plain UTF-8 text, one per blank-line block.

    Tokens are lowercased word characters; POS, head, and deprel are unset,
    so POS- and dependency-derived features are unavailable downstream.
    """
    with open(path, encoding="utf-8") as f:
        text = f.read()
    yielded = 0
    for block_no, block in enumerate(p for p in re.split(r"\n\s*\n", text) if p.strip()):
        sentences = []
        for span in _PLAIN_SENT_SPLIT.split(block):
            toks = [m.group(0).lower() for m in _PLAIN_TOKEN.finditer(span)]
            if not toks:
                continue
            sentence = Sentence(tuple(Token(surface=t, lemma=t) for t in toks))
            if phrase_joiner is not None:
                sentence = phrase_joiner(sentence)
            sentences.append(sentence)
        if not sentences:
            continue
        yield Document(f"{source}-{block_no}", source, tuple(sentences))
        yielded += 1
    if yielded == 0:
        raise EmptyCorpus(f"{path}: no documents")
