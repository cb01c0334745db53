"""Turn raw dated statement texts into a TF-IDF weighted document-term matrix.

The preprocessing pipeline runs in a fixed order: strip the voting section,
lowercase, tokenize on letter runs, drop stopwords and member names, then
lemmatize with an ordered suffix-rule table.  All steps are deterministic so
the same corpus and configuration always produce the same matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "RawDocument",
    "PreprocessConfig",
    "Vocabulary",
    "CountMatrix",
    "WeightedDocTermMatrix",
    "EmptyDocumentError",
    "default_config",
    "preprocess",
    "build_matrix",
    "tfidf",
]

_TOKEN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


class EmptyDocumentError(ValueError):
    """Raised when a document has no tokens left after preprocessing."""


@dataclass(frozen=True)
class RawDocument:
    id: str
    date: str  # ISO YYYY-MM-DD
    text: str


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset
    names: frozenset
    voting_markers: tuple
    lemma_rules: tuple  # ordered (suffix, replacement) pairs
    lemma_exceptions: dict = field(default_factory=dict)

    def __post_init__(self):
        for w in self.stopwords | self.names:
            if w != w.lower():
                raise ValueError(f"non-lowercase entry in config: {w!r}")


def _read_lines(name):
    text = resources.files("fomcurve.data").joinpath(name).read_text("utf-8")
    return [ln for ln in text.splitlines() if ln.strip()]


def load_wordlist(path):
    """Read a line-oriented UTF-8 word list, ignoring blank lines."""
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip()]


def parse_lemma_rules(lines):
    rules = []
    for ln in lines:
        parts = ln.split("\t", 1)
        suffix = parts[0]
        repl = parts[1] if len(parts) > 1 else ""
        rules.append((suffix, repl))
    return tuple(rules)


def parse_lemma_exceptions(lines):
    out = {}
    for ln in lines:
        word, _, lemma = ln.partition("\t")
        out[word] = lemma
    return out


def default_config(stopwords_path=None, names_path=None, markers_path=None,
                   lemma_rules_path=None, lemma_exceptions_path=None):
    """Build a PreprocessConfig from the bundled tables, with per-file overrides."""
    stop = load_wordlist(stopwords_path) if stopwords_path else _read_lines("stopwords.txt")
    names = load_wordlist(names_path) if names_path else _read_lines("names.txt")
    markers = load_wordlist(markers_path) if markers_path else _read_lines("markers.txt")
    rule_lines = (load_wordlist(lemma_rules_path) if lemma_rules_path
                  else _read_lines("lemma_rules.txt"))
    exc_lines = (load_wordlist(lemma_exceptions_path) if lemma_exceptions_path
                 else _read_lines("lemma_exceptions.txt"))
    return PreprocessConfig(
        stopwords=frozenset(stop),
        names=frozenset(names),
        voting_markers=tuple(m.lower() for m in markers),
        lemma_rules=parse_lemma_rules(rule_lines),
        lemma_exceptions=parse_lemma_exceptions(exc_lines),
    )


def lemmatize(token, cfg):
    """Apply the exception table, then the first matching suffix rule."""
    if token in cfg.lemma_exceptions:
        return cfg.lemma_exceptions[token]
    for suffix, repl in cfg.lemma_rules:
        if token.endswith(suffix) and len(token) - len(suffix) >= 2:
            return token[: len(token) - len(suffix)] + repl
    return token


def strip_voting_section(text, markers):
    """Drop everything at and after the earliest marker-phrase match."""
    lowered = text.lower()
    cut = len(text)
    for marker in markers:
        pos = lowered.find(marker)
        if pos != -1 and pos < cut:
            cut = pos
    return text[:cut]


def preprocess(doc, cfg):
    """Run the full pipeline on one document; returns the ordered token list.

    Raises EmptyDocumentError if nothing survives, naming the document.
    """
    if not doc.text:
        raise EmptyDocumentError(f"document {doc.id!r}: empty text")
    body = strip_voting_section(doc.text, cfg.voting_markers)
    tokens = _TOKEN_RE.findall(body.lower())
    tokens = [t for t in tokens if t not in cfg.stopwords and t not in cfg.names]
    tokens = [lemmatize(t, cfg) for t in tokens]
    if not tokens:
        raise EmptyDocumentError(f"document {doc.id!r}: no tokens after preprocessing")
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple  # lexicographically sorted, unique

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary must be sorted and duplicate-free")

    @property
    def index(self):
        return {t: j for j, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class CountMatrix:
    counts: np.ndarray  # (n_docs, n_terms) int
    vocabulary: Vocabulary
    doc_index: tuple  # (id, date) per row

    def __post_init__(self):
        c = self.counts
        if c.ndim != 2 or (c < 0).any():
            raise ValueError("counts must be a non-negative 2-d array")
        if not (c.sum(axis=1) > 0).all():
            raise ValueError("every document must contain at least one term")
        if not (c.sum(axis=0) > 0).all():
            raise ValueError("every term must appear in at least one document")

    @property
    def n_docs(self):
        return self.counts.shape[0]

    @property
    def n_terms(self):
        return self.counts.shape[1]


@dataclass(frozen=True)
class WeightedDocTermMatrix:
    weights: np.ndarray  # (n_docs, n_terms) float
    vocabulary: Vocabulary
    doc_index: tuple

    def __post_init__(self):
        w = self.weights
        if not np.isfinite(w).all() or (w < 0).any():
            raise ValueError("weights must be finite and non-negative")


def build_matrix(corpus, doc_index=None):
    """Count term occurrences per document.

    corpus: list of token lists, one per document.  The vocabulary contains
    exactly the terms that appear somewhere, sorted lexicographically.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    for i, toks in enumerate(corpus):
        if not toks:
            raise ValueError(f"document at position {i} has no tokens")
    vocab = Vocabulary(tuple(sorted({t for toks in corpus for t in toks})))
    index = vocab.index
    counts = np.zeros((len(corpus), len(vocab)), dtype=np.int64)
    for i, toks in enumerate(corpus):
        for t in toks:
            counts[i, index[t]] += 1
    if doc_index is None:
        doc_index = tuple((str(i), "") for i in range(len(corpus)))
    return CountMatrix(counts=counts, vocabulary=vocab, doc_index=tuple(doc_index))


def tfidf(cm, min_df=0):
    """TF-IDF weights: (1 + ln c) * (ln(D/df) + 1) where c > 0, else 0.

    min_df optionally drops terms appearing in fewer than min_df documents.
    """
    counts = cm.counts
    if min_df > 1:
        keep = (counts > 0).sum(axis=0) >= min_df
        counts = counts[:, keep]
        vocab = Vocabulary(tuple(t for t, k in zip(cm.vocabulary.terms, keep) if k))
        cm = CountMatrix(counts=counts, vocabulary=vocab, doc_index=cm.doc_index)
        counts = cm.counts
    D = counts.shape[0]
    df = (counts > 0).sum(axis=0)
    idf = np.log(D / df) + 1.0
    weights = np.zeros(counts.shape, dtype=np.float64)
    pos = counts > 0
    weights[pos] = (1.0 + np.log(counts[pos])) * np.broadcast_to(idf, counts.shape)[pos]
    return WeightedDocTermMatrix(weights=weights, vocabulary=cm.vocabulary,
                                 doc_index=cm.doc_index)
