"""Walk through the text side of the pipeline on the bundled sample corpus.

Reads the dated statements, builds the TF-IDF matrix, factorizes it with
NMF, and sweeps the topic count with the coherence score.  Run from the
repository root:

    python3 demos/topic_decomposition.py
"""

import pathlib

import numpy as np

from fomcurve import coherence, nmf, textprep

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main():
    cfg = textprep.default_config()
    docs = []
    for path in sorted((FIXTURES / "statements").glob("*.txt")):
        docs.append(textprep.RawDocument(id=path.stem, date=path.stem,
                                         text=path.read_text("utf-8")))
    corpus = [textprep.preprocess(d, cfg) for d in docs]
    cm = textprep.build_matrix(corpus, [(d.id, d.date) for d in docs])
    A = textprep.tfidf(cm)
    print(f"{cm.n_docs} statements, {cm.n_terms} distinct terms after preprocessing")

    model = nmf.fit(A.weights, nmf.NmfConfig(k=3))
    print(f"\nNMF with k=3 converged after {model.iterations} iterations "
          f"(objective {model.objective_trace[-1]:.4f})")
    for t in range(3):
        terms = nmf.top_terms(model.H, t, 6, cm.vocabulary)
        print(f"  topic {t + 1}: {', '.join(terms)}")

    print("\ndocument-topic weights (rows sum freely, larger = more emphasis):")
    for (doc_id, _), row in zip(cm.doc_index, model.W):
        bars = "  ".join(f"{w:6.3f}" for w in row)
        print(f"  {doc_id}  {bars}")

    ccfg = coherence.CoherenceConfig(n_top=8, k_range=(2, 5))
    report = coherence.select_k(cm, ccfg,
                                coherence.nmf_modeler(A, nmf.NmfConfig(k=2)))
    print("\ncoherence by topic count:")
    for k in sorted(report.per_k):
        _, mean = report.per_k[k]
        marker = "  <- selected" if k == report.best_k else ""
        print(f"  k={k}: {mean:8.4f}{marker}")


if __name__ == "__main__":
    main()
