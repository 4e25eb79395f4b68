"""
Topic modelling: embed, cluster, rank terms, pick the best size
===============================================================

Answers are embedded (here with the built-in hash embedder), clustered
by density with outliers allowed, and each cluster's concatenated
answers are scored with a cluster-level TF-IDF. The minimum cluster
size is the only knob, and it is chosen by sweeping a range and keeping
the size with the best u_mass coherence that still yields more than one
topic.
"""

import itertools

from surveytext.corpus import TokenizedAnswer
from surveytext.density_cluster import hdbscan
from surveytext.embeddings import hash_embed_matrix
from surveytext.render import topics_markdown
from surveytext.topics import cluster_tfidf, sweep, top_words, umass_coherence

# three planted themes with disjoint vocabularies, twenty answers each
THEMES = {
    "stemmen": ["stemmen", "verkiezingen", "vrijheid", "parlement", "kiezen",
                "regering", "inspraak", "wetten"],
    "europa": ["unie", "munt", "euro", "grenzen", "samenwerking", "verdrag",
               "brussel", "reizen"],
    "vertrouwen": ["vertrouwen", "eerlijk", "beloften", "afspraken",
                   "betrouwbaar", "liegen", "oprecht", "nakomen"],
}

answers = []
for name, words in THEMES.items():
    core, rest = words[:2], words[2:]
    for i, subset in enumerate(itertools.combinations(range(len(rest)), 3)):
        if i == 20:
            break
        tokens = tuple(core + [rest[k] for k in subset])
        answers.append(TokenizedAnswer(f"{name}-{i:02d}", tokens, (True,) * len(tokens)))

vectors = hash_embed_matrix(answers)  # deterministic, no model download

# a single clustering at one size, for inspection
clusters = hdbscan(vectors, min_cluster_size=5, min_samples=5)
print(f"min_cluster_size=5: {clusters.n_clusters} clusters, "
      f"{len(clusters.outlier_indices)} outliers")
model = cluster_tfidf(answers, clusters)
for topic_id, words in top_words(model, 5).items():
    print(f"  topic {topic_id}: {', '.join(words)}")
coherence = umass_coherence(model, answers)
print(f"  u_mass = {coherence.score:.4f}\n")

# the sweep picks the size for us
record, best = sweep(answers, vectors, sizes=range(2, 51), min_samples=5)
print(f"sweep selected min_cluster_size={record.selected} "
      f"with {best.n_topics} topics")
print(topics_markdown(best))
