"""surveytext: analysis pipeline for open-ended survey answers.

Covers transcript quality scoring (word error rate with a full error
taxonomy), sentiment-label agreement evaluation, and a topic modelling
pipeline built from answer embeddings, density-based clustering,
cluster-level TF-IDF, coherence-based model selection and cross-dataset
topic matching.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    agreement,
    asr_eval,
    corpus,
    density_cluster,
    embeddings,
    topic_compare,
    topics,
)
