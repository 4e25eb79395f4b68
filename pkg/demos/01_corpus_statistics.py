"""
Corpus ingestion and per-modality statistics
============================================

Spoken answers tend to be longer than typed ones; the share of content
words barely moves. This demo builds a small mixed corpus in memory,
normalizes and tokenizes it, and renders the statistics table.
"""

from surveytext.corpus import Response, corpus_stats, normalize, tokenize
from surveytext.render import stats_markdown

# a handful of answers: three spoken (manual transcripts), three typed
RESPONSES = [
    Response("s1", "Q13", "speech", "manual",
             "Nou ja, ik denk eerlijk gezegd dat iedereen mee moet kunnen doen."),
    Response("s2", "Q14", "speech", "manual",
             "Omdat het anders geen democratie meer is, zeg maar."),
    Response("s3", "Q15", "speech", "manual", "Ja dat vind ik wel."),
    Response("k1", "Q16", "keyboard", "typed", "Vrijheid van meningsuiting."),
    Response("k2", "Q17", "keyboard", "typed", "Inspraak."),
    Response("k3", "Q18", "keyboard", "typed", "Ja."),
]

STOPWORDS = frozenset(
    "de het een en van ik dat is wel ja nou maar omdat geen meer anders mee moet kunnen doen zeg".split()
)

# normalization is strict and reproducible: lowercase, punctuation out,
# apostrophes and hyphens only between letters
for response in RESPONSES[:2]:
    print(f"{response.raw_text!r}\n  -> {normalize(response.raw_text)!r}")
print()

answers = [
    tokenize(normalize(r.raw_text), STOPWORDS, response_id=r.id) for r in RESPONSES
]
modality_of = {r.id: r.modality for r in RESPONSES}

stats = corpus_stats(answers, modality_of)
print(stats_markdown(stats))

speech = stats.by_modality["speech"]
keyboard = stats.by_modality["keyboard"]
print(f"speech answers average {speech.mean_words:.2f} words, "
      f"typed answers {keyboard.mean_words:.2f}")
