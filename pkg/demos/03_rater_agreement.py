"""
Sentiment label agreement
=========================

Three human raters label answers positive/negative/neutral. Mostly
neutral questions are excluded, any answer with a neutral human rating
is filtered, agreement is chance-corrected, and an automatic labeller is
scored against the majority vote of the humans.
"""

from surveytext.agreement import (
    RatingMatrix,
    fleiss_kappa,
    majority_gold,
    neutral_filter,
    perfect_agreement_count,
    prf,
)

ITEMS = ["a1", "a2", "a3", "a4", "a5"]
HUMANS = {
    "h1": {"a1": "positive", "a2": "positive", "a3": "negative", "a4": "positive", "a5": "neutral"},
    "h2": {"a1": "positive", "a2": "positive", "a3": "negative", "a4": "positive", "a5": "positive"},
    "h3": {"a1": "positive", "a2": "positive", "a3": "negative", "a4": "negative", "a5": "positive"},
}
MACHINE = {"a1": "positive", "a2": "negative", "a3": "negative", "a4": "positive"}

# answers with any neutral human rating carry no usable sentiment signal
kept, dropped = neutral_filter(HUMANS, ITEMS)
print(f"kept {kept}, dropped {dropped}")

labels = ("positive", "negative", "neutral")
human_matrix = RatingMatrix.from_ratings(HUMANS, kept, labels)
kappa = fleiss_kappa(human_matrix)
print(f"human agreement: kappa = {kappa:.3f}, "
      f"perfect on {perfect_agreement_count(human_matrix)}/{len(kept)} answers")

# joint agreement drops once the automatic rater joins the panel
everyone = dict(HUMANS)
everyone["auto"] = MACHINE
joint = RatingMatrix.from_ratings(everyone, kept, labels)
print(f"with the automatic rater: kappa = {fleiss_kappa(joint):.3f}")

# majority vote is the ground truth; ties are excluded, never invented
gold, ties = majority_gold(human_matrix)
print(f"gold = {gold} (ties: {ties})")

for label in ("positive", "negative"):
    p, r, f1 = prf(gold, {i: MACHINE[i] for i in gold}, label)
    print(f"{label:<9} precision={p:.2f} recall={r:.2f} f1={f1:.2f}")
