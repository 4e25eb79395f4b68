"""
Word error rate and deletion analysis
=====================================

Manually corrected transcripts serve as the reference; the raw
recognizer output is the hypothesis. The alignment is the minimal-cost
edit script, so substitutions, deletions and insertions are counted the
same way by every run.
"""

from surveytext.asr_eval import align, deletion_analysis, wer
from surveytext.corpus import normalize
from surveytext.render import deletions_markdown, wer_markdown

PAIRS = [
    # (id, manual reference, automatic hypothesis)
    ("r1", "De kat zat op de mat.", "de kat op de mat"),
    ("r2", "Ik weet het eigenlijk niet zo goed.", "ik weet eigenlijk niet zo goed"),
    ("r3", "Dat vind ik heel belangrijk.", "dat vond ik heel belangrijk"),
    ("r4", "Nee.", "nee hoor"),
]

# one alignment, in detail
ref = normalize(PAIRS[0][1]).split()
hyp = normalize(PAIRS[0][2]).split()
result = align(ref, hyp)
print("ops for r1:")
for kind, ref_tok, hyp_tok in result.ops:
    print(f"  {kind:<10} {ref_tok or '-':<6} {hyp_tok or '-'}")
print()

# pooled over the corpus
report = wer(
    [(rid, normalize(r).split(), normalize(h).split()) for rid, r, h in PAIRS]
)
print(wer_markdown({"automatic": report}))
print(f"pooled WER {report.wer:.2f}%  (S={report.S} D={report.D} I={report.I} "
      f"over {report.n_ref} reference words)")
print()

# which words get dropped, and do they ever appear in recognizer output?
print(deletions_markdown(deletion_analysis(report, top_k=5)))
