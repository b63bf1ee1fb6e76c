"""
Evaluating against simultaneous attacks
=======================================

For each clean sample the attacker may use any of the attacks in a group.
A sample counts as caught only if every fooling attack on it is caught,
so the group score of a sample is the minimum over its fooling attacks.
"""

import numpy as np

from minimax_detect import ScoreRecord, auroc, evaluate, expand_group, fpr_at_tpr

group = expand_group(["PGDi*", "SA"], "Linf", 0.125)
print(group.label, "has", len(group), "members")
members = group.sorted_members()

rng = np.random.default_rng(4)
records = [ScoreRecord(f"s{i}", "natural", (rng.beta(2, 8), rng.beta(2, 8))) for i in range(200)]
for i in range(200):
    for m in members:
        # detector 0 watches the loss-based attacks, detector 1 the score-based one
        hit = (m.loss is not None, m.loss is None)
        scores = tuple(rng.beta(8, 2) if h else rng.beta(2, 8) for h in hit)
        records.append(ScoreRecord(f"s{i}", "adversarial", scores, m, fooled=rng.random() < 0.9))

report = evaluate(records, [group], baselines=True)
g = report.groups[0]
print("mixture  AUROC %.3f  FPR@95 %.3f" % (g.auroc, g.fpr_at_95_tpr))
for name, rows in report.baselines.items():
    print("%-8s AUROC %.3f  FPR@95 %.3f" % (name, rows[0].auroc, rows[0].fpr_at_95_tpr))

# The metrics are plain functions too.
pos, neg = rng.uniform(0.3, 1.0, 50), rng.uniform(0.0, 0.7, 50)
print("AUROC", auroc(pos, neg), "FPR at 95% TPR, threshold", fpr_at_tpr(pos, neg))
