"""
Attacker objectives
===================

Four losses an attacker can push up while crafting a perturbation. They
disagree about which adversarial output is "best", which is why detectors
trained on one family miss another.
"""

import numpy as np

from minimax_detect import LOSSES, evaluate_loss

clean = np.array([0.7, 0.2, 0.1])
candidates = {
    "confident wrong": np.array([0.02, 0.96, 0.02]),
    "flat": np.full(3, 1 / 3),
    "mild shift": np.array([0.5, 0.35, 0.15]),
}
truth = np.array([1.0, 0.0, 0.0])

print("%-16s" % "" + "".join("%10s" % name for name in LOSSES))
for label, adv in candidates.items():
    row = []
    for name in LOSSES:
        # the cross-entropy objective is measured against the true label
        first = truth if name == "ACE" else clean
        row.append(evaluate_loss(name, first, adv))
    print("%-16s" % label + "".join("%10.4f" % v for v in row))

# Gini prefers the flat output, the others the confident mistake.
# Fisher-Rao is symmetric, KL is not.
p, q = np.array([0.9, 0.1]), np.array([0.5, 0.5])
print("FR", evaluate_loss("FR", p, q), evaluate_loss("FR", q, p))
print("KL", evaluate_loss("KL", p, q), evaluate_loss("KL", q, p))
