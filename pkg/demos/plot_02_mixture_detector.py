"""
The mixture soft-detector
=========================

Per input, the capacity-achieving weights mix the detectors into a single
score. A threshold gamma turns it into a decision.
"""

import numpy as np

from minimax_detect import Channel, aggregate, detect, score_matrix

for scores in ([0.9, 0.1], [0.95, 0.9, 0.2], [0.02, 0.03, 0.99, 0.01]):
    mix = aggregate(Channel.from_scores(scores))
    print(scores, "->", round(mix.p_adversarial, 4),
          "(%.17g)" % mix.p_adversarial, "weights", np.round(np.asarray(mix.weights), 3),
          "flagged at 0.5:", detect(mix, 0.5))

# The mixture is not an average. One confident outlier pulls the score
# toward 0.5 because the weights balance the most extreme reports.
print("plain mean of the last row", np.mean([0.02, 0.03, 0.99, 0.01]))

# Exact ties with gamma are not flagged, but float rounding can land a hair
# above 0.5, as in the last row.

# Many inputs at once: the batch path agrees with one-by-one calls up to rounding.
rng = np.random.default_rng(0)
batch = rng.uniform(size=(6, 4))
p, w, cap, converged = score_matrix(batch)
one_by_one = [aggregate(Channel.from_scores(row)).p_adversarial for row in batch]
print(np.round(p, 4))
print("max difference:", np.max(np.abs(p - one_by_one)), "all converged:", bool(converged.all()))
