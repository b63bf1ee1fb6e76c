"""
Capacity of a detector channel
==============================

Each detector reports P(adversarial | x). Stacking the K reports as rows
(1 - s, s) gives a K x 2 channel, and the weights that maximise the mutual
information between "which detector" and the output are the minimax weights.
"""

import math

import numpy as np

from minimax_detect import Channel, SolverConfig, grid_oracle, solve_capacity

# two detectors that disagree strongly: the binary symmetric channel
bsc = Channel([[0.9, 0.1], [0.1, 0.9]])
res = solve_capacity(bsc)
print("weights", res.weights.to_list())
print("capacity %.10f nats = %.10f bits" % (res.capacity, res.capacity / math.log(2)))
print("closed form  %.10f" % (math.log(2) + 0.1 * math.log(0.1) + 0.9 * math.log(0.9)))

# iterates only ever go up; a lopsided pair needs a few rounds
res = solve_capacity(Channel.from_scores([0.6, 0.999]))
print("first five MI values", np.round(res.history[:5], 6), "after", res.iterations, "iterations")

# three detectors: the middle one sits between the extremes and gets no weight
three = Channel.from_scores([0.05, 0.5, 0.97])
res = solve_capacity(three, SolverConfig(tolerance=1e-12))
print("weights", np.round(np.asarray(res.weights), 6), "iterations", res.iterations)

# a brute-force lattice search agrees to within its resolution
print("grid", grid_oracle(three, 200).capacity, "solver", res.capacity)

# all detectors agree: nothing to exploit, capacity 0
print("agreeing detectors", solve_capacity(Channel.from_scores([0.3, 0.3, 0.3])).capacity)
