"""The two non-fuzzy baselines: SCG-trained network and pruned regression tree.

Run:  python demos/demo_mlp_cart.py
"""

import numpy as np

from softdss import cart, tace
from softdss.mlp import mlp_init, scg_train

master = tace.normalize(tace.generate(7, 1000))
train, test = tace.split(master, 0.9, seed=1)

print("Scaled conjugate gradient, 30 hidden tanh units, 1000 iterations:")
net = mlp_init(4, 30, seed=1)
net, report = scg_train(net, (train.x, train.y), (test.x, test.y), epochs=1000, seed=1)
curve = report.rmse_per_epoch
for epoch in (1, 10, 100, 500, 1000):
    print(f"  epoch {epoch:4d}: train RMSE {curve[epoch - 1]:.6f}")
print(f"  final test RMSE {report.final_test_rmse:.6f}  ({report.wall_time:.1f}s, "
      "no line searches, only accepted steps change the weights)")

print("\nCART: grow greedily, prune by cost-complexity, pick the minimum-CV-cost tree:")
tree = cart.grow(train.x, train.y, min_leaf=5)
seq = cart.prune_sequence(tree, train.x, train.y, folds=10, seed=1)
best = cart.select_min_cost(seq)
pred = cart.predict_batch(best, test.x)
print(f"  full tree: {cart.count_leaves(tree)} terminal nodes")
print(f"  pruning ladder: {len(seq)} nested subtrees, "
      f"alpha from {seq[0].alpha:g} to {seq[-1].alpha:.2e}")
print(f"  selected: {cart.count_leaves(best)} terminal nodes, "
      f"test RMSE {np.sqrt(np.mean((pred - test.y) ** 2)):.6f}")

print("\n  terminal nodes vs cross-validated cost (relative to the root tree):")
root_cost = seq[-1].cv_cost
shown = {e.terminal_count: e for e in reversed(seq)}
for count in sorted(shown, reverse=True)[:: max(1, len(shown) // 8)]:
    e = shown[count]
    print(f"    {count:4d} leaves: {e.cv_cost / root_cost:.4f}")
