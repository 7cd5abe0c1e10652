"""The classic threshold partitioner, and why it is fragile.

Adjacent cells are scored by the Euclidean distance between their member
mean vectors; every adjacency above a threshold T is cut and the connected
remains become classes.  The right T is hard to guess: small changes swing
the class count and the accuracy, which is the problem the cost-based
partitioner avoids.
"""

import numpy as np

import somblocks as sb

iris = sb.load_csv(sb.iris_path(), label_column="class")
som_map = sb.train(iris, sb.SomConfig(rows=5, cols=5, seed=2))

bounds = sb.umatrix_boundaries(som_map)
strengths = np.concatenate([bounds.h.ravel(), bounds.v.ravel()])
strengths = strengths[np.isfinite(strengths)]
print(f"{strengths.size} adjacencies, strength range "
      f"{strengths.min():.3f} .. {strengths.max():.3f}")

print("\n T      blocks  accuracy")
for T in (0.45, 0.50, 0.53, 0.55, 0.57, 0.60, 0.70, 0.90, 1.20):
    p = sb.threshold_partition(som_map, T)
    rep = sb.score(p, som_map, iris.labels)
    print(f" {T:.2f}   {p.n_blocks:>4}    {rep.p_o:.3f}")

# a 5 percent nudge around a mid-range threshold changes the outcome
T = 0.55
for factor in (0.95, 1.0, 1.05):
    p = sb.threshold_partition(som_map, T * factor)
    print(f"T = {T * factor:.4f}: {p.n_blocks} blocks")

print("\ncompare: the cost-based partition needs no threshold at all")
params = sb.params_from_summary(sb.summarize(iris))
p = sb.partition_som(som_map, params)
rep = sb.score(p, som_map, iris.labels)
print(f"cost-based: {p.n_blocks} blocks, accuracy {rep.p_o:.3f}")
