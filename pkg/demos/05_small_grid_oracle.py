"""Check the split-and-merge heuristic against exact enumeration.

On small grids every partition into edge-connected blocks can be listed
outright (12 of them on a 2x2, 1434 on a 3x3), so the cheapest one is known
exactly and the heuristic can be audited.
"""

import numpy as np

import somblocks as sb
from somblocks.som import PeStats, SomConfig, SomMap


def toy_map(mean_grid, s=0.4):
    rows, cols = len(mean_grid), len(mean_grid[0])
    pes, sid = [], 0
    for r in range(rows):
        for c in range(cols):
            mu = np.array([float(mean_grid[r][c])])
            pes.append(PeStats(r=r, c=c, weight=mu, member_ids=tuple(range(sid, sid + 4)),
                               n=4, mean=mu, std=np.array([s])))
            sid += 4
    return SomMap(rows=rows, cols=cols, pes=tuple(pes),
                  config=SomConfig(rows=rows, cols=cols, seed=0))


print("connected partitions of small grids:")
for rows, cols in ((1, 2), (2, 2), (2, 3), (3, 3)):
    n = sum(1 for _ in sb.enumerate_connected_partitions(rows, cols))
    print(f"  {rows}x{cols}: {n}")

params = sb.CostParams(R=np.array([30.0]), sigma_floor=np.array([1e-6]))

print("\ntwo horizontal stripes, well separated:")
m = toy_map([[0, 0, 0], [9, 9, 9], [9, 9, 9]])
exact = sb.exhaustive_partition(m, params)
greedy = sb.partition_som(m, params)
print("exact optimum:\n", exact.block_of)
print(f"greedy matches: {np.array_equal(exact.block_of, greedy.block_of)} "
      f"(cost {greedy.cost:.3f} vs {exact.cost:.3f})")

print("\nrandom means (greedy can lag the optimum, never the trivial bounds):")
rng = np.random.default_rng(4)
m = toy_map(rng.normal(0, 3, size=(3, 3)))
exact = sb.exhaustive_partition(m, params)
greedy = sb.partition_som(m, params)
print(f"exact {exact.n_blocks} blocks at {exact.cost:.3f}; "
      f"greedy {greedy.n_blocks} blocks at {greedy.cost:.3f}; "
      f"gap {greedy.cost - exact.cost:.3f}")
