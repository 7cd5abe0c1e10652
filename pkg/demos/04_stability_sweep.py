"""How robust is the partition to the range and width parameters?

Rescales R and the cell widths by factors spread over three decades and
re-partitions at every grid point.  The printed grid marks the points whose
partition is identical to the one at (1, 1); the stable window spans more
than an order of magnitude on both axes.
"""

import somblocks as sb

iris = sb.load_csv(sb.iris_path(), label_column="class")
som_map = sb.train(iris, sb.SomConfig(rows=5, cols=5, seed=2))
params = sb.params_from_summary(sb.summarize(iris))

spec = sb.SweepSpec(base=params)
stability = sb.sweep(som_map, spec)

print("block count per grid point (* = same partition as at factors (1,1))")
print("rows: f_R ascending; cols: f_sigma ascending\n")
header = "          " + " ".join(f"{f:7.3f}" for f in spec.f_sigma_grid)
print(header)
for i, f_R in enumerate(spec.f_R_grid):
    cells = " ".join(
        f"{stability.n_blocks[i, j]:6d}{'*' if stability.equal[i, j] else ' '}"
        for j in range(len(spec.f_sigma_grid)))
    print(f"f_R={f_R:6.3f} {cells}")

f_R_span, f_sigma_span = sb.stable_region(stability)
print(f"\nstable window around (1,1): f_R x{f_R_span:.1f}, f_sigma x{f_sigma_span:.1f}")
