"""Grid partitioning by quadtree split and cost-driven merge.

partition_som first splits the grid recursively wherever four quadrants are
jointly cheaper than the region as a whole, then greedily merges adjacent
regions while each merge strictly lowers the cost.  exhaustive_partition is
the small-grid oracle: it enumerates every partition of the grid into
edge-connected blocks and returns a cheapest one.
"""

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .bayes_cost import CostParams, block_cost_for_pes, partition_cost
from .som import SomMap


class PartitionError(ValueError):
    """Raised for invalid regions, partitions, or oversized oracle grids."""


@dataclass(frozen=True)
class Region:
    """Half-open rectangle of grid cells: rows [r0, r1), cols [c0, c1)."""

    r0: int
    r1: int
    c0: int
    c1: int

    def __post_init__(self):
        if not (self.r0 < self.r1 and self.c0 < self.c1):
            raise PartitionError("empty region")

    def cells(self):
        for r in range(self.r0, self.r1):
            for c in range(self.c0, self.c1):
                yield (r, c)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every grid cell to one edge-connected block.

    block_of is a (rows, cols) int array of dense block ids numbered by
    first occurrence in row-major order, so equal cell groupings always
    produce identical arrays.
    """

    block_of: np.ndarray
    n_blocks: int
    cost: float = math.nan

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (
            self.n_blocks == other.n_blocks
            and np.array_equal(self.block_of, other.block_of)
            and (self.cost == other.cost or (math.isnan(self.cost) and math.isnan(other.cost)))
        )

    @classmethod
    def from_labels(cls, labels: np.ndarray, cost: float = math.nan) -> "Partition":
        """Relabel an arbitrary cell labeling to canonical dense block ids."""
        labels = np.asarray(labels)
        block_of = np.empty(labels.shape, dtype=int)
        remap: dict = {}
        for r in range(labels.shape[0]):
            for c in range(labels.shape[1]):
                key = labels[r, c]
                if key not in remap:
                    remap[key] = len(remap)
                block_of[r, c] = remap[key]
        return cls(block_of=block_of, n_blocks=len(remap), cost=cost)

    def signature(self) -> tuple:
        return tuple(int(v) for v in self.block_of.ravel())

    def block_cells(self, block_id: int) -> list[tuple[int, int]]:
        return [(int(r), int(c)) for r, c in zip(*np.nonzero(self.block_of == block_id))]


def validate_partition(partition: Partition) -> None:
    """Check coverage, dense ids, and 4-connectivity of every block."""
    block_of = partition.block_of
    ids = set(int(v) for v in block_of.ravel())
    if ids != set(range(partition.n_blocks)):
        raise PartitionError("block ids are not dense 0..K-1")
    for b in range(partition.n_blocks):
        cells = set(partition.block_cells(b))
        seen = set()
        stack = [next(iter(cells))]
        while stack:
            r, c = stack.pop()
            if (r, c) in seen:
                continue
            seen.add((r, c))
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if (rr, cc) in cells and (rr, cc) not in seen:
                    stack.append((rr, cc))
        if seen != cells:
            raise PartitionError(f"block {b} is not edge-connected")


def _subdivide(region: Region) -> list[Region]:
    """Quadrants of a region (two halves when one dimension is 1)."""
    rn, cn = region.r1 - region.r0, region.c1 - region.c0
    rm = region.r0 + (rn + 1) // 2
    cm = region.c0 + (cn + 1) // 2
    if rn == 1:
        return [Region(region.r0, region.r1, region.c0, cm),
                Region(region.r0, region.r1, cm, region.c1)]
    if cn == 1:
        return [Region(region.r0, rm, region.c0, region.c1),
                Region(rm, region.r1, region.c0, region.c1)]
    return [Region(region.r0, rm, region.c0, cm),
            Region(region.r0, rm, cm, region.c1),
            Region(rm, region.r1, region.c0, cm),
            Region(rm, region.r1, cm, region.c1)]


def _region_pes(som_map: SomMap, cells) -> list:
    return [som_map.pe(r, c) for r, c in cells]


def quadtree_split(som_map: SomMap, params: CostParams) -> list[Region]:
    """Recursively split regions whose subregions are jointly cheaper.

    A region is split iff its one-block cost strictly exceeds the summed
    one-block costs of its quadrants; 1x1 regions are leaves.
    """
    def rec(region: Region) -> list[Region]:
        if region.r1 - region.r0 == 1 and region.c1 - region.c0 == 1:
            return [region]
        subs = _subdivide(region)
        whole = block_cost_for_pes(_region_pes(som_map, region.cells()), params)
        parts = math.fsum(
            block_cost_for_pes(_region_pes(som_map, s.cells()), params) for s in subs)
        if whole > parts:
            out = []
            for s in subs:
                out.extend(rec(s))
            return out
        return [region]

    return rec(Region(0, som_map.rows, 0, som_map.cols))


def _check_tiling(regions, rows: int, cols: int) -> None:
    count = np.zeros((rows, cols), dtype=int)
    for region in regions:
        for r, c in region.cells():
            if not (0 <= r < rows and 0 <= c < cols):
                raise PartitionError("region outside grid")
            count[r, c] += 1
    if np.any(count != 1):
        raise PartitionError("regions must tile the grid exactly once")


def _adjacent(a: frozenset, b: frozenset) -> bool:
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    for r, c in small:
        if ((r - 1, c) in big or (r + 1, c) in big
                or (r, c - 1) in big or (r, c + 1) in big):
            return True
    return False


def merge_regions(regions: list[Region], som_map: SomMap, params: CostParams) -> Partition:
    """Greedy pairwise merging of a region tiling.

    Regions are ordered by top-left corner (column first, then row).  Each
    pass scans regions in that order and, for every later edge-adjacent
    region, merges the pair iff the joined cost is strictly below the sum of
    the separate costs, renumbering as it goes.  Passes repeat until one
    completes with no merge; ties keep regions separate.
    """
    _check_tiling(regions, som_map.rows, som_map.cols)
    sets: list[frozenset] = [frozenset(region.cells()) for region in regions]

    cost_cache: dict[frozenset, float] = {}

    def cost(cells: frozenset) -> float:
        if cells not in cost_cache:
            cost_cache[cells] = block_cost_for_pes(_region_pes(som_map, sorted(cells)), params)
        return cost_cache[cells]

    def order_key(cells: frozenset):
        return (min(c for _, c in cells), min(r for r, _ in cells))

    changed = True
    while changed:
        changed = False
        sets.sort(key=order_key)
        i = 0
        while i < len(sets):
            j = i + 1
            while j < len(sets):
                if _adjacent(sets[i], sets[j]):
                    joined = sets[i] | sets[j]
                    if cost(joined) < cost(sets[i]) + cost(sets[j]):
                        sets[i] = joined
                        del sets[j]
                        changed = True
                        continue
                j += 1
            i += 1

    labels = np.empty((som_map.rows, som_map.cols), dtype=int)
    for b, cells in enumerate(sets):
        for r, c in cells:
            labels[r, c] = b
    partition = Partition.from_labels(labels)
    return Partition(block_of=partition.block_of, n_blocks=partition.n_blocks,
                     cost=partition_cost(partition, som_map, params))


def partition_som(som_map: SomMap, params: CostParams) -> Partition:
    """Quadtree split followed by greedy merging."""
    return merge_regions(quadtree_split(som_map, params), som_map, params)


def _flood(mask: int, seed: int, nbr: list[int]) -> int:
    comp = seed
    while True:
        grow = 0
        mm = comp
        while mm:
            low = mm & -mm
            grow |= nbr[low.bit_length() - 1]
            mm ^= low
        new = (grow & mask) | comp
        if new == comp:
            return comp
        comp = new


def _components_touch(mask: int, required: int, nbr: list[int]) -> bool:
    """True iff every connected component of mask intersects required."""
    rest = mask
    while rest:
        comp = _flood(mask, rest & -rest, nbr)
        if not comp & required:
            return False
        rest &= ~comp
    return True


def _is_connected(mask: int, nbr: list[int]) -> bool:
    return _flood(mask, mask & -mask, nbr) == mask


def _grid_masks(rows: int, cols: int):
    """Neighbor, adjacency-frontier, and row bitmasks for the enumerator."""
    n = rows * cols
    nbr = [0] * n
    for k in range(n):
        r, c = divmod(k, cols)
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= rr < rows and 0 <= cc < cols:
                nbr[k] |= 1 << (rr * cols + cc)
    row_mask = [sum(1 << (r * cols + c) for c in range(cols)) for r in range(rows)]
    # frontier[k]: cells with index < k having at least one neighbor > k
    frontier = [0] * n
    for k in range(n):
        f = 0
        for j in range(k):
            if nbr[j] >> (k + 1):
                f |= 1 << j
        frontier[k] = f
    return nbr, row_mask, frontier


def _walk_partitions(rows: int, cols: int, visit) -> None:
    """Call visit(labels, part_masks) for every partition into connected blocks.

    labels and part_masks are shared scratch state, valid only during the
    call; part ids are dense in first-occurrence order, so each partition is
    visited exactly once.  Branches are pruned when a cell joins a block it
    can no longer reach and whenever a completed row strands a block
    component above the frontier.
    """
    n = rows * cols
    nbr, row_mask, frontier = _grid_masks(rows, cols)
    labels = [0] * n
    parts: list[int] = []

    def row_ok(k: int) -> bool:
        # Only meaningful when k completes a row.  A block with no cell in
        # that row can never grow again, so it must already be connected; one
        # that still touches the row may stay split only if every component
        # reaches the row.  Blocks untouched since before the previous row
        # were verified when they closed and are skipped.
        if (k + 1) % cols:
            return True
        r = k // cols
        rm = row_mask[r]
        prev = row_mask[r - 1] if r else 0
        for mask in parts:
            if mask & rm:
                if not _components_touch(mask, rm, nbr):
                    return False
            elif mask & prev and not _is_connected(mask, nbr):
                return False
        return True

    last = row_mask[rows - 1]

    def rec(k: int) -> None:
        if k == n:
            if all(_is_connected(mask, nbr) for mask in parts if mask & last):
                visit(labels, parts)
            return
        bit = 1 << k
        reachable = nbr[k] | frontier[k]
        for p in range(len(parts)):
            mask = parts[p]
            if mask & reachable:
                labels[k] = p
                parts[p] = mask | bit
                if row_ok(k):
                    rec(k + 1)
                parts[p] = mask
        labels[k] = len(parts)
        parts.append(bit)
        if row_ok(k):
            rec(k + 1)
        parts.pop()

    rec(0)


def enumerate_connected_partitions(rows: int, cols: int):
    """All partitions of the rows x cols grid into edge-connected blocks.

    Materializes the full set before yielding; meant for small grids (the
    count grows like the connected-partition numbers 2, 12, 1434, ...).
    """
    found: list[tuple] = []
    _walk_partitions(rows, cols, lambda labels, _: found.append(tuple(labels)))
    yield from found


def exhaustive_partition(som_map: SomMap, params: CostParams, cell_limit: int = 9) -> Partition:
    """Cheapest partition over the full connected-partition set.

    Cost ties break toward the lexicographically smallest row-major block
    assignment.  Scales exponentially with cell count, hence cell_limit.
    """
    rows, cols = som_map.rows, som_map.cols
    if rows * cols > cell_limit:
        raise PartitionError(f"grid {rows}x{cols} exceeds cell_limit={cell_limit}")

    pe_list = list(som_map.pes)
    cost_cache: dict[int, float] = {}

    def mask_cost(mask: int) -> float:
        hit = cost_cache.get(mask)
        if hit is None:
            pes = []
            mm = mask
            while mm:
                low = mm & -mm
                pes.append(pe_list[low.bit_length() - 1])
                mm ^= low
            hit = cost_cache[mask] = block_cost_for_pes(pes, params)
        return hit

    state = {"cost": math.inf, "labels": None}

    def visit(labels, parts):
        total = math.fsum(mask_cost(mask) for mask in parts)
        if total < state["cost"] or (total == state["cost"] and tuple(labels) < state["labels"]):
            state["cost"] = total
            state["labels"] = tuple(labels)

    _walk_partitions(rows, cols, visit)
    best_cost, best_labels = state["cost"], state["labels"]

    block_of = np.array(best_labels, dtype=int).reshape(rows, cols)
    return Partition(block_of=block_of, n_blocks=len(set(best_labels)), cost=best_cost)


PARTITION_FORMAT_VERSION = 1


def partition_to_json(partition: Partition, params_echo: dict | None = None,
                      provenance: dict | None = None) -> str:
    rows, cols = partition.block_of.shape
    doc = {
        "format_version": PARTITION_FORMAT_VERSION,
        "rows": int(rows),
        "cols": int(cols),
        "block_of": [int(v) for v in partition.block_of.ravel()],
        "K": partition.n_blocks,
        "cost": None if math.isnan(partition.cost) else partition.cost,
        "params": params_echo,
        "provenance": provenance,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_partition(partition: Partition, path, params_echo: dict | None = None,
                   provenance: dict | None = None) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as f:
        f.write(partition_to_json(partition, params_echo, provenance))
    os.replace(tmp, path)


def load_partition(path) -> Partition:
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise PartitionError(f"{path}: malformed partition file: {e}") from None
    if not isinstance(doc, dict) or doc.get("format_version") != PARTITION_FORMAT_VERSION:
        raise PartitionError(f"{path}: unsupported partition format version")
    try:
        block_of = np.array(doc["block_of"], dtype=int).reshape(doc["rows"], doc["cols"])
        cost = math.nan if doc["cost"] is None else float(doc["cost"])
        partition = Partition(block_of=block_of, n_blocks=int(doc["K"]), cost=cost)
    except (KeyError, TypeError, ValueError) as e:
        raise PartitionError(f"{path}: malformed partition file: {e}") from None
    validate_partition(partition)
    return partition
