"""Comparison partitioners: distance-threshold cuts and the label oracle.

The threshold scheme scores each pair of adjacent cells by the Euclidean
distance between their member-sample mean vectors (not their weight
vectors) and cuts every adjacency above a threshold T; connected components
of the surviving adjacency graph form the blocks.  The oracle uses the true
class labels to give each cell its majority class, then groups same-class
neighbors; it is the best any cell-constant labeling can do.
"""

import math
from dataclasses import dataclass

import numpy as np

from .data_model import encode_labels
from .partition import Partition
from .som import SomMap


class BaselineError(ValueError):
    """Raised for maps or labels the baseline partitioners cannot use."""


@dataclass(frozen=True, eq=False)
class BoundaryMap:
    """Strength of every horizontal/vertical cell adjacency.

    h[r, c] is the edge between (r, c) and (r, c+1); v[r, c] the edge
    between (r, c) and (r+1, c).  NaN marks pairs involving an empty cell.
    """

    h: np.ndarray
    v: np.ndarray

    def strength(self, a: tuple[int, int], b: tuple[int, int]) -> float:
        (r1, c1), (r2, c2) = sorted((a, b))
        if r1 == r2 and c2 == c1 + 1:
            return float(self.h[r1, c1])
        if c1 == c2 and r2 == r1 + 1:
            return float(self.v[r1, c1])
        raise BaselineError(f"cells {a} and {b} are not edge-adjacent")


def umatrix_boundaries(som_map: SomMap) -> BoundaryMap:
    """Mean-vector distances across all adjacent cell pairs."""
    if sum(pe.n > 0 for pe in som_map.pes) < 2:
        raise BaselineError("need at least 2 non-empty cells")
    rows, cols = som_map.rows, som_map.cols
    h = np.full((rows, max(cols - 1, 0)), np.nan)
    v = np.full((max(rows - 1, 0), cols), np.nan)
    for r in range(rows):
        for c in range(cols):
            a = som_map.pe(r, c)
            if a.n == 0:
                continue
            if c + 1 < cols:
                b = som_map.pe(r, c + 1)
                if b.n > 0:
                    h[r, c] = np.linalg.norm(a.mean - b.mean)
            if r + 1 < rows:
                b = som_map.pe(r + 1, c)
                if b.n > 0:
                    v[r, c] = np.linalg.norm(a.mean - b.mean)
    return BoundaryMap(h=h, v=v)


def threshold_partition(som_map: SomMap, T: float) -> Partition:
    """Cut every adjacency stronger than T; blocks are what stays connected.

    Adjacencies with absent strength (an empty cell on either side) are
    always cut, so empty cells come out as singleton blocks.
    """
    if not T >= 0:
        raise BaselineError("threshold must be non-negative")
    bounds = umatrix_boundaries(som_map)
    rows, cols = som_map.rows, som_map.cols
    labels = np.full((rows, cols), -1, dtype=int)

    def kept(s: float) -> bool:
        return not math.isnan(s) and s <= T

    next_label = 0
    for r in range(rows):
        for c in range(cols):
            if labels[r, c] >= 0:
                continue
            stack = [(r, c)]
            labels[r, c] = next_label
            while stack:
                rr, cc = stack.pop()
                if cc + 1 < cols and labels[rr, cc + 1] < 0 and kept(bounds.h[rr, cc]):
                    labels[rr, cc + 1] = next_label
                    stack.append((rr, cc + 1))
                if cc - 1 >= 0 and labels[rr, cc - 1] < 0 and kept(bounds.h[rr, cc - 1]):
                    labels[rr, cc - 1] = next_label
                    stack.append((rr, cc - 1))
                if rr + 1 < rows and labels[rr + 1, cc] < 0 and kept(bounds.v[rr, cc]):
                    labels[rr + 1, cc] = next_label
                    stack.append((rr + 1, cc))
                if rr - 1 >= 0 and labels[rr - 1, cc] < 0 and kept(bounds.v[rr - 1, cc]):
                    labels[rr - 1, cc] = next_label
                    stack.append((rr - 1, cc))
            next_label += 1
    return Partition.from_labels(labels)


def pe_majority_class(pe, label_ids: np.ndarray, n_classes: int) -> int:
    """Majority class id among a cell's members; ties go to the lowest id."""
    counts = np.bincount(label_ids[list(pe.member_ids)], minlength=n_classes)
    return int(np.argmax(counts))


def oracle_partition(som_map: SomMap, labels) -> Partition:
    """Best cell-constant partition given the true per-sample labels.

    Each non-empty cell takes its majority class; blocks are connected
    components of equal-class cells.  Empty cells are absorbed into the
    adjacent block with the lowest id, repeating passes until none remain.
    """
    if labels is None:
        raise BaselineError("oracle partition needs class labels")
    classes, label_ids = encode_labels(labels)
    if len(label_ids) != som_map.n_samples:
        raise BaselineError("labels do not cover the map's samples")

    rows, cols = som_map.rows, som_map.cols
    cell_class = np.full((rows, cols), -1, dtype=int)
    for pe in som_map.pes:
        if pe.n > 0:
            cell_class[pe.r, pe.c] = pe_majority_class(pe, label_ids, len(classes))

    block = np.full((rows, cols), -1, dtype=int)
    next_block = 0
    for r in range(rows):
        for c in range(cols):
            if block[r, c] >= 0 or cell_class[r, c] < 0:
                continue
            stack = [(r, c)]
            block[r, c] = next_block
            while stack:
                rr, cc = stack.pop()
                for r2, c2 in ((rr - 1, cc), (rr + 1, cc), (rr, cc - 1), (rr, cc + 1)):
                    if (0 <= r2 < rows and 0 <= c2 < cols and block[r2, c2] < 0
                            and cell_class[r2, c2] == cell_class[rr, cc]):
                        block[r2, c2] = next_block
                        stack.append((r2, c2))
            next_block += 1
    if next_block == 0:
        raise BaselineError("map has no non-empty cells")

    while np.any(block < 0):
        assigned_any = False
        for r in range(rows):
            for c in range(cols):
                if block[r, c] >= 0:
                    continue
                near = [block[r2, c2]
                        for r2, c2 in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                        if 0 <= r2 < rows and 0 <= c2 < cols and block[r2, c2] >= 0]
                if near:
                    block[r, c] = min(near)
                    assigned_any = True
        if not assigned_any:
            raise BaselineError("unreachable empty cells")  # cannot happen on a grid
    return Partition.from_labels(block)
