"""Scoring of partitions against ground-truth class labels.

A partition is scored by giving every block the majority class of the
samples its cells hold, predicting each sample through its block, and
comparing with the truth: confusion matrix, observed agreement, and the
chance-corrected agreement kappa = (p_o - p_e) / (1 - p_e) with p_e the
product-of-marginals chance term.
"""

import json
from dataclasses import dataclass

import numpy as np

from .data_model import encode_labels
from .partition import Partition
from .som import SomMap


class EvaluateError(ValueError):
    """Raised when a partition cannot be scored against the labels."""


@dataclass(frozen=True, eq=False)
class EvalReport:
    block_labels: dict[int, int]    # block id -> class id
    classes: list                   # class id -> class name
    confusion: np.ndarray           # rows = truth, cols = predicted
    p_o: float
    p_e: float
    kappa: float
    n_samples: int

    @property
    def accuracy(self) -> float:
        return self.p_o


def score(partition: Partition, som_map: SomMap, labels) -> EvalReport:
    """Label blocks by majority class and score the induced prediction.

    Majority ties go to the lowest class id; blocks holding no samples fall
    back to class 0 through the same rule.
    """
    if labels is None:
        raise EvaluateError("scoring needs class labels")
    classes, label_ids = encode_labels(labels)
    if len(label_ids) != som_map.n_samples:
        raise EvaluateError("labels do not cover the map's samples")
    if partition.block_of.shape != (som_map.rows, som_map.cols):
        raise EvaluateError("partition shape does not match the map")
    if partition.n_blocks < 1:
        raise EvaluateError("empty partition")
    n_classes = len(classes)

    block_counts = np.zeros((partition.n_blocks, n_classes), dtype=int)
    for pe in som_map.pes:
        b = int(partition.block_of[pe.r, pe.c])
        for i in pe.member_ids:
            block_counts[b, label_ids[i]] += 1
    block_labels = {b: int(np.argmax(block_counts[b])) for b in range(partition.n_blocks)}

    confusion = np.zeros((n_classes, n_classes), dtype=int)
    for pe in som_map.pes:
        pred = block_labels[int(partition.block_of[pe.r, pe.c])]
        for i in pe.member_ids:
            confusion[label_ids[i], pred] += 1

    n = int(confusion.sum())
    p_o = float(np.trace(confusion)) / n
    row = confusion.sum(axis=1) / n
    col = confusion.sum(axis=0) / n
    p_e = float(np.dot(row, col))
    kappa = 1.0 if p_e == 1.0 else (p_o - p_e) / (1.0 - p_e)
    return EvalReport(block_labels=block_labels, classes=classes, confusion=confusion,
                      p_o=p_o, p_e=p_e, kappa=kappa, n_samples=n)


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready form of a report; floats keep full precision."""
    return {
        "block_labels": {str(b): c for b, c in sorted(report.block_labels.items())},
        "classes": [str(c) for c in report.classes],
        "confusion": [[int(v) for v in row] for row in report.confusion],
        "p_o": report.p_o,
        "p_e": report.p_e,
        "kappa": report.kappa,
        "n_samples": report.n_samples,
    }


def render_report(report: EvalReport) -> str:
    """Deterministic text table with a machine-readable JSON footer."""
    names = [str(c) for c in report.classes]
    width = max([len(s) for s in names] + [6])
    lines = ["confusion matrix (rows = truth, cols = predicted)"]
    header = " " * (width + 2) + "  ".join(f"{s:>{width}}" for s in names)
    lines.append(header)
    for i, name in enumerate(names):
        row = "  ".join(f"{int(v):>{width}}" for v in report.confusion[i])
        lines.append(f"{name:>{width}}  {row}")
    lines.append("")
    lines.append(f"samples: {report.n_samples}")
    lines.append(f"blocks: {len(report.block_labels)}")
    lines.append("block labels: " + ", ".join(
        f"{b}->{names[c]}" for b, c in sorted(report.block_labels.items())))
    lines.append(f"accuracy: {report.p_o:.6f}")
    lines.append(f"p_e: {report.p_e:.6f}")
    lines.append(f"kappa: {report.kappa:.6f}")
    lines.append("#json " + json.dumps(report_to_dict(report), sort_keys=True))
    return "\n".join(lines) + "\n"
