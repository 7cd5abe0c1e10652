"""Kohonen map training with a conscience bias, plus per-cell statistics.

Training is plain online SOM: per sample, pick the winning cell by biased
squared distance, then pull every cell inside a rectangular neighborhood of
the current half-width toward the sample.  The conscience bias tracks each
cell's win frequency and handicaps frequent winners so that no cell ends up
representing too much of the data.  All randomness (weight init, per-epoch
presentation order) flows from one 64-bit seed through numpy's PCG64
generator, so a (dataset, config) pair fully determines the result.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .data_model import Dataset

MAP_FORMAT_VERSION = 1


class SomError(ValueError):
    """Raised for invalid configs, divergent training, or bad map files."""


@dataclass(frozen=True)
class SomConfig:
    rows: int
    cols: int
    epochs: int = 300
    lr_start: float = 0.5
    lr_end: float = 0.01
    # (epoch fraction, half-width) pairs; half-width 1 = 3x3 neighborhood.
    # The wide first phase organizes the map globally before cells specialize.
    neighborhood_schedule: tuple = ((0.0, 2), (0.25, 1), (0.6, 0))
    conscience_beta: float = 1e-4
    conscience_gamma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.rows * self.cols < 2:
            raise SomError("grid must have at least 2 cells")
        if self.epochs < 1:
            raise SomError("epochs must be positive")
        if not (self.lr_start >= self.lr_end > 0):
            raise SomError("need lr_start >= lr_end > 0")
        if self.conscience_beta < 0 or self.conscience_gamma < 0:
            raise SomError("conscience constants must be non-negative")
        if not (0 <= int(self.seed) < 2**64):
            raise SomError("seed must fit in 64 unsigned bits")
        sched = tuple((float(f), int(h)) for f, h in self.neighborhood_schedule)
        if not sched or sched[0][0] != 0.0:
            raise SomError("neighborhood schedule must start at epoch fraction 0")
        fracs = [f for f, _ in sched]
        widths = [h for _, h in sched]
        if fracs != sorted(fracs) or any(h < 0 for h in widths):
            raise SomError("schedule fractions must ascend; half-widths non-negative")
        if widths != sorted(widths, reverse=True):
            raise SomError("half-widths must be non-increasing")
        object.__setattr__(self, "neighborhood_schedule", sched)

    def half_width_at(self, epoch: int) -> int:
        frac = epoch / self.epochs
        hw = self.neighborhood_schedule[0][1]
        for f, h in self.neighborhood_schedule:
            if f <= frac:
                hw = h
        return hw


@dataclass(frozen=True, eq=False)
class PeStats:
    """One grid cell: weight vector plus statistics of the samples it won."""

    r: int
    c: int
    weight: np.ndarray
    member_ids: tuple[int, ...]
    n: int
    mean: np.ndarray | None   # absent when the cell is empty
    std: np.ndarray | None    # per-attribute sample std, 0 when n <= 1

    def __eq__(self, other):
        if not isinstance(other, PeStats):
            return NotImplemented
        return (
            (self.r, self.c, self.member_ids, self.n) == (other.r, other.c, other.member_ids, other.n)
            and np.array_equal(self.weight, other.weight)
            and _opt_array_equal(self.mean, other.mean)
            and _opt_array_equal(self.std, other.std)
        )


def _opt_array_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


@dataclass(frozen=True, eq=False)
class SomMap:
    rows: int
    cols: int
    pes: tuple[PeStats, ...]   # row-major
    config: SomConfig

    def pe(self, r: int, c: int) -> PeStats:
        return self.pes[r * self.cols + c]

    @property
    def n_attributes(self) -> int:
        return self.pes[0].weight.shape[0]

    @property
    def n_samples(self) -> int:
        return sum(pe.n for pe in self.pes)

    def __eq__(self, other):
        if not isinstance(other, SomMap):
            return NotImplemented
        return (
            (self.rows, self.cols, self.config) == (other.rows, other.cols, other.config)
            and all(a == b for a, b in zip(self.pes, other.pes))
        )


def _initial_weights(rng: np.random.Generator, samples: np.ndarray, n_pes: int) -> np.ndarray:
    # Random data rows (with replacement) keep initial weights in data range.
    idx = rng.integers(0, samples.shape[0], size=n_pes)
    return samples[idx].astype(float).copy()


def _stats_from_weights(dataset: Dataset, config: SomConfig, weights: np.ndarray) -> SomMap:
    """Assign every sample to its unbiased nearest cell and build PeStats."""
    samples = dataset.samples
    d2 = ((samples[:, None, :] - weights[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)     # ties: lowest row-major cell index
    pes = []
    for p in range(config.rows * config.cols):
        ids = tuple(int(i) for i in np.nonzero(nearest == p)[0])
        member = samples[list(ids)]
        n = len(ids)
        if n == 0:
            mean, std = None, None
        else:
            mean = member.mean(axis=0)
            std = member.std(axis=0, ddof=1) if n > 1 else np.zeros(samples.shape[1])
        pes.append(PeStats(
            r=p // config.cols, c=p % config.cols,
            weight=weights[p].copy(), member_ids=ids, n=n, mean=mean, std=std,
        ))
    return SomMap(rows=config.rows, cols=config.cols, pes=tuple(pes), config=config)


def initialize(dataset: Dataset, config: SomConfig) -> SomMap:
    """Untrained map: seeded initial weights with samples assigned to them."""
    rng = np.random.default_rng(config.seed)
    weights = _initial_weights(rng, dataset.samples, config.rows * config.cols)
    return _stats_from_weights(dataset, config, weights)


def train(dataset: Dataset, config: SomConfig) -> SomMap:
    """Train the map on the dataset; deterministic in (dataset, config).

    Winner selection during training subtracts the conscience bias
    gamma * (1/n_cells - f_i) from each cell's squared distance, where f_i is
    the running win frequency, updated per presentation as
    f_i += beta * ((won ? 1 : 0) - f_i).  The learning rate decays linearly
    from lr_start to lr_end across epochs; presentation order is reshuffled
    from the seeded generator every epoch.  Final statistics come from an
    unbiased nearest-cell assignment pass.
    """
    samples = dataset.samples
    n, m = samples.shape
    n_pes = config.rows * config.cols
    rng = np.random.default_rng(config.seed)

    weights = _initial_weights(rng, samples, n_pes)
    pe_r = np.arange(n_pes) // config.cols
    pe_c = np.arange(n_pes) % config.cols
    freq = np.full(n_pes, 1.0 / n_pes)
    beta, gamma = config.conscience_beta, config.conscience_gamma

    for epoch in range(config.epochs):
        if config.epochs > 1:
            lr = config.lr_start + (config.lr_end - config.lr_start) * epoch / (config.epochs - 1)
        else:
            lr = config.lr_start
        hw = config.half_width_at(epoch)
        for idx in rng.permutation(n):
            x = samples[idx]
            d2 = ((weights - x) ** 2).sum(axis=1)
            winner = int(np.argmin(d2 - gamma * (1.0 / n_pes - freq)))
            freq += beta * (-freq)
            freq[winner] += beta
            hood = (np.abs(pe_r - pe_r[winner]) <= hw) & (np.abs(pe_c - pe_c[winner]) <= hw)
            weights[hood] += lr * (x - weights[hood])

    if not np.all(np.isfinite(weights)):
        raise SomError("non-finite weight encountered; learning rate diverged")
    return _stats_from_weights(dataset, config, weights)


def quantization_error(som_map: SomMap, dataset: Dataset) -> float:
    """Mean Euclidean distance from each sample to its own cell's weight."""
    if som_map.n_attributes != dataset.n_attributes:
        raise SomError("map and dataset attribute counts differ")
    if som_map.n_samples != dataset.n_samples:
        raise SomError("map was not built from a dataset of this size")
    total = 0.0
    for pe in som_map.pes:
        for i in pe.member_ids:
            total += float(np.linalg.norm(dataset.samples[i] - pe.weight))
    return total / dataset.n_samples


def _config_to_dict(config: SomConfig) -> dict:
    return {
        "rows": config.rows,
        "cols": config.cols,
        "epochs": config.epochs,
        "lr_start": config.lr_start,
        "lr_end": config.lr_end,
        "neighborhood_schedule": [[f, h] for f, h in config.neighborhood_schedule],
        "conscience_beta": config.conscience_beta,
        "conscience_gamma": config.conscience_gamma,
        "seed": config.seed,
    }


def _config_from_dict(d: dict) -> SomConfig:
    return SomConfig(
        rows=d["rows"], cols=d["cols"], epochs=d["epochs"],
        lr_start=d["lr_start"], lr_end=d["lr_end"],
        neighborhood_schedule=tuple((f, h) for f, h in d["neighborhood_schedule"]),
        conscience_beta=d["conscience_beta"], conscience_gamma=d["conscience_gamma"],
        seed=d["seed"],
    )


def map_to_json(som_map: SomMap) -> str:
    """Deterministic JSON text for a map (exact float round-trip)."""
    doc = {
        "format_version": MAP_FORMAT_VERSION,
        "rows": som_map.rows,
        "cols": som_map.cols,
        "seed": som_map.config.seed,
        "config": _config_to_dict(som_map.config),
        "pes": [
            {
                "r": pe.r,
                "c": pe.c,
                "weight": [float(v) for v in pe.weight],
                "member_ids": list(pe.member_ids),
                "n": pe.n,
                "mean": None if pe.mean is None else [float(v) for v in pe.mean],
                "std": None if pe.std is None else [float(v) for v in pe.std],
            }
            for pe in som_map.pes
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_map(som_map: SomMap, path) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as f:
        f.write(map_to_json(som_map))
    os.replace(tmp, path)


def load_map(path) -> SomMap:
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise SomError(f"{path}: malformed map file: {e}") from None
    if not isinstance(doc, dict) or doc.get("format_version") != MAP_FORMAT_VERSION:
        raise SomError(f"{path}: unsupported map format version")
    try:
        config = _config_from_dict(doc["config"])
        pes = []
        for rec in doc["pes"]:
            pes.append(PeStats(
                r=rec["r"], c=rec["c"],
                weight=np.array(rec["weight"], dtype=float),
                member_ids=tuple(rec["member_ids"]),
                n=rec["n"],
                mean=None if rec["mean"] is None else np.array(rec["mean"], dtype=float),
                std=None if rec["std"] is None else np.array(rec["std"], dtype=float),
            ))
        som_map = SomMap(rows=doc["rows"], cols=doc["cols"], pes=tuple(pes), config=config)
    except (KeyError, TypeError) as e:
        raise SomError(f"{path}: malformed map file: {e}") from None
    if len(som_map.pes) != som_map.rows * som_map.cols:
        raise SomError(f"{path}: cell list does not tile the grid")
    return som_map
