"""Marginal-likelihood cost of constant-value blocks.

A block is a set of cells, each contributing a per-attribute mean m_i with
width sigma_i, modeled as noisy observations of one shared underlying value
per attribute.  The shared value is unknown; it carries a uniform prior of
width R and is integrated out.  Per attribute, each cell's likelihood factor
is (1/(sqrt(pi)*sigma_i)) * exp(-(m_i - x)^2 / sigma_i^2), so sigma is the
width in the exponent, not a conventional standard deviation.  Integrating
the product of N such factors against the flat prior gives

    L = pi^(-(N-1)/2) * (prod sigma_i)^(-1) * exp(-resid) * S^(-1/2) / R

with S = sum 1/sigma_i^2, X = (sum m_i/sigma_i^2)/S the precision-weighted
mean, and resid = sum (m_i - X)^2/sigma_i^2.  The block cost is -ln L summed
over attributes; lower cost means a better single-value fit.  The prior
factor 1/R appears once per block ("per_block", the default).  The
alternative "per_pe" convention raises the R and sqrt(pi) prior factors to
the power (N-1) instead; both are kept selectable because they penalize
extra blocks in opposite directions.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .data_model import AttributeSummary

if TYPE_CHECKING:
    from .partition import Partition
    from .som import PeStats, SomMap

logger = logging.getLogger(__name__)

RANGE_RULES = ("two_span", "two_max")
RANGE_EXPONENTS = ("per_block", "per_pe")


class CostError(ValueError):
    """Raised for invalid cost parameters or block inputs."""


def sqrt_scale(block_size: int) -> float:
    """Default block-size scale: square root of the cell count."""
    return math.sqrt(block_size)


def unit_scale(block_size: int) -> float:
    """Size-independent scale, for calibration tests."""
    return 1.0


N_SCALE_RULES: dict[str, Callable[[int], float]] = {
    "sqrt": sqrt_scale,
    "unit": unit_scale,
}


@dataclass(frozen=True)
class CostParams:
    """Range and width parameters of the block cost.

    R is the base per-attribute range of the flat prior; the effective range
    is f_R * R.  Cell widths are estimated as
    max(sigma_floor, f_sigma * sigma_const * n_scale_rule(N) * s) where s is
    the cell's observed sample standard deviation and N the block size.
    f_R and f_sigma are multiplicative sweep factors, 1 by default.

    Default calibration: unit size scale, sigma_const 1, and a floor of
    0.15 * span per attribute, so the floor is the operative width for
    typical cells and a cell's own scatter takes over only when larger.
    The block-size-scaled alternative (sqrt_scale, larger sigma_const) is
    fully supported but fragments real maps: scaling every member's width
    with block size adds a cost of about n*ln(2) per attribute to merging
    two n-cell blocks, which caps block growth regardless of how well the
    cell means agree.
    """

    R: np.ndarray
    sigma_floor: np.ndarray
    sigma_const: float = 1.0
    n_scale_rule: Callable[[int], float] = unit_scale
    range_rule: str = "two_max"
    range_exponent: str = "per_block"
    f_R: float = 1.0
    f_sigma: float = 1.0
    sigma_floor_frac: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float))
        object.__setattr__(self, "sigma_floor", np.asarray(self.sigma_floor, dtype=float))
        if self.R.ndim != 1 or np.any(self.R <= 0):
            raise CostError("R must be a strictly positive vector")
        if self.sigma_floor.shape != self.R.shape or np.any(self.sigma_floor <= 0):
            raise CostError("sigma_floor must be strictly positive, same shape as R")
        if self.sigma_const <= 0:
            raise CostError("sigma_const must be positive")
        if self.f_R <= 0 or self.f_sigma <= 0:
            raise CostError("f_R and f_sigma must be positive")
        if self.range_rule not in RANGE_RULES:
            raise CostError(f"range_rule must be one of {RANGE_RULES}")
        if self.range_exponent not in RANGE_EXPONENTS:
            raise CostError(f"range_exponent must be one of {RANGE_EXPONENTS}")

    @property
    def n_attributes(self) -> int:
        return self.R.shape[0]

    def effective_R(self) -> np.ndarray:
        return self.f_R * self.R

    def scaled(self, f_R: float = 1.0, f_sigma: float = 1.0) -> "CostParams":
        """Copy with sweep factors replaced (not compounded)."""
        return replace(self, f_R=f_R, f_sigma=f_sigma)

    def echo(self) -> dict:
        """Serializable summary for artifact provenance headers."""
        name = next((k for k, v in N_SCALE_RULES.items() if v is self.n_scale_rule),
                    getattr(self.n_scale_rule, "__name__", "custom"))
        return {
            "R": [float(v) for v in self.R],
            "sigma_floor": [float(v) for v in self.sigma_floor],
            "sigma_const": self.sigma_const,
            "sigma_floor_frac": self.sigma_floor_frac,
            "n_scale_rule": name,
            "range_rule": self.range_rule,
            "range_exponent": self.range_exponent,
            "f_R": self.f_R,
            "f_sigma": self.f_sigma,
        }


def params_from_summary(
    summary: AttributeSummary,
    *,
    range_rule: str = "two_max",
    range_exponent: str = "per_block",
    sigma_const: float = 1.0,
    sigma_floor_frac: float = 0.15,
    sigma_floor: np.ndarray | None = None,
    n_scale_rule: Callable[[int], float] = unit_scale,
    f_R: float = 1.0,
    f_sigma: float = 1.0,
) -> CostParams:
    """Build CostParams from observed attribute extremes.

    The base range is 2*(max-min) under two_span or 2*max under two_max, and
    the default width floor is sigma_floor_frac times the attribute span.
    """
    if range_rule == "two_span":
        if np.any(summary.spans <= 0):
            raise CostError("two_span range rule needs positive span on every attribute")
        base_R = 2.0 * summary.spans
    elif range_rule == "two_max":
        base_R = 2.0 * summary.maxs
    else:
        raise CostError(f"range_rule must be one of {RANGE_RULES}")
    if sigma_floor is None:
        if np.any(summary.spans <= 0):
            raise CostError("default sigma floor needs positive span on every attribute")
        sigma_floor = sigma_floor_frac * summary.spans
    return CostParams(
        R=base_R,
        sigma_floor=np.asarray(sigma_floor, dtype=float),
        sigma_const=sigma_const,
        n_scale_rule=n_scale_rule,
        range_rule=range_rule,
        range_exponent=range_exponent,
        f_R=f_R,
        f_sigma=f_sigma,
        sigma_floor_frac=sigma_floor_frac,
    )


@dataclass(frozen=True)
class BlockStat:
    """Sufficient statistics of one block, per attribute.

    S is the summed precision, X the precision-weighted mean and resid the
    weighted squared deviation about X; n is the block size (non-empty cells).
    """

    S: np.ndarray
    X: np.ndarray
    resid: np.ndarray
    n: int


def block_stat(means: np.ndarray, sigmas: np.ndarray) -> BlockStat:
    """Compute S, X and resid for an (N, M) table of means and widths.

    Sums use exact accumulation so results do not depend on member order.
    """
    means = np.atleast_2d(np.asarray(means, dtype=float))
    sigmas = np.atleast_2d(np.asarray(sigmas, dtype=float))
    if means.shape != sigmas.shape or means.size == 0:
        raise CostError("means and sigmas must be non-empty and congruent")
    if np.any(sigmas <= 0):
        raise CostError("all sigmas must be strictly positive")
    n, m = means.shape
    w = 1.0 / sigmas**2
    S = np.array([math.fsum(w[:, j]) for j in range(m)])
    X = np.array([math.fsum(w[:, j] * means[:, j]) for j in range(m)]) / S
    resid = np.array([math.fsum(w[:, j] * (means[:, j] - X[j]) ** 2) for j in range(m)])
    return BlockStat(S=S, X=X, resid=resid, n=n)


def sigma_estimate(pe: "PeStats", block_size: int, params: CostParams) -> np.ndarray:
    """Per-attribute width of one non-empty cell inside a block of given size.

    sigma = max(floor, f_sigma * sigma_const * n_scale_rule(block_size) * s);
    the floor absorbs cells whose observed s is zero.
    """
    if pe.n == 0:
        raise CostError("sigma_estimate needs a non-empty cell")
    if block_size < 1:
        raise CostError("block_size must be a positive integer")
    scale = params.f_sigma * params.sigma_const * params.n_scale_rule(block_size)
    return np.maximum(params.sigma_floor, scale * pe.std)


def range_estimate(summary: AttributeSummary, params: CostParams) -> np.ndarray:
    """Effective per-attribute range under the params' rule and sweep factor."""
    if params.range_rule == "two_span":
        if np.any(summary.spans <= 0):
            raise CostError("two_span range rule needs positive span on every attribute")
        return params.f_R * 2.0 * summary.spans
    return params.f_R * 2.0 * summary.maxs


def block_cost(members: Sequence[tuple[np.ndarray, np.ndarray]], params: CostParams) -> float:
    """Negative log marginal likelihood of one block.

    members is a sequence of (mean vector, sigma vector) pairs, one per
    non-empty cell.  Per attribute j, with stats S, X, resid over the block,

        per_block: C_j = ln(f_R R_j) + ((N-1)/2) ln(pi)
                         + sum_i ln(sigma_ij) + ln(S_j)/2 + resid_j
        per_pe:    C_j = (N-1) (ln(f_R R_j) + ln(pi)/2)
                         + sum_i ln(sigma_ij) + ln(S_j)/2 + resid_j

    and the returned cost is sum_j C_j.
    """
    if len(members) == 0:
        raise CostError("block must have at least one member")
    means = np.stack([np.asarray(m, dtype=float) for m, _ in members])
    sigmas = np.stack([np.asarray(s, dtype=float) for _, s in members])
    if means.shape[1] != params.n_attributes:
        raise CostError("member width does not match params.R")
    stat = block_stat(means, sigmas)
    n = stat.n
    log_R = np.log(params.effective_R())
    log_pi = math.log(math.pi)
    terms = []
    for j in range(params.n_attributes):
        sum_log_sigma = math.fsum(math.log(s) for s in sigmas[:, j])
        common = sum_log_sigma + 0.5 * math.log(stat.S[j]) + stat.resid[j]
        if params.range_exponent == "per_block":
            terms.append(log_R[j] + 0.5 * (n - 1) * log_pi + common)
        else:
            terms.append((n - 1) * (log_R[j] + 0.5 * log_pi) + common)
    return math.fsum(terms)


def block_cost_for_pes(pes: Sequence["PeStats"], params: CostParams) -> float:
    """Cost of a set of grid cells treated as one block.

    Empty cells contribute nothing; the per-cell sigma uses the count of
    non-empty cells as the block size.  A block with no non-empty cell
    costs 0.
    """
    occupied = [pe for pe in pes if pe.n > 0]
    if not occupied:
        return 0.0
    n = len(occupied)
    members = [(pe.mean, sigma_estimate(pe, n, params)) for pe in occupied]
    return block_cost(members, params)


def partition_cost(partition: "Partition", som_map: "SomMap", params: CostParams) -> float:
    """Total cost of a partition: sum of block costs over its blocks.

    Blocks made only of empty cells contribute 0 and are flagged at debug
    level.
    """
    costs = []
    for block_id in range(partition.n_blocks):
        pes = [som_map.pe(r, c)
               for r, c in zip(*np.nonzero(partition.block_of == block_id))]
        if all(pe.n == 0 for pe in pes):
            logger.debug("block %d has no non-empty cells; contributes 0", block_id)
            costs.append(0.0)
        else:
            costs.append(block_cost_for_pes(pes, params))
    return math.fsum(costs)
