"""Scoring and selection machinery for the acquisition step.

The class-aware scorer turns per-class performance gaps into normalized
selection weights, weights each pixel's entropy by the probability mass it
puts on struggling classes, averages that over the image, and applies an
adaptive mean-plus-gamma-sigma threshold before taking the top-k samples.
Plain entropy, uniform-random, and greedy k-center selection are provided
as baseline strategies for comparison runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .metrics import ClassIouReport
from .types import PROB_EPS, ProbMap

# Weighted-entropy variants. "literal" multiplies the pixel entropy by the
# probability-weighted mean class weight; "weighted_logsum" folds the weights
# into the log sum instead (-sum_k w_k p_k ln p_k).
EQ_VARIANTS = ("literal", "weighted_logsum")

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Normalized per-class selection weights for one cycle.

    ``weights[c]`` is NaN for classes whose IoU was undefined; the defined
    entries are non-negative and sum to 1 within ``WEIGHT_SUM_TOL``.
    """

    weights: np.ndarray
    alpha: float
    cycle: int

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        defined = w[~np.isnan(w)]
        if defined.size == 0:
            raise ValueError("no defined classes in weight vector")
        if float(defined.min()) < 0.0:
            raise ValueError("weights must be non-negative")
        total = float(defined.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"defined weights must sum to 1, got {total!r}")
        arr = w.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @classmethod
    def uniform(cls, num_classes: int, alpha: float = 1.0, cycle: int = 0) -> "WeightVector":
        return cls(np.full(num_classes, 1.0 / num_classes), alpha, cycle)

    @property
    def num_classes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def dense(self) -> np.ndarray:
        """Weights with undefined classes as 0; the form used for scoring."""
        return np.nan_to_num(self.weights, nan=0.0)

    def tolist(self) -> list:
        return [None if np.isnan(v) else float(v) for v in self.weights]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightVector):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.cycle == other.cycle
            and bool(np.array_equal(self.weights, other.weights, equal_nan=True))
        )


def dynamic_weights(report: ClassIouReport, alpha: float) -> WeightVector:
    """Gap-driven class weights: w_c = gap_c**alpha / sum_j gap_j**alpha.

    Undefined classes keep no weight. When every defined gap is 0 (a perfect
    model), the weights fall back to uniform over the defined classes.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    defined = report.defined_classes
    if not defined:
        raise ValueError("no defined classes: cannot compute weights")
    weights = np.full(report.num_classes, np.nan)
    gaps = np.array([report.gap[c] for c in defined], dtype=np.float64)
    if float(gaps.max()) == 0.0:
        weights[list(defined)] = 1.0 / len(defined)
    else:
        powered = gaps**alpha
        weights[list(defined)] = powered / powered.sum()
    return WeightVector(weights, alpha=alpha, cycle=report.cycle)


def _clamped_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.clip(p, PROB_EPS, 1.0))


def pixel_entropy(p: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy -sum_k p_k ln p_k of one pixel's distribution.

    Probabilities are clamped to [PROB_EPS, 1] inside the logarithm only, so
    0 * ln 0 contributes exactly 0.
    """
    arr = np.asarray(p, dtype=np.float64)
    return float(-(arr * _clamped_log(arr)).sum())


def entropy_map(probs: np.ndarray) -> np.ndarray:
    """Per-pixel entropy of an (H, W, K) probability array."""
    arr = np.asarray(probs, dtype=np.float64)
    return -(arr * _clamped_log(arr)).sum(axis=2)


def dynamic_pixel_uncertainty(
    p: Sequence[float] | np.ndarray, w: WeightVector, variant: str = "literal"
) -> float:
    """Class-weighted pixel uncertainty.

    literal:          sum_k p_k * w_k * H(p)
    weighted_logsum:  -sum_k w_k * p_k * ln p_k
    """
    if variant not in EQ_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    arr = np.asarray(p, dtype=np.float64)
    dense = w.dense
    if arr.shape[0] != dense.shape[0]:
        raise ValueError("class count mismatch between distribution and weights")
    if variant == "literal":
        h = pixel_entropy(arr)
        return float((arr * dense * h).sum())
    return float(-(dense * arr * _clamped_log(arr)).sum())


def uncertainty_map(probs: np.ndarray, w: WeightVector, variant: str = "literal") -> np.ndarray:
    """Vectorized per-pixel weighted uncertainty over an (H, W, K) array."""
    if variant not in EQ_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    arr = np.asarray(probs, dtype=np.float64)
    dense = w.dense
    if variant == "literal":
        return entropy_map(arr) * (arr * dense).sum(axis=2)
    return -(arr * dense * _clamped_log(arr)).sum(axis=2)


@dataclass(frozen=True, eq=False)
class DcauScore:
    """Image-level acquisition score, optionally with its per-pixel map."""

    sample_id: str
    score: float
    num_pixels: int
    pixel_dyn: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.score >= 0.0:
            raise ValueError(f"score must be >= 0, got {self.score!r}")
        if self.pixel_dyn is not None:
            arr = np.ascontiguousarray(np.asarray(self.pixel_dyn, dtype=np.float64))
            if arr.size != self.num_pixels:
                raise ValueError("pixel map size does not match num_pixels")
            arr.setflags(write=False)
            object.__setattr__(self, "pixel_dyn", arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DcauScore):
            return NotImplemented
        return (self.sample_id, self.score, self.num_pixels) == (
            other.sample_id,
            other.score,
            other.num_pixels,
        )


def dcau_score(
    pm: ProbMap, w: WeightVector, variant: str = "literal", keep_pixel_map: bool = False
) -> DcauScore:
    """Mean weighted pixel uncertainty over all pixels of ``pm``.

    The per-pixel map is retained only on request (it is only needed when an
    annotation console wants to display it)."""
    if w.num_classes != pm.num_classes:
        raise ValueError("class count mismatch between probability map and weights")
    pixel = uncertainty_map(pm.probs, w, variant)
    return DcauScore(
        sample_id=pm.id,
        score=float(pixel.mean()),
        num_pixels=pm.num_pixels,
        pixel_dyn=pixel if keep_pixel_map else None,
    )


def baseline_entropy_score(pm: ProbMap, keep_pixel_map: bool = False) -> DcauScore:
    """Unweighted mean pixel entropy; the plain uncertainty-sampling baseline."""
    pixel = entropy_map(pm.probs)
    return DcauScore(
        sample_id=pm.id,
        score=float(pixel.mean()),
        num_pixels=pm.num_pixels,
        pixel_dyn=pixel if keep_pixel_map else None,
    )


@dataclass(frozen=True)
class ThresholdStats:
    """Pool score statistics and the resulting selection threshold."""

    mean: float
    std: float
    gamma: float
    theta: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "gamma": self.gamma, "theta": self.theta}

    @classmethod
    def from_dict(cls, payload: dict) -> "ThresholdStats":
        return cls(
            mean=float(payload["mean"]),
            std=float(payload["std"]),
            gamma=float(payload["gamma"]),
            theta=float(payload["theta"]),
        )


def adaptive_threshold(scores: Sequence[DcauScore], gamma: float) -> ThresholdStats:
    """theta = mean + gamma * population std of the pool scores."""
    if not scores:
        raise ValueError("empty pool: cannot compute threshold")
    values = np.array([s.score for s in scores], dtype=np.float64)
    mean = float(values.mean())
    std = float(np.sqrt(np.mean((values - mean) ** 2)))
    return ThresholdStats(mean=mean, std=std, gamma=float(gamma), theta=mean + gamma * std)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of thresholding plus top-k selection.

    ``candidate_ids`` are the samples at or above the threshold, score
    descending. ``selected_ids`` always holds min(k, pool) ids; when fewer
    than k candidates clear the threshold the remainder is filled with the
    best below-threshold samples and counted in ``filled_below_threshold``.
    """

    candidate_ids: tuple[str, ...]
    selected_ids: tuple[str, ...]
    filled_below_threshold: int


def select(scores: Sequence[DcauScore], stats: ThresholdStats | None, k: int) -> SelectionResult:
    """Pick the k best-scoring samples, preferring those above the threshold.

    Ties are broken by ascending sample id. ``stats=None`` disables the
    threshold (plain top-k), as used by the entropy baseline.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ordered = sorted(scores, key=lambda s: (-s.score, s.sample_id))
    if stats is None:
        candidates = ordered
        below: list[DcauScore] = []
    else:
        candidates = [s for s in ordered if s.score >= stats.theta]
        below = [s for s in ordered if s.score < stats.theta]
    k_eff = min(k, len(ordered))
    selected = [s.sample_id for s in candidates[:k_eff]]
    filled = k_eff - len(selected)
    if filled > 0:
        selected.extend(s.sample_id for s in below[:filled])
    return SelectionResult(
        candidate_ids=tuple(s.sample_id for s in candidates),
        selected_ids=tuple(selected),
        filled_below_threshold=filled,
    )


def baseline_random_select(pool_ids: Iterable[str], k: int, seed) -> tuple[str, ...]:
    """Uniform sample without replacement, deterministic for a given seed."""
    ids = sorted(pool_ids)
    if k <= 0:
        return ()
    rng = np.random.default_rng(seed)
    take = min(k, len(ids))
    chosen = rng.choice(len(ids), size=take, replace=False)
    return tuple(sorted(ids[int(i)] for i in chosen))


def mean_probability_features(pm: ProbMap) -> np.ndarray:
    """Image-level embedding for the coreset baseline: the mean class
    probability vector over all pixels."""
    return pm.probs.reshape(-1, pm.num_classes).mean(axis=0)


def baseline_coreset_select(
    features: Mapping[str, np.ndarray], labeled_ids: Iterable[str], k: int
) -> tuple[str, ...]:
    """Greedy k-center: repeatedly take the unlabeled sample farthest (in
    minimum Euclidean distance) from the labeled-plus-selected set.

    Ties go to the ascending-id-first sample. With no labeled samples the
    id-smallest pool sample seeds the selection.
    """
    labeled = set(labeled_ids)
    pool = sorted(i for i in features if i not in labeled)
    if k <= 0 or not pool:
        return ()
    matrix = np.stack([np.asarray(features[i], dtype=np.float64) for i in pool])
    anchors = [np.asarray(features[i], dtype=np.float64) for i in sorted(labeled)]
    if anchors:
        dists = np.min(
            np.linalg.norm(matrix[:, None, :] - np.stack(anchors)[None, :, :], axis=2), axis=1
        )
    else:
        dists = np.full(len(pool), np.inf)

    selected: list[str] = []
    remaining = np.ones(len(pool), dtype=bool)
    while len(selected) < min(k, len(pool)):
        masked = np.where(remaining, dists, -np.inf)
        j = int(np.argmax(masked))  # first max = smallest id, pool is id-sorted
        selected.append(pool[j])
        remaining[j] = False
        new_d = np.linalg.norm(matrix - matrix[j], axis=1)
        dists = np.minimum(dists, new_d)
    return tuple(selected)
