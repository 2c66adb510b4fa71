"""Built-in segmentation learner: per-pixel multinomial logistic regression.

This stands in for a full segmentation network at desk scale. The contract
(``fit`` / ``predict_proba``) is the extension point for framework-backed
learners; anything honoring it can drive the selection loop.

Pixels are featurized either as their raw channel values or as raw channels
concatenated with a 3x3 local mean (zero padding at borders), which gives
the linear model minimal spatial context. Training is plain mini-batch
gradient descent on unweighted cross-entropy; class imbalance is left for
the acquisition policy to deal with, by design.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .types import Image, ProbMap

FEATURE_MODES = ("raw", "raw+local_mean3x3")

_CKPT_MAGIC = b"SGLR"
_CKPT_VERSION = 1


@dataclass(frozen=True)
class LearnerConfig:
    learning_rate: float = 2.0
    epochs: int = 12
    batch_pixels: int = 2048
    feature_mode: str = "raw+local_mean3x3"
    seed: int = 0
    warm_start: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_pixels < 1:
            raise ValueError(f"batch_pixels must be >= 1, got {self.batch_pixels}")
        if self.feature_mode not in FEATURE_MODES:
            raise ValueError(f"feature_mode must be one of {FEATURE_MODES}, got {self.feature_mode!r}")


def feature_dim(channels: int, feature_mode: str) -> int:
    if feature_mode not in FEATURE_MODES:
        raise ValueError(f"unknown feature_mode {feature_mode!r}")
    return channels if feature_mode == "raw" else 2 * channels


@dataclass(frozen=True, eq=False)
class LearnerState:
    """Per-class linear coefficients over the pixel feature vector.

    ``loss_history`` carries the post-epoch training losses from the fit that
    produced this state; it is diagnostic only and not checkpointed.
    """

    weights: np.ndarray
    bias: np.ndarray
    trained_on: int
    feature_mode: str
    loss_history: tuple = ()

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.bias, dtype=np.float64))
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ValueError("weights must be (K, d) with bias (K,)")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ValueError("learner state contains non-finite values")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @classmethod
    def zeros(cls, num_classes: int, channels: int, feature_mode: str) -> "LearnerState":
        d = feature_dim(channels, feature_mode)
        return cls(np.zeros((num_classes, d)), np.zeros(num_classes), 0, feature_mode)

    @property
    def num_classes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.weights.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LearnerState):
            return NotImplemented
        return (
            self.trained_on == other.trained_on
            and self.feature_mode == other.feature_mode
            and bool(np.array_equal(self.weights, other.weights))
            and bool(np.array_equal(self.bias, other.bias))
        )


def _local_mean3(data: np.ndarray) -> np.ndarray:
    # 3x3 box mean with zero padding; borders average in the padded zeros.
    padded = np.pad(data, ((1, 1), (1, 1), (0, 0)))
    h, w = data.shape[0], data.shape[1]
    total = np.zeros_like(data, dtype=np.float64)
    for dy in range(3):
        for dx in range(3):
            total += padded[dy : dy + h, dx : dx + w]
    return total / 9.0


def pixel_features(img: Image, feature_mode: str) -> np.ndarray:
    """Feature matrix of shape (H*W, d) for one image."""
    data = np.asarray(img.data, dtype=np.float64)
    if feature_mode == "raw":
        feats = data
    elif feature_mode == "raw+local_mean3x3":
        feats = np.concatenate([data, _local_mean3(data)], axis=2)
    else:
        raise ValueError(f"unknown feature_mode {feature_mode!r}")
    return feats.reshape(-1, feats.shape[2])


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=1, keepdims=True)


def fit_arrays(
    state: LearnerState, x: np.ndarray, y: np.ndarray, cfg: LearnerConfig, trained_on: int
) -> LearnerState:
    """Gradient-descent core over a prebuilt (pixels, features) matrix.

    The per-epoch loss is the batch-size-weighted mean of the mini-batch
    cross-entropies observed during that epoch.
    """
    if x.shape[1] != state.feature_dim:
        raise ValueError(
            f"feature dimension mismatch: data has {x.shape[1]}, state expects {state.feature_dim}"
        )
    k = state.num_classes
    if int(y.max()) >= k:
        raise ValueError(f"label out of range for {k} classes")

    w = state.weights.copy() if cfg.warm_start else np.zeros_like(state.weights)
    b = state.bias.copy() if cfg.warm_start else np.zeros_like(state.bias)
    rng = np.random.default_rng(cfg.seed)
    n = x.shape[0]
    losses = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_pixels):
            idx = perm[start : start + cfg.batch_pixels]
            xb, yb = x[idx], y[idx]
            rows = np.arange(xb.shape[0])
            probs = _softmax(xb @ w.T + b)
            loss_sum += float(-np.log(np.clip(probs[rows, yb], 1e-12, None)).sum())
            probs[rows, yb] -= 1.0
            w -= cfg.learning_rate * (probs.T @ xb) / xb.shape[0]
            b -= cfg.learning_rate * probs.mean(axis=0)
        loss = loss_sum / n
        if not np.isfinite(loss):
            raise RuntimeError(
                f"non-finite training loss at epoch {epoch + 1} "
                f"(learning_rate={cfg.learning_rate}, batch_pixels={cfg.batch_pixels})"
            )
        losses.append(loss)
    return LearnerState(w, b, trained_on=trained_on, feature_mode=cfg.feature_mode,
                        loss_history=tuple(losses))


def fit(state: LearnerState, labeled, cfg: LearnerConfig) -> LearnerState:
    """Mini-batch gradient descent on mean per-pixel cross-entropy.

    Deterministic for fixed (data, cfg, seed). With ``warm_start=False`` the
    coefficients restart from zero, so retraining is reproducible regardless
    of what the incoming state was trained on.
    """
    labeled = list(labeled)
    if not labeled:
        raise ValueError("labeled set must not be empty")
    if cfg.feature_mode != state.feature_mode:
        raise ValueError(
            f"feature mode mismatch: state has {state.feature_mode!r}, config has {cfg.feature_mode!r}"
        )
    x = np.concatenate([pixel_features(img, cfg.feature_mode) for img, _ in labeled])
    y = np.concatenate([np.asarray(mask.labels, dtype=np.int64).reshape(-1) for _, mask in labeled])
    return fit_arrays(state, x, y, cfg, trained_on=len(labeled))


def predict_proba_features(
    state: LearnerState, feats: np.ndarray, sample_id: str, height: int, width: int
) -> ProbMap:
    """Prediction core over a precomputed feature matrix."""
    if feats.shape[1] != state.feature_dim:
        raise ValueError(
            f"feature dimension mismatch: image yields {feats.shape[1]}, state expects {state.feature_dim}"
        )
    probs = _softmax(feats @ state.weights.T + state.bias)
    return ProbMap.from_raw(sample_id, probs.reshape(height, width, state.num_classes))


def predict_proba(state: LearnerState, img: Image) -> ProbMap:
    """Per-pixel softmax over the linear class scores."""
    feats = pixel_features(img, state.feature_mode)
    return predict_proba_features(state, feats, img.id, img.height, img.width)


def save_state(state: LearnerState, path) -> None:
    """Checkpoint layout (little-endian):

    magic ``SGLR`` (4 bytes), version u32, num_classes u32, feature_dim u32,
    feature_mode u8 (0 = raw, 1 = raw+local_mean3x3), trained_on u64, then
    weights as float64 row-major (K * d values) followed by bias (K values).
    """
    mode_code = FEATURE_MODES.index(state.feature_mode)
    header = _CKPT_MAGIC + struct.pack(
        "<IIIBQ", _CKPT_VERSION, state.num_classes, state.feature_dim, mode_code, state.trained_on
    )
    path = Path(path)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(state.weights.astype("<f8").tobytes())
        fh.write(state.bias.astype("<f8").tobytes())
    tmp.replace(path)


def load_state(path) -> LearnerState:
    raw = Path(path).read_bytes()
    if raw[:4] != _CKPT_MAGIC:
        raise ValueError(f"{path}: not a learner checkpoint")
    version, k, d, mode_code, trained_on = struct.unpack("<IIIBQ", raw[4 : 4 + 21])
    if version != _CKPT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    offset = 4 + 21
    weights = np.frombuffer(raw, dtype="<f8", count=k * d, offset=offset).reshape(k, d)
    bias = np.frombuffer(raw, dtype="<f8", count=k, offset=offset + k * d * 8)
    return LearnerState(weights.copy(), bias.copy(), trained_on, FEATURE_MODES[mode_code])
