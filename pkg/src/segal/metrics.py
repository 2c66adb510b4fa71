"""Confusion-matrix accumulation and per-class IoU / gap reporting.

A class can be absent from both prediction and ground truth on the
evaluation set (tp = fp = fn = 0). Its IoU is then undefined: it is reported
as None, excluded from the mean, and receives no selection weight downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Mask, ProbMap


@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    """Per-class true-positive / false-positive / false-negative pixel counts."""

    num_classes: int
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.shape != (self.num_classes,):
                raise ValueError(f"{name} must have shape ({self.num_classes},)")
            if int(arr.min(initial=0)) < 0:
                raise ValueError(f"{name} contains negative counts")
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, num_classes: int) -> "ConfusionCounts":
        z = np.zeros(num_classes, dtype=np.int64)
        return cls(num_classes, z.copy(), z.copy(), z.copy())

    def merge(self, other: "ConfusionCounts") -> "ConfusionCounts":
        """Exact integer addition; associative, so per-sample accumulation can
        run in parallel and be merged in any order."""
        if other.num_classes != self.num_classes:
            raise ValueError("class count mismatch")
        return ConfusionCounts(
            self.num_classes, self.tp + other.tp, self.fp + other.fp, self.fn + other.fn
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionCounts):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and bool(np.array_equal(self.tp, other.tp))
            and bool(np.array_equal(self.fp, other.fp))
            and bool(np.array_equal(self.fn, other.fn))
        )


@dataclass(frozen=True)
class ClassIouReport:
    """Per-class IoU and performance gap for one evaluation pass.

    ``iou[c]`` is None when class c never occurs in prediction or truth;
    ``gap[c] = 1 - iou[c]`` wherever defined; ``miou`` averages defined
    classes only (None when nothing is defined).
    """

    cycle: int
    iou: tuple
    gap: tuple
    miou: float | None

    @property
    def num_classes(self) -> int:
        return len(self.iou)

    @property
    def defined_classes(self) -> tuple[int, ...]:
        return tuple(c for c, v in enumerate(self.iou) if v is not None)

    def to_dict(self) -> dict:
        return {"cycle": self.cycle, "iou": list(self.iou), "gap": list(self.gap), "miou": self.miou}

    @classmethod
    def from_dict(cls, payload: dict) -> "ClassIouReport":
        return cls(
            cycle=int(payload["cycle"]),
            iou=tuple(payload["iou"]),
            gap=tuple(payload["gap"]),
            miou=payload["miou"],
        )


def predict_mask(pm: ProbMap) -> Mask:
    """Hard prediction: per-pixel argmax, ties broken by the lowest class index."""
    return Mask(pm.id, np.argmax(pm.probs, axis=2).astype(np.int32))


def accumulate(conf: ConfusionCounts, pred: Mask, truth: Mask) -> ConfusionCounts:
    """Add one sample's pixels to the confusion counts."""
    if (pred.height, pred.width) != (truth.height, truth.width):
        raise ValueError(
            f"shape mismatch: pred {pred.height}x{pred.width} vs truth {truth.height}x{truth.width}"
        )
    k = conf.num_classes
    t = truth.labels.reshape(-1).astype(np.int64)
    p = pred.labels.reshape(-1).astype(np.int64)
    if int(t.max()) >= k or int(p.max()) >= k:
        raise ValueError(f"label out of range for {k} classes")
    joint = np.bincount(t * k + p, minlength=k * k).reshape(k, k)
    diag = np.diag(joint)
    return conf.merge(
        ConfusionCounts(k, diag, joint.sum(axis=0) - diag, joint.sum(axis=1) - diag)
    )


def iou_report(conf: ConfusionCounts, cycle: int) -> ClassIouReport:
    """IoU per class (tp / (tp + fp + fn)), its gap, and the mean over defined classes."""
    iou: list[float | None] = []
    gap: list[float | None] = []
    for c in range(conf.num_classes):
        denom = int(conf.tp[c] + conf.fp[c] + conf.fn[c])
        if denom == 0:
            iou.append(None)
            gap.append(None)
        else:
            value = float(conf.tp[c]) / float(denom)
            iou.append(value)
            gap.append(1.0 - value)
    defined = [v for v in iou if v is not None]
    miou = float(np.mean(defined)) if defined else None
    return ClassIouReport(cycle=cycle, iou=tuple(iou), gap=tuple(gap), miou=miou)
