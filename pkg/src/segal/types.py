"""Raster primitives shared across the package.

Images carry per-channel values normalized to [0, 1], masks carry integer
class indices, probability maps carry one class distribution per pixel.
All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Floor applied to probabilities before any logarithm or renormalization.
PROB_EPS = 1e-12

# Per-pixel probability rows must sum to 1 within this tolerance.
ROW_SUM_TOL = 1e-6


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Image:
    """Multi-channel raster of shape (height, width, channels), values in [0, 1]."""

    id: str
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim != 3 or data.size == 0:
            raise ValueError(
                f"image {self.id!r}: expected non-empty (H, W, C) array, got shape {data.shape}"
            )
        if float(data.min()) < 0.0 or float(data.max()) > 1.0:
            raise ValueError(f"image {self.id!r}: channel values must lie in [0, 1]")
        object.__setattr__(self, "data", _readonly(data))

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return (
            self.id == other.id
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )


@dataclass(frozen=True, eq=False)
class Mask:
    """Index mask of shape (height, width); each pixel holds a class index."""

    id: str
    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or labels.size == 0:
            raise ValueError(
                f"mask {self.id!r}: expected non-empty (H, W) array, got shape {labels.shape}"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError(f"mask {self.id!r}: labels must be integers, got {labels.dtype}")
        if int(labels.min()) < 0:
            raise ValueError(f"mask {self.id!r}: negative class index")
        object.__setattr__(self, "labels", _readonly(labels.astype(np.int32)))

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return (
            self.id == other.id
            and self.labels.shape == other.labels.shape
            and bool(np.array_equal(self.labels, other.labels))
        )


@dataclass(frozen=True, eq=False)
class ProbMap:
    """Per-pixel class distributions of shape (height, width, num_classes).

    Every pixel's probabilities are non-negative and sum to 1 within
    ``ROW_SUM_TOL``. Use :meth:`from_raw` to sanitize arbitrary scores
    coming out of a learner.
    """

    id: str
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 3 or probs.size == 0:
            raise ValueError(
                f"probmap {self.id!r}: expected non-empty (H, W, K) array, got shape {probs.shape}"
            )
        if float(probs.min()) < 0.0:
            raise ValueError(f"probmap {self.id!r}: negative probability")
        sums = probs.sum(axis=2)
        err = float(np.abs(sums - 1.0).max())
        if err > ROW_SUM_TOL:
            raise ValueError(
                f"probmap {self.id!r}: pixel distributions must sum to 1 (max deviation {err:.3e})"
            )
        object.__setattr__(self, "probs", _readonly(probs))

    @classmethod
    def from_raw(cls, sample_id: str, raw: np.ndarray) -> "ProbMap":
        """Clamp raw non-negative scores to at least ``PROB_EPS`` per class and
        renormalize each pixel row to sum to 1."""
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 3:
            raise ValueError(f"probmap {sample_id!r}: expected (H, W, K) array")
        clamped = np.clip(raw, PROB_EPS, None)
        probs = clamped / clamped.sum(axis=2, keepdims=True)
        return cls(sample_id, probs)

    @property
    def height(self) -> int:
        return int(self.probs.shape[0])

    @property
    def width(self) -> int:
        return int(self.probs.shape[1])

    @property
    def num_classes(self) -> int:
        return int(self.probs.shape[2])

    @property
    def num_pixels(self) -> int:
        return self.height * self.width

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbMap):
            return NotImplemented
        return (
            self.id == other.id
            and self.probs.shape == other.probs.shape
            and bool(np.array_equal(self.probs, other.probs))
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered collection of (Image, Mask) pairs with a shared class space."""

    samples: tuple[tuple[Image, Mask], ...]
    num_classes: int
    class_names: tuple[str, ...]

    def __post_init__(self) -> None:
        samples = tuple((img, mask) for img, mask in self.samples)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        if len(self.class_names) != self.num_classes:
            raise ValueError(
                f"expected {self.num_classes} class names, got {len(self.class_names)}"
            )
        seen: set[str] = set()
        for img, mask in samples:
            if img.id != mask.id:
                raise ValueError(f"image/mask id mismatch: {img.id!r} vs {mask.id!r}")
            if img.id in seen:
                raise ValueError(f"duplicate sample id {img.id!r}")
            seen.add(img.id)
            if (img.height, img.width) != (mask.height, mask.width):
                raise ValueError(
                    f"sample {img.id!r}: image is {img.height}x{img.width} "
                    f"but mask is {mask.height}x{mask.width}"
                )
            top = int(mask.labels.max())
            if top >= self.num_classes:
                raise ValueError(
                    f"sample {img.id!r}: label out of range ({top} >= {self.num_classes})"
                )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(img.id for img, _ in self.samples)

    def get(self, sample_id: str) -> tuple[Image, Mask]:
        for img, mask in self.samples:
            if img.id == sample_id:
                return img, mask
        raise KeyError(f"unknown sample id {sample_id!r}")

    def image(self, sample_id: str) -> Image:
        return self.get(sample_id)[0]

    def mask(self, sample_id: str) -> Mask:
        return self.get(sample_id)[1]

    def subset(self, ids) -> "Dataset":
        """New Dataset restricted to ``ids``, keeping their given order."""
        index = {img.id: (img, mask) for img, mask in self.samples}
        try:
            picked = tuple(index[i] for i in ids)
        except KeyError as exc:
            raise KeyError(f"unknown sample id {exc.args[0]!r}") from None
        return Dataset(picked, self.num_classes, self.class_names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.class_names == other.class_names
            and self.samples == other.samples
        )
