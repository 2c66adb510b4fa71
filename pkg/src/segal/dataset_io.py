"""Dataset directory IO.

Layout::

    root/manifest.json     num_classes, class_names, color_map, optional extras
    root/images/*.png      8-bit grayscale or RGB
    root/masks/*.png       8-bit single-channel, pixel value = class index

Images and masks are paired by filename stem; the stem is the sample id.
Loading orders samples by filename, so a directory always produces the same
Dataset.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image as PilImage

from .types import Dataset, Image, Mask

MANIFEST_NAME = "manifest.json"

# Display palette used when a caller does not supply one. Mask pixels stay
# index-valued on disk; colors exist only for viewers.
_BASE_PALETTE = [
    [230, 25, 75], [60, 180, 75], [0, 130, 200], [255, 225, 25], [145, 30, 180],
    [70, 240, 240], [240, 50, 230], [210, 245, 60], [250, 190, 190], [0, 128, 128],
    [170, 110, 40], [128, 128, 128],
]


def default_color_map(num_classes: int) -> list[list[int]]:
    return [_BASE_PALETTE[i % len(_BASE_PALETTE)] for i in range(num_classes)]


def read_manifest(root_path) -> dict:
    path = Path(root_path) / MANIFEST_NAME
    if not path.is_file():
        raise ValueError(f"no manifest found at {path}")
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    for key in ("num_classes", "class_names"):
        if key not in manifest:
            raise ValueError(f"manifest {path} is missing {key!r}")
    return manifest


def _load_image(path: Path) -> Image:
    with PilImage.open(path) as pil:
        if pil.mode == "L":
            arr = np.asarray(pil, dtype=np.uint8)[:, :, None]
        elif pil.mode == "RGB":
            arr = np.asarray(pil, dtype=np.uint8)
        else:
            raise ValueError(f"unsupported image mode {pil.mode!r} in {path.name}")
    return Image(path.stem, arr.astype(np.float32) / 255.0)


def _load_mask(path: Path, num_classes: int) -> Mask:
    with PilImage.open(path) as pil:
        if pil.mode not in ("L", "P"):
            raise ValueError(f"mask {path.name} must be 8-bit single-channel, got mode {pil.mode!r}")
        arr = np.asarray(pil, dtype=np.uint8)
    top = int(arr.max()) if arr.size else 0
    if top >= num_classes:
        raise ValueError(f"label out of range in {path.name}: {top} >= {num_classes}")
    return Mask(path.stem, arr)


def load_dataset(root_path) -> Dataset:
    """Load a dataset directory written by :func:`write_dataset`.

    Raises ValueError naming the offending file on a missing mask, an
    out-of-range label, or an image/mask dimension mismatch.
    """
    root = Path(root_path)
    manifest = read_manifest(root)
    num_classes = int(manifest["num_classes"])
    class_names = tuple(str(n) for n in manifest["class_names"])

    image_dir = root / "images"
    mask_dir = root / "masks"
    image_paths = sorted(image_dir.glob("*.png")) if image_dir.is_dir() else []
    if not image_paths:
        raise ValueError(f"no samples found in {root}")

    samples = []
    for image_path in image_paths:
        mask_path = mask_dir / image_path.name
        if not mask_path.is_file():
            raise ValueError(f"missing mask for image {image_path.name}")
        img = _load_image(image_path)
        mask = _load_mask(mask_path, num_classes)
        if (img.height, img.width) != (mask.height, mask.width):
            raise ValueError(
                f"dimension mismatch for {image_path.name}: image {img.height}x{img.width}, "
                f"mask {mask.height}x{mask.width}"
            )
        samples.append((img, mask))
    return Dataset(tuple(samples), num_classes, class_names)


def write_dataset(ds: Dataset, root_path, color_map=None, extra_manifest=None) -> None:
    """Write ``ds`` so that ``load_dataset`` reproduces it bit-exactly.

    Channel values are stored as round(value * 255); data already on the
    8-bit grid survives the round trip unchanged. ``extra_manifest`` entries
    are merged into manifest.json (used by the synthetic generator to echo
    its configuration).
    """
    ids = [img.id for img, _ in ds.samples]
    if len(set(ids)) != len(ids):
        raise ValueError("dataset has duplicate sample ids")
    if ds.num_classes > 256:
        raise ValueError("mask PNGs support at most 256 classes")

    root = Path(root_path)
    image_dir = root / "images"
    mask_dir = root / "masks"
    image_dir.mkdir(parents=True, exist_ok=True)
    mask_dir.mkdir(parents=True, exist_ok=True)

    manifest = {
        "num_classes": ds.num_classes,
        "class_names": list(ds.class_names),
        "color_map": color_map if color_map is not None else default_color_map(ds.num_classes),
    }
    if extra_manifest:
        manifest.update(extra_manifest)
    with open(root / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")

    for img, mask in ds.samples:
        arr = np.round(np.asarray(img.data, dtype=np.float64) * 255.0).astype(np.uint8)
        if img.channels == 1:
            pil = PilImage.fromarray(arr[:, :, 0], mode="L")
        elif img.channels == 3:
            pil = PilImage.fromarray(arr, mode="RGB")
        else:
            raise ValueError(f"image {img.id!r}: PNG export supports 1 or 3 channels, got {img.channels}")
        pil.save(image_dir / f"{img.id}.png")
        PilImage.fromarray(mask.labels.astype(np.uint8), mode="L").save(mask_dir / f"{mask.id}.png")
